use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde_json::{json, Value};
use sheafkit::algebra::ElementaryAlgebra;
use sheafkit::etheory::{
    compose, e1_group, factor, hom, hom_sheaf_via_delta, intertwine, is_isomorphism,
    oracle_check, pullback_check, restrict_hom, skyscraper_e, skyscraper_e_via_tower,
    HomTuple, ZigzagStep,
};
use sheafkit::linalg::Lattice;

use crate::input::{self, Scenario};
use crate::{Command, Failure, Mode};

type Outcome = Result<String, (String, Failure)>;

struct Report {
    text: String,
    json: Value,
}

impl Report {
    fn render(&self, mode: Mode) -> String {
        match mode {
            Mode::Text => format!("{}\n", self.text),
            Mode::Json => format!("{}\n", serde_json::to_string_pretty(&self.json).unwrap()),
        }
    }
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("engine values serialize")
}

fn int(x: &BigInt) -> Value {
    match x.to_i64() {
        Some(v) => json!(v),
        None => json!(x.to_string()),
    }
}

fn vector_text(v: &[BigInt]) -> String {
    let parts: Vec<String> = v.iter().map(BigInt::to_string).collect();
    format!("({})", parts.join(","))
}

fn lattice_json(l: &Lattice) -> Value {
    let basis: Vec<Vec<Value>> = l
        .basis_vectors()
        .iter()
        .map(|v| v.iter().map(int).collect())
        .collect();
    json!({ "ambient_rank": l.ambient_rank(), "rank": l.rank(), "basis": basis })
}

fn tuple_report(t: &HomTuple) -> Report {
    Report {
        text: t.to_string(),
        json: to_value(t),
    }
}

pub fn run(command: Command, mode: Mode) -> Outcome {
    match execute(command) {
        Ok(Ok(r)) => Ok(r.render(mode)),
        Ok(Err((r, f))) => Err((r.render(mode), f)),
        Err(f) => Err((String::new(), f)),
    }
}

/// Outer error: nothing to report. Inner error: a report that describes a
/// negative result, printed before exiting nonzero.
fn execute(command: Command) -> Result<Result<Report, (Report, Failure)>, Failure> {
    use Command::*;
    let report = match command {
        Validate { file } => return validate(&file),
        K { file, interval } => {
            let a = input::algebra(&file)?;
            let i = interval.unwrap_or_else(|| a.full_interval());
            let k = a.k_groups(&i)?;
            let basis: Vec<String> = k.k0.basis_vectors().iter().map(|v| vector_text(v)).collect();
            let k0 = if basis.is_empty() {
                "K0 = 0".to_string()
            } else {
                format!("K0 = {}; basis {}", k.k0_group(), basis.join(", "))
            };
            Report {
                text: format!("interval {i}\n{k0}\nK1 = {}", k.k1),
                json: json!({
                    "interval": i.to_string(),
                    "k0": lattice_json(&k.k0),
                    "k1": to_value(&k.k1),
                }),
            }
        }
        Hom { a, b, via_delta, e1 } => {
            let (a, b) = (input::algebra(&a)?, input::algebra(&b)?);
            let g = if via_delta { hom_sheaf_via_delta(&a, &b)? } else { hom(&a, &b)? };
            if e1 {
                let e = e1_group(&a, &b)?;
                Report {
                    text: format!("{}\nE1 = {e}", g.summary()),
                    json: json!({ "hom": to_value(&g), "e1": to_value(&e) }),
                }
            } else {
                Report {
                    text: g.summary(),
                    json: to_value(&g),
                }
            }
        }
        Sky { d_rank, at, b, via_tower } => {
            let b = input::algebra(&b)?;
            let g = if via_tower {
                skyscraper_e_via_tower(d_rank, at, &b)?
            } else {
                skyscraper_e(d_rank, at, &b)?
            };
            Report {
                text: g.to_string(),
                json: to_value(&g),
            }
        }
        Restrict { a, b, from, to, tuple } => {
            let (a, b) = (input::algebra(&a)?, input::algebra(&b)?);
            let t = input::tuple(&tuple, &a, &b)?;
            tuple_report(&restrict_hom(&a, &b, &from, &to, &t)?)
        }
        PullbackCheck { a, b, y, z } => {
            let (a, b) = (input::algebra(&a)?, input::algebra(&b)?);
            let r = pullback_check(&a, &b, &y, &z)?;
            let report = Report {
                text: if r.holds {
                    "pullback property: holds".to_string()
                } else {
                    format!(
                        "pullback property: fails (E(Y ∪ Z) rank {}, fiber product rank {}, witness {})",
                        r.union_rank,
                        r.fiber_product_rank,
                        r.witness.as_ref().map_or("none".into(), |t| t.to_string())
                    )
                },
                json: to_value(&r),
            };
            if !r.holds {
                return Ok(Err((report, Failure::Validation("pullback property fails".into()))));
            }
            report
        }
        Compose { a, b, c, s, t } => {
            let (a, b, c) = (input::algebra(&a)?, input::algebra(&b)?, input::algebra(&c)?);
            let s = input::tuple(&s, &a, &b)?;
            let t = input::tuple(&t, &b, &c)?;
            tuple_report(&compose(&a, &b, &c, &s, &t)?)
        }
        Invert { a, b, t } => {
            let (a, b) = (input::algebra(&a)?, input::algebra(&b)?);
            let t = input::tuple(&t, &a, &b)?;
            match is_isomorphism(&a, &b, &t)? {
                Some(inv) => tuple_report(&inv),
                None => {
                    let report = Report {
                        text: "not invertible".into(),
                        json: Value::Null,
                    };
                    return Ok(Err((report, Failure::Infeasible("no inverse in hom(B, A)".into()))));
                }
            }
        }
        Refine { file, segment } => {
            let a = input::algebra(&file)?;
            let r = a.refine(segment)?;
            Report {
                text: serde_json::to_string_pretty(&r).unwrap(),
                json: to_value(&r),
            }
        }
        Factor { a, b_small, b_big, psi, alpha } => {
            let a = input::algebra(&a)?;
            let (bs, bb) = (input::algebra(&b_small)?, input::algebra(&b_big)?);
            let psi = input::tuple(&psi, &bs, &bb)?;
            let alpha = input::tuple(&alpha, &a, &bb)?;
            match factor(&a, &bs, &bb, &psi, &alpha)? {
                Some(sol) => Report {
                    text: format!("mu = {}\nkernel {}", sol.particular, sol.kernel.summary()),
                    json: to_value(&sol),
                },
                None => {
                    let report = Report {
                        text: "no factorization".into(),
                        json: Value::Null,
                    };
                    return Ok(Err((report, Failure::Infeasible("α does not factor through ψ".into()))));
                }
            }
        }
        Intertwine { scenario } => {
            let (a, b, alpha) = input::read_json::<Scenario>(&scenario)?.systems()?;
            let r = intertwine(&a, &b, &alpha)?;
            let mut lines = Vec::new();
            for k in 0..r.mus.len().max(r.etas.len()) {
                if let Some(m) = r.mus.get(k) {
                    lines.push(format!("mu_{} = {m}", k + 1));
                }
                if let Some(e) = r.etas.get(k) {
                    lines.push(format!("eta_{} = {e}", k + 1));
                }
            }
            match &r.failure {
                None => lines.push(format!(
                    "zigzag complete; {}",
                    if r.verified { "verified" } else { "verification failed" }
                )),
                Some(f) => {
                    let step = match f.step {
                        ZigzagStep::Mu => "mu",
                        ZigzagStep::Eta => "eta",
                    };
                    lines.push(format!("zigzag fails at stage {} ({step}): {}", f.stage, f.reason));
                }
            }
            let report = Report {
                text: lines.join("\n"),
                json: to_value(&r),
            };
            if !(r.complete && r.verified) {
                return Ok(Err((report, Failure::Infeasible("zigzag incomplete".into()))));
            }
            report
        }
        OracleCheck { a, b, box_size } => {
            let (a, b) = (input::algebra(&a)?, input::algebra(&b)?);
            let r = oracle_check(&a, &b, box_size)?;
            let report = Report {
                text: format!(
                    "dimension {}, box [-{},{}]: {} tuples, {} relation members, {} lattice members, {} mismatches; {}",
                    r.dimension,
                    r.box_size,
                    r.box_size,
                    r.enumerated,
                    r.relation_members,
                    r.lattice_members,
                    r.mismatches,
                    if r.agree { "agree" } else { "disagree" }
                ),
                json: to_value(&r),
            };
            if !r.agree {
                return Ok(Err((report, Failure::Validation("oracle disagreement".into()))));
            }
            report
        }
    };
    Ok(Ok(report))
}

fn validate(path: &std::path::Path) -> Result<Result<Report, (Report, Failure)>, Failure> {
    let a: ElementaryAlgebra = input::read_json(path)?;
    let v = a.validate();
    let mut lines = Vec::new();
    if v.valid {
        lines.push(format!(
            "{}: valid{}",
            a.name,
            if v.is_special_elementary { " (special elementary)" } else { "" }
        ));
    } else {
        lines.push(format!("{}: invalid", a.name));
        lines.extend(v.violations.iter().map(|x| format!("  {x}")));
    }
    let report = Report {
        text: lines.join("\n"),
        json: to_value(&v),
    };
    if v.valid {
        Ok(Ok(report))
    } else {
        let n = v.violations.len();
        Ok(Err((report, Failure::Validation(format!("{n} violation(s)")))))
    }
}
