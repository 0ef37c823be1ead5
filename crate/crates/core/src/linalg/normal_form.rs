use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use super::matrix::IntMatrix;

/// Column-style Hermite normal form.
///
/// Returns `(H, U)` with `H = M·U`, `U` unimodular, and `H` in reduced column
/// echelon form: the nonzero columns come first, the pivot (topmost nonzero
/// entry) of column `j` sits strictly below the pivot of column `j - 1`, every
/// pivot is positive, and the entries to the left of a pivot in its row lie in
/// `[0, pivot)`. This form is unique for a given column span.
pub fn hermite_normal_form(m: &IntMatrix) -> (IntMatrix, IntMatrix) {
    let (rows, cols) = m.shape();
    let mut h = m.clone();
    let mut u = IntMatrix::identity(cols);
    let mut c = 0;

    for r in 0..rows {
        if c == cols {
            break;
        }
        for k in c + 1..cols {
            if h.get(r, k).is_zero() {
                continue;
            }
            let a = h.get(r, c).clone();
            let b = h.get(r, k).clone();
            if a.is_zero() {
                h.swap_cols(c, k);
                u.swap_cols(c, k);
            } else if (&b % &a).is_zero() {
                let q = -(&b / &a);
                h.add_col_multiple(k, c, &q);
                u.add_col_multiple(k, c, &q);
            } else {
                let e = a.extended_gcd(&b);
                let (mut g, mut x, mut y) = (e.gcd, e.x, e.y);
                if g.is_negative() {
                    g = -g;
                    x = -x;
                    y = -y;
                }
                // det [[x, -b/g], [y, a/g]] = (x·a + y·b)/g = 1
                let z = -(&b / &g);
                let w = &a / &g;
                h.combine_cols(c, k, [&x, &y, &z, &w]);
                u.combine_cols(c, k, [&x, &y, &z, &w]);
            }
        }
        if h.get(r, c).is_zero() {
            continue;
        }
        if h.get(r, c).is_negative() {
            h.negate_col(c);
            u.negate_col(c);
        }
        let p = h.get(r, c).clone();
        for k in 0..c {
            let q = h.get(r, k).div_floor(&p);
            if !q.is_zero() {
                let q = -q;
                h.add_col_multiple(k, c, &q);
                u.add_col_multiple(k, c, &q);
            }
        }
        c += 1;
    }
    (h, u)
}

/// Number of nonzero columns of a column HNF, i.e. the rational rank.
pub fn hnf_rank(h: &IntMatrix) -> usize {
    (0..h.cols())
        .take_while(|&j| (0..h.rows()).any(|i| !h.get(i, j).is_zero()))
        .count()
}

pub fn rational_rank(m: &IntMatrix) -> usize {
    hnf_rank(&hermite_normal_form(m).0)
}

/// Smith normal form.
///
/// Returns `(D, U, V)` with `D = U·M·V` diagonal, `d_1 | d_2 | ...`, nonnegative
/// diagonal, and `U`, `V` unimodular. Pivots are chosen as the entry of
/// smallest nonzero absolute value in the remaining block, ties going to the
/// lowest `(row, col)`.
pub fn smith_normal_form(m: &IntMatrix) -> (IntMatrix, IntMatrix, IntMatrix) {
    let (rows, cols) = m.shape();
    let mut d = m.clone();
    let mut u = IntMatrix::identity(rows);
    let mut v = IntMatrix::identity(cols);

    for t in 0..rows.min(cols) {
        loop {
            let Some((pr, pc)) = smallest_entry(&d, t) else {
                return (d, u, v);
            };
            d.swap_rows(t, pr);
            u.swap_rows(t, pr);
            d.swap_cols(t, pc);
            v.swap_cols(t, pc);

            let p = d.get(t, t).clone();
            let mut clean = true;
            for i in t + 1..rows {
                let q = d.get(i, t).div_floor(&p);
                if !q.is_zero() {
                    let q = -q;
                    d.add_row_multiple(i, t, &q);
                    u.add_row_multiple(i, t, &q);
                }
                clean &= d.get(i, t).is_zero();
            }
            for j in t + 1..cols {
                let q = d.get(t, j).div_floor(&p);
                if !q.is_zero() {
                    let q = -q;
                    d.add_col_multiple(j, t, &q);
                    v.add_col_multiple(j, t, &q);
                }
                clean &= d.get(t, j).is_zero();
            }
            if !clean {
                continue;
            }
            let bad_row = (t + 1..rows)
                .find(|&i| (t + 1..cols).any(|j| !(d.get(i, j) % &p).is_zero()));
            match bad_row {
                Some(i) => {
                    let one = BigInt::from(1);
                    d.add_row_multiple(t, i, &one);
                    u.add_row_multiple(t, i, &one);
                }
                None => break,
            }
        }
        if d.get(t, t).is_negative() {
            d.negate_row(t);
            u.negate_row(t);
        }
    }
    (d, u, v)
}

fn smallest_entry(d: &IntMatrix, t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(BigInt, usize, usize)> = None;
    for i in t..d.rows() {
        for j in t..d.cols() {
            let x = d.get(i, j);
            if x.is_zero() {
                continue;
            }
            let a = x.abs();
            if best.as_ref().is_none_or(|(b, _, _)| a < *b) {
                best = Some((a, i, j));
            }
        }
    }
    best.map(|(_, i, j)| (i, j))
}

/// Diagonal of a Smith form, including zeros, of length `min(rows, cols)`.
pub fn smith_diagonal(d: &IntMatrix) -> Vec<BigInt> {
    (0..d.rows().min(d.cols())).map(|i| d.get(i, i).clone()).collect()
}

/// Integer inverse of a unimodular matrix, `None` otherwise.
pub fn inverse_unimodular(m: &IntMatrix) -> Option<IntMatrix> {
    if !m.is_square() {
        return None;
    }
    let (h, u) = hermite_normal_form(m);
    h.is_identity().then_some(u)
}
