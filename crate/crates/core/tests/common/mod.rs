//! Random instances and small independent oracles shared by the integration
//! tests. Everything here works on plain `i64` arrays so that it does not
//! lean on the library's own arithmetic.

#![allow(dead_code)]

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use sheafkit::algebra::ElementaryAlgebra;
use sheafkit::etheory::{HomGroup, HomTuple};
use sheafkit::linalg::IntMatrix;

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn random_matrix(rng: &mut StdRng, rows: usize, cols: usize, bound: i64) -> IntMatrix {
    let data: Vec<Vec<i64>> = (0..rows)
        .map(|_| (0..cols).map(|_| rng.gen_range(-bound..=bound)).collect())
        .collect();
    if rows == 0 {
        return IntMatrix::zeros(0, cols);
    }
    IntMatrix::from_rows(&data)
}

/// Strict algebra with `n` singular points, segment ranks in `1..=max_rank`
/// and non-identity connecting maps with entries in `[-bound, bound]`.
pub fn random_strict(
    rng: &mut StdRng,
    name: &str,
    n: usize,
    max_rank: usize,
    bound: i64,
) -> ElementaryAlgebra {
    let h: Vec<usize> = (0..=n).map(|_| rng.gen_range(1..=max_rank)).collect();
    let mut d = Vec::with_capacity(n);
    let mut g0 = Vec::with_capacity(n);
    let mut g1 = Vec::with_capacity(n);
    for i in 0..n {
        let j = rng.gen_range(0..2);
        let di = h[i + j];
        d.push(di);
        let other = random_matrix(rng, h[i + 1 - j], di, bound);
        if j == 0 {
            g0.push(IntMatrix::identity(di));
            g1.push(other);
        } else {
            g0.push(other);
            g1.push(IntMatrix::identity(di));
        }
    }
    ElementaryAlgebra::from_parts(name, d, h, g0, g1).unwrap()
}

pub fn random_pair(
    rng: &mut StdRng,
    max_n: usize,
    max_rank: usize,
    bound: i64,
) -> (ElementaryAlgebra, ElementaryAlgebra) {
    let n = rng.gen_range(0..=max_n);
    (
        random_strict(rng, "A", n, max_rank, bound),
        random_strict(rng, "B", n, max_rank, bound),
    )
}

/// A random integer combination of the basis, coefficients in `[-2, 2]`.
pub fn random_member(rng: &mut StdRng, g: &HomGroup) -> HomTuple {
    let basis = g.basis();
    let shapes = g.shapes().to_vec();
    let mut betas: Vec<IntMatrix> = shapes.iter().map(|&(r, c)| IntMatrix::zeros(r, c)).collect();
    for t in &basis {
        let c = num_bigint::BigInt::from(rng.gen_range(-2i64..=2));
        for (acc, b) in betas.iter_mut().zip(&t.betas) {
            *acc = &*acc + &b.scale(&c);
        }
    }
    HomTuple::new(&g.source, &g.target, betas)
}

pub type Mat = Vec<Vec<i64>>;

pub fn to_i64(m: &IntMatrix) -> Mat {
    m.to_i64_rows().expect("small entries")
}

pub fn mat_mul(a: &Mat, b: &Mat, inner: usize, cols: usize) -> Mat {
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| (0..inner).map(|k| row[k] * b[k][j]).sum())
                .collect()
        })
        .collect()
}

fn is_identity(m: &IntMatrix) -> bool {
    let r = to_i64(m);
    r.len() == m.cols()
        && r.iter()
            .enumerate()
            .all(|(i, row)| row.iter().enumerate().all(|(j, &x)| x == i64::from(i == j)))
}

/// The pointwise relation of a strict target, evaluated with `i64`
/// products: at each singular point, with `j` the identity side of `B`,
/// `β_{i+j'}·G_{i,j'} = G'_{i,j'}·β_{i+j}·G_{i,j}`.
pub fn relation_holds(a: &ElementaryAlgebra, b: &ElementaryAlgebra, betas: &[Mat]) -> bool {
    for i in 1..=a.n {
        let j = if is_identity(b.g0(i)) { 0 } else { 1 };
        let jp = 1 - j;
        let d = a.d_rank(i);
        let h_jp = a.h_rank(i + jp);
        let h_j = a.h_rank(i + j);
        let hb_j = b.h_rank(i + j);
        let lhs = mat_mul(&betas[i + jp - 1], &to_i64(a.gamma(i, jp)), h_jp, d);
        let inner = mat_mul(&betas[i + j - 1], &to_i64(a.gamma(i, j)), h_j, d);
        let rhs = mat_mul(&to_i64(b.gamma(i, jp)), &inner, hb_j, d);
        if lhs != rhs {
            return false;
        }
    }
    true
}

/// Tuple shapes `h'_k x h_k` in segment order.
pub fn shapes(a: &ElementaryAlgebra, b: &ElementaryAlgebra) -> Vec<(usize, usize)> {
    (1..=a.n + 1).map(|k| (b.h_rank(k), a.h_rank(k))).collect()
}

/// Splits a flat column-major vector into matrices of the given shapes.
pub fn split(v: &[i64], shapes: &[(usize, usize)]) -> Vec<Mat> {
    let mut out = Vec::new();
    let mut at = 0;
    for &(r, c) in shapes {
        let m: Mat = (0..r).map(|i| (0..c).map(|j| v[at + j * r + i]).collect()).collect();
        out.push(m);
        at += r * c;
    }
    out
}

/// Determinant by fraction-free elimination in `i128`.
pub fn det_i128(m: &[Vec<i128>]) -> i128 {
    let n = m.len();
    if n == 0 {
        return 1;
    }
    let mut a: Vec<Vec<i128>> = m.to_vec();
    let mut sign = 1;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if a[k][k] == 0 {
            match (k + 1..n).find(|&r| a[r][k] != 0) {
                Some(r) => {
                    a.swap(k, r);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
            }
        }
        prev = a[k][k];
    }
    sign * a[n - 1][n - 1]
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if n < k {
        return vec![];
    }
    let mut out = subsets(n - 1, k);
    for mut s in subsets(n - 1, k - 1) {
        s.push(n - 1);
        out.push(s);
    }
    out
}

fn gcd(a: i128, b: i128) -> i128 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// `D_k`, the gcd of all `k x k` minors, for `k = 1..=min(rows, cols)`.
pub fn determinantal_divisors(m: &Mat, cols: usize) -> Vec<i128> {
    let rows = m.len();
    (1..=rows.min(cols))
        .map(|k| {
            let mut g = 0;
            for rs in subsets(rows, k) {
                for cs in subsets(cols, k) {
                    let minor: Vec<Vec<i128>> = rs
                        .iter()
                        .map(|&r| cs.iter().map(|&c| m[r][c] as i128).collect())
                        .collect();
                    g = gcd(g, det_i128(&minor));
                }
            }
            g
        })
        .collect()
}

/// Invariant factors `D_k / D_{k-1}`, zero once `D_k` vanishes.
pub fn invariant_factors(m: &Mat, cols: usize) -> Vec<i128> {
    let dk = determinantal_divisors(m, cols);
    let mut prev = 1;
    dk.iter()
        .map(|&d| {
            if d == 0 {
                0
            } else {
                let f = d / prev;
                prev = d;
                f
            }
        })
        .collect()
}
