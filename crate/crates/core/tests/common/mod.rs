//! Independent oracles shared by the integration tests and the acceptance target.
//!
//! Nothing here calls into the enumeration or reduction code: the Gram-Schmidt
//! data, inverses and brute-force searches are recomputed from scratch over
//! the rationals.
#![allow(dead_code)]

pub mod criteria;

use std::collections::BTreeSet;
use std::path::PathBuf;

use mertens_core::rug::{Integer, Rational};
use mertens_core::{determinant, LatticeBasis};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests").join("data")
}

/// A full-rank `m x m` basis with entries in `[-bound, bound]`.
pub fn random_basis(rng: &mut ChaCha8Rng, m: usize, bound: i64) -> LatticeBasis {
    loop {
        let rows: Vec<Vec<i64>> = (0..m)
            .map(|_| (0..m).map(|_| rng.gen_range(-bound..=bound)).collect())
            .collect();
        let b = LatticeBasis::from_i64(&rows).unwrap();
        if matches!(determinant(&b), Ok(d) if d.gram_det != 0) {
            return b;
        }
    }
}

/// Random rational vector: integer part in `[-bound, bound]`, fractional part `k/97`.
pub fn random_target(rng: &mut ChaCha8Rng, n: usize, bound: i64) -> Vec<Rational> {
    (0..n)
        .map(|_| Rational::from(rng.gen_range(-bound..=bound)) + Rational::from((rng.gen_range(0..97), 97)))
        .collect()
}

pub fn dot_q(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).map(|(x, y)| Rational::from(x * y)).sum()
}

fn rows_q(basis: &LatticeBasis) -> Vec<Vec<Rational>> {
    basis
        .rows()
        .iter()
        .map(|r| r.iter().map(Rational::from).collect())
        .collect()
}

/// Textbook Gram-Schmidt on the row vectors themselves.
pub struct RationalGso {
    pub bstar: Vec<Vec<Rational>>,
    pub norms_sq: Vec<Rational>,
    pub mu: Vec<Vec<Rational>>,
}

pub fn rational_gso(basis: &LatticeBasis) -> RationalGso {
    let b = rows_q(basis);
    let m = b.len();
    let mut bstar: Vec<Vec<Rational>> = Vec::with_capacity(m);
    let mut norms_sq: Vec<Rational> = Vec::with_capacity(m);
    let mut mu = vec![vec![Rational::new(); m]; m];
    for i in 0..m {
        let mut v = b[i].clone();
        for j in 0..i {
            let c = dot_q(&b[i], &bstar[j]) / &norms_sq[j];
            for (x, y) in v.iter_mut().zip(&bstar[j]) {
                *x -= Rational::from(&c * y);
            }
            mu[i][j] = c;
        }
        mu[i][i] = Rational::from(1);
        norms_sq.push(dot_q(&v, &v));
        bstar.push(v);
    }
    RationalGso { bstar, norms_sq, mu }
}

/// `|pi_k(d)|^2` for `k = 0..m` (0-based: `pi_0` is the identity on the span).
pub fn projected_norms(gso: &RationalGso, d: &[Rational]) -> Vec<Rational> {
    let m = gso.bstar.len();
    let mut out = vec![Rational::new(); m];
    let mut acc = Rational::new();
    for k in (0..m).rev() {
        let s = dot_q(d, &gso.bstar[k]);
        acc += Rational::from(&s * &s) / &gso.norms_sq[k];
        out[k] = acc.clone();
    }
    out
}

/// Inverse of a square integer matrix over the rationals (Gauss-Jordan).
pub fn inverse(basis: &LatticeBasis) -> Vec<Vec<Rational>> {
    let n = basis.rank();
    let mut a = rows_q(basis);
    let mut inv: Vec<Vec<Rational>> = (0..n)
        .map(|i| (0..n).map(|j| Rational::from((i == j) as i32)).collect())
        .collect();
    for col in 0..n {
        let p = (col..n).find(|&r| a[r][col] != 0).expect("invertible");
        a.swap(col, p);
        inv.swap(col, p);
        let piv = a[col][col].clone();
        for j in 0..n {
            a[col][j] /= &piv;
            inv[col][j] /= &piv;
        }
        for r in 0..n {
            if r != col && a[r][col] != 0 {
                let f = a[r][col].clone();
                for j in 0..n {
                    let t = Rational::from(&f * &a[col][j]);
                    a[r][j] -= t;
                    let t = Rational::from(&f * &inv[col][j]);
                    inv[r][j] -= t;
                }
            }
        }
    }
    inv
}

/// Coordinates of `x` in the basis: `x B^{-1}`.
pub fn coords(inv: &[Vec<Rational>], x: &[Rational]) -> Vec<Rational> {
    let n = inv.len();
    (0..n)
        .map(|j| (0..n).map(|i| Rational::from(&x[i] * &inv[i][j])).sum())
        .collect()
}

/// Per-coordinate intervals containing every coefficient vector within `sqrt(r2)` of `t`.
///
/// `|c_j - tc_j| <= |x - t| |col_j(B^{-1})|`, by Cauchy-Schwarz.
pub fn coefficient_box(basis: &LatticeBasis, t: &[Rational], r2: &Rational) -> Vec<(Integer, Integer)> {
    let inv = inverse(basis);
    let tc = coords(&inv, t);
    let n = basis.rank();
    (0..n)
        .map(|j| {
            let col_sq: Rational = (0..n).map(|i| Rational::from(&inv[i][j] * &inv[i][j])).sum();
            // width^2 = r2 * col_sq; take an integer upper bound of the width
            let w2 = Rational::from(r2 * &col_sq);
            let w = Integer::from(w2.ceil_ref()).sqrt() + 1u32;
            let lo = Rational::from(&tc[j] - &w).ceil().into_numer_denom().0;
            let hi = Rational::from(&tc[j] + &w).floor().into_numer_denom().0;
            (lo, hi)
        })
        .collect()
}

pub fn box_size(bx: &[(Integer, Integer)]) -> f64 {
    bx.iter()
        .map(|(lo, hi)| (Integer::from(hi - lo) + 1u32).to_f64())
        .product()
}

pub fn combination_q(basis: &LatticeBasis, c: &[Integer]) -> Vec<Rational> {
    basis.combination(c).iter().map(Rational::from).collect()
}

pub fn dist_sq(basis: &LatticeBasis, c: &[Integer], t: &[Rational]) -> Rational {
    combination_q(basis, c)
        .iter()
        .zip(t)
        .map(|(x, y)| {
            let d = Rational::from(x - y);
            Rational::from(&d * &d)
        })
        .sum()
}

/// Every coefficient vector in the box whose point lies within `sqrt(r2)` of `t`.
///
/// Works in integers scaled by the common denominator `D` of the target:
/// `|x - t|^2 <= r2` iff `|D x - D t|^2 <= floor(D^2 r2)`.
pub fn brute_force(basis: &LatticeBasis, t: &[Rational], r2: &Rational, bx: &[(Integer, Integer)]) -> BTreeSet<Vec<Integer>> {
    let mut out = BTreeSet::new();
    if bx.iter().any(|(lo, hi)| lo > hi) {
        return out;
    }
    let den = t.iter().fold(Integer::from(1), |acc, x| acc.lcm(x.denom()));
    let small = |x: &Integer| x.to_i128().expect("brute force needs small entries");
    let d = small(&den);
    let tt: Vec<i128> = t.iter().map(|x| small(&Rational::from(x * &den).into_numer_denom().0)).collect();
    let bound = small(&Rational::from(r2 * Integer::from(&den * &den)).floor().into_numer_denom().0);
    let rows: Vec<Vec<i128>> = basis.rows().iter().map(|r| r.iter().map(|e| small(e) * d).collect()).collect();
    let lo: Vec<i128> = bx.iter().map(|(l, _)| small(l)).collect();
    let hi: Vec<i128> = bx.iter().map(|(_, h)| small(h)).collect();
    let n = tt.len();
    let mut c = lo.clone();
    // x = D * sum c_i b_i - D t
    let mut x: Vec<i128> = (0..n)
        .map(|k| rows.iter().zip(&c).map(|(r, ci)| r[k] * ci).sum::<i128>() - tt[k])
        .collect();
    loop {
        if x.iter().map(|v| v * v).sum::<i128>() <= bound {
            out.insert(c.iter().map(|&v| Integer::from(v)).collect());
        }
        let mut i = 0;
        loop {
            if i == c.len() {
                return out;
            }
            if c[i] < hi[i] {
                c[i] += 1;
                for (xk, rk) in x.iter_mut().zip(&rows[i]) {
                    *xk += rk;
                }
                break;
            }
            let back = c[i] - lo[i];
            c[i] = lo[i];
            for (xk, rk) in x.iter_mut().zip(&rows[i]) {
                *xk -= rk * back;
            }
            i += 1;
        }
    }
}

/// Exact shortest nonzero norm by depth-first search with rational interval
/// bounds at every level (Fincke-Pohst without zig-zag ordering).
pub fn shortest_norm_sq(basis: &LatticeBasis, upper: &Integer) -> Integer {
    let g = rational_gso(basis);
    let m = basis.rank();
    let mut best = Rational::from(upper);
    let mut best_c: Option<Vec<Integer>> = None;
    let mut c = vec![Integer::new(); m];
    fn rec(
        level: usize,
        partial: Rational,
        c: &mut Vec<Integer>,
        g: &RationalGso,
        basis: &LatticeBasis,
        best: &mut Rational,
        best_c: &mut Option<Vec<Integer>>,
    ) {
        let m = c.len();
        // center of level `level` given higher coefficients
        let mut center = Rational::new();
        for j in level + 1..m {
            center -= Rational::from(&c[j] * &g.mu[j][level]);
        }
        let room = Rational::from(&*best - &partial);
        if room < 0 {
            return;
        }
        let w2 = room / &g.norms_sq[level];
        let w = Integer::from(w2.ceil_ref()).sqrt() + 1u32;
        let lo = Rational::from(&center - &w).ceil().into_numer_denom().0;
        let hi = Rational::from(&center + &w).floor().into_numer_denom().0;
        let mut x = lo;
        while x <= hi {
            let diff = Rational::from(&x - &center);
            let p = &partial + Rational::from(&diff * &diff) * &g.norms_sq[level];
            if p <= *best {
                c[level] = x.clone();
                if level == 0 {
                    if c.iter().any(|v| *v != 0) {
                        let n = Rational::from(mertens_core::lattice::norm_sq(&basis.combination(c)));
                        if n <= *best {
                            *best = n;
                            *best_c = Some(c.clone());
                        }
                    }
                } else {
                    rec(level - 1, p, c, g, basis, best, best_c);
                }
            }
            x += 1;
        }
        c[level] = Integer::new();
    }
    rec(m - 1, Rational::new(), &mut c, &g, basis, &mut best, &mut best_c);
    assert!(best_c.is_some(), "upper bound below the shortest vector");
    best.into_numer_denom().0
}
