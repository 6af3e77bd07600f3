//! Integer row bases and their Gram-Schmidt data.
//!
//! The lattice is the set of integer combinations of the rows. Entries are
//! arbitrary-precision integers; Gram-Schmidt coefficients are MPFR floats at
//! a caller-chosen precision, computed from the exact Gram matrix.

use std::fmt::Write as _;
use std::path::Path;

use rug::ops::Pow;
use rug::{Float, Integer, Rational};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticeBasis {
    rows: Vec<Vec<Integer>>,
    ncols: usize,
}

impl LatticeBasis {
    pub fn new(rows: Vec<Vec<Integer>>) -> Result<Self> {
        let m = rows.len();
        if m == 0 {
            return Err(Error::Dimension("a basis needs at least one row".into()));
        }
        let n = rows[0].len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::Dimension("rows have different lengths".into()));
        }
        if m > n {
            return Err(Error::Dimension(format!(
                "{m} rows cannot be independent in dimension {n}"
            )));
        }
        Ok(LatticeBasis { rows, ncols: n })
    }

    pub fn from_i64(rows: &[Vec<i64>]) -> Result<Self> {
        Self::new(
            rows.iter()
                .map(|r| r.iter().map(|&x| Integer::from(x)).collect())
                .collect(),
        )
    }

    pub fn identity(m: usize) -> Self {
        let rows = (0..m)
            .map(|i| (0..m).map(|j| Integer::from((i == j) as u32)).collect())
            .collect();
        LatticeBasis { rows, ncols: m }
    }

    /// `(m, n)`: number of rows and ambient dimension.
    pub fn dim(&self) -> (usize, usize) {
        (self.rows.len(), self.ncols)
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<Integer>] {
        &self.rows
    }

    pub fn row(&self, i: usize) -> &[Integer] {
        &self.rows[i]
    }


    pub fn into_rows(self) -> Vec<Vec<Integer>> {
        self.rows
    }

    /// Largest entry bit length.
    pub fn max_bits(&self) -> u32 {
        self.rows
            .iter()
            .flatten()
            .map(|x| x.significant_bits())
            .max()
            .unwrap_or(0)
    }

    /// Default GSO precision: twice the largest entry bit length plus 64.
    pub fn default_precision(&self) -> u32 {
        2 * self.max_bits() + 64
    }

    /// Exact Gram matrix `B B^T`.
    pub fn gram(&self) -> Vec<Vec<Integer>> {
        let m = self.rank();
        let mut g = vec![vec![Integer::new(); m]; m];
        for i in 0..m {
            for j in 0..=i {
                let d = dot(&self.rows[i], &self.rows[j]);
                g[j][i] = d.clone();
                g[i][j] = d;
            }
        }
        g
    }

    /// `sum_i coeffs[i] * b_i`.
    pub fn combination(&self, coeffs: &[Integer]) -> Vec<Integer> {
        assert_eq!(coeffs.len(), self.rank());
        let mut out = vec![Integer::new(); self.ncols];
        for (c, row) in coeffs.iter().zip(&self.rows) {
            if *c == 0 {
                continue;
            }
            for (o, x) in out.iter_mut().zip(row) {
                *o += c * x;
            }
        }
        out
    }

    /// Plain-text form: a header line `m n`, then one row per line.
    pub fn to_text(&self) -> String {
        let (m, n) = self.dim();
        let mut s = format!("{m} {n}\n");
        for row in &self.rows {
            let mut first = true;
            for x in row {
                if !first {
                    s.push(' ');
                }
                first = false;
                write!(s, "{x}").unwrap();
            }
            s.push('\n');
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'));
        let (hl, header) = lines
            .next()
            .ok_or_else(|| Error::Format("empty basis file".into()))?;
        let dims: Vec<usize> = header
            .split_whitespace()
            .map(|t| t.parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Parse {
                line: hl + 1,
                msg: format!("bad header: {e}"),
            })?;
        let [m, n] = dims[..] else {
            return Err(Error::Parse {
                line: hl + 1,
                msg: "header must be `m n`".into(),
            });
        };
        let mut rows = Vec::with_capacity(m);
        for (ln, line) in lines {
            let row: Vec<Integer> = line
                .split_whitespace()
                .map(|t| t.parse::<Integer>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::Parse {
                    line: ln + 1,
                    msg: format!("bad integer: {e}"),
                })?;
            if row.len() != n {
                return Err(Error::Parse {
                    line: ln + 1,
                    msg: format!("expected {n} entries, found {}", row.len()),
                });
            }
            rows.push(row);
        }
        if rows.len() != m {
            return Err(Error::Format(format!(
                "header announces {m} rows, found {}",
                rows.len()
            )));
        }
        Self::new(rows)
    }

    pub fn write_to(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_text()).map_err(|e| Error::io(path, e))
    }

    pub fn read_from(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_text(&text)
    }
}

pub fn dot(a: &[Integer], b: &[Integer]) -> Integer {
    let mut acc = Integer::new();
    for (x, y) in a.iter().zip(b) {
        acc += x * y;
    }
    acc
}

pub fn norm_sq(a: &[Integer]) -> Integer {
    dot(a, a)
}

/// Gram-Schmidt coefficients `mu[i][j] = <b_i, b_j*> / |b_j*|^2` and the
/// squared norms `|b_i*|^2`.
#[derive(Clone, Debug)]
pub struct GramSchmidtData {
    pub mu: Vec<Vec<Float>>,
    pub bstar_norms_sq: Vec<Float>,
    pub precision: u32,
}

/// Double-precision copy of [`GramSchmidtData`], as consumed by enumeration.
#[derive(Clone, Debug, PartialEq)]
pub struct GsoF64 {
    pub mu: Vec<Vec<f64>>,
    pub bstar_norms_sq: Vec<f64>,
}

impl GramSchmidtData {
    pub fn dim(&self) -> usize {
        self.bstar_norms_sq.len()
    }

    pub fn to_f64(&self) -> GsoF64 {
        GsoF64 {
            mu: self
                .mu
                .iter()
                .map(|r| r.iter().map(Float::to_f64).collect())
                .collect(),
            bstar_norms_sq: self.bstar_norms_sq.iter().map(Float::to_f64).collect(),
        }
    }

    /// `log2 |b_i*|` for every row.
    pub fn log2_norms(&self) -> Vec<f64> {
        self.bstar_norms_sq
            .iter()
            .map(|r| Float::with_val(self.precision, r.log2_ref()).to_f64() / 2.0)
            .collect()
    }
}

impl GsoF64 {
    pub fn dim(&self) -> usize {
        self.bstar_norms_sq.len()
    }

    /// The GSO of rows `start..end`, projected orthogonally to rows `< start`.
    pub fn block(&self, start: usize, end: usize) -> GsoF64 {
        GsoF64 {
            mu: (start..end)
                .map(|i| (start..end).map(|j| self.mu[i][j]).collect())
                .collect(),
            bstar_norms_sq: self.bstar_norms_sq[start..end].to_vec(),
        }
    }
}

/// Cholesky-style GSO of an exact Gram matrix at `prec` bits.
pub fn gso_from_gram(gram: &[Vec<Integer>], prec: u32) -> Result<GramSchmidtData> {
    let m = gram.len();
    let mut mu = vec![vec![Float::new(prec); m]; m];
    let mut r = vec![vec![Float::new(prec); m]; m];
    let mut bstar = Vec::with_capacity(m);
    // Rounding noise in r_ii is a few ulps of G_ii times the row count.
    let noise_bits = prec as i32 - 2 * (usize::BITS - m.leading_zeros()) as i32 - 8;
    for i in 0..m {
        for j in 0..=i {
            let mut acc = Float::with_val(prec, &gram[i][j]);
            for k in 0..j {
                acc -= Float::with_val(prec, &mu[j][k] * &r[i][k]);
            }
            if j < i {
                mu[i][j] = Float::with_val(prec, &acc / &bstar[j]);
                r[i][j] = acc;
            } else {
                let gii = Float::with_val(prec, &gram[i][i]);
                let floor = gii >> noise_bits.max(1);
                if acc <= floor || acc <= 0 {
                    return Err(Error::RankDeficient { row: i, precision: prec });
                }
                mu[i][i] = Float::with_val(prec, 1);
                r[i][i] = acc.clone();
                bstar.push(acc);
            }
        }
    }
    Ok(GramSchmidtData {
        mu,
        bstar_norms_sq: bstar,
        precision: prec,
    })
}

/// Gram-Schmidt orthogonalization of the rows at `precision_bits` (the
/// basis default when `None`).
pub fn gram_schmidt(basis: &LatticeBasis, precision_bits: Option<u32>) -> Result<GramSchmidtData> {
    let prec = precision_bits.unwrap_or_else(|| basis.default_precision());
    gso_from_gram(&basis.gram(), prec)
}

/// Exact rational Gram-Schmidt data.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactGso {
    pub mu: Vec<Vec<Rational>>,
    pub bstar_norms_sq: Vec<Rational>,
}

/// Exact GSO by the integral Gram-Schmidt recurrence on the Gram matrix:
/// every intermediate is an integer and every division is exact.
pub fn exact_gram_schmidt(basis: &LatticeBasis) -> Result<ExactGso> {
    let gram = basis.gram();
    let m = gram.len();
    let mut d = vec![Integer::from(1); m + 1];
    let mut lam = vec![vec![Integer::new(); m]; m];
    for k in 0..m {
        for j in 0..=k {
            let mut u = gram[k][j].clone();
            for i in 0..j {
                u = Integer::from(&d[i + 1] * &u) - Integer::from(&lam[k][i] * &lam[j][i]);
                u.div_exact_mut(&d[i]);
            }
            if j < k {
                lam[k][j] = u;
            } else {
                if u <= 0 {
                    return Err(Error::RankDeficient { row: k, precision: 0 });
                }
                d[k + 1] = u;
            }
        }
    }
    let mu = (0..m)
        .map(|i| {
            (0..m)
                .map(|j| match j.cmp(&i) {
                    std::cmp::Ordering::Less => Rational::from((lam[i][j].clone(), d[j + 1].clone())),
                    std::cmp::Ordering::Equal => Rational::from(1),
                    std::cmp::Ordering::Greater => Rational::new(),
                })
                .collect()
        })
        .collect();
    let bstar_norms_sq = (0..m).map(|i| Rational::from((d[i + 1].clone(), d[i].clone()))).collect();
    Ok(ExactGso { mu, bstar_norms_sq })
}

/// Determinant of a square integer matrix by fraction-free elimination.
pub fn bareiss_det(matrix: &[Vec<Integer>]) -> Integer {
    let n = matrix.len();
    let mut a: Vec<Vec<Integer>> = matrix.to_vec();
    let mut sign = 1i32;
    let mut prev = Integer::from(1);
    for k in 0..n {
        if a[k][k] == 0 {
            match (k + 1..n).find(|&i| a[i][k] != 0) {
                Some(p) => {
                    a.swap(k, p);
                    sign = -sign;
                }
                None => return Integer::new(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let t = Integer::from(&a[i][j] * &a[k][k]) - Integer::from(&a[i][k] * &a[k][j]);
                a[i][j] = t.div_exact(&prev);
            }
        }
        prev = a[k][k].clone();
    }
    let d = a[n - 1][n - 1].clone();
    if sign < 0 {
        -d
    } else {
        d
    }
}

/// Lattice volume. `gram_det = det(B B^T) = det(L)^2` is always exact; when
/// the basis is square `exact` holds `|det B|`.
#[derive(Clone, Debug, PartialEq)]
pub struct Determinant {
    pub gram_det: Integer,
    pub exact: Option<Integer>,
}

impl Determinant {
    pub fn log2(&self) -> f64 {
        match &self.exact {
            Some(d) => log2_integer(d),
            None => log2_integer(&self.gram_det) / 2.0,
        }
    }

    pub fn to_float(&self, prec: u32) -> Float {
        match &self.exact {
            Some(d) => Float::with_val(prec, d),
            None => Float::with_val(prec, &self.gram_det).sqrt(),
        }
    }
}

pub fn log2_integer(x: &Integer) -> f64 {
    assert!(*x > 0, "log2 of non-positive integer");
    let bits = x.significant_bits();
    if bits <= 1000 {
        return x.to_f64().log2();
    }
    let shift = bits - 64;
    let top = Integer::from(x >> shift);
    top.to_f64().log2() + shift as f64
}

/// `log2 x` for a positive float of any exponent.
pub fn log2_float(x: &Float) -> f64 {
    Float::with_val(64, x.log2_ref()).to_f64()
}

pub fn determinant(basis: &LatticeBasis) -> Result<Determinant> {
    let (m, n) = basis.dim();
    let gram = basis.gram();
    let gram_det = bareiss_det(&gram);
    if gram_det <= 0 {
        return Err(Error::RankDeficient {
            row: m - 1,
            precision: 0,
        });
    }
    let exact = (m == n).then(|| bareiss_det(basis.rows()).abs());
    Ok(Determinant { gram_det, exact })
}

/// Basis profile: `log2 |b_i*|`, their sum, and `log2(|b_1| / det^(1/m))`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BasisProfile {
    pub log_norms: Vec<f64>,
    pub log_det: f64,
    pub normalized_first: f64,
}

impl BasisProfile {
    pub fn from_gso(gso: &GramSchmidtData) -> Self {
        let log_norms = gso.log2_norms();
        let log_det: f64 = log_norms.iter().sum();
        let m = log_norms.len() as f64;
        let normalized_first = log_norms[0] - log_det / m;
        BasisProfile {
            log_norms,
            log_det,
            normalized_first,
        }
    }
}

pub fn profile(basis: &LatticeBasis) -> Result<BasisProfile> {
    Ok(BasisProfile::from_gso(&gram_schmidt(basis, None)?))
}

pub(crate) fn pow2(e: u32) -> Integer {
    Integer::from(2).pow(e)
}
