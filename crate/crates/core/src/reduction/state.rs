use rug::{Float, Integer};

use crate::error::{Error, Result};
use crate::lattice::{GsoF64, LatticeBasis};

/// Loop threshold for size reduction.
pub(crate) const ETA: f64 = 0.5 + 1.0 / (1u64 << 24) as f64;
/// Certified bound on `|mu|` after reduction.
pub(crate) const ETA_CERTIFIED: f64 = 0.5 + 1.0 / (1u64 << 20) as f64;
const SIZE_REDUCE_PASSES: usize = 200;

/// Working state of a reduction: rows, their exact Gram matrix, the
/// accumulated transformation, and floating GSO rows `0..valid`.
pub(crate) struct ReductionState {
    pub rows: Vec<Vec<Integer>>,
    pub gram: Vec<Vec<Integer>>,
    pub transform: Vec<Vec<Integer>>,
    pub mu: Vec<Vec<Float>>,
    pub r: Vec<Vec<Float>>,
    pub prec: u32,
    pub swaps: u64,
    valid: usize,
}

impl ReductionState {
    pub fn new(basis: &LatticeBasis, prec: u32) -> Self {
        let m = basis.rank();
        let transform = (0..m)
            .map(|i| (0..m).map(|j| Integer::from((i == j) as u32)).collect())
            .collect();
        ReductionState {
            rows: basis.rows().to_vec(),
            gram: basis.gram(),
            transform,
            mu: vec![vec![Float::new(prec); m]; m],
            r: vec![vec![Float::new(prec); m]; m],
            prec,
            swaps: 0,
            valid: 0,
        }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn basis(&self) -> LatticeBasis {
        LatticeBasis::new(self.rows.clone()).expect("reduction keeps the shape")
    }

    /// Recomputes GSO row `k` from the Gram matrix, assuming rows `< k` are current.
    pub fn compute_row(&mut self, k: usize) -> Result<()> {
        let p = self.prec;
        for j in 0..=k {
            let mut acc = Float::with_val(p, &self.gram[k][j]);
            for i in 0..j {
                acc -= Float::with_val(p, &self.mu[j][i] * &self.r[k][i]);
            }
            if j < k {
                self.mu[k][j] = Float::with_val(p, &acc / &self.r[j][j]);
                self.r[k][j] = acc;
            } else {
                let m = self.dim();
                let noise = p as i32 - 2 * (usize::BITS - m.leading_zeros()) as i32 - 8;
                let floor = Float::with_val(p, &self.gram[k][k]) >> noise.max(1);
                if acc <= floor || acc <= 0 {
                    return Err(Error::RankDeficient { row: k, precision: p });
                }
                self.mu[k][k] = Float::with_val(p, 1);
                self.r[k][k] = acc;
            }
        }
        self.valid = k + 1;
        Ok(())
    }

    /// `b_i += q b_j`, mirrored on the Gram matrix and the transformation.
    pub fn addmul(&mut self, i: usize, j: usize, q: &Integer) {
        debug_assert_ne!(i, j);
        let (bi, bj) = two_rows(&mut self.rows, i, j);
        for (x, y) in bi.iter_mut().zip(bj.iter()) {
            *x += q * y;
        }
        let (ui, uj) = two_rows(&mut self.transform, i, j);
        for (x, y) in ui.iter_mut().zip(uj.iter()) {
            *x += q * y;
        }
        let m = self.dim();
        let gij = self.gram[i][j].clone();
        let gjj = self.gram[j][j].clone();
        let gii = (&self.gram[i][i] + Integer::from(q * &gij) * 2u32) + Integer::from(q * q) * gjj;
        for l in 0..m {
            if l != i {
                let delta = Integer::from(q * &self.gram[j][l]);
                self.gram[i][l] += delta;
                self.gram[l][i] = self.gram[i][l].clone();
            }
        }
        self.gram[i][i] = gii;
        self.valid = self.valid.min(i);
    }

    pub fn swap(&mut self, i: usize, j: usize) {
        self.rows.swap(i, j);
        self.transform.swap(i, j);
        self.gram.swap(i, j);
        for row in self.gram.iter_mut() {
            row.swap(i, j);
        }
        self.valid = self.valid.min(i.min(j));
        self.swaps += 1;
    }

    pub fn negate(&mut self, i: usize) {
        for x in self.rows[i].iter_mut().chain(self.transform[i].iter_mut()) {
            *x = Integer::from(-&*x);
        }
        let m = self.dim();
        for l in 0..m {
            if l != i {
                self.gram[i][l] = Integer::from(-&self.gram[i][l]);
                self.gram[l][i] = self.gram[i][l].clone();
            }
        }
        self.valid = self.valid.min(i);
    }

    /// Size-reduces row `k` against rows `< k`, leaving GSO row `k` current.
    pub fn size_reduce(&mut self, k: usize) -> Result<()> {
        for _ in 0..SIZE_REDUCE_PASSES {
            self.compute_row(k)?;
            let worst = (0..k).map(|j| self.mu[k][j].to_f64().abs()).fold(0.0, f64::max);
            if worst <= ETA {
                return Ok(());
            }
            let mut mu_row: Vec<Float> = self.mu[k][..k].to_vec();
            for j in (0..k).rev() {
                let x = match mu_row[j].to_integer() {
                    Some(x) if x != 0 => x,
                    _ => continue,
                };
                for l in 0..j {
                    mu_row[l] -= Float::with_val(self.prec, &self.mu[j][l] * &x);
                }
                mu_row[j] -= &x;
                self.addmul(k, j, &(-x));
            }
        }
        Err(Error::SizeReductionUncertified { precision: self.prec })
    }

    /// Rows `0..valid` have current GSO data.
    pub fn valid(&self) -> usize {
        self.valid
    }

    pub fn bstar(&self, k: usize) -> &Float {
        &self.r[k][k]
    }

    pub fn gso_f64(&self) -> GsoF64 {
        let m = self.dim();
        GsoF64 {
            mu: (0..m)
                .map(|i| (0..m).map(|j| if j <= i { self.mu[i][j].to_f64() } else { 0.0 }).collect())
                .collect(),
            bstar_norms_sq: (0..m).map(|i| self.r[i][i].to_f64()).collect(),
        }
    }
}

fn two_rows<T>(v: &mut [Vec<T>], i: usize, j: usize) -> (&mut Vec<T>, &Vec<T>) {
    if i < j {
        let (a, b) = v.split_at_mut(j);
        (&mut a[i], &b[0])
    } else {
        let (a, b) = v.split_at_mut(i);
        (&mut b[0], &a[j])
    }
}
