//! Size reduction, LLL and progressive BKZ.
//!
//! All row operations act on exact integers and are mirrored on the exact
//! Gram matrix and on the accumulated unimodular transformation. Only the
//! Gram-Schmidt data is floating, recomputed row by row from the Gram matrix
//! at a fixed MPFR precision. Outputs are checked once more at twice that
//! precision before they are returned.

mod bkz;
mod state;

use std::time::Duration;

use rug::{Float, Integer};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{bareiss_det, gso_from_gram, LatticeBasis};

pub use bkz::{bkz_progressive, BkzOutput, TourRecord};
use state::{ReductionState, ETA_CERTIFIED};

/// Which pruning the BKZ block search uses.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SvpPruning {
    /// Full enumeration up to block size 30, linear-beta pruning above.
    #[default]
    Auto,
    None,
    LinearBeta,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReductionParams {
    /// Lovász factor in `(1/4, 1)`.
    pub delta: f64,
    pub beta_start: usize,
    pub beta_end: usize,
    pub svp_pruning: SvpPruning,
    /// Wall-clock budget per block search; the block is skipped when exceeded.
    pub svp_timeout: Option<Duration>,
    /// Node budget per block search.
    pub svp_node_cap: Option<u64>,
    /// Floating precision of the GSO; defaults to twice the entry size plus 64 bits.
    pub gso_precision: Option<u32>,
}

impl Default for ReductionParams {
    fn default() -> Self {
        ReductionParams {
            delta: 0.99,
            beta_start: 20,
            beta_end: 20,
            svp_pruning: SvpPruning::Auto,
            svp_timeout: None,
            svp_node_cap: None,
            gso_precision: None,
        }
    }
}

impl ReductionParams {
    pub fn validate(&self, m: usize) -> Result<()> {
        if !(self.delta > 0.25 && self.delta < 1.0) {
            return Err(Error::InvalidParameter(format!("delta = {} must lie in (1/4, 1)", self.delta)));
        }
        if self.beta_start < 2 || self.beta_start > self.beta_end || self.beta_end > m.max(2) {
            return Err(Error::InvalidParameter(format!(
                "need 2 <= beta_start ({}) <= beta_end ({}) <= dimension ({m})",
                self.beta_start, self.beta_end
            )));
        }
        Ok(())
    }

    /// Loop factor, a hair above `delta` so the output meets `delta` exactly.
    fn loop_delta(&self) -> f64 {
        (self.delta + 1.0 / (1u64 << 30) as f64).min(1.0 - f64::EPSILON)
    }
}

/// Unimodular `U` with `U * original = reduced`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransformationLog {
    pub unimodular: Vec<Vec<Integer>>,
}

impl TransformationLog {
    pub fn identity(m: usize) -> Self {
        TransformationLog {
            unimodular: LatticeBasis::identity(m).into_rows(),
        }
    }

    pub fn apply(&self, basis: &LatticeBasis) -> LatticeBasis {
        LatticeBasis::new(self.unimodular.iter().map(|u| basis.combination(u)).collect())
            .expect("transformation matches the basis")
    }

    pub fn determinant(&self) -> Integer {
        bareiss_det(&self.unimodular)
    }

    pub fn is_unimodular(&self) -> bool {
        self.determinant().abs() == 1
    }

    pub fn to_text(&self) -> String {
        LatticeBasis::new(self.unimodular.clone())
            .expect("square matrix")
            .to_text()
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let b = LatticeBasis::from_text(text)?;
        let (m, n) = b.dim();
        if m != n {
            return Err(Error::Format(format!("transformation must be square, got {m}x{n}")));
        }
        Ok(TransformationLog {
            unimodular: b.into_rows(),
        })
    }
}

fn with_retry<T>(basis: &LatticeBasis, params: &ReductionParams, run: impl Fn(u32) -> Result<T>) -> Result<T> {
    let prec = params.gso_precision.unwrap_or_else(|| basis.default_precision());
    match run(prec) {
        Err(Error::SizeReductionUncertified { .. }) | Err(Error::RankDeficient { .. }) => {
            log::info!("retrying reduction at {} bits", 2 * prec);
            run(2 * prec)
        }
        other => other,
    }
}

/// Size-reduces every row: `|mu_ij| <= 1/2` afterwards.
pub fn size_reduce(basis: &LatticeBasis) -> Result<(LatticeBasis, TransformationLog)> {
    with_retry(basis, &ReductionParams::default(), |prec| {
        let mut st = ReductionState::new(basis, prec);
        st.compute_row(0)?;
        for k in 1..st.dim() {
            st.size_reduce(k)?;
        }
        let out = st.basis();
        certify(&out, prec, None)?;
        Ok((out, TransformationLog { unimodular: st.transform }))
    })
}

/// LLL reduction with Lovász factor `params.delta`.
pub fn lll(basis: &LatticeBasis, params: &ReductionParams) -> Result<(LatticeBasis, TransformationLog)> {
    if !(params.delta > 0.25 && params.delta < 1.0) {
        return Err(Error::InvalidParameter(format!("delta = {} must lie in (1/4, 1)", params.delta)));
    }
    with_retry(basis, params, |prec| {
        let mut st = ReductionState::new(basis, prec);
        run_lll(&mut st, 0, params)?;
        let out = st.basis();
        certify(&out, prec, Some(params.delta))?;
        Ok((out, TransformationLog { unimodular: st.transform }))
    })
}

/// LLL on the working state, assuming GSO rows `< from` are current.
pub(crate) fn run_lll(st: &mut ReductionState, from: usize, params: &ReductionParams) -> Result<()> {
    let m = st.dim();
    let bits = st.rows.iter().flatten().map(|x| x.significant_bits()).max().unwrap_or(1).max(1) as u64;
    let cap = 10 * (m as u64) * (m as u64) * bits + st.swaps;
    let delta = params.loop_delta();
    if from == 0 || st.valid() == 0 {
        st.compute_row(0)?;
    }
    let mut k = from.max(1);
    while k < m {
        st.size_reduce(k)?;
        // delta * r_{k-1} > r_k + mu^2 r_{k-1}
        let p = st.prec;
        let mu = &st.mu[k][k - 1];
        let lhs = Float::with_val(p, st.bstar(k - 1) * delta);
        let rhs = Float::with_val(p, st.bstar(k)) + Float::with_val(p, mu * mu) * st.bstar(k - 1);
        if lhs > rhs {
            if st.swaps >= cap {
                return Err(Error::IterationCap { cap, dim: m, bits });
            }
            st.swap(k - 1, k);
            if k == 1 {
                st.compute_row(0)?;
            }
            k = (k - 1).max(1);
        } else {
            k += 1;
        }
    }
    Ok(())
}

/// Recomputes the GSO of `basis` at `2 * prec` bits and checks size
/// reduction, plus the Lovász condition when `delta` is given.
fn certify(basis: &LatticeBasis, prec: u32, delta: Option<f64>) -> Result<()> {
    let p = 2 * prec;
    let gso = gso_from_gram(&basis.gram(), p)?;
    let m = gso.dim();
    for i in 1..m {
        for j in 0..i {
            if gso.mu[i][j].to_f64().abs() > ETA_CERTIFIED {
                return Err(Error::SizeReductionUncertified { precision: prec });
            }
        }
        if let Some(delta) = delta {
            let mu = &gso.mu[i][i - 1];
            let lhs = Float::with_val(p, &gso.bstar_norms_sq[i - 1] * delta);
            let rhs = Float::with_val(p, &gso.bstar_norms_sq[i]) + Float::with_val(p, mu * mu) * &gso.bstar_norms_sq[i - 1];
            if lhs > rhs {
                return Err(Error::SizeReductionUncertified { precision: prec });
            }
        }
    }
    Ok(())
}
