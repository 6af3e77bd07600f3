use std::time::Instant;

use rug::Integer;
use serde::{Deserialize, Serialize};

use super::state::ReductionState;
use super::{certify, run_lll, ReductionParams, SvpPruning, TransformationLog};
use crate::enumeration::{block_svp, linear_beta_profile, PruningProfile};
use crate::error::{Error, Result};
use crate::lattice::{norm_sq, LatticeBasis};

/// Block size up to which `SvpPruning::Auto` enumerates without pruning.
const FULL_ENUM_MAX_BLOCK: usize = 30;

/// Summary of one BKZ tour.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TourRecord {
    pub beta: usize,
    /// `|b_1|` after the tour.
    pub b1_norm: f64,
    /// `log2 |b_i*|` after the tour.
    pub log_norms: Vec<f64>,
    pub elapsed_secs: f64,
    pub insertions: usize,
    pub skipped_blocks: usize,
    pub nodes: u64,
}

#[derive(Clone, Debug)]
pub struct BkzOutput {
    pub basis: LatticeBasis,
    pub transform: TransformationLog,
    /// LLL result first (as `beta = 2`), then one record per tour.
    pub tours: Vec<TourRecord>,
}

/// LLL, then one BKZ tour for each block size `beta_start..=beta_end`.
pub fn bkz_progressive(basis: &LatticeBasis, params: &ReductionParams) -> Result<BkzOutput> {
    let m = basis.rank();
    params.validate(m)?;
    super::with_retry(basis, params, |prec| run(basis, params, prec))
}

fn run(basis: &LatticeBasis, params: &ReductionParams, prec: u32) -> Result<BkzOutput> {
    let m = basis.rank();
    let mut st = ReductionState::new(basis, prec);
    let start = Instant::now();
    run_lll(&mut st, 0, params)?;
    let mut tours = vec![record(&st, 2, start, 0, 0, 0)];
    for beta in params.beta_start..=params.beta_end.min(m) {
        let t0 = Instant::now();
        let (mut inserted, mut skipped, mut nodes) = (0, 0, 0);
        for k in 0..m.saturating_sub(1) {
            let end = (k + beta).min(m);
            let g = st.gso_f64().block(k, end);
            let r_kk = g.bstar_norms_sq[0];
            let size = end - k;
            let profile = match params.svp_pruning {
                SvpPruning::None => PruningProfile::full(size, r_kk.sqrt()),
                SvpPruning::LinearBeta => linear_beta_profile(size, r_kk.sqrt()),
                SvpPruning::Auto if size <= FULL_ENUM_MAX_BLOCK => PruningProfile::full(size, r_kk.sqrt()),
                SvpPruning::Auto => linear_beta_profile(size, r_kk.sqrt()),
            };
            let deadline = params.svp_timeout.map(|d| Instant::now() + d);
            let found = block_svp(&g, &profile, params.svp_node_cap, deadline);
            nodes += found.nodes;
            if found.capped {
                log::warn!("beta {beta}: block {k}..{end} search hit its budget, skipped");
                skipped += 1;
                continue;
            }
            if let Some((coeffs, norm)) = found.coeffs {
                if norm < params.delta * r_kk && coeffs[1..].iter().any(|&c| c != 0) {
                    insert(&mut st, k, &coeffs)?;
                    run_lll(&mut st, k, params)?;
                    inserted += 1;
                }
            }
        }
        let rec = record(&st, beta, t0, inserted, skipped, nodes);
        log::info!(
            "tour beta={beta}: |b1| = {:.6e}, {inserted} insertions, {:.2}s",
            rec.b1_norm,
            rec.elapsed_secs
        );
        if let Some(prev) = tours.last() {
            debug_assert!(rec.b1_norm <= prev.b1_norm * (1.0 + 1e-12));
        }
        tours.push(rec);
    }
    let out = st.basis();
    certify(&out, prec, Some(params.delta))?;
    Ok(BkzOutput {
        basis: out,
        transform: TransformationLog { unimodular: st.transform },
        tours,
    })
}

/// Makes row `k` equal to `sum coeffs[i] b_{k+i}` by unimodular operations on
/// the block rows. The coefficient vector of a shortest vector is primitive.
fn insert(st: &mut ReductionState, k: usize, coeffs: &[i64]) -> Result<()> {
    let mut c: Vec<i64> = coeffs.to_vec();
    // Euclid on the coefficients: c_i b_i + c_j b_j = c_i (b_i + q b_j) + (c_j - q c_i) b_j
    loop {
        let nonzero: Vec<usize> = (0..c.len()).filter(|&i| c[i] != 0).collect();
        if nonzero.len() <= 1 {
            break;
        }
        let i = *nonzero.iter().min_by_key(|&&i| (c[i].unsigned_abs(), i)).expect("nonempty");
        for &j in &nonzero {
            if j != i {
                let q = c[j] / c[i];
                if q != 0 {
                    c[j] -= q * c[i];
                    st.addmul(k + i, k + j, &Integer::from(q));
                }
            }
        }
    }
    let pos = c
        .iter()
        .position(|&x| x != 0)
        .ok_or_else(|| Error::InvalidParameter("zero vector offered for insertion".into()))?;
    if c[pos].abs() != 1 {
        return Err(Error::InvalidParameter("inserted vector is not primitive".into()));
    }
    if c[pos] < 0 {
        st.negate(k + pos);
    }
    for i in (k..k + pos).rev() {
        st.swap(i, i + 1);
    }
    if k == 0 {
        st.compute_row(0)?;
    }
    Ok(())
}

fn record(st: &ReductionState, beta: usize, t0: Instant, insertions: usize, skipped: usize, nodes: u64) -> TourRecord {
    let b1 = norm_sq(&st.rows[0]);
    TourRecord {
        beta,
        b1_norm: crate::lattice::log2_integer(&b1).exp2().sqrt(),
        log_norms: (0..st.dim())
            .map(|i| crate::lattice::log2_float(st.bstar(i)) / 2.0)
            .collect(),
        elapsed_secs: t0.elapsed().as_secs_f64(),
        insertions,
        skipped_blocks: skipped,
        nodes,
    }
}
