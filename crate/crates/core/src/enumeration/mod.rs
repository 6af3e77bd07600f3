//! Cylinder-pruned enumeration of lattice points near a target, and the
//! shortest-vector search used by BKZ.
//!
//! The tree search itself runs in `f64` on a Babai-translated target, so
//! coordinates stay small even when basis entries have hundreds of bits.
//! Every point the search accepts is then re-checked: the full distance
//! exactly over the rationals, the projected distances with a Gram-Schmidt
//! decomposition at twice the caller's precision, falling back to exact
//! rational arithmetic for points that sit on a bound.

mod engine;

use std::time::Instant;

use rug::{Float, Integer, Rational};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{exact_gram_schmidt, gram_schmidt, ExactGso, GramSchmidtData, GsoF64, LatticeBasis};

use engine::{Engine, SearchMode};

/// Squared radii `R_1^2 <= ... <= R_m^2` of a cylinder-pruned ball, where
/// `R_d` bounds the projection of dimension `d`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PruningProfile {
    radii_sq: Vec<f64>,
    base_radius: f64,
    f_values: Vec<f64>,
}

impl PruningProfile {
    /// `f(i) = 1` everywhere: the unpruned ball of radius `radius`.
    pub fn full(m: usize, radius: f64) -> Self {
        Self::from_f(vec![1.0; m], radius).expect("constant profile is valid")
    }

    /// Profile with `radii_sq[i - 1] = f(i)^2 R^2`.
    pub fn from_f(f_values: Vec<f64>, radius: f64) -> Result<Self> {
        let m = f_values.len();
        if m == 0 {
            return Err(Error::InvalidParameter("empty pruning profile".into()));
        }
        if !(radius >= 0.0 && radius.is_finite()) {
            return Err(Error::InvalidParameter(format!("radius {radius} is not a finite nonnegative number")));
        }
        if f_values.iter().any(|&f| !(f > 0.0 && f <= 1.0)) {
            return Err(Error::InvalidParameter("pruning coefficients must lie in (0, 1]".into()));
        }
        if (f_values[m - 1] * f_values[m - 1] - 1.0).abs() > 1.0 / (1u32 << 20) as f64 {
            return Err(Error::InvalidParameter("the last pruning coefficient must be 1".into()));
        }
        let r2 = radius * radius;
        let radii_sq: Vec<f64> = f_values.iter().map(|f| f * f * r2).collect();
        if radii_sq.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::InvalidParameter("pruning radii must be non-decreasing".into()));
        }
        Ok(PruningProfile {
            radii_sq,
            base_radius: radius,
            f_values,
        })
    }

    pub fn dim(&self) -> usize {
        self.radii_sq.len()
    }

    pub fn radii_sq(&self) -> &[f64] {
        &self.radii_sq
    }

    pub fn base_radius(&self) -> f64 {
        self.base_radius
    }

    pub fn f_values(&self) -> &[f64] {
        &self.f_values
    }

    /// Same shape, radius multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self::from_f(self.f_values.clone(), self.base_radius * factor).expect("scaling keeps a valid profile")
    }

    /// Same shape with a new base radius.
    pub fn with_radius(&self, radius: f64) -> Self {
        Self::from_f(self.f_values.clone(), radius).expect("rescaling keeps a valid profile")
    }
}

/// `f^2(i) = min(1, mean + 2 sd)` of `Beta(i/2, (m-i)/2)`, i.e. of the squared
/// length of the projection of a uniform unit vector onto `i` coordinates.
pub fn linear_beta_profile(m: usize, radius: f64) -> PruningProfile {
    let mf = m as f64;
    let f = (1..=m)
        .map(|i| {
            let p = i as f64 / mf;
            let var = p * (1.0 - p) / (mf / 2.0 + 1.0);
            (p + 2.0 * var.sqrt()).min(1.0).sqrt()
        })
        .collect();
    PruningProfile::from_f(f, radius).expect("beta profile is valid")
}

/// A target point, with its coordinates relative to the basis.
#[derive(Clone, Debug)]
pub struct EnumTarget {
    ambient: Vec<Rational>,
    /// Integer coefficients of a lattice point close to the target.
    offset: Vec<Integer>,
    /// Coordinates of `target - offset * B` in the basis (projected onto the span).
    residual: Vec<f64>,
    /// Squared distance from the target to the span of the basis.
    outside_sq: f64,
    coords: Vec<f64>,
}

impl EnumTarget {
    /// Builds the target from its ambient coordinates using `gso` for the projection.
    pub fn new(basis: &LatticeBasis, gso: &GramSchmidtData, ambient: Vec<Rational>) -> Result<Self> {
        let (m, n) = basis.dim();
        if ambient.len() != n {
            return Err(Error::Dimension(format!(
                "target has {} coordinates, basis rows have {n}",
                ambient.len()
            )));
        }
        if gso.dim() != m {
            return Err(Error::Dimension("GSO does not match the basis".into()));
        }
        let prec = gso.precision;
        let (tau, s) = gso_coordinates(basis, gso, &ambient);
        // basis coordinates from GSO coordinates by back substitution
        let mut t = vec![Float::new(prec); m];
        for j in (0..m).rev() {
            let mut acc = tau[j].clone();
            for i in j + 1..m {
                acc -= Float::with_val(prec, &t[i] * &gso.mu[i][j]);
            }
            t[j] = acc;
        }
        let offset: Vec<Integer> = t
            .iter()
            .map(|x| x.to_integer().unwrap_or_default())
            .collect();
        let residual = t
            .iter()
            .zip(&offset)
            .map(|(x, w)| Float::with_val(prec, x - w).to_f64())
            .collect();
        let outside_sq = if m == n {
            0.0
        } else {
            let mut total = Float::with_val(prec, ambient.iter().map(|x| Rational::from(x * x)).sum::<Rational>());
            for (sj, rj) in s.iter().zip(&gso.bstar_norms_sq) {
                total -= Float::with_val(prec, sj * sj) / rj;
            }
            total.to_f64().max(0.0)
        };
        Ok(EnumTarget {
            ambient,
            offset,
            residual,
            outside_sq,
            coords: t.iter().map(Float::to_f64).collect(),
        })
    }

    pub fn from_integers(basis: &LatticeBasis, gso: &GramSchmidtData, ambient: &[Integer]) -> Result<Self> {
        Self::new(basis, gso, ambient.iter().map(Rational::from).collect())
    }

    /// The origin.
    pub fn zero(basis: &LatticeBasis) -> Self {
        let (m, n) = basis.dim();
        EnumTarget {
            ambient: vec![Rational::new(); n],
            offset: vec![Integer::new(); m],
            residual: vec![0.0; m],
            outside_sq: 0.0,
            coords: vec![0.0; m],
        }
    }

    /// Target coordinates `t_i` with `sum t_i b_i` the projection of the target onto the span.
    pub fn coords_in_basis(&self) -> &[f64] {
        &self.coords
    }

    pub fn ambient(&self) -> &[Rational] {
        &self.ambient
    }

    pub fn distance_to_span_sq(&self) -> f64 {
        self.outside_sq
    }
}

/// `s_j = <x, b_j*>` for a rational vector `x`; returns `(s_j / |b_j*|^2, s_j)`.
fn gso_coordinates(basis: &LatticeBasis, gso: &GramSchmidtData, x: &[Rational]) -> (Vec<Float>, Vec<Float>) {
    let prec = gso.precision;
    let m = basis.rank();
    let mut s: Vec<Float> = Vec::with_capacity(m);
    for j in 0..m {
        let exact: Rational = basis
            .row(j)
            .iter()
            .zip(x)
            .filter(|(b, _)| **b != 0)
            .map(|(b, t)| Rational::from(b * t))
            .sum();
        let mut acc = Float::with_val(prec, &exact);
        for k in 0..j {
            acc -= Float::with_val(prec, &gso.mu[j][k] * &s[k]);
        }
        s.push(acc);
    }
    let tau = s
        .iter()
        .zip(&gso.bstar_norms_sq)
        .map(|(sj, rj)| Float::with_val(prec, sj / rj))
        .collect();
    (tau, s)
}

/// One enumerated lattice point.
#[derive(Clone, Debug, PartialEq)]
pub struct EnumCandidate {
    /// Coefficients `v_1..v_m` of the point in the basis.
    pub coeffs: Vec<Integer>,
    /// Exact squared distance to the target.
    pub dist_sq: Rational,
    /// Squared norms of the projections `pi_k(v - t)`, `k = 1..m`, from the search.
    pub partial_norms: Option<Vec<f64>>,
}

impl EnumCandidate {
    pub fn last_coeff(&self) -> &Integer {
        self.coeffs.last().expect("nonempty coefficient vector")
    }
}

/// Search counters, available while and after streaming.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnumStats {
    pub nodes: u64,
    pub emitted: u64,
    /// Points accepted by the floating search but rejected on exact recomputation.
    pub rejected: u64,
    /// Points moved along `b_1` by the exact coset fix-up.
    pub shifted: u64,
    /// Set when the node cap ended the search early.
    pub incomplete: bool,
}

/// Options for [`enumerate_bdd`].
#[derive(Clone, Debug, Default)]
pub struct BddOptions {
    /// Emit only the distance-minimizing representative of each `b_1` coset.
    pub dedup_b1: bool,
    /// Stop after this many emitted points.
    pub limit: Option<usize>,
    /// Stop after this many tree nodes (the result is then flagged incomplete).
    pub node_cap: Option<u64>,
    /// Attach the search's partial norms to every candidate.
    pub trace: bool,
}

/// Streaming pruned enumeration; see [`enumerate_bdd`].
pub struct BddEnumeration<'a> {
    basis: &'a LatticeBasis,
    target: &'a EnumTarget,
    profile: PruningProfile,
    fine: GramSchmidtData,
    engine: Engine,
    options: BddOptions,
    stats: EnumStats,
    b1_norm_sq: Integer,
    exact: Option<Result<ExactGso>>,
}

/// Enumerates the lattice points `v` with `|pi_k(v - t)|^2 <= R_{m-k+1}^2` for
/// every `k`, in Schnorr-Euchner order.
///
/// With `dedup_b1`, only one point per coset of `b_1` is produced: the one
/// closest to the target, the smaller first coefficient winning ties.
pub fn enumerate_bdd<'a>(
    basis: &'a LatticeBasis,
    gso: &GramSchmidtData,
    target: &'a EnumTarget,
    profile: &PruningProfile,
    options: BddOptions,
) -> Result<BddEnumeration<'a>> {
    let m = basis.rank();
    if gso.dim() != m || profile.dim() != m || target.residual.len() != m {
        return Err(Error::Dimension(format!(
            "basis rank {m}, GSO {}, profile {}, target {}",
            gso.dim(),
            profile.dim(),
            target.residual.len()
        )));
    }
    let fine = gram_schmidt(basis, Some(2 * gso.precision))?;
    let g = gso.to_f64();
    let engine = Engine::new(
        g.mu,
        g.bstar_norms_sq,
        target.residual.clone(),
        target.outside_sq,
        profile.radii_sq.clone(),
        SearchMode::Bdd {
            dedup_first: options.dedup_b1,
        },
    )
    .with_limits(options.node_cap, None);
    let b1_norm_sq = crate::lattice::norm_sq(basis.row(0));
    Ok(BddEnumeration {
        basis,
        target,
        profile: profile.clone(),
        fine,
        engine,
        options,
        stats: EnumStats::default(),
        b1_norm_sq,
        exact: None,
    })
}

impl BddEnumeration<'_> {
    pub fn stats(&self) -> EnumStats {
        EnumStats {
            nodes: self.engine.nodes,
            incomplete: self.engine.capped,
            ..self.stats
        }
    }

    fn exact_difference(&self, coeffs: &[Integer]) -> Vec<Rational> {
        self.basis
            .combination(coeffs)
            .into_iter()
            .zip(self.target.ambient.iter())
            .map(|(u, t)| Rational::from(u) - t)
            .collect()
    }

    /// Checks every cylinder constraint; returns the squared distance.
    ///
    /// The projected norms come from the fine GSO; a value within its
    /// relative accuracy of a bound is settled with the exact GSO.
    fn verify(&mut self, diff: &[Rational]) -> Option<Rational> {
        let m = self.basis.rank();
        let dist_sq: Rational = diff.iter().map(|x| Rational::from(x * x)).sum();
        let top = Rational::from_f64(self.profile.radii_sq[m - 1])?;
        if dist_sq > top {
            return None;
        }
        // |pi_k(d)|^2 = |d|^2 - sum_{j<k} s_j^2 / r_j
        let prec = self.fine.precision;
        let (tau, s) = gso_coordinates(self.basis, &self.fine, diff);
        let mut proj = Float::with_val(prec, &dist_sq);
        let eps = (-(prec as f64) / 2.0).exp2();
        let mut borderline = false;
        for k in 1..m {
            proj -= Float::with_val(prec, &tau[k - 1] * &s[k - 1]);
            let bound = self.profile.radii_sq[m - 1 - k];
            let v = proj.to_f64();
            if v > bound * (1.0 + eps) {
                return None;
            }
            borderline |= v > bound * (1.0 - eps);
        }
        if borderline && !self.exact_projections_fit(diff) {
            return None;
        }
        Some(dist_sq)
    }

    fn exact_projections_fit(&mut self, diff: &[Rational]) -> bool {
        let m = self.basis.rank();
        let Ok(exact) = self.exact.get_or_insert_with(|| exact_gram_schmidt(self.basis)).as_ref() else {
            return false;
        };
        // s_j = <d, b_j*> = <d, b_j> - sum_{i<j} mu_ji s_i
        let mut s: Vec<Rational> = Vec::with_capacity(m);
        for j in 0..m {
            let mut acc: Rational = diff
                .iter()
                .zip(self.basis.row(j))
                .map(|(d, b)| Rational::from(d * b))
                .sum();
            for i in 0..j {
                acc -= Rational::from(&exact.mu[j][i] * &s[i]);
            }
            s.push(acc);
        }
        let mut proj: Rational = diff.iter().map(|x| Rational::from(x * x)).sum();
        for k in 1..m {
            proj -= Rational::from(&s[k - 1] * &s[k - 1]) / &exact.bstar_norms_sq[k - 1];
            match Rational::from_f64(self.profile.radii_sq[m - 1 - k]) {
                Some(bound) if proj <= bound => {}
                _ => return false,
            }
        }
        true
    }

    /// Moves `coeffs` along `b_1` to the exact distance minimizer of its coset.
    fn fix_coset(&mut self, coeffs: &mut [Integer], diff: &mut [Rational]) {
        // |d + k b1|^2 = |d|^2 + 2k<d,b1> + k^2|b1|^2, minimized at k = -<d,b1>/|b1|^2
        let ip: Rational = diff
            .iter()
            .zip(self.basis.row(0))
            .map(|(d, b)| Rational::from(d * b))
            .sum();
        let q = -ip / &self.b1_norm_sq;
        // round half down: ceil(q - 1/2)
        let shift = (q - Rational::from((1, 2))).ceil().into_numer_denom().0;
        if shift != 0 {
            self.stats.shifted += 1;
            coeffs[0] += &shift;
            for (d, b) in diff.iter_mut().zip(self.basis.row(0)) {
                *d += Rational::from(&shift * b);
            }
        }
    }
}

impl Iterator for BddEnumeration<'_> {
    type Item = EnumCandidate;

    fn next(&mut self) -> Option<EnumCandidate> {
        if let Some(limit) = self.options.limit {
            if self.stats.emitted as usize >= limit {
                return None;
            }
        }
        loop {
            let leaf = self.engine.next_leaf()?;
            let mut coeffs: Vec<Integer> = leaf
                .coeffs
                .iter()
                .zip(&self.target.offset)
                .map(|(v, w)| Integer::from(*v) + w)
                .collect();
            let mut diff = self.exact_difference(&coeffs);
            if self.options.dedup_b1 {
                self.fix_coset(&mut coeffs, &mut diff);
            }
            match self.verify(&diff) {
                Some(dist_sq) => {
                    self.stats.emitted += 1;
                    return Some(EnumCandidate {
                        coeffs,
                        dist_sq,
                        partial_norms: self.options.trace.then(|| leaf.rho[..leaf.rho.len() - 1].to_vec()),
                    });
                }
                None => self.stats.rejected += 1,
            }
        }
    }
}

/// Shortest nonzero vector inside the pruned ball around the origin.
///
/// Returns `Ok(None)` when the pruned ball holds no nonzero point, which can
/// only happen when the radius is below `|b_1|` or pruning discards it.
pub fn enumerate_svp(
    basis: &LatticeBasis,
    gso: &GramSchmidtData,
    profile: &PruningProfile,
) -> Result<Option<EnumCandidate>> {
    let m = basis.rank();
    if gso.dim() != m || profile.dim() != m {
        return Err(Error::Dimension("basis, GSO and profile disagree on the rank".into()));
    }
    let g = gso.to_f64();
    let mut engine = Engine::new(
        g.mu,
        g.bstar_norms_sq,
        vec![0.0; m],
        0.0,
        profile.radii_sq.clone(),
        SearchMode::Svp,
    );
    let top = Rational::from_f64(profile.radii_sq[m - 1]).unwrap_or_default();
    let mut best: Option<EnumCandidate> = None;
    while let Some(leaf) = engine.next_leaf() {
        let coeffs: Vec<Integer> = leaf.coeffs.iter().map(|&v| Integer::from(v)).collect();
        let norm = Rational::from(crate::lattice::norm_sq(&basis.combination(&coeffs)));
        if norm > top {
            continue;
        }
        if best.as_ref().is_none_or(|b| norm < b.dist_sq) {
            engine.shrink_to(norm.to_f64());
            best = Some(EnumCandidate {
                coeffs,
                dist_sq: norm,
                partial_norms: Some(leaf.rho[..m].to_vec()),
            });
        }
    }
    Ok(best)
}

/// Outcome of an SVP search on a projected block.
#[derive(Clone, Debug)]
pub(crate) struct BlockSvp {
    pub coeffs: Option<(Vec<i64>, f64)>,
    pub nodes: u64,
    pub capped: bool,
}

/// Shortest nonzero vector of a projected block below `radius_sq`, in `f64`.
pub(crate) fn block_svp(
    gso: &GsoF64,
    profile: &PruningProfile,
    node_cap: Option<u64>,
    deadline: Option<Instant>,
) -> BlockSvp {
    let m = gso.dim();
    let mut engine = Engine::new(
        gso.mu.clone(),
        gso.bstar_norms_sq.clone(),
        vec![0.0; m],
        0.0,
        profile.radii_sq.clone(),
        SearchMode::Svp,
    )
    .with_limits(node_cap, deadline);
    let mut best: Option<(Vec<i64>, f64)> = None;
    while let Some(leaf) = engine.next_leaf() {
        let norm = leaf.rho[0];
        if best.as_ref().is_none_or(|b| norm < b.1) {
            engine.shrink_to(norm);
            best = Some((leaf.coeffs, norm));
        }
    }
    BlockSvp {
        coeffs: best,
        nodes: engine.nodes,
        capped: engine.capped,
    }
}

/// Gaussian-heuristic point count `vol(B_m(R)) / det L` for the unpruned ball.
pub fn gaussian_estimate(basis: &LatticeBasis, profile: &PruningProfile) -> Result<f64> {
    let log2_det = crate::lattice::determinant(basis)?.log2();
    Ok(gaussian_estimate_log2(basis.rank(), profile.base_radius, log2_det).exp2())
}

/// `log2(vol(B_m(R)) / det)`.
pub fn gaussian_estimate_log2(m: usize, radius: f64, log2_det: f64) -> f64 {
    let half = m as f64 / 2.0;
    let ln_gamma = Float::with_val(64, half + 1.0).ln_gamma().to_f64();
    let ln_vol = half * std::f64::consts::PI.ln() + m as f64 * radius.ln() - ln_gamma;
    ln_vol / std::f64::consts::LN_2 - log2_det
}
