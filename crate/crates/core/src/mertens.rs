//! The lattice whose close vectors to a phase target give candidate `y`.
//!
//! Row 0 holds `floor(sqrt(a*_i) gamma_i 2^nu_y)` for every zero followed by
//! `2^nu_t`; row `i + 1` holds `floor(sqrt(a*_i) 2 pi 2^nu)` in column `i`.
//! A lattice point with last coordinate `x 2^nu_t` corresponds to
//! `y = x 2^(nu_y - nu)`, and its distance to the target measures how well
//! `gamma_i y` matches `psi_i` modulo `2 pi`, weighted by `sqrt(a*_i)`.

use std::fmt;
use std::str::FromStr;

use rug::{Float, Integer, Rational};
use serde::{Deserialize, Serialize};

use crate::ball::Ball;
use crate::enumeration::{gaussian_estimate_log2, EnumCandidate};
use crate::error::{Error, Result};
use crate::lattice::{log2_integer, pow2, LatticeBasis};
use crate::zeros::{Mode, WeightedZero};

/// Whether the target aims at positive or negative values of the sum.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    #[default]
    #[serde(rename = "pos")]
    Positive,
    #[serde(rename = "neg")]
    Negative,
}

impl FromStr for Sign {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "pos" | "positive" | "+" => Ok(Sign::Positive),
            "neg" | "negative" | "-" => Ok(Sign::Negative),
            other => Err(format!("unknown sign {other:?} (expected pos or neg)")),
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Positive => "pos",
            Sign::Negative => "neg",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MertensParams {
    /// Number of zeros.
    pub n: usize,
    pub nu: u32,
    pub nu_y: u32,
    pub nu_t: u32,
    /// Enumeration radius as a multiple of the unit-volume radius.
    pub radius_scale: f64,
    pub mode: Mode,
    pub sign: Sign,
}

impl MertensParams {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidParameter("N must be at least 1".into()));
        }
        if self.nu <= self.nu_y {
            return Err(Error::InvalidParameter(format!(
                "nu ({}) must exceed nu_y ({})",
                self.nu, self.nu_y
            )));
        }
        if !(self.radius_scale >= 1.0 && self.radius_scale.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "radius scale {} must be at least 1",
                self.radius_scale
            )));
        }
        Ok(())
    }

    /// Decimal digits a zero needs so that its data pins down every floor at
    /// `nu` bits: `ceil(nu log10 2) + 8`.
    pub fn required_digits(&self) -> usize {
        (self.nu as f64 * std::f64::consts::LOG10_2).ceil() as usize + 8
    }
}

#[derive(Clone, Debug)]
pub struct MertensInstance {
    pub params: MertensParams,
    pub zeros: Vec<WeightedZero>,
    pub basis: LatticeBasis,
    /// Target point in ambient coordinates (last entry 0).
    pub target: Vec<Integer>,
    /// `|det L|`, exact.
    pub det: Integer,
    /// Enumeration radius `K`.
    pub radius: f64,
}

/// Certified floors of the entries for one zero.
struct ZeroEntries {
    first_row: Integer,
    modulus: Integer,
    target: Integer,
}

fn floor_certified(b: &Ball) -> Option<Integer> {
    let lo = b.lo().floor().to_integer()?;
    let hi = b.hi().floor().to_integer()?;
    (lo == hi).then_some(lo)
}

fn zero_entries(z: &WeightedZero, params: &MertensParams, prec: u32) -> Option<ZeroEntries> {
    let exact = |d: &crate::zeros::Decimal| Ball::from_rational(d.value(), prec);
    let gamma = exact(&z.base.gamma);
    let k = Ball::from_rational(&params.mode.damping(), prec);
    let alpha_star = exact(&z.base.alpha).mul(&gamma.mul(&gamma).mul(&k).neg().exp());
    let w = alpha_star.sqrt()?;
    let pi = Ball::pi(prec);
    let scale = |e: u32| Ball::exact(Float::with_val(prec, 1) << e);
    let first_row = floor_certified(&w.mul(&gamma).mul(&scale(params.nu_y)))?;
    let modulus = floor_certified(&w.mul(&pi.mul_u32(2)).mul(&scale(params.nu)))?;
    let psi = match params.sign {
        Sign::Positive => exact(&z.base.psi),
        Sign::Negative => exact(&z.base.psi).add(&pi),
    };
    let target = floor_certified(&w.mul(&psi).mul(&scale(params.nu)))?;
    Some(ZeroEntries {
        first_row,
        modulus,
        target,
    })
}

/// Builds the lattice and target from the `N` heaviest zeros.
pub fn build_instance(zeros: &[WeightedZero], params: &MertensParams) -> Result<MertensInstance> {
    params.validate()?;
    let n = params.n;
    if zeros.len() != n {
        return Err(Error::Dimension(format!("N = {n} but {} zeros were supplied", zeros.len())));
    }
    let required = params.required_digits();
    let mut entries = Vec::with_capacity(n);
    for (index, z) in zeros.iter().enumerate() {
        if z.base.precision_digits < required {
            return Err(Error::InsufficientZeroPrecision {
                index,
                gamma: z.gamma().to_string(),
                y: format!("nu = {} (needs {required} digits)", params.nu),
            });
        }
        let mut prec = params.nu.max(params.nu_y) + 96;
        let mut found = None;
        for _ in 0..4 {
            if let Some(e) = zero_entries(z, params, prec) {
                found = Some(e);
                break;
            }
            prec *= 2;
        }
        entries.push(found.ok_or_else(|| Error::FloorUncertified {
            what: format!("lattice entries of zero #{index} (gamma = {})", z.gamma()),
            precision: prec,
        })?);
    }
    let dim = n + 1;
    let mut rows = vec![vec![Integer::new(); dim]; dim];
    for (i, e) in entries.iter().enumerate() {
        rows[0][i] = e.first_row.clone();
        rows[i + 1][i] = e.modulus.clone();
    }
    rows[0][n] = pow2(params.nu_t);
    let mut target: Vec<Integer> = entries.iter().map(|e| e.target.clone()).collect();
    target.push(Integer::new());
    let det = entries
        .iter()
        .fold(pow2(params.nu_t), |acc, e| acc * &e.modulus);
    let basis = LatticeBasis::new(rows)?;
    let radius = radius_for(dim, log2_integer(&det), params.radius_scale);
    Ok(MertensInstance {
        params: params.clone(),
        zeros: zeros.to_vec(),
        basis,
        target,
        det,
        radius,
    })
}

/// `K = scale sqrt(m / (2 pi e)) det^(1/m)`.
pub fn radius_for(m: usize, log2_det: f64, radius_scale: f64) -> f64 {
    let unit = (m as f64 / (2.0 * std::f64::consts::PI * std::f64::consts::E)).sqrt();
    radius_scale * unit * (log2_det / m as f64).exp2()
}

impl MertensInstance {
    pub fn dim(&self) -> usize {
        self.params.n + 1
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn log2_det(&self) -> f64 {
        log2_integer(&self.det)
    }

    /// Gaussian-heuristic number of lattice points within `K` of the target.
    pub fn gaussian_estimate(&self) -> f64 {
        gaussian_estimate_log2(self.dim(), self.radius, self.log2_det()).exp2()
    }

    /// The moduli `floor(sqrt(a*_i) 2 pi 2^nu)`.
    pub fn moduli(&self) -> Vec<&Integer> {
        (0..self.params.n).map(|i| &self.basis.row(i + 1)[i]).collect()
    }

    /// Recovers `y` from a point enumerated in `basis`, any basis of this lattice.
    pub fn recover_y(&self, candidate: &EnumCandidate, basis: &LatticeBasis) -> Result<CandidateY> {
        let point = basis.combination(&candidate.coeffs);
        self.recover_from_point(&point)
    }

    /// Recovers `y` from an ambient lattice point.
    pub fn recover_from_point(&self, point: &[Integer]) -> Result<CandidateY> {
        let n = self.params.n;
        if point.len() != n + 1 {
            return Err(Error::Dimension(format!("point has {} coordinates, expected {}", point.len(), n + 1)));
        }
        let unit = pow2(self.params.nu_t);
        let (x, rem) = point[n].clone().div_rem_euc(unit);
        if rem != 0 {
            return Err(Error::Format("last coordinate is not a multiple of 2^nu_t".into()));
        }
        Ok(self.candidate_from_x(x))
    }

    /// `y = x 2^(nu_y - nu)` together with its residual.
    pub fn candidate_from_x(&self, x: Integer) -> CandidateY {
        let y = Rational::from((x.clone(), pow2(self.params.nu - self.params.nu_y)));
        let row0 = self.basis.row(0);
        let mut residual_sq = Integer::new();
        for i in 0..self.params.n {
            let r = balanced_mod(Integer::from(&x * &row0[i]) - &self.target[i], &self.basis.row(i + 1)[i]);
            residual_sq += Integer::from(&r * &r);
        }
        let ranges = predict_ranges(&self.params, &self.zeros);
        CandidateY {
            x,
            y,
            residual_sq,
            predicted_range: ranges.y_range,
        }
    }
}

/// Representative of `a mod p` in `(-p/2, p/2]`.
pub fn balanced_mod(a: Integer, p: &Integer) -> Integer {
    let mut r = Integer::from(&a % p);
    if r < 0 {
        r += p;
    }
    if Integer::from(&r * 2u32) > *p {
        r - p
    } else {
        r
    }
}

/// A recovered candidate.
#[derive(Clone, Debug, PartialEq)]
pub struct CandidateY {
    /// Last coefficient of the point with respect to the construction basis.
    pub x: Integer,
    /// `x 2^(nu_y - nu)`, exact.
    pub y: Rational,
    /// `sum_i |x a_i - t_i|^2` with balanced residues modulo the diagonal.
    pub residual_sq: Integer,
    pub predicted_range: (f64, f64),
}

impl CandidateY {
    pub fn y_f64(&self) -> f64 {
        self.y.to_f64()
    }

    /// Squared distance to the target of the closest point with this `x`.
    pub fn dist_sq(&self, nu_t: u32) -> Integer {
        let last = &self.x * pow2(nu_t);
        &self.residual_sq + Integer::from(&last * &last)
    }

    /// `log2` of the factor between `|y|` and the nearest end of the predicted range
    /// (0 inside the range).
    pub fn log2_offset_from_range(&self) -> f64 {
        let y = self.y.to_f64().abs();
        let (lo, hi) = self.predicted_range;
        if y < lo {
            (lo / y).log2()
        } else if y > hi {
            (y / hi).log2()
        } else {
            0.0
        }
    }
}

/// Entry-size and `y` heuristics derived from the unit-volume radius.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PredictedRanges {
    /// `log2( (2 pi e)^(-1/2) prod (2 pi sqrt(a*_i))^(1/(N+1)) )`.
    pub c: f64,
    /// Range of `sqrt(a*_i) |gamma_i y - psi_i|`.
    pub entry_range: (f64, f64),
    pub y_range: (f64, f64),
}

pub fn predict_ranges(params: &MertensParams, zeros: &[WeightedZero]) -> PredictedRanges {
    let m = (params.n + 1) as f64;
    let two_pi = 2.0 * std::f64::consts::PI;
    let sum: f64 = zeros
        .iter()
        .take(params.n)
        .map(|z| (two_pi * z.alpha_star_f64().sqrt()).log2())
        .sum();
    let c = -0.5 * (two_pi * std::f64::consts::E).log2() + sum / m;
    let shrink = (params.nu as f64 - params.nu_t as f64) / m;
    let entry = (c - shrink).exp2();
    let y = (c + params.nu_y as f64 - params.nu_t as f64 - shrink).exp2();
    PredictedRanges {
        c,
        entry_range: (entry, entry * params.radius_scale),
        y_range: (y, y * params.radius_scale),
    }
}

/// Reproducibility record for an instance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceManifest {
    pub params: MertensParams,
    pub dataset_fingerprint: String,
    pub det: String,
    pub log2_det: f64,
    pub radius: String,
    pub gaussian_estimate: f64,
    pub predicted: PredictedRanges,
}

impl InstanceManifest {
    pub fn new(instance: &MertensInstance, dataset_fingerprint: &str) -> Self {
        InstanceManifest {
            params: instance.params.clone(),
            dataset_fingerprint: dataset_fingerprint.to_string(),
            det: instance.det.to_string(),
            log2_det: instance.log2_det(),
            radius: format!("{:e}", instance.radius),
            gaussian_estimate: instance.gaussian_estimate(),
            predicted: predict_ranges(&instance.params, &instance.zeros),
        }
    }
}
