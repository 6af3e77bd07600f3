//! Certified evaluation of the damped zero sums and conversion of hits into
//! bounds on the least counterexample.
//!
//! Every input decimal is read as a ball of one unit in its last printed
//! digit, so a result interval covers whatever the true zero data would give
//! within that accuracy.

use rug::float::Round;
use rug::{Float, Rational};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::ball::Ball;
use crate::error::{Error, Result};
use crate::zeros::{Decimal, Mode, WeightedZero, ZeroDataset};

/// Default precision target: the result interval is at most `2^(-bits/4)` wide.
pub const DEFAULT_PRECISION_BITS: u32 = 128;

/// A certified enclosure `[lo, hi]`.
#[derive(Clone, Debug, PartialEq)]
pub struct IntervalValue {
    pub lo: Float,
    pub hi: Float,
    pub precision_bits: u32,
}

impl IntervalValue {
    pub fn from_ball(b: &Ball, precision_bits: u32) -> Self {
        IntervalValue {
            lo: b.lo(),
            hi: b.hi(),
            precision_bits,
        }
    }

    /// `[lo, hi]` from doubles, which are exact in binary.
    pub fn from_f64_bounds(lo: f64, hi: f64, precision_bits: u32) -> Self {
        assert!(lo <= hi, "empty interval");
        IntervalValue {
            lo: Float::with_val(precision_bits, lo),
            hi: Float::with_val(precision_bits, hi),
            precision_bits,
        }
    }

    pub fn zero(precision_bits: u32) -> Self {
        IntervalValue {
            lo: Float::new(precision_bits),
            hi: Float::new(precision_bits),
            precision_bits,
        }
    }

    pub fn width(&self) -> f64 {
        Float::with_val_round(64, &self.hi - &self.lo, Round::Up).0.to_f64()
    }

    pub fn mid_f64(&self) -> f64 {
        (Float::with_val(self.lo.prec().max(self.hi.prec()), &self.lo + &self.hi) / 2u32).to_f64()
    }

    pub fn contains_f64(&self, x: f64) -> bool {
        self.lo <= x && self.hi >= x
    }

    /// Whether `other` lies inside `self`.
    pub fn encloses(&self, other: &IntervalValue) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn overlaps(&self, other: &IntervalValue) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    pub fn overlaps_f64(&self, lo: f64, hi: f64) -> bool {
        self.lo <= hi && self.hi >= lo
    }

    /// Lower bound of `|x|` over the interval (0 when it straddles 0).
    pub fn abs_lo(&self) -> Float {
        if self.lo > 0 {
            self.lo.clone()
        } else if self.hi < 0 {
            Float::with_val(self.hi.prec(), -&self.hi)
        } else {
            Float::new(self.lo.prec())
        }
    }

    /// Decimal rendering of the endpoints, rounded outward.
    pub fn to_decimal_strings(&self, digits: usize) -> (String, String) {
        (
            self.lo.to_string_radix_round(10, Some(digits), Round::Down),
            self.hi.to_string_radix_round(10, Some(digits), Round::Up),
        )
    }
}

/// Digits used when writing interval endpoints.
const ENDPOINT_DIGITS: usize = 40;

fn data_ball(d: &Decimal, prec: u32) -> Ball {
    Ball::from_rational_with_error(d.value(), &d.unit_in_last_place(), prec)
}

/// `2 sum alpha exp(-k gamma^2) cos(gamma y - psi)` over `zeros` at working precision `prec`.
fn sum_terms<'a>(
    y: &Rational,
    zeros: impl Iterator<Item = (usize, &'a WeightedZero)>,
    k: &Rational,
    prec: u32,
    arg_limit: f64,
) -> Result<Ball> {
    let yb = Ball::from_rational(y, prec);
    let kb = Ball::from_rational(k, prec);
    let mut total = Ball::zero(prec);
    for (index, z) in zeros {
        let gamma = data_ball(&z.base.gamma, prec);
        let arg = gamma.mul(&yb).sub(&data_ball(&z.base.psi, prec));
        if arg.width() > arg_limit {
            return Err(Error::InsufficientZeroPrecision {
                index,
                gamma: z.gamma().to_string(),
                y: y.to_f64().to_string(),
            });
        }
        let mut weight = data_ball(&z.base.alpha, prec);
        if *k != 0 {
            weight = weight.mul(&gamma.mul(&gamma).mul(&kb).neg().exp());
        }
        total = total.add(&weight.mul(&arg.cos()));
    }
    Ok(total.mul_u32(2))
}

/// Bits needed to write `|x|`.
fn magnitude_bits(x: &Rational) -> u32 {
    if *x == 0 {
        return 0;
    }
    let f = Float::with_val(64, x);
    let f = f.abs();
    f.get_exp().map_or(0, |e| e.max(0) as u32)
}

fn evaluate(
    y: &Rational,
    zeros: &[WeightedZero],
    indices: &[usize],
    k: &Rational,
    precision_bits: u32,
) -> Result<IntervalValue> {
    if *y < 0 {
        return Err(Error::InvalidParameter("y must be nonnegative".into()));
    }
    if indices.is_empty() {
        return Ok(IntervalValue::zero(precision_bits));
    }
    let max_gamma = indices
        .iter()
        .map(|&i| zeros[i].gamma().value().clone())
        .max()
        .unwrap_or_default();
    let target_width = (-(precision_bits as f64) / 4.0).exp2();
    let mut bits = precision_bits;
    for attempt in 0..2 {
        let prec = bits + magnitude_bits(&Rational::from(&max_gamma * y)) + 64;
        let total = sum_terms(y, indices.iter().map(|&i| (i, &zeros[i])), k, prec, target_width)?;
        let width = total.width();
        if width <= target_width {
            return Ok(IntervalValue::from_ball(&total, bits));
        }
        if attempt == 1 {
            return Err(Error::NeedsMorePrecision { width, precision: bits });
        }
        bits *= 2;
    }
    unreachable!()
}

/// The damped sum of the dataset's mode (`h_P`, `h_StR`, or the undamped sum) at `y`.
pub fn eval_h(y: &Rational, dataset: &ZeroDataset, precision_bits: u32) -> Result<IntervalValue> {
    let indices: Vec<usize> = (0..dataset.len()).collect();
    evaluate(y, &dataset.zeros, &indices, &dataset.mode.damping(), precision_bits)
}

/// The same sum restricted to the given zeros (for instance the lattice zeros).
pub fn eval_partial(y: &Rational, zeros: &[WeightedZero], mode: Mode, precision_bits: u32) -> Result<IntervalValue> {
    let indices: Vec<usize> = (0..zeros.len()).collect();
    evaluate(y, zeros, &indices, &mode.damping(), precision_bits)
}

/// Which zeros enter `q_N`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum QnTruncation {
    /// The `N` lowest zeros.
    Count(usize),
    /// Zeros with `gamma < N`.
    Height(f64),
}

/// `q_N(y) = 2 sum alpha cos(gamma y - psi)`, undamped, over the truncated zero set.
pub fn eval_qn(y: &Rational, dataset: &ZeroDataset, truncation: QnTruncation, precision_bits: u32) -> Result<IntervalValue> {
    let mut by_height: Vec<usize> = (0..dataset.len()).collect();
    by_height.sort_by(|&a, &b| dataset.zeros[a].gamma().value().cmp(dataset.zeros[b].gamma().value()));
    let chosen: Vec<usize> = match truncation {
        QnTruncation::Count(n) => {
            if n > by_height.len() {
                return Err(Error::NotEnoughZeros {
                    requested: n,
                    available: by_height.len(),
                });
            }
            by_height.truncate(n);
            by_height
        }
        QnTruncation::Height(h) => {
            let h = Rational::from_f64(h).ok_or_else(|| Error::InvalidParameter("height must be finite".into()))?;
            by_height
                .into_iter()
                .filter(|&i| *dataset.zeros[i].gamma().value() < h)
                .collect()
        }
    };
    evaluate(y, &dataset.zeros, &chosen, &Rational::new(), precision_bits)
}

/// Threshold `|h|` must exceed for a counterexample bound.
pub fn threshold(mode: Mode, prec: u32) -> Ball {
    match mode {
        Mode::Hp => Ball::exact(Float::with_val(prec, 1)).add(&Ball::from_rational(&Rational::from(-40), prec).exp()),
        Mode::Hstr => Ball::from_rational(&Rational::from((100_000_006u64, 100_000_000u64)), prec),
        Mode::Qn => Ball::exact(Float::with_val(prec, 1)),
    }
}

/// `alpha` of the widened bound uses the tighter threshold `1 + 6e-8`.
fn widening_base() -> Rational {
    Rational::from((100_000_006u64, 100_000_000u64))
}

/// `x < exp(A) - c exp(B)`, from `|M(x +- n)| >= |M(x)| - n`.
#[derive(Clone, Debug, PartialEq)]
pub struct WidenedBound {
    /// `A = y + 2 sqrt(k y)`.
    pub exponent: Float,
    /// `B = y/2 + sqrt(k y)`.
    pub correction_exponent: Float,
    /// `c = 0.99 alpha` with `alpha = |h|_lo - (1 + 6e-8)`.
    pub coefficient: Float,
    /// `log10(c exp(B - A))`: the bound equals `exp(A) (1 - 10^this)`.
    pub log10_relative_correction: Float,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CandidateReport {
    pub y: Rational,
    pub h_value: IntervalValue,
    pub mode: Mode,
    pub hit: bool,
    /// Whether `y` lies in `[e^7, e^50000]`, where the bounds apply.
    pub in_range: bool,
    /// Exponent `y + sqrt(y)`.
    pub bound_simple: Option<Float>,
    /// Exponent `y + 2 sqrt(k y)`.
    pub bound_refined: Option<Float>,
    pub bound_widened: Option<WidenedBound>,
}

/// Converts an evaluated candidate into counterexample bounds.
pub fn to_bound(y: &Rational, h: &IntervalValue, mode: Mode) -> CandidateReport {
    let prec = h.precision_bits.max(64) + magnitude_bits(y) + 64;
    let t = threshold(mode, prec);
    let hit = h.abs_lo() > t.hi();
    let yf = Float::with_val(prec, y);
    let in_range = *y > 0 && {
        let ln = Float::with_val(prec, yf.ln_ref());
        (7..=50_000).contains(&ln)
    };
    let mut report = CandidateReport {
        y: y.clone(),
        h_value: h.clone(),
        mode,
        hit,
        in_range,
        bound_simple: None,
        bound_refined: None,
        bound_widened: None,
    };
    if mode == Mode::Qn || !hit || !in_range {
        return report;
    }
    let root_y = Float::with_val(prec, yf.sqrt_ref());
    report.bound_simple = Some(Float::with_val(prec, &yf + &root_y));
    let ky = Float::with_val(prec, &yf * Float::with_val(prec, &mode.damping()));
    let root_ky = Float::with_val(prec, ky.sqrt_ref());
    let refined = Float::with_val(prec, &yf + Float::with_val(prec, &root_ky * 2u32));
    report.bound_refined = Some(refined.clone());
    let alpha = Float::with_val(prec, h.abs_lo() - Float::with_val(prec, &widening_base()));
    if alpha > 0 {
        let b = Float::with_val(prec, &yf / 2u32) + &root_ky;
        let c = Float::with_val(prec, &alpha * Float::with_val(prec, &Rational::from((99, 100))));
        // log10(c) + (B - A) log10(e)
        let log10_e = Float::with_val(prec, Float::with_val(prec, 1).exp().log10_ref());
        let rel = Float::with_val(prec, c.log10_ref()) + Float::with_val(prec, &b - &refined) * log10_e;
        report.bound_widened = Some(WidenedBound {
            exponent: refined,
            correction_exponent: b,
            coefficient: c,
            log10_relative_correction: rel,
        });
    }
    report
}

/// Shortest exact decimal form of a dyadic or decimal rational: integer part
/// and up to `frac_digits` fractional digits, truncated.
pub fn rational_to_decimal(x: &Rational, frac_digits: usize) -> String {
    let neg = *x < 0;
    let a = Rational::from(x.abs_ref());
    let scale = rug::ops::Pow::pow(rug::Integer::from(10u32), frac_digits as u32);
    let scaled = Rational::from(&a * &scale).floor().into_numer_denom().0;
    let (int_part, frac) = scaled.div_rem(scale);
    let mut s = if neg { format!("-{int_part}") } else { int_part.to_string() };
    if frac_digits > 0 {
        let f = format!("{:0>width$}", frac.to_string(), width = frac_digits);
        let f = f.trim_end_matches('0');
        if !f.is_empty() {
            s.push('.');
            s.push_str(f);
        }
    }
    s
}

/// Exact decimal expansion of a dyadic rational (denominator a power of two).
pub fn dyadic_to_decimal(x: &Rational) -> String {
    let den_bits = x.denom().significant_bits().saturating_sub(1) as usize;
    rational_to_decimal(x, den_bits)
}

fn float_str(x: &Float, digits: usize) -> String {
    x.to_string_radix(10, Some(digits))
}

impl CandidateReport {
    /// One JSON object with every real written as a decimal string.
    pub fn to_json(&self) -> serde_json::Value {
        let (lo, hi) = self.h_value.to_decimal_strings(ENDPOINT_DIGITS);
        let mut v = json!({
            "y": dyadic_or_decimal(&self.y),
            "mode": self.mode.name(),
            "h_lo": lo,
            "h_hi": hi,
            "precision_bits": self.h_value.precision_bits,
            "hit": self.hit,
            "in_range": self.in_range,
        });
        let map = v.as_object_mut().expect("object");
        if let Some(b) = &self.bound_simple {
            map.insert("bound_simple".into(), float_str(b, 12).into());
        }
        if let Some(b) = &self.bound_refined {
            map.insert("bound_refined".into(), float_str(b, 12).into());
        }
        if let Some(w) = &self.bound_widened {
            map.insert(
                "bound_widened".into(),
                json!({
                    "exponent": float_str(&w.exponent, 12),
                    "correction_exponent": float_str(&w.correction_exponent, 12),
                    "coefficient": float_str(&w.coefficient, 12),
                    "log10_relative_correction": float_str(&w.log10_relative_correction, 12),
                }),
            );
        }
        v
    }
}

fn dyadic_or_decimal(y: &Rational) -> String {
    if y.denom().is_power_of_two() {
        dyadic_to_decimal(y)
    } else {
        rational_to_decimal(y, 30)
    }
}

/// One row of the correlation table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorrelationRow {
    pub dist_sq: String,
    pub partial_sum: f64,
    pub h_lo: String,
    pub h_hi: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CorrelationReport {
    pub rows: Vec<CorrelationRow>,
    /// Spearman rank correlation between partial and full sums.
    pub rank_correlation: f64,
}

/// Input to [`correlation_report`]: a candidate's distance, the sum over the
/// lattice zeros and the full sum.
pub struct CorrelationInput<'a> {
    pub dist_sq: &'a Rational,
    pub partial: &'a IntervalValue,
    pub full: &'a IntervalValue,
}

pub fn correlation_report(items: &[CorrelationInput<'_>]) -> Result<CorrelationReport> {
    if items.len() < 2 {
        return Err(Error::InvalidParameter("a correlation needs at least two candidates".into()));
    }
    let rows: Vec<CorrelationRow> = items
        .iter()
        .map(|it| {
            let (lo, hi) = it.full.to_decimal_strings(20);
            CorrelationRow {
                dist_sq: rational_to_decimal(it.dist_sq, 6),
                partial_sum: it.partial.mid_f64(),
                h_lo: lo,
                h_hi: hi,
            }
        })
        .collect();
    let xs: Vec<f64> = items.iter().map(|it| it.partial.mid_f64()).collect();
    let ys: Vec<f64> = items.iter().map(|it| it.full.mid_f64()).collect();
    Ok(CorrelationReport {
        rows,
        rank_correlation: spearman(&xs, &ys),
    })
}

impl CorrelationReport {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("dist_sq,partial_sum,h_lo,h_hi\n");
        for r in &self.rows {
            s.push_str(&format!("{},{:e},{},{}\n", r.dist_sq, r.partial_sum, r.h_lo, r.h_hi));
        }
        s
    }
}

/// Average ranks, ties sharing the mean rank.
fn ranks(v: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    let mut out = vec![0.0; v.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
            j += 1;
        }
        let r = (i + j) as f64 / 2.0;
        for &k in &idx[i..=j] {
            out[k] = r;
        }
        i = j + 1;
    }
    out
}

pub fn spearman(xs: &[f64], ys: &[f64]) -> f64 {
    let (rx, ry) = (ranks(xs), ranks(ys));
    let n = xs.len() as f64;
    let (mx, my) = (rx.iter().sum::<f64>() / n, ry.iter().sum::<f64>() / n);
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in rx.iter().zip(&ry) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return 0.0;
    }
    sxy / (sxx * syy).sqrt()
}
