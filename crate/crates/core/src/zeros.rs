//! Zeta-zero data: ingestion of precomputed zero files, per-zero weights and
//! the ordering used to build lattices.
//!
//! A zero file is UTF-8 text. Lines starting with `#` are comments; every
//! other non-blank line holds three decimal strings
//!
//! ```text
//! <gamma> <alpha> <psi>
//! ```
//!
//! with `gamma = Im rho`, `alpha = 1/|rho zeta'(rho)|` and
//! `psi = arg(rho zeta'(rho))`. Files ending in `.gz` are read through gzip.

use std::cmp::Ordering;
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;
use std::str::FromStr;

use rug::float::Constant;
use rug::ops::Pow;
use rug::{Float, Integer, Rational};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// An exact decimal number that remembers how it was written.
#[derive(Clone, PartialEq)]
pub struct Decimal {
    text: String,
    value: Rational,
    sig_digits: usize,
    /// Power of ten of the last written digit.
    last_place: i32,
}

impl Decimal {
    pub fn as_str(&self) -> &str {
        &self.text
    }

    pub fn value(&self) -> &Rational {
        &self.value
    }

    pub fn significant_digits(&self) -> usize {
        self.sig_digits
    }

    /// Weight of the last written digit, `10^last_place`.
    pub fn unit_in_last_place(&self) -> Rational {
        pow10(self.last_place)
    }

    pub fn to_f64(&self) -> f64 {
        self.value.to_f64()
    }

    pub fn to_float(&self, prec: u32) -> Float {
        Float::with_val(prec, &self.value)
    }

    /// Renders `x` with `digits` significant digits.
    pub fn from_float(x: &Float, digits: usize) -> Decimal {
        let s = x.to_string_radix(10, Some(digits.max(1)));
        s.parse().expect("rug renders parseable decimals")
    }
}

impl fmt::Debug for Decimal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Decimal({})", self.text)
    }
}

impl fmt::Display for Decimal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

pub(crate) fn pow10(e: i32) -> Rational {
    let p = Integer::from(10).pow(e.unsigned_abs());
    if e >= 0 {
        Rational::from(p)
    } else {
        Rational::from((Integer::from(1), p))
    }
}

impl FromStr for Decimal {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let text = s.trim();
        if text.is_empty() {
            return Err("empty number".into());
        }
        let (mantissa, exp) = match text.find(['e', 'E']) {
            Some(i) => {
                let e: i32 = text[i + 1..]
                    .parse()
                    .map_err(|_| format!("bad exponent in {text:?}"))?;
                (&text[..i], e)
            }
            None => (text, 0),
        };
        let (negative, body) = match mantissa.as_bytes().first() {
            Some(b'-') => (true, &mantissa[1..]),
            Some(b'+') => (false, &mantissa[1..]),
            _ => (false, mantissa),
        };
        let (int_part, frac_part) = match body.find('.') {
            Some(i) => (&body[..i], &body[i + 1..]),
            None => (body, ""),
        };
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(format!("no digits in {text:?}"));
        }
        if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
            return Err(format!("not a decimal number: {text:?}"));
        }
        let digits = format!("{int_part}{frac_part}");
        let sig_digits = digits.trim_start_matches('0').len().max(1);
        let mut n: Integer = digits.parse().map_err(|_| format!("bad digits in {text:?}"))?;
        if negative {
            n = -n;
        }
        let last_place = exp - frac_part.len() as i32;
        let value = Rational::from(n) * pow10(last_place);
        Ok(Decimal {
            text: text.to_string(),
            value,
            sig_digits,
            last_place,
        })
    }
}

impl Serialize for Decimal {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.text)
    }
}

impl<'de> Deserialize<'de> for Decimal {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// One nontrivial zero `rho = 1/2 + i gamma` together with `zeta'(rho)` data.
#[derive(Clone, Debug, PartialEq)]
pub struct ZetaZero {
    pub gamma: Decimal,
    pub alpha: Decimal,
    pub psi: Decimal,
    pub precision_digits: usize,
}

/// Which zero sum a dataset is weighted for.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// `h_P`: damping `exp(-1.5e-6 gamma^2)`, zeros below height 14000.
    Hp,
    /// `h_StR`: damping `exp(-3e-9 gamma^2)`, zeros below height 74000.
    Hstr,
    /// Undamped partial sums `q_N`.
    Qn,
}

impl Mode {
    /// Gaussian damping constant `k` in `alpha* = alpha exp(-k gamma^2)`.
    pub fn damping(self) -> Rational {
        match self {
            Mode::Hp => Rational::from((3, 2_000_000)),
            Mode::Hstr => Rational::from((3, 1_000_000_000)),
            Mode::Qn => Rational::new(),
        }
    }

    pub fn damping_f64(self) -> f64 {
        self.damping().to_f64()
    }

    /// Height below which zeros enter the sum, when the mode fixes one.
    pub fn default_cutoff(self) -> Option<f64> {
        match self {
            Mode::Hp => Some(14000.0),
            Mode::Hstr => Some(74000.0),
            Mode::Qn => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Mode::Hp => "hp",
            Mode::Hstr => "hstr",
            Mode::Qn => "qn",
        }
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "hp" => Ok(Mode::Hp),
            "hstr" => Ok(Mode::Hstr),
            "qn" => Ok(Mode::Qn),
            other => Err(format!("unknown mode {other:?} (expected hp, hstr or qn)")),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A zero together with its damped weight `alpha* = alpha exp(-k gamma^2)`.
#[derive(Clone, Debug)]
pub struct WeightedZero {
    pub base: ZetaZero,
    pub alpha_star: Float,
    pub damping_k: f64,
}

impl WeightedZero {
    pub fn new(base: ZetaZero, mode: Mode) -> Self {
        let prec = digits_to_bits(base.precision_digits) + 32;
        let alpha_star = damped_weight(&base, &mode.damping(), prec);
        WeightedZero {
            base,
            alpha_star,
            damping_k: mode.damping_f64(),
        }
    }

    pub fn gamma(&self) -> &Decimal {
        &self.base.gamma
    }

    pub fn alpha_star_f64(&self) -> f64 {
        self.alpha_star.to_f64()
    }
}

pub(crate) fn digits_to_bits(digits: usize) -> u32 {
    (digits as f64 * std::f64::consts::LOG2_10).ceil() as u32
}

/// `alpha exp(-k gamma^2)` rounded to `prec` bits.
pub fn damped_weight(zero: &ZetaZero, k: &Rational, prec: u32) -> Float {
    let alpha = zero.alpha.to_float(prec);
    if *k == 0 {
        return alpha;
    }
    let g2 = Rational::from(zero.gamma.value() * zero.gamma.value());
    let arg = Float::with_val(prec, -(g2 * k));
    alpha * arg.exp()
}

/// Zeros weighted for one mode, heaviest first.
#[derive(Clone, Debug)]
pub struct ZeroDataset {
    pub mode: Mode,
    pub zeros: Vec<WeightedZero>,
    pub height_cutoff: f64,
}

impl ZeroDataset {
    pub fn len(&self) -> usize {
        self.zeros.len()
    }

    pub fn is_empty(&self) -> bool {
        self.zeros.is_empty()
    }

    /// SHA-256 over the mode, cutoff and every record in dataset order.
    pub fn fingerprint(&self) -> String {
        let mut h = Sha256::new();
        h.update(format!("{} {}\n", self.mode, self.height_cutoff));
        for z in &self.zeros {
            h.update(format!(
                "{} {} {}\n",
                z.base.gamma, z.base.alpha, z.base.psi
            ));
        }
        hex::encode(h.finalize())
    }
}

fn open_reader(path: &Path) -> Result<Box<dyn BufRead>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let reader: Box<dyn Read> = if path.extension().is_some_and(|e| e == "gz") {
        Box::new(flate2::read::GzDecoder::new(file))
    } else {
        Box::new(file)
    };
    Ok(Box::new(BufReader::new(reader)))
}

/// Reads a zero file; see the module docs for the format.
pub fn parse_zero_file(path: impl AsRef<Path>, min_digits: usize) -> Result<Vec<ZetaZero>> {
    let path = path.as_ref();
    let reader = open_reader(path)?;
    parse_zero_lines(reader.lines().map(|l| l.map_err(|e| Error::io(path, e))), min_digits)
}

pub fn parse_zero_str(text: &str, min_digits: usize) -> Result<Vec<ZetaZero>> {
    parse_zero_lines(text.lines().map(|l| Ok(l.to_string())), min_digits)
}

fn parse_zero_lines(
    lines: impl Iterator<Item = Result<String>>,
    min_digits: usize,
) -> Result<Vec<ZetaZero>> {
    let mut zeros: Vec<ZetaZero> = Vec::new();
    let mut pi_cache: Option<Float> = None;
    for (idx, line) in lines.enumerate() {
        let line = line?;
        let lineno = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(Error::Parse {
                line: lineno,
                msg: format!("expected 3 fields, found {}", fields.len()),
            });
        }
        let parse = |s: &str| -> Result<Decimal> {
            s.parse().map_err(|msg| Error::Parse { line: lineno, msg })
        };
        let gamma = parse(fields[0])?;
        let alpha = parse(fields[1])?;
        let mut psi = parse(fields[2])?;
        let digits = gamma
            .significant_digits()
            .min(alpha.significant_digits())
            .min(psi.significant_digits());
        if digits < min_digits {
            return Err(Error::TooFewDigits {
                line: lineno,
                digits,
                required: min_digits,
            });
        }
        if *gamma.value() <= 0 || *alpha.value() <= 0 {
            return Err(Error::Parse {
                line: lineno,
                msg: "gamma and alpha must be positive".into(),
            });
        }
        if let Some(prev) = zeros.last() {
            if gamma.value() <= prev.gamma.value() {
                return Err(Error::GammaNotIncreasing {
                    line: lineno,
                    gamma: gamma.to_string(),
                    previous: prev.gamma.to_string(),
                });
            }
        }
        let prec = digits_to_bits(psi.significant_digits()) + 64;
        let pi = match &pi_cache {
            Some(p) if p.prec() >= prec => p.clone(),
            _ => {
                let p = Float::with_val(prec.max(256), Constant::Pi);
                pi_cache = Some(p.clone());
                p
            }
        };
        psi = normalize_psi(psi, &pi, lineno)?;
        zeros.push(ZetaZero {
            gamma,
            alpha,
            psi,
            precision_digits: digits,
        });
    }
    Ok(zeros)
}

/// Maps psi into (-pi, pi], tolerating overshoot of `10^-(digits-2)`.
fn normalize_psi(psi: Decimal, pi: &Float, line: usize) -> Result<Decimal> {
    let digits = psi.significant_digits();
    let value = Float::with_val(pi.prec(), psi.value());
    let neg_pi = Float::with_val(pi.prec(), -pi);
    if value > neg_pi && value <= *pi {
        return Ok(psi);
    }
    let tol = pow10(-(digits as i32 - 2));
    let tol = Float::with_val(pi.prec(), &tol);
    let two_pi = Float::with_val(pi.prec(), pi * 2u32);
    let wrapped = if value > *pi && Float::with_val(pi.prec(), &value - pi) <= tol {
        value - two_pi
    } else if value <= neg_pi && Float::with_val(pi.prec(), &neg_pi - &value) <= tol {
        value + two_pi
    } else {
        return Err(Error::PsiOutOfRange {
            line,
            psi: psi.to_string(),
        });
    };
    // rounding back to `digits` can land just outside the interval again
    (digits..digits + 12)
        .map(|d| Decimal::from_float(&wrapped, d))
        .find(|d| {
            let v = Float::with_val(pi.prec(), d.value());
            v > neg_pi && v <= *pi
        })
        .ok_or(Error::PsiOutOfRange {
            line,
            psi: psi.to_string(),
        })
}

/// Writes zeros in the zero-file format. `header` lines are emitted as comments.
pub fn write_zero_file(mut out: impl Write, header: &[&str], zeros: &[ZetaZero]) -> std::io::Result<()> {
    for h in header {
        writeln!(out, "# {h}")?;
    }
    for z in zeros {
        writeln!(out, "{} {} {}", z.gamma, z.alpha, z.psi)?;
    }
    Ok(())
}

/// Filters to `gamma < height_cutoff`, weights every zero for `mode` and sorts
/// by descending `alpha*` (ties by ascending gamma).
pub fn weight_dataset(zeros: &[ZetaZero], mode: Mode, height_cutoff: f64) -> Result<ZeroDataset> {
    if !(height_cutoff > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "height cutoff must be positive, got {height_cutoff}"
        )));
    }
    if let Some(top) = zeros.iter().map(|z| z.gamma.value()).max() {
        let max_gamma = top.to_f64();
        if height_cutoff > max_gamma + 1.0 {
            return Err(Error::InvalidParameter(format!(
                "height cutoff {height_cutoff} exceeds the largest ingested gamma {max_gamma} by more than 1; \
                 zeros below the cutoff would be missing"
            )));
        }
    }
    let cutoff = Rational::from_f64(height_cutoff).expect("finite cutoff");
    let mut weighted: Vec<WeightedZero> = zeros
        .iter()
        .filter(|z| *z.gamma.value() < cutoff)
        .map(|z| WeightedZero::new(z.clone(), mode))
        .collect();
    if weighted.is_empty() {
        return Err(Error::EmptyDataset {
            cutoff: height_cutoff,
        });
    }
    weighted.sort_by(|a, b| {
        b.alpha_star
            .partial_cmp(&a.alpha_star)
            .unwrap_or(Ordering::Equal)
            .then_with(|| a.gamma().value().cmp(b.gamma().value()))
    });
    Ok(ZeroDataset {
        mode,
        zeros: weighted,
        height_cutoff,
    })
}

/// The `n` heaviest zeros of the dataset.
pub fn take_top(dataset: &ZeroDataset, n: usize) -> Result<&[WeightedZero]> {
    if n == 0 || n > dataset.len() {
        return Err(Error::NotEnoughZeros {
            requested: n,
            available: dataset.len(),
        });
    }
    Ok(&dataset.zeros[..n])
}
