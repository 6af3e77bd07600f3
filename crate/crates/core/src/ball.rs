//! Midpoint-radius ("ball") arithmetic over MPFR floats.
//!
//! A [`Ball`] stands for every real within `rad` of `mid`. Each operation
//! rounds its midpoint to nearest and folds that rounding error, plus the
//! propagated input radii, into a radius kept at 32 bits and always rounded
//! upward.

use std::cmp::Ordering;

use rug::float::{Constant, Round};
use rug::{Float, Rational};

const RAD_PREC: u32 = 32;

#[derive(Clone, Debug)]
pub struct Ball {
    mid: Float,
    rad: Float,
}

/// `a + b` rounded up at radius precision.
fn add_up(a: &Float, b: &Float) -> Float {
    Float::with_val_round(RAD_PREC, a + b, Round::Up).0
}

fn mul_up(a: &Float, b: &Float) -> Float {
    Float::with_val_round(RAD_PREC, a * b, Round::Up).0
}

fn div_up(a: &Float, b: &Float) -> Float {
    Float::with_val_round(RAD_PREC, a / b, Round::Up).0
}

fn abs_up(a: &Float) -> Float {
    Float::with_val_round(RAD_PREC, a.abs_ref(), Round::Up).0
}

fn abs_down(a: &Float) -> Float {
    Float::with_val_round(RAD_PREC, a.abs_ref(), Round::Down).0
}

/// Rounds to nearest at `prec` and returns the value with a bound on the
/// rounding error, which is zero when MPFR reports an exact result.
fn nearest<T>(prec: u32, val: T) -> (Float, Float)
where
    Float: rug::ops::AssignRound<T, Round = Round, Ordering = Ordering>,
{
    let (x, ord) = Float::with_val_round(prec, val, Round::Nearest);
    let err = if ord == Ordering::Equal {
        Float::new(RAD_PREC)
    } else {
        rounding_error(&x)
    };
    (x, err)
}

/// Bound on the rounding error of a round-to-nearest result `x` at its precision.
fn rounding_error(x: &Float) -> Float {
    if x.is_zero() {
        return Float::new(RAD_PREC);
    }
    // |x| < 2^exp, so half an ulp is at most 2^(exp - prec)
    let e = x.get_exp().expect("finite nonzero midpoint");
    Float::with_val(RAD_PREC, 1) << (e - x.prec() as i32)
}

impl Ball {
    /// An exact value.
    pub fn exact(mid: Float) -> Ball {
        Ball {
            mid,
            rad: Float::new(RAD_PREC),
        }
    }

    pub fn with_radius(mid: Float, rad: &Float) -> Ball {
        Ball {
            mid,
            rad: abs_up(rad),
        }
    }

    pub fn zero(prec: u32) -> Ball {
        Ball::exact(Float::new(prec))
    }

    pub fn from_rational(x: &Rational, prec: u32) -> Ball {
        let (mid, rad) = nearest(prec, x);
        Ball { mid, rad }
    }

    /// `x` widened by `err` on both sides.
    pub fn from_rational_with_error(x: &Rational, err: &Rational, prec: u32) -> Ball {
        let mut b = Ball::from_rational(x, prec);
        let e = Float::with_val_round(RAD_PREC, err, Round::Up).0;
        b.rad = add_up(&b.rad, &abs_up(&e));
        b
    }

    pub fn pi(prec: u32) -> Ball {
        let mid = Float::with_val(prec, Constant::Pi);
        let rad = rounding_error(&mid);
        Ball { mid, rad }
    }

    pub fn mid(&self) -> &Float {
        &self.mid
    }

    pub fn rad(&self) -> &Float {
        &self.rad
    }

    pub fn prec(&self) -> u32 {
        self.mid.prec()
    }

    /// Lower end, rounded down.
    pub fn lo(&self) -> Float {
        Float::with_val_round(self.prec(), &self.mid - &self.rad, Round::Down).0
    }

    /// Upper end, rounded up.
    pub fn hi(&self) -> Float {
        Float::with_val_round(self.prec(), &self.mid + &self.rad, Round::Up).0
    }

    /// Width `2 rad` as a double, rounded up.
    pub fn width(&self) -> f64 {
        let w = Float::with_val_round(RAD_PREC, &self.rad * 2u32, Round::Up).0;
        w.to_f64_round(Round::Up)
    }

    pub fn contains(&self, x: &Float) -> bool {
        *x >= self.lo() && *x <= self.hi()
    }

    pub fn add(&self, other: &Ball) -> Ball {
        let p = self.prec().max(other.prec());
        let (mid, err) = nearest(p, &self.mid + &other.mid);
        let rad = add_up(&add_up(&self.rad, &other.rad), &err);
        Ball { mid, rad }
    }

    pub fn sub(&self, other: &Ball) -> Ball {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Ball {
        Ball {
            mid: Float::with_val(self.prec(), -&self.mid),
            rad: self.rad.clone(),
        }
    }

    pub fn mul(&self, other: &Ball) -> Ball {
        let p = self.prec().max(other.prec());
        let (mid, err) = nearest(p, &self.mid * &other.mid);
        // |a b - a0 b0| <= |a0| rb + |b0| ra + ra rb
        let t1 = mul_up(&abs_up(&self.mid), &other.rad);
        let t2 = mul_up(&abs_up(&other.mid), &self.rad);
        let t3 = mul_up(&self.rad, &other.rad);
        let rad = add_up(&add_up(&add_up(&t1, &t2), &t3), &err);
        Ball { mid, rad }
    }

    pub fn mul_u32(&self, k: u32) -> Ball {
        let (mid, err) = nearest(self.prec(), &self.mid * k);
        let rad = add_up(&mul_up(&self.rad, &Float::with_val(RAD_PREC, k)), &err);
        Ball { mid, rad }
    }

    /// `None` when the divisor ball contains zero.
    pub fn div(&self, other: &Ball) -> Option<Ball> {
        let p = self.prec().max(other.prec());
        let denom_lo = Float::with_val_round(RAD_PREC, abs_down(&other.mid) - &other.rad, Round::Down).0;
        if denom_lo <= 0 {
            return None;
        }
        let (mid, err) = nearest(p, &self.mid / &other.mid);
        // |a/b - a0/b0| <= (ra + |a0/b0| rb) / (|b0| - rb)
        let num = add_up(&self.rad, &mul_up(&abs_up(&mid), &other.rad));
        let rad = add_up(&div_up(&num, &denom_lo), &err);
        Some(Ball { mid, rad })
    }

    /// `None` unless the ball lies in `(0, inf)`.
    pub fn sqrt(&self) -> Option<Ball> {
        let lo = Float::with_val_round(RAD_PREC, &self.mid - &self.rad, Round::Down).0;
        if lo <= 0 {
            return None;
        }
        let (mid, err) = nearest(self.prec(), self.mid.sqrt_ref());
        // |sqrt x - sqrt m| = |x - m| / (sqrt x + sqrt m) <= r / sqrt m
        let root_down = Float::with_val_round(RAD_PREC, self.mid.sqrt_ref(), Round::Down).0;
        let rad = add_up(&div_up(&self.rad, &root_down), &err);
        Some(Ball { mid, rad })
    }

    pub fn exp(&self) -> Ball {
        let (mid, err) = nearest(self.prec(), self.mid.exp_ref());
        // |e^x - e^m| <= e^m (e^r - 1)
        let em = Float::with_val_round(RAD_PREC, self.mid.exp_ref(), Round::Up).0;
        let er = Float::with_val_round(RAD_PREC, self.rad.exp_m1_ref(), Round::Up).0;
        let rad = add_up(&mul_up(&em, &er), &err);
        Ball { mid, rad }
    }

    /// Cosine; MPFR reduces the argument exactly, so huge midpoints are fine.
    pub fn cos(&self) -> Ball {
        let (mid, err) = nearest(self.prec(), self.mid.cos_ref());
        let two = Float::with_val(RAD_PREC, 2);
        let lip = if self.rad > two { two } else { self.rad.clone() };
        let rad = add_up(&lip, &err);
        Ball { mid, rad }
    }

    /// Whether every point of the ball exceeds `t` in absolute value.
    pub fn abs_exceeds(&self, t: &Ball) -> bool {
        let t_hi = t.hi();
        self.lo() > t_hi || self.hi() < Float::with_val(t_hi.prec(), -&t_hi)
    }
}
