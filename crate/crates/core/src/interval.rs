//! Dyadic interval arithmetic over big integers.
//!
//! An [`Interval`] is `[lo·2^-p, hi·2^-p]`; every operation rounds outward,
//! so the true real value always stays enclosed. Used to compute rational
//! targets next to irrational bounds, to certify unit-group ranks, and as an
//! independent oracle for the exact sign routines.

use std::cmp::Ordering;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::scalar::Scalar;
use crate::surd::Surd;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interval {
    lo: BigInt,
    hi: BigInt,
    prec: u32,
}

fn shr_floor(v: &BigInt, bits: u32) -> BigInt {
    v.div_floor(&(BigInt::from(1) << bits))
}

fn shr_ceil(v: &BigInt, bits: u32) -> BigInt {
    -shr_floor(&-v, bits)
}

fn isqrt_ceil(v: &BigInt) -> BigInt {
    let r = v.sqrt();
    if &(&r * &r) == v {
        r
    } else {
        r + 1
    }
}

impl Interval {
    pub fn from_int(v: &BigInt, prec: u32) -> Self {
        let x = v << prec;
        Interval {
            lo: x.clone(),
            hi: x,
            prec,
        }
    }

    pub fn from_scalar<Z: Scalar>(v: &Z, prec: u32) -> Self {
        Self::from_int(&v.to_bigint(), prec)
    }

    pub fn from_ratio<Z: Scalar>(r: &Ratio<Z>, prec: u32) -> Self {
        let n = r.numer().to_bigint() << prec;
        let d = r.denom().to_bigint();
        Interval {
            lo: n.div_floor(&d),
            hi: (-n).div_floor(&d) * -1,
            prec,
        }
    }

    /// Encloses the real surd `a + b√d`.
    pub fn from_surd<Z: Scalar>(x: &Surd<Z>, prec: u32) -> Self {
        let a = Self::from_ratio(&x.a, prec);
        let b = Self::from_ratio(&x.b, prec);
        let root = Self::from_scalar(&x.d, prec).sqrt();
        a + b * root
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    /// Square root of the nonnegative part.
    pub fn sqrt(&self) -> Self {
        let p = self.prec;
        let lo = if self.lo.is_positive() {
            (&self.lo << p).sqrt()
        } else {
            BigInt::zero()
        };
        let hi = if self.hi.is_positive() {
            isqrt_ceil(&(&self.hi << p))
        } else {
            BigInt::zero()
        };
        Interval { lo, hi, prec: p }
    }

    /// Divides by an interval that excludes zero.
    pub fn div(&self, rhs: &Interval) -> Option<Self> {
        if rhs.sign().is_none() || rhs.lo.is_zero() && rhs.hi.is_zero() {
            return None;
        }
        let p = self.prec;
        let mut lo: Option<BigInt> = None;
        let mut hi: Option<BigInt> = None;
        for a in [&self.lo, &self.hi] {
            for b in [&rhs.lo, &rhs.hi] {
                let num = a << p;
                let f = num.div_floor(b);
                let c = -((-&num).div_floor(b));
                lo = Some(lo.map_or(f.clone(), |v: BigInt| v.min(f.clone())));
                hi = Some(hi.map_or(c.clone(), |v: BigInt| v.max(c.clone())));
            }
        }
        Some(Interval {
            lo: lo.unwrap(),
            hi: hi.unwrap(),
            prec: p,
        })
    }

    /// `Some(sign)` when the enclosure decides the sign; `None` if it straddles zero.
    pub fn sign(&self) -> Option<Ordering> {
        if self.lo.is_positive() {
            Some(Ordering::Greater)
        } else if self.hi.is_negative() {
            Some(Ordering::Less)
        } else if self.lo.is_zero() && self.hi.is_zero() {
            Some(Ordering::Equal)
        } else {
            None
        }
    }

    pub fn contains_zero(&self) -> bool {
        !self.lo.is_positive() && !self.hi.is_negative()
    }

    pub fn lower(&self) -> Ratio<BigInt> {
        Ratio::new(self.lo.clone(), BigInt::from(1) << self.prec)
    }

    pub fn upper(&self) -> Ratio<BigInt> {
        Ratio::new(self.hi.clone(), BigInt::from(1) << self.prec)
    }

    /// Floating bounds `(lo, hi)` that still enclose the value.
    pub fn f64_bounds(&self) -> (f64, f64) {
        let scale = 2f64.powi(self.prec as i32);
        let lo = big_to_f64(&self.lo) / scale;
        let hi = big_to_f64(&self.hi) / scale;
        (next_down(next_down(lo)), next_up(next_up(hi)))
    }

    /// Enclosure of `ln x` for a positive interval, as floating bounds.
    pub fn ln_bounds(&self) -> Option<(f64, f64)> {
        if !self.lo.is_positive() {
            return None;
        }
        let (lo, hi) = self.f64_bounds();
        if lo <= 0.0 || !hi.is_finite() {
            return None;
        }
        let a = lo.ln();
        let b = hi.ln();
        let slack = |v: f64| 4.0 * f64::EPSILON * v.abs().max(1.0);
        Some((a - slack(a), b + slack(b)))
    }

    pub fn width_bits(&self) -> u64 {
        (&self.hi - &self.lo).bits()
    }

    pub fn floor_lo(&self) -> BigInt {
        shr_floor(&self.lo, self.prec)
    }

    pub fn ceil_hi(&self) -> BigInt {
        shr_ceil(&self.hi, self.prec)
    }
}

fn big_to_f64(v: &BigInt) -> f64 {
    v.to_f64().unwrap_or(if v.is_negative() {
        f64::NEG_INFINITY
    } else {
        f64::INFINITY
    })
}

fn next_up(v: f64) -> f64 {
    if v.is_nan() || v == f64::INFINITY {
        return v;
    }
    if v == 0.0 {
        return f64::from_bits(1);
    }
    let bits = v.to_bits();
    if v > 0.0 {
        f64::from_bits(bits + 1)
    } else {
        f64::from_bits(bits - 1)
    }
}

fn next_down(v: f64) -> f64 {
    -next_up(-v)
}

impl Add for Interval {
    type Output = Interval;
    fn add(self, rhs: Interval) -> Interval {
        debug_assert_eq!(self.prec, rhs.prec);
        Interval {
            lo: self.lo + rhs.lo,
            hi: self.hi + rhs.hi,
            prec: self.prec,
        }
    }
}

impl Neg for Interval {
    type Output = Interval;
    fn neg(self) -> Interval {
        Interval {
            lo: -self.hi,
            hi: -self.lo,
            prec: self.prec,
        }
    }
}

impl Sub for Interval {
    type Output = Interval;
    fn sub(self, rhs: Interval) -> Interval {
        self + (-rhs)
    }
}

impl Mul for Interval {
    type Output = Interval;
    fn mul(self, rhs: Interval) -> Interval {
        debug_assert_eq!(self.prec, rhs.prec);
        let prods = [
            &self.lo * &rhs.lo,
            &self.lo * &rhs.hi,
            &self.hi * &rhs.lo,
            &self.hi * &rhs.hi,
        ];
        let min = prods.iter().min().unwrap();
        let max = prods.iter().max().unwrap();
        Interval {
            lo: shr_floor(min, self.prec),
            hi: shr_ceil(max, self.prec),
            prec: self.prec,
        }
    }
}
