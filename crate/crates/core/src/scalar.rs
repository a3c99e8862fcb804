//! The integer scalar abstraction and exact integer helpers built on it.

use std::cmp::Ordering;
use std::fmt::{Debug, Display};
use std::hash::Hash;

use num_bigint::BigInt;
use num_integer::{Integer, Roots};
use num_traits::{CheckedMul, FromPrimitive, Signed, ToPrimitive};

/// Integer type used for coordinates.
///
/// Implemented for `i64`, `i128` and `BigInt`. Primitive widths rely on
/// overflow checks being enabled (they are, in every profile of this
/// workspace), so an overflow panics instead of producing a wrong answer.
pub trait Scalar:
    Clone
    + Debug
    + Display
    + Ord
    + Hash
    + Send
    + Sync
    + Integer
    + Signed
    + Roots
    + CheckedMul
    + FromPrimitive
    + ToPrimitive
    + 'static
{
    /// Converts a small constant.
    fn int(v: i64) -> Self {
        <Self as FromPrimitive>::from_i64(v).expect("constant fits every scalar")
    }

    /// Nearest `f64`; used only for search-range estimates, never for decisions.
    fn approx(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    fn to_bigint(&self) -> BigInt {
        match self.to_i128() {
            Some(v) => BigInt::from(v),
            None => BigInt::parse_bytes(self.to_string().as_bytes(), 10).expect("decimal"),
        }
    }

    fn from_bigint(v: &BigInt) -> Option<Self> {
        match v.to_i128() {
            Some(x) => <Self as FromPrimitive>::from_i128(x),
            None => Self::from_str_radix(&v.to_str_radix(10), 10).ok(),
        }
    }

    fn from_f64_floor(v: f64) -> Option<Self> {
        if !v.is_finite() {
            return None;
        }
        <Self as FromPrimitive>::from_f64(v.floor())
    }
}

impl<T> Scalar for T where
    T: Clone
        + Debug
        + Display
        + Ord
        + Hash
        + Send
        + Sync
        + Integer
        + Signed
        + Roots
        + CheckedMul
        + FromPrimitive
        + ToPrimitive
        + 'static
{
}

pub(crate) fn sign_of<Z: Scalar>(v: &Z) -> Ordering {
    v.cmp(&Z::zero())
}

/// `⌈√n⌉` for `n ≥ 0`.
pub fn isqrt_ceil<Z: Scalar>(n: &Z) -> Z {
    let r = n.sqrt();
    if &(r.clone() * r.clone()) == n {
        r
    } else {
        r + Z::one()
    }
}

pub fn is_square<Z: Scalar>(n: &Z) -> Option<Z> {
    if n.is_negative() {
        return None;
    }
    let r = n.sqrt();
    (&(r.clone() * r.clone()) == n).then_some(r)
}

/// Sign of `x + y·√d` for `d ≥ 0`, decided with integer arithmetic only.
pub fn sign_surd<Z: Scalar>(x: &Z, y: &Z, d: &Z) -> Ordering {
    let sx = sign_of(x);
    let sy = if d.is_zero() { Ordering::Equal } else { sign_of(y) };
    match (sx, sy) {
        (Ordering::Equal, s) | (s, Ordering::Equal) => s,
        (a, b) if a == b => a,
        _ => {
            // opposite signs: compare x² with y²d, widening on overflow
            let lhs = x.checked_mul(x);
            let rhs = y.checked_mul(y).and_then(|v| v.checked_mul(d));
            let ord = match (lhs, rhs) {
                (Some(l), Some(r)) => l.cmp(&r),
                _ => {
                    let (bx, by, bd) = (x.to_bigint(), y.to_bigint(), d.to_bigint());
                    (&bx * &bx).cmp(&(&by * &by * bd))
                }
            };
            match ord {
                Ordering::Greater => sx,
                Ordering::Less => sy,
                Ordering::Equal => Ordering::Equal,
            }
        }
    }
}

/// `⌊(p + b·√n)/q⌋` for `q > 0`, `n ≥ 0`.
pub fn floor_surd<Z: Scalar>(p: &Z, b: &Z, n: &Z, q: &Z) -> Z {
    debug_assert!(q.is_positive());
    let m = b.clone() * b.clone() * n.clone();
    let root = if b.is_negative() {
        -isqrt_ceil(&m)
    } else {
        m.sqrt()
    };
    (p.clone() + root).div_floor(q)
}

/// `⌈(p + b·√n)/q⌉` for `q > 0`, `n ≥ 0`.
pub fn ceil_surd<Z: Scalar>(p: &Z, b: &Z, n: &Z, q: &Z) -> Z {
    -floor_surd(&-p.clone(), &-b.clone(), n, q)
}

pub fn gcd_z<Z: Scalar>(a: &Z, b: &Z) -> Z {
    a.gcd(b)
}

/// Squarefree test by trial division; inputs are discriminant-sized.
pub fn is_squarefree<Z: Scalar>(n: &Z) -> bool {
    let n = n.abs();
    if n.is_zero() {
        return false;
    }
    let mut p = Z::int(2);
    let mut rest = n;
    while p.clone() * p.clone() <= rest {
        let sq = p.clone() * p.clone();
        if rest.is_multiple_of(&sq) {
            return false;
        }
        while rest.is_multiple_of(&p) {
            rest = rest / p.clone();
        }
        p = p + Z::one();
    }
    true
}

/// Fundamental discriminant test for `D > 1`.
pub fn is_fundamental_discriminant<Z: Scalar>(d: &Z) -> bool {
    if d <= &Z::one() {
        return false;
    }
    let four = Z::int(4);
    let r = d.mod_floor(&four);
    if r == Z::one() {
        is_squarefree(d)
    } else if r.is_zero() {
        let q = d.clone() / four.clone();
        let qr = q.mod_floor(&four);
        (qr == Z::int(2) || qr == Z::int(3)) && is_squarefree(&q)
    } else {
        false
    }
}

/// Outward padding applied to floating estimates of search ranges.
///
/// `scale` is the magnitude of the quantities that were combined to produce
/// the estimate; the result is a safe bound on the accumulated `f64` error
/// plus a unit of slack.
pub(crate) fn pad(scale: f64) -> f64 {
    1e-6 + scale.abs() * 1e-9
}
