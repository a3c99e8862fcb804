//! Exact real numbers of the form `a + b√d` and `c₀ + c₁√r + c₂√s + c₃√(rs)`
//! with rational coefficients, with exact sign determination.

use std::cmp::Ordering;
use std::ops::{Add, Mul, Neg, Sub};

use num_rational::Ratio;
use num_traits::{One, Zero};

use crate::scalar::{ceil_surd, floor_surd, sign_surd, Scalar};

/// The real number `a + b·√d` (`d ≥ 0`, positive square root).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Surd<Z: Scalar = crate::Int> {
    pub a: Ratio<Z>,
    pub b: Ratio<Z>,
    pub d: Z,
}

impl<Z: Scalar> Surd<Z> {
    pub fn new(a: Ratio<Z>, b: Ratio<Z>, d: Z) -> Self {
        Surd { a, b, d }
    }

    pub fn int(a: Z, b: Z, d: Z) -> Self {
        Surd {
            a: Ratio::from_integer(a),
            b: Ratio::from_integer(b),
            d,
        }
    }

    pub fn rational(a: Ratio<Z>, d: Z) -> Self {
        Surd {
            a,
            b: Ratio::zero(),
            d,
        }
    }

    /// `(p, q, den)` with `value = (p + q√d)/den` and `den > 0`.
    fn integral_parts(&self) -> (Z, Z, Z) {
        let den = self.a.denom().lcm(self.b.denom());
        let p = self.a.numer().clone() * (den.clone() / self.a.denom().clone());
        let q = self.b.numer().clone() * (den.clone() / self.b.denom().clone());
        (p, q, den)
    }

    pub fn sign(&self) -> Ordering {
        let (p, q, _) = self.integral_parts();
        sign_surd(&p, &q, &self.d)
    }

    pub fn floor(&self) -> Z {
        let (p, q, den) = self.integral_parts();
        floor_surd(&p, &q, &self.d, &den)
    }

    pub fn ceil(&self) -> Z {
        let (p, q, den) = self.integral_parts();
        ceil_surd(&p, &q, &self.d, &den)
    }

    pub fn approx(&self) -> f64 {
        ratio_f64(&self.a) + ratio_f64(&self.b) * self.d.approx().sqrt()
    }

    pub fn is_zero(&self) -> bool {
        self.sign() == Ordering::Equal
    }

    /// Multiplies by the rational `k`.
    pub fn scale(&self, k: &Ratio<Z>) -> Self {
        Surd {
            a: self.a.clone() * k.clone(),
            b: self.b.clone() * k.clone(),
            d: self.d.clone(),
        }
    }

    pub fn square(&self) -> Self {
        self.clone() * self.clone()
    }

    /// Conjugate `a − b√d`.
    pub fn conj(&self) -> Self {
        Surd {
            a: self.a.clone(),
            b: -self.b.clone(),
            d: self.d.clone(),
        }
    }
}

pub(crate) fn ratio_f64<Z: Scalar>(r: &Ratio<Z>) -> f64 {
    r.numer().approx() / r.denom().approx()
}

impl<Z: Scalar> Add for Surd<Z> {
    type Output = Surd<Z>;
    fn add(self, rhs: Self) -> Self {
        debug_assert_eq!(self.d, rhs.d);
        Surd {
            a: self.a + rhs.a,
            b: self.b + rhs.b,
            d: self.d,
        }
    }
}

impl<Z: Scalar> Sub for Surd<Z> {
    type Output = Surd<Z>;
    fn sub(self, rhs: Self) -> Self {
        debug_assert_eq!(self.d, rhs.d);
        Surd {
            a: self.a - rhs.a,
            b: self.b - rhs.b,
            d: self.d,
        }
    }
}

impl<Z: Scalar> Neg for Surd<Z> {
    type Output = Surd<Z>;
    fn neg(self) -> Self {
        Surd {
            a: -self.a,
            b: -self.b,
            d: self.d,
        }
    }
}

impl<Z: Scalar> Mul for Surd<Z> {
    type Output = Surd<Z>;
    fn mul(self, rhs: Self) -> Self {
        debug_assert_eq!(self.d, rhs.d);
        let d = Ratio::from_integer(self.d.clone());
        Surd {
            a: self.a.clone() * rhs.a.clone() + self.b.clone() * rhs.b.clone() * d,
            b: self.a * rhs.b + self.b * rhs.a,
            d: self.d,
        }
    }
}

impl<Z: Scalar> PartialOrd for Surd<Z> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<Z: Scalar> Ord for Surd<Z> {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.clone() - other.clone()).sign()
    }
}

/// A real number in `Q(√r, √s)`: `c₀ + c₁√r + c₂√s + c₃√(rs)`.
///
/// Signs are decided by splitting into `P + Q√s` with `P, Q ∈ Q(√r)` and
/// squaring once when `P` and `Q` disagree in sign. The radicands need not be
/// independent; the procedure stays exact when `r`, `s` or `rs` is a square.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BiSurd<Z: Scalar = crate::Int> {
    pub c: [Ratio<Z>; 4],
    pub r: Z,
    pub s: Z,
}

impl<Z: Scalar> BiSurd<Z> {
    pub fn zero(r: Z, s: Z) -> Self {
        BiSurd {
            c: [Ratio::zero(), Ratio::zero(), Ratio::zero(), Ratio::zero()],
            r,
            s,
        }
    }

    pub fn constant(v: Ratio<Z>, r: Z, s: Z) -> Self {
        let mut out = Self::zero(r, s);
        out.c[0] = v;
        out
    }

    pub fn sqrt_r(r: Z, s: Z) -> Self {
        let mut out = Self::zero(r, s);
        out.c[1] = Ratio::one();
        out
    }

    pub fn sqrt_s(r: Z, s: Z) -> Self {
        let mut out = Self::zero(r, s);
        out.c[2] = Ratio::one();
        out
    }

    /// Embeds `a + b√r`.
    pub fn from_r(x: &Surd<Z>, s: Z) -> Self {
        let mut out = Self::zero(x.d.clone(), s);
        out.c[0] = x.a.clone();
        out.c[1] = x.b.clone();
        out
    }

    /// Embeds `a + b√s`.
    pub fn from_s(x: &Surd<Z>, r: Z) -> Self {
        let mut out = Self::zero(r, x.d.clone());
        out.c[0] = x.a.clone();
        out.c[2] = x.b.clone();
        out
    }

    pub fn scale(&self, k: &Ratio<Z>) -> Self {
        BiSurd {
            c: self.c.clone().map(|v| v * k.clone()),
            r: self.r.clone(),
            s: self.s.clone(),
        }
    }

    pub fn sign(&self) -> Ordering {
        let p = Surd::new(self.c[0].clone(), self.c[1].clone(), self.r.clone());
        let q = Surd::new(self.c[2].clone(), self.c[3].clone(), self.r.clone());
        let sp = p.sign();
        let sq = if self.s.is_zero() {
            Ordering::Equal
        } else {
            q.sign()
        };
        match (sp, sq) {
            (Ordering::Equal, x) | (x, Ordering::Equal) => x,
            (a, b) if a == b => a,
            _ => {
                let s = Ratio::from_integer(self.s.clone());
                let w = p.square() - q.square().scale(&s);
                match w.sign() {
                    Ordering::Greater => sp,
                    Ordering::Less => sq,
                    Ordering::Equal => Ordering::Equal,
                }
            }
        }
    }

    pub fn approx(&self) -> f64 {
        let sr = self.r.approx().sqrt();
        let ss = self.s.approx().sqrt();
        ratio_f64(&self.c[0])
            + ratio_f64(&self.c[1]) * sr
            + ratio_f64(&self.c[2]) * ss
            + ratio_f64(&self.c[3]) * sr * ss
    }

    /// Exact `⌊x⌋`, located from a floating estimate and corrected by exact
    /// comparisons.
    pub fn floor(&self) -> Z {
        let est = self.approx();
        let mut k = Z::from_f64_floor(est).unwrap_or_else(Z::zero);
        // move down until k ≤ x, then up while k + 1 ≤ x
        loop {
            let diff = self.clone() - Self::constant(Ratio::from_integer(k.clone()), self.r.clone(), self.s.clone());
            if diff.sign() == Ordering::Less {
                k = k - Z::one();
            } else {
                break;
            }
        }
        loop {
            let next = k.clone() + Z::one();
            let diff = self.clone()
                - Self::constant(Ratio::from_integer(next.clone()), self.r.clone(), self.s.clone());
            if diff.sign() != Ordering::Less {
                k = next;
            } else {
                break;
            }
        }
        k
    }

    pub fn is_negative(&self) -> bool {
        self.sign() == Ordering::Less
    }
}

impl<Z: Scalar> Add for BiSurd<Z> {
    type Output = BiSurd<Z>;
    fn add(self, rhs: Self) -> Self {
        debug_assert!(self.r == rhs.r && self.s == rhs.s);
        let [a0, a1, a2, a3] = self.c;
        let [b0, b1, b2, b3] = rhs.c;
        BiSurd {
            c: [a0 + b0, a1 + b1, a2 + b2, a3 + b3],
            r: self.r,
            s: self.s,
        }
    }
}

impl<Z: Scalar> Neg for BiSurd<Z> {
    type Output = BiSurd<Z>;
    fn neg(self) -> Self {
        BiSurd {
            c: self.c.map(|v| -v),
            r: self.r,
            s: self.s,
        }
    }
}

impl<Z: Scalar> Sub for BiSurd<Z> {
    type Output = BiSurd<Z>;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl<Z: Scalar> Mul for BiSurd<Z> {
    type Output = BiSurd<Z>;
    fn mul(self, rhs: Self) -> Self {
        debug_assert!(self.r == rhs.r && self.s == rhs.s);
        let r = Ratio::from_integer(self.r.clone());
        let s = Ratio::from_integer(self.s.clone());
        let [a0, a1, a2, a3] = self.c;
        let [b0, b1, b2, b3] = rhs.c;
        let c0 = a0.clone() * b0.clone()
            + a1.clone() * b1.clone() * r.clone()
            + a2.clone() * b2.clone() * s.clone()
            + a3.clone() * b3.clone() * r.clone() * s.clone();
        let c1 = a0.clone() * b1.clone()
            + a1.clone() * b0.clone()
            + (a2.clone() * b3.clone() + a3.clone() * b2.clone()) * s;
        let c2 = a0.clone() * b2.clone()
            + a2.clone() * b0.clone()
            + (a1.clone() * b3.clone() + a3.clone() * b1.clone()) * r;
        let c3 = a0 * b3 + a3 * b0 + a1 * b2 + a2 * b1;
        BiSurd {
            c: [c0, c1, c2, c3],
            r: self.r,
            s: self.s,
        }
    }
}

/// Sign of `a + b√δ` where `a`, `b`, `δ` are reals given only through their
/// signs and the sign of `a² − b²δ` (with `δ > 0`).
pub fn nested_sign(sa: Ordering, sb: Ordering, s_norm: Ordering) -> Ordering {
    match (sa, sb) {
        (Ordering::Equal, x) | (x, Ordering::Equal) => x,
        (x, y) if x == y => x,
        _ => match s_norm {
            Ordering::Greater => sa,
            Ordering::Less => sb,
            Ordering::Equal => Ordering::Equal,
        },
    }
}
