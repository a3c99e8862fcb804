//! Real quadratic fields `F = Q(√D)` and their integers `O_F = Z + Zτ`.
//!
//! Integral elements are [`Quad`] pairs `(m, n)` meaning `m + nτ`, with
//! `τ = (1+√D)/2` when `D ≡ 1 (mod 4)` and `τ = √D/2` otherwise. Everything
//! else (embeddings, signs, traces) is derived from the doubled coordinates
//! `2α = X + Y√D`, which are integers, so signs reduce to comparing `X²`
//! with `Y²D`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::de::Deserializer;
use serde::ser::{SerializeTuple, Serializer};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{floor_surd, is_fundamental_discriminant, pad, sign_surd, Scalar};
use crate::surd::Surd;
use crate::Int;

/// One of the two real embeddings `ρ₁` (`√D ↦ +√D`) and `ρ₂`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Emb {
    First,
    Second,
}

impl Emb {
    pub const BOTH: [Emb; 2] = [Emb::First, Emb::Second];

    pub fn index(self) -> usize {
        match self {
            Emb::First => 0,
            Emb::Second => 1,
        }
    }
}

/// `m + nτ ∈ O_F`. Serializes as `[m, n]`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Quad<Z: Scalar = Int> {
    pub m: Z,
    pub n: Z,
}

impl<Z: Scalar> Quad<Z> {
    pub fn new(m: Z, n: Z) -> Self {
        Quad { m, n }
    }

    pub fn int(v: Z) -> Self {
        Quad { m: v, n: Z::zero() }
    }

    pub fn small(m: i64, n: i64) -> Self {
        Quad {
            m: Z::int(m),
            n: Z::int(n),
        }
    }

    pub fn zero() -> Self {
        Self::int(Z::zero())
    }

    pub fn one() -> Self {
        Self::int(Z::one())
    }

    pub fn is_zero(&self) -> bool {
        self.m.is_zero() && self.n.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.n.is_zero()
    }

    pub fn scale(&self, k: &Z) -> Self {
        Quad {
            m: self.m.clone() * k.clone(),
            n: self.n.clone() * k.clone(),
        }
    }

    /// `self / k` when both coordinates are divisible by `k`.
    pub fn div_int(&self, k: &Z) -> Option<Self> {
        (self.m.is_multiple_of(k) && self.n.is_multiple_of(k)).then(|| Quad {
            m: self.m.clone() / k.clone(),
            n: self.n.clone() / k.clone(),
        })
    }

    pub fn to_big(&self) -> Quad<BigInt> {
        Quad {
            m: self.m.to_bigint(),
            n: self.n.to_bigint(),
        }
    }

    pub fn from_big(v: &Quad<BigInt>) -> Option<Self> {
        Some(Quad {
            m: Z::from_bigint(&v.m)?,
            n: Z::from_bigint(&v.n)?,
        })
    }

    pub fn convert<W: Scalar>(&self) -> Option<Quad<W>> {
        Quad::from_big(&self.to_big())
    }
}

impl<Z: Scalar> fmt::Display for Quad<Z> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.m, self.n)
    }
}

impl<Z: Scalar + Serialize> Serialize for Quad<Z> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut t = s.serialize_tuple(2)?;
        t.serialize_element(&self.m)?;
        t.serialize_element(&self.n)?;
        t.end()
    }
}

impl<'de, Z: Scalar + Deserialize<'de>> Deserialize<'de> for Quad<Z> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let (m, n) = <(Z, Z)>::deserialize(d)?;
        Ok(Quad { m, n })
    }
}

impl<Z: Scalar> Add for Quad<Z> {
    type Output = Quad<Z>;
    fn add(self, rhs: Self) -> Self {
        Quad {
            m: self.m + rhs.m,
            n: self.n + rhs.n,
        }
    }
}

impl<'a, Z: Scalar> Add for &'a Quad<Z> {
    type Output = Quad<Z>;
    fn add(self, rhs: Self) -> Quad<Z> {
        Quad {
            m: self.m.clone() + rhs.m.clone(),
            n: self.n.clone() + rhs.n.clone(),
        }
    }
}

impl<Z: Scalar> Sub for Quad<Z> {
    type Output = Quad<Z>;
    fn sub(self, rhs: Self) -> Self {
        Quad {
            m: self.m - rhs.m,
            n: self.n - rhs.n,
        }
    }
}

impl<'a, Z: Scalar> Sub for &'a Quad<Z> {
    type Output = Quad<Z>;
    fn sub(self, rhs: Self) -> Quad<Z> {
        Quad {
            m: self.m.clone() - rhs.m.clone(),
            n: self.n.clone() - rhs.n.clone(),
        }
    }
}

impl<Z: Scalar> Neg for Quad<Z> {
    type Output = Quad<Z>;
    fn neg(self) -> Self {
        Quad {
            m: -self.m,
            n: -self.n,
        }
    }
}

impl<'a, Z: Scalar> Neg for &'a Quad<Z> {
    type Output = Quad<Z>;
    fn neg(self) -> Quad<Z> {
        Quad {
            m: -self.m.clone(),
            n: -self.n.clone(),
        }
    }
}

/// A general element `x + y√D` of `F` with rational coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QElem<Z: Scalar = Int> {
    pub x: Ratio<Z>,
    pub y: Ratio<Z>,
}

impl<Z: Scalar> QElem<Z> {
    pub fn new(x: Ratio<Z>, y: Ratio<Z>) -> Self {
        QElem { x, y }
    }

    pub fn from_ints(x: i64, y: i64) -> Self {
        QElem {
            x: Ratio::from_integer(Z::int(x)),
            y: Ratio::from_integer(Z::int(y)),
        }
    }
}

/// How `τ` is chosen.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TauKind {
    /// `D ≡ 1 (mod 4)`, `τ = (1+√D)/2`.
    HalfOnePlusRoot,
    /// `D ≡ 0 (mod 4)`, `τ = √(D/4)`.
    RootQuarter,
}

#[derive(Clone, Debug)]
pub struct QuadField<Z: Scalar = Int> {
    d: Z,
    s: Z,
    c0: Z,
    sqrt_d: f64,
    rho_tau: [f64; 2],
    eps_fund_big: Quad<BigInt>,
    eps_norm: i8,
    eps_fund: Option<Quad<Z>>,
    eps_square: Option<Quad<Z>>,
}

/// Builds `Q(√D)` for a fundamental discriminant `D ≥ 5`.
pub fn make_field<Z: Scalar>(d: Z) -> Result<QuadField<Z>> {
    QuadField::new(d)
}

impl<Z: Scalar> QuadField<Z> {
    pub fn new(d: Z) -> Result<Self> {
        if d < Z::int(5) || !is_fundamental_discriminant(&d) {
            return Err(Error::NotFundamental(d.to_string()));
        }
        let four = Z::int(4);
        let (s, c0) = if d.mod_floor(&four) == Z::one() {
            (Z::one(), (d.clone() - Z::one()) / four)
        } else {
            (Z::zero(), d.clone() / four)
        };
        let sqrt_d = d.approx().sqrt();
        let sf = s.approx();
        let rho_tau = [(sf + sqrt_d) / 2.0, (sf - sqrt_d) / 2.0];
        let (eps_fund_big, eps_norm) = fundamental_unit(&d.to_bigint(), &s.to_bigint(), &c0.to_bigint());
        let mut f = QuadField {
            d,
            s,
            c0,
            sqrt_d,
            rho_tau,
            eps_fund_big,
            eps_norm,
            eps_fund: None,
            eps_square: None,
        };
        f.eps_fund = Quad::from_big(&f.eps_fund_big);
        f.eps_square = f.eps_fund.as_ref().and_then(|e| f.checked_square(e));
        Ok(f)
    }

    /// The discriminant `D`.
    pub fn disc(&self) -> &Z {
        &self.d
    }

    /// `Tr τ` (1 or 0).
    pub fn s(&self) -> &Z {
        &self.s
    }

    /// `τ² = sτ + c₀`.
    pub fn c0(&self) -> &Z {
        &self.c0
    }

    pub fn tau_kind(&self) -> TauKind {
        if self.s.is_one() {
            TauKind::HalfOnePlusRoot
        } else {
            TauKind::RootQuarter
        }
    }

    pub fn tau(&self) -> Quad<Z> {
        Quad::new(Z::zero(), Z::one())
    }

    pub fn sqrt_d_f64(&self) -> f64 {
        self.sqrt_d
    }

    pub fn rho_tau_f64(&self) -> [f64; 2] {
        self.rho_tau
    }

    pub fn mul(&self, a: &Quad<Z>, b: &Quad<Z>) -> Quad<Z> {
        let nn = a.n.clone() * b.n.clone();
        Quad {
            m: a.m.clone() * b.m.clone() + nn.clone() * self.c0.clone(),
            n: a.m.clone() * b.n.clone() + a.n.clone() * b.m.clone() + nn * self.s.clone(),
        }
    }

    fn checked_square(&self, a: &Quad<Z>) -> Option<Quad<Z>> {
        let big = BigField::new_unchecked(&self.d.to_bigint());
        Quad::from_big(&big.mul(&a.to_big(), &a.to_big()))
    }

    pub fn square(&self, a: &Quad<Z>) -> Quad<Z> {
        self.mul(a, a)
    }

    pub fn pow(&self, a: &Quad<Z>, k: u32) -> Quad<Z> {
        let mut acc = Quad::one();
        let mut base = a.clone();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(&base, &base);
            }
        }
        acc
    }

    /// Galois conjugate: `m + nτ ↦ (m + ns) − nτ`.
    pub fn conj(&self, a: &Quad<Z>) -> Quad<Z> {
        Quad {
            m: a.m.clone() + a.n.clone() * self.s.clone(),
            n: -a.n.clone(),
        }
    }

    pub fn norm(&self, a: &Quad<Z>) -> Z {
        a.m.clone() * a.m.clone() + a.m.clone() * a.n.clone() * self.s.clone()
            - a.n.clone() * a.n.clone() * self.c0.clone()
    }

    pub fn trace(&self, a: &Quad<Z>) -> Z {
        Z::int(2) * a.m.clone() + a.n.clone() * self.s.clone()
    }

    /// `(X, Y)` with `2α = X + Y√D`.
    pub fn doubled(&self, a: &Quad<Z>) -> (Z, Z) {
        (self.trace(a), a.n.clone())
    }

    /// Inverse of [`doubled`](Self::doubled); `None` if `(X + Y√D)/2 ∉ O_F`.
    pub fn from_doubled(&self, x: &Z, y: &Z) -> Option<Quad<Z>> {
        let two = Z::int(2);
        let t = x.clone() - y.clone() * self.s.clone();
        t.is_multiple_of(&two).then(|| Quad::new(t / two, y.clone()))
    }

    pub fn to_qelem(&self, a: &Quad<Z>) -> QElem<Z> {
        let (x, y) = self.doubled(a);
        let two = Z::int(2);
        QElem {
            x: Ratio::new(x, two.clone()),
            y: Ratio::new(y, two),
        }
    }

    /// Integral coordinates of `x + y√D`; [`Error::NotIntegral`] otherwise.
    pub fn from_qelem(&self, e: &QElem<Z>) -> Result<Quad<Z>> {
        let two = Ratio::from_integer(Z::int(2));
        let x2 = e.x.clone() * two.clone();
        let y2 = e.y.clone() * two;
        if !x2.is_integer() || !y2.is_integer() {
            return Err(Error::NotIntegral);
        }
        self.from_doubled(&x2.to_integer(), &y2.to_integer())
            .ok_or(Error::NotIntegral)
    }

    /// Exact value `ρᵢ(α)`.
    pub fn rho(&self, a: &Quad<Z>, e: Emb) -> Surd<Z> {
        let (x, y) = self.doubled(a);
        let y = if e == Emb::First { y } else { -y };
        let two = Z::int(2);
        Surd::new(Ratio::new(x, two.clone()), Ratio::new(y, two), self.d.clone())
    }

    pub fn rho_q(&self, a: &QElem<Z>, e: Emb) -> Surd<Z> {
        let y = if e == Emb::First {
            a.y.clone()
        } else {
            -a.y.clone()
        };
        Surd::new(a.x.clone(), y, self.d.clone())
    }

    pub fn sign_at(&self, a: &Quad<Z>, e: Emb) -> Ordering {
        let (x, y) = self.doubled(a);
        match e {
            Emb::First => sign_surd(&x, &y, &self.d),
            Emb::Second => sign_surd(&x, &-y, &self.d),
        }
    }

    pub fn sign_q(&self, a: &QElem<Z>, e: Emb) -> Ordering {
        self.rho_q(a, e).sign()
    }

    pub fn totally_positive(&self, a: &Quad<Z>) -> bool {
        Emb::BOTH
            .iter()
            .all(|&e| self.sign_at(a, e) == Ordering::Greater)
    }

    pub fn totally_nonneg(&self, a: &Quad<Z>) -> bool {
        Emb::BOTH
            .iter()
            .all(|&e| self.sign_at(a, e) != Ordering::Less)
    }

    pub fn totally_positive_q(&self, a: &QElem<Z>) -> bool {
        Emb::BOTH
            .iter()
            .all(|&e| self.sign_q(a, e) == Ordering::Greater)
    }

    pub fn totally_nonneg_q(&self, a: &QElem<Z>) -> bool {
        Emb::BOTH
            .iter()
            .all(|&e| self.sign_q(a, e) != Ordering::Less)
    }

    /// `a ⪰ b`.
    pub fn succeq(&self, a: &Quad<Z>, b: &Quad<Z>) -> bool {
        self.totally_nonneg(&(a - b))
    }

    /// `a ≻ b`.
    pub fn succ(&self, a: &Quad<Z>, b: &Quad<Z>) -> bool {
        self.totally_positive(&(a - b))
    }

    /// Floating embeddings, for search ranges only.
    pub fn approx(&self, a: &Quad<Z>) -> [f64; 2] {
        let (x, y) = self.doubled(a);
        let (x, y) = (x.approx(), y.approx());
        let r1 = (x + y * self.sqrt_d) / 2.0;
        let r2 = (x - y * self.sqrt_d) / 2.0;
        // recover the smaller conjugate from the norm to avoid cancellation
        let n = self.norm(a).approx();
        if r1.abs() >= r2.abs() {
            [r1, if r1 != 0.0 { n / r1 } else { r2 }]
        } else {
            [n / r2, r2]
        }
    }

    pub fn is_unit(&self, a: &Quad<Z>) -> bool {
        self.norm(a).abs().is_one()
    }

    pub fn inverse(&self, a: &Quad<Z>) -> Option<Quad<Z>> {
        let n = self.norm(a);
        if !n.abs().is_one() {
            return None;
        }
        Some(self.conj(a).scale(&n))
    }

    /// `a / b` if the quotient is integral.
    pub fn div_exact(&self, a: &Quad<Z>, b: &Quad<Z>) -> Option<Quad<Z>> {
        let n = self.norm(b);
        if n.is_zero() {
            return None;
        }
        self.mul(a, &self.conj(b)).div_int(&n)
    }

    /// Square root in `O_F`, if `a` is a square.
    pub fn sqrt(&self, a: &Quad<Z>) -> Option<Quad<Z>> {
        if !self.totally_nonneg(a) {
            return None;
        }
        if a.is_zero() {
            return Some(Quad::zero());
        }
        // s = (x + y√D)/2 with s² = a: x² + y²D = 2X, xy = Y, x² − y²D = ±4√N(a)
        let big_x = self.trace(a);
        let k = crate::scalar::is_square(&self.norm(a))?;
        let two_k = Z::int(2) * k;
        for sgn in [Z::one(), -Z::one()] {
            let x2 = big_x.clone() + sgn.clone() * two_k.clone();
            let yd = big_x.clone() - sgn * two_k.clone();
            if x2.is_negative() || yd.is_negative() || !yd.is_multiple_of(&self.d) {
                continue;
            }
            let (Some(x), Some(y)) = (
                crate::scalar::is_square(&x2),
                crate::scalar::is_square(&(yd / self.d.clone())),
            ) else {
                continue;
            };
            for (xs, ys) in [(x.clone(), y.clone()), (x.clone(), -y.clone())] {
                if let Some(s) = self.from_doubled(&xs, &ys) {
                    if &self.square(&s) == a {
                        return Some(s);
                    }
                }
            }
        }
        None
    }

    /// The residue system `{0, 1, τ, 1+τ}` of `O_F/2O_F`.
    pub fn u_set(&self) -> [Quad<Z>; 4] {
        [
            Quad::small(0, 0),
            Quad::small(1, 0),
            Quad::small(0, 1),
            Quad::small(1, 1),
        ]
    }

    /// The unique `t ∈ U_F` with `a ≡ t² (mod 4O_F)`, if any.
    pub fn mod4_square_class(&self, a: &Quad<Z>) -> Option<Quad<Z>> {
        let four = Z::int(4);
        self.u_set().into_iter().find(|u| {
            let r = a - &self.square(u);
            r.m.is_multiple_of(&four) && r.n.is_multiple_of(&four)
        })
    }

    pub fn mod4_square_class_q(&self, a: &QElem<Z>) -> Result<Option<Quad<Z>>> {
        Ok(self.mod4_square_class(&self.from_qelem(a)?))
    }

    /// `l_F = √D/2 + 1`.
    pub fn l_f(&self) -> Surd<Z> {
        Surd::new(
            Ratio::one(),
            Ratio::new(Z::one(), Z::int(2)),
            self.d.clone(),
        )
    }

    /// An element with `x ≤ ρ₁(α) < x + l_F` and `y ≤ ρ₂(α) < y + l_F`.
    ///
    /// First `k` puts `x − y − k√D` in `(−√D/2, √D/2]`, then `m` puts
    /// `x + y − k·s − 2m` in `(−√D/2 − 2, −√D/2]`; `α = m + kτ`.
    pub fn round_to_box(&self, x: &Ratio<Z>, y: &Ratio<Z>) -> Quad<Z> {
        let half = Ratio::new(Z::one(), Z::int(2));
        let dd = Ratio::from_integer(self.d.clone());
        let k = Surd::new(-half.clone(), (x.clone() - y.clone()) / dd, self.d.clone()).ceil();
        let sum = x.clone() + y.clone() - Ratio::from_integer(k.clone() * self.s.clone());
        let m = Surd::new(sum * half.clone(), half.clone() * half, self.d.clone()).ceil();
        Quad::new(m, k)
    }

    /// Exact check of the `round_to_box` postcondition.
    pub fn in_box(&self, a: &Quad<Z>, x: &Ratio<Z>, y: &Ratio<Z>) -> bool {
        let l = self.l_f();
        [(Emb::First, x), (Emb::Second, y)].into_iter().all(|(e, lo)| {
            let v = self.rho(a, e) - Surd::rational(lo.clone(), self.d.clone());
            v.sign() != Ordering::Less && (v - l.clone()).sign() == Ordering::Less
        })
    }

    pub fn eps_fund_big(&self) -> &Quad<BigInt> {
        &self.eps_fund_big
    }

    /// `N(ε_F)`, `±1`.
    pub fn eps_fund_norm(&self) -> i8 {
        self.eps_norm
    }

    pub fn eps_fund(&self) -> Result<&Quad<Z>> {
        self.eps_fund.as_ref().ok_or(Error::UnitTooLarge)
    }

    pub fn eps_square(&self) -> Result<&Quad<Z>> {
        self.eps_square.as_ref().ok_or(Error::UnitTooLarge)
    }

    /// `γ = ρ₁(ε²)`.
    pub fn gamma(&self) -> Result<Surd<Z>> {
        Ok(self.rho(self.eps_square()?, Emb::First))
    }

    pub fn gamma_f64(&self) -> f64 {
        let e = BigField::new_unchecked(&self.d.to_bigint());
        let v = e.approx(&self.eps_fund_big)[0];
        v * v
    }

    /// `1/γ ≤ ρ₁(α)/ρ₂(α) < γ`, decided through `ρ₁(εα − ᾱ) ≥ 0` and
    /// `ρ₁(εᾱ − α) > 0` (mixed products `γ·ρ₂(α)` are `ρ₁(ε·ᾱ)`).
    pub fn in_fundamental_domain(&self, a: &Quad<Z>) -> Result<bool> {
        if !self.totally_positive(a) {
            return Err(Error::NotTotallyPositive);
        }
        let eps = self.eps_square()?;
        let abar = self.conj(a);
        let lower = &self.mul(eps, a) - &abar;
        let upper = &self.mul(eps, &abar) - a;
        Ok(self.sign_at(&lower, Emb::First) != Ordering::Less
            && self.sign_at(&upper, Emb::First) == Ordering::Greater)
    }

    /// Visits, in parallel, every `α ∈ O_F` whose embeddings lie in
    /// `[lo₁, hi₁] × [lo₂, hi₂]` (a padded superset; callers filter exactly),
    /// keeping the values `f` maps to `Some`. Very elongated boxes are first
    /// rebalanced by a power of the fundamental unit.
    pub fn box_filter<T, Fun>(&self, lo: [f64; 2], hi: [f64; 2], f: Fun) -> Vec<T>
    where
        T: Send,
        Fun: Fn(Quad<Z>) -> Option<T> + Sync,
    {
        if !(lo[0] <= hi[0] && lo[1] <= hi[1]) {
            return Vec::new();
        }
        let scale = lo[0].abs().max(hi[0].abs()).max(lo[1].abs()).max(hi[1].abs());
        let p = pad(scale);
        let (mut lo, mut hi) = ([lo[0] - p, lo[1] - p], [hi[0] + p, hi[1] + p]);
        let w = [hi[0] - lo[0], hi[1] - lo[1]];
        let mut back: Option<Quad<Z>> = None;
        if let Ok(eps) = self.eps_fund() {
            let e1 = self.approx(eps)[0];
            let k = ((w[0] / w[1]).ln() / (2.0 * e1.ln())).round();
            if k.is_finite() && k.abs() >= 1.0 {
                let k = k as i64;
                // β = α·ε^{-k}: ρ₁ scales by e1^{-k}, ρ₂ by (N/e1)^{-k}
                let e2 = self.eps_norm as f64 / e1;
                let s1 = e1.powi(-k as i32);
                let s2 = e2.powi(-k as i32);
                let (a1, b1) = (lo[0] * s1, hi[0] * s1);
                let (a2, b2) = if s2 > 0.0 {
                    (lo[1] * s2, hi[1] * s2)
                } else {
                    (hi[1] * s2, lo[1] * s2)
                };
                let sc = a1.abs().max(b1.abs()).max(a2.abs()).max(b2.abs());
                let q = pad(sc) + 1e-9 * (b1 - a1).max(b2 - a2);
                lo = [a1 - q, a2 - q];
                hi = [b1 + q, b2 + q];
                let unit = if k > 0 {
                    eps.clone()
                } else {
                    self.inverse(eps).expect("unit")
                };
                back = Some(self.pow(&unit, k.unsigned_abs() as u32));
            }
        }
        let rt = self.rho_tau;
        let y_lo = ((lo[0] - hi[1]) / self.sqrt_d).ceil();
        let y_hi = ((hi[0] - lo[1]) / self.sqrt_d).floor();
        if y_lo > y_hi {
            return Vec::new();
        }
        let rows = (y_hi - y_lo) as u64 + 1;
        const CHUNK: u64 = 1 << 12;
        let chunks = rows.div_ceil(CHUNK);
        (0..chunks)
            .into_par_iter()
            .flat_map_iter(|c| {
                let mut out = Vec::new();
                let start = c * CHUNK;
                let end = (start + CHUNK).min(rows);
                for i in start..end {
                    let y = y_lo + i as f64;
                    let x_lo = (lo[0] - y * rt[0]).max(lo[1] - y * rt[1]).ceil();
                    let x_hi = (hi[0] - y * rt[0]).min(hi[1] - y * rt[1]).floor();
                    if x_lo > x_hi {
                        continue;
                    }
                    let yz = Z::from_f64_floor(y).expect("row index fits the scalar");
                    let mut x = x_lo;
                    while x <= x_hi {
                        let xz = Z::from_f64_floor(x).expect("column index fits the scalar");
                        let beta = Quad::new(xz, yz.clone());
                        let alpha = match &back {
                            Some(u) => self.mul(&beta, u),
                            None => beta,
                        };
                        if let Some(v) = f(alpha) {
                            out.push(v);
                        }
                        x += 1.0;
                    }
                }
                out
            })
            .collect()
    }

    /// All elements in the (padded) box, sorted.
    pub fn box_points(&self, lo: [f64; 2], hi: [f64; 2]) -> Vec<Quad<Z>> {
        let mut v = self.box_filter(lo, hi, Some);
        v.sort();
        v.dedup();
        v
    }
}

impl QuadField<BigInt> {
    /// Arithmetic-only field data; the unit is not computed.
    fn new_unchecked(d: &BigInt) -> Self {
        let four = BigInt::from(4);
        let (s, c0) = if d.mod_floor(&four).is_one() {
            (BigInt::one(), (d - 1) / &four)
        } else {
            (BigInt::zero(), d / &four)
        };
        let sqrt_d = d.approx().sqrt();
        let sf = s.approx();
        QuadField {
            d: d.clone(),
            s,
            c0,
            sqrt_d,
            rho_tau: [(sf + sqrt_d) / 2.0, (sf - sqrt_d) / 2.0],
            eps_fund_big: Quad::one(),
            eps_norm: 1,
            eps_fund: None,
            eps_square: None,
        }
    }
}

/// Fundamental unit `> 1` and its norm, from the continued fraction of `τ`.
///
/// The convergents `p/q` of `τ` make `p − qτ` tiny; the first one of norm
/// `±1` gives the fundamental unit as the conjugate `(p − qs) + qτ`.
fn fundamental_unit(d: &BigInt, s: &BigInt, c0: &BigInt) -> (Quad<BigInt>, i8) {
    // τ = (P + √R)/Q
    let (r, mut p, mut q) = if s.is_one() {
        (d.clone(), BigInt::one(), BigInt::from(2))
    } else {
        (d / 4, BigInt::zero(), BigInt::one())
    };
    let (mut p1, mut p2) = (BigInt::one(), BigInt::zero());
    let (mut q1, mut q2) = (BigInt::zero(), BigInt::one());
    loop {
        let a = floor_surd(&p, &BigInt::one(), &r, &q);
        let pk = &a * &p1 + &p2;
        let qk = &a * &q1 + &q2;
        let norm = &pk * &pk - &pk * &qk * s - &qk * &qk * c0;
        if norm.abs().is_one() {
            let unit = Quad::new(&pk - &qk * s, qk);
            let sign = if norm.is_positive() { 1 } else { -1 };
            return (unit, sign);
        }
        p2 = std::mem::replace(&mut p1, pk);
        q2 = std::mem::replace(&mut q1, qk);
        let p_next = &a * &q - &p;
        let q_next = (&r - &p_next * &p_next) / &q;
        p = p_next;
        q = q_next;
    }
}

type BigField = QuadField<BigInt>;
