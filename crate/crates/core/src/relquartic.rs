//! The relative order `O_F[w]` with `w = (t + √Δ)/2` inside `K = F(√Δ)`.
//!
//! Elements are [`KElem`] pairs `a + b·w` with `a, b ∈ O_F`. Writing
//! `2α = A + b√Δ` with `A = Tr_{K/F}(α) = 2a + bt`, the four real embeddings
//! are `(ρᵢ(A) ± ρᵢ(b)√ρᵢ(Δ))/2`, and `α ≻ 0` exactly when `A ≻ 0` and
//! `N_{K/F}(α) = (A² − b²Δ)/4 ≻ 0` in `F`.

use std::cmp::Ordering;
use std::fmt;

use rayon::prelude::*;
use serde::de::Deserializer;
use serde::ser::{SerializeTuple, Serializer};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactfield::{Emb, Quad, QuadField};
use crate::scalar::{pad, Scalar};
use crate::surd::nested_sign;
use crate::Int;

/// `a + b·w`. Serializes as `[[a_m, a_n], [b_m, b_n]]`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct KElem<Z: Scalar = Int> {
    pub a: Quad<Z>,
    pub b: Quad<Z>,
}

impl<Z: Scalar> KElem<Z> {
    pub fn new(a: Quad<Z>, b: Quad<Z>) -> Self {
        KElem { a, b }
    }

    pub fn small(am: i64, an: i64, bm: i64, bn: i64) -> Self {
        KElem {
            a: Quad::small(am, an),
            b: Quad::small(bm, bn),
        }
    }

    pub fn from_base(a: Quad<Z>) -> Self {
        KElem { a, b: Quad::zero() }
    }

    pub fn one() -> Self {
        Self::from_base(Quad::one())
    }

    pub fn zero() -> Self {
        Self::from_base(Quad::zero())
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn to_big(&self) -> KElem<num_bigint::BigInt> {
        KElem {
            a: self.a.to_big(),
            b: self.b.to_big(),
        }
    }

    pub fn convert<W: Scalar>(&self) -> Option<KElem<W>> {
        Some(KElem {
            a: self.a.convert()?,
            b: self.b.convert()?,
        })
    }
}

impl<Z: Scalar> fmt::Display for KElem<Z> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.a, self.b)
    }
}

impl<Z: Scalar + Serialize> Serialize for KElem<Z> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut t = s.serialize_tuple(2)?;
        t.serialize_element(&self.a)?;
        t.serialize_element(&self.b)?;
        t.end()
    }
}

impl<'de, Z: Scalar + Deserialize<'de>> Deserialize<'de> for KElem<Z> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let (a, b) = <(Quad<Z>, Quad<Z>)>::deserialize(d)?;
        Ok(KElem { a, b })
    }
}

impl<Z: Scalar> std::ops::Add for &KElem<Z> {
    type Output = KElem<Z>;
    fn add(self, rhs: Self) -> KElem<Z> {
        KElem {
            a: &self.a + &rhs.a,
            b: &self.b + &rhs.b,
        }
    }
}

impl<Z: Scalar> std::ops::Sub for &KElem<Z> {
    type Output = KElem<Z>;
    fn sub(self, rhs: Self) -> KElem<Z> {
        KElem {
            a: &self.a - &rhs.a,
            b: &self.b - &rhs.b,
        }
    }
}

impl<Z: Scalar> std::ops::Neg for &KElem<Z> {
    type Output = KElem<Z>;
    fn neg(self) -> KElem<Z> {
        KElem {
            a: -&self.a,
            b: -&self.b,
        }
    }
}

/// `O_F[w]` for a totally positive non-square `Δ`.
#[derive(Clone, Debug)]
pub struct RelOrder<Z: Scalar = Int> {
    f: QuadField<Z>,
    delta: Quad<Z>,
    t: Quad<Z>,
    n: Quad<Z>,
}

/// Builds the order for `Δ`, choosing the unique `t ∈ U_F` with
/// `Δ ≡ t² (mod 4O_F)` and `n = (t² − Δ)/4`.
pub fn make_order<Z: Scalar>(f: &QuadField<Z>, delta: Quad<Z>) -> Result<RelOrder<Z>> {
    if !f.totally_positive(&delta) {
        return Err(Error::NotTotallyPositive);
    }
    let t = f.mod4_square_class(&delta).ok_or(Error::NoSquareClass)?;
    if f.sqrt(&delta).is_some() {
        return Err(Error::DegenerateSquare);
    }
    let n = (&f.square(&t) - &delta)
        .div_int(&Z::int(4))
        .expect("t² ≡ Δ (mod 4)");
    Ok(RelOrder {
        f: f.clone(),
        delta,
        t,
        n,
    })
}

impl<Z: Scalar> RelOrder<Z> {
    pub fn field(&self) -> &QuadField<Z> {
        &self.f
    }

    pub fn delta(&self) -> &Quad<Z> {
        &self.delta
    }

    /// `t = Tr_{K/F}(w)`.
    pub fn t(&self) -> &Quad<Z> {
        &self.t
    }

    /// `n = N_{K/F}(w)`.
    pub fn n(&self) -> &Quad<Z> {
        &self.n
    }

    pub fn w(&self) -> KElem<Z> {
        KElem::new(Quad::zero(), Quad::one())
    }

    /// `D² · N_{F/Q}(Δ)`.
    pub fn abs_disc(&self) -> Z {
        let d = self.f.disc().clone();
        d.clone() * d * self.f.norm(&self.delta)
    }

    pub fn mul(&self, x: &KElem<Z>, y: &KElem<Z>) -> KElem<Z> {
        let f = &self.f;
        let bd = f.mul(&x.b, &y.b);
        KElem {
            a: &f.mul(&x.a, &y.a) - &f.mul(&bd, &self.n),
            b: &(&f.mul(&x.a, &y.b) + &f.mul(&x.b, &y.a)) + &f.mul(&bd, &self.t),
        }
    }

    pub fn scale(&self, c: &Quad<Z>, x: &KElem<Z>) -> KElem<Z> {
        KElem {
            a: self.f.mul(c, &x.a),
            b: self.f.mul(c, &x.b),
        }
    }

    pub fn pow(&self, x: &KElem<Z>, k: u32) -> KElem<Z> {
        let mut acc = KElem::one();
        let mut base = x.clone();
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

    /// Relative conjugate `(a + bt) − bw`.
    pub fn conj(&self, x: &KElem<Z>) -> KElem<Z> {
        KElem {
            a: &x.a + &self.f.mul(&x.b, &self.t),
            b: -&x.b,
        }
    }

    /// `Tr_{K/F} = 2a + bt`.
    pub fn trace_f(&self, x: &KElem<Z>) -> Quad<Z> {
        &x.a.scale(&Z::int(2)) + &self.f.mul(&x.b, &self.t)
    }

    /// `N_{K/F} = a² + abt + b²n`.
    pub fn norm_f(&self, x: &KElem<Z>) -> Quad<Z> {
        let f = &self.f;
        let ab = f.mul(&x.a, &x.b);
        &(&f.square(&x.a) + &f.mul(&ab, &self.t)) + &f.mul(&f.square(&x.b), &self.n)
    }

    pub fn trace_q(&self, x: &KElem<Z>) -> Z {
        self.f.trace(&self.trace_f(x))
    }

    pub fn norm_q(&self, x: &KElem<Z>) -> Z {
        self.f.norm(&self.norm_f(x))
    }

    pub fn is_unit(&self, x: &KElem<Z>) -> bool {
        self.f.is_unit(&self.norm_f(x))
    }

    /// Inverse of a unit: `x̄ · N_{K/F}(x)⁻¹`.
    pub fn inverse(&self, x: &KElem<Z>) -> Option<KElem<Z>> {
        let ninv = self.f.inverse(&self.norm_f(x))?;
        Some(self.scale(&ninv, &self.conj(x)))
    }

    /// Embedding `j ∈ 0..4`: `j / 2` picks `ρ₁`/`ρ₂`, `j % 2` picks `+√Δ`/`−√Δ`.
    pub fn sign_quartic(&self, x: &KElem<Z>, j: usize) -> Ordering {
        let e = if j < 2 { Emb::First } else { Emb::Second };
        let big_a = self.trace_f(x);
        let sa = self.f.sign_at(&big_a, e);
        let mut sb = self.f.sign_at(&x.b, e);
        if j % 2 == 1 {
            sb = sb.reverse();
        }
        let sn = self.f.sign_at(&self.norm_f(x), e);
        nested_sign(sa, sb, sn)
    }

    pub fn totally_positive(&self, x: &KElem<Z>) -> bool {
        self.f.totally_positive(&self.trace_f(x)) && self.f.totally_positive(&self.norm_f(x))
    }

    pub fn totally_nonneg(&self, x: &KElem<Z>) -> bool {
        self.f.totally_nonneg(&self.trace_f(x)) && self.f.totally_nonneg(&self.norm_f(x))
    }

    /// `x ≻ y`.
    pub fn succ(&self, x: &KElem<Z>, y: &KElem<Z>) -> bool {
        self.totally_positive(&(x - y))
    }

    /// Floating values of the four embeddings (search ranges only).
    pub fn approx(&self, x: &KElem<Z>) -> [f64; 4] {
        let a = self.f.approx(&self.trace_f(x));
        let b = self.f.approx(&x.b);
        let dl = self.delta_sqrt_f64();
        [
            (a[0] + b[0] * dl[0]) / 2.0,
            (a[0] - b[0] * dl[0]) / 2.0,
            (a[1] + b[1] * dl[1]) / 2.0,
            (a[1] - b[1] * dl[1]) / 2.0,
        ]
    }

    /// `√ρᵢ(Δ)` as floats.
    pub fn delta_sqrt_f64(&self) -> [f64; 2] {
        let d = self.f.approx(&self.delta);
        [d[0].sqrt(), d[1].sqrt()]
    }

    /// Canonical ordering key: trace first, then coordinates.
    pub fn sort_key(&self, x: &KElem<Z>) -> (Z, KElem<Z>) {
        (self.trace_q(x), x.clone())
    }

    /// Every totally positive element with `Tr_{K/Q} ≤ tmax`, sorted by
    /// trace then coordinates.
    pub fn enumerate_tp_by_trace(&self, tmax: &Z) -> Vec<KElem<Z>> {
        self.tp_filtered(tmax, |_| true)
    }

    /// Like [`enumerate_tp_by_trace`](Self::enumerate_tp_by_trace), keeping
    /// only elements accepted by `keep`.
    pub fn tp_filtered<P>(&self, tmax: &Z, keep: P) -> Vec<KElem<Z>>
    where
        P: Fn(&KElem<Z>) -> bool + Sync,
    {
        let mut out = self.scan_tp(tmax.approx(), |b, bounds| self.rows_for_b(b, bounds, tmax, &keep));
        out.sort_by_cached_key(|x| self.sort_key(x));
        out
    }

    /// Candidate `b` for trace at most `tf`: `|ρ₁(b)|√δ₁ + |ρ₂(b)|√δ₂ < tf`.
    fn scan_tp<R>(&self, tf: f64, per_b: R) -> Vec<KElem<Z>>
    where
        R: Fn(&Quad<Z>, [f64; 2]) -> Vec<KElem<Z>> + Sync,
    {
        if tf < 4.0 {
            return Vec::new();
        }
        let sd = self.delta_sqrt_f64();
        let p = pad(tf);
        let bs = self.f.box_filter(
            [-tf / sd[0], -tf / sd[1]],
            [tf / sd[0], tf / sd[1]],
            |b| {
                let r = self.f.approx(&b);
                let l = [r[0].abs() * sd[0], r[1].abs() * sd[1]];
                (l[0] + l[1] <= tf + p).then_some((b, l))
            },
        );
        bs.par_iter().flat_map_iter(|(b, l)| per_b(b, *l)).collect()
    }

    /// For fixed `b`, the elements `a + bw` with `A = 2a + bt`,
    /// `ρᵢ(A) > |ρᵢ(b)|√δᵢ` and `Tr A ≤ tmax`.
    fn rows_for_b<P>(&self, b: &Quad<Z>, l: [f64; 2], tmax: &Z, keep: &P) -> Vec<KElem<Z>>
    where
        P: Fn(&KElem<Z>) -> bool,
    {
        let f = &self.f;
        let tf = tmax.approx();
        let sd = f.sqrt_d_f64();
        let rt = f.rho_tau_f64();
        let s = f.s().approx();
        let bt = f.mul(b, &self.t);
        let two = Z::int(2);
        let par_y = bt.n.mod_floor(&two);
        let par_x = bt.m.mod_floor(&two);
        let p = pad(tf + l[0] + l[1]);
        let y_lo = ((2.0 * l[0] - tf) / sd - p).ceil();
        let y_hi = ((tf - 2.0 * l[1]) / sd + p).floor();
        let mut out = Vec::new();
        let mut y = y_lo;
        while y <= y_hi {
            let yz = Z::from_f64_floor(y).expect("row fits");
            if yz.mod_floor(&two) != par_y {
                y += 1.0;
                continue;
            }
            let x_lo = ((l[0] - y * rt[0]).max(l[1] - y * rt[1]) - p).ceil();
            let x_hi = ((tf - y * s) / 2.0 + p).floor();
            let mut x = x_lo;
            while x <= x_hi {
                let xz = Z::from_f64_floor(x).expect("column fits");
                if xz.mod_floor(&two) == par_x {
                    let c = Quad::new(xz, yz.clone());
                    let a = (&c - &bt).div_int(&two).expect("parity");
                    let e = KElem::new(a, b.clone());
                    if &self.trace_q(&e) <= tmax && self.totally_positive(&e) && keep(&e) {
                        out.push(e);
                    }
                }
                x += 1.0;
            }
            y += 1.0;
        }
        out
    }

    /// `m + w ≻ 0`.
    pub fn shift_is_tp(&self, m: &Quad<Z>) -> bool {
        self.totally_positive(&KElem::new(m.clone(), Quad::one()))
    }

    /// Lower bounds `λᵢ = (−ρᵢ(t) + √ρᵢ(Δ))/2` for `ρᵢ(m)` (floats).
    fn shift_bounds(&self) -> [f64; 2] {
        let t = self.f.approx(&self.t);
        let sd = self.delta_sqrt_f64();
        [(-t[0] + sd[0]) / 2.0, (-t[1] + sd[1]) / 2.0]
    }

    /// The `m ∈ O_F` with `m + w ≻ 0`, ordered by `Tr_{F/Q}(m)` and then by
    /// `ρ₁(m)`.
    pub fn tp_shifts(&self) -> TpShifts<'_, Z> {
        let lam = self.shift_bounds();
        let start = (lam[0] + lam[1] - pad(lam[0].abs() + lam[1].abs())).floor();
        TpShifts {
            order: self,
            lam,
            trace: Z::from_f64_floor(start).expect("trace fits"),
            buf: Vec::new(),
        }
    }
}

/// Iterator returned by [`RelOrder::tp_shifts`].
pub struct TpShifts<'a, Z: Scalar> {
    order: &'a RelOrder<Z>,
    lam: [f64; 2],
    trace: Z,
    buf: Vec<Quad<Z>>,
}

impl<Z: Scalar> TpShifts<'_, Z> {
    fn fill(&mut self) {
        let f = self.order.field();
        let tr = self.trace.approx();
        let sd = f.sqrt_d_f64();
        let p = pad(tr.abs() + self.lam[0].abs() + self.lam[1].abs());
        let y_lo = ((2.0 * self.lam[0] - tr) / sd - p).ceil();
        let y_hi = ((tr - 2.0 * self.lam[1]) / sd + p).floor();
        let two = Z::int(2);
        let mut y = y_lo;
        let mut found = Vec::new();
        while y <= y_hi {
            let yz = Z::from_f64_floor(y).expect("row fits");
            let num = self.trace.clone() - yz.clone() * f.s().clone();
            if num.is_multiple_of(&two) {
                let m = Quad::new(num / two.clone(), yz);
                if self.order.shift_is_tp(&m) {
                    found.push(m);
                }
            }
            y += 1.0;
        }
        found.reverse();
        self.buf = found;
        self.trace = self.trace.clone() + Z::one();
    }
}

impl<Z: Scalar> Iterator for TpShifts<'_, Z> {
    type Item = Quad<Z>;

    fn next(&mut self) -> Option<Quad<Z>> {
        while self.buf.is_empty() {
            self.fill();
        }
        self.buf.pop()
    }
}

/// Ordering key used for `m` in [`RelOrder::tp_shifts`]; exposed for checks.
pub fn shift_order_key<Z: Scalar>(f: &QuadField<Z>, m: &Quad<Z>) -> (Z, Z) {
    (f.trace(m), m.n.clone())
}
