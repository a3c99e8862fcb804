//! Extensions `K = F(√e)` with `gcd(D_F, D_{Q(√e)}) = 1`.
//!
//! Here `O_K = O_F + O_F·ω_e`, and for `e ≠ 5` the element `n_e + ω_e` is
//! never `F`-representable. For `e = 5` and `D_F ≥ 4077` an explicit
//! non-representable `a + b·φ` (`φ = (1+√5)/2`) is constructed from exact
//! floors in `Q(√5, √D)`. Every witness is re-checked by the generic
//! total-positivity test and representability solver.

use std::cmp::Ordering;

use num_integer::{Integer, Roots};
use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactfield::{Emb, Quad, QuadField};
use crate::relquartic::{make_order, KElem, RelOrder};
use crate::reptest::{f_representable, RepResult};
use crate::scalar::{gcd_z, is_fundamental_discriminant, is_squarefree};
use crate::surd::BiSurd;
use crate::Int;

/// `F(√e)` with its ring of integers written as the order `O_F[ω_e]`.
#[derive(Clone, Debug)]
pub struct SqrtEContext {
    pub e: Int,
    /// `D_{Q(√e)}`: `e` if `e ≡ 1 (mod 4)`, else `4e`.
    pub delta_e: Int,
    pub order: RelOrder,
}

/// Checks the coprimality hypothesis and builds `O_F[ω_e]`.
pub fn compositum_check(f: &QuadField, e: Int) -> Result<SqrtEContext> {
    if e <= 1 {
        return Err(Error::PreconditionFailed(format!("e = {e} must exceed 1")));
    }
    if !is_squarefree(&e) {
        return Err(Error::NotSquarefree(e.to_string()));
    }
    let (delta_e, t) = if e.mod_floor(&4) == 1 { (e, 1) } else { (4 * e, 0) };
    if gcd_z(f.disc(), &delta_e) != 1 {
        return Err(Error::NotCoprime(f.disc().to_string(), delta_e.to_string()));
    }
    let order = make_order(f, Quad::int(delta_e))?;
    // w = (t + √Δ_e)/2 must be ω_e itself
    if order.t() != &Quad::int(t) {
        return Err(Error::PreconditionFailed(format!("unexpected square class {} for {delta_e}", order.t())));
    }
    Ok(SqrtEContext { e, delta_e, order })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SqrtEWitness {
    pub e: Int,
    pub n_e: Int,
    pub alpha: KElem,
    pub totally_positive: bool,
    pub result: RepResult,
}

/// `n_e = 1 + ⌊√e⌋` for `e ≡ 2, 3 (mod 4)` and `⌊ω_e⌋` for `e ≡ 1 (mod 4)`.
pub fn n_e(e: Int) -> Int {
    let r = e.sqrt();
    if e.mod_floor(&4) == 1 {
        // e is not a square, so ⌊(1 + √e)/2⌋ = ⌊(1 + ⌊√e⌋)/2⌋
        Integer::div_floor(&(1 + r), &2)
    } else {
        1 + r
    }
}

/// Builds `α = n_e + ω_e` and runs the solver on it.
pub fn sqrt_e_witness(ctx: &SqrtEContext) -> Result<SqrtEWitness> {
    if ctx.e == 5 {
        return Err(Error::ESpecialFive);
    }
    let n = n_e(ctx.e);
    let alpha = KElem::new(Quad::int(n), Quad::one());
    let o = &ctx.order;
    let tp = o.totally_positive(&alpha);
    let result = f_representable(o, &alpha)?;
    Ok(SqrtEWitness {
        e: ctx.e,
        n_e: n,
        alpha,
        totally_positive: tp,
        result,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// `D ≥ 4077`: non-representability is guaranteed.
    Theorem,
    /// `D < 4077`: the construction runs but nothing is guaranteed.
    Empirical,
}

/// Smallest `D` covered by the non-representability guarantee.
pub const SQRT5_BOUND: Int = 4077;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sqrt5Witness {
    #[serde(rename = "D")]
    pub d: Int,
    pub a: Quad,
    pub b: Quad,
    pub alpha: KElem,
    pub totally_positive: bool,
    pub representable: bool,
    pub searched_r_count: u64,
    pub regime: Regime,
}

/// Real numbers of `Q(√5, √D)`.
struct Ctx {
    d: Int,
    s: Int,
}

impl Ctx {
    fn q(&self, v: Ratio<Int>) -> BiSurd {
        BiSurd::constant(v, 5, self.d)
    }

    fn int(&self, v: Int) -> BiSurd {
        self.q(Ratio::from_integer(v))
    }

    fn coeffs(&self, c: [Ratio<Int>; 4]) -> BiSurd {
        BiSurd { c, r: 5, s: self.d }
    }

    fn phi(&self) -> BiSurd {
        let h = Ratio::new(1, 2);
        self.coeffs([h, h, Ratio::from_integer(0), Ratio::from_integer(0)])
    }

    /// `ρᵢ(m + nτ)` with `τ = (s + √D)/2`.
    fn rho(&self, x: &Quad, e: Emb) -> BiSurd {
        let sign = match e {
            Emb::First => 1,
            Emb::Second => -1,
        };
        let c0 = Ratio::from_integer(x.m) + Ratio::new(x.n * self.s, 2);
        let c2 = Ratio::new(sign * x.n, 2);
        self.coeffs([c0, Ratio::from_integer(0), c2, Ratio::from_integer(0)])
    }

    /// `f(a) = φ·ρ₁(a) + (φ − 1)·ρ₂(a)`.
    fn f_of(&self, a: &Quad) -> BiSurd {
        self.phi() * self.rho(a, Emb::First) + (self.phi() - self.int(1)) * self.rho(a, Emb::Second)
    }

    /// `2√D + 1 < f(a) ≤ 2√D + 1 + √5`.
    fn in_window(&self, a: &Quad) -> bool {
        let lo = self.coeffs([
            Ratio::from_integer(1),
            Ratio::from_integer(0),
            Ratio::from_integer(2),
            Ratio::from_integer(0),
        ]);
        let hi = lo.clone() + BiSurd::sqrt_r(5, self.d);
        let fa = self.f_of(a);
        (fa.clone() - lo).sign() == Ordering::Greater && (hi - fa).sign() != Ordering::Less
    }
}

/// The element `a + b·φ` for `F = Q(√D)`, `gcd(D, 5) = 1`.
///
/// `a ∈ τ + Z` is fixed by the window on `f(a)`; since `f(a + 1) = f(a) + √5`
/// its integer part is one exact floor. `b ∈ 2τ + Z` is the largest element
/// with `ρ₁(b) < φ·ρ₁(a)`; the segment argument puts it above
/// `(1 − φ)·ρ₂(a)` in the second embedding, which is asserted.
pub fn sqrt5_witness(d: Int) -> Result<Sqrt5Witness> {
    if d.mod_floor(&5) == 0 {
        return Err(Error::DivisibleBy5(d.to_string()));
    }
    if !is_fundamental_discriminant(&d) {
        return Err(Error::NotFundamental(d.to_string()));
    }
    let f = QuadField::new(d)?;
    let s = *f.s();
    let c = Ctx { d, s };
    // k√5 > 2√D + 1 − f(τ) with f(τ) = √5·ρ₂(τ) + φ√D, so
    // k = ⌊(3/10)√(5D) + √5/5 − s/2⌋ + 1
    let x = c.coeffs([Ratio::new(-s, 2), Ratio::new(1, 5), Ratio::from_integer(0), Ratio::new(3, 10)]);
    let k = x.floor() + 1;
    let a = Quad::new(k, 1);
    if !c.in_window(&a) || c.in_window(&Quad::new(k - 1, 1)) || c.in_window(&Quad::new(k + 1, 1)) {
        return Err(Error::PreconditionFailed("f(a) window is not hit exactly once".into()));
    }
    // j < φ·ρ₁(a) − 2ρ₁(τ), largest such; the bound is irrational
    let tau = Quad::new(0, 1);
    let y = c.phi() * c.rho(&a, Emb::First) - c.rho(&tau, Emb::First) - c.rho(&tau, Emb::First);
    let j = y.floor();
    let b = Quad::new(j, 2);
    let one_minus_phi = c.int(1) - c.phi();
    let lower = c.rho(&b, Emb::Second) - one_minus_phi * c.rho(&a, Emb::Second);
    if lower.sign() != Ordering::Greater {
        return Err(Error::PreconditionFailed("no point of 2τ + Z on the segment".into()));
    }
    let o = make_order(&f, Quad::int(5))?;
    let alpha = KElem::new(a.clone(), b.clone());
    let tp = o.totally_positive(&alpha);
    let res = f_representable(&o, &alpha)?;
    Ok(Sqrt5Witness {
        d,
        a,
        b,
        alpha,
        totally_positive: tp,
        representable: res.is_representable(),
        searched_r_count: res.searched_r_count,
        regime: if d >= SQRT5_BOUND {
            Regime::Theorem
        } else {
            Regime::Empirical
        },
    })
}

/// For `α = a + bφ ≻ 0` with witness `r` (so `a = p + r`, `b = q + r`):
/// `0 ⪯ r ⪯ a` and, at each embedding with `β = ρ(b/a)`,
/// `|ρ(r/a) − (β + 2)/5| ≤ (2/5)√(1 + β − β²)`.
///
/// The second condition is `(5r − b − 2a)² ⪯ 4(a² + ab − b²)` after clearing
/// `ρ(a) > 0`, so everything is decided in `O_F`.
pub fn sqrt5_r_bound_holds(f: &QuadField, a: &Quad, b: &Quad, r: &Quad) -> bool {
    let five_r = r.scale(&5);
    let g = &(&five_r - b) - &a.scale(&2);
    let lhs = f.square(&g);
    let rhs = (&(&f.square(a) + &f.mul(a, b)) - &f.square(b)).scale(&4);
    f.totally_nonneg(r) && f.totally_nonneg(&(a - r)) && f.totally_nonneg(&(&rhs - &lhs))
}

/// Fundamental discriminants `D ≥ from` coprime to 5, ascending.
pub fn sqrt5_candidates(from: Int, count: usize) -> Vec<Int> {
    (from..)
        .filter(|d| d.mod_floor(&5) != 0 && is_fundamental_discriminant(d))
        .take(count)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactfield::make_field;
    use crate::reptest::witness_for_r;

    #[test]
    fn compositum_examples() {
        let f5 = make_field(5).unwrap();
        let ctx = compositum_check(&f5, 2).unwrap();
        assert_eq!(ctx.delta_e, 8);
        assert_eq!(ctx.order.t(), &Quad::zero());
        let f12 = make_field(12).unwrap();
        assert!(matches!(compositum_check(&f12, 2), Err(Error::NotCoprime(..))));
        assert!(matches!(compositum_check(&f5, 12), Err(Error::NotSquarefree(_))));
        let f8 = make_field(8).unwrap();
        assert_eq!(compositum_check(&f8, 13).unwrap().order.t(), &Quad::one());
    }

    #[test]
    fn n_e_values() {
        assert_eq!(n_e(2), 2);
        assert_eq!(n_e(3), 2);
        assert_eq!(n_e(13), 2);
        assert_eq!(n_e(17), 2);
        assert_eq!(n_e(21), 2);
        assert_eq!(n_e(29), 3);
        for e in 2..2000i128 {
            if !is_squarefree(&e) {
                continue;
            }
            let v = (e as f64).sqrt();
            let want = if e % 4 == 1 { ((1.0 + v) / 2.0).floor() } else { 1.0 + v.floor() };
            assert_eq!(n_e(e), want as i128, "e = {e}");
        }
    }

    #[test]
    fn sqrt_e_examples() {
        let f5 = make_field(5).unwrap();
        let w = sqrt_e_witness(&compositum_check(&f5, 2).unwrap()).unwrap();
        assert_eq!(w.alpha, KElem::small(2, 0, 1, 0));
        assert!(w.totally_positive && !w.result.is_representable());
        let f8 = make_field(8).unwrap();
        let w = sqrt_e_witness(&compositum_check(&f8, 13).unwrap()).unwrap();
        assert_eq!(w.alpha, KElem::small(2, 0, 1, 0));
        assert!(w.totally_positive && !w.result.is_representable());
    }

    #[test]
    fn e_five_is_special() {
        let f8 = make_field(8).unwrap();
        let ctx = compositum_check(&f8, 5).unwrap();
        assert_eq!(sqrt_e_witness(&ctx).unwrap_err(), Error::ESpecialFive);
        let alpha = KElem::small(1, 0, 1, 0);
        let w = f_representable(&ctx.order, &alpha).unwrap().witness.unwrap();
        assert_eq!((w.p, w.q, w.r), (Quad::zero(), Quad::zero(), Quad::one()));
    }

    #[test]
    fn sqrt5_errors() {
        assert!(matches!(sqrt5_witness(4077), Err(Error::NotFundamental(_))));
        assert!(matches!(sqrt5_witness(4085), Err(Error::DivisibleBy5(_))));
    }

    #[test]
    fn sqrt5_4081() {
        let w = sqrt5_witness(4081).unwrap();
        assert_eq!(w.regime, Regime::Theorem);
        assert!(w.totally_positive);
        assert!(!w.representable);
        assert_eq!(w.a.n, 1);
        assert_eq!(w.b.n, 2);
    }

    /// The window and segment computed in floating point agree with the
    /// exact construction.
    #[test]
    fn sqrt5_construction_against_floats() {
        for d in sqrt5_candidates(8, 60) {
            let w = sqrt5_witness(d).unwrap();
            let phi = (1.0 + 5f64.sqrt()) / 2.0;
            let f = make_field(d).unwrap();
            let ra = f.approx(&w.a);
            let rb = f.approx(&w.b);
            let fa = phi * ra[0] + (phi - 1.0) * ra[1];
            let sd = (d as f64).sqrt();
            assert!(fa > 2.0 * sd + 1.0 - 1e-9 && fa <= 2.0 * sd + 1.0 + 5f64.sqrt() + 1e-9);
            assert!(rb[0] < phi * ra[0] + 1e-9 && rb[0] + 1.0 > phi * ra[0] - 1e-9);
            assert!(w.totally_positive, "D = {d}");
        }
    }

    #[test]
    fn r_bound_on_representable_elements() {
        let f = make_field(8).unwrap();
        let o = make_order(&f, Quad::int(5)).unwrap();
        let mut hits = 0;
        for alpha in o.enumerate_tp_by_trace(&40) {
            if let Some(wit) = f_representable(&o, &alpha).unwrap().witness {
                assert!(sqrt5_r_bound_holds(&f, &alpha.a, &alpha.b, &wit.r), "{alpha}");
                assert!(witness_for_r(&o, &alpha, &wit.r).is_some());
                hits += 1;
            }
        }
        assert!(hits > 20);
    }
}
