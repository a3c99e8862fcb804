//! Deciding whether `α = u + v·w` is a sum of squares of linear forms over
//! `O_F`, i.e. `α = p + q·w + r·w²` with `p, r, 4pr − q² ⪰ 0`.
//!
//! Comparing coordinates gives `p = u + n·r` and `q = v − t·r`, so only `r`
//! is free. Substituting into `4pr − q² ⪰ 0` yields, per embedding, a
//! quadratic inequality that confines `ρᵢ(r)` to an interval; the integral
//! points of that box are scanned and checked exactly.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::Ratio;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactfield::{Emb, Quad, QuadField};
use crate::interval::Interval;
use crate::relquartic::{KElem, RelOrder};
use crate::scalar::{pad, Scalar};
use crate::surd::BiSurd;

/// `α = p + q·w + r·w²` with `p, r, 4pr − q² ⪰ 0`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, serde::Deserialize)]
pub struct RepWitness<Z: Scalar + Serialize = crate::Int> {
    pub p: Quad<Z>,
    pub q: Quad<Z>,
    pub r: Quad<Z>,
}

/// Outcome of [`f_representable`]: the lexicographically least witness (by
/// the coordinates of `r`) or `None`, plus the number of `r` examined.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, serde::Deserialize)]
pub struct RepResult<Z: Scalar + Serialize = crate::Int> {
    pub witness: Option<RepWitness<Z>>,
    pub searched_r_count: u64,
}

impl<Z: Scalar + Serialize> RepResult<Z> {
    pub fn is_representable(&self) -> bool {
        self.witness.is_some()
    }
}

/// The witness `(p, q, r)` determined by `r`, if it satisfies all three
/// nonnegativity conditions.
pub fn witness_for_r<Z: Scalar + Serialize>(
    o: &RelOrder<Z>,
    alpha: &KElem<Z>,
    r: &Quad<Z>,
) -> Option<RepWitness<Z>> {
    let f = o.field();
    if !f.totally_nonneg(r) {
        return None;
    }
    let p = &alpha.a + &f.mul(o.n(), r);
    if !f.totally_nonneg(&p) {
        return None;
    }
    let q = &alpha.b - &f.mul(o.t(), r);
    let disc = &f.mul(&p, r).scale(&Z::int(4)) - &f.square(&q);
    if !f.totally_nonneg(&disc) {
        return None;
    }
    Some(RepWitness { p, q, r: r.clone() })
}

/// Floating box containing every admissible `r`:
/// `ρ(r) ∈ [(S − √(S² − δV²))/δ, (S + √(S² − δV²))/δ]` with
/// `S = ρ(2u + vt)`, `δ = ρ(Δ)`, `V = ρ(v)`, intersected with `ρ(r) ≥ 0`.
pub fn r_box<Z: Scalar>(o: &RelOrder<Z>, alpha: &KElem<Z>) -> ([f64; 2], [f64; 2]) {
    let f = o.field();
    let s = f.approx(&o.trace_f(alpha));
    let d = f.approx(o.delta());
    let v = f.approx(&alpha.b);
    let mut lo = [0.0; 2];
    let mut hi = [0.0; 2];
    for i in 0..2 {
        let root = (s[i] * s[i] - d[i] * v[i] * v[i]).max(0.0).sqrt();
        lo[i] = ((s[i] - root) / d[i]).max(0.0);
        hi[i] = (s[i] + root) / d[i];
    }
    (lo, hi)
}

/// Decides `F`-representability of a totally positive `α`. A `None` witness
/// proves that no `(p, q, r)` exists.
pub fn f_representable<Z: Scalar + Serialize>(
    o: &RelOrder<Z>,
    alpha: &KElem<Z>,
) -> Result<RepResult<Z>> {
    if !o.totally_positive(alpha) {
        return Err(Error::NotTotallyPositive);
    }
    let (lo, hi) = r_box(o, alpha);
    let cands = o.field().box_points(lo, hi);
    let witness = cands
        .par_iter()
        .filter_map(|r| witness_for_r(o, alpha, r))
        .min_by(|x, y| x.r.cmp(&y.r));
    Ok(RepResult {
        witness,
        searched_r_count: cands.len() as u64,
    })
}

/// `Δ ⪰ u²` and `Δ ⪰ (2 − u)²` for all `u ∈ U_F`, and `Δ ⪰ 9` when
/// `Δ ≡ 1 (mod 4O_F)`.
pub fn cond_delta_holds<Z: Scalar>(f: &QuadField<Z>, delta: &Quad<Z>) -> bool {
    let two = Quad::int(Z::int(2));
    let squares_ok = f.u_set().iter().all(|u| {
        f.succeq(delta, &f.square(u)) && f.succeq(delta, &f.square(&(&two - u)))
    });
    if !squares_ok {
        return false;
    }
    let one_mod_four = (delta - &Quad::one()).div_int(&Z::int(4)).is_some();
    !one_mod_four || f.succeq(delta, &Quad::int(Z::int(9)))
}

/// The non-representable shift `m`: `(Δ − t²)/4` when `t ≠ 1`, else
/// `(Δ − 1)/4 − 1`. Both total positivity of `m + w` and the solver's
/// `None` are checked before returning.
pub fn witness_m<Z: Scalar + Serialize>(o: &RelOrder<Z>) -> Result<Quad<Z>> {
    if !cond_delta_holds(o.field(), o.delta()) {
        return Err(Error::PreconditionFailed("condition on Δ does not hold".into()));
    }
    let m1 = -o.n();
    let m = if o.t() == &Quad::one() {
        &m1 - &Quad::one()
    } else {
        m1
    };
    confirm_non_representable(o, &m)?;
    Ok(m)
}

fn confirm_non_representable<Z: Scalar + Serialize>(o: &RelOrder<Z>, m: &Quad<Z>) -> Result<()> {
    let alpha = KElem::new(m.clone(), Quad::one());
    if !o.totally_positive(&alpha) {
        return Err(Error::PreconditionFailed(format!("{m} + w is not totally positive")));
    }
    if let Some(w) = f_representable(o, &alpha)?.witness {
        return Err(Error::PreconditionFailed(format!(
            "{m} + w is represented with r = {}",
            w.r
        )));
    }
    Ok(())
}

/// `N(Δ) ≥ (2√ρ₁(Δ) + 4l)(2√ρ₂(Δ) + 4l)` with `l = √D/2 + 1`, decided exactly.
///
/// With `N = N(Δ)` and `T = Tr(Δ)` the inequality reads
/// `N − 4√N − 4D − 16 − 16√D ≥ (4√D + 8)·√(T + 2√N)`; the left side is checked
/// for sign, then both sides are squared inside `Q(√N, √D)`.
pub fn add_bound_holds<Z: Scalar>(o: &RelOrder<Z>) -> bool {
    let f = o.field();
    let d = f.disc().approx();
    let v = f.approx(o.delta());
    let l = d.sqrt() / 2.0 + 1.0;
    let lhs = v[0] * v[1];
    let rhs = (2.0 * v[0].sqrt() + 4.0 * l) * (2.0 * v[1].sqrt() + 4.0 * l);
    if (lhs - rhs).abs() > 1e-6 * lhs.abs().max(rhs.abs()).max(1.0) {
        return lhs > rhs;
    }
    add_bound_exact(f.disc().to_bigint(), f.norm(o.delta()).to_bigint(), f.trace(o.delta()).to_bigint())
}

fn add_bound_exact(d: BigInt, n: BigInt, tr: BigInt) -> bool {
    let q = |v: BigInt| Ratio::from_integer(v);
    let mut lhs = BiSurd::zero(n.clone(), d.clone());
    lhs.c = [
        q(&n - 4 * &d - 16),
        q(BigInt::from(-4)),
        q(BigInt::from(-16)),
        q(BigInt::from(0)),
    ];
    if lhs.is_negative() {
        return false;
    }
    let mut factor = BiSurd::zero(n.clone(), d.clone());
    factor.c[0] = q(16 * &d + 64);
    factor.c[2] = q(BigInt::from(64));
    let mut inner = BiSurd::zero(n.clone(), d.clone());
    inner.c[0] = q(tr);
    inner.c[1] = q(BigInt::from(2));
    let diff = lhs.clone() * lhs - factor * inner;
    diff.sign() != Ordering::Less
}

/// Checks `(−ρᵢ(t) + √ρᵢ(Δ))/2 ≤ ρᵢ(m) < (−ρᵢ(t) + √ρᵢ(Δ))/2 + l_F` for
/// both embeddings, exactly.
pub fn in_shift_box<Z: Scalar>(o: &RelOrder<Z>, m: &Quad<Z>) -> bool {
    let f = o.field();
    let two = Z::int(2);
    // c = 2m + t; lower: ρ(c) ≥ √ρ(Δ); upper: ρ(c) − 2 − √D < √ρ(Δ)
    let c = &m.scale(&two) + o.t();
    let root_d = Quad::new(-f.s().clone(), two.clone());
    let c_sq = &f.square(&c) - o.delta();
    let shifted = [
        &(&c - &Quad::int(two.clone())) - &root_d,
        &(&c - &Quad::int(two.clone())) + &root_d,
    ];
    Emb::BOTH.iter().zip(shifted.iter()).all(|(&e, g)| {
        let lower = f.sign_at(&c, e) != Ordering::Less && f.sign_at(&c_sq, e) != Ordering::Less;
        let upper = f.sign_at(g, e) == Ordering::Less
            || f.sign_at(&(&f.square(g) - o.delta()), e) == Ordering::Less;
        lower && upper
    })
}

/// Rational upper approximations of the targets `(−ρᵢ(t) + √ρᵢ(Δ))/2`.
fn shift_targets<Z: Scalar>(o: &RelOrder<Z>, prec: u32) -> [Ratio<BigInt>; 2] {
    let f = o.field();
    Emb::BOTH.map(|e| {
        let t = Interval::from_surd(&f.rho(o.t(), e), prec);
        let dl = Interval::from_surd(&f.rho(o.delta(), e), prec).sqrt();
        let two = Interval::from_int(&BigInt::from(2), prec);
        (dl - t).div(&two).expect("nonzero divisor").upper()
    })
}

/// The shift `m` of the additional bound, built by rounding to the target
/// boxes and confirmed non-representable by the solver.
pub fn witness_m_rounding<Z: Scalar + Serialize>(o: &RelOrder<Z>) -> Result<Quad<Z>> {
    if !add_bound_holds(o) {
        return Err(Error::PreconditionFailed("additional bound on Δ does not hold".into()));
    }
    let f = o.field();
    let big = QuadField::<BigInt>::new(f.disc().to_bigint())?;
    let mut found = None;
    for prec in [40u32, 80, 160] {
        let [x, y] = shift_targets(o, prec);
        let m = Quad::from_big(&big.round_to_box(&x, &y)).ok_or(Error::UnitTooLarge)?;
        if in_shift_box(o, &m) {
            found = Some(m);
            break;
        }
    }
    let m = match found {
        Some(m) => m,
        None => {
            // the box always has an integral point; scan it exactly
            let [x, y] = shift_targets(o, 40);
            let l = f.l_f().approx();
            let (x, y) = (crate::surd::ratio_f64(&x), crate::surd::ratio_f64(&y));
            let p = pad(x.abs() + y.abs() + l);
            let mut pts = f.box_points([x - l - p, y - l - p], [x + l + p, y + l + p]);
            pts.retain(|m| in_shift_box(o, m));
            pts.sort();
            pts.into_iter()
                .next()
                .ok_or_else(|| Error::PreconditionFailed("no point in the rounding box".into()))?
        }
    };
    confirm_non_representable(o, &m)?;
    Ok(m)
}
