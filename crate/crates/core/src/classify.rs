//! The classification pipeline for a fixed base field `F`.
//!
//! 1. `S₁`: totally positive `Δ` in the fundamental domain `ℱ`, inside
//!    `B_c = {ρ₁ < c or ρ₂ < c}`, with a square class mod `4O_F`, not a square,
//!    and failing both sufficient conditions for an obstruction.
//! 2. `S₂`: survivors of the m-test, which tries shifts `m + w` in increasing
//!    trace order and drops `Δ` at the first non-representable one.
//! 3. Verification: every indecomposable up to the trace bound must be
//!    representable.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data;
use crate::error::{Error, Result};
use crate::exactfield::{Emb, Quad, QuadField};
use crate::indecomp::{self, ConeData, UnitRecord};
use crate::relquartic::{make_order, KElem, RelOrder};
use crate::reptest::{add_bound_holds, cond_delta_holds, f_representable, RepWitness};
use crate::scalar::Scalar;
use crate::Int;

/// Candidate `Δ` with its square class `t`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Candidate {
    pub delta: Quad,
    pub t: Quad,
}

/// How many integral points each exact filter removed while building `S₁`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegionCounts {
    pub scanned: u64,
    pub not_totally_positive: u64,
    pub outside_domain: u64,
    pub outside_b_c: u64,
    pub no_square_class: u64,
    pub square: u64,
    pub cond_delta: u64,
    pub add_bound: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct S1 {
    /// `max ρᵢ(x)` over the `c_max` generators, as a float for display.
    pub c_max: f64,
    /// The generators `x` with `c_max = max ρᵢ(x)`, exactly.
    pub c_max_terms: Vec<Quad>,
    pub gamma: f64,
    pub candidates: Vec<Candidate>,
    pub counts: RegionCounts,
}

/// Why a candidate was dropped after `S₁`.
///
/// Enums holding `Int` use serde's external tagging, which deserializes
/// `i128` without buffering.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Elimination {
    /// `m + w ≻ 0` is not representable.
    MTest { delta: Quad, m: Quad },
    /// An indecomposable `α` is not representable.
    IndecFail { delta: Quad, alpha: KElem },
}

impl Elimination {
    pub fn delta(&self) -> &Quad {
        match self {
            Elimination::MTest { delta, .. } | Elimination::IndecFail { delta, .. } => delta,
        }
    }

    /// The element whose non-representability eliminated the candidate.
    pub fn witness(&self) -> KElem {
        match self {
            Elimination::MTest { m, .. } => KElem::new(m.clone(), Quad::one()),
            Elimination::IndecFail { alpha, .. } => alpha.clone(),
        }
    }

    /// Re-runs the solver on the recorded element; true if it is still
    /// totally positive and not representable.
    pub fn replay(&self, f: &QuadField) -> bool {
        let Ok(o) = make_order(f, self.delta().clone()) else {
            return false;
        };
        matches!(f_representable(&o, &self.witness()), Ok(r) if r.witness.is_none())
    }
}

/// Terms `x` with `c_max = max{ρᵢ(x)}`: `u²`, `(2 − u)²` for `u ∈ U_F`, and 9.
pub fn c_max_terms(f: &QuadField) -> Vec<Quad> {
    let two = Quad::int(2);
    let mut v: Vec<Quad> = f
        .u_set()
        .iter()
        .flat_map(|u| [f.square(u), f.square(&(&two - u))])
        .chain([Quad::int(9)])
        .collect();
    v.sort();
    v.dedup();
    v
}

pub fn c_max_f64(f: &QuadField) -> f64 {
    c_max_terms(f)
        .iter()
        .flat_map(|x| f.approx(x))
        .fold(0.0, f64::max)
}

/// `ρ₁(α) < c_max` or `ρ₂(α) < c_max`, decided exactly: `ρᵢ(α) < ρⱼ(x)` for
/// some term `x` and some `j`, and `ρⱼ(x) = ρᵢ(x̄)` when `i ≠ j`.
pub fn in_b_c(f: &QuadField, terms: &[Quad], alpha: &Quad) -> bool {
    Emb::BOTH.iter().any(|&e| {
        terms.iter().any(|x| {
            [x.clone(), f.conj(x)]
                .iter()
                .any(|y| f.sign_at(&(y - alpha), e) == std::cmp::Ordering::Greater)
        })
    })
}

/// Bound on `ρ₂` over the slab `ρ₁ ≥ x` from the failure of the additional
/// condition: with `A = 2√x + 4l`, `√ρ₂ < (2A + √(4A² + 16xlA))/(2x)`.
/// Decreasing in `x`, so the value at the left end of a slab covers it.
fn add_bound_cap(x: f64, l: f64) -> f64 {
    let a = 2.0 * x.sqrt() + 4.0 * l;
    let s = (2.0 * a + (4.0 * a * a + 16.0 * x * l * a).sqrt()) / (2.0 * x);
    s * s
}

/// Boxes in the embedding plane covering every possible member of `S₁`.
///
/// The core square `[0, c]²` holds the points with both embeddings below `c`.
/// Otherwise one embedding is `≥ c`, the other is `< c`, and `ℱ` forces the
/// large one below `γc`; dyadic slabs `[X, 2X)` cover that range, each capped
/// by `X/γ < ρ_small < min(c, h(X))` where `h` comes from the additional
/// condition. Slabs stop once the cap is empty.
pub fn s1_boxes(f: &QuadField) -> Vec<([f64; 2], [f64; 2])> {
    let c = c_max_f64(f);
    let gamma = f.gamma_f64();
    let l = f.sqrt_d_f64() / 2.0 + 1.0;
    let mut boxes = vec![([0.0, 0.0], [c, c])];
    let mut x = c;
    while x < gamma * c {
        let lo = x / gamma;
        let cap = c.min(add_bound_cap(x, l)) * (1.0 + 1e-9);
        if lo >= cap {
            break;
        }
        let hi = (2.0 * x).min(gamma * c);
        boxes.push(([x, lo], [hi, cap]));
        boxes.push(([lo, x], [cap, hi]));
        x *= 2.0;
    }
    boxes
}

/// Stored in every report next to the scan parameters.
pub const SCAN_BOX_NOTE: &str = "A point of the fundamental domain inside B_c has both embeddings \
below gamma*c_max and at least one below c_max. The square [0,c_max]^2 plus dyadic slabs \
[X,2X) x [X/gamma, min(c_max, h(X))] in both orientations, where h bounds the small embedding \
under the failed additional condition, cover that set; the float box ends are padded outward and \
every point is then filtered exactly.";

/// `S₁` for `F`, together with per-filter counts.
pub fn enumerate_s1(f: &QuadField) -> Result<S1> {
    f.eps_square()?;
    let terms = c_max_terms(f);
    let mut pts = BTreeSet::new();
    for (lo, hi) in s1_boxes(f) {
        pts.extend(f.box_points(lo, hi));
    }
    let mut counts = RegionCounts {
        scanned: pts.len() as u64,
        ..Default::default()
    };
    let mut candidates = Vec::new();
    for a in pts {
        if !f.totally_positive(&a) {
            counts.not_totally_positive += 1;
        } else if !f.in_fundamental_domain(&a)? {
            counts.outside_domain += 1;
        } else if !in_b_c(f, &terms, &a) {
            counts.outside_b_c += 1;
        } else if let Some(t) = f.mod4_square_class(&a) {
            if f.sqrt(&a).is_some() {
                counts.square += 1;
            } else if cond_delta_holds(f, &a) {
                counts.cond_delta += 1;
            } else {
                let o = make_order(f, a.clone())?;
                if add_bound_holds(&o) {
                    counts.add_bound += 1;
                } else {
                    candidates.push(Candidate { delta: a, t });
                }
            }
        } else {
            counts.no_square_class += 1;
        }
    }
    Ok(S1 {
        c_max: c_max_f64(f),
        c_max_terms: terms,
        gamma: f.gamma_f64(),
        candidates,
        counts,
    })
}

/// First non-representable `m + w` among the first `m_count` totally positive
/// shifts, if any.
pub fn m_test(o: &RelOrder, m_count: usize) -> Result<Option<Quad>> {
    for m in o.tp_shifts().take(m_count) {
        let alpha = KElem::new(m.clone(), Quad::one());
        if f_representable(o, &alpha)?.witness.is_none() {
            return Ok(Some(m));
        }
    }
    Ok(None)
}

/// Splits `S₁` into survivors and m-test eliminations.
pub fn refine_s2(
    f: &QuadField,
    s1: &[Candidate],
    m_count: usize,
) -> Result<(Vec<Candidate>, Vec<Elimination>)> {
    if m_count == 0 {
        return Err(Error::PreconditionFailed("m_count must be at least 1".into()));
    }
    let tested: Vec<Option<Quad>> = s1
        .par_iter()
        .map(|c| m_test(&make_order(f, c.delta.clone())?, m_count))
        .collect::<Result<_>>()?;
    let mut survivors = Vec::new();
    let mut elim = Vec::new();
    for (c, m) in s1.iter().zip(tested) {
        match m {
            Some(m) => elim.push(Elimination::MTest {
                delta: c.delta.clone(),
                m,
            }),
            None => survivors.push(c.clone()),
        }
    }
    Ok((survivors, elim))
}

/// `D² · N(Δ)`.
pub fn abs_discriminant<Z: Scalar>(o: &RelOrder<Z>) -> Z {
    o.abs_disc()
}

pub fn label_match(abs_disc: Int) -> Option<String> {
    data::label_match(abs_disc)
}

/// Outcome of full verification for one order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    UniversalLiftExists { certificate: Vec<(KElem, RepWitness)> },
    Fails { alpha: KElem },
    NeedsUnits,
}

/// Statistics of a verification run.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyStats {
    pub trace_bound: Int,
    pub index: Int,
    pub indecomposables: usize,
    pub source: String,
}

/// Checks every indecomposable up to the trace bound for representability.
pub fn verify_field(o: &RelOrder, units: Option<&UnitRecord>) -> Result<(Verdict, VerifyStats)> {
    let Some(rec) = units else {
        return Ok((Verdict::NeedsUnits, VerifyStats::default()));
    };
    let cone: ConeData = indecomp::cone_from_record(o, rec)?;
    let mut stats = VerifyStats {
        trace_bound: cone.m,
        index: cone.index,
        indecomposables: 0,
        source: rec.source.clone(),
    };
    // by trace bands, so a failing field stops at its first small witness
    let mut cert = Vec::new();
    let mut en = indecomp::IndecEnumerator::new(o);
    for (_, hi) in indecomp::trace_bands(cone.m) {
        let band = en.advance(hi);
        let results = band
            .par_iter()
            .map(|alpha| Ok(f_representable(o, alpha)?.witness))
            .collect::<Result<Vec<_>>>()?;
        for (alpha, w) in band.iter().zip(results) {
            stats.indecomposables += 1;
            match w {
                Some(w) => cert.push((alpha.clone(), w)),
                None => return Ok((Verdict::Fails { alpha: alpha.clone() }, stats)),
            }
        }
    }
    Ok((Verdict::UniversalLiftExists { certificate: cert }, stats))
}

/// One verified (or unverifiable) member of `S₂`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifiedField {
    pub delta: Quad,
    pub abs_disc: Int,
    pub label: Option<String>,
    pub indec_count: usize,
    pub max_trace_bound: Int,
    pub unit_index: Int,
    pub unit_source: String,
    /// Another verified field's discriminant divides this one with a square
    /// cofactor, so this order might not be maximal.
    pub non_maximal_suspect: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Params {
    pub m_count: usize,
}

impl Default for Params {
    fn default() -> Self {
        Params { m_count: 50 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassificationReport {
    #[serde(rename = "D")]
    pub d: Int,
    pub c_max: f64,
    pub gamma: f64,
    /// Why the scan region cannot miss a member of `S₁`.
    pub scan_box: String,
    pub s1: Vec<Candidate>,
    pub region_counts: RegionCounts,
    pub eliminations: Vec<Elimination>,
    pub s2: Vec<Quad>,
    pub verified: Vec<VerifiedField>,
    pub needs_units: Vec<Quad>,
    pub params: Params,
}

impl ClassificationReport {
    pub fn verified_discs(&self) -> Vec<Int> {
        let mut v: Vec<Int> = self.verified.iter().map(|x| x.abs_disc).collect();
        v.sort();
        v.dedup();
        v
    }
}

/// Rejects `d` outside the bundled class-number-one list unless overridden.
pub fn gate(d: Int, allow_unlisted: bool) -> Result<()> {
    if !allow_unlisted && !data::has_class_number_one(d) {
        return Err(Error::ClassNumberNotOne(d.to_string()));
    }
    Ok(())
}

/// Verification of a single `S₂` member, as stored in reports and checkpoints.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldOutcome {
    pub delta: Quad,
    pub result: FieldResult,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldResult {
    Verified { field: VerifiedField },
    Eliminated { elimination: Elimination },
    NeedsUnits,
}

/// Runs verification for one survivor.
pub fn process_survivor(f: &QuadField, delta: &Quad, units: &[UnitRecord]) -> Result<FieldOutcome> {
    let o = make_order(f, delta.clone())?;
    let d = *f.disc();
    let rec = units.iter().find(|r| r.d == d && &r.delta == delta);
    let (verdict, stats) = verify_field(&o, rec)?;
    let result = match verdict {
        Verdict::NeedsUnits => FieldResult::NeedsUnits,
        Verdict::Fails { alpha } => FieldResult::Eliminated {
            elimination: Elimination::IndecFail {
                delta: delta.clone(),
                alpha,
            },
        },
        Verdict::UniversalLiftExists { .. } => {
            let abs_disc = o.abs_disc();
            FieldResult::Verified {
                field: VerifiedField {
                    delta: delta.clone(),
                    abs_disc,
                    label: label_match(abs_disc),
                    indec_count: stats.indecomposables,
                    max_trace_bound: stats.trace_bound,
                    unit_index: stats.index,
                    unit_source: stats.source,
                    non_maximal_suspect: false,
                },
            }
        }
    };
    Ok(FieldOutcome {
        delta: delta.clone(),
        result,
    })
}

/// Assembles a report from the stage outputs; the result does not depend on
/// the order of `outcomes`.
pub fn assemble(
    f: &QuadField,
    s1: S1,
    mut eliminations: Vec<Elimination>,
    s2: Vec<Candidate>,
    mut outcomes: Vec<FieldOutcome>,
    params: Params,
) -> ClassificationReport {
    outcomes.sort_by(|a, b| a.delta.cmp(&b.delta));
    let mut verified = Vec::new();
    let mut needs_units = Vec::new();
    for o in outcomes {
        match o.result {
            FieldResult::Verified { field } => verified.push(field),
            FieldResult::Eliminated { elimination } => eliminations.push(elimination),
            FieldResult::NeedsUnits => needs_units.push(o.delta),
        }
    }
    flag_non_maximal(&mut verified);
    eliminations.sort_by(|a, b| a.delta().cmp(b.delta()));
    ClassificationReport {
        d: *f.disc(),
        c_max: s1.c_max,
        gamma: s1.gamma,
        scan_box: SCAN_BOX_NOTE.to_string(),
        s1: s1.candidates,
        region_counts: s1.counts,
        eliminations,
        s2: s2.into_iter().map(|c| c.delta).collect(),
        verified,
        needs_units,
        params,
    }
}

/// Marks survivors whose discriminant is another survivor's times a square
/// greater than one.
fn flag_non_maximal(v: &mut [VerifiedField]) {
    let discs: Vec<Int> = v.iter().map(|x| x.abs_disc).collect();
    for x in v.iter_mut() {
        x.non_maximal_suspect = discs.iter().any(|&d| {
            d != x.abs_disc
                && x.abs_disc % d == 0
                && crate::scalar::is_square(&(x.abs_disc / d)).is_some_and(|r| r > 1)
        });
    }
}

/// The full pipeline for one base field.
pub fn classify(d: Int, params: &Params, units: &[UnitRecord]) -> Result<ClassificationReport> {
    let f = QuadField::new(d)?;
    let s1 = enumerate_s1(&f)?;
    let (s2, elim) = refine_s2(&f, &s1.candidates, params.m_count)?;
    let outcomes = s2
        .par_iter()
        .map(|c| process_survivor(&f, &c.delta, units))
        .collect::<Result<Vec<_>>>()?;
    Ok(assemble(&f, s1, elim, s2, outcomes, params.clone()))
}
