//! Acceptance run: one PASS/FAIL line per criterion, then a single assert.
//!
//! Run with `cargo test --test acceptance -- --nocapture` to see the lines.

mod common;

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use unilift::classify::{classify, ClassificationReport, Params};
use unilift::reptest::{add_bound_holds, cond_delta_holds, witness_m, witness_m_rounding};
use unilift::sqrtext::{compositum_check, sqrt5_candidates, sqrt5_witness, sqrt_e_witness, Regime};
use unilift::{data, f_representable, make_order, Error, Int, KElem, Quad, QuadField, RelOrder};

struct Outcome {
    ok: bool,
    detail: String,
}

fn pass(detail: String) -> Outcome {
    Outcome { ok: true, detail }
}

fn fail(detail: String) -> Outcome {
    Outcome { ok: false, detail }
}

fn run_classify(d: Int) -> ClassificationReport {
    classify(d, &Params::default(), &data::bundled_units()).unwrap()
}

/// Classifies each `D` and compares with the expected discriminants, each
/// within `limit`.
fn rows(ds: &[(Int, &[Int])], limit: Duration) -> Outcome {
    let mut slowest = Duration::ZERO;
    for &(d, want) in ds {
        let start = Instant::now();
        let r = run_classify(d);
        let took = start.elapsed();
        slowest = slowest.max(took);
        let got = r.verified_discs();
        if got != want || !r.needs_units.is_empty() {
            return fail(format!("D = {d}: verified {got:?}, expected {want:?}"));
        }
        if took > limit {
            return fail(format!("D = {d} took {took:?}"));
        }
    }
    pass(format!("{} bases, slowest {slowest:.1?}", ds.len()))
}

fn criterion_1() -> Outcome {
    rows(
        &[(5, &[725]), (8, &[1600]), (17, &[4913]), (21, &[11025]), (29, &[4205]), (33, &[13068])],
        Duration::from_secs(600),
    )
}

fn criterion_2() -> Outcome {
    rows(
        &[(12, &[2304, 3600, 4752]), (24, &[2304, 14400]), (28, &[7056, 19600]), (56, &[28224])],
        Duration::from_secs(3600),
    )
}

/// Absent bases give no verified field and every elimination replays.
fn negative(d: Int) -> Result<usize, String> {
    let f = QuadField::new(d).unwrap();
    let r = run_classify(d);
    if !r.verified.is_empty() || !r.needs_units.is_empty() {
        return Err(format!("D = {d}: verified {:?}, needs units {:?}", r.verified_discs(), r.needs_units));
    }
    if r.eliminations.len() != r.s1.len() {
        return Err(format!("D = {d}: {} eliminations for {} candidates", r.eliminations.len(), r.s1.len()));
    }
    for e in &r.eliminations {
        if !e.replay(&f) {
            return Err(format!("D = {d}: elimination of {} does not replay", e.delta()));
        }
    }
    Ok(r.eliminations.len())
}

fn criterion_3() -> Outcome {
    let listed: BTreeSet<Int> = data::table1().iter().map(|r| r.d as Int).collect();
    let absent: Vec<Int> = data::class_number_one_discriminants()
        .filter(|d| !listed.contains(d) && *d != 193)
        .collect();
    let mut replayed = 0;
    let mut slowest = (0, Duration::ZERO);
    for &d in &absent {
        let start = Instant::now();
        match negative(d) {
            Ok(n) => replayed += n,
            Err(e) => return fail(e),
        }
        let took = start.elapsed();
        let limit = if d == 177 { 86_400 } else { 3600 };
        if took > Duration::from_secs(limit) {
            return fail(format!("D = {d} took {took:?}"));
        }
        if took > slowest.1 {
            slowest = (d, took);
        }
    }
    let small = absent.iter().filter(|&&d| d <= 120).count();
    pass(format!(
        "{} absent bases ({small} up to 120, the rest up to 200 including 177), {replayed} eliminations replayed, slowest D = {} in {:.1?}",
        absent.len(),
        slowest.0,
        slowest.1
    ))
}

/// Every `r` with both `0 ⪯ r` and `rΔ ⪯ 2·Tr_{K/F}(α)` scanned over a
/// coordinate square, with `p = a + rn`, `q = b − rt` and the three
/// nonnegativity conditions tested directly. The bound on `r` holds since
/// `y ↦ p + qy + ry²` is convex and nonnegative: its mean over the two roots
/// of `y² − ty + n` exceeds its midpoint value by `rΔ/4`.
fn brute_force(o: &RelOrder, alpha: &KElem) -> Option<Quad> {
    let f = o.field();
    let tr2 = o.trace_f(alpha).scale(&2);
    let bound = f.approx(&tr2);
    let dl = f.approx(o.delta());
    let rho_max = (bound[0] / dl[0]).max(bound[1] / dl[1]) + 1.0;
    let c = (2.0 * rho_max / f.sqrt_d_f64() + rho_max * 2.0 + 2.0).ceil() as i64;
    let mut best: Option<Quad> = None;
    for m in -c..=c {
        for n in -c..=c {
            let r = Quad::small(m, n);
            if !f.totally_nonneg(&r) || !f.totally_nonneg(&(&tr2 - &f.mul(&r, o.delta()))) {
                continue;
            }
            assert!(m.abs() < c && n.abs() < c, "scan square too small");
            let p = &alpha.a + &f.mul(&r, o.n());
            let q = &alpha.b - &f.mul(&r, o.t());
            let disc = &f.mul(&p, &r).scale(&4) - &f.square(&q);
            if f.totally_nonneg(&p) && f.totally_nonneg(&disc) && best.as_ref().is_none_or(|b| &r < b) {
                best = Some(r);
            }
        }
    }
    best
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let orders = [(8, (5, 0)), (5, (5, 1)), (13, (7, 1))];
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut reps = 0;
    for (d, (dm, dn)) in orders {
        let o = make_order(&QuadField::new(d).unwrap(), Quad::small(dm, dn)).unwrap();
        let mut n = 0;
        while n < 120 {
            let x = KElem::small(
                rng.gen_range(-8..=8),
                rng.gen_range(-8..=8),
                rng.gen_range(-8..=8),
                rng.gen_range(-8..=8),
            );
            if !o.totally_positive(&x) {
                continue;
            }
            n += 1;
            let got = f_representable(&o, &x).unwrap();
            let want = brute_force(&o, &x);
            if got.witness.as_ref().map(|w| w.r.clone()) != want {
                return fail(format!("D = {d}, alpha = {x}: solver {:?}, brute force {want:?}", got.witness));
            }
            reps += want.is_some() as usize;
        }
    }
    let took = start.elapsed();
    if took > Duration::from_secs(300) {
        return fail(format!("took {took:?}"));
    }
    pass(format!("360 instances over 3 orders agree ({reps} representable) in {took:.1?}"))
}

/// Random totally positive non-square `Δ` with a square class mod 4.
fn sample_deltas(f: &QuadField, rng: &mut ChaCha8Rng, range: i64, keep: impl Fn(&RelOrder) -> bool) -> Vec<RelOrder> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for _ in 0..200_000 {
        if out.len() == 20 {
            break;
        }
        let delta = Quad::small(rng.gen_range(1..=range), rng.gen_range(-range..=range));
        let Ok(o) = make_order(f, delta.clone()) else { continue };
        if keep(&o) && seen.insert(delta) {
            out.push(o);
        }
    }
    out
}

fn criterion_5() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut checked = 0;
    for d in [5, 8, 12] {
        let f = QuadField::new(d).unwrap();
        let cond = sample_deltas(&f, &mut rng, 60, |o| cond_delta_holds(o.field(), o.delta()));
        let add = sample_deltas(&f, &mut rng, 3000, |o| {
            !cond_delta_holds(o.field(), o.delta()) && add_bound_holds(o)
        });
        if cond.len() < 20 || add.len() < 20 {
            return fail(format!("D = {d}: sampled {} / {} orders", cond.len(), add.len()));
        }
        for (o, rounding) in cond.iter().map(|o| (o, false)).chain(add.iter().map(|o| (o, true))) {
            let m = if rounding { witness_m_rounding(o) } else { witness_m(o) };
            let m = match m {
                Ok(m) => m,
                Err(e) => return fail(format!("D = {d}, delta = {}: {e}", o.delta())),
            };
            let alpha = KElem::new(m, Quad::one());
            if !o.totally_positive(&alpha) || f_representable(o, &alpha).unwrap().is_representable() {
                return fail(format!("D = {d}, delta = {}: {alpha} is not a witness", o.delta()));
            }
            checked += 1;
        }
    }
    pass(format!("{checked} witnesses (20 + 20 per base) in {:.1?}", start.elapsed()))
}

fn criterion_6() -> Outcome {
    let start = Instant::now();
    let mut ran = 0;
    let mut skipped = 0;
    for d in [5, 8, 12, 13] {
        let f = QuadField::new(d).unwrap();
        for e in [2, 3, 6, 7, 13, 17] {
            let ctx = match compositum_check(&f, e) {
                Ok(c) => c,
                Err(Error::NotCoprime(..)) => {
                    skipped += 1;
                    continue;
                }
                Err(err) => return fail(format!("D = {d}, e = {e}: {err}")),
            };
            let w = sqrt_e_witness(&ctx).unwrap();
            let o = &ctx.order;
            if !o.totally_positive(&w.alpha) || f_representable(o, &w.alpha).unwrap().is_representable() {
                return fail(format!("D = {d}, e = {e}: {} is not a witness", w.alpha));
            }
            ran += 1;
        }
        if d % 5 != 0 {
            let ctx = compositum_check(&f, 5).unwrap();
            if !matches!(sqrt_e_witness(&ctx), Err(Error::ESpecialFive)) {
                return fail(format!("D = {d}: e = 5 not rejected"));
            }
            // 1 + ω₅ = ω₅²
            let r = f_representable(&ctx.order, &KElem::small(1, 0, 1, 0)).unwrap();
            let w = r.witness.as_ref();
            if w.is_none_or(|w| (w.p.clone(), w.q.clone(), w.r.clone()) != (Quad::zero(), Quad::zero(), Quad::one())) {
                return fail(format!("D = {d}: 1 + omega_5 gives {:?}", r.witness));
            }
        }
    }
    let took = start.elapsed();
    if took > Duration::from_secs(300) {
        return fail(format!("took {took:?}"));
    }
    pass(format!("{ran} coprime pairs non-representable, {skipped} pairs not coprime, e = 5 handled, {took:.1?}"))
}

fn criterion_7() -> Outcome {
    let start = Instant::now();
    let ds = sqrt5_candidates(4077, 5);
    for &d in &ds {
        let w = match sqrt5_witness(d) {
            Ok(w) => w,
            Err(e) => return fail(format!("D = {d}: {e}")),
        };
        let f = QuadField::new(d).unwrap();
        let o = make_order(&f, Quad::small(5, 0)).unwrap();
        let alpha = KElem::new(w.a.clone(), w.b.clone());
        if w.alpha != alpha || w.regime != Regime::Theorem {
            return fail(format!("D = {d}: unexpected record {w:?}"));
        }
        if !o.totally_positive(&alpha) || f_representable(&o, &alpha).unwrap().is_representable() {
            return fail(format!("D = {d}: {alpha} is not a witness"));
        }
    }
    pass(format!("D in {ds:?} in {:.1?}", start.elapsed()))
}

fn criterion_8() -> Outcome {
    let start = Instant::now();
    let checks: [(&str, fn(u32) -> Result<(), String>, u32); 5] = [
        ("exact sign vs intervals", common::sign_vs_interval, 5000),
        ("enumeration vs cube scan", common::enumeration_vs_cube, 40),
        ("decomposability vs all pairs", common::decomposability_vs_pairs, 1000),
        ("round_to_box membership", common::round_to_box_membership, 5000),
        ("unit invariance", common::unit_invariance, 1000),
    ];
    for (name, check, cases) in checks {
        if let Err(e) = check(cases) {
            return fail(format!("{name}: {e}"));
        }
    }
    let took = start.elapsed();
    if took > Duration::from_secs(900) {
        return fail(format!("took {took:?}"));
    }
    pass(format!("5 property suites green in {took:.1?}"))
}

#[test]
fn acceptance() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("table rows, fast bases", criterion_1),
        ("table rows, multi-field bases", criterion_2),
        ("absent bases and replay", criterion_3),
        ("solver vs brute force", criterion_4),
        ("m-witness constructions", criterion_5),
        ("sqrt(e) witnesses", criterion_6),
        ("sqrt(5) witnesses for D >= 4077", criterion_7),
        ("property suites", criterion_8),
    ];
    let mut failed = Vec::new();
    for (i, (name, run)) in criteria.iter().enumerate() {
        let o = run();
        println!("criterion {} {}: {}: {}", i + 1, if o.ok { "PASS" } else { "FAIL" }, name, o.detail);
        if !o.ok {
            failed.push(i + 1);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
