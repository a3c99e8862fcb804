//! Property checks shared by the property suite and the acceptance run.
//!
//! Each check runs a deterministic proptest runner for `cases` cases and
//! returns the shrunk counterexample on failure.

#![allow(dead_code)]

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::Ratio;
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestCaseError, TestRng, TestRunner};
use unilift::exactfield::Emb;
use unilift::interval::Interval;
use unilift::{indecomp, make_order, Int, KElem, Quad, QuadField, RelOrder};

pub const PREC: u32 = 200;

pub fn runner(cases: u32) -> TestRunner {
    let config = Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    };
    TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha))
}

fn finish<T: std::fmt::Debug>(r: Result<(), proptest::test_runner::TestError<T>>) -> Result<(), String> {
    r.map_err(|e| e.to_string())
}

pub const BASES: [Int; 8] = [5, 8, 12, 13, 17, 21, 28, 177];

/// Small orders with distinct square classes `t`.
pub const ORDERS: [(Int, (i64, i64)); 6] = [(5, (5, 1)), (5, (8, 0)), (8, (5, 0)), (12, (5, 0)), (13, (7, 1)), (21, (5, 0))];

pub fn order(i: usize) -> RelOrder {
    let (d, (m, n)) = ORDERS[i];
    make_order(&QuadField::new(d).unwrap(), Quad::small(m, n)).unwrap()
}

/// Interval enclosures of the four real embeddings of `x`.
pub fn quartic_intervals(o: &RelOrder, x: &KElem) -> [Interval; 4] {
    let f = o.field();
    let two = Interval::from_int(&BigInt::from(2), PREC);
    let emb = |j: usize| {
        let e = if j < 2 { Emb::First } else { Emb::Second };
        let a = Interval::from_surd(&f.rho(&x.a, e), PREC);
        let b = Interval::from_surd(&f.rho(&x.b, e), PREC);
        let t = Interval::from_surd(&f.rho(o.t(), e), PREC);
        let mut r = Interval::from_surd(&f.rho(o.delta(), e), PREC).sqrt();
        if j % 2 == 1 {
            r = -r;
        }
        let w = (t + r).div(&two).expect("nonzero");
        a + b * w
    };
    [emb(0), emb(1), emb(2), emb(3)]
}

/// Exact signs in `F` and in `K` agree with interval enclosures wherever
/// the enclosure decides.
pub fn sign_vs_interval(cases: u32) -> Result<(), String> {
    let strat = (
        0..BASES.len(),
        -1_000_000i64..1_000_000,
        1i64..60,
        -100_000i64..100_000,
        1i64..60,
        0..ORDERS.len(),
        prop::array::uniform4(-60i64..60),
    );
    finish(runner(cases).run(&strat, |(bi, xn, xd, yn, yd, oi, k)| {
        let f = QuadField::new(BASES[bi]).unwrap();
        let q = unilift::QElem::new(Ratio::new(xn as Int, xd as Int), Ratio::new(yn as Int, yd as Int));
        for e in Emb::BOTH {
            let iv = Interval::from_surd(&f.rho_q(&q, e), PREC);
            if let Some(s) = iv.sign() {
                prop_assert_eq!(f.sign_q(&q, e), s);
            }
            // the difference with itself is an exact tie
            let z = f.rho_q(&q, e) - f.rho_q(&q, e);
            prop_assert_eq!(z.sign(), Ordering::Equal);
        }
        let o = order(oi);
        let x = KElem::small(k[0], k[1], k[2], k[3]);
        for (j, iv) in quartic_intervals(&o, &x).iter().enumerate() {
            if let Some(s) = iv.sign() {
                prop_assert_eq!(o.sign_quartic(&x, j), s, "{} at {}", x, j);
            }
        }
        Ok(())
    }))
}

/// Every totally positive element of trace at most `tmax`, by scanning a
/// coordinate cube; fails if anything lies on the cube's boundary, which
/// would mean the cube was too small.
pub fn cube_scan(o: &RelOrder, tmax: Int) -> Result<Vec<KElem>, TestCaseError> {
    let c = 2 * tmax as i64 + 2;
    let mut out = Vec::new();
    for am in -c..=c {
        for an in -c..=c {
            for bm in -c..=c {
                for bn in -c..=c {
                    let x = KElem::small(am, an, bm, bn);
                    if o.trace_q(&x) <= tmax && o.totally_positive(&x) {
                        if [am, an, bm, bn].iter().any(|v| v.abs() == c) {
                            return Err(TestCaseError::fail(format!("cube {c} too small: {x}")));
                        }
                        out.push(x);
                    }
                }
            }
        }
    }
    out.sort();
    Ok(out)
}

/// Trace-ordered enumeration agrees with a cube scan.
pub fn enumeration_vs_cube(cases: u32) -> Result<(), String> {
    finish(runner(cases).run(&(0..ORDERS.len(), 2i128..=9), |(oi, tmax)| {
        let o = order(oi);
        let mut got = o.enumerate_tp_by_trace(&tmax);
        got.sort();
        let want = cube_scan(&o, tmax)?;
        prop_assert_eq!(got, want);
        Ok(())
    }))
}

/// `α` is decomposable iff `α = β + γ` with both summands totally positive,
/// checked against all pairs below `α`'s trace.
pub fn decomposability_vs_pairs(cases: u32) -> Result<(), String> {
    finish(runner(cases).run(&(0..ORDERS.len(), 4i128..=14, any::<prop::sample::Index>()), |(oi, tmax, pick)| {
        let o = order(oi);
        let all = o.enumerate_tp_by_trace(&tmax);
        let alpha = pick.get(&all);
        let below: Vec<&KElem> = all.iter().filter(|b| o.trace_q(b) < o.trace_q(alpha)).collect();
        let split = below
            .iter()
            .any(|b| o.totally_positive(&(alpha - *b)));
        prop_assert_eq!(indecomp::is_decomposable(&o, alpha), split, "{}", alpha);
        Ok(())
    }))
}

/// `round_to_box` lands in `[x, x + l_F) × [y, y + l_F)`, checked with
/// interval arithmetic.
pub fn round_to_box_membership(cases: u32) -> Result<(), String> {
    let strat = (0..BASES.len(), -10_000_000i64..10_000_000, 1i64..1000, -10_000_000i64..10_000_000, 1i64..1000);
    finish(runner(cases).run(&strat, |(bi, xn, xd, yn, yd)| {
        let f = QuadField::new(BASES[bi]).unwrap();
        let x = Ratio::new(xn as Int, xd as Int);
        let y = Ratio::new(yn as Int, yd as Int);
        let a = f.round_to_box(&x, &y);
        prop_assert!(f.in_box(&a, &x, &y));
        let l = Interval::from_surd(&f.l_f(), PREC);
        for (e, lo) in [(Emb::First, &x), (Emb::Second, &y)] {
            let lo = Interval::from_ratio(lo, PREC);
            let v = Interval::from_surd(&f.rho(&a, e), PREC);
            prop_assert_ne!((v.clone() - lo.clone()).sign(), Some(Ordering::Less));
            prop_assert_ne!((v - lo - l.clone()).sign(), Some(Ordering::Greater));
        }
        Ok(())
    }))
}

/// Unit generators of small bundled orders, with the orders.
pub fn small_unit_orders() -> Vec<(RelOrder, Vec<KElem>)> {
    unilift::data::bundled_units()
        .into_iter()
        .filter(|r| r.d <= 12)
        .map(|r| {
            let o = make_order(&QuadField::new(r.d).unwrap(), r.delta.clone()).unwrap();
            let mut us = Vec::new();
            for u in &r.units {
                us.push(u.clone());
                us.push(o.inverse(u).unwrap());
            }
            us.retain(|u| [&u.a, &u.b].iter().all(|q| q.m.abs() <= 200 && q.n.abs() <= 200));
            (o, us)
        })
        .filter(|(_, us)| !us.is_empty())
        .collect()
}

/// Representability of `α` and `u²α` agree for units `u` of `O_K`.
pub fn unit_invariance(cases: u32) -> Result<(), String> {
    let orders: Vec<(RelOrder, Vec<KElem>, Vec<KElem>)> = small_unit_orders()
        .into_iter()
        .map(|(o, us)| {
            let tp = o.enumerate_tp_by_trace(&24);
            (o, us, tp)
        })
        .collect();
    let strat = (0..orders.len(), any::<prop::sample::Index>(), any::<prop::sample::Index>());
    let seen = std::cell::Cell::new([0u32; 2]);
    finish(runner(cases).run(&strat, |(oi, ui, ai)| {
        let (o, us, tp) = &orders[oi];
        let alpha = ai.get(tp);
        let u = ui.get(us);
        let beta = o.mul(&o.mul(u, u), alpha);
        let ra = unilift::f_representable(o, alpha).unwrap().is_representable();
        let rb = unilift::f_representable(o, &beta).unwrap().is_representable();
        prop_assert_eq!(ra, rb, "{} vs {}", alpha, beta);
        let mut c = seen.get();
        c[ra as usize] += 1;
        seen.set(c);
        Ok(())
    }))?;
    // both outcomes must occur for the check to mean anything
    match seen.get() {
        [0, _] | [_, 0] => Err(format!("one-sided sample {:?}", seen.get())),
        _ => Ok(()),
    }
}
