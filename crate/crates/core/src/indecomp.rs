//! Units of `K`, the cone generators `𝔘`, the trace bound `M(𝔘)` and the
//! indecomposable totally positive elements below it.
//!
//! Unit generators are ingested (see `data/units.json`), checked to be units
//! of full rank, and turned into a basis `u₁, u₂, u₃` of the group
//! `O_F^{×,+}·O_K^{×2}` of totally positive units that arise as a totally
//! positive unit of `F` times a square. Every totally positive `α` is a
//! product of an element of that group and an element of trace at most
//! `M = 4·max_{v∈𝔘} Tr(v)`, so checking the indecomposables up to `M`
//! covers all of them.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactfield::{Emb, Quad, QuadField};
use crate::interval::Interval;
use crate::relquartic::{make_order, KElem, RelOrder};
use crate::scalar::{pad, Scalar};
use crate::Int;

/// Unit generators for one order, as stored in the bundled data file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnitRecord {
    #[serde(rename = "D")]
    pub d: Int,
    pub delta: Quad,
    pub units: Vec<KElem>,
    pub source: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnitFile {
    pub fields: Vec<UnitRecord>,
}

/// The cone data `u₁, u₂, u₃`, the eight subset products `𝔘` and
/// `M = 4·max Tr(𝔘)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConeData {
    pub u: [KElem; 3],
    pub u_set: Vec<KElem>,
    pub m: Int,
    /// `[Z³ : H]` for the exponent lattice `H` of the group inside the
    /// lattice spanned by the input generators.
    pub index: Int,
}

fn big_order<Z: Scalar>(o: &RelOrder<Z>) -> Result<RelOrder<BigInt>> {
    let f = QuadField::<BigInt>::new(o.field().disc().to_bigint())?;
    make_order(&f, o.delta().to_big())
}

const F64_PREC: u32 = 96;

/// Largest power of the plus unit tried during exponent recovery.
const MAX_PLUS_POWER: u32 = 12;

/// Enclosures of the four real embeddings.
fn embeddings(o: &RelOrder<BigInt>, x: &KElem<BigInt>, prec: u32) -> [Interval; 4] {
    let f = o.field();
    let a = o.trace_f(x);
    let two = Interval::from_int(&BigInt::from(2), prec);
    let mut out = Vec::with_capacity(4);
    for e in Emb::BOTH {
        let ra = Interval::from_surd(&f.rho(&a, e), prec);
        let rb = Interval::from_surd(&f.rho(&x.b, e), prec);
        let dl = Interval::from_surd(&f.rho(o.delta(), e), prec).sqrt();
        let q = rb * dl;
        out.push((ra.clone() + q.clone()).div(&two).expect("2 ≠ 0"));
        out.push((ra - q).div(&two).expect("2 ≠ 0"));
    }
    out.try_into().expect("four embeddings")
}

/// Enclosures of `log|σⱼ(x)|`, refining precision until every embedding is
/// certified nonzero.
fn log_embeddings(o: &RelOrder<BigInt>, x: &KElem<BigInt>) -> [(f64, f64); 4] {
    let mut prec = F64_PREC;
    loop {
        let em = embeddings(o, x, prec);
        let logs: Option<Vec<(f64, f64)>> = em
            .iter()
            .map(|v| match v.sign() {
                Some(Ordering::Greater) => v.ln_bounds(),
                Some(Ordering::Less) => (-v.clone()).ln_bounds(),
                _ => None,
            })
            .collect();
        if let Some(l) = logs {
            return l.try_into().expect("four logs");
        }
        prec *= 2;
        assert!(prec < 1 << 16, "unit embedding not separated from zero");
    }
}

/// Outward-rounded floating interval, for the regulator determinant.
#[derive(Clone, Copy, Debug)]
struct Fi(f64, f64);

impl Fi {
    fn add(self, o: Fi) -> Fi {
        Fi((self.0 + o.0).next_down(), (self.1 + o.1).next_up())
    }
    fn neg(self) -> Fi {
        Fi(-self.1, -self.0)
    }
    fn mul(self, o: Fi) -> Fi {
        let p = [self.0 * o.0, self.0 * o.1, self.1 * o.0, self.1 * o.1];
        let lo = p.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = p.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        Fi(lo.next_down(), hi.next_up())
    }
    fn excludes_zero(self) -> bool {
        self.0 > 0.0 || self.1 < 0.0
    }
}

fn det3(m: [[Fi; 3]; 3]) -> Fi {
    let minor = |a: Fi, b: Fi, c: Fi, d: Fi| a.mul(d).add(b.mul(c).neg());
    let t0 = m[0][0].mul(minor(m[1][1], m[1][2], m[2][1], m[2][2]));
    let t1 = m[0][1].mul(minor(m[1][0], m[1][2], m[2][0], m[2][2]));
    let t2 = m[0][2].mul(minor(m[1][0], m[1][1], m[2][0], m[2][1]));
    t0.add(t1.neg()).add(t2)
}

/// Checks `|N_{K/Q}(g)| = 1` for each generator and that their logarithmic
/// embeddings have rank 3.
pub fn verify_units<Z: Scalar>(o: &RelOrder<Z>, units: &[KElem<Z>]) -> Result<()> {
    if units.len() != 3 {
        return Err(Error::Data(format!("expected 3 unit generators, got {}", units.len())));
    }
    let bo = big_order(o)?;
    let big: Vec<KElem<BigInt>> = units.iter().map(|u| u.to_big()).collect();
    for u in &big {
        if !bo.is_unit(u) {
            return Err(Error::NotAUnit(u.to_string()));
        }
    }
    let logs: Vec<[(f64, f64); 4]> = big.iter().map(|u| log_embeddings(&bo, u)).collect();
    // the four logs of a unit sum to zero, so any three columns suffice
    let m: [[Fi; 3]; 3] = std::array::from_fn(|i| std::array::from_fn(|j| Fi(logs[i][j].0, logs[i][j].1)));
    if !det3(m).excludes_zero() {
        return Err(Error::RankDeficient);
    }
    Ok(())
}

/// `x^k` for a unit and any integer `k`.
fn unit_pow(o: &RelOrder<BigInt>, x: &KElem<BigInt>, k: i64) -> KElem<BigInt> {
    let base = if k < 0 {
        o.inverse(x).expect("unit")
    } else {
        x.clone()
    };
    o.pow(&base, k.unsigned_abs() as u32)
}

fn unit_product(o: &RelOrder<BigInt>, g: &[KElem<BigInt>], e: &[i64]) -> KElem<BigInt> {
    g.iter()
        .zip(e)
        .fold(KElem::one(), |acc, (x, &k)| o.mul(&acc, &unit_pow(o, x, k)))
}

/// Midpoint log vector (first three embeddings).
fn log_mid(o: &RelOrder<BigInt>, x: &KElem<BigInt>) -> [f64; 4] {
    log_embeddings(o, x).map(|(a, b)| (a + b) / 2.0)
}

fn solve3(a: [[f64; 3]; 3], b: [f64; 3]) -> [f64; 3] {
    let det = |m: [[f64; 3]; 3]| {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    };
    let d = det(a);
    std::array::from_fn(|k| {
        let mut m = a;
        for (row, bv) in m.iter_mut().zip(b) {
            row[k] = bv;
        }
        det(m) / d
    })
}

/// Exponents `v` with `x = ±∏ gᵢ^{vᵢ}`, from the logarithms and confirmed by
/// exact multiplication over a small neighbourhood.
fn recover_exponents(o: &RelOrder<BigInt>, g: &[KElem<BigInt>], x: &KElem<BigInt>) -> Result<[i64; 3]> {
    let lg: Vec<[f64; 4]> = g.iter().map(|u| log_mid(o, u)).collect();
    let lx = log_mid(o, x);
    // x = ∏ g^v ⇒ Σ vᵢ·log gᵢ = log x, columnwise
    let a: [[f64; 3]; 3] = std::array::from_fn(|j| std::array::from_fn(|i| lg[i][j]));
    let v = solve3(a, [lx[0], lx[1], lx[2]]);
    if v.iter().any(|c| !c.is_finite() || c.abs() > 1e6) {
        return Err(Error::ExponentRecoveryFailed(x.to_string()));
    }
    let base = v.map(|c| c.round() as i64);
    let neg = KElem {
        a: -&x.a,
        b: -&x.b,
    };
    for d0 in -1..=1 {
        for d1 in -1..=1 {
            for d2 in -1..=1 {
                let e = [base[0] + d0, base[1] + d1, base[2] + d2];
                let p = unit_product(o, g, &e);
                if &p == x || p == neg {
                    return Ok(e);
                }
            }
        }
    }
    Err(Error::ExponentRecoveryFailed(x.to_string()))
}

/// Column Hermite normal form of integer vectors in `Z³`: returns a basis of
/// the lattice they span, lower triangular with positive diagonal.
pub fn hnf_basis(gens: &[[i64; 3]]) -> Result<[[i64; 3]; 3]> {
    let mut cols: Vec<[i128; 3]> = gens.iter().map(|g| g.map(|x| x as i128)).collect();
    let mut basis = [[0i128; 3]; 3];
    for (row, slot) in basis.iter_mut().enumerate() {
        // gcd-reduce the entries of this row across the remaining columns
        loop {
            cols.retain(|c| c.iter().any(|&x| x != 0));
            let nz: Vec<usize> = (0..cols.len()).filter(|&i| cols[i][row] != 0).collect();
            if nz.len() <= 1 {
                break;
            }
            let p = *nz.iter().min_by_key(|&&i| cols[i][row].abs()).expect("nonempty");
            for &i in &nz {
                if i != p {
                    let q = cols[i][row].div_euclid(cols[p][row]);
                    let pc = cols[p];
                    for (k, x) in cols[i].iter_mut().enumerate() {
                        *x -= q * pc[k];
                    }
                }
            }
        }
        let Some(p) = (0..cols.len()).find(|&i| cols[i][row] != 0) else {
            return Err(Error::RankDeficient);
        };
        let mut c = cols.remove(p);
        if c[row] < 0 {
            c = c.map(|x| -x);
        }
        *slot = c;
    }
    // reduce entries below the diagonal into [0, pivot)
    for j in 0..3 {
        for k in 0..j {
            let q = basis[k][j].div_euclid(basis[j][j]);
            let bj = basis[j];
            for (i, x) in basis[k].iter_mut().enumerate() {
                *x -= q * bj[i];
            }
        }
    }
    let out = basis.map(|c| c.map(|x| x as i64));
    Ok(out)
}

fn det3_i(m: [[i64; 3]; 3]) -> i128 {
    let m = m.map(|r| r.map(|x| x as i128));
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

/// Integer coordinates of `v` in the basis `b` (rows), if it lies in the span.
fn coords_in(b: [[i64; 3]; 3], v: [i64; 3]) -> Option<[i64; 3]> {
    let d = det3_i(b);
    if d == 0 {
        return None;
    }
    let mut out = [0i64; 3];
    for (k, slot) in out.iter_mut().enumerate() {
        let mut m = b;
        m[k] = v;
        let num = det3_i(m);
        if num % d != 0 {
            return None;
        }
        *slot = (num / d) as i64;
    }
    Some(out)
}

/// The totally positive generator of `O_F^{×,+}`: `ε` if `N(ε) = 1`,
/// otherwise `ε²`.
fn plus_unit(f: &QuadField<BigInt>) -> Quad<BigInt> {
    let eps = f.eps_fund_big().clone();
    if f.eps_fund_norm() == 1 {
        eps
    } else {
        f.square(&eps)
    }
}

/// Sign-corrects `x` to be totally positive, if `x` or `−x` is.
fn make_tp(o: &RelOrder<BigInt>, x: KElem<BigInt>) -> Option<KElem<BigInt>> {
    if o.totally_positive(&x) {
        return Some(x);
    }
    let n = KElem {
        a: -&x.a,
        b: -&x.b,
    };
    o.totally_positive(&n).then_some(n)
}

/// `max_{v∈𝔘} Tr(v)` estimated from log embeddings.
fn approx_cone_trace(logs: &[[f64; 4]; 3]) -> f64 {
    let mut best: f64 = 0.0;
    for mask in 0..8u32 {
        let mut l = [0.0; 4];
        for (i, li) in logs.iter().enumerate() {
            if mask >> i & 1 == 1 {
                for j in 0..4 {
                    l[j] += li[j];
                }
            }
        }
        best = best.max(l.iter().map(|x| x.exp()).sum());
    }
    best
}

/// A basis of `O_F^{×,+}·O_K^{×2}` built from generators of `O_K^×/±1`.
///
/// In exponent coordinates the group is spanned by `2e₁, 2e₂, 2e₃` and the
/// vector of the totally positive unit of `F`. Among bases reachable from its
/// Hermite form by small unimodular changes, the one with the smallest
/// (estimated) `max Tr(𝔘)` is kept. Every generator of the group is checked
/// to be an exact product of the returned units. Also returns the index in
/// `Z³`.
pub fn derive_plus_square_basis<Z: Scalar>(
    o: &RelOrder<Z>,
    units: &[KElem<Z>],
) -> Result<([KElem<BigInt>; 3], i64)> {
    verify_units(o, units)?;
    let bo = big_order(o)?;
    let g: Vec<KElem<BigInt>> = units.iter().map(|u| u.to_big()).collect();
    // the generators may span a finite-index subgroup (non-maximal orders),
    // so fall back to the least power of the plus unit they reach
    let eps1 = KElem::from_base(plus_unit(bo.field()));
    let mut found = None;
    for k in 1..=MAX_PLUS_POWER {
        let e = bo.pow(&eps1, k);
        if let Ok(v) = recover_exponents(&bo, &g, &e) {
            found = Some((e, v));
            break;
        }
    }
    let (eps, v) = found.ok_or_else(|| Error::ExponentRecoveryFailed(eps1.to_string()))?;
    let gens = [[2, 0, 0], [0, 2, 0], [0, 0, 2], v];
    let h = hnf_basis(&gens)?;
    let index = det3_i(h).abs() as i64;

    // small combinations of the Hermite basis, with their log vectors
    let lg: Vec<[f64; 4]> = g.iter().map(|u| log_mid(&bo, u)).collect();
    let mut cands: Vec<([i64; 3], [f64; 4])> = Vec::new();
    for c0 in -2i64..=2 {
        for c1 in -2i64..=2 {
            for c2 in -2i64..=2 {
                if (c0, c1, c2) == (0, 0, 0) {
                    continue;
                }
                let e: [i64; 3] = std::array::from_fn(|k| c0 * h[0][k] + c1 * h[1][k] + c2 * h[2][k]);
                let l: [f64; 4] = std::array::from_fn(|j| (0..3).map(|i| e[i] as f64 * lg[i][j]).sum());
                cands.push(([c0, c1, c2], l));
            }
        }
    }
    let mut best: Option<(f64, [[i64; 3]; 3])> = None;
    for i in 0..cands.len() {
        for j in i + 1..cands.len() {
            for k in j + 1..cands.len() {
                let c = [cands[i].0, cands[j].0, cands[k].0];
                if det3_i(c).abs() != 1 {
                    continue;
                }
                let t = approx_cone_trace(&[cands[i].1, cands[j].1, cands[k].1]);
                if best.as_ref().is_none_or(|(bt, _)| t < *bt) {
                    best = Some((t, c));
                }
            }
        }
    }
    let (_, coef) = best.expect("the Hermite basis itself is unimodular");
    let exps: [[i64; 3]; 3] =
        coef.map(|c| std::array::from_fn(|k| c[0] * h[0][k] + c[1] * h[1][k] + c[2] * h[2][k]));
    let mut u = Vec::with_capacity(3);
    for e in &exps {
        let x = make_tp(&bo, unit_product(&bo, &g, e))
            .ok_or_else(|| Error::NotAUnit("basis element is not ± totally positive".into()))?;
        u.push(x);
    }
    // each group generator is an exact product of the new basis
    for (gen, target) in gens.iter().zip([
        bo.mul(&g[0], &g[0]),
        bo.mul(&g[1], &g[1]),
        bo.mul(&g[2], &g[2]),
        eps.clone(),
    ]) {
        let c = coords_in(exps, *gen).ok_or_else(|| Error::ExponentRecoveryFailed(format!("{gen:?}")))?;
        let p = unit_product(&bo, &u, &c);
        if p != target {
            return Err(Error::ExponentRecoveryFailed(format!("{gen:?}")));
        }
    }
    Ok((u.try_into().expect("three units"), index))
}

/// `𝔘` and `M` for a basis of totally positive units.
pub fn cone_data<Z: Scalar>(o: &RelOrder<Z>, u: &[KElem<BigInt>; 3], index: i64) -> Result<ConeData> {
    let bo = big_order(o)?;
    let mut set = Vec::with_capacity(8);
    for mask in 0..8u32 {
        let mut p = KElem::one();
        for (i, x) in u.iter().enumerate() {
            if mask >> i & 1 == 1 {
                p = bo.mul(&p, x);
            }
        }
        if !bo.totally_positive(&p) || !bo.is_unit(&p) {
            return Err(Error::NotAUnit(p.to_string()));
        }
        set.push(p);
    }
    let m = BigInt::from(4) * set.iter().map(|v| bo.trace_q(v)).max().expect("nonempty");
    let conv = |x: &KElem<BigInt>| x.convert::<Int>().ok_or(Error::UnitTooLarge);
    Ok(ConeData {
        u: [conv(&u[0])?, conv(&u[1])?, conv(&u[2])?],
        u_set: set.iter().map(conv).collect::<Result<_>>()?,
        m: m.to_i128().ok_or(Error::UnitTooLarge)?,
        index: index as Int,
    })
}

/// `M(𝔘) = 4·max Tr(𝔘)`.
pub fn trace_bound(o: &RelOrder, cone: &ConeData) -> Int {
    4 * cone.u_set.iter().map(|v| o.trace_q(v)).max().expect("nonempty")
}

/// Verifies a unit record against the order and derives its cone.
pub fn cone_from_record(o: &RelOrder, rec: &UnitRecord) -> Result<ConeData> {
    if &rec.delta != o.delta() || &rec.d != o.field().disc() {
        return Err(Error::Data(format!("unit record for D = {}, delta = {} does not match", rec.d, rec.delta)));
    }
    let (u, index) = derive_plus_square_basis(o, &rec.units)?;
    cone_data(o, &u, index)
}

/// Floating embeddings `(σ₁₊, σ₁₋, σ₂₊, σ₂₋)`.
fn sigma(o: &RelOrder, x: &KElem) -> [f64; 4] {
    o.approx(x)
}

/// Whether `α = β + γ` with `β, γ ≻ 0`.
///
/// Writing `β = a + bw` and `c = Tr_{K/F}(β)`, the conditions
/// `0 < σ(β) < σ(α)` at the four embeddings confine `ρᵢ(b)√δᵢ` to
/// `(−σᵢ₋(α), σᵢ₊(α))` and `ρᵢ(c)` to `(|q|, min(2σᵢ₊ − q, 2σᵢ₋ + q))` with
/// `q = ρᵢ(b)√δᵢ`. One of `β`, `γ` has at most half the trace, so `β` is
/// searched with `Tr β ≤ Tr α / 2`.
pub fn is_decomposable(o: &RelOrder, alpha: &KElem) -> bool {
    let f = o.field();
    let one = KElem::one();
    if o.succ(alpha, &one) {
        return true;
    }
    let s = sigma(o, alpha);
    let sd = o.delta_sqrt_f64();
    let half = o.trace_q(alpha) / 2;
    if half < 4 {
        return false;
    }
    let two = 2i128;
    let bs = f.box_points([-s[1] / sd[0], -s[3] / sd[1]], [s[0] / sd[0], s[2] / sd[1]]);
    for b in bs {
        let rb = f.approx(&b);
        let q = [rb[0] * sd[0], rb[1] * sd[1]];
        let lo = [q[0].abs(), q[1].abs()];
        let hi = [
            (2.0 * s[0] - q[0]).min(2.0 * s[1] + q[0]),
            (2.0 * s[2] - q[1]).min(2.0 * s[3] + q[1]),
        ];
        if lo[0] > hi[0] + pad(hi[0]) || lo[1] > hi[1] + pad(hi[1]) {
            continue;
        }
        let bt = f.mul(&b, o.t());
        for c in f.box_points(lo, hi) {
            let d = &c - &bt;
            if d.m.rem_euclid(two) != 0 || d.n.rem_euclid(two) != 0 {
                continue;
            }
            let a = d.div_int(&two).expect("parity checked");
            let beta = KElem::new(a, b.clone());
            if o.trace_q(&beta) <= half && o.totally_positive(&beta) && o.succ(alpha, &beta) {
                return true;
            }
        }
    }
    false
}

/// All indecomposable totally positive `α` with `Tr α ≤ M`, sorted by trace
/// then coordinates.
pub fn indecomposables_up_to(o: &RelOrder, m: Int) -> Vec<KElem> {
    let mut e = IndecEnumerator::new(o);
    e.advance(m);
    e.found().to_vec()
}

/// Incremental enumeration of indecomposables by increasing trace.
///
/// `α ≻ 0` is decomposable iff `α ≻ ι` for some indecomposable `ι` of
/// smaller trace: descend from any summand `β` while it decomposes. So
/// candidates are processed in trace order and compared only against the
/// indecomposables already found.
pub struct IndecEnumerator<'a> {
    o: &'a RelOrder,
    reached: Int,
    found: Vec<KElem>,
    approx: Vec<[f64; 4]>,
}

impl<'a> IndecEnumerator<'a> {
    pub fn new(o: &'a RelOrder) -> Self {
        IndecEnumerator {
            o,
            reached: 0,
            found: Vec::new(),
            approx: Vec::new(),
        }
    }

    /// Everything found so far, sorted by trace then coordinates.
    pub fn found(&self) -> &[KElem] {
        &self.found
    }

    /// Extends the search to `Tr ≤ hi`; returns the newly found elements.
    pub fn advance(&mut self, hi: Int) -> &[KElem] {
        let start = self.found.len();
        if hi <= self.reached {
            return &self.found[start..];
        }
        let mut cands = strip_candidates(self.o, self.reached, hi);
        cands.sort_by_cached_key(|x| self.o.sort_key(x));
        let mut cur_trace = None;
        let mut level_start = self.found.len();
        for alpha in cands {
            let tr = self.o.trace_q(&alpha);
            if cur_trace != Some(tr) {
                cur_trace = Some(tr);
                level_start = self.found.len();
            }
            if !self.dominates_known(&alpha, level_start) {
                self.approx.push(self.o.approx(&alpha));
                self.found.push(alpha);
            }
        }
        self.reached = hi;
        &self.found[start..]
    }

    /// `α ≻ ι` for some known `ι` among the first `limit` (all of smaller
    /// trace). Floats only discard; the decision is exact.
    fn dominates_known(&self, alpha: &KElem, limit: usize) -> bool {
        let s = self.o.approx(alpha);
        let margin = pad(s.iter().fold(0.0f64, |a, x| a.max(x.abs())));
        self.approx[..limit].iter().zip(&self.found).any(|(v, iota)| {
            (0..4).all(|j| s[j] - v[j] > -margin) && self.o.succ(alpha, iota)
        })
    }
}

/// Totally positive `α` with `lo < Tr α ≤ hi` and `α ⊁ 1`.
///
/// An element with `α ⊁ 1` has some embedding `≤ 1`, so for each `b` only
/// the strips `ρᵢ(c) ≤ |ρᵢ(b)|√δᵢ + 2` are scanned.
fn strip_candidates(o: &RelOrder, lo: Int, hi: Int) -> Vec<KElem> {
    let f = o.field();
    let tf = hi as f64;
    if hi < 4 {
        return Vec::new();
    }
    let sd = o.delta_sqrt_f64();
    let p = pad(tf);
    let one = KElem::one();
    let bs = f.box_points([-tf / sd[0], -tf / sd[1]], [tf / sd[0], tf / sd[1]]);
    let mut out = Vec::new();
    for b in bs {
        let rb = f.approx(&b);
        let l = [rb[0].abs() * sd[0], rb[1].abs() * sd[1]];
        if l[0] + l[1] > tf + p {
            continue;
        }
        let bt = f.mul(&b, o.t());
        let mut cs = f.box_points([l[0], l[1]], [l[0] + 2.0, tf - l[0]]);
        cs.extend(f.box_points([l[0], l[1]], [tf - l[1], l[1] + 2.0]));
        cs.sort();
        cs.dedup();
        for c in cs {
            let d = &c - &bt;
            if d.m.rem_euclid(2) != 0 || d.n.rem_euclid(2) != 0 {
                continue;
            }
            let alpha = KElem::new(d.div_int(&2).expect("parity checked"), b.clone());
            let tr = o.trace_q(&alpha);
            if tr > lo && tr <= hi && o.totally_positive(&alpha) && !o.succ(&alpha, &one) {
                out.push(alpha);
            }
        }
    }
    out
}

/// Trace bands `(lo, hi]` covering `(0, m]`, doubling from 64.
pub fn trace_bands(m: Int) -> Vec<(Int, Int)> {
    let mut out = Vec::new();
    let mut lo = 0;
    let mut hi: Int = 64;
    while lo < m {
        let h = hi.min(m);
        out.push((lo, h));
        lo = h;
        hi *= 2;
    }
    out
}

/// Indecomposables up to the cone's trace bound.
pub fn indecomposables_under_bound(o: &RelOrder, cone: &ConeData) -> Vec<KElem> {
    indecomposables_up_to(o, cone.m)
}

/// Parses a unit data file.
pub fn parse_unit_file(s: &str) -> Result<UnitFile> {
    serde_json::from_str(s).map_err(|e| Error::Data(e.to_string()))
}
