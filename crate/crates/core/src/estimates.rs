//! Sweeps that check the lattice-count and convergence inequalities at desk scale.
//!
//! Every comparison is an exact rational comparison. Constants that the
//! inequalities leave unspecified are fitted from the sweep (the smallest value
//! that makes every sampled instance hold) and reported. Boundedness in `k` is
//! tested by a two-halves proxy: the supremum over the upper half of the `k`
//! range must not exceed twice the supremum over the lower half.
//!
//! [`rate_fit`] is the only floating-point computation.

use std::collections::BTreeMap;

use num::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::geometry::{AffineFunctional, ConcavePL, ConvexBody, HalfSpace, Point};
use crate::io::{JsonRat, Table};
use crate::lattice::{self, lower_bound_constant};
use crate::par::{map_slice, Exec};
use crate::rational::{fmt_rat, int, rat, root_upper, to_f64, Rat, SQRT_BITS};
use crate::series::{gap_sequences_of_genus, Backend, GradedSeriesModel};
use crate::thresholds::{
    delta_km_restricted, delta_tau_restricted, idealized_jumping, jumping_numbers, partial_counts, quantile, s_tau,
    Estimate, MRule, Threshold, ValuationModel,
};
use crate::{catalog, Error, Result};

/// An inclusive range of levels `lo..=hi`, split at `(lo + hi) / 2` for the
/// two-halves test.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct KRange {
    pub lo: u64,
    pub hi: u64,
}

impl KRange {
    pub fn new(lo: u64, hi: u64) -> Result<Self> {
        if lo == 0 || lo > hi {
            return Err(Error::Domain(format!("invalid k range [{lo}, {hi}]")));
        }
        Ok(KRange { lo, hi })
    }

    pub fn ks(&self) -> Vec<u64> {
        (self.lo..=self.hi).collect()
    }

    pub fn mid(&self) -> u64 {
        (self.lo + self.hi) / 2
    }

    pub fn is_upper(&self, k: u64) -> bool {
        k > self.mid()
    }
}

/// A least-squares fit of `log|value - limit|` against `log k`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RateFit {
    /// `-inf` when every sample equals the limit.
    pub exponent: f64,
    pub residual: f64,
    pub samples: usize,
}

impl RateFit {
    pub fn is_exact(&self) -> bool {
        self.exponent == f64::NEG_INFINITY
    }
}

impl Serialize for RateFit {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("RateFit", 3)?;
        if self.is_exact() {
            st.serialize_field("exponent_approx", "-inf")?;
        } else {
            st.serialize_field("exponent_approx", &self.exponent)?;
        }
        st.serialize_field("residual_approx", &self.residual)?;
        st.serialize_field("samples", &self.samples)?;
        st.end()
    }
}

/// Fits `|value - limit| ≈ c·k^e` and returns `e` with the RMS residual.
/// Samples equal to the limit are left out of the fit.
pub fn rate_fit(samples: &[(u64, Rat)], limit: &Rat) -> Result<RateFit> {
    if samples.len() < 4 {
        return Err(Error::Domain(format!("rate fit needs at least 4 samples, got {}", samples.len())));
    }
    let pts: Vec<(f64, f64)> = samples
        .iter()
        .filter(|(_, v)| v != limit)
        .map(|(k, v)| ((*k as f64).ln(), to_f64(&(v - limit).abs()).ln()))
        .collect();
    if pts.is_empty() {
        return Ok(RateFit { exponent: f64::NEG_INFINITY, residual: 0.0, samples: samples.len() });
    }
    if pts.len() < 3 {
        return Err(Error::Domain(format!("rate fit needs 3 samples away from the limit, got {}", pts.len())));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(Error::Domain("rate fit needs at least two distinct k".into()));
    }
    let slope = sxy / sxx;
    let ss: f64 = pts.iter().map(|p| (p.1 - my - slope * (p.0 - mx)).powi(2)).sum();
    Ok(RateFit { exponent: slope, residual: (ss / n).sqrt(), samples: samples.len() })
}

/// One assertion of a sweep. Failed checks carry the counterexample.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

/// Result of a verification sweep.
#[derive(Clone, Debug, Serialize)]
pub struct SweepReport {
    pub assertion: String,
    pub grid: BTreeMap<String, String>,
    pub checks: Vec<Check>,
    pub witnesses: Vec<String>,
    pub fitted_constants: BTreeMap<String, JsonRat>,
    #[serde(rename = "exponent")]
    pub exponents: BTreeMap<String, RateFit>,
    pub rows: Table,
}

impl SweepReport {
    pub fn new<S: Into<String>>(assertion: &str, columns: impl IntoIterator<Item = S>) -> Self {
        SweepReport {
            assertion: assertion.to_string(),
            grid: BTreeMap::new(),
            checks: Vec::new(),
            witnesses: Vec::new(),
            fitted_constants: BTreeMap::new(),
            exponents: BTreeMap::new(),
            rows: Table::new(columns),
        }
    }

    pub fn grid(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.grid.insert(key.to_string(), value.to_string());
        self
    }

    pub fn constant(&mut self, key: &str, value: Rat) {
        self.fitted_constants.insert(key.to_string(), JsonRat(value));
    }

    pub fn get_constant(&self, key: &str) -> Option<&Rat> {
        self.fitted_constants.get(key).map(|r| &r.0)
    }

    /// Records an assertion; `witness` is only built when it fails.
    pub fn check(&mut self, name: &str, passed: bool, witness: impl FnOnce() -> String) {
        let witness = (!passed).then(witness);
        if let Some(w) = &witness {
            self.witnesses.push(format!("{name}: {w}"));
        }
        self.checks.push(Check { name: name.to_string(), passed, witness });
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failed_checks(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_csv(&self) -> String {
        self.rows.to_csv()
    }

    /// Appends the checks, constants and exponents of `other`, prefixed by its name.
    pub fn absorb(&mut self, other: SweepReport) {
        let p = other.assertion;
        for c in other.checks {
            self.checks.push(Check { name: format!("{p}/{}", c.name), ..c });
        }
        self.witnesses.extend(other.witnesses.into_iter().map(|w| format!("{p}/{w}")));
        for (k, v) in other.fitted_constants {
            self.fitted_constants.insert(format!("{p}/{k}"), v);
        }
        for (k, v) in other.exponents {
            self.exponents.insert(format!("{p}/{k}"), v);
        }
    }
}

fn kq(k: u64) -> Rat {
    Rat::from_integer(k.into())
}

fn max_rat<'a>(it: impl IntoIterator<Item = &'a Rat>) -> Rat {
    it.into_iter().fold(Rat::zero(), |m, x| if *x > m { x.clone() } else { m })
}

/// Two-halves stability of a nonnegative per-`k` quantity.
fn stability(report: &mut SweepReport, name: &str, per_k: &[(u64, Rat)], range: KRange) -> (Rat, Rat) {
    let lo = max_rat(per_k.iter().filter(|(k, _)| !range.is_upper(*k)).map(|(_, v)| v));
    let hi = max_rat(per_k.iter().filter(|(k, _)| range.is_upper(*k)).map(|(_, v)| v));
    let ok = hi <= int(2) * &lo;
    report.check(name, ok, || {
        let (k, v) = per_k.iter().filter(|(k, _)| range.is_upper(*k)).max_by(|a, b| a.1.cmp(&b.1)).expect("upper half");
        format!("k = {k}: {} exceeds 2 x lower-half sup {}", fmt_rat(v), fmt_rat(&lo))
    });
    (lo, hi)
}

/// Rate fit over the samples in the upper half of the range.
fn upper_half_fit(report: &mut SweepReport, name: &str, samples: &[(u64, Rat)], limit: &Rat, range: KRange) {
    let upper: Vec<(u64, Rat)> = samples.iter().filter(|(k, _)| range.is_upper(*k)).cloned().collect();
    match rate_fit(&upper, limit) {
        Ok(f) => {
            report.exponents.insert(name.to_string(), f);
        }
        Err(e) => {
            report.grid(&format!("{name}_fit"), e);
        }
    }
}

/// Smallest rational `C` (rounded up) with `C^e >= x` for the largest `x`.
fn fit_root(values: impl IntoIterator<Item = Rat>, e: u32) -> Rat {
    let m = values.into_iter().fold(Rat::zero(), |m, x| if x > m { x } else { m });
    root_upper(&m, e, SQRT_BITS)
}

// ---------------------------------------------------------------- samplers

fn grid_coord(rng: &mut ChaCha8Rng, lo: &Rat, hi: &Rat, den: i64) -> Rat {
    let steps = ((hi - lo) * int(den)).floor().to_integer().to_i64().unwrap_or(0).max(0);
    lo + rat(rng.random_range(0..=steps), den)
}

/// `count` seeded convex sub-bodies of `k` with volume at least `nu`: a mix of
/// axis-parallel boxes and hulls of random grid points, clipped to `k`.
pub fn sample_sub_bodies(k: &ConvexBody, seed: u64, count: usize, nu: &Rat) -> Result<Vec<ConvexBody>> {
    let n = k.dim();
    let bbox: Vec<(Rat, Rat)> = (0..n)
        .map(|i| k.range(&AffineFunctional::coordinate(n, i)).ok_or(Error::EmptyInput("ambient body")))
        .collect::<Result<_>>()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    let mut attempts = 0usize;
    while out.len() < count {
        attempts += 1;
        if attempts > 200 * count.max(1) {
            return Err(Error::Domain(format!("could not sample {count} bodies of volume >= {nu}")));
        }
        let candidate = if rng.random_bool(0.5) {
            let mut hs = Vec::with_capacity(2 * n);
            for (i, (lo, hi)) in bbox.iter().enumerate() {
                let (a, b) = (grid_coord(&mut rng, lo, hi, 20), grid_coord(&mut rng, lo, hi, 20));
                let (a, b) = if a <= b { (a, b) } else { (b, a) };
                hs.push(HalfSpace::lower(n, i, a));
                hs.push(HalfSpace::upper(n, i, b));
            }
            k.intersect(&hs)?
        } else {
            let m = rng.random_range(n + 1..=n + 5);
            let pts: Vec<Point> = (0..m)
                .map(|_| Point::new(bbox.iter().map(|(lo, hi)| grid_coord(&mut rng, lo, hi, 20)).collect()))
                .collect();
            let h = ConvexBody::hull(&pts)?;
            k.intersect(h.halfspaces())?
        };
        if candidate.is_full_dimensional() && candidate.volume() >= *nu {
            out.push(candidate);
        }
    }
    Ok(out)
}

/// `count` seeded full-dimensional rational polytopes in `[0, 2]^n` with
/// vertices on grids of denominators 2 to 5.
pub fn sample_polytopes(n: usize, seed: u64, count: usize) -> Result<Vec<ConvexBody>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let den = rng.random_range(2..=5i64);
        let m = rng.random_range(n + 1..=n + 5);
        let pts: Vec<Point> =
            (0..m).map(|_| Point::new((0..n).map(|_| rat(rng.random_range(0..=2 * den), den)).collect())).collect();
        let b = ConvexBody::hull(&pts)?;
        if b.is_full_dimensional() {
            out.push(b);
        }
    }
    Ok(out)
}

/// A seeded concave function `min_i (a_i·x + c_i)`, nonnegative on `p`.
pub fn sample_concave(p: &ConvexBody, rng: &mut ChaCha8Rng) -> ConcavePL {
    let n = p.dim();
    let pieces = (0..rng.random_range(1..=3))
        .map(|_| {
            let grad: Vec<Rat> = (0..n).map(|_| int(rng.random_range(-2..=2))).collect();
            let f = AffineFunctional::new(grad, Rat::zero());
            let low = p.vertices().iter().map(|v| f.eval(v)).min().unwrap_or_default();
            AffineFunctional::new(f.gradient, -low + rat(rng.random_range(0..=4), 2))
        })
        .collect();
    ConcavePL::new(pieces).expect("at least one piece")
}

/// Sub-bodies of `k` paired with seeded concave functions.
pub fn sample_concave_pairs(k: &ConvexBody, seed: u64, count: usize, nu: &Rat) -> Result<Vec<(ConvexBody, ConcavePL)>> {
    let bodies = sample_sub_bodies(k, seed, count, nu)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    Ok(bodies.into_iter().map(|b| {
        let g = sample_concave(&b, &mut rng);
        (b, g)
    }).collect())
}

// ---------------------------------------------------------------- lattice estimates

/// `M(k) = max_P |count(P,k) - |P|k^n| / k^{n-1}` over the sub-bodies, with the
/// two-halves stability test.
pub fn verify_uniform_ehrhart(
    k_body: &ConvexBody,
    bodies: &[ConvexBody],
    nu: &Rat,
    range: KRange,
    exec: Exec,
) -> Result<SweepReport> {
    if !nu.is_positive() || *nu > k_body.volume() {
        return Err(Error::Domain(format!("nu = {} outside (0, |K|]", fmt_rat(nu))));
    }
    for (i, p) in bodies.iter().enumerate() {
        if p.dim() != k_body.dim() || !p.vertices().iter().all(|v| k_body.contains(v)) {
            return Err(Error::Domain(format!("sub-body {i} is not inside K")));
        }
        if p.volume() < *nu {
            return Err(Error::Domain(format!("sub-body {i} has volume {} < nu", fmt_rat(&p.volume()))));
        }
    }
    if bodies.is_empty() {
        return Err(Error::EmptyInput("sub-bodies"));
    }
    let n = k_body.dim();
    let ks = range.ks();
    let per_k: Vec<Result<(u64, Rat, usize)>> = map_slice(exec, &ks, |&k| {
        let scale = num::pow(kq(k), n - 1);
        let mut best = (Rat::zero(), 0);
        for (i, p) in bodies.iter().enumerate() {
            let d = lattice::discrepancy(p, k)?.abs() / &scale;
            if d > best.0 {
                best = (d, i);
            }
        }
        Ok((k, best.0, best.1))
    });
    let mut report = SweepReport::new("ehrhart", ["k", "M_k", "argmax"]);
    report.grid("bodies", bodies.len()).grid("nu", fmt_rat(nu)).grid("k_range", format!("{}..={}", range.lo, range.hi));
    let mut values = Vec::with_capacity(ks.len());
    for r in per_k {
        let (k, m, i) = r?;
        report.rows.push(vec![k.to_string(), fmt_rat(&m), i.to_string()]);
        values.push((k, m));
    }
    let (lo, hi) = stability(&mut report, "upper_half_le_twice_lower_half", &values, range);
    report.constant("sup_lower_half", lo);
    report.constant("sup_upper_half", hi);
    Ok(report)
}

/// `count(P,k) >= (1 - C/k)|P|k^n` with `C = n^{3/2}/(2 r_lb)` for every `k > C` in range.
pub fn verify_lower_bound_constant(bodies: &[ConvexBody], range: KRange, exec: Exec) -> Result<SweepReport> {
    let per_body: Vec<Result<(Rat, Rat, Vec<u64>, Option<Rat>)>> = map_slice(exec, bodies, |p| {
        if !p.volume().is_positive() {
            return Err(Error::Degenerate("lower bound needs positive volume".into()));
        }
        let n = p.dim();
        let (_, r) = p.chebyshev_ball()?;
        let c = lower_bound_constant(n, &r);
        let vol = p.volume();
        let mut failures = Vec::new();
        let mut min_ratio: Option<Rat> = None;
        for k in range.ks().into_iter().filter(|&k| kq(k) > c) {
            let kn = num::pow(kq(k), n);
            let cnt = Rat::from_integer(lattice::count(p, k)?.into());
            if cnt < (Rat::one() - &c / kq(k)) * &vol * &kn {
                failures.push(k);
            }
            let ratio = cnt / (&vol * kn);
            if min_ratio.as_ref().is_none_or(|m| ratio < *m) {
                min_ratio = Some(ratio);
            }
        }
        Ok((r, c, failures, min_ratio))
    });
    let mut report = SweepReport::new("lowerbound", ["body", "radius_lb", "C", "min_count_ratio", "failures"]);
    report.grid("bodies", bodies.len()).grid("k_range", format!("{}..={}", range.lo, range.hi));
    let mut bad = Vec::new();
    let mut c_max = Rat::zero();
    for (i, r) in per_body.into_iter().enumerate() {
        let (radius, c, failures, min_ratio) = r?;
        report.rows.push(vec![
            i.to_string(),
            fmt_rat(&radius),
            fmt_rat(&c),
            min_ratio.as_ref().map_or("-".into(), fmt_rat),
            failures.len().to_string(),
        ]);
        if c > c_max {
            c_max = c;
        }
        bad.extend(failures.into_iter().map(|k| (i, k)));
    }
    report.constant("max_C", c_max);
    report.check("count_ge_lower_bound", bad.is_empty(), || {
        let (i, k) = bad[0];
        format!("body {i} ({:?}) at k = {k}", bodies[i].vertices().iter().map(|v| v.to_string()).collect::<Vec<_>>())
    });
    Ok(report)
}

/// `(concave_sum(P,G,k) - ∫_P G)·k / sup_P G`, maximized over the pairs, with the
/// two-halves stability test on its positive part.
pub fn verify_concave_sum_bound(pairs: &[(ConvexBody, ConcavePL)], range: KRange, exec: Exec) -> Result<SweepReport> {
    let mut prepared = Vec::with_capacity(pairs.len());
    for (i, (p, g)) in pairs.iter().enumerate() {
        let verts = p.linearity_vertices(g)?;
        if let Some(v) = verts.iter().find(|v| g.eval(v).is_negative()) {
            return Err(Error::Domain(format!("G of pair {i} is negative at {v}")));
        }
        let sup = verts.iter().map(|v| g.eval(v)).max().unwrap_or_default();
        if sup.is_positive() {
            prepared.push((p, g, p.integral_concave(g)?, sup));
        }
    }
    let ks = range.ks();
    let per_k: Vec<Result<(u64, Rat)>> = map_slice(exec, &ks, |&k| {
        let mut best: Option<Rat> = None;
        for (p, g, integral, sup) in &prepared {
            let q = (lattice::concave_sum(p, g, k)? - integral) * kq(k) / sup;
            if best.as_ref().is_none_or(|b| q > *b) {
                best = Some(q);
            }
        }
        Ok((k, best.unwrap_or_default()))
    });
    let mut report = SweepReport::new("concave", ["k", "max_scaled_excess"]);
    report.grid("pairs", pairs.len()).grid("k_range", format!("{}..={}", range.lo, range.hi));
    let mut positive = Vec::new();
    for r in per_k {
        let (k, q) = r?;
        report.rows.push(vec![k.to_string(), fmt_rat(&q)]);
        positive.push((k, if q.is_positive() { q } else { Rat::zero() }));
    }
    let (lo, hi) = stability(&mut report, "upper_half_le_twice_lower_half", &positive, range);
    report.constant("sup_lower_half", lo);
    report.constant("sup_upper_half", hi);
    Ok(report)
}

/// How `ℓ_k` is chosen in the cone sweeps.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EllRule {
    /// `ceil(k/2)`.
    HalfK,
    /// `ℓ_k = k`, the full cone.
    Full,
    /// `ceil(sqrt k)`.
    SqrtK,
}

impl EllRule {
    pub fn eval(&self, k: u64) -> u64 {
        match self {
            EllRule::HalfK => k.div_ceil(2),
            EllRule::Full => k,
            EllRule::SqrtK => {
                let r = k.isqrt();
                if r * r == k {
                    r
                } else {
                    r + 1
                }
            }
        }
    }
}

/// Lattice counts of the superlevel sets `{p₁ >= t}`, `t = b - (ℓ_k/k)(b - a)`,
/// of the apex cone (when `apex` is given) or of the slice cone.
///
/// For the apex cone the bound `count >= C₂ℓ_kⁿ` is certified for `ℓ_k > C₁` with
/// `C₁ = 2c`, `C₂ = |cone|/2`, where `c` is the lower-bound constant of the cone.
/// For the slice cone `C₂` is fitted as the smallest ratio `count/(k^ι ℓ_k^{n-ι})`
/// and checked for two-halves stability.
pub fn verify_cone_counts(
    b_body: &ConvexBody,
    a: &Rat,
    b: &Rat,
    apex: Option<&Point>,
    ell: EllRule,
    range: KRange,
    exec: Exec,
) -> Result<SweepReport> {
    let n = b_body.dim();
    let p1 = AffineFunctional::p1(n);
    let (cone, name) = match apex {
        Some(v) => (b_body.apex_cone(a, b, v)?, "cones_apex"),
        None => (b_body.slice_cone(a, b)?, "cones_slice"),
    };
    if !cone.is_full_dimensional() {
        return Err(Error::Degenerate("cone is not full-dimensional".into()));
    }
    let iota = b_body.slice(&p1, b)?.affine_dim().unwrap_or(0);
    let ks = range.ks();
    let rows: Vec<Result<(u64, u64, Rat, u64)>> = map_slice(exec, &ks, |&k| {
        let l = ell.eval(k).clamp(1, k);
        let t = b - (kq(l) / kq(k)) * (b - a);
        let body = cone.intersect_halfspace(&HalfSpace::lower(n, 0, t.clone()))?;
        Ok((k, l, t, lattice::count(&body, k)?))
    });
    let mut report = SweepReport::new(name, ["k", "ell", "t", "count", "bound"]);
    report.grid("a", fmt_rat(a)).grid("b", fmt_rat(b)).grid("iota", iota).grid("ell_rule", format!("{ell:?}"));
    report.constant("cube_sum_volume", cone.minkowski_cube(&rat(1, 2))?.volume());
    let rows: Vec<(u64, u64, Rat, u64)> = rows.into_iter().collect::<Result<_>>()?;
    match apex {
        Some(_) => {
            let (_, r) = cone.chebyshev_ball()?;
            let c1 = int(2) * lower_bound_constant(n, &r);
            let c2 = cone.volume() / int(2);
            let mut bad = None;
            for (k, l, t, cnt) in &rows {
                let bound = &c2 * num::pow(kq(*l), n);
                let checked = kq(*l) > c1;
                if checked && Rat::from_integer((*cnt).into()) < bound && bad.is_none() {
                    bad = Some((*k, *l, *cnt, bound.clone()));
                }
                report.rows.push(vec![
                    k.to_string(),
                    l.to_string(),
                    fmt_rat(t),
                    cnt.to_string(),
                    if checked { fmt_rat(&bound) } else { "-".into() },
                ]);
            }
            report.constant("C1", c1);
            report.constant("C2", c2);
            report.check("count_ge_C2_ell_pow_n", bad.is_none(), || {
                let (k, l, c, bd) = bad.clone().expect("failure");
                format!("k = {k}, ell = {l}: count {c} < {}", fmt_rat(&bd))
            });
        }
        None => {
            // C₁ is fitted as the largest ℓ with an empty superlevel set.
            let c1 = rows.iter().filter(|r| r.3 == 0).map(|r| r.1).max().unwrap_or(0);
            let ratios: Vec<(u64, Rat)> = rows
                .iter()
                .filter(|r| r.1 > c1)
                .map(|(k, l, _, cnt)| {
                    let scale = num::pow(kq(*k), iota) * num::pow(kq(*l), n - iota);
                    (*k, Rat::from_integer((*cnt).into()) / scale)
                })
                .collect();
            for (k, l, t, cnt) in &rows {
                let r = ratios.iter().find(|(j, _)| j == k).map_or("-".into(), |(_, r)| fmt_rat(r));
                report.rows.push(vec![k.to_string(), l.to_string(), fmt_rat(t), cnt.to_string(), r]);
            }
            let first = rows.iter().find(|r| r.1 > c1).map(|r| r.0);
            report.check("counts_positive_from_lower_half", first.is_some_and(|k| !range.is_upper(k)), || {
                format!("superlevel sets stay empty up to ell = {c1}")
            });
            let c2 = ratios.iter().map(|(_, r)| r.clone()).min().unwrap_or_default();
            // Reciprocal ratios should stay bounded: the count never collapses.
            let recips: Vec<(u64, Rat)> = ratios.iter().map(|(k, r)| (*k, r.recip())).collect();
            stability(&mut report, "inverse_ratio_stable", &recips, range);
            report.constant("C1", int(c1 as i64));
            report.constant("C2", c2);
        }
    }
    Ok(report)
}

/// Exact data of the `max p₁` inequality chain at one level.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MaxP1Row {
    pub k: u64,
    pub d_k: u64,
    pub gap: Rat,
    pub plus_count: u64,
    pub s_k1: Rat,
    pub s0: Rat,
}

pub fn maxp1_rows(m: &GradedSeriesModel, range: KRange, exec: Exec) -> Result<Vec<MaxP1Row>> {
    let n = m.dim();
    let ks: Vec<u64> = range.ks().into_iter().filter(|&k| m.levels().contains(k)).collect();
    map_slice(exec, &ks, |&k| {
        let stat = m.max_gap_stat(k)?;
        let cut = &stat.discrete_max + Rat::new(1.into(), (2 * k).into());
        let plus = m.ambient().intersect_halfspace(&HalfSpace::lower(n, 0, cut))?;
        Ok(MaxP1Row {
            k,
            d_k: m.d_k(k)?,
            gap: stat.gap,
            plus_count: lattice::count(&plus, k)?,
            s_k1: stat.discrete_max,
            s0: stat.ambient_max,
        })
    })
    .into_iter()
    .collect()
}

/// `0 <= max_Δ p₁ - max_{Δ_k} p₁ <= C·(plus-count)^{1/n}/k` with a single fitted `C`
/// over all given models, and the `τ = 0` envelope
/// `S_{k,1} >= (1 - C'·max{1/d_k, 1/k}^{1/n}) S0`.
///
/// With `iota`, the improved `gap <= C''·k^{-1/(n-ι)}` is fitted too.
pub fn verify_maxp1(models: &[(String, GradedSeriesModel)], range: KRange, iota: Option<usize>, exec: Exec) -> Result<SweepReport> {
    let mut report = SweepReport::new("maxp1", ["model", "k", "gap", "plus_count", "S_k1", "S0"]);
    report.grid("models", models.len()).grid("k_range", format!("{}..={}", range.lo, range.hi));
    let mut bound_terms = Vec::new();
    let mut env_terms = Vec::new();
    let mut iota_terms = Vec::new();
    let mut negative = None;
    let mut unbounded = None;
    let mut all = Vec::new();
    for (name, m) in models {
        let n = m.dim() as u32;
        for row in maxp1_rows(m, range, exec)? {
            report.rows.push(vec![
                name.clone(),
                row.k.to_string(),
                fmt_rat(&row.gap),
                row.plus_count.to_string(),
                fmt_rat(&row.s_k1),
                fmt_rat(&row.s0),
            ]);
            if row.gap.is_negative() && negative.is_none() {
                negative = Some((name.clone(), row.k));
            }
            let scaled = num::pow(&row.gap * kq(row.k), n as usize);
            if row.plus_count > 0 {
                bound_terms.push(scaled / Rat::from_integer(row.plus_count.into()));
            } else if row.gap.is_positive() && unbounded.is_none() {
                unbounded = Some((name.clone(), row.k));
            }
            if row.s0.is_positive() {
                let x = std::cmp::max(Rat::new(1.into(), row.d_k.into()), Rat::new(1.into(), row.k.into()));
                let deficit = Rat::one() - &row.s_k1 / &row.s0;
                env_terms.push(num::pow(deficit, n as usize) / x);
            }
            if let Some(i) = iota {
                let e = (n as usize).saturating_sub(i);
                if e > 0 {
                    iota_terms.push((e as u32, num::pow(row.gap.clone(), e) * kq(row.k)));
                }
            }
            all.push((n, row));
        }
    }
    report.check("gap_nonnegative", negative.is_none(), || {
        let (m, k) = negative.clone().expect("failure");
        format!("{m} at k = {k}")
    });
    report.check("plus_count_positive_when_gap_positive", unbounded.is_none(), || {
        let (m, k) = unbounded.clone().expect("failure");
        format!("{m} at k = {k}: positive gap with empty plus body")
    });
    // One C for every dimension: take the largest root over the rows.
    let c = all
        .iter()
        .zip(bound_terms.iter().chain(std::iter::repeat(&Rat::zero())))
        .map(|((n, _), _)| *n)
        .collect::<std::collections::BTreeSet<u32>>()
        .into_iter()
        .map(|n| {
            let terms = all.iter().filter(|(d, r)| *d == n && r.plus_count > 0).map(|(d, r)| {
                num::pow(&r.gap * kq(r.k), *d as usize) / Rat::from_integer(r.plus_count.into())
            });
            fit_root(terms, n)
        })
        .max()
        .unwrap_or_default();
    let violation = all.iter().find(|(n, r)| {
        num::pow(&r.gap * kq(r.k), *n as usize) > num::pow(c.clone(), *n as usize) * Rat::from_integer(r.plus_count.into())
    });
    report.check("gap_le_C_plus_count_root_over_k", violation.is_none(), || {
        let (_, r) = violation.expect("failure");
        format!("k = {}: gap {} with plus-count {}", r.k, fmt_rat(&r.gap), r.plus_count)
    });
    report.constant("C", c);
    let env = all
        .iter()
        .map(|(n, _)| *n)
        .collect::<std::collections::BTreeSet<u32>>()
        .into_iter()
        .map(|n| {
            let terms = all.iter().filter(|(d, r)| *d == n && r.s0.is_positive()).map(|(d, r)| {
                let x = std::cmp::max(Rat::new(1.into(), r.d_k.into()), Rat::new(1.into(), r.k.into()));
                num::pow(Rat::one() - &r.s_k1 / &r.s0, *d as usize) / x
            });
            fit_root(terms, n)
        })
        .max()
        .unwrap_or_default();
    let env_violation = all.iter().find(|(n, r)| {
        if !r.s0.is_positive() {
            return false;
        }
        let x = std::cmp::max(Rat::new(1.into(), r.d_k.into()), Rat::new(1.into(), r.k.into()));
        num::pow(Rat::one() - &r.s_k1 / &r.s0, *n as usize) > num::pow(env.clone(), *n as usize) * x
    });
    report.check("case2_envelope", env_violation.is_none(), || {
        let (_, r) = env_violation.expect("failure");
        format!("k = {}: S_k1 = {}", r.k, fmt_rat(&r.s_k1))
    });
    report.constant("C_case2", env);
    if !iota_terms.is_empty() {
        let c3 = iota_terms.iter().map(|(e, x)| root_upper(x, *e, SQRT_BITS)).max().unwrap_or_default();
        report.constant("C_iota", c3);
    }
    drop(env_terms);
    Ok(report)
}

// ---------------------------------------------------------------- convergence

fn m_for(rule: &MRule, m: &GradedSeriesModel, k: u64, tau: &Rat) -> Result<(u64, u64)> {
    let d = m.d_k(k)?;
    Ok((d, rule.eval(d, k, m.dim(), tau)))
}

fn levels_in(m: &GradedSeriesModel, range: KRange) -> Vec<u64> {
    range.ks().into_iter().filter(|&k| m.levels().contains(k)).collect()
}

/// Two-sided convergence `S_{k,m_k} → S_τ`: fits the constants of
/// `S_{k,m} <= (1 + C/k) max{τd_k/m_k, 1} S_τ` and of the lower bound
/// (`(1 - C/k) min{τd_k/m_k, 1} S_τ` for `τ > 0`, `(1 - C max{m_k/d_k, 1/k}^{1/n}) S_τ`
/// for `τ = 0`), the constant of `|S_{k,m} - S_τ| <= C/k`, and the rate exponent.
pub fn verify_s_two_sided(
    m: &GradedSeriesModel,
    v: &ValuationModel,
    tau: &Rat,
    rule: &MRule,
    range: KRange,
    tol: &Rat,
    exec: Exec,
) -> Result<SweepReport> {
    let st = s_tau(m, v, tau, tol)?;
    let (s_lo, s_hi) = (st.lo().clone(), st.hi().clone());
    let mut report = SweepReport::new("stwosided", ["k", "d_k", "m_k", "S_km", "S_tau"]);
    report
        .grid("tau", fmt_rat(tau))
        .grid("m_rule", rule.name())
        .grid("k_range", format!("{}..={}", range.lo, range.hi))
        .grid("valuation", &v.label);
    report.check("S_tau_positive", s_lo.is_positive(), || format!("S_tau = {}", fmt_rat(&s_lo)));
    if !s_lo.is_positive() {
        return Ok(report);
    }
    let ks = levels_in(m, range);
    let rows: Vec<Result<(u64, u64, u64, Rat)>> = map_slice(exec, &ks, |&k| {
        let (d, mk) = m_for(rule, m, k, tau)?;
        Ok((k, d, mk, jumping_numbers(m, v, k)?.top_average(mk as usize)?))
    });
    let rows: Vec<(u64, u64, u64, Rat)> = rows.into_iter().collect::<Result<_>>()?;
    let n = m.dim() as u32;
    let (mut c_up, mut c_lo, mut c_abs) = (Rat::zero(), Rat::zero(), Rat::zero());
    let mut lo_terms = Vec::new();
    let mut samples = Vec::new();
    let mut abs_per_k = Vec::new();
    for (k, d, mk, s) in &rows {
        report.rows.push(vec![k.to_string(), d.to_string(), mk.to_string(), fmt_rat(s), st_str(&st)]);
        let ratio = tau * kq(*d) / kq(*mk);
        let up_factor = std::cmp::max(ratio.clone(), Rat::one());
        let up = kq(*k) * (s / (&up_factor * &s_lo) - Rat::one());
        c_up = std::cmp::max(c_up, up);
        if tau.is_positive() {
            let lo_factor = std::cmp::min(ratio, Rat::one());
            let lo = kq(*k) * (Rat::one() - s / (&lo_factor * &s_hi));
            c_lo = std::cmp::max(c_lo, lo);
        } else {
            let x = std::cmp::max(kq(*mk) / kq(*d), Rat::one() / kq(*k));
            let deficit = Rat::one() - s / &s_hi;
            if deficit.is_positive() {
                lo_terms.push(num::pow(deficit, n as usize) / x);
            }
        }
        let err = std::cmp::max((s - &s_lo).abs(), (s - &s_hi).abs());
        let scaled = kq(*k) * &err;
        c_abs = std::cmp::max(c_abs, scaled.clone());
        abs_per_k.push((*k, scaled));
        samples.push((*k, s.clone()));
    }
    if !tau.is_positive() {
        c_lo = fit_root(lo_terms, n);
    }
    report.constant("C_upper", c_up);
    report.constant("C_lower", c_lo);
    report.constant("C_abs", c_abs);
    stability(&mut report, "k_times_error_stable", &abs_per_k, range);
    upper_half_fit(&mut report, "abs_error", &samples, &st.midpoint(), range);
    Ok(report)
}

fn st_str(e: &Estimate) -> String {
    match e {
        Estimate::Exact(x) => fmt_rat(x),
        Estimate::Bracket { lo, hi } => format!("[{},{}]", fmt_rat(lo), fmt_rat(hi)),
    }
}

fn threshold_bounds(t: &crate::thresholds::RestrictedThreshold) -> Option<(Rat, Rat)> {
    match (&t.value, &t.bracket) {
        (Threshold::Infinite, _) => None,
        (_, Some((lo, hi))) => Some((lo.clone(), hi.clone())),
        (Threshold::Finite(x), None) => Some((x.clone(), x.clone())),
    }
}

/// Restricted `δ_{k,m_k}` against restricted `δ_τ`: fits the sandwich constants
/// (or, for `τ = 0`, the `k^{-1/n}` envelope) and the rate exponent.
pub fn verify_delta_rate(
    m: &GradedSeriesModel,
    family: &[ValuationModel],
    tau: &Rat,
    rule: &MRule,
    range: KRange,
    tol: &Rat,
    exec: Exec,
) -> Result<SweepReport> {
    let dt = delta_tau_restricted(m, family, tau, tol)?;
    let mut report = SweepReport::new("deltarate", ["k", "d_k", "m_k", "delta_km", "argmin", "delta_tau"]);
    report
        .grid("tau", fmt_rat(tau))
        .grid("m_rule", rule.name())
        .grid("family", family.len())
        .grid("k_range", format!("{}..={}", range.lo, range.hi));
    let Some((dt_lo, dt_hi)) = threshold_bounds(&dt) else {
        report.check("delta_tau_finite", false, || "every S_tau vanishes".into());
        return Ok(report);
    };
    let ks = levels_in(m, range);
    let rows: Vec<Result<(u64, u64, u64, crate::thresholds::RestrictedThreshold)>> = map_slice(exec, &ks, |&k| {
        let (d, mk) = m_for(rule, m, k, tau)?;
        Ok((k, d, mk, delta_km_restricted(m, family, k, mk as usize)?))
    });
    let rows: Vec<_> = rows.into_iter().collect::<Result<_>>()?;
    let n = m.dim() as u32;
    let (mut c_up, mut c_lo) = (Rat::zero(), Rat::zero());
    let mut env_terms = Vec::new();
    let mut samples = Vec::new();
    let mut infinite = None;
    for (k, d, mk, t) in &rows {
        report.rows.push(vec![
            k.to_string(),
            d.to_string(),
            mk.to_string(),
            t.value.to_string(),
            t.argmin.clone(),
            dt.value.to_string(),
        ]);
        let Threshold::Finite(x) = &t.value else {
            infinite.get_or_insert(*k);
            continue;
        };
        if tau.is_positive() {
            let ratio = kq(*mk) / (tau * kq(*d));
            let lo = kq(*k) * (Rat::one() - x / (std::cmp::min(ratio.clone(), Rat::one()) * &dt_hi));
            let up = kq(*k) * (x / (std::cmp::max(ratio, Rat::one()) * &dt_lo) - Rat::one());
            c_lo = std::cmp::max(c_lo, lo);
            c_up = std::cmp::max(c_up, up);
        } else {
            let diff = std::cmp::max((x - &dt_lo).abs(), (x - &dt_hi).abs());
            env_terms.push(num::pow(diff, n as usize) * kq(*k));
        }
        samples.push((*k, x.clone()));
    }
    report.check("delta_km_finite", infinite.is_none(), || format!("k = {}", infinite.expect("failure")));
    if tau.is_positive() {
        report.constant("C_lower", c_lo);
        report.constant("C_upper", c_up);
    } else {
        report.constant("C_envelope", fit_root(env_terms, n));
    }
    let abs_k: Vec<(u64, Rat)> =
        samples.iter().map(|(k, x)| (*k, kq(*k) * std::cmp::max((x - &dt_lo).abs(), (x - &dt_hi).abs()))).collect();
    report.constant("C_abs", max_rat(abs_k.iter().map(|(_, v)| v)));
    upper_half_fit(&mut report, "abs_error", &samples, &((&dt_lo + &dt_hi) / int(2)), range);
    Ok(report)
}

/// `S_{k,m_k} → S0` for `m_k ∈ {1, ceil(sqrt d_k)}` and `→ S_1` for
/// `m_k ∈ {d_k - ceil(sqrt d_k), d_k}`. Each error sequence must not grow
/// between the halves of the range.
pub fn verify_endpoint_limits(
    m: &GradedSeriesModel,
    v: &ValuationModel,
    range: KRange,
    tol: &Rat,
    exec: Exec,
) -> Result<SweepReport> {
    let (s0, _) = crate::thresholds::s0_and_sigma(m, v)?;
    let s1 = s_tau(m, v, &Rat::one(), tol)?;
    let rules = [
        (MRule::One, Estimate::Exact(s0.clone())),
        (MRule::Sqrt, Estimate::Exact(s0)),
        (MRule::DkMinusSqrt, s1.clone()),
        (MRule::Dk, s1),
    ];
    let mut report = SweepReport::new("endpoints", ["rule", "k", "m_k", "S_km", "limit"]);
    report.grid("valuation", &v.label).grid("k_range", format!("{}..={}", range.lo, range.hi));
    let ks = levels_in(m, range);
    for (rule, limit) in rules {
        let rows: Vec<Result<(u64, u64, Rat)>> = map_slice(exec, &ks, |&k| {
            let (_, mk) = m_for(&rule, m, k, &Rat::zero())?;
            Ok((k, mk, jumping_numbers(m, v, k)?.top_average(mk as usize)?))
        });
        let rows: Vec<_> = rows.into_iter().collect::<Result<_>>()?;
        let mut errs = Vec::new();
        let mut samples = Vec::new();
        for (k, mk, s) in &rows {
            report.rows.push(vec![rule.name(), k.to_string(), mk.to_string(), fmt_rat(s), st_str(&limit)]);
            errs.push((*k, std::cmp::max((s - limit.lo()).abs(), (s - limit.hi()).abs())));
            samples.push((*k, s.clone()));
        }
        let lo = max_rat(errs.iter().filter(|(k, _)| !range.is_upper(*k)).map(|(_, e)| e));
        let hi = max_rat(errs.iter().filter(|(k, _)| range.is_upper(*k)).map(|(_, e)| e));
        let name = rule.name();
        report.check(&format!("{name}_error_not_growing"), hi <= lo, || {
            format!("upper-half error {} > lower-half error {}", fmt_rat(&hi), fmt_rat(&lo))
        });
        report.constant(&format!("{name}_max_error_upper_half"), hi);
        upper_half_fit(&mut report, &name, &samples, &limit.midpoint(), range);
    }
    Ok(report)
}

// ---------------------------------------------------------------- Weierstrass

/// `kΔ_k` for `k = 1..=5` of the three quartic gap sequences, read off the
/// solid dots of the reference figure (columns ordinary, flex, hyperflex).
pub const QUARTIC_FIGURE: [[&[i64]; 3]; 5] = [
    [&[1], &[1], &[1]],
    [&[2], &[2], &[2]],
    [&[3], &[0, 3], &[0, 3]],
    [&[0, 4], &[1, 4], &[0, 1, 4]],
    [&[0, 1, 5], &[0, 2, 5], &[1, 2, 5]],
];

/// Weierstrass identities: figure reproduction, gap recovery for every
/// numerical semigroup of genus `<= genus_max`, canonical-curve gap counts and
/// max-gap equality, the `P¹×P¹` example, and quantile-gap stabilization.
pub fn verify_weierstrass(genus_max: u64, k_max: u64, exec: Exec) -> Result<SweepReport> {
    let mut report = SweepReport::new("weierstrass", ["item", "value"]);
    report.grid("genus_max", genus_max).grid("k_max", k_max);

    // Quartic points against the figure.
    let mut mismatch = None;
    for (col, (name, gaps)) in catalog::QUARTIC_GAPS.iter().enumerate() {
        let m = catalog::quartic_point(*gaps);
        for (row, expected) in QUARTIC_FIGURE.iter().enumerate() {
            let k = row as u64 + 1;
            let got: Vec<i64> = m.discrete_body(k)?.points().iter().map(|z| z[0]).collect();
            report.rows.push(vec![format!("{name} k={k}"), format!("{got:?}")]);
            if got != expected[col] && mismatch.is_none() {
                mismatch = Some(format!("{name} at k = {k}: {got:?} vs {:?}", expected[col]));
            }
        }
    }
    report.check("quartic_figure", mismatch.is_none(), || mismatch.clone().expect("failure"));

    // Gap recovery over all numerical semigroups.
    let mut count = 0usize;
    let mut bad = None;
    for g in 1..=genus_max {
        let seqs = gap_sequences_of_genus(g);
        count += seqs.len();
        let fails: Vec<Option<String>> = map_slice(exec, &seqs, |gaps| {
            let m = GradedSeriesModel::curve_divisor(gaps.clone()).ok()?;
            let rec: Vec<u64> = m.recover_gaps().ok()?.into_iter().map(|(n, _)| n).collect();
            (rec != *gaps).then(|| format!("{gaps:?} recovered as {rec:?}"))
        });
        if let Some(f) = fails.into_iter().flatten().next() {
            bad.get_or_insert(f);
        }
    }
    report.rows.push(vec!["semigroups".into(), count.to_string()]);
    report.check("recover_gaps_round_trip", bad.is_none(), || bad.clone().expect("failure"));

    // Canonical curves: declared patterns, gap counts, max-gap equality.
    let mut canon: Vec<(String, GradedSeriesModel)> = vec![("generic".into(), catalog::canonical_generic(3))];
    for (name, k1, k2) in catalog::QUARTIC_CANONICAL {
        canon.push((name.into(), catalog::quartic_canonical(k1, k2)));
    }
    let mut pattern_bad = None;
    let mut count_bad = None;
    let mut eq_bad = None;
    for (name, m) in &canon {
        let Backend::CanonicalCurve(c) = m.backend() else { unreachable!("canonical model") };
        let g = c.genus();
        for k in 1..=2 {
            let seq = m.k_weierstrass_sequence(k)?;
            if seq.first() != Some(&1) || seq.last().is_some_and(|&x| x > k * (2 * g - 2) + 1) {
                pattern_bad.get_or_insert(format!("{name} k = {k}: {seq:?}"));
            }
            report.rows.push(vec![format!("canonical {name} k={k}"), format!("{seq:?}")]);
        }
        for row in m.gap_table(k_max)? {
            let expect = if row.k == 1 { g - 1 } else { g };
            if row.diff != expect {
                count_bad.get_or_insert(format!("{name} k = {}: D_k - d_k = {}", row.k, row.diff));
            }
            if row.k >= 2 {
                let stat = m.max_gap_stat(row.k)?;
                let equal = stat.gap == Rat::new(g.into(), row.k.into());
                if equal != c.is_generic_at(row.k) {
                    eq_bad.get_or_insert(format!("{name} k = {}: gap {}", row.k, fmt_rat(&stat.gap)));
                }
            }
        }
    }
    report.check("k_weierstrass_sequences", pattern_bad.is_none(), || pattern_bad.clone().expect("failure"));
    report.check("canonical_gap_counts", count_bad.is_none(), || count_bad.clone().expect("failure"));
    report.check("max_gap_equality_iff_generic", eq_bad.is_none(), || eq_bad.clone().expect("failure"));

    // The P¹×P¹ example.
    let mut p_bad = None;
    for (ram, gap) in [(false, vec![1, 2]), (true, vec![1, 1])] {
        let m = catalog::p1xp1_model(ram);
        let got = (m.ambient().volume(), m.big_d_k(2)?, m.d_k(2)?, m.gap_set(2)?.points().to_vec(), m.big_d_k(1)? - m.d_k(1)?);
        if got != (int(1), 10, 9, vec![gap.clone()], 0) {
            p_bad.get_or_insert(format!("ramification = {ram}: {got:?}"));
        }
    }
    report.check("p1xp1_example", p_bad.is_none(), || p_bad.clone().expect("failure"));

    // #(Δ^{Q(τ)} ∩ Z/k) - #((Δ^{Q(τ)})_k) = g once τk >= N_g.
    let mut stab_bad = None;
    for (name, gaps) in catalog::QUARTIC_GAPS {
        let m = catalog::quartic_point(gaps);
        let v = ValuationModel::divisorial("p1", 1);
        let ng = *gaps.last().expect("nonempty");
        for tau in [rat(1, 4), rat(1, 2), int(1)] {
            let q = quantile(&m, &v, &tau, &rat(1, 1_000_000_000))?;
            let Some(t) = q.quantile.exact() else {
                stab_bad.get_or_insert(format!("{name}: inexact quantile"));
                continue;
            };
            let start = (kq(ng) / &tau).ceil().to_integer().to_u64().unwrap_or(1);
            for k in start..=start + 20 {
                let (ideal, real) = partial_counts(&m, &v, t, k)?;
                if ideal - real != gaps.len() as u64 {
                    stab_bad.get_or_insert(format!("{name} tau = {} k = {k}: {}", fmt_rat(&tau), ideal - real));
                }
            }
        }
    }
    report.check("quantile_gap_stabilization", stab_bad.is_none(), || stab_bad.clone().expect("failure"));
    Ok(report)
}

// ---------------------------------------------------------------- model-level inequalities

/// `(D_k - d_k)/k^{n-1}` with the two-halves stability test.
pub fn verify_gap_growth(m: &GradedSeriesModel, range: KRange) -> Result<SweepReport> {
    let mut report = SweepReport::new("gapgrowth", ["k", "d_k", "D_k", "scaled_diff"]);
    let n = m.dim();
    let mut per_k = Vec::new();
    for row in m.gap_table(range.hi)?.into_iter().filter(|r| r.k >= range.lo) {
        let s = Rat::from_integer(row.diff.into()) / num::pow(kq(row.k), n - 1);
        report.rows.push(vec![row.k.to_string(), row.d_k.to_string(), row.big_d_k.to_string(), fmt_rat(&s)]);
        per_k.push((row.k, s));
    }
    if per_k.iter().any(|(k, _)| range.is_upper(*k)) && per_k.iter().any(|(k, _)| !range.is_upper(*k)) {
        stability(&mut report, "upper_half_le_twice_lower_half", &per_k, range);
    }
    Ok(report)
}

/// Exact comparisons between `S_{k,m}` and its idealized counterpart for a
/// divisorial valuation: `S <= S̄`, the reverse estimate through the tail of the
/// idealized jumping numbers, and the `M_k` sandwich on `S̄` at the given `τ`
/// (skipped when `Q(τ)` is only bracketed).
pub fn verify_skm_inequalities(
    m: &GradedSeriesModel,
    v: &ValuationModel,
    tau: &Rat,
    range: KRange,
    exec: Exec,
) -> Result<SweepReport> {
    let mut report = SweepReport::new("skm", ["k", "checked_m"]);
    let q = quantile(m, v, tau, &rat(1, 1_000_000_000))?;
    let ks = levels_in(m, range);
    let results: Vec<Result<Option<String>>> = map_slice(exec, &ks, |&k| {
        let j = jumping_numbers(m, v, k)?;
        let i = idealized_jumping(m, v, k)?;
        let (d, big_d) = (j.len(), i.len());
        let sj = j.top_averages();
        let si = i.top_averages();
        let gap = big_d - d;
        let prefix: Vec<Rat> = std::iter::once(Rat::zero())
            .chain(i.values.iter().scan(Rat::zero(), |acc, x| {
                *acc += x;
                Some(acc.clone())
            }))
            .collect();
        let big_m = match q.quantile.exact() {
            Some(t) => Some(partial_counts(m, v, t, k)?.0 as usize),
            None => None,
        };
        for mk in 1..=d {
            if sj[mk - 1] > si[mk - 1] {
                return Ok(Some(format!("k = {k}, m = {mk}: S > Sbar")));
            }
            let tail = &prefix[gap + mk] - &prefix[gap];
            if sj[mk - 1] < tail / (kq(k) * kq(mk as u64)) {
                return Ok(Some(format!("k = {k}, m = {mk}: reverse estimate fails")));
            }
            if let Some(bm) = big_m.filter(|&b| b >= 1 && b <= big_d) {
                let r = Rat::new((bm as i64).into(), (mk as i64).into());
                let sb = &si[bm - 1];
                let lower = std::cmp::min(Rat::one(), r.clone()) * sb;
                let upper = std::cmp::max(Rat::one(), r) * sb;
                if si[mk - 1] < lower || si[mk - 1] > upper {
                    return Ok(Some(format!("k = {k}, m = {mk}: M_k sandwich fails with M_k = {bm}")));
                }
            }
        }
        Ok(None)
    });
    let mut bad = None;
    for (k, r) in ks.iter().zip(results) {
        if let Some(w) = r? {
            bad.get_or_insert(w);
        }
        report.rows.push(vec![k.to_string(), m.d_k(*k)?.to_string()]);
    }
    report.check("skm_inequalities", bad.is_none(), || bad.clone().expect("failure"));
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rate_fits() {
        let inv: Vec<(u64, Rat)> = (1..=40).map(|k| (k, int(1) + rat(1, k as i64))).collect();
        assert!((rate_fit(&inv, &int(1)).unwrap().exponent + 1.0).abs() < 0.01);
        let sq: Vec<(u64, Rat)> = (1..=40).map(|k| (k, int(1) + rat(1, (k * k) as i64))).collect();
        assert!((rate_fit(&sq, &int(1)).unwrap().exponent + 2.0).abs() < 0.01);
        let flat: Vec<(u64, Rat)> = (1..=10).map(|k| (k, int(1))).collect();
        assert!(rate_fit(&flat, &int(1)).unwrap().is_exact());
        assert!(rate_fit(&flat[..3], &int(1)).is_err());
        let mut two = flat.clone();
        two[0].1 = int(2);
        assert!(rate_fit(&two, &int(1)).is_err());
    }

    #[test]
    fn ehrhart_examples() {
        let sq = catalog::unit_square();
        let r = verify_uniform_ehrhart(&sq, std::slice::from_ref(&sq), &rat(1, 10), KRange::new(1, 10).unwrap(), Exec::default())
            .unwrap();
        assert!(r.passed());
        // M(k) = (2k + 1)/k for P = K.
        assert_eq!(r.rows.rows[2][1], "7/3");
        let seg = catalog::segment();
        let r = verify_uniform_ehrhart(&seg, std::slice::from_ref(&seg), &rat(1, 2), KRange::new(1, 10).unwrap(), Exec::default())
            .unwrap();
        assert!(r.rows.rows.iter().all(|row| row[1] == "1"));
        let small = catalog::unit_square().scale_translate(&rat(1, 10), &Point::origin(2)).unwrap();
        assert!(verify_uniform_ehrhart(&sq, &[small], &rat(1, 10), KRange::new(1, 4).unwrap(), Exec::default()).is_err());
    }

    #[test]
    fn sampled_bodies_are_admissible_and_reproducible() {
        let sq = catalog::unit_square();
        let a = sample_sub_bodies(&sq, 7, 20, &rat(1, 10)).unwrap();
        let b = sample_sub_bodies(&sq, 7, 20, &rat(1, 10)).unwrap();
        assert_eq!(a, b);
        assert!(a.iter().all(|p| p.volume() >= rat(1, 10) && p.vertices().iter().all(|v| sq.contains(v))));
        let polys = sample_polytopes(3, 1, 5).unwrap();
        assert!(polys.iter().all(ConvexBody::is_full_dimensional));
    }

    #[test]
    fn lower_bound_examples() {
        let bodies = [catalog::unit_square(), catalog::unit_simplex(), catalog::segment()];
        let r = verify_lower_bound_constant(&bodies, KRange::new(1, 30).unwrap(), Exec::default()).unwrap();
        assert!(r.passed(), "{:?}", r.witnesses);
        // Segment: r = 1/2, C = 1.
        assert_eq!(r.rows.rows[2][2], "1");
    }

    #[test]
    fn concave_examples() {
        let pairs = [(catalog::segment(), ConcavePL::p1(1)), (catalog::unit_simplex(), ConcavePL::p1(2))];
        let r = verify_concave_sum_bound(&pairs[..1], KRange::new(1, 10).unwrap(), Exec::default()).unwrap();
        assert!(r.rows.rows.iter().all(|row| row[1] == "1/2"));
        let r = verify_concave_sum_bound(&pairs[1..], KRange::new(2, 2).unwrap(), Exec::default()).unwrap();
        assert_eq!(r.rows.rows[0][1], "2/3");
    }

    #[test]
    fn cone_examples() {
        let s = catalog::unit_simplex();
        let v = Point::from_ints(&[1, 0]);
        let r = verify_cone_counts(&s, &int(0), &int(1), Some(&v), EllRule::HalfK, KRange::new(1, 40).unwrap(), Exec::default())
            .unwrap();
        assert!(r.passed(), "{:?}", r.witnesses);
        let full = verify_cone_counts(&s, &int(0), &int(1), Some(&v), EllRule::Full, KRange::new(1, 10).unwrap(), Exec::default())
            .unwrap();
        assert_eq!(full.rows.rows[9][3], "66");
        let sq = catalog::unit_square();
        let r = verify_cone_counts(&sq, &rat(1, 4), &rat(3, 4), None, EllRule::HalfK, KRange::new(1, 30).unwrap(), Exec::default())
            .unwrap();
        assert!(r.passed(), "{:?}", r.witnesses);
        assert_eq!(r.grid["iota"], "1");
    }

    #[test]
    fn maxp1_examples() {
        let models = vec![
            ("canonical".to_string(), catalog::canonical_generic(3)),
            ("top".to_string(), catalog::square_top_face()),
            ("toric".to_string(), catalog::toric_simplex()),
        ];
        let r = verify_maxp1(&models[..1], KRange::new(2, 20).unwrap(), None, Exec::default()).unwrap();
        assert!(r.passed());
        assert_eq!(r.get_constant("C").unwrap(), &int(1));
        let r = verify_maxp1(&models, KRange::new(2, 20).unwrap(), None, Exec::default()).unwrap();
        assert!(r.passed(), "{:?}", r.witnesses);
        let rows = maxp1_rows(&models[1].1, KRange::new(3, 3).unwrap(), Exec::default()).unwrap();
        assert_eq!((rows[0].gap.clone(), rows[0].plus_count), (rat(1, 3), 4));
    }

    #[test]
    fn s_two_sided_examples() {
        let seg = catalog::toric_segment();
        let v = ValuationModel::divisorial("p1", 1);
        let tol = rat(1, 1_000_000_000);
        let r = verify_s_two_sided(&seg, &v, &rat(1, 2), &MRule::CeilTau, KRange::new(1, 50).unwrap(), &tol, Exec::default())
            .unwrap();
        assert!(r.passed(), "{:?}", r.witnesses);
        assert!(r.get_constant("C_abs").unwrap() <= &int(2));
        let r = verify_s_two_sided(&seg, &v, &int(0), &MRule::One, KRange::new(1, 20).unwrap(), &tol, Exec::default()).unwrap();
        assert_eq!(r.get_constant("C_abs").unwrap(), &int(0));
        assert!(r.exponents["abs_error"].is_exact());
    }

    #[test]
    fn delta_and_endpoint_examples() {
        let seg = catalog::toric_segment();
        let v = ValuationModel::divisorial("p1", 1);
        let tol = rat(1, 1_000_000_000);
        let r = verify_delta_rate(&seg, std::slice::from_ref(&v), &int(0), &MRule::One, KRange::new(1, 20).unwrap(), &tol, Exec::default())
            .unwrap();
        assert!(r.passed());
        assert!(r.exponents["abs_error"].is_exact());
        let r = verify_endpoint_limits(&seg, &v, KRange::new(1, 40).unwrap(), &tol, Exec::default()).unwrap();
        assert!(r.passed(), "{:?}", r.witnesses);
        let hyper = catalog::quartic_point([1, 2, 5]);
        let r = verify_endpoint_limits(&hyper, &v, KRange::new(1, 40).unwrap(), &tol, Exec::default()).unwrap();
        assert!(r.passed(), "{:?}", r.witnesses);
    }

    #[test]
    fn weierstrass_suite() {
        let r = verify_weierstrass(5, 20, Exec::default()).unwrap();
        assert!(r.passed(), "{:?}", r.witnesses);
    }

    #[test]
    fn model_inequalities() {
        let v = ValuationModel::divisorial("p1", 2);
        for m in [catalog::toric_simplex(), catalog::square_top_face()] {
            assert!(verify_gap_growth(&m, KRange::new(1, 20).unwrap()).unwrap().passed());
            assert!(verify_skm_inequalities(&m, &v, &rat(1, 4), KRange::new(1, 8).unwrap(), Exec::default()).unwrap().passed());
        }
    }
}
