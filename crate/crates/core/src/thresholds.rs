//! Jumping numbers, `S_{k,m}`, quantiles, `S_τ` and restricted thresholds.
//!
//! A valuation enters only through its log discrepancy `A` and its concave
//! transform `G` on the ambient body. The jumping numbers at level `k` are the
//! values `k·G(x)` over `x ∈ Δ_k`, sorted non-increasingly. Ties are broken by
//! the lexicographically larger point, which makes compatible families and
//! argmins deterministic.

use std::cmp::Ordering;
use std::fmt;

use num::{One, Signed, Zero};

use crate::geometry::linalg::solve;
use crate::geometry::{ConcavePL, ConvexBody, Point};
use crate::lattice::PointCloud;
use crate::rational::{exact_sqrt, parse_rat, Rat};
use crate::series::GradedSeriesModel;
use crate::{Error, Result};

/// A valuation given by its log discrepancy `A > 0` and concave transform `G >= 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValuationModel {
    pub label: String,
    pub a: Rat,
    pub g: ConcavePL,
}

impl ValuationModel {
    pub fn new(label: impl Into<String>, a: Rat, g: ConcavePL) -> Result<Self> {
        if !a.is_positive() {
            return Err(Error::InvalidModel(format!("log discrepancy must be positive, got {a}")));
        }
        Ok(ValuationModel { label: label.into(), a, g })
    }

    /// The divisorial case `G = p₁` with `A = 1`.
    pub fn divisorial(label: impl Into<String>, n: usize) -> Self {
        ValuationModel { label: label.into(), a: Rat::one(), g: ConcavePL::p1(n) }
    }

    /// Checks dimensions and `G >= 0` on the body (enough at the vertices).
    pub fn validate(&self, ambient: &ConvexBody) -> Result<()> {
        if self.g.dim() != ambient.dim() {
            return Err(Error::DimensionMismatch { expected: ambient.dim(), found: self.g.dim() });
        }
        if let Some(v) = ambient.vertices().iter().find(|v| self.g.eval(v).is_negative()) {
            return Err(Error::InvalidModel(format!("G of {:?} is negative at {:?}", self.label, v.0)));
        }
        Ok(())
    }
}

/// Non-increasing jumping numbers at level `k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JumpingVector {
    pub k: u64,
    pub values: Vec<Rat>,
}

impl JumpingVector {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    fn check_m(&self, m: usize) -> Result<()> {
        if m == 0 || m > self.values.len() {
            return Err(Error::OutOfRange { m, max: self.values.len() });
        }
        Ok(())
    }

    /// `(1/km) Σ_{ℓ<=m} values_ℓ`.
    pub fn top_average(&self, m: usize) -> Result<Rat> {
        self.check_m(m)?;
        let sum = self.values[..m].iter().fold(Rat::zero(), |acc, x| acc + x);
        Ok(sum / Rat::from_integer((self.k * m as u64).into()))
    }

    /// `top_average(m)` for every `m = 1..=len`.
    pub fn top_averages(&self) -> Vec<Rat> {
        let mut sum = Rat::zero();
        self.values
            .iter()
            .enumerate()
            .map(|(i, x)| {
                sum += x;
                &sum / Rat::from_integer((self.k * (i as u64 + 1)).into())
            })
            .collect()
    }
}

/// A finitely supported probability measure on the line, atoms in decreasing position.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EmpiricalMeasure {
    pub atoms: Vec<(Rat, Rat)>,
}

impl EmpiricalMeasure {
    pub fn total_mass(&self) -> Rat {
        self.atoms.iter().fold(Rat::zero(), |acc, (_, w)| acc + w)
    }

    pub fn mean(&self) -> Rat {
        self.atoms.iter().fold(Rat::zero(), |acc, (x, w)| acc + x * w)
    }
}

/// An exact value or a certified bracket around it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Estimate {
    Exact(Rat),
    Bracket { lo: Rat, hi: Rat },
}

impl Estimate {
    pub fn lo(&self) -> &Rat {
        match self {
            Estimate::Exact(x) => x,
            Estimate::Bracket { lo, .. } => lo,
        }
    }

    pub fn hi(&self) -> &Rat {
        match self {
            Estimate::Exact(x) => x,
            Estimate::Bracket { hi, .. } => hi,
        }
    }

    pub fn exact(&self) -> Option<&Rat> {
        match self {
            Estimate::Exact(x) => Some(x),
            Estimate::Bracket { .. } => None,
        }
    }

    pub fn midpoint(&self) -> Rat {
        (self.lo() + self.hi()) / Rat::from_integer(2.into())
    }

    pub fn contains(&self, x: &Rat) -> bool {
        self.lo() <= x && x <= self.hi()
    }
}

/// The quantile `Q(τ)` together with the mass of the atom at `S0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TailSpec {
    pub tau: Rat,
    pub quantile: Estimate,
    pub atom_at_top: Rat,
}

/// A restricted threshold value; `Infinite` when every ratio has a zero denominator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Threshold {
    Finite(Rat),
    Infinite,
}

impl Threshold {
    pub fn finite(&self) -> Option<&Rat> {
        match self {
            Threshold::Finite(x) => Some(x),
            Threshold::Infinite => None,
        }
    }
}

impl fmt::Display for Threshold {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Threshold::Finite(x) => f.write_str(&crate::rational::fmt_rat(x)),
            Threshold::Infinite => f.write_str("inf"),
        }
    }
}

/// Minimum of `A/S` over an explicit family. This is an upper bound on the
/// threshold over all valuations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RestrictedThreshold {
    pub value: Threshold,
    pub argmin: String,
    /// Certified range of the minimum when some `S` is only bracketed.
    pub bracket: Option<(Rat, Rat)>,
}

/// Policy choosing `m_k` from `d_k` in sweeps.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MRule {
    One,
    CeilTau,
    Dk,
    /// `d_k - ceil(sqrt d_k)`.
    DkMinusSqrt,
    /// `ceil(sqrt d_k)`.
    Sqrt,
    Constant(u64),
    /// `floor(d_k - c·k^{n-1})`.
    FloorDkMinus(Rat),
}

impl MRule {
    /// Parses `one`, `ceil_tau`, `dk`, `dk_minus_sqrt`, `sqrt`, `constant:c`, `dk_minus:c`.
    pub fn parse(s: &str) -> Result<Self> {
        let bad = || Error::Input(format!("unknown m-rule {s:?}"));
        Ok(match s {
            "one" => MRule::One,
            "ceil_tau" => MRule::CeilTau,
            "dk" => MRule::Dk,
            "dk_minus_sqrt" => MRule::DkMinusSqrt,
            "sqrt" => MRule::Sqrt,
            _ => {
                if let Some(c) = s.strip_prefix("constant:") {
                    MRule::Constant(c.parse().map_err(|_| bad())?)
                } else if let Some(c) = s.strip_prefix("dk_minus:") {
                    MRule::FloorDkMinus(parse_rat(c)?)
                } else {
                    return Err(bad());
                }
            }
        })
    }

    pub fn name(&self) -> String {
        match self {
            MRule::One => "one".into(),
            MRule::CeilTau => "ceil_tau".into(),
            MRule::Dk => "dk".into(),
            MRule::DkMinusSqrt => "dk_minus_sqrt".into(),
            MRule::Sqrt => "sqrt".into(),
            MRule::Constant(c) => format!("constant:{c}"),
            MRule::FloorDkMinus(c) => format!("dk_minus:{}", crate::rational::fmt_rat(c)),
        }
    }

    /// `m_k`, clamped to `1..=d_k`.
    pub fn eval(&self, d_k: u64, k: u64, n: usize, tau: &Rat) -> u64 {
        let ceil_sqrt = |d: u64| {
            let r = d.isqrt();
            if r * r == d {
                r
            } else {
                r + 1
            }
        };
        let m = match self {
            MRule::One => 1,
            MRule::CeilTau => {
                let x = tau * Rat::from_integer(d_k.into());
                x.ceil().to_integer().try_into().unwrap_or(0)
            }
            MRule::Dk => d_k,
            MRule::DkMinusSqrt => d_k.saturating_sub(ceil_sqrt(d_k)),
            MRule::Sqrt => ceil_sqrt(d_k),
            MRule::Constant(c) => *c,
            MRule::FloorDkMinus(c) => {
                let kk = num::pow(Rat::from_integer(k.into()), n.saturating_sub(1));
                let x = Rat::from_integer(d_k.into()) - c * kk;
                if x.is_negative() {
                    0
                } else {
                    x.floor().to_integer().try_into().unwrap_or(0)
                }
            }
        };
        m.clamp(1, d_k.max(1))
    }
}

/// Points of a cloud ranked by `G`, largest first, lexicographically larger first on ties.
fn ranked(cloud: &PointCloud, g: &ConcavePL) -> Vec<(Rat, Vec<i64>)> {
    let k = Rat::from_integer(cloud.denominator().into());
    let mut v: Vec<(Rat, Vec<i64>)> = match IntegerPL::new(g, cloud.denominator()) {
        Some(ig) => {
            let scaled: Option<Vec<(i128, Vec<i64>)>> =
                cloud.points().iter().map(|z| Some((ig.eval(z)?, z.clone()))).collect();
            match scaled {
                Some(s) => {
                    let den = Rat::from_integer(ig.den.into());
                    s.into_iter().map(|(x, z)| (Rat::from_integer(x.into()) / &den, z)).collect()
                }
                None => ranked_rational(cloud, g, &k),
            }
        }
        None => ranked_rational(cloud, g, &k),
    };
    v.sort_by(|a, b| match b.0.cmp(&a.0) {
        Ordering::Equal => b.1.cmp(&a.1),
        o => o,
    });
    v
}

fn ranked_rational(cloud: &PointCloud, g: &ConcavePL, k: &Rat) -> Vec<(Rat, Vec<i64>)> {
    cloud
        .points()
        .iter()
        .map(|z| {
            let p = Point::new(z.iter().map(|&c| Rat::from_integer(c.into()) / k).collect());
            (g.eval(&p), z.clone())
        })
        .collect()
}

/// `G(z/k)·den` as a minimum of integer affine forms in `z`.
struct IntegerPL {
    pieces: Vec<(Vec<i128>, i128)>,
    den: i128,
}

impl IntegerPL {
    fn new(g: &ConcavePL, k: u64) -> Option<Self> {
        let l = g
            .pieces()
            .iter()
            .flat_map(|f| f.gradient.iter().chain(std::iter::once(&f.constant)))
            .fold(num::BigInt::one(), |acc, x| num::Integer::lcm(&acc, x.denom()));
        let l = num::ToPrimitive::to_i128(&l)?;
        let k = i128::from(k);
        let int = |x: &Rat, mul: i128| num::ToPrimitive::to_i128(&(x * Rat::from_integer(l.into())).to_integer())?.checked_mul(mul);
        let pieces = g
            .pieces()
            .iter()
            .map(|f| Some((f.gradient.iter().map(|c| int(c, 1)).collect::<Option<Vec<_>>>()?, int(&f.constant, k)?)))
            .collect::<Option<Vec<_>>>()?;
        Some(IntegerPL { pieces, den: l.checked_mul(k)? })
    }

    fn eval(&self, z: &[i64]) -> Option<i128> {
        let mut best: Option<i128> = None;
        for (grad, c) in &self.pieces {
            let mut acc = *c;
            for (a, &x) in grad.iter().zip(z) {
                acc = acc.checked_add(a.checked_mul(i128::from(x))?)?;
            }
            best = Some(best.map_or(acc, |b| b.min(acc)));
        }
        best
    }
}

fn jumping_of(cloud: &PointCloud, g: &ConcavePL) -> JumpingVector {
    let k = cloud.denominator();
    let kq = Rat::from_integer(k.into());
    JumpingVector { k, values: ranked(cloud, g).into_iter().map(|(x, _)| x * &kq).collect() }
}

/// `j_{k,1} >= ... >= j_{k,d_k}`: the values `k·G(x)` over `Δ_k`.
pub fn jumping_numbers(m: &GradedSeriesModel, v: &ValuationModel, k: u64) -> Result<JumpingVector> {
    v.validate(m.ambient())?;
    Ok(jumping_of(&*m.discrete_body(k)?, &v.g))
}

/// `i_{k,1} >= ... >= i_{k,D_k}`: the values `k·G(x)` over `Δ ∩ Z^n/k`.
pub fn idealized_jumping(m: &GradedSeriesModel, v: &ValuationModel, k: u64) -> Result<JumpingVector> {
    v.validate(m.ambient())?;
    if k == 0 {
        return Err(Error::Domain("k must be positive".into()));
    }
    Ok(jumping_of(&*m.ambient_cloud(k)?, &v.g))
}

/// `S_{k,m} = (1/km) Σ_{ℓ<=m} j_{k,ℓ}`.
pub fn s_km(model: &GradedSeriesModel, v: &ValuationModel, k: u64, m: usize) -> Result<Rat> {
    jumping_numbers(model, v, k)?.top_average(m)
}

/// `S̄_{k,m} = (1/km) Σ_{ℓ<=m} i_{k,ℓ}`.
pub fn sbar_km(model: &GradedSeriesModel, v: &ValuationModel, k: u64, m: usize) -> Result<Rat> {
    idealized_jumping(model, v, k)?.top_average(m)
}

/// `S0 = max_Δ G` and `σ = min_Δ G`.
pub fn s0_and_sigma(model: &GradedSeriesModel, v: &ValuationModel) -> Result<(Rat, Rat)> {
    v.validate(model.ambient())?;
    let s0 = model
        .ambient()
        .linearity_vertices(&v.g)?
        .iter()
        .map(|p| v.g.eval(p))
        .max()
        .ok_or(Error::EmptyInput("ambient body"))?;
    let sigma = model.ambient().vertices().iter().map(|p| v.g.eval(p)).min().ok_or(Error::EmptyInput("ambient body"))?;
    Ok((s0, sigma))
}

/// `(j_{k,1}/k, j_{k,d_k}/k)`.
pub fn quantum_extremes(model: &GradedSeriesModel, v: &ValuationModel, k: u64) -> Result<(Rat, Rat)> {
    let j = jumping_numbers(model, v, k)?;
    let kq = Rat::from_integer(k.into());
    Ok((&j.values[0] / &kq, &j.values[j.len() - 1] / &kq))
}

/// `μ_{v,k} = (1/d_k) Σ δ_{j_{k,ℓ}/k}` with equal positions merged.
pub fn mu_k(model: &GradedSeriesModel, v: &ValuationModel, k: u64) -> Result<EmpiricalMeasure> {
    let j = jumping_numbers(model, v, k)?;
    let kq = Rat::from_integer(k.into());
    let unit = Rat::new(1.into(), (j.len() as u64).into());
    let mut atoms: Vec<(Rat, Rat)> = Vec::new();
    for x in &j.values {
        let pos = x / &kq;
        match atoms.last_mut() {
            Some((p, w)) if *p == pos => *w += &unit,
            _ => atoms.push((pos, unit.clone())),
        }
    }
    Ok(EmpiricalMeasure { atoms })
}

fn ambient_volume(model: &GradedSeriesModel) -> Result<Rat> {
    let vol = model.ambient().volume();
    if vol.is_zero() {
        return Err(Error::Degenerate("ambient body has zero volume".into()));
    }
    Ok(vol)
}

fn ccdf_raw(model: &GradedSeriesModel, v: &ValuationModel, t: &Rat, vol: &Rat) -> Result<Rat> {
    Ok(model.ambient().superlevel(&v.g, t)?.volume() / vol)
}

/// `F(t) = |Δ ∩ {G >= t}| / |Δ|` for `t ∈ [0, S0]`.
pub fn ccdf_continuous(model: &GradedSeriesModel, v: &ValuationModel, t: &Rat) -> Result<Rat> {
    let (s0, _) = s0_and_sigma(model, v)?;
    if t.is_negative() || *t > s0 {
        return Err(Error::Domain(format!("t = {t} outside [0, S0 = {s0}]")));
    }
    let vol = ambient_volume(model)?;
    ccdf_raw(model, v, t, &vol)
}

/// Values of `G` where `t ↦ F(t)` may change its polynomial formula.
fn ccdf_breakpoints(model: &GradedSeriesModel, v: &ValuationModel) -> Result<Vec<Rat>> {
    let mut b: Vec<Rat> = model.ambient().linearity_vertices(&v.g)?.iter().map(|p| v.g.eval(p)).collect();
    b.sort();
    b.dedup();
    Ok(b)
}

/// Coefficients (constant term first) of the polynomial through the given nodes.
fn interpolate(xs: &[Rat], ys: &[Rat]) -> Vec<Rat> {
    let a: Vec<Vec<Rat>> = xs.iter().map(|x| (0..xs.len()).map(|e| num::pow(x.clone(), e)).collect()).collect();
    let mut c = solve(&a, ys).expect("distinct interpolation nodes");
    while c.len() > 1 && c.last().is_some_and(Zero::is_zero) {
        c.pop();
    }
    c
}

fn horner(c: &[Rat], x: &Rat) -> Rat {
    c.iter().rev().fold(Rat::zero(), |acc, ci| acc * x + ci)
}

/// Exact root of `p(t) = target` in `[lo, hi]` when `p` has degree at most two
/// and the root is rational.
fn exact_root(c: &[Rat], target: &Rat, lo: &Rat, hi: &Rat) -> Option<Rat> {
    let inside = |r: &Rat| lo <= r && r <= hi;
    match c.len() {
        2 => {
            let r = (target - &c[0]) / &c[1];
            inside(&r).then_some(r)
        }
        3 => {
            let (a, b, c0) = (&c[2], &c[1], &c[0] - target);
            let disc = b * b - Rat::from_integer(4.into()) * a * &c0;
            let s = exact_sqrt(&disc)?;
            let two_a = Rat::from_integer(2.into()) * a;
            [(-b + &s) / &two_a, (-b - &s) / &two_a].into_iter().find(inside)
        }
        _ => None,
    }
}

/// `Q(τ) = sup{t : F(t) >= τ}`. Exact when the root on the relevant
/// polynomial piece is rational of degree at most two, otherwise a bracket of
/// width at most `tol`.
pub fn quantile(model: &GradedSeriesModel, v: &ValuationModel, tau: &Rat, tol: &Rat) -> Result<TailSpec> {
    if !tol.is_positive() {
        return Err(Error::Domain("tolerance must be positive".into()));
    }
    if tau.is_negative() || *tau > Rat::one() {
        return Err(Error::Domain(format!("tau = {tau} outside [0, 1]")));
    }
    let (s0, _) = s0_and_sigma(model, v)?;
    let vol = ambient_volume(model)?;
    let atom = ccdf_raw(model, v, &s0, &vol)?;
    let done = |q: Rat| TailSpec { tau: tau.clone(), quantile: Estimate::Exact(q), atom_at_top: atom.clone() };
    if tau.is_zero() || *tau <= atom {
        return Ok(done(s0));
    }
    let f = |t: &Rat| ccdf_raw(model, v, t, &vol);
    let bps = ccdf_breakpoints(model, v)?;
    // Largest breakpoint still carrying mass >= τ; Q lies in [b_i, b_{i+1}).
    let mut i = 0;
    for (j, b) in bps.iter().enumerate() {
        if f(b)? >= *tau {
            i = j;
        } else {
            break;
        }
    }
    let (lo, hi) = (bps[i].clone(), bps[i + 1].clone());
    let n = model.dim();
    let h = &hi - &lo;
    let xs: Vec<Rat> = (1..=n + 1)
        .map(|j| &lo + &h * Rat::new((j as i64).into(), ((n + 2) as i64).into()))
        .collect();
    let ys: Vec<Rat> = xs.iter().map(&f).collect::<Result<_>>()?;
    let poly = interpolate(&xs, &ys);
    if horner(&poly, &lo) < *tau {
        // F jumps across τ at lo.
        return Ok(done(lo));
    }
    if let Some(r) = exact_root(&poly, tau, &lo, &hi) {
        return Ok(done(r));
    }
    let (mut a, mut b) = (lo, hi);
    let two = Rat::from_integer(2.into());
    while &b - &a > *tol {
        let mid = (&a + &b) / &two;
        if horner(&poly, &mid) >= *tau {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok(TailSpec { tau: tau.clone(), quantile: Estimate::Bracket { lo: a, hi: b }, atom_at_top: atom })
}

/// `Q_{v,k}(τ) = j_{k,m}/k` with `m = floor(τ d_k)`, and `j_{k,1}/k` when `m = 0`.
pub fn quantum_quantile(model: &GradedSeriesModel, v: &ValuationModel, k: u64, tau: &Rat) -> Result<Rat> {
    if tau.is_negative() || *tau > Rat::one() {
        return Err(Error::Domain(format!("tau = {tau} outside [0, 1]")));
    }
    let j = jumping_numbers(model, v, k)?;
    let m = (tau * Rat::from_integer((j.len() as u64).into())).floor().to_integer();
    let m: usize = m.try_into().unwrap_or(0).max(1);
    Ok(&j.values[m - 1] / Rat::from_integer(k.into()))
}

/// Average of `G` over `Δ ∩ {G >= t}`; `None` when that body has zero volume.
fn tail_average(model: &GradedSeriesModel, v: &ValuationModel, t: &Rat) -> Result<Option<Rat>> {
    let body = model.ambient().superlevel(&v.g, t)?;
    let vol = body.volume();
    if vol.is_zero() {
        return Ok(None);
    }
    Ok(Some(body.integral_concave(&v.g)? / vol))
}

/// `S_τ`, the mean of `G` over the top `τ` of the volume. `τ = 0` gives `S0`.
pub fn s_tau(model: &GradedSeriesModel, v: &ValuationModel, tau: &Rat, tol: &Rat) -> Result<Estimate> {
    let (s0, _) = s0_and_sigma(model, v)?;
    if tau.is_zero() {
        if !tol.is_positive() {
            return Err(Error::Domain("tolerance must be positive".into()));
        }
        return Ok(Estimate::Exact(s0));
    }
    let q = quantile(model, v, tau, tol)?;
    let avg = |t: &Rat| -> Result<Rat> { Ok(tail_average(model, v, t)?.unwrap_or_else(|| s0.clone())) };
    match q.quantile {
        Estimate::Exact(t) => Ok(Estimate::Exact(avg(&t)?)),
        // The tail average is non-decreasing in the cut level.
        Estimate::Bracket { lo, hi } => Ok(Estimate::Bracket { lo: avg(&lo)?, hi: avg(&hi)? }),
    }
}

/// The `m` points of `Δ_k` with the largest `G` (lexicographically larger first on ties).
pub fn select_compatible_family(model: &GradedSeriesModel, v: &ValuationModel, k: u64, m: usize) -> Result<PointCloud> {
    v.validate(model.ambient())?;
    let d = model.discrete_body(k)?;
    if m == 0 || m > d.len() {
        return Err(Error::OutOfRange { m, max: d.len() });
    }
    let pts = ranked(&d, &v.g).into_iter().take(m).map(|(_, z)| z).collect();
    PointCloud::new(k, pts)
}

/// The uniform probability measure on a compatible family.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FamilyMeasure {
    pub points: Vec<Point>,
}

impl FamilyMeasure {
    pub fn weight(&self) -> Rat {
        Rat::new(1.into(), (self.points.len() as u64).into())
    }

    /// First moments.
    pub fn mean(&self) -> Point {
        let n = self.points.first().map_or(0, Point::dim);
        let w = self.weight();
        Point::new(
            (0..n)
                .map(|i| self.points.iter().fold(Rat::zero(), |acc, p| acc + &p.0[i]) * &w)
                .collect(),
        )
    }
}

pub fn empirical_family_measure(model: &GradedSeriesModel, v: &ValuationModel, k: u64, m: usize) -> Result<FamilyMeasure> {
    let fam = select_compatible_family(model, v, k, m)?;
    Ok(FamilyMeasure { points: fam.rational_points() })
}

fn restricted_min(
    family: &[ValuationModel],
    mut denom: impl FnMut(&ValuationModel) -> Result<Estimate>,
) -> Result<RestrictedThreshold> {
    if family.is_empty() {
        return Err(Error::EmptyInput("valuation family"));
    }
    let mut best: Option<(Rat, String, Rat, Rat)> = None;
    let mut any_bracket = false;
    for v in family {
        let s = denom(v)?;
        if s.lo().is_zero() || s.lo().is_negative() {
            continue;
        }
        any_bracket |= s.exact().is_none();
        // A/S over S ∈ [lo, hi] ranges over [A/hi, A/lo]; report the upper end.
        let (lo_r, hi_r) = (&v.a / s.hi(), &v.a / s.lo());
        let better = match &best {
            None => true,
            Some((b, label, ..)) => hi_r < *b || (hi_r == *b && v.label < *label),
        };
        if better {
            best = Some((hi_r.clone(), v.label.clone(), lo_r, hi_r));
        }
    }
    let mut labels: Vec<&String> = family.iter().map(|v| &v.label).collect();
    labels.sort();
    Ok(match best {
        Some((value, argmin, lo, hi)) => RestrictedThreshold {
            value: Threshold::Finite(value),
            argmin,
            bracket: any_bracket.then_some((lo, hi)),
        },
        None => RestrictedThreshold { value: Threshold::Infinite, argmin: labels[0].clone(), bracket: None },
    })
}

/// `min_v A(v)/S_{k,m}(v)` over the family: an upper bound on `δ_{k,m}`.
pub fn delta_km_restricted(model: &GradedSeriesModel, family: &[ValuationModel], k: u64, m: usize) -> Result<RestrictedThreshold> {
    restricted_min(family, |v| Ok(Estimate::Exact(s_km(model, v, k, m)?)))
}

/// `δ_{k,1} = α_k` restricted to the family.
pub fn alpha_k_restricted(model: &GradedSeriesModel, family: &[ValuationModel], k: u64) -> Result<RestrictedThreshold> {
    delta_km_restricted(model, family, k, 1)
}

/// `min_v A(v)/S_τ(v)` over the family; `τ = 0` uses `S0`.
pub fn delta_tau_restricted(
    model: &GradedSeriesModel,
    family: &[ValuationModel],
    tau: &Rat,
    tol: &Rat,
) -> Result<RestrictedThreshold> {
    restricted_min(family, |v| s_tau(model, v, tau, tol))
}

/// `(#(Δ^t ∩ Z^n/k), #{x ∈ Δ_k : G(x) >= t})`.
pub fn partial_counts(model: &GradedSeriesModel, v: &ValuationModel, t: &Rat, k: u64) -> Result<(u64, u64)> {
    v.validate(model.ambient())?;
    let kq = Rat::from_integer(k.into());
    let count = |c: &PointCloud| {
        c.points()
            .iter()
            .filter(|z| {
                let p = Point::new(z.iter().map(|&x| Rat::from_integer(x.into()) / &kq).collect());
                v.g.eval(&p) >= *t
            })
            .count() as u64
    };
    Ok((count(&*model.ambient_cloud(k)?), count(&*model.discrete_body(k)?)))
}
