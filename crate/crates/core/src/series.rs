//! Graded-series models: a fixed ambient body `Δ` and, for each level `k`, the
//! discrete body `Δ_k ⊆ Δ ∩ Z^n/k` of realized valuation points.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::{Arc, RwLock};

use serde::{Deserialize, Serialize};

use crate::geometry::{AffineFunctional, ConvexBody, Point};
use crate::lattice::{self, PointCloud};
use crate::par::{map_slice, Exec};
use crate::rational::Rat;
use crate::{Error, Result};

/// The set `N(L)` of levels with `d_k > 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Levels {
    All,
    Finite(BTreeSet<u64>),
}

impl Levels {
    pub fn contains(&self, k: u64) -> bool {
        k >= 1
            && match self {
                Levels::All => true,
                Levels::Finite(s) => s.contains(&k),
            }
    }

    /// Levels in `1..=k_max`, ascending.
    pub fn up_to(&self, k_max: u64) -> Vec<u64> {
        (1..=k_max).filter(|&k| self.contains(k)).collect()
    }
}

/// Model of `O_C(p)` on a curve: `Δ = [0,1]` and `Δ_k = {(k-s)/k : s ∈ S, s <= k}`
/// where `S` is the Weierstrass semigroup of `p`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CurveDivisor {
    gaps: Vec<u64>,
}

impl CurveDivisor {
    /// Validates `1 = N_1 < ... < N_g <= 2g - 1` with a complement closed under addition.
    pub fn new(gaps: Vec<u64>) -> Result<Self> {
        let g = gaps.len() as u64;
        if g == 0 {
            return Err(Error::InvalidModel("gap sequence is empty".into()));
        }
        if gaps[0] != 1 {
            return Err(Error::InvalidModel(format!("first gap must be 1, got {}", gaps[0])));
        }
        if gaps.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidModel("gaps must be strictly increasing".into()));
        }
        let last = gaps[gaps.len() - 1];
        if last > 2 * g - 1 {
            return Err(Error::InvalidModel(format!("largest gap {last} exceeds 2g - 1 = {}", 2 * g - 1)));
        }
        let model = CurveDivisor { gaps };
        for a in 1..=last {
            for b in a..=last - a {
                if model.in_semigroup(a) && model.in_semigroup(b) && !model.in_semigroup(a + b) {
                    return Err(Error::InvalidModel(format!(
                        "complement is not a semigroup: {a} + {b} = {} is a gap",
                        a + b
                    )));
                }
            }
        }
        Ok(model)
    }

    pub fn genus(&self) -> u64 {
        self.gaps.len() as u64
    }

    pub fn gaps(&self) -> &[u64] {
        &self.gaps
    }

    pub fn in_semigroup(&self, s: u64) -> bool {
        self.gaps.binary_search(&s).is_err()
    }

    /// `h^0(kp) = #(S ∩ [0,k])`.
    pub fn h0(&self, k: u64) -> u64 {
        k + 1 - self.gaps.iter().filter(|&&n| n <= k).count() as u64
    }
}

/// All gap sequences of numerical semigroups of genus `g`, in lexicographic order.
pub fn gap_sequences_of_genus(g: u64) -> Vec<Vec<u64>> {
    if g == 0 {
        return vec![Vec::new()];
    }
    // Gaps lie in 1..=2g-1 and always contain 1.
    let span = 2 * g - 1;
    let mut out = Vec::new();
    let mut current = vec![1u64];
    fn extend(next: u64, span: u64, g: u64, current: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if current.len() as u64 == g {
            if CurveDivisor::new(current.clone()).is_ok() {
                out.push(current.clone());
            }
            return;
        }
        for x in next..=span {
            if (span - x + 1) < g - current.len() as u64 {
                break;
            }
            current.push(x);
            extend(x + 1, span, g, current, out);
            current.pop();
        }
    }
    extend(2, span, g, &mut current, &mut out);
    out
}

/// Model of `K_C` on a curve of genus `g >= 2`: `Δ = [0, 2g-2]` with
/// `#(kΔ_k) = d_k`, where `d_1 = g` and `d_k = k(2g-2) + 1 - g` for `k >= 2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CanonicalCurve {
    genus: u64,
    /// Declared `kΔ_k` for selected levels; other levels use the generic pattern.
    patterns: BTreeMap<u64, Vec<u64>>,
}

impl CanonicalCurve {
    pub fn new(genus: u64, patterns: BTreeMap<u64, Vec<u64>>) -> Result<Self> {
        if genus < 2 {
            return Err(Error::InvalidModel(format!("canonical model needs g >= 2, got {genus}")));
        }
        let model = CanonicalCurve { genus, patterns: BTreeMap::new() };
        let mut checked = BTreeMap::new();
        for (k, mut pts) in patterns {
            if k == 0 {
                return Err(Error::InvalidModel("level 0 in pattern map".into()));
            }
            pts.sort_unstable();
            pts.dedup();
            let top = k * (2 * genus - 2);
            if let Some(&bad) = pts.iter().find(|&&x| x > top) {
                return Err(Error::InvalidModel(format!("point {bad} outside [0, {top}] at k = {k}")));
            }
            if pts.len() as u64 != model.d_k(k) {
                return Err(Error::InvalidModel(format!(
                    "pattern at k = {k} has {} points, expected d_k = {}",
                    pts.len(),
                    model.d_k(k)
                )));
            }
            checked.insert(k, pts);
        }
        Ok(CanonicalCurve { genus, patterns: checked })
    }

    /// Builds the pattern map from per-level gap sets `{0..k(2g-2)} \ kΔ_k`.
    pub fn from_gap_sets(genus: u64, gaps: BTreeMap<u64, Vec<u64>>) -> Result<Self> {
        if genus < 2 {
            return Err(Error::InvalidModel(format!("canonical model needs g >= 2, got {genus}")));
        }
        let patterns = gaps
            .into_iter()
            .map(|(k, gs)| {
                let gs: BTreeSet<u64> = gs.into_iter().collect();
                let pts = (0..=k * (2 * genus - 2)).filter(|x| !gs.contains(x)).collect();
                (k, pts)
            })
            .collect();
        Self::new(genus, patterns)
    }

    pub fn genus(&self) -> u64 {
        self.genus
    }

    pub fn patterns(&self) -> &BTreeMap<u64, Vec<u64>> {
        &self.patterns
    }

    pub fn d_k(&self, k: u64) -> u64 {
        if k == 1 {
            self.genus
        } else {
            k * (2 * self.genus - 2) + 1 - self.genus
        }
    }

    /// `kΔ_k` as sorted integers.
    pub fn realized(&self, k: u64) -> Vec<u64> {
        self.patterns.get(&k).cloned().unwrap_or_else(|| (0..self.d_k(k)).collect())
    }

    pub fn is_generic_at(&self, k: u64) -> bool {
        self.realized(k) == (0..self.d_k(k)).collect::<Vec<_>>()
    }
}

/// Rule-based gaps for synthetic models.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GapRule {
    /// Remove every lattice point on the face where `p₁` is maximal.
    RemoveTopFace,
}

/// Ambient lattice points minus declared gap sets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Synthetic {
    gaps: BTreeMap<u64, PointCloud>,
    rule: Option<GapRule>,
}

impl Synthetic {
    pub fn new(gaps: BTreeMap<u64, PointCloud>, rule: Option<GapRule>) -> Result<Self> {
        if let Some((k, c)) = gaps.iter().find(|(k, c)| c.denominator() != **k) {
            return Err(Error::InvalidModel(format!(
                "gap set declared at k = {k} has denominator {}",
                c.denominator()
            )));
        }
        Ok(Synthetic { gaps, rule })
    }

    pub fn gaps(&self) -> &BTreeMap<u64, PointCloud> {
        &self.gaps
    }

    pub fn rule(&self) -> Option<GapRule> {
        self.rule
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Backend {
    /// `Δ_k = Δ ∩ Z^n/k`.
    Toric,
    CurveDivisor(CurveDivisor),
    CanonicalCurve(CanonicalCurve),
    Synthetic(Synthetic),
}

/// A row of [`GradedSeriesModel::gap_table`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct GapRow {
    pub k: u64,
    pub d_k: u64,
    #[serde(rename = "D_k")]
    pub big_d_k: u64,
    pub diff: u64,
}

/// `(max_Δ p₁, max_{Δ_k} p₁, difference)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MaxGapStat {
    pub ambient_max: Rat,
    pub discrete_max: Rat,
    pub gap: Rat,
}

/// A failure of `kΔ_k + k'Δ_{k'} ⊆ (k+k')Δ_{k+k'}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuperadditivityWitness {
    pub k: u64,
    pub k_prime: u64,
    pub a: Vec<i64>,
    pub b: Vec<i64>,
}

type Cache = RwLock<HashMap<u64, Arc<PointCloud>>>;

/// A graded series: ambient body, backend and levels, with a shared cache of
/// discrete and ambient point clouds.
pub struct GradedSeriesModel {
    ambient: ConvexBody,
    backend: Backend,
    levels: Levels,
    discrete: Cache,
    ideal: Cache,
}

impl Clone for GradedSeriesModel {
    fn clone(&self) -> Self {
        Self::assemble(self.ambient.clone(), self.backend.clone(), self.levels.clone())
    }
}

impl fmt::Debug for GradedSeriesModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GradedSeriesModel")
            .field("ambient", &self.ambient)
            .field("backend", &self.backend)
            .field("levels", &self.levels)
            .finish_non_exhaustive()
    }
}

fn segment(lo: Rat, hi: Rat) -> Result<ConvexBody> {
    ConvexBody::hull(&[Point::new(vec![lo]), Point::new(vec![hi])])
}

impl GradedSeriesModel {
    fn assemble(ambient: ConvexBody, backend: Backend, levels: Levels) -> Self {
        GradedSeriesModel {
            ambient,
            backend,
            levels,
            discrete: RwLock::default(),
            ideal: RwLock::default(),
        }
    }

    pub fn toric(polytope: ConvexBody) -> Result<Self> {
        if polytope.is_empty() {
            return Err(Error::InvalidModel("toric polytope is empty".into()));
        }
        Ok(Self::assemble(polytope, Backend::Toric, Levels::All))
    }

    pub fn curve_divisor(gaps: Vec<u64>) -> Result<Self> {
        let c = CurveDivisor::new(gaps)?;
        Ok(Self::assemble(segment(Rat::from_integer(0.into()), Rat::from_integer(1.into()))?, Backend::CurveDivisor(c), Levels::All))
    }

    pub fn canonical_curve(c: CanonicalCurve) -> Result<Self> {
        let top = Rat::from_integer((2 * c.genus() - 2).into());
        Ok(Self::assemble(segment(Rat::from_integer(0.into()), top)?, Backend::CanonicalCurve(c), Levels::All))
    }

    /// A synthetic model. The gap sets must lie in `ambient ∩ Z^n/k`.
    pub fn synthetic(ambient: ConvexBody, s: Synthetic, levels: Levels) -> Result<Self> {
        if ambient.is_empty() {
            return Err(Error::InvalidModel("ambient body is empty".into()));
        }
        let model = Self::assemble(ambient, Backend::Synthetic(s), levels);
        if let Backend::Synthetic(s) = &model.backend {
            for (k, c) in s.gaps() {
                let amb = model.ambient_cloud(*k)?;
                if !c.is_subset(&amb) {
                    return Err(Error::InvalidModel(format!("gap set at k = {k} is not inside Δ ∩ Z^n/k")));
                }
            }
        }
        Ok(model)
    }

    /// The same model restricted to the given levels.
    pub fn with_levels(&self, levels: Levels) -> Self {
        Self::assemble(self.ambient.clone(), self.backend.clone(), levels)
    }

    pub fn ambient(&self) -> &ConvexBody {
        &self.ambient
    }

    pub fn backend(&self) -> &Backend {
        &self.backend
    }

    pub fn levels(&self) -> &Levels {
        &self.levels
    }

    pub fn dim(&self) -> usize {
        self.ambient.dim()
    }

    fn cached(cache: &Cache, k: u64, make: impl FnOnce() -> Result<PointCloud>) -> Result<Arc<PointCloud>> {
        if let Some(c) = cache.read().expect("cache lock").get(&k) {
            return Ok(Arc::clone(c));
        }
        let c = Arc::new(make()?);
        cache.write().expect("cache lock").entry(k).or_insert_with(|| Arc::clone(&c));
        Ok(c)
    }

    /// `Δ ∩ Z^n/k`.
    pub fn ambient_cloud(&self, k: u64) -> Result<Arc<PointCloud>> {
        Self::cached(&self.ideal, k, || lattice::enumerate(&self.ambient, k))
    }

    /// `D_k = #(Δ ∩ Z^n/k)`.
    pub fn big_d_k(&self, k: u64) -> Result<u64> {
        Ok(self.ambient_cloud(k)?.len() as u64)
    }

    fn build_discrete(&self, k: u64) -> Result<PointCloud> {
        match &self.backend {
            Backend::Toric => Ok((*self.ambient_cloud(k)?).clone()),
            Backend::CurveDivisor(c) => {
                let pts = (0..=k).filter(|&s| c.in_semigroup(s)).map(|s| vec![(k - s) as i64]).collect();
                PointCloud::new(k, pts)
            }
            Backend::CanonicalCurve(c) => {
                PointCloud::new(k, c.realized(k).into_iter().map(|x| vec![x as i64]).collect())
            }
            Backend::Synthetic(s) => {
                let amb = self.ambient_cloud(k)?;
                let mut out = match s.gaps.get(&k) {
                    Some(g) => amb.difference(g)?,
                    None => (*amb).clone(),
                };
                if let Some(GapRule::RemoveTopFace) = s.rule {
                    let (_, top) = self.ambient.range(&AffineFunctional::p1(self.dim())).expect("nonempty ambient");
                    let kq = Rat::from_integer(k.into());
                    let kept = out
                        .points()
                        .iter()
                        .filter(|z| Rat::from_integer(z[0].into()) != &top * &kq)
                        .cloned()
                        .collect();
                    out = PointCloud::new(k, kept)?;
                }
                Ok(out)
            }
        }
    }

    /// `Δ_k`. Fails with [`Error::LevelOutOfSeries`] when `k ∉ N(L)`.
    pub fn discrete_body(&self, k: u64) -> Result<Arc<PointCloud>> {
        if !self.levels.contains(k) {
            return Err(Error::LevelOutOfSeries(k));
        }
        let c = Self::cached(&self.discrete, k, || self.build_discrete(k))?;
        if c.is_empty() {
            return Err(Error::LevelOutOfSeries(k));
        }
        Ok(c)
    }

    pub fn d_k(&self, k: u64) -> Result<u64> {
        Ok(self.discrete_body(k)?.len() as u64)
    }

    /// `(Δ ∩ Z^n/k) \ Δ_k`.
    pub fn gap_set(&self, k: u64) -> Result<PointCloud> {
        let d = self.discrete_body(k)?;
        self.ambient_cloud(k)?.difference(&d)
    }

    /// Rows `(k, d_k, D_k, D_k - d_k)` for `k ∈ N(L) ∩ [1, k_max]`.
    pub fn gap_table(&self, k_max: u64) -> Result<Vec<GapRow>> {
        self.gap_table_with(k_max, Exec::default())
    }

    pub fn gap_table_with(&self, k_max: u64, exec: Exec) -> Result<Vec<GapRow>> {
        let ks = self.levels.up_to(k_max);
        map_slice(exec, &ks, |&k| {
            let d_k = self.d_k(k)?;
            let big_d_k = self.big_d_k(k)?;
            Ok(GapRow { k, d_k, big_d_k, diff: big_d_k - d_k })
        })
        .into_iter()
        .collect()
    }

    /// Recovers `N_i = min{k : D_k - d_k = i}` with its witnessing `k`.
    pub fn recover_gaps(&self) -> Result<Vec<(u64, u64)>> {
        let Backend::CurveDivisor(c) = &self.backend else {
            return Err(Error::Domain("gap recovery needs a curve-divisor model".into()));
        };
        let g = c.genus();
        let mut out = Vec::with_capacity(g as usize);
        for row in self.gap_table(2 * g)? {
            while (out.len() as u64) < row.diff {
                out.push((row.k, row.k));
            }
        }
        Ok(out)
    }

    /// `kΔ_k + 1` for the canonical model.
    pub fn k_weierstrass_sequence(&self, k: u64) -> Result<Vec<u64>> {
        let Backend::CanonicalCurve(c) = &self.backend else {
            return Err(Error::Domain("k-Weierstrass sequences need a canonical-curve model".into()));
        };
        if !self.levels.contains(k) {
            return Err(Error::LevelOutOfSeries(k));
        }
        Ok(c.realized(k).into_iter().map(|x| x + 1).collect())
    }

    pub fn max_gap_stat(&self, k: u64) -> Result<MaxGapStat> {
        let p1 = AffineFunctional::p1(self.dim());
        let (_, ambient_max) = self.ambient.range(&p1).expect("nonempty ambient");
        let d = self.discrete_body(k)?;
        let top = d.points().iter().map(|z| z[0]).max().expect("nonempty discrete body");
        let discrete_max = Rat::new(top.into(), k.into());
        Ok(MaxGapStat { gap: &ambient_max - &discrete_max, ambient_max, discrete_max })
    }

    /// Checks `kΔ_k + k'Δ_{k'} ⊆ (k+k')Δ_{k+k'}` for all levels with `k + k' <= k_max`.
    pub fn check_superadditive(&self, k_max: u64) -> Result<Option<SuperadditivityWitness>> {
        let ks = self.levels.up_to(k_max);
        let pairs: Vec<(u64, u64)> = ks
            .iter()
            .flat_map(|&k| ks.iter().map(move |&kp| (k, kp)))
            .filter(|&(k, kp)| k <= kp && k + kp <= k_max && self.levels.contains(k + kp))
            .collect();
        let found = map_slice(Exec::default(), &pairs, |&(k, kp)| -> Result<Option<SuperadditivityWitness>> {
            let (a, b, s) = (self.discrete_body(k)?, self.discrete_body(kp)?, self.discrete_body(k + kp)?);
            for x in a.points() {
                for y in b.points() {
                    let sum: Vec<i64> = x.iter().zip(y).map(|(p, q)| p + q).collect();
                    if !s.contains(&sum) {
                        return Ok(Some(SuperadditivityWitness { k, k_prime: kp, a: x.clone(), b: y.clone() }));
                    }
                }
            }
            Ok(None)
        });
        for r in found {
            if let Some(w) = r? {
                return Ok(Some(w));
            }
        }
        Ok(None)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    fn rats(c: &PointCloud) -> Vec<Rat> {
        c.rational_points().into_iter().map(|p| p.0[0].clone()).collect()
    }

    fn simplex() -> ConvexBody {
        ConvexBody::hull(&[Point::from_ints(&[0, 0]), Point::from_ints(&[1, 0]), Point::from_ints(&[0, 1])]).unwrap()
    }

    #[test]
    fn discrete_bodies() {
        let hyper = GradedSeriesModel::curve_divisor(vec![1, 2, 5]).unwrap();
        assert_eq!(rats(&hyper.discrete_body(5).unwrap()), vec![rat(1, 5), rat(2, 5), int(1)]);
        assert_eq!(rats(&hyper.gap_set(5).unwrap()), vec![int(0), rat(3, 5), rat(4, 5)]);
        assert_eq!(hyper.d_k(3).unwrap(), 2);

        let t = GradedSeriesModel::toric(simplex()).unwrap();
        assert_eq!(t.discrete_body(1).unwrap().len(), 3);
        for k in 1..8u64 {
            assert_eq!(t.d_k(k).unwrap(), (k + 1) * (k + 2) / 2);
            assert!(t.gap_set(k).unwrap().is_empty());
        }

        let canon = GradedSeriesModel::canonical_curve(CanonicalCurve::new(3, BTreeMap::new()).unwrap()).unwrap();
        let pts = rats(&canon.discrete_body(2).unwrap());
        assert_eq!(pts, (0..6).map(|i| rat(i, 2)).collect::<Vec<_>>());
        assert_eq!(canon.d_k(2).unwrap(), 6);
        assert_eq!(rats(&canon.gap_set(2).unwrap()), vec![int(3), rat(7, 2), int(4)]);
    }

    #[test]
    fn gap_recovery_and_tables() {
        for gaps in [vec![1, 2, 4], vec![1, 2, 3], vec![1, 2, 5]] {
            let m = GradedSeriesModel::curve_divisor(gaps.clone()).unwrap();
            let rec = m.recover_gaps().unwrap();
            assert_eq!(rec, gaps.iter().map(|&g| (g, g)).collect::<Vec<_>>());
        }
        let hyper = GradedSeriesModel::curve_divisor(vec![1, 2, 5]).unwrap();
        let diffs: Vec<u64> = hyper.gap_table(5).unwrap().iter().map(|r| r.diff).collect();
        assert_eq!(diffs, vec![1, 2, 2, 2, 3]);
        assert_eq!(hyper.gap_table(5).unwrap()[4], GapRow { k: 5, d_k: 3, big_d_k: 6, diff: 3 });
        let canon = GradedSeriesModel::canonical_curve(CanonicalCurve::new(3, BTreeMap::new()).unwrap()).unwrap();
        let diffs: Vec<u64> = canon.gap_table(2).unwrap().iter().map(|r| r.diff).collect();
        assert_eq!(diffs, vec![2, 3]);
    }

    #[test]
    fn validation() {
        assert!(CurveDivisor::new(vec![1, 3]).is_ok());
        assert!(CurveDivisor::new(vec![2, 3]).is_err());
        assert!(CurveDivisor::new(vec![1, 4]).is_err());
        // 2 + 2 = 4 but 4 is a gap
        assert!(CurveDivisor::new(vec![1, 3, 4]).is_err());
        assert!(CanonicalCurve::new(3, BTreeMap::from([(1, vec![0, 1])])).is_err());
        let counts: Vec<usize> = (0..=6).map(|g| gap_sequences_of_genus(g).len()).collect();
        assert_eq!(counts, vec![1, 1, 2, 4, 7, 12, 23]);
    }

    #[test]
    fn k_weierstrass_sequences() {
        let generic = GradedSeriesModel::canonical_curve(CanonicalCurve::new(3, BTreeMap::new()).unwrap()).unwrap();
        assert_eq!(generic.k_weierstrass_sequence(2).unwrap(), vec![1, 2, 3, 4, 5, 6]);
        let flex = CanonicalCurve::new(3, BTreeMap::from([(1, vec![0, 1, 3])])).unwrap();
        let flex = GradedSeriesModel::canonical_curve(flex).unwrap();
        assert_eq!(flex.k_weierstrass_sequence(1).unwrap(), vec![1, 2, 4]);
        let g2 = GradedSeriesModel::canonical_curve(CanonicalCurve::new(2, BTreeMap::new()).unwrap()).unwrap();
        assert_eq!(g2.k_weierstrass_sequence(1).unwrap(), vec![1, 2]);
    }

    #[test]
    fn max_gap_stats() {
        let canon = GradedSeriesModel::canonical_curve(CanonicalCurve::new(3, BTreeMap::new()).unwrap()).unwrap();
        let s = canon.max_gap_stat(2).unwrap();
        assert_eq!((s.ambient_max, s.discrete_max, s.gap), (int(4), rat(5, 2), rat(3, 2)));
        let t = GradedSeriesModel::toric(simplex()).unwrap().max_gap_stat(3).unwrap();
        assert_eq!(t.gap, int(0));
        let hyper = GradedSeriesModel::curve_divisor(vec![1, 2, 5]).unwrap();
        assert_eq!(hyper.max_gap_stat(5).unwrap().gap, int(0));
    }

    #[test]
    fn superadditivity_checks() {
        let hyper = GradedSeriesModel::curve_divisor(vec![1, 2, 5]).unwrap();
        assert_eq!(hyper.check_superadditive(12).unwrap(), None);
        let sq = ConvexBody::hull(&[
            Point::from_ints(&[0, 0]),
            Point::from_ints(&[1, 0]),
            Point::from_ints(&[0, 1]),
            Point::from_ints(&[1, 1]),
        ])
        .unwrap();
        let top = Synthetic::new(BTreeMap::new(), Some(GapRule::RemoveTopFace)).unwrap();
        let m = GradedSeriesModel::synthetic(sq.clone(), top, Levels::All).unwrap();
        assert_eq!(m.d_k(3).unwrap(), 12);
        assert_eq!(m.check_superadditive(8).unwrap(), None);
        // Removing the origin at k = 2 breaks 1Δ_1 + 1Δ_1 ⊆ 2Δ_2.
        let hole = Synthetic::new(BTreeMap::from([(2, PointCloud::new(2, vec![vec![0, 0]]).unwrap())]), None).unwrap();
        let m = GradedSeriesModel::synthetic(sq, hole, Levels::All).unwrap();
        let w = m.check_superadditive(2).unwrap().unwrap();
        assert_eq!((w.k, w.k_prime, w.a, w.b), (1, 1, vec![0, 0], vec![0, 0]));
    }

    #[test]
    fn levels_are_enforced() {
        let sq = simplex();
        let m = GradedSeriesModel::synthetic(
            sq,
            Synthetic::new(BTreeMap::new(), None).unwrap(),
            Levels::Finite(BTreeSet::from([2])),
        )
        .unwrap();
        assert!(matches!(m.discrete_body(1), Err(Error::LevelOutOfSeries(1))));
        assert_eq!(m.gap_table(3).unwrap().len(), 1);
    }
}
