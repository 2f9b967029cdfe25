//! Bounded rational polytopes with synchronized vertex and halfspace
//! representations.
//!
//! Bodies may be lower-dimensional or empty. A lower-dimensional body stores its
//! affine hull as pairs of opposite halfspaces next to its facets, and has
//! `n`-volume zero. Coordinates are indexed from zero, so the first projection
//! `p₁` is coordinate `0`.

mod dd;
pub(crate) mod linalg;
mod lp;
mod volume;

use std::collections::BTreeSet;

use num::bigint::BigInt;
use num::{One, Signed, Zero};

use crate::rational::{sqrt_upper, Rat, SQRT_BITS};
use crate::{Error, Result};
use linalg::{dot, integer_direction, nullspace, primitive, rank, rref, sub, to_rats};

/// A point of `Q^n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Point(pub Vec<Rat>);

impl std::fmt::Display for Point {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let c: Vec<String> = self.0.iter().map(crate::rational::fmt_rat).collect();
        write!(f, "({})", c.join(", "))
    }
}

impl Point {
    pub fn new(coords: Vec<Rat>) -> Self {
        Point(coords)
    }

    pub fn from_ints(coords: &[i64]) -> Self {
        Point(coords.iter().map(|&c| Rat::from_integer(c.into())).collect())
    }

    /// Parses each coordinate with [`crate::rational::parse_rat`].
    pub fn parse(coords: &[&str]) -> Result<Self> {
        coords.iter().map(|s| crate::rational::parse_rat(s)).collect::<Result<_>>().map(Point)
    }

    pub fn origin(n: usize) -> Self {
        Point(vec![Rat::zero(); n])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[Rat] {
        &self.0
    }

    pub fn scaled(&self, lambda: &Rat) -> Point {
        Point(self.0.iter().map(|x| x * lambda).collect())
    }

    pub fn translated(&self, by: &Point) -> Point {
        Point(self.0.iter().zip(&by.0).map(|(x, y)| x + y).collect())
    }
}

/// The closed halfspace `{x : normal·x <= offset}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HalfSpace {
    pub normal: Vec<Rat>,
    pub offset: Rat,
}

impl HalfSpace {
    pub fn new(normal: Vec<Rat>, offset: Rat) -> Result<Self> {
        if normal.iter().all(Zero::is_zero) {
            return Err(Error::Degenerate("halfspace with zero normal".into()));
        }
        Ok(HalfSpace { normal, offset })
    }

    /// `x_i <= c`.
    pub fn upper(n: usize, i: usize, c: Rat) -> Self {
        let mut normal = vec![Rat::zero(); n];
        normal[i] = Rat::one();
        HalfSpace { normal, offset: c }
    }

    /// `x_i >= c`.
    pub fn lower(n: usize, i: usize, c: Rat) -> Self {
        let mut normal = vec![Rat::zero(); n];
        normal[i] = -Rat::one();
        HalfSpace { normal, offset: -c }
    }

    pub fn dim(&self) -> usize {
        self.normal.len()
    }

    /// `offset - normal·p`, nonnegative iff `p` is inside.
    pub fn slack(&self, p: &Point) -> Rat {
        &self.offset - dot(&self.normal, &p.0)
    }

    pub fn contains(&self, p: &Point) -> bool {
        !self.slack(p).is_negative()
    }

    fn equality_pair(normal: Vec<Rat>, value: Rat) -> [HalfSpace; 2] {
        let neg: Vec<Rat> = normal.iter().map(|x| -x).collect();
        [HalfSpace { normal, offset: value.clone() }, HalfSpace { normal: neg, offset: -value }]
    }
}

/// The affine map `x ↦ gradient·x + constant`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AffineFunctional {
    pub gradient: Vec<Rat>,
    pub constant: Rat,
}

impl AffineFunctional {
    pub fn new(gradient: Vec<Rat>, constant: Rat) -> Self {
        AffineFunctional { gradient, constant }
    }

    /// The coordinate projection `x ↦ x_i`.
    pub fn coordinate(n: usize, i: usize) -> Self {
        let mut gradient = vec![Rat::zero(); n];
        gradient[i] = Rat::one();
        AffineFunctional { gradient, constant: Rat::zero() }
    }

    /// The first projection `p₁`.
    pub fn p1(n: usize) -> Self {
        Self::coordinate(n, 0)
    }

    pub fn dim(&self) -> usize {
        self.gradient.len()
    }

    pub fn eval(&self, p: &Point) -> Rat {
        dot(&self.gradient, &p.0) + &self.constant
    }

    pub fn is_constant(&self) -> bool {
        self.gradient.iter().all(Zero::is_zero)
    }

    fn minus(&self, o: &AffineFunctional) -> AffineFunctional {
        AffineFunctional {
            gradient: sub(&self.gradient, &o.gradient),
            constant: &self.constant - &o.constant,
        }
    }
}

/// A constraint `f(x) <= 0`, resolved when `f` is constant.
enum Constraint {
    Always,
    Never,
    Half(HalfSpace),
}

fn nonpositive(f: &AffineFunctional) -> Constraint {
    if f.is_constant() {
        if f.constant.is_positive() {
            Constraint::Never
        } else {
            Constraint::Always
        }
    } else {
        Constraint::Half(HalfSpace { normal: f.gradient.clone(), offset: -f.constant.clone() })
    }
}

/// Pointwise minimum of finitely many affine functions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConcavePL {
    pieces: Vec<AffineFunctional>,
}

impl ConcavePL {
    pub fn new(pieces: Vec<AffineFunctional>) -> Result<Self> {
        let Some(n) = pieces.first().map(AffineFunctional::dim) else {
            return Err(Error::EmptyInput("affine pieces"));
        };
        if let Some(bad) = pieces.iter().find(|p| p.dim() != n) {
            return Err(Error::DimensionMismatch { expected: n, found: bad.dim() });
        }
        Ok(ConcavePL { pieces })
    }

    pub fn affine(f: AffineFunctional) -> Self {
        ConcavePL { pieces: vec![f] }
    }

    /// `G = p₁`.
    pub fn p1(n: usize) -> Self {
        Self::affine(AffineFunctional::p1(n))
    }

    pub fn pieces(&self) -> &[AffineFunctional] {
        &self.pieces
    }

    pub fn dim(&self) -> usize {
        self.pieces[0].dim()
    }

    pub fn eval(&self, p: &Point) -> Rat {
        self.pieces.iter().map(|f| f.eval(p)).min().expect("nonempty pieces")
    }

    /// Pieces with duplicates removed, in first-occurrence order.
    fn distinct_pieces(&self) -> Vec<&AffineFunctional> {
        let mut out: Vec<&AffineFunctional> = Vec::new();
        for p in &self.pieces {
            if !out.contains(&p) {
                out.push(p);
            }
        }
        out
    }
}

/// A bounded convex polytope in `Q^n`.
#[derive(Clone, Debug)]
pub struct ConvexBody {
    dim: usize,
    vertices: Vec<Point>,
    halfspaces: Vec<HalfSpace>,
    affine_dim: Option<usize>,
}

impl PartialEq for ConvexBody {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.vertices == other.vertices
    }
}

impl Eq for ConvexBody {}

fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

fn lcm_of_denoms(v: &[Rat]) -> BigInt {
    use num::Integer;
    v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
}

/// Facets `a·y <= b` (primitive integer `a`) of a full-dimensional point set in `Q^r`.
fn facets_of(points: &[Vec<Rat>]) -> Result<Vec<(Vec<Rat>, Rat)>> {
    // (a, b) is a valid inequality iff b - a·y >= 0 for every point y.
    let rows: Vec<Vec<BigInt>> = points
        .iter()
        .map(|y| {
            let l = Rat::from_integer(lcm_of_denoms(y));
            let mut row: Vec<BigInt> = y.iter().map(|c| -(c * &l).to_integer()).collect();
            row.push(l.to_integer());
            row
        })
        .collect();
    let rays = dd::extreme_rays(&rows)?;
    let r = points[0].len();
    let mut out = Vec::new();
    for ray in rays {
        let a = to_rats(&ray[..r]);
        let Some((w, scale)) = primitive(&a) else {
            continue;
        };
        let b = Rat::from_integer(ray[r].clone()) / scale;
        out.push((to_rats(&w), b));
    }
    Ok(out)
}

impl ConvexBody {
    /// The empty body in `Q^n`.
    pub fn empty(n: usize) -> Self {
        ConvexBody { dim: n, vertices: Vec::new(), halfspaces: Vec::new(), affine_dim: None }
    }

    /// Convex hull of a nonempty point list.
    pub fn hull(points: &[Point]) -> Result<Self> {
        let Some(n) = points.first().map(Point::dim) else {
            return Err(Error::EmptyInput("points"));
        };
        if let Some(bad) = points.iter().find(|p| p.dim() != n) {
            return Err(Error::DimensionMismatch { expected: n, found: bad.dim() });
        }
        Self::hull_in(n, points.to_vec())
    }

    fn hull_in(n: usize, mut pts: Vec<Point>) -> Result<Self> {
        pts.sort();
        pts.dedup();
        if pts.is_empty() {
            return Ok(Self::empty(n));
        }
        let p0 = pts[0].clone();
        let diffs: Vec<Vec<Rat>> = pts[1..].iter().map(|p| sub(&p.0, &p0.0)).collect();
        let (basis, pivots) = rref(diffs);
        let r = pivots.len();

        let mut halfspaces = Vec::new();
        for a in nullspace(&basis, n) {
            let (w, _) = primitive(&a).expect("nullspace vectors are nonzero");
            let w = to_rats(&w);
            let c = dot(&w, &p0.0);
            halfspaces.extend(HalfSpace::equality_pair(w, c));
        }
        if r == 0 {
            halfspaces.sort();
            return Ok(ConvexBody { dim: n, vertices: vec![p0], halfspaces, affine_dim: Some(0) });
        }

        let proj: Vec<Vec<Rat>> =
            pts.iter().map(|p| pivots.iter().map(|&i| p.0[i].clone()).collect()).collect();
        let facets = facets_of(&proj)?;
        let vertices: Vec<Point> = pts
            .iter()
            .zip(&proj)
            .filter(|(_, y)| {
                let tight: Vec<Vec<Rat>> =
                    facets.iter().filter(|(a, b)| dot(a, y) == *b).map(|(a, _)| a.clone()).collect();
                rank(&tight) == r
            })
            .map(|(p, _)| p.clone())
            .collect();
        for (a, b) in facets {
            let mut normal = vec![Rat::zero(); n];
            for (k, &i) in pivots.iter().enumerate() {
                normal[i] = a[k].clone();
            }
            halfspaces.push(HalfSpace { normal, offset: b });
        }
        halfspaces.sort();
        Ok(ConvexBody { dim: n, vertices, halfspaces, affine_dim: Some(r) })
    }

    /// The polytope `{x : h.normal·x <= h.offset for every h}`. Fails with
    /// [`Error::Unbounded`] when it is unbounded.
    pub fn from_halfspaces(n: usize, hs: &[HalfSpace]) -> Result<Self> {
        if let Some(bad) = hs.iter().find(|h| h.dim() != n) {
            return Err(Error::DimensionMismatch { expected: n, found: bad.dim() });
        }
        if hs.is_empty() {
            return Err(Error::Unbounded);
        }
        // Homogenize: b s - a·x >= 0 together with s >= 0.
        let mut rows: Vec<Vec<BigInt>> = hs
            .iter()
            .map(|h| {
                let mut v: Vec<Rat> = h.normal.iter().map(|x| -x).collect();
                v.push(h.offset.clone());
                integer_direction(&v)
            })
            .collect();
        let mut s_row = vec![BigInt::zero(); n + 1];
        s_row[n] = BigInt::one();
        rows.push(s_row);

        let rays = dd::extreme_rays(&rows)?;
        let mut pts = Vec::with_capacity(rays.len());
        for ray in rays {
            let s = Rat::from_integer(ray[n].clone());
            if s.is_zero() {
                return Err(Error::Unbounded);
            }
            pts.push(Point(ray[..n].iter().map(|x| Rat::from_integer(x.clone()) / &s).collect()));
        }
        Self::hull_in(n, pts)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Vertices in lexicographic order.
    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    /// Facets with primitive integer normals, plus the affine-hull equalities
    /// (as opposite pairs) when the body is lower-dimensional.
    pub fn halfspaces(&self) -> &[HalfSpace] {
        &self.halfspaces
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Dimension of the affine hull; `None` for the empty body.
    pub fn affine_dim(&self) -> Option<usize> {
        self.affine_dim
    }

    pub fn is_full_dimensional(&self) -> bool {
        self.affine_dim == Some(self.dim)
    }

    pub fn contains(&self, p: &Point) -> bool {
        !self.is_empty() && p.dim() == self.dim && self.halfspaces.iter().all(|h| h.contains(p))
    }

    /// `min` and `max` of `f` over the body; `None` if empty.
    pub fn range(&self, f: &AffineFunctional) -> Option<(Rat, Rat)> {
        let vals = self.vertices.iter().map(|v| f.eval(v));
        let (mut lo, mut hi): (Option<Rat>, Option<Rat>) = (None, None);
        for v in vals {
            if lo.as_ref().is_none_or(|l| v < *l) {
                lo = Some(v.clone());
            }
            if hi.as_ref().is_none_or(|h| v > *h) {
                hi = Some(v);
            }
        }
        lo.zip(hi)
    }

    pub fn intersect_halfspace(&self, h: &HalfSpace) -> Result<Self> {
        self.intersect(std::slice::from_ref(h))
    }

    pub fn intersect(&self, extra: &[HalfSpace]) -> Result<Self> {
        if let Some(bad) = extra.iter().find(|h| h.dim() != self.dim) {
            return Err(Error::DimensionMismatch { expected: self.dim, found: bad.dim() });
        }
        if self.is_empty() {
            return Ok(self.clone());
        }
        if extra.iter().all(|h| self.vertices.iter().all(|v| h.contains(v))) {
            return Ok(self.clone());
        }
        let mut hs = self.halfspaces.clone();
        hs.extend_from_slice(extra);
        Self::from_halfspaces(self.dim, &hs)
    }

    fn intersect_constraints(&self, cons: Vec<Constraint>) -> Result<Self> {
        let mut hs = Vec::new();
        for c in cons {
            match c {
                Constraint::Always => {}
                Constraint::Never => return Ok(Self::empty(self.dim)),
                Constraint::Half(h) => hs.push(h),
            }
        }
        self.intersect(&hs)
    }

    fn full_triangulation(&self) -> Option<volume::Triangulation> {
        if !self.is_full_dimensional() {
            return None;
        }
        let verts: Vec<Vec<Rat>> = self.vertices.iter().map(|p| p.0.clone()).collect();
        let facets: Vec<Vec<usize>> = self
            .halfspaces
            .iter()
            .map(|h| (0..verts.len()).filter(|&i| h.slack(&self.vertices[i]).is_zero()).collect())
            .collect();
        Some(volume::triangulate(&verts, &facets, self.dim))
    }

    fn vertex_coords(&self) -> Vec<Vec<Rat>> {
        self.vertices.iter().map(|p| p.0.clone()).collect()
    }

    /// Lebesgue `n`-volume; zero for lower-dimensional or empty bodies.
    pub fn volume(&self) -> Rat {
        match self.full_triangulation() {
            Some(t) => t.volume(&self.vertex_coords()),
            None => Rat::zero(),
        }
    }

    /// Volume and centroid in one pass.
    pub fn moments(&self) -> Result<(Rat, Point)> {
        let t = self.full_triangulation().ok_or_else(|| self.degenerate())?;
        let (vol, c) = t.moments(&self.vertex_coords());
        let c = c.ok_or_else(|| self.degenerate())?;
        Ok((vol, Point(c)))
    }

    fn degenerate(&self) -> Error {
        Error::Degenerate(format!(
            "body of affine dimension {:?} in Q^{} has zero volume",
            self.affine_dim, self.dim
        ))
    }

    pub fn barycenter(&self) -> Result<Point> {
        self.moments().map(|(_, c)| c)
    }

    /// `∫_B f dx`; zero for bodies of zero volume.
    pub fn integral(&self, f: &AffineFunctional) -> Result<Rat> {
        check_dim(self.dim, f.dim())?;
        if !self.is_full_dimensional() {
            return Ok(Rat::zero());
        }
        let (vol, c) = self.moments()?;
        Ok(vol * f.eval(&c))
    }

    fn all_regions(&self, g: &ConcavePL) -> Result<Vec<(AffineFunctional, ConvexBody)>> {
        check_dim(self.dim, g.dim())?;
        let pieces = g.distinct_pieces();
        let mut out = Vec::new();
        for (i, pi) in pieces.iter().enumerate() {
            let cons = pieces
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, pj)| nonpositive(&pi.minus(pj)))
                .collect();
            let region = self.intersect_constraints(cons)?;
            if !region.is_empty() {
                out.push(((*pi).clone(), region));
            }
        }
        Ok(out)
    }

    /// Subdivision of the body into regions where one piece of `g` attains the minimum.
    /// Regions of zero volume are dropped.
    pub fn linearity_regions(&self, g: &ConcavePL) -> Result<Vec<(AffineFunctional, ConvexBody)>> {
        let mut regions = self.all_regions(g)?;
        regions.retain(|(_, r)| r.is_full_dimensional());
        Ok(regions)
    }

    /// Vertices of every linearity region of `g`, sorted and deduplicated.
    /// `g` restricted to the body is affine between these points, so its
    /// extreme values and the breakpoints of `t ↦ |B ∩ {g >= t}|` occur here.
    pub fn linearity_vertices(&self, g: &ConcavePL) -> Result<Vec<Point>> {
        let set: BTreeSet<Point> =
            self.all_regions(g)?.into_iter().flat_map(|(_, r)| r.vertices).collect();
        Ok(set.into_iter().collect())
    }

    /// `∫_B g dx` for a concave piecewise-affine `g`.
    pub fn integral_concave(&self, g: &ConcavePL) -> Result<Rat> {
        if !self.is_full_dimensional() {
            check_dim(self.dim, g.dim())?;
            return Ok(Rat::zero());
        }
        if g.pieces.len() == 1 {
            return self.integral(&g.pieces[0]);
        }
        let mut total = Rat::zero();
        for (f, region) in self.linearity_regions(g)? {
            total += region.integral(&f)?;
        }
        Ok(total)
    }

    /// `B ∩ {g >= t}`.
    pub fn superlevel(&self, g: &ConcavePL, t: &Rat) -> Result<Self> {
        check_dim(self.dim, g.dim())?;
        let cons = g
            .pieces
            .iter()
            .map(|f| {
                // t - f(x) <= 0
                nonpositive(&AffineFunctional {
                    gradient: f.gradient.iter().map(|x| -x).collect(),
                    constant: t - &f.constant,
                })
            })
            .collect();
        self.intersect_constraints(cons)
    }

    /// `B ∩ {f = t}` as a body in `Q^n`.
    pub fn slice(&self, f: &AffineFunctional, t: &Rat) -> Result<Self> {
        check_dim(self.dim, f.dim())?;
        let lhs = AffineFunctional { gradient: f.gradient.clone(), constant: &f.constant - t };
        let neg = AffineFunctional {
            gradient: f.gradient.iter().map(|x| -x).collect(),
            constant: t - &f.constant,
        };
        self.intersect_constraints(vec![nonpositive(&lhs), nonpositive(&neg)])
    }

    /// Drops coordinate `j`.
    pub fn project_out(&self, j: usize) -> Result<Self> {
        if self.dim == 0 || j >= self.dim {
            return Err(Error::Domain(format!("cannot drop coordinate {j} in Q^{}", self.dim)));
        }
        let pts: Vec<Point> = self
            .vertices
            .iter()
            .map(|p| Point(p.0.iter().enumerate().filter(|&(i, _)| i != j).map(|(_, x)| x.clone()).collect()))
            .collect();
        Self::hull_in(self.dim - 1, pts)
    }

    /// `(n-1)`-volume of `B ∩ {f = t}` in the lattice-normalized volume form of
    /// the hyperplane. For `n = 1` the slice is a point and the result is `1`
    /// or `0`. A constant `f` has no slicing hyperplane and gives `0`.
    pub fn slice_volume(&self, f: &AffineFunctional, t: &Rat) -> Result<Rat> {
        check_dim(self.dim, f.dim())?;
        let Some((g, _)) = primitive(&f.gradient) else {
            return Ok(Rat::zero());
        };
        let s = self.slice(f, t)?;
        if s.is_empty() {
            return Ok(Rat::zero());
        }
        if self.dim == 1 {
            return Ok(Rat::one());
        }
        let j = g.iter().position(|x| !x.is_zero()).expect("nonzero gradient");
        let projected = s.project_out(j)?;
        Ok(projected.volume() / Rat::from_integer(g[j].abs()))
    }

    /// Sorted distinct values of `f` at the vertices: the breakpoints of `t ↦ slice_volume(f, t)`.
    pub fn slice_breakpoints(&self, f: &AffineFunctional) -> Vec<Rat> {
        let set: BTreeSet<Rat> = self.vertices.iter().map(|v| f.eval(v)).collect();
        set.into_iter().collect()
    }

    /// `∫ slice_volume(f, t) dt` by Simpson's rule on each breakpoint interval,
    /// exact for `n <= 4` since the slice volume is piecewise polynomial of degree `n-1`.
    pub fn volume_by_slices(&self, f: &AffineFunctional) -> Result<Rat> {
        let bps = self.slice_breakpoints(f);
        let six = Rat::from_integer(6.into());
        let mut total = Rat::zero();
        for w in bps.windows(2) {
            let (a, b) = (&w[0], &w[1]);
            let m = (a + b) / Rat::from_integer(2.into());
            let sa = self.slice_volume(f, a)?;
            let sm = self.slice_volume(f, &m)?;
            let sb = self.slice_volume(f, b)?;
            total += (b - a) * (sa + sm * Rat::from_integer(4.into()) + sb) / &six;
        }
        Ok(total)
    }

    /// `B + [-eps, eps]^n`.
    pub fn minkowski_cube(&self, eps: &Rat) -> Result<Self> {
        if eps.is_negative() {
            return Err(Error::Domain("cube half-width must be nonnegative".into()));
        }
        if self.is_empty() {
            return Ok(self.clone());
        }
        let n = self.dim;
        let mut pts = Vec::with_capacity(self.vertices.len() << n);
        for v in &self.vertices {
            for mask in 0..(1usize << n) {
                let c: Vec<Rat> = (0..n)
                    .map(|i| if mask >> i & 1 == 1 { &v.0[i] + eps } else { &v.0[i] - eps })
                    .collect();
                pts.push(Point(c));
            }
        }
        Self::hull_in(n, pts)
    }

    /// A certified inscribed ball: the body contains the Euclidean ball of the
    /// returned radius around the returned center. Facet norms are rounded up
    /// to rationals at [`SQRT_BITS`] bits, so the radius is a lower bound on the
    /// Chebyshev radius, and exact when every facet norm is rational.
    pub fn chebyshev_ball(&self) -> Result<(Point, Rat)> {
        if !self.is_full_dimensional() {
            return Err(self.degenerate());
        }
        let n = self.dim;
        let k = Rat::from_integer(self.vertices.len().into());
        let c0: Vec<Rat> =
            (0..n).map(|j| self.vertices.iter().fold(Rat::zero(), |acc, v| acc + &v.0[j]) / &k).collect();
        let c0 = Point(c0);
        let norms: Vec<Rat> = self.halfspaces.iter().map(|h| sqrt_upper(&dot(&h.normal, &h.normal), SQRT_BITS)).collect();
        // Variables y+ (n), y- (n), r. Center = c0 + y+ - y-.
        let a: Vec<Vec<Rat>> = self
            .halfspaces
            .iter()
            .zip(&norms)
            .map(|(h, u)| {
                let mut row = h.normal.clone();
                row.extend(h.normal.iter().map(|x| -x));
                row.push(u.clone());
                row
            })
            .collect();
        let b: Vec<Rat> = self.halfspaces.iter().map(|h| h.slack(&c0)).collect();
        let mut c = vec![Rat::zero(); 2 * n + 1];
        c[2 * n] = Rat::one();
        match lp::maximize(&a, &b, &c) {
            lp::LpOutcome::Optimal { x, value } => {
                let center = Point((0..n).map(|j| &c0.0[j] + &x[j] - &x[n + j]).collect());
                Ok((center, value))
            }
            lp::LpOutcome::Unbounded => Err(Error::Unbounded),
        }
    }

    /// Checks that every facet lies at distance at least `r` from `c`, using
    /// rational upper bounds on the facet norms.
    pub fn certifies_ball(&self, c: &Point, r: &Rat) -> bool {
        self.is_full_dimensional()
            && self.halfspaces.iter().all(|h| {
                let u = sqrt_upper(&dot(&h.normal, &h.normal), SQRT_BITS);
                h.slack(c) >= r * u
            })
    }

    fn check_p1_range(&self, a: &Rat, b: &Rat) -> Result<()> {
        if a >= b {
            return Err(Error::Domain(format!("need a < b, got a = {a}, b = {b}")));
        }
        let (lo, hi) = self
            .range(&AffineFunctional::p1(self.dim))
            .ok_or_else(|| Error::Domain("empty body".into()))?;
        if *a < lo || *b > hi {
            return Err(Error::Domain(format!("[{a}, {b}] is not inside p1(B) = [{lo}, {hi}]")));
        }
        Ok(())
    }

    /// `conv((B ∩ {p₁ = a}) ∪ (B ∩ {p₁ = b}))`.
    pub fn slice_cone(&self, a: &Rat, b: &Rat) -> Result<Self> {
        self.check_p1_range(a, b)?;
        let p1 = AffineFunctional::p1(self.dim);
        let mut pts = self.slice(&p1, a)?.vertices.clone();
        pts.extend(self.slice(&p1, b)?.vertices.iter().cloned());
        Self::hull_in(self.dim, pts)
    }

    /// `conv((B ∩ {p₁ = a}) ∪ {v})` for an apex `v ∈ B` with `p₁(v) = b`.
    pub fn apex_cone(&self, a: &Rat, b: &Rat, v: &Point) -> Result<Self> {
        check_dim(self.dim, v.dim())?;
        if !self.contains(v) {
            return Err(Error::Domain("apex is not in the body".into()));
        }
        if v.0[0] != *b {
            return Err(Error::Domain(format!("apex has p1 = {}, expected {b}", v.0[0])));
        }
        self.check_p1_range(a, b)?;
        let mut pts = self.slice(&AffineFunctional::p1(self.dim), a)?.vertices.clone();
        pts.push(v.clone());
        Self::hull_in(self.dim, pts)
    }

    /// `{(x, t) : x ∈ B, 0 <= t <= f(x)} ⊂ Q^{n+1}`.
    pub fn rooftop(&self, f: &AffineFunctional) -> Result<Self> {
        check_dim(self.dim, f.dim())?;
        if self.is_empty() {
            return Ok(Self::empty(self.dim + 1));
        }
        if let Some(v) = self.vertices.iter().find(|v| f.eval(v).is_negative()) {
            return Err(Error::Domain(format!("roof function is negative at {:?}", v.0)));
        }
        let n = self.dim;
        let mut hs: Vec<HalfSpace> = self
            .halfspaces
            .iter()
            .map(|h| {
                let mut normal = h.normal.clone();
                normal.push(Rat::zero());
                HalfSpace { normal, offset: h.offset.clone() }
            })
            .collect();
        hs.push(HalfSpace::lower(n + 1, n, Rat::zero()));
        let mut normal: Vec<Rat> = f.gradient.iter().map(|x| -x).collect();
        normal.push(Rat::one());
        hs.push(HalfSpace { normal, offset: f.constant.clone() });
        Self::from_halfspaces(n + 1, &hs)
    }

    /// `λB + shift`.
    pub fn scale_translate(&self, lambda: &Rat, shift: &Point) -> Result<Self> {
        check_dim(self.dim, shift.dim())?;
        if !lambda.is_positive() {
            return Err(Error::Domain("scale factor must be positive".into()));
        }
        let vertices: Vec<Point> = self.vertices.iter().map(|v| v.scaled(lambda).translated(shift)).collect();
        let mut halfspaces: Vec<HalfSpace> = self
            .halfspaces
            .iter()
            .map(|h| HalfSpace { normal: h.normal.clone(), offset: &h.offset * lambda + dot(&h.normal, &shift.0) })
            .collect();
        halfspaces.sort();
        Ok(ConvexBody { dim: self.dim, vertices, halfspaces, affine_dim: self.affine_dim })
    }

    /// Checks that both representations describe the same polytope: every
    /// vertex satisfies every halfspace, lies on enough tight halfspaces to be
    /// a vertex, and every halfspace is tight somewhere.
    pub fn representation_is_synchronized(&self) -> bool {
        let Some(r) = self.affine_dim else {
            return self.vertices.is_empty();
        };
        let vertex_ok = self.vertices.iter().all(|v| {
            let tight: Vec<Vec<Rat>> =
                self.halfspaces.iter().filter(|h| h.slack(v).is_zero()).map(|h| h.normal.clone()).collect();
            self.halfspaces.iter().all(|h| h.contains(v)) && rank(&tight) == self.dim
        });
        let facet_ok = self.halfspaces.iter().all(|h| self.vertices.iter().any(|v| h.slack(v).is_zero()));
        vertex_ok && facet_ok && r <= self.dim
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, parse_rat, rat};

    fn pts(c: &[&[i64]]) -> Vec<Point> {
        c.iter().map(|x| Point::from_ints(x)).collect()
    }

    fn simplex() -> ConvexBody {
        ConvexBody::hull(&pts(&[&[0, 0], &[1, 0], &[0, 1]])).unwrap()
    }

    fn square() -> ConvexBody {
        ConvexBody::hull(&pts(&[&[0, 0], &[1, 0], &[0, 1], &[1, 1]])).unwrap()
    }

    fn tri() -> ConvexBody {
        ConvexBody::hull(&[
            Point::new(vec![rat(1, 2), int(0)]),
            Point::new(vec![int(1), int(0)]),
            Point::new(vec![rat(1, 2), rat(1, 2)]),
        ])
        .unwrap()
    }

    #[test]
    fn hull_examples() {
        let s = simplex();
        assert_eq!((s.vertices().len(), s.halfspaces().len()), (3, 3));
        let mut p = pts(&[&[0, 0], &[1, 0], &[0, 1]]);
        p.push(Point::new(vec![rat(1, 4), rat(1, 4)]));
        assert_eq!(ConvexBody::hull(&p).unwrap(), s);
        let hex: Vec<Point> = [["0", "2"], ["1.5", "3"], ["3", "2"], ["4.5", "1"], ["4", ".5"], ["1", ".5"], ["0", "1"]]
            .iter()
            .map(|c| Point::new(c.iter().map(|x| parse_rat(&format!("0{x}")).unwrap()).collect()))
            .collect();
        let h = ConvexBody::hull(&hex).unwrap();
        // (3, 2) lies on the segment from (3/2, 3) to (9/2, 1)
        assert_eq!(h.vertices().len(), 6);
        assert!(h.contains(&Point::from_ints(&[3, 2])));
        assert!(h.representation_is_synchronized());
        assert!(matches!(
            ConvexBody::hull(&[Point::from_ints(&[0]), Point::from_ints(&[0, 1])]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn intersections() {
        let r = square().intersect_halfspace(&HalfSpace::upper(2, 0, rat(1, 2))).unwrap();
        assert_eq!(r.vertices().len(), 4);
        assert_eq!(r.volume(), rat(1, 2));
        let t = simplex().intersect_halfspace(&HalfSpace::lower(2, 0, rat(1, 2))).unwrap();
        assert_eq!(t, tri());
        assert!(simplex().intersect_halfspace(&HalfSpace::lower(2, 0, int(2))).unwrap().is_empty());
    }

    #[test]
    fn volumes_and_barycenters() {
        assert_eq!(simplex().volume(), rat(1, 2));
        assert_eq!(square().volume(), int(1));
        assert_eq!(tri().volume(), rat(1, 8));
        assert_eq!(simplex().barycenter().unwrap(), Point::new(vec![rat(1, 3), rat(1, 3)]));
        assert_eq!(square().barycenter().unwrap(), Point::new(vec![rat(1, 2), rat(1, 2)]));
        assert_eq!(tri().barycenter().unwrap(), Point::new(vec![rat(2, 3), rat(1, 6)]));
        let seg = ConvexBody::hull(&pts(&[&[0, 0], &[1, 1]])).unwrap();
        assert_eq!(seg.volume(), int(0));
        assert!(matches!(seg.barycenter(), Err(Error::Degenerate(_))));
    }

    #[test]
    fn superlevels() {
        let g = ConcavePL::p1(2);
        assert_eq!(simplex().superlevel(&g, &rat(1, 2)).unwrap(), tri());
        assert_eq!(simplex().superlevel(&g, &int(0)).unwrap(), simplex());
        let top = simplex().superlevel(&g, &int(1)).unwrap();
        assert_eq!(top.vertices(), &[Point::from_ints(&[1, 0])]);
        assert_eq!(top.volume(), int(0));
    }

    #[test]
    fn slices() {
        let p1 = AffineFunctional::p1(2);
        assert_eq!(simplex().slice_volume(&p1, &rat(1, 2)).unwrap(), rat(1, 2));
        assert_eq!(square().slice_volume(&p1, &rat(1, 2)).unwrap(), int(1));
        assert_eq!(simplex().slice_volume(&p1, &int(2)).unwrap(), int(0));
        assert_eq!(simplex().volume_by_slices(&p1).unwrap(), rat(1, 2));
        let seg = ConvexBody::hull(&pts(&[&[0], &[1]])).unwrap();
        assert_eq!(seg.slice_volume(&AffineFunctional::p1(1), &rat(1, 3)).unwrap(), int(1));
    }

    #[test]
    fn minkowski_cubes() {
        let sq = square().minkowski_cube(&rat(1, 2)).unwrap();
        let big = ConvexBody::hull(&[
            Point::new(vec![rat(-1, 2), rat(-1, 2)]),
            Point::new(vec![rat(3, 2), rat(-1, 2)]),
            Point::new(vec![rat(-1, 2), rat(3, 2)]),
            Point::new(vec![rat(3, 2), rat(3, 2)]),
        ])
        .unwrap();
        assert_eq!(sq, big);
        let cube = ConvexBody::hull(&[Point::origin(3)]).unwrap().minkowski_cube(&rat(1, 2)).unwrap();
        assert_eq!((cube.vertices().len(), cube.volume()), (8, int(1)));
        let thick = simplex().minkowski_cube(&rat(1, 4)).unwrap();
        // edge normals of the triangle and the square give five distinct directions
        assert_eq!(thick.vertices().len(), 5);
        // area + eps·(sum of edge widths) + (2 eps)^2
        assert_eq!(thick.volume(), rat(7, 4));
    }

    #[test]
    fn chebyshev_balls() {
        let (c, r) = square().chebyshev_ball().unwrap();
        assert_eq!((c, r), (Point::new(vec![rat(1, 2), rat(1, 2)]), rat(1, 2)));
        let seg = ConvexBody::hull(&pts(&[&[0], &[1]])).unwrap();
        assert_eq!(seg.chebyshev_ball().unwrap(), (Point::new(vec![rat(1, 2)]), rat(1, 2)));
        let (c, r) = simplex().chebyshev_ball().unwrap();
        assert!(r >= rat(29, 100) && r <= rat(2929, 10000));
        assert!(simplex().certifies_ball(&c, &r));
    }

    #[test]
    fn cones_and_rooftops() {
        let (z, one) = (int(0), int(1));
        assert_eq!(square().slice_cone(&z, &one).unwrap(), square());
        assert_eq!(simplex().slice_cone(&z, &one).unwrap(), simplex());
        let r = square().slice_cone(&rat(1, 4), &rat(3, 4)).unwrap();
        assert_eq!(r.volume(), rat(1, 2));
        let apex = Point::from_ints(&[1, 0]);
        assert_eq!(simplex().apex_cone(&z, &one, &apex).unwrap(), simplex());
        let c = square().apex_cone(&z, &one, &apex).unwrap();
        assert_eq!(c, simplex());
        assert_eq!(c.superlevel(&ConcavePL::p1(2), &rat(1, 2)).unwrap(), tri());
        assert!(square().apex_cone(&z, &one, &Point::from_ints(&[2, 0])).is_err());

        let p1 = AffineFunctional::p1(2);
        assert_eq!(simplex().rooftop(&p1).unwrap().volume(), rat(1, 6));
        assert_eq!(square().rooftop(&p1).unwrap().volume(), rat(1, 2));
        let seg = ConvexBody::hull(&pts(&[&[0], &[1]])).unwrap();
        assert_eq!(seg.rooftop(&AffineFunctional::p1(1)).unwrap().volume(), rat(1, 2));
        let neg = AffineFunctional::new(vec![int(1), int(0)], int(-1));
        assert!(simplex().rooftop(&neg).is_err());
    }

    #[test]
    fn scaling_matches_translation_identity() {
        let two_sq = square().scale_translate(&int(2), &Point::origin(2)).unwrap();
        assert_eq!(two_sq.volume(), int(4));
        let lhs = tri().scale_translate(&int(2), &Point::origin(2)).unwrap();
        let rhs = simplex().scale_translate(&int(1), &Point::from_ints(&[1, 0])).unwrap();
        assert_eq!(lhs, rhs);
        assert_eq!(lhs.halfspaces(), ConvexBody::hull(lhs.vertices()).unwrap().halfspaces());
    }

    #[test]
    fn concave_integrals() {
        // min(x, 1 - x) on [0,1]^2 integrates to 1/4.
        let g = ConcavePL::new(vec![
            AffineFunctional::p1(2),
            AffineFunctional::new(vec![int(-1), int(0)], int(1)),
        ])
        .unwrap();
        assert_eq!(square().integral_concave(&g).unwrap(), rat(1, 4));
        assert_eq!(simplex().integral(&AffineFunctional::p1(2)).unwrap(), rat(1, 6));
    }

    #[test]
    fn unbounded_halfspaces() {
        let hs = vec![HalfSpace::upper(2, 0, int(1)), HalfSpace::lower(2, 0, int(0))];
        assert!(matches!(ConvexBody::from_halfspaces(2, &hs), Err(Error::Unbounded)));
    }
}
