//! Points of `Z^n/k` inside rational polytopes.
//!
//! The kernel turns each halfspace `a·x <= b` into the integer row
//! `a·z <= floor(b k)` and scans the bounding box coordinate by coordinate.
//! The innermost coordinate is never scanned: its admissible values form an
//! interval computed exactly from the rows. Rows are checked as soon as all
//! the coordinates they involve are fixed. Arithmetic runs in `i128` when the
//! magnitudes allow it and in `BigInt` otherwise.

use num::bigint::BigInt;
use num::integer::Integer;
use num::{FromPrimitive, One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::geometry::{AffineFunctional, ConcavePL, ConvexBody, Point};
use crate::par::{map_range, Exec};
use crate::rational::{ceil, floor, pow_three_halves_upper, Rat};
use crate::{Error, Result};

/// A finite subset of `Z^n/k`, stored as sorted integer numerators.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointCloud {
    #[serde(rename = "k")]
    denominator: u64,
    points: Vec<Vec<i64>>,
}

impl PointCloud {
    pub fn new(denominator: u64, mut points: Vec<Vec<i64>>) -> Result<Self> {
        if denominator == 0 {
            return Err(Error::Domain("point cloud denominator must be positive".into()));
        }
        if let Some(n) = points.first().map(Vec::len) {
            if let Some(bad) = points.iter().find(|p| p.len() != n) {
                return Err(Error::DimensionMismatch { expected: n, found: bad.len() });
            }
        }
        points.sort();
        points.dedup();
        Ok(PointCloud { denominator, points })
    }

    pub fn denominator(&self) -> u64 {
        self.denominator
    }

    /// Integer numerators in lexicographic order.
    pub fn points(&self) -> &[Vec<i64>] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn contains(&self, z: &[i64]) -> bool {
        self.points.binary_search_by(|p| p.as_slice().cmp(z)).is_ok()
    }

    /// The rational points `z/k`.
    pub fn rational_points(&self) -> Vec<Point> {
        let k = Rat::from_integer(self.denominator.into());
        self.points
            .iter()
            .map(|z| Point::new(z.iter().map(|&c| Rat::from_integer(c.into()) / &k).collect()))
            .collect()
    }

    /// Points of `self` not in `other`; both must share the denominator.
    pub fn difference(&self, other: &PointCloud) -> Result<PointCloud> {
        if self.denominator != other.denominator {
            return Err(Error::Domain(format!(
                "denominators differ: {} vs {}",
                self.denominator, other.denominator
            )));
        }
        let points = self.points.iter().filter(|z| !other.contains(z)).cloned().collect();
        Ok(PointCloud { denominator: self.denominator, points })
    }

    /// `true` if every point is also in `other`.
    pub fn is_subset(&self, other: &PointCloud) -> bool {
        self.denominator == other.denominator && self.points.iter().all(|z| other.contains(z))
    }
}

/// Integer scalar used by the scan kernel.
trait Scalar: Integer + Signed + Clone + Send + Sync + FromPrimitive + ToPrimitive {}
impl<T: Integer + Signed + Clone + Send + Sync + FromPrimitive + ToPrimitive> Scalar for T {}

struct Kernel<T> {
    n: usize,
    rows: Vec<Vec<T>>,
    rhs: Vec<T>,
    /// Largest coordinate index with a nonzero coefficient, per row.
    last: Vec<usize>,
    lo: Vec<i64>,
    hi: Vec<i64>,
}

/// Integer description of `B ∩ Z^n/k`: rows, right-hand sides and the box.
struct IntegerSystem {
    rows: Vec<Vec<BigInt>>,
    rhs: Vec<BigInt>,
    lo: Vec<i64>,
    hi: Vec<i64>,
}

fn to_i64(x: &BigInt) -> Result<i64> {
    x.to_i64().ok_or_else(|| Error::Domain(format!("lattice coordinate {x} exceeds 64 bits")))
}

fn integer_system(b: &ConvexBody, k: u64) -> Result<Option<IntegerSystem>> {
    if b.is_empty() {
        return Ok(None);
    }
    let n = b.dim();
    let kq = Rat::from_integer(k.into());
    let mut lo = Vec::with_capacity(n);
    let mut hi = Vec::with_capacity(n);
    for i in 0..n {
        let (mn, mx) = b.range(&AffineFunctional::coordinate(n, i)).expect("nonempty body");
        lo.push(to_i64(&ceil(&(mn * &kq)))?);
        hi.push(to_i64(&floor(&(mx * &kq)))?);
        if lo[i] > hi[i] {
            return Ok(None);
        }
    }
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for h in b.halfspaces() {
        // Normals are integral by construction of the body.
        let lcm = h.normal.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
        let l = Rat::from_integer(lcm);
        rows.push(h.normal.iter().map(|x| (x * &l).to_integer()).collect());
        rhs.push(floor(&(&h.offset * &kq * &l)));
    }
    Ok(Some(IntegerSystem { rows, rhs, lo, hi }))
}

impl IntegerSystem {
    /// True when every partial row sum provably fits in `i128`.
    fn fits_i128(&self) -> bool {
        let zmax = self.lo.iter().chain(&self.hi).map(|x| x.unsigned_abs()).max().unwrap_or(0);
        let amax = self.rows.iter().flatten().map(|x| x.abs()).max().unwrap_or_default();
        let cmax = self.rhs.iter().map(|x| x.abs()).max().unwrap_or_default();
        let n = self.lo.len() as u64 + 1;
        let bound = amax * BigInt::from(zmax) * BigInt::from(n) + cmax;
        bound.bits() < 120
    }

    fn kernel<T: Scalar>(&self, conv: impl Fn(&BigInt) -> T) -> Kernel<T> {
        let n = self.lo.len();
        let last = self
            .rows
            .iter()
            .map(|r| r.iter().rposition(|x| !x.is_zero()).unwrap_or(0))
            .collect();
        Kernel {
            n,
            rows: self.rows.iter().map(|r| r.iter().map(&conv).collect()).collect(),
            rhs: self.rhs.iter().map(&conv).collect(),
            last,
            lo: self.lo.clone(),
            hi: self.hi.clone(),
        }
    }
}

fn ceil_div<T: Scalar>(a: T, b: T) -> T {
    -((-a).div_floor(&b))
}

impl<T: Scalar> Kernel<T> {
    fn t(x: i64) -> T {
        T::from_i64(x).expect("i64 fits the kernel scalar")
    }

    /// Interval of admissible values of the last coordinate given the partial sums.
    fn last_interval(&self, partial: &[T]) -> Option<(i64, i64)> {
        let j = self.n - 1;
        let mut lo = Self::t(self.lo[j]);
        let mut hi = Self::t(self.hi[j]);
        for (i, row) in self.rows.iter().enumerate() {
            if self.last[i] != j {
                continue;
            }
            let a = row[j].clone();
            let slack = self.rhs[i].clone() - partial[i].clone();
            if a.is_zero() {
                if slack.is_negative() {
                    return None;
                }
            } else if a.is_positive() {
                let u = slack.div_floor(&a);
                if u < hi {
                    hi = u;
                }
            } else {
                let l = ceil_div(slack, a);
                if l > lo {
                    lo = l;
                }
            }
            if lo > hi {
                return None;
            }
        }
        // Both ends lie inside the i64 box.
        Some((lo.to_i64()?, hi.to_i64()?))
    }

    /// Visits every lattice point with the given prefix of fixed coordinates.
    fn walk<V: FnMut(&[i64], i64, i64)>(&self, depth: usize, z: &mut Vec<i64>, partial: &mut Vec<T>, visit: &mut V) {
        if depth == self.n - 1 {
            if let Some((l, h)) = self.last_interval(partial) {
                visit(z, l, h);
            }
            return;
        }
        for v in self.lo[depth]..=self.hi[depth] {
            let tv = Self::t(v);
            let saved: Vec<T> = partial.clone();
            let mut ok = true;
            for (i, row) in self.rows.iter().enumerate() {
                if !row[depth].is_zero() {
                    partial[i] = partial[i].clone() + row[depth].clone() * tv.clone();
                }
                if self.last[i] == depth && partial[i] > self.rhs[i] {
                    ok = false;
                }
            }
            if ok {
                z.push(v);
                self.walk(depth + 1, z, partial, visit);
                z.pop();
            }
            *partial = saved;
        }
    }

    fn zero_partial(&self) -> Vec<T> {
        vec![T::zero(); self.rows.len()]
    }

    /// Runs `walk` independently for each value of the first coordinate.
    fn slabs<R: Send, F>(&self, exec: Exec, per_slab: F) -> Vec<R>
    where
        F: Fn(&Self, i64) -> R + Sync + Send,
        T: Sync,
    {
        if self.n == 1 {
            return vec![per_slab(self, i64::MIN)];
        }
        map_range(exec, self.lo[0], self.hi[0], |v| per_slab(self, v))
    }

    /// Walks the slab `z_0 = v` (or the whole line when `n = 1`).
    fn walk_slab<V: FnMut(&[i64], i64, i64)>(&self, v: i64, visit: &mut V) {
        let mut partial = self.zero_partial();
        if self.n == 1 {
            self.walk(0, &mut Vec::new(), &mut partial, visit);
            return;
        }
        let tv = Self::t(v);
        for (i, row) in self.rows.iter().enumerate() {
            partial[i] = row[0].clone() * tv.clone();
            if self.last[i] == 0 && partial[i] > self.rhs[i] {
                return;
            }
        }
        let mut z = vec![v];
        self.walk(1, &mut z, &mut partial, visit);
    }

    fn enumerate(&self, exec: Exec) -> Vec<Vec<i64>> {
        self.slabs(exec, |kern, v| {
            let mut out = Vec::new();
            kern.walk_slab(v, &mut |prefix, l, h| {
                for last in l..=h {
                    let mut p = prefix.to_vec();
                    p.push(last);
                    out.push(p);
                }
            });
            out
        })
        .into_iter()
        .flatten()
        .collect()
    }

    fn count(&self, exec: Exec) -> u64 {
        self.slabs(exec, |kern, v| {
            let mut c = 0u64;
            kern.walk_slab(v, &mut |_, l, h| c += (h - l + 1) as u64);
            c
        })
        .into_iter()
        .sum()
    }
}

fn with_kernel<R>(
    b: &ConvexBody,
    k: u64,
    empty: R,
    fast: impl FnOnce(&Kernel<i128>) -> R,
    slow: impl FnOnce(&Kernel<BigInt>) -> R,
) -> Result<R> {
    if k == 0 {
        return Err(Error::Domain("k must be positive".into()));
    }
    if b.dim() == 0 {
        return Err(Error::Domain("lattice scan needs ambient dimension >= 1".into()));
    }
    let Some(sys) = integer_system(b, k)? else {
        return Ok(empty);
    };
    if sys.fits_i128() {
        let kern = sys.kernel(|x| x.to_i128().expect("checked to fit"));
        Ok(fast(&kern))
    } else {
        let kern = sys.kernel(BigInt::clone);
        Ok(slow(&kern))
    }
}

/// `B ∩ Z^n/k` in lexicographic order.
pub fn enumerate(b: &ConvexBody, k: u64) -> Result<PointCloud> {
    enumerate_with(b, k, Exec::default())
}

pub fn enumerate_with(b: &ConvexBody, k: u64, exec: Exec) -> Result<PointCloud> {
    let points = with_kernel(b, k, Vec::new(), |kern| kern.enumerate(exec), |kern| kern.enumerate(exec))?;
    Ok(PointCloud { denominator: k, points })
}

/// `#(B ∩ Z^n/k)`.
pub fn count(b: &ConvexBody, k: u64) -> Result<u64> {
    count_with(b, k, Exec::default())
}

pub fn count_with(b: &ConvexBody, k: u64, exec: Exec) -> Result<u64> {
    with_kernel(b, k, 0, |kern| kern.count(exec), |kern| kern.count(exec))
}

/// `count(B, k) - |B| k^n`.
pub fn discrepancy(b: &ConvexBody, k: u64) -> Result<Rat> {
    let c = count(b, k)?;
    let kn = num::pow(Rat::from_integer(k.into()), b.dim());
    Ok(Rat::from_integer(c.into()) - b.volume() * kn)
}

/// `k^{-n} Σ_{x ∈ B ∩ Z^n/k} G(x)`.
pub fn concave_sum(b: &ConvexBody, g: &ConcavePL, k: u64) -> Result<Rat> {
    if g.dim() != b.dim() {
        return Err(Error::DimensionMismatch { expected: b.dim(), found: g.dim() });
    }
    let cloud = enumerate(b, k)?;
    let mut total = Rat::zero();
    for p in cloud.rational_points() {
        let v = g.eval(&p);
        if v.is_negative() {
            return Err(Error::Domain(format!("concave function is negative at {:?}", p.0)));
        }
        total += v;
    }
    Ok(total / num::pow(Rat::from_integer(k.into()), b.dim()))
}

/// The explicit lower-bound constant `C = n^{3/2} / (2 r)`, rounded up.
pub fn lower_bound_constant(n: usize, radius_lb: &Rat) -> Rat {
    pow_three_halves_upper(n) / (Rat::from_integer(2.into()) * radius_lb)
}

/// How [`shifted_min_count`] bounds the minimum over shifts.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ShiftStrategy {
    Analytic,
    Sample { samples: usize, seed: u64 },
}

/// Bounds on `min_{x ∈ [-1/2,1/2]^n} #((B + x) ∩ Z^n/ℓ)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShiftedCount {
    /// Certified lower bound `ceil((1 - C/ℓ) |B| ℓ^n)`, clamped at zero.
    pub lower_bound: u64,
    /// The constant `C` used, absent for bodies of zero volume.
    pub constant: Option<Rat>,
    /// Smallest count over the sampled shifts (an upper bound on the minimum).
    pub sampled_min: Option<u64>,
}

pub fn shifted_min_count(b: &ConvexBody, ell: u64, strategy: ShiftStrategy) -> Result<ShiftedCount> {
    if ell == 0 {
        return Err(Error::Domain("ell must be positive".into()));
    }
    let n = b.dim();
    let (lower_bound, constant) = if b.is_full_dimensional() {
        let (_, r) = b.chebyshev_ball()?;
        let c = lower_bound_constant(n, &r);
        let l = Rat::from_integer(ell.into());
        let bound = (Rat::one() - &c / &l) * b.volume() * num::pow(l, n);
        let lb = if bound.is_positive() { ceil(&bound).to_u64().unwrap_or(u64::MAX) } else { 0 };
        (lb, Some(c))
    } else {
        (0, None)
    };
    let sampled_min = match strategy {
        ShiftStrategy::Analytic => None,
        ShiftStrategy::Sample { samples, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let den = BigInt::from(1u64 << 32);
            let half = Rat::new(BigInt::one(), BigInt::from(2));
            let mut best: Option<u64> = None;
            for _ in 0..samples {
                let shift = Point::new(
                    (0..n)
                        .map(|_| Rat::new(BigInt::from(rng.random_range(0..=1u64 << 32)), den.clone()) - &half)
                        .collect(),
                );
                let c = count(&b.scale_translate(&Rat::one(), &shift)?, ell)?;
                best = Some(best.map_or(c, |m| m.min(c)));
            }
            best
        }
    };
    Ok(ShiftedCount { lower_bound, constant, sampled_min })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    fn body(c: &[&[i64]]) -> ConvexBody {
        ConvexBody::hull(&c.iter().map(|x| Point::from_ints(x)).collect::<Vec<_>>()).unwrap()
    }

    fn simplex() -> ConvexBody {
        body(&[&[0, 0], &[1, 0], &[0, 1]])
    }

    fn square() -> ConvexBody {
        body(&[&[0, 0], &[1, 0], &[0, 1], &[1, 1]])
    }

    #[test]
    fn enumeration_examples() {
        let c = enumerate(&simplex(), 2).unwrap();
        assert_eq!(c.points(), &[vec![0, 0], vec![0, 1], vec![0, 2], vec![1, 0], vec![1, 1], vec![2, 0]]);
        let seg = body(&[&[0], &[1]]);
        for k in 1..6 {
            assert_eq!(enumerate(&seg, k).unwrap().len() as u64, k + 1);
        }
        assert_eq!(count(&body(&[&[0], &[4]]), 2).unwrap(), 9);
    }

    #[test]
    fn counts_and_discrepancies() {
        assert_eq!(count(&simplex(), 10).unwrap(), 66);
        for k in 1..8 {
            assert_eq!(count(&square(), k).unwrap(), (k + 1) * (k + 1));
            assert_eq!(discrepancy(&square(), k).unwrap(), int(2 * k as i64 + 1));
            assert_eq!(discrepancy(&body(&[&[0], &[1]]), k).unwrap(), int(1));
        }
        let big = square().scale_translate(&int(2), &Point::origin(2)).unwrap();
        assert_eq!(count(&square(), 4).unwrap(), 25);
        assert_eq!(count(&big, 2).unwrap(), 25);
        assert_eq!(discrepancy(&simplex(), 2).unwrap(), int(4));
    }

    #[test]
    fn sequential_and_parallel_agree() {
        let b = body(&[&[0, 0, 0], &[3, 0, 0], &[0, 2, 0], &[0, 0, 1], &[1, 1, 1]]);
        let a = enumerate_with(&b, 7, Exec::Sequential).unwrap();
        let p = enumerate_with(&b, 7, Exec::default()).unwrap();
        assert_eq!(a, p);
        assert_eq!(count_with(&b, 7, Exec::Sequential).unwrap(), a.len() as u64);
    }

    #[test]
    fn lower_dimensional_and_empty_bodies() {
        let diag = body(&[&[0, 0], &[1, 1]]);
        assert_eq!(count(&diag, 3).unwrap(), 4);
        let thin = ConvexBody::hull(&[Point::new(vec![rat(1, 3), int(0)]), Point::new(vec![rat(1, 3), int(1)])]).unwrap();
        assert_eq!(count(&thin, 2).unwrap(), 0);
        assert_eq!(count(&thin, 3).unwrap(), 4);
        assert_eq!(count(&ConvexBody::empty(2), 3).unwrap(), 0);
    }

    #[test]
    fn concave_sums() {
        assert_eq!(concave_sum(&simplex(), &ConcavePL::p1(2), 2).unwrap(), rat(1, 2));
        let seg = body(&[&[0], &[1]]);
        for k in 1..6i64 {
            assert_eq!(concave_sum(&seg, &ConcavePL::p1(1), k as u64).unwrap(), rat(k + 1, 2 * k));
        }
        let zero = ConcavePL::affine(AffineFunctional::new(vec![int(0), int(0)], int(0)));
        assert_eq!(concave_sum(&square(), &zero, 3).unwrap(), int(0));
        let neg = ConcavePL::affine(AffineFunctional::new(vec![int(0), int(0)], int(-1)));
        assert!(concave_sum(&square(), &neg, 3).is_err());
    }

    #[test]
    fn shifted_counts() {
        let s = shifted_min_count(&square(), 10, ShiftStrategy::Analytic).unwrap();
        let c = s.constant.clone().unwrap();
        // C = 2^{3/2} / (2 · 1/2) = 2√2, rounded up.
        assert!(&c * &c >= int(8) && c < rat(2829, 1000));
        assert!(s.lower_bound <= 100);
        let seg = body(&[&[0], &[1]]);
        let r = shifted_min_count(&seg, 7, ShiftStrategy::Sample { samples: 50, seed: 1 }).unwrap();
        assert_eq!(r.sampled_min, Some(7));
        assert!(r.lower_bound <= 7);
        let pt = body(&[&[0, 0]]);
        assert_eq!(shifted_min_count(&pt, 5, ShiftStrategy::Analytic).unwrap().lower_bound, 0);
    }

    #[test]
    fn big_coordinates_use_the_fallback() {
        let huge = 1i64 << 62;
        let b = body(&[&[huge - 2, 0], &[huge, 0], &[huge, 2]]);
        assert_eq!(count(&b, 1).unwrap(), 6);
    }
}
