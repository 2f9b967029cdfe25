//! Bundled bodies, models and valuation families used by the sweeps, the CLI and the tests.

use std::collections::{BTreeMap, BTreeSet};

use crate::geometry::{AffineFunctional, ConcavePL, ConvexBody, Point};
use crate::lattice::PointCloud;
use crate::rational::{int, rat, Rat};
use crate::series::{CanonicalCurve, GapRule, GradedSeriesModel, Levels, Synthetic};
use crate::thresholds::ValuationModel;

fn body(pts: &[Point]) -> ConvexBody {
    ConvexBody::hull(pts).expect("catalog bodies are valid")
}

fn ints(v: &[&[i64]]) -> Vec<Point> {
    v.iter().map(|c| Point::from_ints(c)).collect()
}

pub fn segment() -> ConvexBody {
    body(&ints(&[&[0], &[1]]))
}

pub fn unit_simplex() -> ConvexBody {
    body(&ints(&[&[0, 0], &[1, 0], &[0, 1]]))
}

pub fn unit_square() -> ConvexBody {
    body(&ints(&[&[0, 0], &[1, 0], &[0, 1], &[1, 1]]))
}

/// The moment polygon of `-K` on `P²`, translated into the positive quadrant.
pub fn anticanonical_p2() -> ConvexBody {
    body(&ints(&[&[0, 0], &[3, 0], &[0, 3]]))
}

pub fn trapezoid() -> ConvexBody {
    body(&ints(&[&[0, 0], &[1, 0], &[1, 1], &[0, 2]]))
}

/// The polygon of the one-parameter family illustration.
pub fn hexagon() -> ConvexBody {
    let h = |x: i64, y: i64| Point::new(vec![rat(x, 2), rat(y, 2)]);
    body(&[h(0, 4), h(3, 6), h(6, 4), h(9, 2), h(8, 1), h(2, 1), h(0, 2)])
}

/// Okounkov body of `O(1,1)` on `P¹×P¹` for the flag through a `(2,1)`-curve.
pub fn p1xp1_body() -> ConvexBody {
    body(&[
        Point::from_ints(&[0, 0]),
        Point::new(vec![rat(1, 2), int(0)]),
        Point::new(vec![rat(1, 2), int(1)]),
        Point::from_ints(&[0, 3]),
    ])
}

fn toric(b: ConvexBody) -> GradedSeriesModel {
    GradedSeriesModel::toric(b).expect("nonempty body")
}

pub fn toric_segment() -> GradedSeriesModel {
    toric(segment())
}

pub fn toric_simplex() -> GradedSeriesModel {
    toric(unit_simplex())
}

pub fn toric_square() -> GradedSeriesModel {
    toric(unit_square())
}

pub fn toric_p2() -> GradedSeriesModel {
    toric(anticanonical_p2())
}

pub fn toric_trapezoid() -> GradedSeriesModel {
    toric(trapezoid())
}

/// Gap sequences of a non-Weierstrass point, a flex and a hyperflex on a smooth quartic.
pub const QUARTIC_GAPS: [(&str, [u64; 3]); 3] =
    [("ordinary", [1, 2, 3]), ("flex", [1, 2, 4]), ("hyperflex", [1, 2, 5])];

pub fn quartic_point(gaps: [u64; 3]) -> GradedSeriesModel {
    GradedSeriesModel::curve_divisor(gaps.to_vec()).expect("quartic gap sequences are valid")
}

pub fn canonical_generic(genus: u64) -> GradedSeriesModel {
    GradedSeriesModel::canonical_curve(CanonicalCurve::new(genus, BTreeMap::new()).expect("genus >= 2"))
        .expect("canonical model")
}

/// `(name, kΔ_1, kΔ_2)` for `K_C` on a smooth quartic at the six point types
/// (not 2-Weierstrass, flex, hyperflex, s-sextactic for s = 1, 2, 3).
pub const QUARTIC_CANONICAL: [(&str, [u64; 3], [u64; 6]); 6] = [
    ("ordinary", [0, 1, 2], [0, 1, 2, 3, 4, 5]),
    ("flex", [0, 1, 3], [0, 1, 2, 3, 4, 6]),
    ("hyperflex", [0, 1, 4], [0, 1, 2, 4, 5, 8]),
    ("sextactic1", [0, 1, 2], [0, 1, 2, 3, 4, 6]),
    ("sextactic2", [0, 1, 2], [0, 1, 2, 3, 4, 7]),
    ("sextactic3", [0, 1, 2], [0, 1, 2, 3, 4, 8]),
];

/// A canonical genus-3 model with the declared patterns, over all levels.
pub fn quartic_canonical(k1: [u64; 3], k2: [u64; 6]) -> GradedSeriesModel {
    let c = CanonicalCurve::new(3, BTreeMap::from([(1, k1.to_vec()), (2, k2.to_vec())])).expect("valid patterns");
    GradedSeriesModel::canonical_curve(c).expect("canonical model")
}

/// The same model restricted to the declared levels `{1, 2}`.
pub fn quartic_canonical_declared(k1: [u64; 3], k2: [u64; 6]) -> GradedSeriesModel {
    quartic_canonical(k1, k2).with_levels(Levels::Finite(BTreeSet::from([1, 2])))
}

/// The `P¹×P¹` example at `k ∈ {1, 2}`: the single 2-gap is `(1/2, 1)` at a
/// non-ramification point and `(1/2, 1/2)` at a ramification point.
pub fn p1xp1_model(ramification: bool) -> GradedSeriesModel {
    let gap = if ramification { vec![1, 1] } else { vec![1, 2] };
    let gaps = BTreeMap::from([(2, PointCloud::new(2, vec![gap]).expect("valid cloud"))]);
    GradedSeriesModel::synthetic(
        p1xp1_body(),
        Synthetic::new(gaps, None).expect("denominators match"),
        Levels::Finite(BTreeSet::from([1, 2])),
    )
    .expect("gaps lie in the body")
}

/// Unit square with the column `x₁ = 1` removed at every level.
pub fn square_top_face() -> GradedSeriesModel {
    GradedSeriesModel::synthetic(
        unit_square(),
        Synthetic::new(BTreeMap::new(), Some(GapRule::RemoveTopFace)).expect("no declared gaps"),
        Levels::All,
    )
    .expect("valid synthetic model")
}

/// Divisorial valuations of the three torus-invariant lines on `P²`, each with `A = 1`.
pub fn p2_coordinate_family() -> Vec<ValuationModel> {
    let f = |label: &str, grad: [i64; 2], c: i64| {
        let g = ConcavePL::affine(AffineFunctional::new(grad.iter().map(|&x| int(x)).collect(), int(c)));
        ValuationModel::new(label, Rat::from_integer(1.into()), g).expect("positive A")
    };
    vec![f("x", [1, 0], 0), f("y", [0, 1], 0), f("z", [-1, -1], 3)]
}

/// Every bundled model with a short name.
pub fn models() -> Vec<(String, GradedSeriesModel)> {
    let mut out = vec![
        ("toric_segment".to_string(), toric_segment()),
        ("toric_simplex".into(), toric_simplex()),
        ("toric_square".into(), toric_square()),
        ("toric_p2".into(), toric_p2()),
        ("toric_trapezoid".into(), toric_trapezoid()),
        ("toric_hexagon".into(), toric(hexagon())),
    ];
    for (name, gaps) in QUARTIC_GAPS {
        out.push((format!("quartic_{name}"), quartic_point(gaps)));
    }
    out.push(("canonical_g3".into(), canonical_generic(3)));
    for (name, k1, k2) in QUARTIC_CANONICAL {
        out.push((format!("canonical_{name}"), quartic_canonical_declared(k1, k2)));
    }
    out.push(("p1xp1_unramified".into(), p1xp1_model(false)));
    out.push(("p1xp1_ramified".into(), p1xp1_model(true)));
    out.push(("square_top_face".into(), square_top_face()));
    out
}

/// Canonical-curve and synthetic top-gap models for the `max p₁` sweep.
pub fn maxp1_models() -> Vec<(String, GradedSeriesModel)> {
    let mut out: Vec<(String, GradedSeriesModel)> =
        (2..=5).map(|g| (format!("canonical_g{g}"), canonical_generic(g))).collect();
    for (name, k1, k2) in QUARTIC_CANONICAL {
        out.push((format!("canonical_{name}"), quartic_canonical_declared(k1, k2)));
    }
    out.push(("square_top_face".into(), square_top_face()));
    out
}

/// Looks up a bundled model by name.
pub fn model(name: &str) -> Option<GradedSeriesModel> {
    models().into_iter().find(|(n, _)| n == name).map(|(_, m)| m)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_bodies() {
        assert_eq!(hexagon().vertices().len(), 6);
        assert_eq!(p1xp1_body().volume(), int(1));
        assert_eq!(anticanonical_p2().volume(), rat(9, 2));
        assert_eq!(trapezoid().volume(), rat(3, 2));
    }

    #[test]
    fn p1xp1_counts() {
        for ram in [false, true] {
            let m = p1xp1_model(ram);
            assert_eq!((m.big_d_k(2).unwrap(), m.d_k(2).unwrap()), (10, 9));
            assert_eq!(m.d_k(1).unwrap(), 4);
        }
    }

    #[test]
    fn declared_canonical_levels_are_superadditive() {
        for (_, k1, k2) in QUARTIC_CANONICAL {
            assert_eq!(quartic_canonical_declared(k1, k2).check_superadditive(4).unwrap(), None);
        }
        assert!(model("toric_p2").is_some());
        assert!(model("nope").is_none());
    }
}
