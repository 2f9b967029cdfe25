//! Property tests for the geometric, lattice and threshold invariants.

use num::{One, Signed, Zero};
use okounkov::catalog;
use okounkov::estimates::{rate_fit, sample_polytopes};
use okounkov::geometry::{AffineFunctional, ConvexBody, Point};
use okounkov::io;
use okounkov::lattice::{self, lower_bound_constant};
use okounkov::rational::{fmt_rat, int, parse_rat, rat, Rat};
use okounkov::series::{gap_sequences_of_genus, GradedSeriesModel};
use okounkov::thresholds::{self, ValuationModel};
use proptest::prelude::*;

fn polytope(n: usize) -> impl Strategy<Value = ConvexBody> {
    (any::<u64>(), Just(n)).prop_map(|(seed, n)| sample_polytopes(n, seed, 1).unwrap().remove(0))
}

fn small_polytope() -> impl Strategy<Value = ConvexBody> {
    prop_oneof![polytope(1), polytope(2), polytope(3)]
}

fn toric_model() -> impl Strategy<Value = GradedSeriesModel> {
    prop_oneof![
        Just(catalog::toric_segment()),
        Just(catalog::toric_simplex()),
        Just(catalog::toric_square()),
        Just(catalog::toric_trapezoid()),
        Just(catalog::toric_p2()),
    ]
}

fn tol() -> Rat {
    rat(1, 1_000_000)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn rationals_round_trip(p in -10_000i64..10_000, q in 1i64..10_000) {
        let r = rat(p, q);
        prop_assert_eq!(parse_rat(&fmt_rat(&r)).unwrap(), r);
    }

    #[test]
    fn hull_representations_agree(b in small_polytope()) {
        prop_assert!(b.representation_is_synchronized());
        prop_assert!(b.volume().is_positive());
        prop_assert!(b.contains(&b.barycenter().unwrap()));
        let back = io::polytope_from_json(&io::polytope_to_json(&b)).unwrap();
        prop_assert_eq!(back.vertices(), b.vertices());
    }

    #[test]
    fn scaling_scales_volume_and_counts(b in small_polytope(), k in 1u64..12, l in 1u64..12) {
        let n = b.dim();
        let lambda = Rat::new(k.into(), l.into());
        let s = b.scale_translate(&lambda, &Point::origin(n)).unwrap();
        prop_assert_eq!(s.volume(), b.volume() * num::pow(lambda, n));
        prop_assert_eq!(lattice::count(&b, k).unwrap(), lattice::count(&s, l).unwrap());
    }

    #[test]
    fn integer_translation_preserves_counts(b in polytope(2), k in 1u64..10, dx in -3i64..3, dy in -3i64..3) {
        let t = b.scale_translate(&Rat::one(), &Point::from_ints(&[dx, dy])).unwrap();
        prop_assert_eq!(lattice::count(&b, k).unwrap(), lattice::count(&t, k).unwrap());
    }

    #[test]
    fn lower_bound_constant_holds(b in small_polytope(), k in 1u64..40) {
        let (_, r) = b.chebyshev_ball().unwrap();
        let c = lower_bound_constant(b.dim(), &r);
        let kq = Rat::from_integer(k.into());
        prop_assume!(kq > c);
        let count = Rat::from_integer(lattice::count(&b, k).unwrap().into());
        prop_assert!(count >= (Rat::one() - c / &kq) * b.volume() * num::pow(kq, b.dim()));
    }

    #[test]
    fn enumeration_matches_count(b in small_polytope(), k in 1u64..8) {
        let cloud = lattice::enumerate(&b, k).unwrap();
        prop_assert_eq!(cloud.len() as u64, lattice::count(&b, k).unwrap());
        prop_assert!(cloud.rational_points().iter().all(|p| b.contains(p)));
    }

    #[test]
    fn slices_integrate_to_volume(b in polytope(2)) {
        let f = AffineFunctional::p1(2);
        prop_assert_eq!(b.volume_by_slices(&f).unwrap(), b.volume());
    }

    #[test]
    fn curve_models_count_gaps(g in 1u64..7, pick in any::<prop::sample::Index>(), k in 1u64..30) {
        let seqs = gap_sequences_of_genus(g);
        let gaps = seqs[pick.index(seqs.len())].clone();
        let m = GradedSeriesModel::curve_divisor(gaps.clone()).unwrap();
        let (d, big_d) = (m.d_k(k).unwrap(), m.big_d_k(k).unwrap());
        prop_assert_eq!(big_d, k + 1);
        prop_assert_eq!(big_d - d, gaps.iter().filter(|&&s| s <= k).count() as u64);
        prop_assert!(m.discrete_body(k).unwrap().is_subset(&m.ambient_cloud(k).unwrap()));
        prop_assert_eq!(m.recover_gaps().unwrap().into_iter().map(|(n, _)| n).collect::<Vec<_>>(), gaps);
    }

    #[test]
    fn jumping_numbers_are_sandwiched(pick in any::<prop::sample::Index>(), k in 1u64..15) {
        let mut models = catalog::models();
        let (_, m) = models.swap_remove(pick.index(models.len()));
        prop_assume!(m.levels().contains(k));
        let v = ValuationModel::divisorial("p1", m.dim());
        let j = thresholds::jumping_numbers(&m, &v, k).unwrap();
        let i = thresholds::idealized_jumping(&m, &v, k).unwrap();
        let (d, big_d) = (j.len(), i.len());
        for l in 0..d {
            prop_assert!(j.values[l] <= i.values[l]);
            prop_assert!(j.values[d - 1 - l] >= i.values[big_d - 1 - l]);
        }
        let s = j.top_averages();
        prop_assert!(s.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn quantiles_invert_the_ccdf(m in toric_model(), num in 1i64..16) {
        let v = ValuationModel::divisorial("p1", m.dim());
        let tau = rat(num, 16);
        let q = thresholds::quantile(&m, &v, &tau, &tol()).unwrap();
        prop_assert!(thresholds::ccdf_continuous(&m, &v, q.quantile.lo()).unwrap() >= tau);
        let (s0, _) = thresholds::s0_and_sigma(&m, &v).unwrap();
        let above = q.quantile.hi() + rat(1, 1_000_000_000);
        if above < s0 {
            prop_assert!(thresholds::ccdf_continuous(&m, &v, &above).unwrap() <= tau);
        }
    }

    #[test]
    fn s_tau_is_non_increasing(m in toric_model(), a in 1i64..16, b in 1i64..16) {
        prop_assume!(a < b);
        let v = ValuationModel::divisorial("p1", m.dim());
        let sa = thresholds::s_tau(&m, &v, &rat(a, 16), &tol()).unwrap();
        let sb = thresholds::s_tau(&m, &v, &rat(b, 16), &tol()).unwrap();
        prop_assert!(sa.hi() >= sb.lo());
        let (s0, sigma) = thresholds::s0_and_sigma(&m, &v).unwrap();
        prop_assert!(*sa.hi() <= s0 && *sb.lo() >= sigma);
    }

    #[test]
    fn fujita_odaka_bound(m in toric_model(), num in 0i64..=16) {
        let v = ValuationModel::divisorial("p1", m.dim());
        let (s0, _) = thresholds::s0_and_sigma(&m, &v).unwrap();
        let t = &s0 * rat(num, 16);
        let f = thresholds::ccdf_continuous(&m, &v, &t).unwrap();
        prop_assert!(f >= num::pow(Rat::one() - t / s0, m.dim()));
    }

    #[test]
    fn power_laws_are_recovered(e in 1u32..4, c in 1i64..20) {
        let samples: Vec<(u64, Rat)> =
            (5..=40u64).map(|k| (k, int(1) + rat(c, 1) / Rat::from_integer(num::pow(k, e as usize).into()))).collect();
        let fit = rate_fit(&samples, &int(1)).unwrap();
        prop_assert!((fit.exponent + e as f64).abs() < 1e-6);
        prop_assert!(fit.residual < 1e-6);
    }

    #[test]
    fn family_measures_are_probability(m in toric_model(), k in 1u64..12, frac in 1i64..=8) {
        let v = ValuationModel::divisorial("p1", m.dim());
        let d = m.d_k(k).unwrap() as i64;
        let mk = ((d * frac + 7) / 8).max(1) as usize;
        let fam = thresholds::empirical_family_measure(&m, &v, k, mk).unwrap();
        prop_assert_eq!(fam.points.len(), mk);
        prop_assert_eq!(fam.weight() * Rat::from_integer((mk as i64).into()), Rat::one());
        prop_assert!(m.ambient().contains(&fam.mean()));
        prop_assert!(!fam.weight().is_zero());
    }
}
