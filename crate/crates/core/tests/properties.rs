//! Randomized invariants of the interval algebra, scheme geometry,
//! weight transforms, and Gram construction.

use modelset::*;
use proptest::prelude::*;

fn arb_interval() -> impl Strategy<Value = Interval> {
    (
        -50.0f64..50.0,
        0.01f64..20.0,
        any::<bool>(),
        any::<bool>(),
    )
        .prop_map(|(lo, len, lc, hc)| Interval::new(lo, lo + len, lc, hc).unwrap())
}

fn arb_set() -> impl Strategy<Value = IntervalSet> {
    prop::collection::vec(arb_interval(), 1..4)
        .prop_map(|parts| IntervalSet::normalize(parts).unwrap())
}

fn arb_basis() -> impl Strategy<Value = Basis> {
    (
        -2.0f64..2.0,
        -2.0f64..2.0,
        -2.0f64..2.0,
        -2.0f64..2.0,
    )
        .prop_map(|(a, b, c, d)| [[a, b], [c, d]])
        .prop_filter("determinant too small", |m| {
            (m[0][0] * m[1][1] - m[0][1] * m[1][0]).abs() >= 0.3
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn normalize_is_idempotent(s in arb_set()) {
        let again = IntervalSet::normalize(s.parts().to_vec()).unwrap();
        prop_assert_eq!(&again, &s);
    }

    #[test]
    fn union_contains_both_and_adds_no_measure(a in arb_set(), b in arb_set()) {
        let u = a.union(&b);
        prop_assert!(a.difference(&u).is_empty());
        prop_assert!(b.difference(&u).is_empty());
        prop_assert!(u.measure() <= a.measure() + b.measure() + 1e-9);
        prop_assert!(u.measure() >= a.measure().max(b.measure()) - 1e-9);
    }

    #[test]
    fn intersection_lies_in_both(a in arb_set(), b in arb_set()) {
        let i = a.intersect(&b);
        prop_assert!(i.difference(&a).is_empty());
        prop_assert!(i.difference(&b).is_empty());
        // inclusion-exclusion
        let u = a.union(&b);
        prop_assert!((u.measure() + i.measure() - a.measure() - b.measure()).abs() <= 1e-9);
    }

    #[test]
    fn minkowski_sum_superadditive(a in arb_set(), b in arb_set()) {
        let m = a.minkowski_sum(&b);
        prop_assert!(m.measure() >= a.measure() + b.measure() - 1e-9);
        // contains a translate of each factor
        let a0 = a.hull().unwrap().lo;
        let b0 = b.hull().unwrap().lo;
        prop_assert!(b.translate(a0).difference(&m).measure() <= 1e-9);
        prop_assert!(a.translate(b0).difference(&m).measure() <= 1e-9);
    }

    #[test]
    fn translate_and_negate_preserve_measure(a in arb_set(), t in -30.0f64..30.0) {
        prop_assert!((a.translate(t).measure() - a.measure()).abs() <= 1e-9);
        prop_assert!((a.negate().measure() - a.measure()).abs() <= 1e-12);
    }

    #[test]
    fn closure_interior_sandwich(a in arb_set()) {
        prop_assert!(a.interior().difference(&a).is_empty());
        prop_assert!(a.difference(&a.closure()).is_empty());
        prop_assert!((a.closure().measure() - a.interior().measure()).abs() <= 1e-12);
    }

    #[test]
    fn density_product_and_pairing(basis in arb_basis(), n in -40i64..40, m in -40i64..40,
                                   p in -40i64..40, q in -40i64..40) {
        let s = make_scheme(basis).unwrap();
        let dual = s.annihilator().0;
        prop_assert!((s.density() * dual.density() - 1.0).abs() <= 1e-12);
        let (x, y) = s.map(n, m);
        let (chi, eta) = dual.map(p, q);
        let v = x * chi + y * eta;
        prop_assert!((v - v.round()).abs() <= 1e-9);
    }

    #[test]
    fn enumerated_points_satisfy_constraints(basis in arb_basis(), hw in 0.2f64..1.5,
                                             r in 5.0f64..40.0) {
        let s = make_scheme(basis).unwrap();
        let w = IntervalSet::from(Interval::centered(hw).unwrap());
        let range = Interval::closed(-r, r).unwrap();
        let set = s.enumerate_strip(&w, range).unwrap();
        let mut prev = f64::NEG_INFINITY;
        for p in &set.points {
            let (g, h) = s.map(p.n, p.m);
            prop_assert_eq!(g, p.g);
            prop_assert_eq!(h, p.h);
            prop_assert!(range.contains(p.g) && w.contains(p.h));
            prop_assert!(p.g >= prev);
            prev = p.g;
        }
        // the origin always projects into a centered window
        prop_assert!(set.points.iter().any(|p| p.n == 0 && p.m == 0));
    }

    #[test]
    fn trapezoids_sandwich_window(hw in 0.3f64..2.0, frac in 0.05f64..0.45,
                                  y in -3.0f64..3.0) {
        let u = frac * hw;
        let w = IntervalSet::from(Interval::centered(hw).unwrap());
        let inner = inner_trapezoid(w.clone(), u).unwrap();
        let outer = outer_trapezoid(w.clone(), u).unwrap();
        let ind = if w.contains(y) { 1.0 } else { 0.0 };
        prop_assert!(inner.evaluate(y) <= ind + 1e-12);
        prop_assert!(ind <= outer.evaluate(y) + 1e-12);
    }

    #[test]
    fn transform_respects_decay_certificate(hw in 0.3f64..2.0, frac in 0.05f64..0.45,
                                            k in -50.0f64..50.0) {
        let u = frac * hw;
        let h = outer_trapezoid(IntervalSet::from(Interval::centered(hw).unwrap()), u).unwrap();
        let sup = h.transform_sup();
        let bound = match h.transform_decay().unwrap() {
            modelset::weights::Decay::PowerLaw { coeff, power, center } => {
                let r = (k - center).abs();
                if r > 0.0 { sup.min(coeff / r.powf(power)) } else { sup }
            }
            modelset::weights::Decay::Compact { .. } => sup,
        };
        prop_assert!(h.fourier(k).norm() <= bound + 1e-12);
    }

    #[test]
    fn compiled_transform_agrees(hw in 0.3f64..2.0, lo in -2.0f64..2.0,
                                 frac in 0.05f64..0.45, k in -40.0f64..40.0) {
        let u = frac * hw;
        let w = IntervalSet::from(Interval::half_open(lo, lo + 2.0 * hw).unwrap());
        let h = outer_trapezoid(w, u).unwrap();
        let ct = h.compile_transform();
        let (a, b) = (h.fourier(k), ct.eval(k));
        prop_assert!((a - b).norm() <= 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn gram_is_positive_semidefinite(pts in prop::collection::btree_set(-200i64..200, 2..12),
                                     kw in 0.05f64..0.45) {
        let pts: Vec<f64> = pts.into_iter().map(|n| n as f64 / 7.0).collect();
        let spectrum = IntervalSet::from(Interval::centered(kw).unwrap());
        let est = eig_extremes(&interpolation_gram(&pts, &spectrum).unwrap()).unwrap();
        prop_assert!(est.lambda_min >= -1e-10);
        prop_assert!((est.trace - pts.len() as f64 * spectrum.measure()).abs() <= 1e-9);
    }

    #[test]
    fn comb_identity_holds_on_random_schemes(basis in arb_basis()) {
        let s = make_scheme(basis).unwrap();
        let h = outer_trapezoid(IntervalSet::from(Interval::centered(1.0).unwrap()), 0.4).unwrap();
        let g = outer_trapezoid(IntervalSet::from(Interval::centered(0.8).unwrap()), 0.3).unwrap();
        let chk = psf_residual(&s, &h, &g, 40.0).unwrap();
        prop_assert!(chk.passes(), "residual {:e} tails {:e}",
            chk.residual, chk.lhs.tail_bound + chk.rhs.tail_bound);
    }
}
