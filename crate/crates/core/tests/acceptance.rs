//! End-to-end acceptance checks. Each test covers one numbered criterion
//! with its tolerance and time budget and prints a single summary line.
//!
//! Run with `cargo test --test acceptance -- --nocapture` to see the lines.

use modelset::*;
use modelset::bounds::{maximize_lower_envelope, minimize_upper_envelope};
use modelset::frames::STABILITY_FRACTION;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::time::Instant;

fn centered(r: f64) -> IntervalSet {
    IntervalSet::from(Interval::centered(r).unwrap())
}

fn unit_window() -> IntervalSet {
    IntervalSet::from(Interval::half_open(0.0, 1.0).unwrap())
}

fn random_scheme(rng: &mut ChaCha8Rng) -> LatticeScheme {
    loop {
        let b = [
            [rng.gen_range(-2.0f64..2.0), rng.gen_range(-2.0..2.0)],
            [rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)],
        ];
        let det = b[0][0] * b[1][1] - b[0][1] * b[1][0];
        if det.abs() >= 0.4 {
            return make_scheme(b).unwrap();
        }
    }
}

#[test]
fn criterion_01_density_of_lattice_times_annihilator_is_one() {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    for _ in 0..20 {
        let s = random_scheme(&mut rng);
        let prod = s.density() * s.annihilator().0.density();
        assert!((prod - 1.0).abs() <= 1e-12, "density product {prod}");
    }
    let dt = t0.elapsed().as_secs_f64();
    assert!(dt < 1.0, "took {dt:.2} s, budget 1 s");
    println!("criterion 01 (dens(L)·dens(L0) = 1 within 1e-12, 20 schemes): PASS");
}

#[test]
fn criterion_02_annihilator_pairing_is_integral() {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    for _ in 0..100 {
        let s = random_scheme(&mut rng);
        let dual = s.annihilator().0;
        for _ in 0..100 {
            let (x, y) = s.map(rng.gen_range(-50..=50), rng.gen_range(-50..=50));
            let (chi, eta) = dual.map(rng.gen_range(-50..=50), rng.gen_range(-50..=50));
            let v = x * chi + y * eta;
            assert!((v - v.round()).abs() <= 1e-9, "pairing {v} not integral");
        }
    }
    let dt = t0.elapsed().as_secs_f64();
    assert!(dt < 1.0, "took {dt:.2} s, budget 1 s");
    println!("criterion 02 (10^4 lattice/annihilator pairings integral to 1e-9): PASS");
}

#[test]
fn criterion_03_summation_identity_at_radius_500() {
    let w = centered(1.0);
    let h = outer_trapezoid(w.clone(), 0.5).unwrap();
    let g = outer_trapezoid(w, 0.5).unwrap();
    for (name, s) in [("identity basis", integer_scheme()), ("fibonacci", fibonacci_scheme())] {
        let t0 = Instant::now();
        let chk = psf_residual(&s, &h, &g, 500.0).unwrap();
        let dt = t0.elapsed().as_secs_f64();
        let tails = chk.lhs.tail_bound + chk.rhs.tail_bound;
        assert!(chk.passes(), "{name}: residual {:e} above tails {tails:e}", chk.residual);
        assert!(tails <= 1e-5, "{name}: tails {tails:e} above 1e-5");
        assert!(dt < 10.0, "{name}: took {dt:.2} s, budget 10 s");
    }
    println!("criterion 03 (comb identity residual within tails <= 1e-5 at radius 500): PASS");
}

#[test]
fn criterion_04_fibonacci_banach_density() {
    let t0 = Instant::now();
    let s = fibonacci_scheme();
    let w = unit_window();
    let seq = VanHoveSeq::geometric(625.0, 2.0, 5, 32, 50.0); // ends at 10^4
    let predicted = 5.0f64.sqrt().recip();
    let rep = banach_density(
        |range| Ok(s.enumerate_strip(&w, range)?.g_coords()),
        &seq,
        Some(predicted),
    )
    .unwrap();
    assert!((rep.lower - predicted).abs() <= 0.01 * predicted, "lower {}", rep.lower);
    assert!((rep.upper - predicted).abs() <= 0.01 * predicted, "upper {}", rep.upper);
    assert!(rep.rel_spread <= 0.01, "spread {}", rep.rel_spread);
    let dt = t0.elapsed().as_secs_f64();
    assert!(dt < 30.0, "took {dt:.2} s, budget 30 s");
    println!("criterion 04 (Banach density within 1% of 1/sqrt(5) at T = 10^4): PASS");
}

#[test]
fn criterion_05_smoothed_density_converges() {
    let t0 = Instant::now();
    let s = fibonacci_scheme();
    let h = indicator(unit_window()).unwrap();
    let dens = s.density(); // ∫h = 1
    let mut worst_by_order = Vec::new();
    for n in [8u32, 16, 32, 64] {
        let mut worst = 0.0f64;
        for j in 0..20 {
            let shift = 50.0 * j as f64 / 20.0;
            let p = smooth_density(&s, &h, n, shift).unwrap();
            worst = worst.max((p.value - dens).abs());
        }
        worst_by_order.push(worst);
    }
    assert!(worst_by_order[3] <= 0.05, "error at order 64: {}", worst_by_order[3]);
    for pair in worst_by_order.windows(2) {
        assert!(pair[1] <= pair[0] + 1e-12, "errors not decreasing: {worst_by_order:?}");
    }
    let dt = t0.elapsed().as_secs_f64();
    assert!(dt < 60.0, "took {dt:.2} s, budget 60 s");
    println!("criterion 05 (smoothed density error <= 0.05 at order 64, decreasing in order): PASS");
}

#[test]
fn criterion_06_trapezoid_closed_forms() {
    let t0 = Instant::now();
    use std::f64::consts::PI;

    // (a) product form of the outer-trapezoid transform, and its value at 0
    let mut rng = ChaCha8Rng::seed_from_u64(606);
    for (w, u) in [(1.0, 0.5), (0.8, 0.3)] {
        let h = outer_trapezoid(centered(w), u).unwrap();
        for _ in 0..100 {
            let k: f64 = rng.gen_range(-25.0..25.0);
            if k.abs() < 1e-6 {
                continue;
            }
            let expected =
                (2.0 * PI * (w + u) * k).sin() / (PI * k) * (2.0 * PI * u * k).sin()
                    / (2.0 * PI * u * k);
            let got = h.fourier(k);
            assert!((got.re - expected).abs() <= 1e-10, "k={k}: {} vs {expected}", got.re);
            assert!(got.im.abs() <= 1e-12);
        }
        assert_eq!(h.fourier(0.0).re, 2.0 * (w + u));
    }

    // (b) envelope minimum over the smoothing width
    let (dens, w, b) = (1.0, 1.0, 0.7);
    let (u_star, v_star) = minimize_upper_envelope(dens, w, b);
    let u_exact = 1.0 / (4.0 * b);
    let v_exact = dens * (2.0 * w + 1.0 / b);
    assert!((u_star - u_exact).abs() <= 0.05 * u_exact, "u* {u_star} vs {u_exact}");
    assert!((v_star - v_exact).abs() <= 1e-6, "min {v_star} vs {v_exact}");

    // (c) positivity frontier of the lower envelope is 2wb > 1
    for i in 0..20 {
        for j in 0..20 {
            let w = 0.2 + 0.08 * i as f64;
            let b = 0.31 + 0.17 * j as f64;
            let (_, best) = maximize_lower_envelope(1.0, w, b);
            assert_eq!(best > 0.0, 2.0 * w * b > 1.0, "w={w} b={b} best={best}");
        }
    }
    let dt = t0.elapsed().as_secs_f64();
    assert!(dt < 30.0, "took {dt:.2} s, budget 30 s");
    println!("criterion 06 (transform product form, envelope minimum, positivity frontier): PASS");
}

#[test]
fn criterion_07_integer_nodes_on_nyquist_band() {
    let t0 = Instant::now();
    let pts: Vec<f64> = (-32..=32).map(|n| n as f64).collect();
    let band = centered(0.5);
    let est = eig_extremes(&interpolation_gram(&pts, &band).unwrap()).unwrap();
    assert!((est.lambda_min - 1.0).abs() <= 1e-10, "gram min {}", est.lambda_min);
    assert!((est.lambda_max - 1.0).abs() <= 1e-10, "gram max {}", est.lambda_max);
    let quot = sampling_quotient(&pts, &band, 32.0, 257).unwrap();
    assert!((quot.lambda_min - 1.0).abs() <= 0.1, "quotient min {}", quot.lambda_min);
    assert!((quot.lambda_max - 1.0).abs() <= 0.1, "quotient max {}", quot.lambda_max);
    let dt = t0.elapsed().as_secs_f64();
    assert!(dt < 30.0, "took {dt:.2} s, budget 30 s");
    println!("criterion 07 (integers vs [-1/2,1/2]: Gram identity, quotient near 1): PASS");
}

#[test]
fn criterion_08_09_certificate_soundness_and_density_dichotomy() {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(808);
    let truncation = 40.0;
    let mut checked = 0usize;
    let mut stable_verdicts = 0usize;
    for case in 0..30 {
        let s = random_scheme(&mut rng);
        let hw = rng.gen_range(0.5..1.2);
        let kw = rng.gen_range(0.05..0.3);
        let u = rng.gen_range(0.1..0.4f64).min(0.9 * hw);
        let v = 0.4 * kw;
        let window = centered(hw);
        let spectrum = centered(kw);

        let set = s
            .enumerate_strip(&window, Interval::closed(-truncation, truncation).unwrap())
            .unwrap();
        let pts = set.g_coords();
        if pts.len() < 4 {
            continue;
        }
        let gram = match interpolation_gram(&pts, &spectrum).and_then(|g| eig_extremes(&g)) {
            Ok(e) => e,
            Err(_) => continue, // nearly coincident nodes: no empirical proxy
        };
        let nodes = (4.0 * spectrum.measure() * truncation) as usize + 64;
        let quot = sampling_quotient(&pts, &spectrum, truncation, nodes).unwrap();
        checked += 1;

        // every certificate must bracket the matching empirical extreme
        let su = sampling_upper(&s, &window, &spectrum, u, 60.0).unwrap();
        assert!(
            su.value >= quot.lambda_max - 1e-9,
            "case {case}: upper sampling {} below empirical {}",
            su.value,
            quot.lambda_max
        );
        if let Ok(sl) = sampling_lower(&s, &spectrum, &window, u, 60.0) {
            if sl.positive {
                assert!(
                    sl.value <= quot.lambda_min + 1e-9,
                    "case {case}: lower sampling {} above empirical {}",
                    sl.value,
                    quot.lambda_min
                );
            }
        }
        if let Ok(il) = interp_lower(&s, &window, &spectrum, v, 60.0) {
            if il.positive {
                assert!(
                    il.value <= gram.lambda_min + 1e-9,
                    "case {case}: lower interpolation {} above empirical {}",
                    il.value,
                    gram.lambda_min
                );
            }
        }
        let iu = interp_upper(&pts, &spectrum).unwrap();
        assert!(
            iu.value >= gram.lambda_max - 1e-9,
            "case {case}: upper interpolation {} below empirical {}",
            iu.value,
            gram.lambda_max
        );

        // density dichotomy: a stable verdict forces the density inequality
        let rep = match duality_experiment(&s, &window, &spectrum, &[20.0, 30.0, 45.0]) {
            Ok(r) => r,
            Err(_) => continue,
        };
        let theta = spectrum.measure();
        let seq = VanHoveSeq::geometric(500.0, 2.0, 3, 16, 20.0);
        let dens_rep = banach_density(
            |range| Ok(s.enumerate_strip(&window, range)?.g_coords()),
            &seq,
            None,
        )
        .unwrap();
        match rep.verdict {
            Verdict::SamplingStable => {
                stable_verdicts += 1;
                assert!(
                    dens_rep.lower >= theta * 0.98,
                    "case {case}: lower density {} below spectrum measure {theta}",
                    dens_rep.lower
                );
            }
            Verdict::InterpolationStable => {
                stable_verdicts += 1;
                assert!(
                    dens_rep.upper <= theta * 1.02,
                    "case {case}: upper density {} above spectrum measure {theta}",
                    dens_rep.upper
                );
            }
            Verdict::Inconclusive => {}
        }
    }
    assert!(checked >= 20, "only {checked} sweep cases produced empirical proxies");
    let dt = t0.elapsed().as_secs_f64();
    assert!(dt < 300.0, "took {dt:.2} s, budget 5 min");
    println!(
        "criterion 08/09 (certificates bracket empirical extremes on {checked} cases; \
         density inequality holds for {stable_verdicts} stable verdicts): PASS"
    );
}

#[test]
fn criterion_10_fibonacci_stability_regimes() {
    let t0 = Instant::now();
    let s = fibonacci_scheme();
    let w = unit_window();
    let truncs = [40.0, 80.0, 160.0];

    // density 1/sqrt(5) ≈ 0.447 against spectra of measure 0.2 and 0.7
    let a = duality_experiment(&s, &w, &centered(0.1), &truncs).unwrap();
    assert_eq!(a.verdict, Verdict::SamplingStable, "trace {:?}", a.sampling_trace);
    assert!(a.duality_consistent);
    let thr_a = STABILITY_FRACTION * a.spectrum_measure;
    assert!(a.sampling_trace.iter().rev().take(3).all(|e| e.lambda_min >= thr_a));

    let b = duality_experiment(&s, &w, &centered(0.35), &truncs).unwrap();
    assert_eq!(b.verdict, Verdict::InterpolationStable, "trace {:?}", b.interpolation_trace);
    assert!(b.duality_consistent);
    let thr_b = STABILITY_FRACTION * b.spectrum_measure;
    assert!(b.interpolation_trace.iter().rev().take(3).all(|e| e.lambda_min >= thr_b));

    let dt = t0.elapsed().as_secs_f64();
    assert!(dt < 300.0, "took {dt:.2} s, budget 5 min");
    println!("criterion 10 (Fibonacci regimes: sampling-stable at 0.2, interpolation-stable at 0.7): PASS");
}

#[test]
fn criterion_11_boundary_set_identities() {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1111);
    // dyadic endpoints keep every sum exact, so the identities hold as sets
    let mut dyadic_set = |max_parts: usize| {
        let n = rng.gen_range(1..=max_parts);
        let parts: Vec<Interval> = (0..n)
            .map(|_| {
                let lo = rng.gen_range(-64..=64) as f64 / 16.0;
                let len = rng.gen_range(1..=48) as f64 / 16.0;
                Interval::new(lo, lo + len, rng.gen(), rng.gen()).unwrap()
            })
            .collect();
        IntervalSet::normalize(parts).unwrap()
    };
    let subset = |x: &IntervalSet, y: &IntervalSet| x.difference(y).measure() == 0.0;

    for case in 0..200 {
        let a = dyadic_set(3);
        let k = dyadic_set(3);
        let l = dyadic_set(1);
        let bd = van_hove_boundary(&a, &k);

        // (K + cl A) ⊆ int A ∪ ∂ᴷA ⊆ (K ∪ {0}) + cl A
        let lhs = k.minkowski_sum(&a.closure());
        let mid = a.interior().union(&bd);
        let rhs = k
            .union(&IntervalSet::from(Interval::point(0.0).unwrap()))
            .minkowski_sum(&a.closure());
        assert!(subset(&lhs, &mid), "case {case}: first inclusion fails");
        assert!(subset(&mid, &rhs), "case {case}: second inclusion fails");

        // ∂ᴷ(A + L) ⊆ ∂ᴷA + cl L
        let left = van_hove_boundary(&a.minkowski_sum(&l), &k);
        let right = bd.minkowski_sum(&l.closure());
        assert!(subset(&left, &right), "case {case}: translation-stability fails");
    }
    let dt = t0.elapsed().as_secs_f64();
    assert!(dt < 1.0, "took {dt:.2} s, budget 1 s");
    println!("criterion 11 (van Hove boundary inclusions exact on 200 cases): PASS");
}
