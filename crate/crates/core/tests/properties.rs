use num_complex::Complex64;
use pittlab::fourier::{
    random_step_function, random_trig_polynomial, transference_constants, weighted_lq_norm_ft_line, Ons,
};
use pittlab::inequalities::{
    exp_summability, pitt_ratio, pitt_region_classify, type_test_ratio, zygmund_check, PittInput, PittParams,
    TypeFamily, TypeNotion, ZygmundVariant,
};
use pittlab::interpolation::{k_functional, k_functional_reversed};
use pittlab::quad::QuadConfig;
use pittlab::rearrange::{
    lz_norm_function, lz_norm_sequence, rearrange_sampled, rearrange_sequence, weighted_lp_norm_torus, LzParams,
    PowerProfile, Profile,
};
use pittlab::sharpness::{CounterexampleSpec, Family};
use pittlab::values::{dual_pair, norming_functional, rademacher_average, AverageMethod, ValuePoint, ValueSpace};
use proptest::prelude::*;

const EXPONENTS: [f64; 5] = [1.0, 1.5, 2.0, 3.0, f64::INFINITY];

fn complex_vec(len: usize) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec(
        (-10.0f64..10.0, -10.0f64..10.0).prop_map(|(a, b)| Complex64::new(a, b)),
        len,
    )
}

fn vec_pair() -> impl Strategy<Value = (usize, Vec<Complex64>, Vec<Complex64>)> {
    (0usize..5, 1usize..8).prop_flat_map(|(ri, m)| (Just(ri), complex_vec(m), complex_vec(m)))
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1e-300)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn norm_axioms((ri, x, y) in vec_pair(), lambda in -5.0f64..5.0, phase in 0.0f64..6.3) {
        let space = ValueSpace::new(EXPONENTS[ri], x.len()).unwrap();
        let (xp, yp) = (ValuePoint::new(x.clone()), ValuePoint::new(y.clone()));
        let nx = space.norm(&xp).unwrap();
        let ny = space.norm(&yp).unwrap();
        prop_assert!(nx >= 0.0);
        prop_assert_eq!(space.norm(&space.zero()).unwrap(), 0.0);
        let s = Complex64::from_polar(lambda, phase);
        prop_assert!(close(space.norm(&xp.scaled(s)).unwrap(), lambda.abs() * nx, 1e-12));
        let mut sum = xp.clone();
        sum.add_assign_scaled(&yp, Complex64::new(1.0, 0.0));
        prop_assert!(space.norm(&sum).unwrap() <= (nx + ny) * (1.0 + 1e-12));
    }

    #[test]
    fn holder_and_extremal_vector((ri, x, y) in vec_pair()) {
        let space = ValueSpace::new(EXPONENTS[ri], x.len()).unwrap();
        let dual = space.dual();
        let (xp, yp) = (ValuePoint::new(x), ValuePoint::new(y));
        let pair = dual_pair(&xp, &yp).unwrap().norm();
        prop_assert!(pair <= space.norm(&xp).unwrap() * dual.norm(&yp).unwrap() * (1.0 + 1e-12) + 1e-12);
        if !xp.is_zero() {
            let phi = norming_functional(&space, &xp).unwrap();
            prop_assert!(close(dual.norm(&phi).unwrap(), 1.0, 1e-10));
            prop_assert!(close(dual_pair(&xp, &phi).unwrap().norm(), space.norm(&xp).unwrap(), 1e-10));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rademacher_exact_invariant_under_permutation_and_signs(
        ri in 0usize..5,
        vs in prop::collection::vec(complex_vec(3), 1..8),
        flips in prop::collection::vec(any::<bool>(), 8),
        shift in 0usize..8,
    ) {
        let space = ValueSpace::new(EXPONENTS[ri], 3).unwrap();
        let xs: Vec<ValuePoint> = vs.into_iter().map(ValuePoint::new).collect();
        let base = rademacher_average(&space, &xs, 2.0, AverageMethod::ExactEnum).unwrap();
        let mut ys: Vec<ValuePoint> = xs
            .iter()
            .zip(&flips)
            .map(|(x, &f)| if f { x.scaled(Complex64::new(-1.0, 0.0)) } else { x.clone() })
            .collect();
        let k = shift % ys.len();
        ys.rotate_left(k);
        ys.reverse();
        let other = rademacher_average(&space, &ys, 2.0, AverageMethod::ExactEnum).unwrap();
        prop_assert!(close(base, other, 1e-12));
    }

    #[test]
    fn equimeasurability(samples in prop::collection::vec((0.01f64..2.0, 0.0f64..5.0), 1..40), lambda in 0.0f64..5.0) {
        let curve = rearrange_sampled(&samples).unwrap();
        let direct: f64 = samples.iter().filter(|s| s.1 > lambda).map(|s| s.0).sum();
        prop_assert!((curve.distribution(lambda) - direct).abs() <= 1e-12 * (1.0 + direct));
    }

    #[test]
    fn hardy_littlewood_rearrangement(pairs in prop::collection::vec((0.0f64..10.0, 0.0f64..10.0), 1..60)) {
        let (f, g): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
        let plain: f64 = f.iter().zip(&g).map(|(a, b)| a * b).sum();
        let (fs, gs) = (rearrange_sequence(&f).unwrap(), rearrange_sequence(&g).unwrap());
        let sorted: f64 = fs.values().iter().zip(gs.values()).map(|(a, b)| a * b).sum();
        prop_assert!(plain <= sorted * (1.0 + 1e-12) + 1e-12);
    }

    #[test]
    fn lz_sequence_with_p_equal_q_is_lp(xs in prop::collection::vec(0.0f64..10.0, 1..80), p in 1.0f64..6.0) {
        let lz = lz_norm_sequence(&xs, &LzParams::new(p, p, 0.0)).unwrap();
        let lp = xs.iter().map(|x| x.powf(p)).sum::<f64>().powf(1.0 / p);
        prop_assert!(close(lz, lp, 1e-12), "{} vs {}", lz, lp);
    }

    #[test]
    fn lz_function_monotone_under_domination(
        pairs in prop::collection::vec((0.0f64..5.0, 0.0f64..5.0), 1..30),
        pi in 0usize..3,
        b in -0.5f64..1.0,
    ) {
        let p = [1.5, 2.0, 4.0][pi];
        let small: Vec<f64> = pairs.iter().map(|x| x.0).collect();
        let big: Vec<f64> = pairs.iter().map(|x| x.0 + x.1).collect();
        let params = LzParams::new(p, 2.0, b);
        let cfg = QuadConfig::default();
        let lo = lz_norm_function(&rearrange_sequence(&small).unwrap(), &params, &cfg).unwrap().value();
        let hi = lz_norm_function(&rearrange_sequence(&big).unwrap(), &params, &cfg).unwrap().value();
        prop_assert!(lo <= hi * (1.0 + 1e-9) + 1e-12, "{} > {}", lo, hi);
    }

    #[test]
    fn lz_function_stable_under_panel_doubling(frac in 0.0f64..0.8, b in -0.5f64..1.0, pi in 0usize..3) {
        let p = [2.5, 3.0, 4.0][pi];
        let a = frac / p;
        let curve = PowerProfile { c: 1.0, a, total: 1.0 };
        let params = LzParams::new(p, 2.0, b);
        let cfg = QuadConfig::default();
        let coarse = lz_norm_function(&curve, &params, &cfg).unwrap().value();
        let fine = lz_norm_function(&curve, &params, &cfg.refined()).unwrap().value();
        prop_assert!(close(coarse, fine, 1e-6), "{} vs {}", coarse, fine);
    }

    #[test]
    fn orthonormal_systems_are_uniformly_bounded(n in 0usize..512, j in 0usize..1024) {
        let s = j as f64 / 1024.0;
        prop_assert!(Ons::Trigonometric.eval(n, s).norm() <= 1.0 + 1e-14);
        prop_assert!(Ons::Walsh.eval(n, s).norm() <= 1.0 + 1e-14);
    }

    #[test]
    fn classifier_duality(
        d in 1usize..3,
        p in 1.05f64..2.5,
        dq in 0.0f64..3.0,
        gamma in 0.0f64..1.5,
        p0 in 1.05f64..2.0,
    ) {
        let q = p + dq;
        let params = PittParams::on_scaling_line(d, p, q, gamma, p0);
        prop_assume!(params.beta >= 0.0);
        let v = pitt_region_classify(&params).unwrap();
        let w = pitt_region_classify(&params.dual()).unwrap();
        prop_assert_eq!(v.holds(), w.holds(), "{:?} vs {:?}", v, w);
    }

    #[test]
    fn ratios_are_scale_invariant(seed in 0u64..1000, scale in 0.01f64..100.0, phase in 0.0f64..6.3) {
        let cfg = QuadConfig::default();
        let f = random_trig_polynomial(1, 6, ValueSpace::new(1.5, 2).unwrap(), seed, 0).unwrap();
        let g = f.scaled(Complex64::from_polar(scale, phase));
        let params = PittParams::on_scaling_line(1, 1.5, 3.0, 0.2, 2.0);
        let (a, b) = (
            pitt_ratio(PittInput::Torus(&f), &params, &cfg).unwrap().ratio,
            pitt_ratio(PittInput::Torus(&g), &params, &cfg).unwrap().ratio,
        );
        prop_assert!(close(a, b, 1e-9), "{} {}", a, b);
        let notion = TypeNotion::new(TypeFamily::Paley, pittlab::values::TypeKind::Type, 1.5).unwrap();
        let (a, b) = (type_test_ratio(&f, &notion, &cfg).unwrap(), type_test_ratio(&g, &notion, &cfg).unwrap());
        prop_assert!(close(a, b, 1e-9), "{} {}", a, b);
        let z = |h| {
            let s = zygmund_check(h, 0.5, 2.0, ZygmundVariant::Std, &cfg).unwrap();
            s.lhs.value() / s.rhs.value()
        };
        prop_assert!(close(z(&f), z(&g), 1e-9));
    }

    #[test]
    fn hilbert_fourier_type_two_is_contractive(seed in 0u64..1000, d in 1usize..3, n in 1usize..10) {
        let f = random_trig_polynomial(d, n, ValueSpace::new(2.0, 3).unwrap(), seed, 1).unwrap();
        let notion = TypeNotion::new(TypeFamily::Fourier, pittlab::values::TypeKind::Type, 2.0).unwrap();
        let r = type_test_ratio(&f, &notion, &QuadConfig::default()).unwrap();
        prop_assert!(r <= 1.0 + 1e-10, "{}", r);
    }

    #[test]
    fn exp_summability_monotonicity(
        norms in prop::collection::vec(0.01f64..3.0, 1..40),
        a in 0.1f64..3.0,
        da in 0.01f64..2.0,
        grow in 1.0f64..3.0,
        b in 0.0f64..1.0,
    ) {
        let base = exp_summability(&norms, a, b, 2.0).unwrap();
        prop_assert!(exp_summability(&norms, a + da, b, 2.0).unwrap() <= base * (1.0 + 1e-12));
        let bigger: Vec<f64> = norms.iter().map(|c| c * grow).collect();
        prop_assert!(exp_summability(&bigger, a, b, 2.0).unwrap() >= base * (1.0 - 1e-12));
    }

    #[test]
    fn k_functional_axioms(
        pairs in prop::collection::vec((0.0f64..5.0, 0.0f64..5.0), 1..30),
        t in 0.01f64..40.0,
        lambda in 0.0f64..10.0,
        dt in 0.01f64..10.0,
    ) {
        let (f, g): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
        let sum: Vec<f64> = f.iter().zip(&g).map(|(a, b)| a + b).collect();
        let k = |v: &[f64], t: f64| k_functional(&rearrange_sequence(v).unwrap(), t).unwrap();
        prop_assert!(k(&sum, t) <= (k(&f, t) + k(&g, t)) * (1.0 + 1e-12) + 1e-12);
        let scaled: Vec<f64> = f.iter().map(|x| lambda * x).collect();
        prop_assert!(close(k(&scaled, t), lambda * k(&f, t), 1e-12) || k(&f, t) == 0.0);
        prop_assert!(k(&f, t + dt) / (t + dt) <= k(&f, t) / t * (1.0 + 1e-12) + 1e-15);
        let curve = rearrange_sequence(&f).unwrap();
        let rev = k_functional_reversed(&curve, 1.0 / t).unwrap();
        prop_assert!(close(k(&f, t), t * rev, 1e-10) || (k(&f, t) - t * rev).abs() < 1e-12, "{} vs {}", k(&f, t), t * rev);
    }

    #[test]
    fn counterexamples_are_reproducible(fi in 0usize..11, n in 1usize..40) {
        let family = Family::ALL[fi];
        let spec = CounterexampleSpec::with_defaults(family, 1).unwrap();
        let a: Vec<_> = spec.build(n).unwrap().coefficients().collect();
        let b: Vec<_> = spec.build(n).unwrap().coefficients().collect();
        prop_assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            prop_assert_eq!(x.0, y.0);
            prop_assert_eq!(x.1.to_bits(), y.1.to_bits());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn transference_brackets_line_by_torus(seed in 0u64..1000, qi in 0usize..3, gamma in 0.0f64..0.3) {
        let q = [1.5, 2.0, 3.0][qi];
        prop_assume!(gamma * q < 1.0);
        let cfg = QuadConfig::default();
        let g = random_step_function(1, 1.0, ValueSpace::new(2.0, 2).unwrap(), 4, seed, 0).unwrap();
        let torus = weighted_lp_norm_torus(&g.to_trig_polynomial().unwrap(), q, -gamma, 64, &cfg).unwrap();
        let line = weighted_lq_norm_ft_line(&g, q, gamma, 64.0, &cfg).unwrap();
        let (c1, c2) = transference_constants(q, gamma).unwrap();
        let lo = c1.powf(1.0 / q) * torus;
        let hi = c2.powf(1.0 / q) * torus;
        prop_assert!(line.value + line.tail_bound >= lo * (1.0 - 1e-6), "{} + {} < {}", line.value, line.tail_bound, lo);
        prop_assert!(line.value <= hi * (1.0 + 1e-6), "{} > {}", line.value, hi);
    }
}

#[test]
fn monte_carlo_matches_exact_where_sign_laws_agree() {
    // ‖Σ ε_n e_n‖_{ℓ¹} = N for any unimodular signs, and second moments in
    // ℓ² are sign-law independent, so both averages must coincide there.
    let cases = [(1.0, 2.0, 1.0), (2.0, 2.0, 2.0)];
    for (r, moment, _) in cases {
        for n in [4usize, 8, 12] {
            let space = ValueSpace::new(r, n).unwrap();
            let xs: Vec<ValuePoint> = pittlab::values::random_points(&space, n, 5, n as u64);
            let xs = if r == 1.0 {
                (0..n).map(|k| space.basis(k)).collect()
            } else {
                xs
            };
            let exact = rademacher_average(&space, &xs, moment, AverageMethod::ExactEnum).unwrap();
            let trials = 10_000;
            let mc = rademacher_average(&space, &xs, moment, AverageMethod::MonteCarlo { seed: 9, trials }).unwrap();
            // σ of the moment estimator, from the per-trial spread bound ‖Σ‖^m ≤ (Σ‖x‖)^m.
            let bound: f64 = xs.iter().map(|x| space.norm(x).unwrap()).sum::<f64>().powf(moment);
            let sigma = bound / (trials as f64).sqrt();
            let diff = (mc.powf(moment) - exact.powf(moment)).abs();
            assert!(diff <= 3.0 * sigma, "r={r} n={n}: mc {mc} exact {exact}");
        }
    }
}

#[test]
fn power_profile_primitive_matches_default_quadrature() {
    struct Plain(PowerProfile);
    impl Profile for Plain {
        fn total_measure(&self) -> f64 {
            self.0.total
        }
        fn value(&self, t: f64) -> f64 {
            self.0.value(t)
        }
        fn breakpoints(&self) -> Vec<f64> {
            self.0.breakpoints()
        }
    }
    let p = PowerProfile {
        c: 2.0,
        a: 0.4,
        total: 1.0,
    };
    for t in [0.001, 0.3, 1.0, 5.0] {
        let exact = p.primitive(t);
        let numeric = Plain(p).primitive(t);
        assert!(close(exact, numeric, 1e-8), "t={t}: {exact} vs {numeric}");
    }
}
