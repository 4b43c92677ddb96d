use lipfourier::cli::ExperimentConfig;
use lipfourier::equivalence::{equivalence_report, EquivalenceOptions};
use lipfourier::functionals::{aux_tail_phi, tail_value, weighted_tail, FunctionalOptions};
use lipfourier::modulus::{MoGrids, Modulus};
use lipfourier::spaces::{RadialProfile, SpectralForm, SpectralSpace, Spectrum};
use proptest::prelude::*;

fn spaces() -> Vec<SpectralSpace> {
    vec![
        SpectralSpace::euclidean(1).unwrap(),
        SpectralSpace::euclidean(2).unwrap(),
        SpectralSpace::euclidean(3).unwrap(),
        SpectralSpace::hyperbolic(2).unwrap(),
        SpectralSpace::hyperbolic(3).unwrap(),
    ]
}

fn power_spec(space: &SpectralSpace, scale: f64, exponent: f64) -> Spectrum {
    let p = RadialProfile::from_spectral(SpectralForm::Power { scale, exponent, lambda0: 1.0 }).unwrap();
    Spectrum::new(space, &p).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn power_indices_equal_the_exponent(gamma in 0.05f64..3.0) {
        let m = Modulus::power(gamma, 4.0).unwrap();
        let idx = m.mo_indices(&MoGrids::default()).unwrap();
        prop_assert!((idx.m_lower - gamma).abs() < 1e-9);
        prop_assert!((idx.m_upper - gamma).abs() < 1e-9);
    }

    #[test]
    fn promoting_the_order_keeps_values(gamma in 0.05f64..1.9, lambda in -2.0f64..2.0, t in 1e-12f64..1.0) {
        for m in [Modulus::power(gamma, 2.0).unwrap(), Modulus::power_log(gamma, lambda, 2.0).unwrap()] {
            let p = m.promote_order(3.0).unwrap();
            prop_assert_eq!(p.order_k, 3.0);
            prop_assert_eq!(m.eval(t).unwrap().to_bits(), p.eval(t).unwrap().to_bits());
        }
    }

    #[test]
    fn spherical_functions_are_bounded(lambda in 0.0f64..200.0, t in 0.0f64..20.0) {
        for s in spaces() {
            let phi = s.phi(lambda, t).unwrap();
            prop_assert!(phi.abs() <= 1.0 + 1e-12, "{} φ = {phi}", s.label());
            let gap = s.gap(lambda, t).unwrap();
            prop_assert!((gap - (1.0 - phi)).abs() <= 1e-10, "{} gap {gap} vs 1 − φ {}", s.label(), 1.0 - phi);
        }
    }

    #[test]
    fn gap_is_below_the_quadratic_bound(lambda in 1e-3f64..50.0, t in 1e-4f64..3.0) {
        for s in spaces() {
            let e = s.lemma_estimates(&[lambda], &[t]).unwrap();
            prop_assert!(e.worst_quadratic_ratio <= 1.0, "{}: {}", s.label(), e.worst_quadratic_ratio);
        }
    }

    #[test]
    fn tails_grow_with_t(exponent in 3.5f64..7.0, t in 1e-4f64..0.25) {
        let opts = FunctionalOptions::default();
        for s in spaces() {
            let spec = power_spec(&s, 1.0, exponent + s.dim_n as f64 - 1.0);
            let small = tail_value(&spec, t, &opts).unwrap().value;
            let large = tail_value(&spec, 2.0 * t, &opts).unwrap().value;
            prop_assert!(small <= large * (1.0 + 1e-12));
            let small = weighted_tail(&spec, t, &opts).unwrap().value;
            let large = weighted_tail(&spec, 2.0 * t, &opts).unwrap().value;
            prop_assert!(small <= large * (1.0 + 1e-12));
        }
    }

    #[test]
    fn auxiliary_tail_is_nonincreasing(s0 in 0.0f64..20.0, ds in 0.0f64..20.0, center in 1.0f64..10.0) {
        let opts = FunctionalOptions::default();
        let p = RadialProfile::from_spectral(SpectralForm::Bump { center, width: 0.9 * center, height: 1.0 }).unwrap();
        for s in spaces() {
            let spec = Spectrum::new(&s, &p).unwrap();
            let a = aux_tail_phi(&spec, s0, &opts).unwrap().value;
            let b = aux_tail_phi(&spec, s0 + ds, &opts).unwrap().value;
            prop_assert!(b <= a * (1.0 + 1e-12) + 1e-300);
        }
    }

    #[test]
    fn config_json_round_trips(j in 8usize..40, tol in 1e-12f64..1e-3, name in prop::sample::select(lipfourier::cli::RECIPES)) {
        let mut cfg = ExperimentConfig::recipe(name).unwrap();
        cfg.grid.j = Some(j);
        cfg.grid.tol = Some(tol);
        let text = serde_json::to_string(&cfg).unwrap();
        prop_assert_eq!(ExperimentConfig::from_json(&text).unwrap(), cfg);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn scaling_the_spectrum_scales_the_ratios(c in 0.01f64..100.0, alpha in 0.3f64..1.5) {
        let space = SpectralSpace::euclidean(2).unwrap();
        let m = Modulus::power(alpha, 2.0).unwrap();
        let opts = EquivalenceOptions { j_max: 12, ..EquivalenceOptions::default() };
        let base = equivalence_report(&power_spec(&space, 1.0, 2.0 * alpha + 2.0), &m, &opts).unwrap();
        let scaled = equivalence_report(&power_spec(&space, c, 2.0 * alpha + 2.0), &m, &opts).unwrap();
        let fwd = scaled.direction_forward.ratio_sup / base.direction_forward.ratio_sup;
        let bwd = scaled.direction_backward.ratio_sup / base.direction_backward.ratio_sup;
        prop_assert!((fwd / c - 1.0).abs() < 1e-9, "forward scaled by {fwd}, expected {c}");
        prop_assert!((bwd / c.sqrt() - 1.0).abs() < 1e-9, "backward scaled by {bwd}, expected {}", c.sqrt());
        prop_assert_eq!(scaled.verdict, base.verdict);
    }
}
