//! End-to-end inequalities between the functionals, checked numerically.

use std::f64::consts::PI;

use lipfourier::functionals::{
    dyadic_grid, j_split, lipschitz_curve, lipschitz_squared, physical_lipschitz_curve, tail_value, weighted_tail,
    FunctionalOptions,
};
use lipfourier::spaces::{RadialProfile, SpaceKind, SpectralForm, SpectralSpace, Spectrum};

fn spaces() -> Vec<SpectralSpace> {
    vec![
        SpectralSpace::euclidean(2).unwrap(),
        SpectralSpace::euclidean(3).unwrap(),
        SpectralSpace::hyperbolic(2).unwrap(),
        SpectralSpace::hyperbolic(3).unwrap(),
    ]
}

/// Smallest `1 − φ_λ(t)` over `λt ∈ [1, 2^12]`, sampled densely.
fn gap_floor(space: &SpectralSpace, t: f64) -> f64 {
    (0..=12 * 64)
        .map(|i| 2f64.powf(i as f64 / 64.0) / t)
        .map(|lambda| space.gap(lambda, t).unwrap())
        .fold(f64::INFINITY, f64::min)
}

/// `m(λ) ≥ t^{1−n}` for `λ ≥ 1/t`, except on `H²` where `tanh(πλ) < 1`.
fn measure_floor(space: &SpectralSpace, t: f64) -> f64 {
    let base = t.powi(1 - space.dim_n as i32);
    if space.kind == SpaceKind::Hyperbolic && space.dim_n == 2 {
        base * (PI / t).tanh()
    } else {
        base
    }
}

#[test]
fn tail_is_controlled_by_the_lipschitz_functional() {
    let opts = FunctionalOptions::default();
    for space in spaces() {
        for alpha in [0.5, 1.0, 1.5] {
            let p = RadialProfile::power(alpha, space.dim_n).unwrap();
            let spec = Spectrum::new(&space, &p).unwrap();
            for t in dyadic_grid(0.5, 12) {
                let tail = tail_value(&spec, t, &opts).unwrap().value;
                let weighted = weighted_tail(&spec, t, &opts).unwrap().value;
                // flat tail ≤ weighted tail / inf m
                assert!(
                    tail * measure_floor(&space, t) <= weighted * (1.0 + 1e-9),
                    "{} α={alpha} t={t:e}: T={tail}, W={weighted}",
                    space.label()
                );
                // (1 − φ)² ≥ C² where λt ≥ 1, so C²·W ≤ J₂ ≤ L²
                let c = gap_floor(&space, t);
                let js = j_split(&spec, t, &opts).unwrap();
                let l2 = lipschitz_squared(&spec, t, &opts).unwrap().value;
                assert!(c * c * weighted <= js.j2.value * (1.0 + 1e-6), "{} t={t:e}", space.label());
                assert!(js.j2.value <= l2 * (1.0 + 1e-9));
            }
        }
    }
}

#[test]
fn lipschitz_functional_vanishes_at_zero() {
    let opts = FunctionalOptions::default();
    let grid = dyadic_grid(0.5, 20);
    let profiles = [
        RadialProfile::gaussian(0.5).unwrap(),
        RadialProfile::from_spectral(SpectralForm::Bump { center: 3.0, width: 2.0, height: 1.0 }).unwrap(),
    ];
    for space in spaces() {
        for p in &profiles {
            let spec = Spectrum::new(&space, p).unwrap();
            let curve = lipschitz_curve(&spec, &grid, &opts).unwrap();
            let (first, last) = (curve.values[0], *curve.values.last().unwrap());
            assert!(first > 0.0);
            assert!(last <= 1e-3 * first, "{}: L(t_J) = {last}, L(t_0) = {first}", space.label());
        }
    }
}

#[test]
fn spectral_and_physical_routes_agree() {
    let opts = FunctionalOptions::default();
    let grid = dyadic_grid(0.5, 10);
    for space in [
        SpectralSpace::euclidean(1).unwrap(),
        SpectralSpace::euclidean(2).unwrap(),
        SpectralSpace::euclidean(3).unwrap(),
    ] {
        let spec = Spectrum::new(&space, &RadialProfile::gaussian(0.5).unwrap()).unwrap();
        let spectral = lipschitz_curve(&spec, &grid, &opts).unwrap();
        let physical = physical_lipschitz_curve(&spec, &grid).unwrap();
        for (i, t) in grid.iter().enumerate() {
            let rel = (spectral.values[i] - physical.values[i]).abs() / spectral.values[i];
            assert!(rel < 1e-8, "{} t={t:e}: {} vs {}", space.label(), spectral.values[i], physical.values[i]);
        }
    }
}
