//! Spherical transform, its inverse, and the physical-space spherical mean.

use std::f64::consts::{PI, SQRT_2};

use serde::Serialize;

use super::profile::{Physical, PhysicalSide, RadialProfile, Spectrum};
use super::{SpaceKind, SpectralSpace};
use crate::error::{Error, Result};
use crate::quad::{self, Estimate, GaussLegendre, PanelRule};
use crate::special::unit_sphere_area;

const TRUNCATION_TOL: f64 = 1e-17;

/// `f̂` sampled at the Gauss–Legendre nodes of panels covering `[0, Λ]`,
/// together with the matching quadrature weights.
#[derive(Debug, Clone, Serialize)]
pub struct SpectralSamples {
    pub edges: Vec<f64>,
    pub lambda: Vec<f64>,
    pub weight: Vec<f64>,
    pub value: Vec<f64>,
    pub error: Vec<f64>,
}

impl SpectralSamples {
    /// Appends samples whose panels start where these end.
    pub fn extend(&mut self, more: SpectralSamples) {
        if self.edges.is_empty() {
            *self = more;
            return;
        }
        self.edges.extend(more.edges.into_iter().skip(1));
        self.lambda.extend(more.lambda);
        self.weight.extend(more.weight);
        self.value.extend(more.value);
        self.error.extend(more.error);
    }

    /// Builds samples from arbitrary values at the nodes of `edges`.
    pub fn from_fn(edges: Vec<f64>, mut f: impl FnMut(f64) -> f64) -> Self {
        let g = GaussLegendre::order16();
        let mut lambda = Vec::new();
        let mut weight = Vec::new();
        for w in edges.windows(2) {
            for (x, wt) in g.mapped(w[0], w[1]) {
                lambda.push(x);
                weight.push(wt);
            }
        }
        let value = lambda.iter().map(|&l| f(l)).collect();
        let error = vec![0.0; lambda.len()];
        Self {
            edges,
            lambda,
            weight,
            value,
            error,
        }
    }
}

/// `f̂(λ) = ∫₀^∞ f(t) φ_λ(t) A(t) dt` on a grid of `λ ≥ 0`.
///
/// On `H²` the transform is taken through the Abel transform
/// `f̂(λ) = 2√2 ∫₀^∞ cos(λs) Q(s) ds`, `Q(s) = ∫_s^∞ f(t) sinh t / √(cosh t − cosh s) dt`,
/// which is algebraically the same integral with the order of integration in
/// Mehler's formula exchanged.
pub fn spherical_transform(space: &SpectralSpace, p: &Physical, lambda_grid: &[f64]) -> Result<Vec<Estimate>> {
    if lambda_grid.iter().any(|&l| !(l >= 0.0) || !l.is_finite()) {
        return Err(Error::Domain("transform grid needs finite λ ≥ 0".into()));
    }
    let radius = p.support_radius(space, TRUNCATION_TOL);
    if !matches!(p, Physical::Bump { .. }) {
        let envelope = p.value(radius).abs() * space.area_element(radius)?;
        if !(envelope.is_finite()) || radius >= 1e4 {
            return Err(Error::Decay(format!("profile does not decay within radius {radius}")));
        }
    }
    if space.kind == SpaceKind::Hyperbolic && space.dim_n == 2 {
        return abel_transform(p, radius, lambda_grid);
    }
    lambda_grid
        .iter()
        .map(|&lambda| {
            let width = (PI / lambda.max(1e-300)).min(0.25 * p.length_scale());
            let rule = PanelRule {
                max_width: width,
                rel_tol: 1e-12,
                ..PanelRule::default()
            };
            let mut failure = None;
            let est = quad::integrate(
                |t| {
                    if t == 0.0 {
                        return 0.0;
                    }
                    match (space.phi(lambda, t), space.area_element(t)) {
                        (Ok(phi), Ok(area)) => p.value(t) * phi * area,
                        (Err(e), _) | (_, Err(e)) => {
                            failure = Some(e);
                            0.0
                        }
                    }
                },
                0.0,
                radius,
                &p.breakpoints(),
                &rule,
            )?;
            match failure {
                Some(e) => Err(e),
                None => Ok(est),
            }
        })
        .collect()
}

/// `acosh(cosh s + u²)` without cancellation near the origin.
fn acosh_shift(s: f64, u: f64) -> f64 {
    let h = (0.5 * s).sinh();
    let y = 2.0 * h * h + u * u;
    (y + (y * (y + 2.0)).sqrt()).ln_1p()
}

fn abel_transform(p: &Physical, radius: f64, lambda_grid: &[f64]) -> Result<Vec<Estimate>> {
    let lambda_max = lambda_grid.iter().copied().fold(1.0, f64::max);
    let width = (0.25 * PI / lambda_max).min(radius / 64.0);
    let edges = quad::panel_edges(0.0, radius, &[], &PanelRule {
        max_width: width,
        ..PanelRule::default()
    });
    let q_rule = PanelRule {
        abs_tol: 1e-16,
        ..PanelRule::default().with_rel_tol(1e-14)
    };
    let cosh_r = radius.cosh();
    let g = GaussLegendre::order16();
    // Q on the nodes of the panels and of their halves.
    let mut coarse = Vec::new();
    let mut fine = Vec::new();
    let q = |s: f64| -> Result<f64> {
        let top = (cosh_r - s.cosh()).max(0.0).sqrt();
        let est = quad::integrate(|u| p.value(acosh_shift(s, u)), 0.0, top, &[], &q_rule)?;
        Ok(2.0 * est.value)
    };
    for w in edges.windows(2) {
        for (s, wt) in g.mapped(w[0], w[1]) {
            coarse.push((s, wt, q(s)?));
        }
        let m = 0.5 * (w[0] + w[1]);
        for (a, b) in [(w[0], m), (m, w[1])] {
            for (s, wt) in g.mapped(a, b) {
                fine.push((s, wt, q(s)?));
            }
        }
    }
    Ok(lambda_grid
        .iter()
        .map(|&lambda| {
            let sum = |nodes: &[(f64, f64, f64)]| -> f64 {
                nodes.iter().map(|&(s, wt, qv)| wt * (lambda * s).cos() * qv).sum::<f64>()
            };
            let a = 2.0 * SQRT_2 * sum(&coarse);
            let b = 2.0 * SQRT_2 * sum(&fine);
            Estimate::new(b, (a - b).abs())
        })
        .collect())
}

/// Transform samples on panels of width `width` covering `[0, lambda_max]`.
pub fn spectral_samples(space: &SpectralSpace, p: &Physical, lambda_max: f64, width: f64) -> Result<SpectralSamples> {
    samples_between(space, p, 0.0, lambda_max, width)
}

pub(super) fn samples_between(space: &SpectralSpace, p: &Physical, a: f64, b: f64, width: f64) -> Result<SpectralSamples> {
    let edges = quad::panel_edges(a, b, &[], &PanelRule {
        max_width: width,
        ..PanelRule::default()
    });
    let mut samples = SpectralSamples::from_fn(edges, |_| 0.0);
    let values = spherical_transform(space, p, &samples.lambda)?;
    samples.value = values.iter().map(|e| e.value).collect();
    samples.error = values.iter().map(|e| e.error).collect();
    Ok(samples)
}

/// `f(t) = c ∫ f̂(λ) φ_λ(t) dμ(λ)` by the quadrature carried by the samples.
///
/// Fails with a truncation error when the last panel contributes more than
/// `tol` (relative to the largest reconstructed value), since that signals
/// spectral mass beyond the cutoff.
pub fn inverse_transform(space: &SpectralSpace, samples: &SpectralSamples, t_grid: &[f64], tol: f64) -> Result<Vec<Estimate>> {
    let c = space.plancherel_normalization;
    let n = samples.lambda.len();
    let last_panel = n.saturating_sub(16);
    let mut out = Vec::with_capacity(t_grid.len());
    let mut tail = 0.0f64;
    for &t in t_grid {
        let mut sum = 0.0;
        let mut abs = 0.0;
        let mut last = 0.0;
        for i in 0..n {
            let term = samples.weight[i] * samples.value[i] * space.phi(samples.lambda[i], t)? * space.spectral_measure(samples.lambda[i]);
            sum += term;
            abs += term.abs();
            if i >= last_panel {
                last += term.abs();
            }
        }
        tail = tail.max(c * last);
        out.push(Estimate::new(c * sum, c * (last + 1e-15 * abs)));
    }
    let scale = out.iter().map(|e| e.value.abs()).fold(0.0, f64::max);
    if tail > tol * scale.max(f64::MIN_POSITIVE) {
        return Err(Error::Truncation(format!(
            "last spectral panel contributes {tail:e}, above {tol:e} of the reconstruction"
        )));
    }
    Ok(out)
}

/// `‖f‖² = ∫₀^∞ f(t)² A(t) dt`.
pub fn physical_norm_squared(space: &SpectralSpace, p: &Physical) -> Result<Estimate> {
    let radius = p.support_radius(space, TRUNCATION_TOL);
    let rule = PanelRule {
        max_width: 0.125 * p.length_scale(),
        rel_tol: 1e-13,
        ..PanelRule::default()
    };
    quad::integrate(
        |t| {
            if t == 0.0 {
                0.0
            } else {
                p.value(t).powi(2) * space.area_element(t).unwrap_or(0.0)
            }
        },
        0.0,
        radius,
        &p.breakpoints(),
        &rule,
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Calibration {
    /// Normalization derived in closed form for the backend.
    pub reference: f64,
    /// `‖f‖² / ∫ |f̂|² m dλ` for the calibration profile.
    pub measured: f64,
    pub rel_error: f64,
    pub profile: Physical,
}

/// The calibration profile of a backend: the Gaussian `e^{−t²/2}` on `ℝⁿ`,
/// the bump of radius 1.5 on `Hⁿ`.
pub fn calibration_profile(space: &SpectralSpace) -> Physical {
    match space.kind {
        SpaceKind::Euclidean => Physical::Gaussian { a: 0.5 },
        SpaceKind::Hyperbolic => Physical::Bump { radius: 1.5 },
    }
}

/// Measures the Plancherel normalization by a round trip of the calibration
/// profile and compares it with the closed-form constant stored in the space.
pub fn calibrate(space: &SpectralSpace) -> Result<Calibration> {
    let p = calibration_profile(space);
    let norm2 = physical_norm_squared(space, &p)?.value;
    let width = (0.25 * PI / p.support_radius(space, TRUNCATION_TOL)).min(0.5);
    let mut lambda_max = 8.0;
    let mut previous = f64::NAN;
    let mut energy = 0.0;
    let mut covered = 0.0;
    loop {
        let s = samples_between(space, &p, covered, lambda_max, width)?;
        energy += (0..s.lambda.len())
            .map(|i| s.weight[i] * s.value[i].powi(2) * space.spectral_measure(s.lambda[i]))
            .sum::<f64>();
        covered = lambda_max;
        if (energy - previous).abs() <= 1e-13 * energy {
            let measured = norm2 / energy;
            let reference = space.plancherel_normalization;
            return Ok(Calibration {
                reference,
                measured,
                rel_error: (measured - reference).abs() / reference,
                profile: p,
            });
        }
        if lambda_max > 1024.0 {
            return Err(Error::Decay("calibration spectrum does not settle below λ = 1024".into()));
        }
        previous = energy;
        lambda_max *= 2.0;
    }
}

fn sphere_average(space: &SpectralSpace, p: &Physical, r: f64, t: f64) -> Result<f64> {
    let rule = PanelRule::default().with_rel_tol(1e-13);
    let crossing = |radius: f64| -> Vec<f64> {
        if r * t == 0.0 {
            return vec![];
        }
        let c = (radius * radius - r * r - t * t) / (2.0 * r * t);
        if c.abs() < 1.0 {
            vec![c]
        } else {
            vec![]
        }
    };
    let kinks: Vec<f64> = match *p {
        Physical::Bump { radius } => crossing(radius),
        _ => vec![],
    };
    match space.dim_n {
        1 => Ok(0.5 * (p.increment(r, t * t + 2.0 * r * t) + p.increment(r, t * t - 2.0 * r * t))),
        2 => {
            let breaks: Vec<f64> = kinks.iter().map(|c| c.acos()).collect();
            let est = quad::integrate(|th| p.increment(r, t * t + 2.0 * r * t * th.cos()), 0.0, PI, &breaks, &rule)?;
            Ok(est.value / PI)
        }
        3 => {
            let est = quad::integrate(|c| p.increment(r, t * t + 2.0 * r * t * c), -1.0, 1.0, &kinks, &rule)?;
            Ok(0.5 * est.value)
        }
        n => Err(Error::UnsupportedDimension(n)),
    }
}

fn require_low_euclidean(space: &SpectralSpace) -> Result<()> {
    if space.kind != SpaceKind::Euclidean {
        return Err(Error::Inapplicable("direct spherical means are implemented on ℝⁿ only".into()));
    }
    if !(1..=3).contains(&space.dim_n) {
        return Err(Error::UnsupportedDimension(space.dim_n));
    }
    Ok(())
}

/// `S^t f(x)`: the average of `f` over the sphere of radius `t` about a point
/// at distance `x_norm` from the origin.
pub fn spherical_mean_direct(space: &SpectralSpace, p: &Physical, x_norm: f64, t: f64) -> Result<f64> {
    require_low_euclidean(space)?;
    if !(t > 0.0) || !(x_norm >= 0.0) {
        return Err(Error::Domain(format!("spherical mean needs t > 0, |x| ≥ 0 (t = {t})")));
    }
    Ok(p.value(x_norm) + sphere_average(space, p, x_norm, t)?)
}

/// `‖S^t f − f‖₂` by physical-space quadrature of the sphere averages.
pub fn physical_lipschitz(space: &SpectralSpace, p: &Physical, t: f64) -> Result<Estimate> {
    require_low_euclidean(space)?;
    if !(t > 0.0) {
        return Err(Error::Domain(format!("translation needs t > 0, got {t}")));
    }
    let radius = p.support_radius(space, TRUNCATION_TOL) + t;
    let mut breaks = p.breakpoints();
    if let Physical::Bump { radius: r0 } = *p {
        breaks.extend([r0 - t, r0 + t]);
    }
    // the averaged increments carry relative rounding noise of order ε/t
    let rule = PanelRule {
        max_width: 0.125 * p.length_scale(),
        rel_tol: (64.0 * f64::EPSILON / t).max(1e-12),
        ..PanelRule::default()
    };
    let exponent = space.dim_n as i32 - 1;
    let mut failure = None;
    let est = quad::integrate(
        |r| match sphere_average(space, p, r, t) {
            Ok(d) => d * d * r.powi(exponent),
            Err(e) => {
                failure = Some(e);
                0.0
            }
        },
        0.0,
        radius,
        &breaks,
        &rule,
    )?;
    if let Some(e) = failure {
        return Err(e);
    }
    let sigma = unit_sphere_area(space.dim_n);
    let value = (sigma * est.value).sqrt();
    let error = if value > 0.0 { sigma * est.error / (2.0 * value) } else { (sigma * est.error).sqrt() };
    Ok(Estimate::new(value, error))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlancherelReport {
    pub space: String,
    pub profile: Physical,
    pub physical_norm_squared: f64,
    /// `∫ H dμ` with `H = c |f̂|²`.
    pub spectral_norm_squared: f64,
    pub norm_rel_error: f64,
    /// Largest `|f_rec − f|` over the test radii, relative to `max |f|`.
    pub round_trip_rel_error: f64,
    pub round_trip_t: Vec<f64>,
    pub calibration: Calibration,
}

/// Norm equality and a sampled round trip `f → f̂ → f` for a physical profile.
pub fn plancherel_check(space: &SpectralSpace, p: &Physical) -> Result<PlancherelReport> {
    let norm2 = physical_norm_squared(space, p)?.value;
    let spec = Spectrum::new(space, &RadialProfile::from_physical(*p)?)?;
    let (_, lambda_max) = spec.support();
    let rule = PanelRule::oscillatory(0.25 * lambda_max.min(8.0)).with_rel_tol(1e-13);
    let spectral = quad::integrate(
        |l| spec.h(l) * space.spectral_measure(l),
        0.0,
        lambda_max,
        &spec.breakpoints(),
        &rule,
    )?
    .value;
    let radius = p.support_radius(space, TRUNCATION_TOL);
    let reach = radius.min(4.0 * p.length_scale());
    // cell midpoints: profiles with a cusp at the origin invert slowly there
    let ts: Vec<f64> = (0..16).map(|i| reach * (i as f64 + 0.5) / 16.0).collect();
    let width = (0.25 * PI / reach).min(0.5);
    let samples = if spec.analytic_side == PhysicalSide::Both {
        // closed-form f̂ = √(H/c), cut where the remaining energy is negligible
        let mut cut = 16.0f64;
        while cut < lambda_max {
            let beyond = quad::integrate(
                |l| spec.h(l) * space.spectral_measure(l),
                cut,
                lambda_max,
                &spec.breakpoints(),
                &rule,
            )?;
            if beyond.value <= 1e-14 * norm2 {
                break;
            }
            cut *= 2.0;
        }
        let edges = quad::panel_edges(0.0, cut.min(lambda_max), &[], &PanelRule {
            max_width: width,
            ..PanelRule::default()
        });
        let c = space.plancherel_normalization;
        SpectralSamples::from_fn(edges, |l| (spec.h(l) / c).sqrt())
    } else {
        spectral_samples(space, p, lambda_max, width)?
    };
    let back = inverse_transform(space, &samples, &ts, 1e-5)?;
    let peak = ts.iter().map(|&t| p.value(t).abs()).fold(0.0, f64::max);
    let worst = back
        .iter()
        .zip(&ts)
        .map(|(e, &t)| (e.value - p.value(t)).abs())
        .fold(0.0, f64::max);
    Ok(PlancherelReport {
        space: space.label(),
        profile: *p,
        physical_norm_squared: norm2,
        spectral_norm_squared: spectral,
        norm_rel_error: (spectral - norm2).abs() / norm2,
        round_trip_rel_error: worst / peak,
        round_trip_t: ts,
        calibration: calibrate(space)?,
    })
}
