//! Spectral backends for radial analysis on `ℝⁿ` and on the real hyperbolic
//! spaces `H²`, `H³`.
//!
//! Conventions used throughout the crate:
//!
//! * the spherical transform of a radial `f` is `f̂(λ) = ∫₀^∞ f(t) φ_λ(t) A(t) dt`
//!   with `A` the [`area_element`](SpectralSpace::area_element);
//! * the spectral measure is `dμ(λ) = m(λ) dλ` with `m(λ) = λ^{n−1}` (Euclidean),
//!   `λ²` (`H³`) or `λ tanh(πλ)` (`H²`), see [`SpectralSpace::spectral_measure`];
//! * inversion reads `f(t) = c ∫ f̂(λ) φ_λ(t) dμ(λ)` where `c` is the
//!   Plancherel normalization, so `‖f‖² = ∫ H dμ` with `H = c |f̂|²`.

mod profile;
mod transform;

pub use profile::{bundled_profiles, BundledProfile, Physical, PhysicalSide, ProfileDescriptor, RadialProfile, SpaceDescriptor, SpectralForm, Spectrum};
pub use transform::{
    calibrate, calibration_profile, inverse_transform, plancherel_check, physical_lipschitz, physical_norm_squared, spectral_samples, spherical_mean_direct,
    spherical_transform, Calibration, PlancherelReport, SpectralSamples,
};

use std::f64::consts::{FRAC_PI_2, PI, SQRT_2};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::quad::GaussLegendre;
use crate::special::{normalized_bessel, normalized_bessel_gap, unit_sphere_area};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SpaceKind {
    Euclidean,
    Hyperbolic,
}

/// A rank-one space descriptor: `ℝⁿ` (any `n ≥ 1`) or `Hⁿ` with `n ∈ {2, 3}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectralSpace {
    pub kind: SpaceKind,
    pub dim_n: usize,
    pub rho: f64,
    pub plancherel_normalization: f64,
}

impl SpectralSpace {
    pub fn euclidean(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::UnsupportedDimension(n));
        }
        let c = unit_sphere_area(n) / (2.0 * PI).powi(n as i32);
        Ok(Self {
            kind: SpaceKind::Euclidean,
            dim_n: n,
            rho: 0.0,
            plancherel_normalization: c,
        })
    }

    pub fn hyperbolic(n: usize) -> Result<Self> {
        let c = match n {
            2 => 1.0 / (2.0 * PI),
            3 => 1.0 / (2.0 * PI * PI),
            _ => return Err(Error::UnsupportedDimension(n)),
        };
        Ok(Self {
            kind: SpaceKind::Hyperbolic,
            dim_n: n,
            rho: 0.5 * (n as f64 - 1.0),
            plancherel_normalization: c,
        })
    }

    pub fn is_euclidean(&self) -> bool {
        self.kind == SpaceKind::Euclidean
    }

    pub fn label(&self) -> String {
        match self.kind {
            SpaceKind::Euclidean => format!("R^{}", self.dim_n),
            SpaceKind::Hyperbolic => format!("H^{}", self.dim_n),
        }
    }

    fn bessel_order(&self) -> f64 {
        0.5 * (self.dim_n as f64 - 2.0)
    }

    fn check_args(lambda: f64, t: f64) -> Result<()> {
        if !(lambda >= 0.0) || !(t >= 0.0) || !lambda.is_finite() || !t.is_finite() {
            return Err(Error::Domain(format!("φ_λ(t) needs finite λ, t ≥ 0 (λ = {lambda}, t = {t})")));
        }
        Ok(())
    }

    /// The spherical function `φ_λ(t)`.
    pub fn phi(&self, lambda: f64, t: f64) -> Result<f64> {
        Self::check_args(lambda, t)?;
        if t == 0.0 {
            return Ok(1.0);
        }
        Ok(match (self.kind, self.dim_n) {
            (SpaceKind::Euclidean, _) => normalized_bessel(self.bessel_order(), lambda * t),
            (SpaceKind::Hyperbolic, 3) => h3_phi(lambda, t),
            _ => h2_phi(lambda, t),
        })
    }

    /// `1 − φ_λ(t)`, accurate also where `φ_λ(t)` is close to 1.
    pub fn gap(&self, lambda: f64, t: f64) -> Result<f64> {
        Self::check_args(lambda, t)?;
        if t == 0.0 {
            return Ok(0.0);
        }
        Ok(match (self.kind, self.dim_n) {
            (SpaceKind::Euclidean, _) => normalized_bessel_gap(self.bessel_order(), lambda * t),
            (SpaceKind::Hyperbolic, 3) => h3_gap(lambda, t),
            _ if h2_asymptotic_applies(lambda, t) => 1.0 - h2_asymptotic(lambda, t),
            _ => h2_integral(lambda, t, true),
        })
    }

    /// Density `m(λ)` of the spectral measure `dμ = m(λ) dλ`, without the
    /// Plancherel normalization.
    pub fn spectral_measure(&self, lambda: f64) -> f64 {
        match (self.kind, self.dim_n) {
            (SpaceKind::Euclidean, n) => lambda.powi(n as i32 - 1),
            (SpaceKind::Hyperbolic, 3) => lambda * lambda,
            _ => lambda * (PI * lambda).tanh(),
        }
    }

    /// `c · m(λ)`: the Plancherel density including its normalization.
    pub fn plancherel_density(&self, lambda: f64) -> Result<f64> {
        if !(lambda >= 0.0) {
            return Err(Error::Domain(format!("Plancherel density at λ = {lambda}")));
        }
        Ok(self.plancherel_normalization * self.spectral_measure(lambda))
    }

    /// `|σ| t^{n−1}` (Euclidean) or `|σ| sinh^{n−1} t` (hyperbolic).
    pub fn area_element(&self, t: f64) -> Result<f64> {
        if !(t > 0.0) {
            return Err(Error::Domain(format!("area element needs t > 0, got {t}")));
        }
        let sigma = unit_sphere_area(self.dim_n);
        let exponent = self.dim_n as i32 - 1;
        Ok(match self.kind {
            SpaceKind::Euclidean => sigma * t.powi(exponent),
            SpaceKind::Hyperbolic => sigma * t.sinh().powi(exponent),
        })
    }

    /// Grid suprema and infima of the three spherical-function estimates.
    pub fn lemma_estimates(&self, lambda_grid: &[f64], t_grid: &[f64]) -> Result<LemmaEstimates> {
        if lambda_grid.iter().chain(t_grid).any(|&x| !(x > 0.0) || !x.is_finite()) {
            return Err(Error::Parameter("lemma grids must be positive and finite".into()));
        }
        let rho2 = self.rho * self.rho;
        let mut out = LemmaEstimates {
            max_abs_phi: 0.0,
            worst_quadratic_ratio: 0.0,
            min_gap_constant: f64::INFINITY,
            min_gap_at: (f64::NAN, f64::NAN),
        };
        for &t in t_grid {
            for &lambda in lambda_grid {
                let phi = self.phi(lambda, t)?;
                let gap = self.gap(lambda, t)?;
                out.max_abs_phi = out.max_abs_phi.max(phi.abs());
                let quad = t * t * (lambda * lambda + rho2);
                out.worst_quadratic_ratio = out.worst_quadratic_ratio.max(gap / quad);
                if lambda * t >= 1.0 && gap < out.min_gap_constant {
                    out.min_gap_constant = gap;
                    out.min_gap_at = (lambda, t);
                }
            }
        }
        Ok(out)
    }

    /// Multiplies `H(λ)` by `(1 − φ_λ(t))²`, the spectral symbol of `S^t f − f`.
    pub fn translate_spectral(&self, h_values: &[(f64, f64)], t: f64) -> Result<Vec<(f64, f64)>> {
        if !(t > 0.0) {
            return Err(Error::Domain(format!("translation needs t > 0, got {t}")));
        }
        h_values
            .iter()
            .map(|&(lambda, h)| {
                let g = self.gap(lambda, t)?;
                Ok((lambda, g * g * h))
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LemmaEstimates {
    pub max_abs_phi: f64,
    pub worst_quadratic_ratio: f64,
    /// Minimum of `1 − φ_λ(t)` over grid pairs with `λt ≥ 1`.
    pub min_gap_constant: f64,
    pub min_gap_at: (f64, f64),
}

/// `x − sin x` without cancellation for small `x`.
fn x_minus_sin(x: f64) -> f64 {
    if x.abs() >= 1.0 {
        return x - x.sin();
    }
    let x2 = x * x;
    let mut term = x * x2 / 6.0;
    let mut sum = term;
    let mut k = 3.0;
    while term.abs() > 1e-17 * sum.abs() {
        term *= -x2 / ((k + 1.0) * (k + 2.0));
        sum += term;
        k += 2.0;
    }
    sum
}

/// `sinh x − x` without cancellation for small `x`.
fn sinh_minus_x(x: f64) -> f64 {
    if x.abs() >= 1.0 {
        return x.sinh() - x;
    }
    let x2 = x * x;
    let mut term = x * x2 / 6.0;
    let mut sum = term;
    let mut k = 3.0;
    while term.abs() > 1e-17 * sum.abs() {
        term *= x2 / ((k + 1.0) * (k + 2.0));
        sum += term;
        k += 2.0;
    }
    sum
}

const SINH_OVERFLOW: f64 = 700.0;

fn h3_phi(lambda: f64, t: f64) -> f64 {
    if t > SINH_OVERFLOW {
        return 0.0;
    }
    let x = lambda * t;
    let sinc = if x < 1e-4 { 1.0 - x * x / 6.0 } else { x.sin() / x };
    sinc * t / t.sinh()
}

fn h3_gap(lambda: f64, t: f64) -> f64 {
    if t > SINH_OVERFLOW {
        return 1.0;
    }
    let s = t.sinh();
    if lambda == 0.0 {
        return sinh_minus_x(t) / s;
    }
    (lambda * sinh_minus_x(t) + x_minus_sin(lambda * t)) / (lambda * s)
}

/// Mehler's representation on `H²`,
fn h2_phi(lambda: f64, t: f64) -> f64 {
    if h2_asymptotic_applies(lambda, t) {
        h2_asymptotic(lambda, t)
    } else {
        h2_integral(lambda, t, false)
    }
}

/// Threshold on `λ · min(t, π)` above which the endpoint expansion is used.
const H2_ASYMPTOTIC_FROM: f64 = 32.0;

fn h2_asymptotic_applies(lambda: f64, t: f64) -> bool {
    lambda * t.min(PI) >= H2_ASYMPTOTIC_FROM
}

/// Large-`λ` expansion of the Mehler integral at its singular endpoint.
///
/// With `u = t − s`, `(cosh t − cosh s)^{−1/2} = u^{−1/2} Σ h_k u^k`, and the
/// smooth even endpoint `s = 0` contributes nothing, so
/// `φ ~ (√2/π) Re[e^{iλt} Σ h_k Γ(k+½) (iλ)^{−k−½}]`. The series in `u` has
/// radius `min(2t, 2π)`; terms are summed until they stop decreasing.
fn h2_asymptotic(lambda: f64, t: f64) -> f64 {
    const TERMS: usize = 64;
    // coefficients in the scaled variable v = u/t
    let (sh, ch) = (t.sinh(), t.cosh());
    let mut a = [0.0f64; TERMS];
    let mut fact = 1.0;
    let mut tk = 1.0;
    for (k, ak) in a.iter_mut().enumerate() {
        fact *= (k + 1) as f64;
        let c = if k % 2 == 0 { sh } else { ch };
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        *ak = sign * c / fact * tk;
        tk *= t;
    }
    // B = A^{−1/2}: k a₀ B_k = Σ_{j=1}^{k} ((p+1) j − k) a_j B_{k−j}, p = −1/2
    let mut b = [0.0f64; TERMS];
    b[0] = a[0].powf(-0.5);
    for k in 1..TERMS {
        let mut acc = 0.0;
        for j in 1..=k {
            acc += (0.5 * j as f64 - k as f64) * a[j] * b[k - j];
        }
        b[k] = acc / (k as f64 * a[0]);
    }
    let x = lambda * t;
    let phase = lambda * t - 0.25 * PI;
    let mut sum_re = 0.0;
    let mut sum_im = 0.0;
    // Γ(k+½)/x^k, starting from Γ(½) = √π
    let mut g = PI.sqrt();
    let mut previous = f64::INFINITY;
    for (k, bk) in b.iter().enumerate() {
        let term = bk * g;
        if term.abs() > previous {
            break;
        }
        previous = term.abs();
        // (−i)^k
        let (re, im) = match k % 4 {
            0 => (term, 0.0),
            1 => (0.0, -term),
            2 => (-term, 0.0),
            _ => (0.0, term),
        };
        sum_re += re;
        sum_im += im;
        g *= (k as f64 + 0.5) / x;
    }
    let (sp, cp) = phase.sin_cos();
    SQRT_2 / PI * lambda.powf(-0.5) * (cp * sum_re - sp * sum_im)
}

/// `φ_λ(t) = (√2/π) ∫₀ᵗ cos(λs) / √(cosh t − cosh s) ds`, after `s = t cos ψ`.
///
/// With `gap = true` the numerator is replaced by `cosh(s/2) − cos(λs)`,
/// using that `φ_{i/2} ≡ 1`; both parts are nonnegative so `1 − φ` keeps full
/// relative accuracy near `t = 0`.
fn h2_integral(lambda: f64, t: f64, gap: bool) -> f64 {
    let g = GaussLegendre::order16();
    let edges = h2_edges(lambda, t);
    let mut sum = 0.0;
    for w in edges.windows(2) {
        for (psi, wt) in g.mapped(w[0], w[1]) {
            let (half_s, half_c) = (0.5 * psi).sin_cos();
            let a = t * half_c * half_c;
            let b = t * half_s * half_s;
            // √(cosh t − cosh s) = e^{t/2} √((1 − e^{−2a})(1 − e^{−2b}) / 2)
            let root = (0.5 * (-2.0 * a).exp_m1() * (-2.0 * b).exp_m1()).sqrt();
            let weight = t * psi.sin() / root;
            let s = t * psi.cos();
            let num = if gap {
                let u = (0.25 * s).sinh();
                let v = (0.5 * lambda * s).sin();
                2.0 * (u * u + v * v)
            } else {
                (lambda * s).cos()
            };
            sum += wt * num * weight;
        }
    }
    SQRT_2 / PI * sum * (-0.5 * t).exp()
}

/// Panels in `ψ ∈ [0, π/2]`: one per half period of `cos(λ t cos ψ)`, plus a
/// graded cluster at the scale `ψ ~ t^{−1/2}` where `sinh(t sin²(ψ/2))` turns over.
fn h2_edges(lambda: f64, t: f64) -> Vec<f64> {
    let osc = (lambda.max(0.5) * t / PI).ceil().max(2.0) as usize;
    let mut edges: Vec<f64> = (0..=osc).map(|i| FRAC_PI_2 * i as f64 / osc as f64).collect();
    if t > 2.0 {
        let scale = (2.0 / t).sqrt();
        let mut x = 0.125 * scale;
        while x < FRAC_PI_2 {
            edges.push(x);
            x *= 2.0;
        }
        edges.sort_by(f64::total_cmp);
        edges.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    }
    edges
}
