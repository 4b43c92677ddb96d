use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::transform::{physical_norm_squared, samples_between, spectral_samples};
use super::{SpaceKind, SpectralSpace};
use crate::error::{Error, Result};
use crate::quad::GaussLegendre;

/// Closed-form radial functions `f(t)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "physical", rename_all = "snake_case")]
pub enum Physical {
    /// `e^{−a t²}`
    Gaussian { a: f64 },
    /// `e^{−a t²} · t/sinh t`, whose `H³` transform is Gaussian.
    JacobiGaussian { a: f64 },
    /// `e^{−a t} · t/sinh t`, whose `H³` transform is rational.
    JacobiExponential { a: f64 },
    /// `(1 − (t/R)²)⁴` on `[0, R)`, zero beyond.
    Bump { radius: f64 },
}

fn t_over_sinh(t: f64) -> f64 {
    if t < 1e-8 {
        1.0
    } else if t > 700.0 {
        0.0
    } else {
        t / t.sinh()
    }
}

impl Physical {
    fn validate(&self) -> Result<()> {
        let p = match *self {
            Physical::Gaussian { a } | Physical::JacobiGaussian { a } | Physical::JacobiExponential { a } => a,
            Physical::Bump { radius } => radius,
        };
        if !(p > 0.0) || !p.is_finite() {
            return Err(Error::Parameter(format!("profile parameter must be positive, got {p}")));
        }
        Ok(())
    }

    pub fn value(&self, t: f64) -> f64 {
        match *self {
            Physical::Gaussian { a } => (-a * t * t).exp(),
            Physical::JacobiGaussian { a } => (-a * t * t).exp() * t_over_sinh(t),
            Physical::JacobiExponential { a } => (-a * t).exp() * t_over_sinh(t),
            Physical::Bump { radius } => {
                let x = t / radius;
                if x >= 1.0 {
                    0.0
                } else {
                    (1.0 - x * x).powi(4)
                }
            }
        }
    }

    /// `f(√(r² + δ)) − f(r)`, exact to rounding for the Gaussian.
    pub fn increment(&self, r: f64, delta: f64) -> f64 {
        match *self {
            Physical::Gaussian { a } => (-a * r * r).exp() * (-a * delta).exp_m1(),
            _ => self.value((r * r + delta).max(0.0).sqrt()) - self.value(r),
        }
    }

    /// Radius beyond which `|f| · φ₀ · A` (with `φ₀` the zero-frequency
    /// spherical function bounding every `|φ_λ|`) stays below `tol`.
    pub fn support_radius(&self, space: &SpectralSpace, tol: f64) -> f64 {
        if let Physical::Bump { radius } = *self {
            return radius;
        }
        let envelope = |t: f64| {
            let bound = match space.kind {
                SpaceKind::Euclidean => 1.0,
                SpaceKind::Hyperbolic => space.phi(0.0, t).unwrap_or(1.0).abs(),
            };
            self.value(t).abs() * bound * space.area_element(t).unwrap_or(0.0) * (1.0 + t)
        };
        let mut t = 1.0;
        while t < 1e4 {
            if envelope(t) < tol && envelope(1.5 * t) < tol && envelope(2.0 * t) < tol {
                return t;
            }
            t *= 1.25;
        }
        t
    }

    /// Characteristic length used to size quadrature panels.
    pub fn length_scale(&self) -> f64 {
        match *self {
            Physical::Gaussian { a } | Physical::JacobiGaussian { a } => 1.0 / a.sqrt(),
            Physical::JacobiExponential { a } => 1.0 / a.max(1.0),
            Physical::Bump { radius } => radius,
        }
    }

    pub fn breakpoints(&self) -> Vec<f64> {
        match *self {
            Physical::Bump { radius } => vec![radius],
            _ => vec![],
        }
    }
}

/// Closed-form spectral energy densities `H(λ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "spectral", rename_all = "snake_case")]
pub enum SpectralForm {
    Zero,
    /// `scale · λ^{−exponent}` for `λ ≥ lambda0`, zero below.
    Power { scale: f64, exponent: f64, lambda0: f64 },
    /// `height · (1 − ((λ − center)/width)²)⁴` on `|λ − center| < width`.
    Bump { center: f64, width: f64, height: f64 },
    /// `scale · e^{−λ²/s}`
    Gaussian { scale: f64, s: f64 },
    /// `scale / (a² + λ²)⁴`
    Rational { scale: f64, a: f64 },
}

impl SpectralForm {
    /// `λ^{−(2α+n)}` on `[1, ∞)`, the exact power profile for `ω(t) = t^α`.
    pub fn power_for(alpha: f64, n: usize) -> Self {
        SpectralForm::Power {
            scale: 1.0,
            exponent: 2.0 * alpha + n as f64,
            lambda0: 1.0,
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = match *self {
            SpectralForm::Zero => true,
            SpectralForm::Power { scale, exponent, lambda0 } => {
                scale >= 0.0 && exponent.is_finite() && lambda0 > 0.0 && scale.is_finite()
            }
            SpectralForm::Bump { center, width, height } => width > 0.0 && center >= 0.0 && height >= 0.0,
            SpectralForm::Gaussian { scale, s } => scale >= 0.0 && s > 0.0,
            SpectralForm::Rational { scale, a } => scale >= 0.0 && a > 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Parameter(format!("invalid spectral profile {self:?}")))
        }
    }

    fn value(&self, lambda: f64) -> f64 {
        match *self {
            SpectralForm::Zero => 0.0,
            SpectralForm::Power { scale, exponent, lambda0 } => {
                if lambda >= lambda0 {
                    scale * lambda.powf(-exponent)
                } else {
                    0.0
                }
            }
            SpectralForm::Bump { center, width, height } => {
                let x = (lambda - center) / width;
                if x.abs() >= 1.0 {
                    0.0
                } else {
                    height * (1.0 - x * x).powi(4)
                }
            }
            SpectralForm::Gaussian { scale, s } => scale * (-lambda * lambda / s).exp(),
            SpectralForm::Rational { scale, a } => scale / (a * a + lambda * lambda).powi(4),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PhysicalSide {
    Physical,
    Spectral,
    Both,
}

/// A radial test function given on either or both sides of the transform.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RadialProfile {
    pub physical: Option<Physical>,
    pub spectral: Option<SpectralForm>,
    pub analytic_side: PhysicalSide,
}

impl RadialProfile {
    pub fn from_physical(p: Physical) -> Result<Self> {
        p.validate()?;
        Ok(Self {
            physical: Some(p),
            spectral: None,
            analytic_side: PhysicalSide::Physical,
        })
    }

    pub fn from_spectral(s: SpectralForm) -> Result<Self> {
        s.validate()?;
        Ok(Self {
            physical: None,
            spectral: Some(s),
            analytic_side: PhysicalSide::Spectral,
        })
    }

    pub fn gaussian(a: f64) -> Result<Self> {
        Self::from_physical(Physical::Gaussian { a })
    }

    pub fn power(alpha: f64, n: usize) -> Result<Self> {
        Self::from_spectral(SpectralForm::power_for(alpha, n))
    }

    pub fn zero() -> Self {
        Self {
            physical: None,
            spectral: Some(SpectralForm::Zero),
            analytic_side: PhysicalSide::Spectral,
        }
    }
}

/// `H(λ)` of a profile bound to a space.
#[derive(Debug, Clone)]
pub struct Spectrum {
    space: SpectralSpace,
    form: Form,
    /// Side(s) known in closed form once bound to the space.
    pub analytic_side: PhysicalSide,
    pub physical: Option<Physical>,
}

#[derive(Debug, Clone)]
enum Form {
    Analytic(SpectralForm),
    Sampled(Interpolant),
}

/// Piecewise degree-15 interpolation of `f̂` on Gauss–Legendre panels.
#[derive(Debug, Clone)]
struct Interpolant {
    edges: Vec<f64>,
    values: Vec<[f64; 16]>,
    bary: [f64; 16],
    normalization: f64,
}

impl Interpolant {
    fn eval(&self, lambda: f64) -> f64 {
        let last = *self.edges.last().unwrap();
        if lambda < 0.0 || lambda > last {
            return 0.0;
        }
        let i = match self.edges.binary_search_by(|x| x.total_cmp(&lambda)) {
            Ok(i) => i.min(self.values.len() - 1),
            Err(i) => i - 1,
        };
        let (a, b) = (self.edges[i], self.edges[i + 1]);
        let x = (2.0 * lambda - a - b) / (b - a);
        let nodes = GaussLegendre::order16().nodes();
        let mut num = 0.0;
        let mut den = 0.0;
        for j in 0..16 {
            let d = x - nodes[j];
            if d == 0.0 {
                return self.values[i][j];
            }
            let w = self.bary[j] / d;
            num += w * self.values[i][j];
            den += w;
        }
        num / den
    }
}

const GAUSSIAN_CUTOFF_EXPONENT: f64 = 80.0;

impl Spectrum {
    /// Binds a profile to a space. Physical profiles with a known closed-form
    /// transform on that space get an analytic `H`; others are sampled.
    pub fn new(space: &SpectralSpace, profile: &RadialProfile) -> Result<Self> {
        if let Some(form) = profile.spectral {
            form.validate()?;
            return Ok(Self {
                space: *space,
                form: Form::Analytic(form),
                analytic_side: profile.analytic_side,
                physical: profile.physical,
            });
        }
        let p = profile
            .physical
            .ok_or_else(|| Error::Parameter("profile has neither side".into()))?;
        p.validate()?;
        let c = space.plancherel_normalization;
        let n = space.dim_n as i32;
        let analytic = match (space.kind, space.dim_n, p) {
            (SpaceKind::Euclidean, _, Physical::Gaussian { a }) => Some(SpectralForm::Gaussian {
                scale: c * (PI / a).powi(n),
                s: 2.0 * a,
            }),
            (SpaceKind::Hyperbolic, 3, Physical::JacobiGaussian { a }) => Some(SpectralForm::Gaussian {
                scale: c * (PI / a).powi(3),
                s: 2.0 * a,
            }),
            (SpaceKind::Hyperbolic, 3, Physical::JacobiExponential { a }) => Some(SpectralForm::Rational {
                scale: c * 64.0 * PI * PI * a * a,
                a,
            }),
            _ => None,
        };
        let form = match analytic {
            Some(f) => Form::Analytic(f),
            None => Form::Sampled(Self::sample(space, &p)?),
        };
        let analytic_side = if analytic.is_some() {
            PhysicalSide::Both
        } else {
            PhysicalSide::Physical
        };
        Ok(Self {
            space: *space,
            form,
            analytic_side,
            physical: Some(p),
        })
    }

    /// Samples `f̂` until the spectral energy beyond the last panel is below
    /// `1e−12` of `‖f‖²`.
    fn sample(space: &SpectralSpace, p: &Physical) -> Result<Interpolant> {
        let norm2 = physical_norm_squared(space, p)?.value;
        let width = (0.25 * PI / p.support_radius(space, 1e-16)).min(0.5);
        let c = space.plancherel_normalization;
        let mut lambda_max = 16.0;
        let mut samples = spectral_samples(space, p, lambda_max, width)?;
        loop {
            let panels = samples.lambda.len() / 16;
            let last_quarter = panels - panels / 4;
            let tail: f64 = (last_quarter * 16..samples.lambda.len())
                .map(|i| samples.weight[i] * c * samples.value[i].powi(2) * space.spectral_measure(samples.lambda[i]))
                .sum();
            if tail <= 1e-12 * norm2 {
                let g = GaussLegendre::order16();
                let mut bary = [0.0; 16];
                for (j, b) in bary.iter_mut().enumerate() {
                    let x = g.nodes()[j];
                    let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                    *b = sign * ((1.0 - x * x) * g.weights()[j]).sqrt();
                }
                let values = samples
                    .value
                    .chunks(16)
                    .map(|ch| {
                        let mut a = [0.0; 16];
                        a.copy_from_slice(ch);
                        a
                    })
                    .collect();
                return Ok(Interpolant {
                    edges: samples.edges,
                    values,
                    bary,
                    normalization: c,
                });
            }
            if lambda_max >= 4096.0 {
                return Err(Error::Decay(format!(
                    "spectral energy beyond λ = {lambda_max} is {tail:e}, above 1e-12·‖f‖²"
                )));
            }
            samples.extend(samples_between(space, p, lambda_max, 2.0 * lambda_max, width)?);
            lambda_max *= 2.0;
        }
    }

    pub fn space(&self) -> &SpectralSpace {
        &self.space
    }

    pub fn is_zero(&self) -> bool {
        matches!(
            self.form,
            Form::Analytic(SpectralForm::Zero)
                | Form::Analytic(SpectralForm::Power { scale: 0.0, .. })
                | Form::Analytic(SpectralForm::Bump { height: 0.0, .. })
        )
    }

    /// Spectral energy density `H(λ)`.
    pub fn h(&self, lambda: f64) -> f64 {
        match &self.form {
            Form::Analytic(f) => f.value(lambda),
            Form::Sampled(s) => s.normalization * s.eval(lambda).powi(2),
        }
    }

    /// Points where `H` is not smooth.
    pub fn breakpoints(&self) -> Vec<f64> {
        match &self.form {
            Form::Analytic(SpectralForm::Power { lambda0, .. }) => vec![*lambda0],
            Form::Analytic(SpectralForm::Bump { center, width, .. }) => {
                vec![(center - width).max(0.0), *center, center + width]
            }
            Form::Sampled(s) => s.edges.clone(),
            _ => vec![],
        }
    }

    /// Interval outside which `H` vanishes (or is negligible).
    pub fn support(&self) -> (f64, f64) {
        match &self.form {
            Form::Analytic(f) => match *f {
                SpectralForm::Zero => (0.0, 0.0),
                SpectralForm::Power { lambda0, .. } => (lambda0, f64::INFINITY),
                SpectralForm::Bump { center, width, .. } => ((center - width).max(0.0), center + width),
                SpectralForm::Gaussian { s, .. } => {
                    // H·m below e^{−80}·H(0) once λ² > 80 s, with room for the λ^{n−1} factor
                    let base = (GAUSSIAN_CUTOFF_EXPONENT * s).sqrt();
                    (0.0, base * 1.2 + 4.0 * s.sqrt())
                }
                SpectralForm::Rational { a, .. } => (0.0, 2000.0 * a.max(0.5)),
            },
            Form::Sampled(s) => (0.0, *s.edges.last().unwrap()),
        }
    }

    /// Exact `∫_x^∞ H dμ` where a closed form exists.
    pub fn mu_tail(&self, x: f64) -> Option<f64> {
        let n = match self.space.kind {
            SpaceKind::Euclidean => self.space.dim_n as f64,
            SpaceKind::Hyperbolic if self.space.dim_n == 3 => 3.0,
            // λ tanh(πλ) = λ to double precision beyond λ = 7
            SpaceKind::Hyperbolic if x >= 7.0 => 2.0,
            SpaceKind::Hyperbolic => return None,
        };
        self.power_tail(x, n)
    }

    /// Exact `∫_x^∞ H dλ` where a closed form exists.
    pub fn flat_tail(&self, x: f64) -> Option<f64> {
        self.power_tail(x, 1.0)
    }

    /// `∫_x^∞ H(λ) λ^{n−1} dλ` for the power profile (infinite if divergent).
    fn power_tail(&self, x: f64, n: f64) -> Option<f64> {
        match &self.form {
            Form::Analytic(SpectralForm::Power { scale, exponent, lambda0 }) => {
                if *scale == 0.0 {
                    return Some(0.0);
                }
                let q = exponent - n;
                if q <= 0.0 {
                    return Some(f64::INFINITY);
                }
                Some(scale * x.max(*lambda0).powf(-q) / q)
            }
            Form::Analytic(SpectralForm::Zero) => Some(0.0),
            _ if x >= self.support().1 => Some(0.0),
            _ => None,
        }
    }

    /// Upper envelope of `H(λ) m(λ)` beyond `x`, as `(scale, decay)` with
    /// `H m ≤ scale · λ^{−decay}`; only for power profiles.
    pub fn power_envelope(&self) -> Option<(f64, f64)> {
        match &self.form {
            Form::Analytic(SpectralForm::Power { scale, exponent, .. }) => {
                Some((*scale, exponent - (self.space.dim_n as f64 - 1.0)))
            }
            _ => None,
        }
    }
}

/// JSON form of a space: `{"kind":"hyperbolic","n":3}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceDescriptor {
    pub kind: String,
    pub n: usize,
}

impl SpaceDescriptor {
    pub fn build(&self, prefix: &str) -> Result<SpectralSpace> {
        match self.kind.as_str() {
            "euclidean" => SpectralSpace::euclidean(self.n),
            "hyperbolic" => SpectralSpace::hyperbolic(self.n),
            other => Err(Error::config(format!("{prefix}.kind"), format!("unknown space kind `{other}`"))),
        }
        .map_err(|e| match e {
            Error::UnsupportedDimension(n) => Error::config(format!("{prefix}.n"), format!("unsupported dimension {n}")),
            other => other,
        })
    }
}

/// JSON form of a profile, e.g. `{"physical":"gaussian","a":0.5}` or
/// `{"spectral":"power","alpha":0.5}`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileDescriptor {
    pub physical: Option<String>,
    pub spectral: Option<String>,
    pub a: Option<f64>,
    pub radius: Option<f64>,
    /// Power profile `λ^{−(2α+n)}`; alternatively give `exponent` directly.
    pub alpha: Option<f64>,
    pub exponent: Option<f64>,
    pub lambda0: Option<f64>,
    pub scale: Option<f64>,
    pub center: Option<f64>,
    pub width: Option<f64>,
    pub height: Option<f64>,
}

impl ProfileDescriptor {
    pub fn build(&self, prefix: &str, space: &SpectralSpace) -> Result<RadialProfile> {
        let field = |name: &str| format!("{prefix}.{name}");
        let need = |v: Option<f64>, name: &str| v.ok_or_else(|| Error::config(field(name), "missing required field"));
        let wrap = |e: Error, name: &str| match e {
            Error::Parameter(msg) => Error::config(field(name), msg),
            other => other,
        };
        match (&self.physical, &self.spectral) {
            (Some(_), Some(_)) => Err(Error::config(
                field("spectral"),
                "give either a physical or a spectral profile, not both",
            )),
            (None, None) => Err(Error::config(field("physical"), "missing profile kind")),
            (Some(kind), None) => {
                let p = match kind.as_str() {
                    "gaussian" => Physical::Gaussian { a: need(self.a, "a")? },
                    "jacobi_gaussian" => Physical::JacobiGaussian { a: need(self.a, "a")? },
                    "jacobi_exponential" => Physical::JacobiExponential { a: need(self.a, "a")? },
                    "bump" => Physical::Bump {
                        radius: need(self.radius, "radius")?,
                    },
                    other => return Err(Error::config(field("physical"), format!("unknown profile `{other}`"))),
                };
                RadialProfile::from_physical(p).map_err(|e| wrap(e, if matches!(p, Physical::Bump { .. }) { "radius" } else { "a" }))
            }
            (None, Some(kind)) => {
                let s = match kind.as_str() {
                    "zero" => SpectralForm::Zero,
                    "power" => {
                        let exponent = match (self.exponent, self.alpha) {
                            (Some(e), _) => e,
                            (None, Some(alpha)) => 2.0 * alpha + space.dim_n as f64,
                            (None, None) => return Err(Error::config(field("alpha"), "missing required field")),
                        };
                        SpectralForm::Power {
                            scale: self.scale.unwrap_or(1.0),
                            exponent,
                            lambda0: self.lambda0.unwrap_or(1.0),
                        }
                    }
                    "bump" => SpectralForm::Bump {
                        center: need(self.center, "center")?,
                        width: need(self.width, "width")?,
                        height: self.height.unwrap_or(1.0),
                    },
                    other => return Err(Error::config(field("spectral"), format!("unknown profile `{other}`"))),
                };
                RadialProfile::from_spectral(s).map_err(|e| wrap(e, "spectral"))
            }
        }
    }
}

/// A labelled profile on a space, from the set exercised by the test suites.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BundledProfile {
    pub label: &'static str,
    pub space: SpectralSpace,
    pub profile: RadialProfile,
}

/// Gaussians and power laws on `ℝ¹`–`ℝ³`, a compact spectral bump, and
/// analytic and sampled profiles on `H²` and `H³`.
pub fn bundled_profiles() -> Result<Vec<BundledProfile>> {
    let e = SpectralSpace::euclidean;
    let h = SpectralSpace::hyperbolic;
    let phys = RadialProfile::from_physical;
    Ok(vec![
        BundledProfile { label: "R1 gaussian", space: e(1)?, profile: RadialProfile::gaussian(0.5)? },
        BundledProfile { label: "R2 gaussian", space: e(2)?, profile: RadialProfile::gaussian(0.5)? },
        BundledProfile { label: "R3 gaussian", space: e(3)?, profile: RadialProfile::gaussian(0.5)? },
        BundledProfile { label: "R1 power 0.5", space: e(1)?, profile: RadialProfile::power(0.5, 1)? },
        BundledProfile { label: "R3 power 1.5", space: e(3)?, profile: RadialProfile::power(1.5, 3)? },
        BundledProfile {
            label: "R2 spectral bump",
            space: e(2)?,
            profile: RadialProfile::from_spectral(SpectralForm::Bump { center: 3.0, width: 2.0, height: 1.0 })?,
        },
        BundledProfile { label: "H3 power 1.0", space: h(3)?, profile: RadialProfile::power(1.0, 3)? },
        BundledProfile { label: "H3 jacobi gaussian", space: h(3)?, profile: phys(Physical::JacobiGaussian { a: 1.0 })? },
        BundledProfile { label: "H3 jacobi exponential", space: h(3)?, profile: phys(Physical::JacobiExponential { a: 2.0 })? },
        BundledProfile { label: "H3 bump", space: h(3)?, profile: phys(Physical::Bump { radius: 1.5 })? },
        BundledProfile { label: "H2 bump", space: h(2)?, profile: phys(Physical::Bump { radius: 1.5 })? },
        BundledProfile { label: "H2 power 0.5", space: h(2)?, profile: RadialProfile::power(0.5, 2)? },
    ])
}
