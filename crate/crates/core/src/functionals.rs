//! Both sides of the Lipschitz/Fourier-tail equivalence and the internal
//! quantities of its proof, computed from a bound [`Spectrum`].
//!
//! With `dμ = m(λ) dλ` the spectral measure of the space:
//!
//! * `L(t)² = ∫₀^∞ (1 − φ_λ(t))² H(λ) dμ(λ)`, which equals `‖S^t f − f‖₂²`;
//! * `T(t) = ∫_{1/t}^∞ H(λ) dλ` (flat measure) and the weighted tail
//!   `∫_{1/t}^∞ H dμ`;
//! * `J₁`, `J₂` split `L(t)²` at `λ = 1/t`; `K₁ = t⁴∫₀^{1/t} λ⁴ H dμ` and
//!   `K₂ = t⁴ρ⁴∫₀^{1/t} H dμ` bound `J₁`.
//!
//! Power-law spectra have unbounded support. Oscillatory integrals over them
//! stop at `λ = K/t` and add the exact tail of `H dμ` times the mean of
//! `(1 − φ)²` over an oscillation; non-oscillatory ones add the exact tail.

use std::cell::RefCell;
use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::modulus::{MoGrids, Modulus};
use crate::quad::{self, Estimate, GaussLegendre, PanelRule};
use crate::spaces::{physical_lipschitz, Spectrum};

#[derive(Debug, Clone, Copy)]
pub struct FunctionalOptions {
    /// Oscillatory integrals run to `λt = cutoff_factor` before the tail is added.
    pub cutoff_factor: f64,
    /// Optional absolute cap on the spectral variable.
    pub lambda_max: f64,
    pub rel_tol: f64,
}

impl Default for FunctionalOptions {
    fn default() -> Self {
        Self {
            cutoff_factor: 4096.0,
            lambda_max: f64::INFINITY,
            rel_tol: 1e-11,
        }
    }
}

/// `t_j = t_max · 2^{−j}` for `j = 0..=J`.
pub fn dyadic_grid(t_max: f64, j_max: usize) -> Vec<f64> {
    (0..=j_max).map(|j| t_max * 0.5f64.powi(j as i32)).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CurveKind {
    Lipschitz,
    Tail,
    Diagnostic(String),
}

impl CurveKind {
    pub fn label(&self) -> String {
        match self {
            CurveKind::Lipschitz => "lipschitz".into(),
            CurveKind::Tail => "tail".into(),
            CurveKind::Diagnostic(name) => format!("diagnostic:{name}"),
        }
    }
}

/// Samples of a functional on a dyadic grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FunctionalCurve {
    pub kind: CurveKind,
    pub t_values: Vec<f64>,
    pub values: Vec<f64>,
    pub quadrature_errors: Vec<f64>,
    /// Points whose error estimate exceeds `1e−6 · (1 + value)`.
    pub flagged: Vec<bool>,
}

impl FunctionalCurve {
    pub fn new(kind: CurveKind, t_values: Vec<f64>, estimates: Vec<Estimate>) -> Self {
        let values: Vec<f64> = estimates.iter().map(|e| e.value).collect();
        let quadrature_errors: Vec<f64> = estimates.iter().map(|e| e.error).collect();
        let flagged = values
            .iter()
            .zip(&quadrature_errors)
            .map(|(v, e)| !(v.is_finite() && *e <= 1e-6 * (1.0 + v)))
            .collect();
        Self {
            kind,
            t_values,
            values,
            quadrature_errors,
            flagged,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Restriction to the first `len` grid points.
    pub fn truncated(&self, len: usize) -> Self {
        let len = len.min(self.len());
        Self {
            kind: self.kind.clone(),
            t_values: self.t_values[..len].to_vec(),
            values: self.values[..len].to_vec(),
            quadrature_errors: self.quadrature_errors[..len].to_vec(),
            flagged: self.flagged[..len].to_vec(),
        }
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Measure {
    Mu,
    Flat,
}

/// Mean of `(1 − φ)²` over an oscillation at large `λt`: `3/2` for `cos`,
/// 1 where `φ` decays.
fn gap_square_mean(spec: &Spectrum) -> f64 {
    let s = spec.space();
    if s.is_euclidean() && s.dim_n == 1 {
        1.5
    } else {
        1.0
    }
}

fn check_t(t: f64) -> Result<()> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::Domain(format!("functional evaluated at t = {t}")));
    }
    Ok(())
}

/// `∫_a^b w(λ) H(λ) dν(λ)` with `ν` flat or `μ`, plus the tail beyond the
/// truncation point when `b = ∞`. `osc` carries the `t` of an oscillatory
/// weight; `tail_mean` is the mean of `w` over an oscillation far out.
fn spectral_integral(
    spec: &Spectrum,
    a: f64,
    b: f64,
    measure: Measure,
    osc: Option<f64>,
    tail_mean: f64,
    weight: &dyn Fn(f64) -> Result<f64>,
    opts: &FunctionalOptions,
) -> Result<Estimate> {
    let (lo, hi) = spec.support();
    let a = a.max(lo);
    let b = b.min(hi);
    if spec.is_zero() || a >= b {
        return Ok(Estimate::default());
    }
    let space = *spec.space();
    let exact_tail = |x: f64| match measure {
        Measure::Mu => spec.mu_tail(x),
        Measure::Flat => spec.flat_tail(x),
    };
    let mut upper = b;
    if b.is_infinite() {
        if exact_tail(a.max(8.0)).is_none() {
            return Err(Error::Decay("spectrum has unbounded support without a tail bound".into()));
        }
        upper = match osc {
            Some(t) => (opts.cutoff_factor / t).max(2.0 * a),
            None => a.max(1.0) * 2f64.powi(24),
        };
        // the H² tail is exact only once tanh(πλ) = 1
        upper = upper.max(8.0);
    }
    upper = upper.min(opts.lambda_max).max(a);

    let rule = match osc {
        Some(t) => PanelRule::oscillatory(0.5 * PI / t),
        None => PanelRule::oscillatory(((upper - a) / 16.0).max(f64::MIN_POSITIVE)),
    }
    .with_rel_tol(opts.rel_tol);
    let failure = RefCell::new(None);
    let integrand = |lambda: f64| -> f64 {
        let dens = match measure {
            Measure::Mu => space.spectral_measure(lambda),
            Measure::Flat => 1.0,
        };
        let h = spec.h(lambda);
        if h == 0.0 || dens == 0.0 {
            return 0.0;
        }
        match weight(lambda) {
            Ok(w) => w * h * dens,
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                0.0
            }
        }
    };
    let body = quad::integrate(integrand, a, upper, &spec.breakpoints(), &rule)?;
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    if upper >= b || upper >= opts.lambda_max {
        return Ok(body);
    }
    let tail = exact_tail(upper).ok_or_else(|| Error::Decay("no tail bound beyond the cutoff".into()))?;
    if !tail.is_finite() {
        return Err(Error::Divergence(format!("spectral tail beyond λ = {upper:e} is infinite")));
    }
    let tail_error = match osc {
        Some(t) => {
            let decay = spec.power_envelope().map_or(4.0, |(_, d)| d.abs() + 4.0);
            tail * tail_mean * decay / (upper * t)
        }
        None => 0.0,
    };
    Ok(body + Estimate::new(tail_mean * tail, tail_error))
}

/// `L(t)²`.
pub fn lipschitz_squared(spec: &Spectrum, t: f64, opts: &FunctionalOptions) -> Result<Estimate> {
    check_t(t)?;
    let space = *spec.space();
    let est = spectral_integral(
        spec,
        0.0,
        f64::INFINITY,
        Measure::Mu,
        Some(t),
        gap_square_mean(spec),
        &|lambda| Ok(space.gap(lambda, t)?.powi(2)),
        opts,
    )?;
    if !est.value.is_finite() {
        return Err(Error::Divergence("L(t)² is not finite".into()));
    }
    Ok(est)
}

/// `L(t) = ‖S^t f − f‖₂` through the Plancherel identity.
pub fn lipschitz_value(spec: &Spectrum, t: f64, opts: &FunctionalOptions) -> Result<Estimate> {
    let sq = lipschitz_squared(spec, t, opts)?;
    let value = sq.value.max(0.0).sqrt();
    let error = if value > 0.0 { sq.error / (2.0 * value) } else { sq.error.sqrt() };
    Ok(Estimate::new(value, error))
}

pub fn lipschitz_curve(spec: &Spectrum, t_grid: &[f64], opts: &FunctionalOptions) -> Result<FunctionalCurve> {
    let est = t_grid
        .iter()
        .map(|&t| lipschitz_value(spec, t, opts))
        .collect::<Result<Vec<_>>>()?;
    Ok(FunctionalCurve::new(CurveKind::Lipschitz, t_grid.to_vec(), est))
}

/// `‖S^t f − f‖₂` by physical-space quadrature, on the same grid.
pub fn physical_lipschitz_curve(spec: &Spectrum, t_grid: &[f64]) -> Result<FunctionalCurve> {
    let p = spec
        .physical
        .ok_or_else(|| Error::Inapplicable("profile has no physical side".into()))?;
    let est = t_grid
        .iter()
        .map(|&t| physical_lipschitz(spec.space(), &p, t))
        .collect::<Result<Vec<_>>>()?;
    Ok(FunctionalCurve::new(
        CurveKind::Diagnostic("physical_lipschitz".into()),
        t_grid.to_vec(),
        est,
    ))
}

/// `T(t) = ∫_{1/t}^∞ H(λ) dλ`.
pub fn tail_value(spec: &Spectrum, t: f64, opts: &FunctionalOptions) -> Result<Estimate> {
    check_t(t)?;
    spectral_integral(spec, 1.0 / t, f64::INFINITY, Measure::Flat, None, 1.0, &|_| Ok(1.0), opts)
}

pub fn tail_curve(spec: &Spectrum, t_grid: &[f64], opts: &FunctionalOptions) -> Result<FunctionalCurve> {
    let est = t_grid
        .iter()
        .map(|&t| tail_value(spec, t, opts))
        .collect::<Result<Vec<_>>>()?;
    Ok(FunctionalCurve::new(CurveKind::Tail, t_grid.to_vec(), est))
}

/// `∫_{1/t}^∞ H dμ`.
pub fn weighted_tail(spec: &Spectrum, t: f64, opts: &FunctionalOptions) -> Result<Estimate> {
    check_t(t)?;
    aux_tail_phi(spec, 1.0 / t, opts)
}

/// The auxiliary tail `φ(s) = ∫_s^∞ H dμ`.
pub fn aux_tail_phi(spec: &Spectrum, s: f64, opts: &FunctionalOptions) -> Result<Estimate> {
    if !(s >= 0.0) {
        return Err(Error::Domain(format!("auxiliary tail at s = {s}")));
    }
    spectral_integral(spec, s, f64::INFINITY, Measure::Mu, None, 1.0, &|_| Ok(1.0), opts)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JSplit {
    pub t: f64,
    pub j1: Estimate,
    pub j2: Estimate,
}

/// `J₁ = ∫₀^{1/t} (1−φ)² H dμ`, `J₂ = ∫_{1/t}^∞ (1−φ)² H dμ`.
pub fn j_split(spec: &Spectrum, t: f64, opts: &FunctionalOptions) -> Result<JSplit> {
    check_t(t)?;
    let space = *spec.space();
    let w = |lambda: f64| Ok(space.gap(lambda, t)?.powi(2));
    let mean = gap_square_mean(spec);
    Ok(JSplit {
        t,
        j1: spectral_integral(spec, 0.0, 1.0 / t, Measure::Mu, Some(t), mean, &w, opts)?,
        j2: spectral_integral(spec, 1.0 / t, f64::INFINITY, Measure::Mu, Some(t), mean, &w, opts)?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KSplit {
    pub t: f64,
    pub k1: Estimate,
    pub k2: Estimate,
}

/// `K₁ = t⁴∫₀^{1/t} λ⁴ H dμ`, `K₂ = t⁴ρ⁴∫₀^{1/t} H dμ` (absolute constant set to 1).
pub fn k_split(spec: &Spectrum, t: f64, opts: &FunctionalOptions) -> Result<KSplit> {
    check_t(t)?;
    let t4 = t.powi(4);
    let rho4 = spec.space().rho.powi(4);
    let k1 = spectral_integral(spec, 0.0, 1.0 / t, Measure::Mu, None, 1.0, &|l| Ok(l.powi(4)), opts)?;
    let k2 = if rho4 == 0.0 {
        Estimate::default()
    } else {
        spectral_integral(spec, 0.0, 1.0 / t, Measure::Mu, None, 1.0, &|_| Ok(1.0), opts)?.scale(rho4)
    };
    Ok(KSplit {
        t,
        k1: k1.scale(t4),
        k2: k2.scale(t4),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AuxIdentity {
    pub t: f64,
    /// `t⁴ ∫₀^{1/t} s⁴ H dμ`
    pub direct: f64,
    /// `t⁴ (4∫₀^{1/t} s³ φ(s) ds − t^{−4} φ(1/t))`
    pub by_parts: f64,
    /// `φ(1/t)`, the boundary term (unscaled).
    pub boundary: f64,
    pub rel_error: f64,
    pub holds: bool,
}

/// Checks `∫₀^X s⁴ H dμ = −X⁴ φ(X) + 4∫₀^X s³ φ(s) ds` at `X = 1/t`.
pub fn aux_tail_identity(spec: &Spectrum, t: f64, opts: &FunctionalOptions) -> Result<AuxIdentity> {
    check_t(t)?;
    let x = 1.0 / t;
    let t4 = t.powi(4);
    let direct = k_split(spec, t, opts)?.k1.value;
    let boundary = aux_tail_phi(spec, x, opts)?.value;
    let (lo, hi) = spec.support();
    // φ is constant below the support and zero above it.
    let split = lo.min(x);
    let upper = x.min(hi.max(split));
    let phi_lo = aux_tail_phi(spec, split, opts)?.value;
    let below = phi_lo * split.powi(4) / 4.0;
    let above = if hi.is_finite() {
        let phi_top = if upper >= hi { 0.0 } else { boundary };
        cubic_moment_of_tail(spec, split, upper, phi_top)
    } else {
        let mut breaks = spec.breakpoints();
        breaks.retain(|&b| b > split && b < upper);
        let rule = PanelRule::oscillatory(((upper - split) / 16.0).max(f64::MIN_POSITIVE)).with_rel_tol(1e-12);
        let failure = RefCell::new(None);
        let est = quad::integrate(
            |s| match aux_tail_phi(spec, s, opts) {
                Ok(v) => s.powi(3) * v.value,
                Err(e) => {
                    failure.borrow_mut().get_or_insert(e);
                    0.0
                }
            },
            split,
            upper,
            &breaks,
            &rule,
        )?;
        if let Some(e) = failure.into_inner() {
            return Err(e);
        }
        est.value
    };
    let by_parts = t4 * (4.0 * (below + above) - x.powi(4) * boundary);
    let scale = direct.abs().max(f64::MIN_POSITIVE);
    let rel_error = if direct == 0.0 && by_parts.abs() < 1e-300 { 0.0 } else { (by_parts - direct).abs() / scale };
    Ok(AuxIdentity {
        t,
        direct,
        by_parts,
        boundary,
        rel_error,
        holds: rel_error <= 1e-6,
    })
}

/// `∫_a^b s³ φ(s) ds` for a compactly supported spectrum, with
/// `φ(s) = φ(b) + ∫_s^b H dμ` accumulated panel by panel from the top.
fn cubic_moment_of_tail(spec: &Spectrum, a: f64, b: f64, phi_b: f64) -> f64 {
    let space = *spec.space();
    let mut hm = |l: f64| spec.h(l) * space.spectral_measure(l);
    let edges = quad::panel_edges(
        a,
        b,
        &spec.breakpoints(),
        &PanelRule::oscillatory(((b - a) / 256.0).clamp(f64::MIN_POSITIVE, 0.25)),
    );
    let g = GaussLegendre::order16();
    let mut phi_right = phi_b;
    let mut total = 0.0;
    for w in edges.windows(2).rev() {
        let (l, r) = (w[0], w[1]);
        for (s, ws) in g.mapped(l, r) {
            total += ws * s.powi(3) * (phi_right + g.integrate(&mut hm, s, r));
        }
        phi_right += g.integrate(&mut hm, l, r);
    }
    total
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DyadicSum {
    pub sum: f64,
    pub bound_constant: f64,
    /// Decay exponent used for the geometric tail.
    pub delta: f64,
    pub terms: usize,
}

/// `Σ_{j≥0} ω(t/2^j)²` by `J + 1` terms and a geometric tail with ratio
/// `4^{−δ}`, `δ` the measured lower index.
pub fn dyadic_sum_check(m: &Modulus, t: f64, j_max: usize) -> Result<DyadicSum> {
    if !(t > 0.0 && t <= m.delta0) {
        return Err(Error::Domain(format!("dyadic sum needs t in (0, δ₀], got {t}")));
    }
    if j_max < 8 {
        return Err(Error::Parameter(format!("dyadic sum needs J ≥ 8, got {j_max}")));
    }
    let delta = match m.mo_indices(&MoGrids::for_modulus(m)?) {
        Ok(idx) => idx.m_lower,
        Err(Error::MoNonConvergence { partial, .. }) => partial.m_lower,
        Err(e) => return Err(e),
    };
    if delta <= 0.05 {
        return Err(Error::Inapplicable(format!(
            "lower index {delta:.3} too small to certify geometric decay"
        )));
    }
    let w0 = m.eval(t)?;
    if w0 == 0.0 {
        return Err(Error::DegenerateModulus(format!("ω({t}) = 0")));
    }
    let mut sum = 0.0;
    let mut last = 0.0;
    for j in 0..=j_max {
        last = m.eval(t * 0.5f64.powi(j as i32))?.powi(2);
        sum += last;
    }
    let r = 4f64.powf(-delta);
    sum += last * r / (1.0 - r);
    Ok(DyadicSum {
        sum,
        bound_constant: sum / (w0 * w0),
        delta,
        terms: j_max + 1,
    })
}
