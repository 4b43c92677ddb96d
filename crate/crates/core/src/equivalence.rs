//! Bounded-ratio tests for both directions of the Lipschitz/Fourier-tail
//! equivalence, with log-log exponent fits and an audit of the hypotheses
//! on the modulus.
//!
//! "Bounded for all sufficiently small t" is tested as: the supremum of the
//! ratio over the dyadic grid `t_max·2^{−j}`, `j ≤ J`, changes by less than
//! 10% when the grid is extended to `J + 4`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::functionals::{self, dyadic_grid, FunctionalCurve, FunctionalOptions};
use crate::modulus::{Modulus, TailReport, ZygmundKind, ZygmundOptions};
use crate::spaces::{RadialProfile, SpectralSpace, Spectrum};

const STABILITY_TOL: f64 = 0.1;

#[derive(Debug, Clone, Copy)]
pub struct EquivalenceOptions {
    /// Largest grid point; `None` means `δ₀/2`.
    pub t_max: Option<f64>,
    pub j_max: usize,
    /// Extra octaves used for the stability comparison.
    pub refine: usize,
    /// Points dropped at each end of the grid before fitting.
    pub fit_trim: usize,
    pub functional: FunctionalOptions,
}

impl Default for EquivalenceOptions {
    fn default() -> Self {
        Self {
            t_max: None,
            j_max: 20,
            refine: 4,
            fit_trim: 2,
            functional: FunctionalOptions::default(),
        }
    }
}

impl EquivalenceOptions {
    pub fn t_max_for(&self, m: &Modulus) -> f64 {
        self.t_max.unwrap_or(0.5 * m.delta0)
    }

    fn validate(&self, m: &Modulus) -> Result<f64> {
        let t_max = self.t_max_for(m);
        if !(t_max > 0.0 && t_max <= m.delta0) {
            return Err(Error::Parameter(format!("t_max = {t_max} must lie in (0, δ₀]")));
        }
        if self.j_max < 8 || self.j_max > 40 {
            return Err(Error::Parameter(format!("grid J = {} must lie in [8, 40]", self.j_max)));
        }
        if self.refine == 0 {
            return Err(Error::Parameter("refinement must add at least one grid point".into()));
        }
        Ok(t_max)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioReport {
    /// Supremum over the base grid (`j ≤ J`).
    pub ratio_sup: f64,
    /// Supremum over the extended grid (`j ≤ J + refine`).
    pub ratio_sup_refined: f64,
    pub stable: bool,
    pub worst_t: f64,
    /// Ratio at every point of the extended grid.
    pub ratios: Vec<f64>,
}

impl RatioReport {
    pub fn finite_and_stable(&self) -> bool {
        self.stable && self.ratio_sup.is_finite()
    }

    fn from_ratios(t_grid: &[f64], ratios: Vec<f64>, base_len: usize) -> Self {
        let sup = |r: &[f64]| -> (f64, usize) {
            r.iter().enumerate().fold((0.0, 0), |acc, (i, &v)| {
                if v > acc.0 || v.is_nan() {
                    (if v.is_nan() { f64::INFINITY } else { v }, i)
                } else {
                    acc
                }
            })
        };
        let (base, _) = sup(&ratios[..base_len]);
        let (refined, at) = sup(&ratios);
        let stable = base.is_finite() && refined.is_finite() && (refined - base).abs() <= STABILITY_TOL * base;
        Self {
            ratio_sup: base,
            ratio_sup_refined: refined,
            stable: stable || (base == 0.0 && refined == 0.0),
            worst_t: t_grid[at],
            ratios,
        }
    }
}

fn modulus_on(m: &Modulus, t_grid: &[f64]) -> Result<Vec<f64>> {
    t_grid
        .iter()
        .map(|&t| {
            let w = m.eval(t)?;
            if w > 0.0 {
                Ok(w)
            } else {
                Err(Error::DegenerateModulus(format!("ω({t:e}) = {w} on the test grid")))
            }
        })
        .collect()
}

/// `sup T(t) / (ω(t)² t^{n−1})` from a tail curve on the extended grid.
pub fn forward_ratios(space: &SpectralSpace, tail: &FunctionalCurve, m: &Modulus, base_len: usize) -> Result<RatioReport> {
    let w = modulus_on(m, &tail.t_values)?;
    let n1 = space.dim_n as i32 - 1;
    let ratios = tail
        .values
        .iter()
        .zip(&w)
        .zip(&tail.t_values)
        .map(|((v, w), t)| v / (w * w * t.powi(n1)))
        .collect();
    Ok(RatioReport::from_ratios(&tail.t_values, ratios, base_len))
}

/// `sup L(t) / ω(t)` from a Lipschitz curve on the extended grid.
pub fn backward_ratios(lipschitz: &FunctionalCurve, m: &Modulus, base_len: usize) -> Result<RatioReport> {
    let w = modulus_on(m, &lipschitz.t_values)?;
    let ratios = lipschitz.values.iter().zip(&w).map(|(v, w)| v / w).collect();
    Ok(RatioReport::from_ratios(&lipschitz.t_values, ratios, base_len))
}

fn grids(m: &Modulus, opts: &EquivalenceOptions) -> Result<(Vec<f64>, usize)> {
    let t_max = opts.validate(m)?;
    Ok((dyadic_grid(t_max, opts.j_max + opts.refine), opts.j_max + 1))
}

pub fn forward_check(spec: &Spectrum, m: &Modulus, opts: &EquivalenceOptions) -> Result<RatioReport> {
    let (grid, base) = grids(m, opts)?;
    let tail = functionals::tail_curve(spec, &grid, &opts.functional)?;
    forward_ratios(spec.space(), &tail, m, base)
}

pub fn backward_check(spec: &Spectrum, m: &Modulus, opts: &EquivalenceOptions) -> Result<RatioReport> {
    let (grid, base) = grids(m, opts)?;
    let l = functionals::lipschitz_curve(spec, &grid, &opts.functional)?;
    backward_ratios(&l, m, base)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExponentFit {
    pub slope: f64,
    /// Two standard errors of the slope.
    pub half_width: f64,
    pub points: usize,
}

/// Least-squares slope of `ln value` against `ln t` over `range`.
pub fn fit_exponent(curve: &FunctionalCurve, range: std::ops::Range<usize>) -> Result<ExponentFit> {
    if range.end > curve.len() || range.len() < 3 {
        return Err(Error::Fit(format!(
            "fit range {range:?} invalid for a curve of {} points",
            curve.len()
        )));
    }
    let mut xs = Vec::with_capacity(range.len());
    let mut ys = Vec::with_capacity(range.len());
    for i in range {
        let v = curve.values[i];
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::Fit(format!("nonpositive value {v} at t = {:e}", curve.t_values[i])));
        }
        xs.push(curve.t_values[i].ln());
        ys.push(v.ln());
    }
    // centred on the first value so that a constant curve fits exactly
    let y0 = ys[0];
    ys.iter_mut().for_each(|y| *y -= y0);
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let ssr: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - my - slope * (x - mx)).powi(2))
        .sum();
    let se = (ssr / (n - 2.0) / sxx).sqrt();
    Ok(ExponentFit {
        slope,
        half_width: 2.0 * se,
        points: xs.len(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FittedExponents {
    #[serde(rename = "L_slope")]
    pub l_slope: Option<ExponentFit>,
    #[serde(rename = "T_slope")]
    pub t_slope: Option<ExponentFit>,
}

/// Fits both curves over the grid with `trim` points dropped at each end.
/// A curve that vanishes somewhere in the range gets no fit.
pub fn fit_exponents(lipschitz: &FunctionalCurve, tail: &FunctionalCurve, trim: usize) -> FittedExponents {
    let fit = |c: &FunctionalCurve| fit_exponent(c, trim..c.len().saturating_sub(trim)).ok();
    FittedExponents {
        l_slope: fit(lipschitz),
        t_slope: fit(tail),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HypothesisAudit {
    pub order_k: f64,
    pub order_at_most_two: bool,
    pub z0: Option<bool>,
    pub zk: Option<bool>,
    pub tail: Option<TailReport>,
    /// `sup t²/ω(t)` over the base grid and its refinement.
    pub side_condition_sup: f64,
    pub side_condition_stable: bool,
    pub passes: bool,
    /// Problems met while auditing, such as a modulus too short to classify.
    pub notes: Vec<String>,
}

pub fn hypothesis_audit(m: &Modulus, opts: &EquivalenceOptions) -> HypothesisAudit {
    let mut notes = Vec::new();
    let zopts = ZygmundOptions::default();
    let mut zyg = |kind| match m.zygmund_check(kind, &zopts) {
        Ok(r) => r.holds,
        Err(e) => {
            notes.push(format!("{kind:?}: {e}"));
            None
        }
    };
    let z0 = zyg(ZygmundKind::Z0);
    let zk = zyg(ZygmundKind::Zk);
    let tail = match m.tail_assumptions_check() {
        Ok(r) => Some(r),
        Err(e) => {
            notes.push(format!("tail: {e}"));
            None
        }
    };
    let side = grids(m, opts).and_then(|(grid, base)| {
        let w = modulus_on(m, &grid)?;
        let ratios = grid.iter().zip(&w).map(|(t, w)| t * t / w).collect();
        Ok(RatioReport::from_ratios(&grid, ratios, base))
    });
    let (side_sup, side_stable) = match side {
        Ok(r) => (r.ratio_sup, r.finite_and_stable()),
        Err(e) => {
            notes.push(format!("side condition: {e}"));
            (f64::NAN, false)
        }
    };
    let order_ok = m.order_k <= 2.0;
    let passes = order_ok
        && z0 == Some(true)
        && zk == Some(true)
        && tail.is_some_and(|t| t.holds)
        && side_stable;
    HypothesisAudit {
        order_k: m.order_k,
        order_at_most_two: order_ok,
        z0,
        zk,
        tail,
        side_condition_sup: side_sup,
        side_condition_stable: side_stable,
        passes,
        notes,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    EquivalentWithinConstants,
    ForwardOnly,
    BackwardOnly,
    Inconclusive,
}

impl Verdict {
    pub fn decide(forward: &RatioReport, backward: &RatioReport, audit: &HypothesisAudit) -> Self {
        if !audit.passes {
            return Verdict::Inconclusive;
        }
        match (forward.finite_and_stable(), backward.finite_and_stable()) {
            (true, true) => Verdict::EquivalentWithinConstants,
            (true, false) => Verdict::ForwardOnly,
            (false, true) => Verdict::BackwardOnly,
            (false, false) => Verdict::Inconclusive,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::EquivalentWithinConstants => "EquivalentWithinConstants",
            Verdict::ForwardOnly => "ForwardOnly",
            Verdict::BackwardOnly => "BackwardOnly",
            Verdict::Inconclusive => "Inconclusive",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquivalenceReport {
    pub space: String,
    pub modulus: Modulus,
    pub t_max: f64,
    pub grid_j: usize,
    pub refine: usize,
    pub direction_forward: RatioReport,
    pub direction_backward: RatioReport,
    /// The forward check presumes `f ∈ Lip(ω)`; it is certified by a stable backward ratio.
    pub forward_precondition_certified: bool,
    /// "within theorem hypotheses" or "outside theorem hypotheses".
    pub backward_scope: String,
    pub hypothesis_audit: HypothesisAudit,
    pub fitted_exponents: FittedExponents,
    pub verdict: Verdict,
    #[serde(skip)]
    pub lipschitz: FunctionalCurve,
    #[serde(skip)]
    pub tail: FunctionalCurve,
}

pub const SUMMARY_HEADER: &str = "verdict,forward_ratio_sup,forward_stable,backward_ratio_sup,backward_stable,L_slope,T_slope";

impl EquivalenceReport {
    /// One CSV row matching [`SUMMARY_HEADER`]; missing slopes are written as `nan`.
    pub fn summary_row(&self) -> String {
        let slope = |f: Option<ExponentFit>| f.map_or("nan".to_string(), |f| format!("{:.16e}", f.slope));
        format!(
            "{},{:.16e},{},{:.16e},{},{},{}",
            self.verdict.as_str(),
            self.direction_forward.ratio_sup,
            self.direction_forward.stable,
            self.direction_backward.ratio_sup,
            self.direction_backward.stable,
            slope(self.fitted_exponents.l_slope),
            slope(self.fitted_exponents.t_slope),
        )
    }

    /// Base-grid restriction of the Lipschitz curve.
    pub fn lipschitz_base(&self) -> FunctionalCurve {
        self.lipschitz.truncated(self.grid_j + 1)
    }

    pub fn tail_base(&self) -> FunctionalCurve {
        self.tail.truncated(self.grid_j + 1)
    }
}

/// Runs the audit and both directions for one profile and modulus.
pub fn equivalence_report(spec: &Spectrum, m: &Modulus, opts: &EquivalenceOptions) -> Result<EquivalenceReport> {
    let (grid, base) = grids(m, opts)?;
    let audit = hypothesis_audit(m, opts);
    let lipschitz = functionals::lipschitz_curve(spec, &grid, &opts.functional)?;
    let tail = functionals::tail_curve(spec, &grid, &opts.functional)?;
    let forward = forward_ratios(spec.space(), &tail, m, base)?;
    let backward = backward_ratios(&lipschitz, m, base)?;
    let verdict = Verdict::decide(&forward, &backward, &audit);
    let fitted = fit_exponents(&lipschitz.truncated(base), &tail.truncated(base), opts.fit_trim);
    Ok(EquivalenceReport {
        space: spec.space().label(),
        modulus: m.clone(),
        t_max: grid[0],
        grid_j: opts.j_max,
        refine: opts.refine,
        forward_precondition_certified: backward.finite_and_stable(),
        backward_scope: if audit.passes {
            "within theorem hypotheses".into()
        } else {
            "outside theorem hypotheses".into()
        },
        direction_forward: forward,
        direction_backward: backward,
        hypothesis_audit: audit,
        fitted_exponents: fitted,
        verdict,
        lipschitz,
        tail,
    })
}

/// The one-dimensional case with `ω(t) = t^α`, `k = 2`, `δ₀ = 1`.
pub fn titchmarsh_n1(profile: &RadialProfile, alpha: f64, opts: &EquivalenceOptions) -> Result<EquivalenceReport> {
    if !(alpha > 0.0 && alpha < 2.0) {
        return Err(Error::Parameter(format!("α must lie in (0, 2), got {alpha}")));
    }
    let space = SpectralSpace::euclidean(1)?;
    let spec = Spectrum::new(&space, profile)?;
    let m = Modulus::power(alpha, 2.0)?;
    equivalence_report(&spec, &m, opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn power_spec(alpha: f64, n: usize) -> Spectrum {
        Spectrum::new(&SpectralSpace::euclidean(n).unwrap(), &RadialProfile::power(alpha, n).unwrap()).unwrap()
    }

    #[test]
    fn forward_ratio_is_exact_for_matched_powers() {
        let spec = power_spec(0.5, 3);
        let m = Modulus::power(0.5, 2.0).unwrap();
        let r = forward_check(&spec, &m, &EquivalenceOptions::default()).unwrap();
        assert!(r.stable);
        for &v in &r.ratios {
            assert_relative_eq!(v, 1.0 / 3.0, max_relative = 1e-10);
        }
    }

    #[test]
    fn mismatched_powers_are_unstable() {
        let spec = power_spec(0.5, 3);
        let m = Modulus::power(0.75, 2.0).unwrap();
        let opts = EquivalenceOptions::default();
        let f = forward_check(&spec, &m, &opts).unwrap();
        assert!(!f.stable && f.ratio_sup_refined > 1.1 * f.ratio_sup);
        let spec = power_spec(0.5, 1);
        let b = backward_check(&spec, &m, &opts).unwrap();
        assert!(!b.stable);
    }

    #[test]
    fn zero_profile_ratios_vanish() {
        let spec = Spectrum::new(&SpectralSpace::euclidean(2).unwrap(), &RadialProfile::zero()).unwrap();
        let m = Modulus::power(0.5, 2.0).unwrap();
        let r = forward_check(&spec, &m, &EquivalenceOptions::default()).unwrap();
        assert_eq!(r.ratio_sup, 0.0);
        assert!(r.stable);
    }

    #[test]
    fn compact_spectrum_is_lipschitz_of_order_two() {
        use crate::spaces::SpectralForm;
        let space = SpectralSpace::euclidean(2).unwrap();
        let spec = Spectrum::new(
            &space,
            &RadialProfile::from_spectral(SpectralForm::Bump { center: 2.0, width: 1.0, height: 1.0 }).unwrap(),
        )
        .unwrap();
        let m = Modulus::power(2.0, 2.0).unwrap();
        let b = backward_check(&spec, &m, &EquivalenceOptions::default()).unwrap();
        assert!(b.finite_and_stable());
    }

    #[test]
    fn fits() {
        let grid = dyadic_grid(0.5, 20);
        let est = |f: &dyn Fn(f64) -> f64| {
            grid.iter()
                .map(|&t| crate::quad::Estimate::exact(f(t)))
                .collect::<Vec<_>>()
        };
        let c = FunctionalCurve::new(functionals::CurveKind::Tail, grid.clone(), est(&|_| 3.0));
        let f = fit_exponent(&c, 2..19).unwrap();
        assert_eq!(f.slope, 0.0);
        assert_eq!(f.half_width, 0.0);
        let c = FunctionalCurve::new(functionals::CurveKind::Tail, grid.clone(), est(&|t| 5.0 * t.powf(2.5)));
        assert_relative_eq!(fit_exponent(&c, 2..19).unwrap().slope, 2.5, max_relative = 1e-12);
        let c = FunctionalCurve::new(functionals::CurveKind::Tail, grid.clone(), est(&|t| t - 0.1));
        assert!(matches!(fit_exponent(&c, 0..21), Err(Error::Fit(_))));
    }

    #[test]
    fn audits() {
        let opts = EquivalenceOptions::default();
        let a = hypothesis_audit(&Modulus::power(0.5, 2.0).unwrap(), &opts);
        assert!(a.passes);
        assert_relative_eq!(a.side_condition_sup, 0.5f64.powf(1.5), max_relative = 1e-12);
        let a = hypothesis_audit(&Modulus::power(2.0, 2.0).unwrap(), &opts);
        assert_eq!(a.zk, Some(false));
        assert!(!a.passes);
        let a = hypothesis_audit(&Modulus::power(0.5, 3.0).unwrap(), &opts);
        assert!(!a.order_at_most_two && !a.passes);
    }

    #[test]
    fn titchmarsh_one_dimensional() {
        let opts = EquivalenceOptions::default();
        let r = titchmarsh_n1(&RadialProfile::power(0.5, 1).unwrap(), 0.5, &opts).unwrap();
        assert_relative_eq!(r.direction_forward.ratio_sup, 1.0, max_relative = 1e-10);
        assert_eq!(r.verdict, Verdict::EquivalentWithinConstants);
        let l = r.fitted_exponents.l_slope.unwrap();
        assert!((l.slope - 0.5).abs() < 0.05);
        let r = titchmarsh_n1(&RadialProfile::power(1.5, 1).unwrap(), 1.5, &opts).unwrap();
        assert_relative_eq!(r.direction_forward.ratio_sup, 1.0 / 3.0, max_relative = 1e-10);
        assert!(matches!(
            titchmarsh_n1(&RadialProfile::power(0.5, 1).unwrap(), 2.0, &opts),
            Err(Error::Parameter(_))
        ));
    }

    #[test]
    fn outside_hypotheses_caps_verdict() {
        let spec = power_spec(0.5, 1);
        let m = Modulus::power(0.5, 3.0).unwrap();
        let r = equivalence_report(&spec, &m, &EquivalenceOptions::default()).unwrap();
        assert_eq!(r.verdict, Verdict::Inconclusive);
        assert_eq!(r.backward_scope, "outside theorem hypotheses");
        assert!(r.direction_backward.finite_and_stable());
        let row = r.summary_row();
        assert_eq!(row.split(',').count(), SUMMARY_HEADER.split(',').count());
    }
}
