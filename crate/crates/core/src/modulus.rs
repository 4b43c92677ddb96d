//! k-th order moduli of continuity and their classification.
//!
//! A [`Modulus`] is an abstract gauge function `ω` on `[0, δ₀]`, extended by a
//! constant `W` beyond `δ₀`. The classification routines (almost
//! monotonicity, Matuszewska–Orlicz indices, the Zygmund conditions `Z⁰` and
//! `Z_k`) all work on `ln ω` so that scales far below `f64::MIN_POSITIVE`
//! can be probed without underflow. For the closed-form families the ratio
//! `ω(εs)/ω(ε)` is evaluated analytically, which keeps the index estimates
//! exact for pure powers even at `ε = 2^(−2^40)`.

use std::cell::Cell;
use std::f64::consts::LN_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::{self, PanelRule};

/// Closed-form or tabulated shape of `ω` on `(0, δ₀]`.
///
/// The logarithmic families use `ℓ(t) = 1 + ln(1/t)` so that they stay
/// positive on the whole default domain `(0, 1]`:
/// `PowerLog = t^γ ℓ(t)^λ`, `PowerLogLog = t^γ (1 + ln ℓ(t))^λ`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum Family {
    Power { gamma: f64 },
    PowerLog { gamma: f64, lambda: f64 },
    PowerLogLog { gamma: f64, lambda: f64 },
    Tabulated(Table),
}

/// Samples `(t, ω(t))` interpolated linearly in `(ln t, ln ω)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table {
    ln_t: Vec<f64>,
    ln_w: Vec<f64>,
}

impl Table {
    pub fn new(samples: &[(f64, f64)]) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::Parameter("a tabulated modulus needs at least two samples".into()));
        }
        let mut pts = samples.to_vec();
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
        for w in pts.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::Parameter(format!("duplicate sample abscissa {}", w[0].0)));
            }
        }
        if pts.iter().any(|&(t, w)| !(t > 0.0) || !(w > 0.0) || !t.is_finite() || !w.is_finite()) {
            return Err(Error::Parameter("tabulated samples must have t > 0 and ω(t) > 0".into()));
        }
        Ok(Self {
            ln_t: pts.iter().map(|p| p.0.ln()).collect(),
            ln_w: pts.iter().map(|p| p.1.ln()).collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.ln_t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ln_t.is_empty()
    }

    fn hull(&self) -> (f64, f64) {
        (self.ln_t[0], *self.ln_t.last().unwrap())
    }

    fn interpolate(&self, ln_t: f64, extrapolate: bool) -> Result<f64> {
        let (lo, hi) = self.hull();
        let n = self.ln_t.len();
        let seg = if ln_t < lo {
            if !extrapolate {
                return Err(Error::Domain(format!("t = {:e} below the sample hull", ln_t.exp())));
            }
            0
        } else if ln_t > hi {
            if !extrapolate {
                return Err(Error::Domain(format!("t = {:e} above the sample hull", ln_t.exp())));
            }
            n - 2
        } else {
            match self.ln_t.binary_search_by(|x| x.total_cmp(&ln_t)) {
                Ok(i) => return Ok(self.ln_w[i]),
                Err(i) => i.clamp(1, n - 1) - 1,
            }
        };
        let (x0, x1) = (self.ln_t[seg], self.ln_t[seg + 1]);
        let (y0, y1) = (self.ln_w[seg], self.ln_w[seg + 1]);
        Ok(y0 + (y1 - y0) * (ln_t - x0) / (x1 - x0))
    }
}

/// A k-th order modulus of continuity with its domain cutoff and extension.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Modulus {
    pub family: Family,
    pub order_k: f64,
    pub delta0: f64,
    /// Constant value `W` used for `t > δ₀`.
    pub extension: f64,
}

const MIN_CLASSIFY_SAMPLES: usize = 64;

impl Modulus {
    /// Creates a modulus with `δ₀ = 1` and `W = ω(δ₀)`.
    pub fn new(family: Family, order_k: f64) -> Result<Self> {
        if !(order_k > 0.0) || !order_k.is_finite() {
            return Err(Error::Parameter(format!("order k must be positive, got {order_k}")));
        }
        match &family {
            Family::Power { gamma } => {
                if !(*gamma > 0.0) || !gamma.is_finite() {
                    return Err(Error::Parameter(format!("power exponent must be positive, got {gamma}")));
                }
            }
            Family::PowerLog { gamma, lambda } | Family::PowerLogLog { gamma, lambda } => {
                if !gamma.is_finite() || !lambda.is_finite() || *gamma < 0.0 {
                    return Err(Error::Parameter("log family needs finite γ ≥ 0 and finite λ".into()));
                }
                if *gamma == 0.0 && *lambda >= 0.0 {
                    return Err(Error::Parameter("γ = 0 requires λ < 0 so that ω(0+) = 0".into()));
                }
            }
            Family::Tabulated(_) => {}
        }
        let mut m = Self {
            family,
            order_k,
            delta0: 1.0,
            extension: 0.0,
        };
        m.check_domain()?;
        m.extension = m.eval_inner(m.delta0)?;
        Ok(m)
    }

    pub fn power(gamma: f64, order_k: f64) -> Result<Self> {
        Self::new(Family::Power { gamma }, order_k)
    }

    pub fn power_log(gamma: f64, lambda: f64, order_k: f64) -> Result<Self> {
        Self::new(Family::PowerLog { gamma, lambda }, order_k)
    }

    pub fn power_log_log(gamma: f64, lambda: f64, order_k: f64) -> Result<Self> {
        Self::new(Family::PowerLogLog { gamma, lambda }, order_k)
    }

    pub fn tabulated(samples: &[(f64, f64)], order_k: f64) -> Result<Self> {
        let table = Table::new(samples)?;
        let delta0 = table.hull().1.exp();
        let mut m = Self::new(Family::Tabulated(table), order_k)?;
        m = m.with_delta0(delta0)?;
        Ok(m)
    }

    /// Sets `δ₀` and resets the extension to `ω(δ₀)`.
    pub fn with_delta0(mut self, delta0: f64) -> Result<Self> {
        if !(delta0 > 0.0) || !delta0.is_finite() {
            return Err(Error::Parameter(format!("δ₀ must be positive, got {delta0}")));
        }
        self.delta0 = delta0;
        self.check_domain()?;
        self.extension = self.eval_inner(delta0)?;
        Ok(self)
    }

    pub fn with_extension(mut self, w: f64) -> Result<Self> {
        if !w.is_finite() {
            return Err(Error::Parameter("extension W must be finite".into()));
        }
        self.extension = w;
        Ok(self)
    }

    fn check_domain(&self) -> Result<()> {
        let ell = 1.0 - self.delta0.ln();
        match self.family {
            Family::PowerLog { .. } if !(ell > 0.0) => Err(Error::Parameter(format!(
                "δ₀ = {} too large for the log family (needs δ₀ < e)",
                self.delta0
            ))),
            Family::PowerLogLog { .. } if !(ell > 0.0 && 1.0 + ell.ln() > 0.0) => Err(Error::Parameter(
                format!("δ₀ = {} too large for the log-log family", self.delta0),
            )),
            _ => Ok(()),
        }
    }

    /// `ω(t)` for `t ≥ 0`, equal to `W` beyond `δ₀`.
    pub fn eval(&self, t: f64) -> Result<f64> {
        if !(t >= 0.0) {
            return Err(Error::Domain(format!("modulus evaluated at t = {t}")));
        }
        if t == 0.0 {
            return Ok(0.0);
        }
        if t > self.delta0 {
            return Ok(self.extension);
        }
        self.eval_inner(t)
    }

    fn eval_inner(&self, t: f64) -> Result<f64> {
        let ell = 1.0 - t.ln();
        Ok(match &self.family {
            Family::Power { gamma } => t.powf(*gamma),
            Family::PowerLog { gamma, lambda } => t.powf(*gamma) * ell.powf(*lambda),
            Family::PowerLogLog { gamma, lambda } => t.powf(*gamma) * (1.0 + ell.ln()).powf(*lambda),
            Family::Tabulated(table) => table.interpolate(t.ln(), false)?.exp(),
        })
    }

    /// `ln ω(t)` for `t = exp(ln_t) ≤ δ₀`.
    pub fn ln_eval(&self, ln_t: f64) -> Result<f64> {
        self.ln_eval_with(ln_t, false)
    }

    fn ln_eval_with(&self, ln_t: f64, extrapolate: bool) -> Result<f64> {
        let ell = 1.0 - ln_t;
        let v = match &self.family {
            Family::Power { gamma } => gamma * ln_t,
            Family::PowerLog { gamma, lambda } => gamma * ln_t + lambda * ell.ln(),
            Family::PowerLogLog { gamma, lambda } => gamma * ln_t + lambda * (1.0 + ell.ln()).ln(),
            Family::Tabulated(table) => table.interpolate(ln_t, extrapolate)?,
        };
        if v == f64::NEG_INFINITY || v.is_nan() {
            return Err(Error::DegenerateModulus(format!("ω vanishes at t = {:e}", ln_t.exp())));
        }
        Ok(v)
    }

    /// `ln(ω(εs)/ω(ε))`, computed without cancellation for closed forms.
    /// Tabulated moduli are extended as power laws beyond their hull.
    fn ln_ratio(&self, ln_eps: f64, ln_s: f64) -> Result<f64> {
        let ell = 1.0 - ln_eps;
        match &self.family {
            Family::Power { gamma } => Ok(gamma * ln_s),
            Family::PowerLog { gamma, lambda } => Ok(gamma * ln_s + lambda * (-ln_s / ell).ln_1p()),
            Family::PowerLogLog { gamma, lambda } => {
                let inner = (-ln_s / ell).ln_1p();
                Ok(gamma * ln_s + lambda * (inner / (1.0 + ell.ln())).ln_1p())
            }
            Family::Tabulated(_) => {
                Ok(self.ln_eval_with(ln_eps + ln_s, true)? - self.ln_eval_with(ln_eps, true)?)
            }
        }
    }

    fn require_classifiable(&self) -> Result<()> {
        if let Family::Tabulated(table) = &self.family {
            if table.len() < MIN_CLASSIFY_SAMPLES {
                return Err(Error::Parameter(format!(
                    "classification needs at least {MIN_CLASSIFY_SAMPLES} samples, table has {}",
                    table.len()
                )));
            }
        }
        Ok(())
    }

    /// The same gauge viewed as a modulus of higher order.
    pub fn promote_order(&self, new_k: f64) -> Result<Modulus> {
        if !(new_k >= self.order_k) {
            return Err(Error::InvalidPromotion {
                from: self.order_k,
                to: new_k,
            });
        }
        let mut m = self.clone();
        m.order_k = new_k;
        Ok(m)
    }

    pub fn check_monotonicity(&self, grid_size: usize, ratio_exponent: f64) -> Result<MonotonicityReport> {
        self.check_monotonicity_with(
            &MonotonicityOptions {
                grid_size,
                ..MonotonicityOptions::default()
            },
            ratio_exponent,
        )
    }

    pub fn check_monotonicity_with(
        &self,
        opts: &MonotonicityOptions,
        ratio_exponent: f64,
    ) -> Result<MonotonicityReport> {
        if opts.grid_size < 16 {
            return Err(Error::Parameter(format!("grid size {} below 16", opts.grid_size)));
        }
        self.require_classifiable()?;
        let base = self.monotonicity_scan(opts.grid_size, opts.depth_octaves, ratio_exponent, opts.exhaustive)?;
        let refined = self.monotonicity_scan(
            2 * opts.grid_size,
            2.0 * opts.depth_octaves,
            ratio_exponent,
            opts.exhaustive,
        )?;
        let stable = |a: f64, b: f64| b.is_finite() && b <= STABILITY_FACTOR * a;
        Ok(MonotonicityReport {
            is_almost_increasing: stable(base.0, refined.0),
            constant_up: base.0,
            is_ratio_almost_decreasing: stable(base.1, refined.1),
            constant_down: base.1,
            exponent_tested: ratio_exponent,
            refined_constant_up: refined.0,
            refined_constant_down: refined.1,
        })
    }

    /// Returns `(sup ω(t)/ω(s) over t ≤ s, sup g(t)/g(s) over t ≥ s)` with
    /// `g = ω/t^e`, both clamped to at least 1.
    fn monotonicity_scan(&self, n: usize, depth: f64, exponent: f64, exhaustive: bool) -> Result<(f64, f64)> {
        let mut hi = self.delta0.ln();
        let mut lo = hi - depth * LN_2;
        if let Family::Tabulated(table) = &self.family {
            let (a, b) = table.hull();
            lo = lo.max(a);
            hi = hi.min(b);
        }
        let grid: Vec<f64> = (0..n)
            .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
            .collect();
        let ln_w = grid.iter().map(|&x| self.ln_eval(x)).collect::<Result<Vec<_>>>()?;
        let ln_g: Vec<f64> = grid.iter().zip(&ln_w).map(|(x, w)| w - exponent * x).collect();

        let (up, down) = if exhaustive {
            let mut up = 0.0f64;
            let mut down = 0.0f64;
            for s in 0..n {
                for t in 0..n {
                    if t <= s {
                        up = up.max(ln_w[t] - ln_w[s]);
                    }
                    if t >= s {
                        down = down.max(ln_g[t] - ln_g[s]);
                    }
                }
            }
            (up, down)
        } else {
            let mut up = 0.0f64;
            let mut prefix = f64::NEG_INFINITY;
            for &w in &ln_w {
                prefix = prefix.max(w);
                up = up.max(prefix - w);
            }
            let mut down = 0.0f64;
            let mut suffix = f64::NEG_INFINITY;
            for &g in ln_g.iter().rev() {
                suffix = suffix.max(g);
                down = down.max(suffix - g);
            }
            (up, down)
        };
        Ok((up.exp().max(1.0), down.exp().max(1.0)))
    }

    /// Estimates the lower and upper Matuszewska–Orlicz indices from their
    /// limit formulas.
    pub fn mo_indices(&self, grids: &MoGrids) -> Result<MOIndices> {
        self.require_classifiable()?;
        grids.validate()?;
        let window = grids.limsup_window.min(grids.ln_eps.len());
        let n_eps = grids.ln_eps.len();

        let estimate = |ln_t: f64, eps: &[f64]| -> Result<f64> {
            let mut best = f64::NEG_INFINITY;
            for &e in eps {
                best = best.max(self.ln_ratio(e, ln_t)?);
            }
            Ok(best / ln_t)
        };

        let mut eps_drift = 0.0f64;
        let mut chain = |ts: &[f64]| -> Result<Vec<f64>> {
            let mut out = Vec::with_capacity(ts.len());
            for &ln_t in ts {
                let last = estimate(ln_t, &grids.ln_eps[n_eps - window..])?;
                if n_eps > window {
                    let prev = estimate(ln_t, &grids.ln_eps[n_eps - window - 1..n_eps - 1])?;
                    eps_drift = eps_drift.max((last - prev).abs());
                }
                out.push(last);
            }
            Ok(out)
        };
        let lower_chain = chain(&grids.ln_t_small)?;
        let upper_chain = chain(&grids.ln_t_large)?;

        let settle = |c: &[f64]| -> f64 {
            if c.len() < 2 {
                0.0
            } else {
                (c[c.len() - 1] - c[c.len() - 2]).abs()
            }
        };
        let t_drift = settle(&lower_chain).max(settle(&upper_chain));
        let result = MOIndices {
            m_lower: *lower_chain.last().unwrap(),
            m_upper: *upper_chain.last().unwrap(),
            ln_eps_grid: grids.ln_eps.clone(),
            ln_t_grid: grids.ln_t_small.iter().chain(&grids.ln_t_large).copied().collect(),
            converged: t_drift < MO_CONVERGED && eps_drift < MO_CONVERGED,
        };
        if t_drift > MO_FAILURE || eps_drift > MO_FAILURE {
            return Err(Error::MoNonConvergence {
                reason: format!("successive estimates differ by {:.3}", t_drift.max(eps_drift)),
                partial: Box::new(result),
            });
        }
        Ok(result)
    }

    /// The Zygmund ratio at `t = exp(ln_t)`:
    /// `Z0: ∫₀ᵗ ω(x)/x dx / ω(t)`, `Zk: tᵏ ∫ₜ^δ₀ ω(x)/x^{1+k} dx / ω(t)`.
    fn zygmund_ratio(&self, kind: ZygmundKind, ln_t: f64, quad_tol: f64) -> Result<f64> {
        let failure: Cell<Option<Error>> = Cell::new(None);
        let integrand = |v: f64, sign: f64, k: f64| -> f64 {
            match self.ln_ratio(ln_t, sign * v) {
                Ok(r) => (r - k * v).exp(),
                Err(e) => {
                    failure.set(Some(e));
                    0.0
                }
            }
        };
        let est = match kind {
            // x = t·e^{−v}, dx/x = −dv
            ZygmundKind::Z0 => match quad::integrate_to_infinity(|v| integrand(v, -1.0, 0.0), 0.0, 1.0, quad_tol) {
                Ok(e) => e,
                Err(Error::Divergence(_)) => return Ok(f64::INFINITY),
                Err(e) => return Err(e),
            },
            // x = t·e^{v}
            ZygmundKind::Zk => {
                let len = self.delta0.ln() - ln_t;
                let rule = PanelRule {
                    max_width: 1.0,
                    rel_tol: quad_tol,
                    ..PanelRule::default()
                };
                quad::integrate(|v| integrand(v, 1.0, self.order_k), 0.0, len, &[], &rule)?
            }
        };
        if let Some(e) = failure.take() {
            return Err(e);
        }
        Ok(est.value)
    }

    /// Supremum of the Zygmund ratio over an explicit grid in `(0, δ₀]`.
    /// Returns `(constant, worst_t)`.
    pub fn zygmund_constant(&self, kind: ZygmundKind, t_grid: &[f64], quad_tol: f64) -> Result<(f64, f64)> {
        self.require_classifiable()?;
        let mut best = (f64::NEG_INFINITY, f64::NAN);
        for &t in t_grid {
            if !(t > 0.0 && t <= self.delta0) {
                return Err(Error::Domain(format!("Zygmund test point t = {t} outside (0, δ₀]")));
            }
            let r = self.zygmund_ratio(kind, t.ln(), quad_tol)?;
            if r > best.0 {
                best = (r, t);
            }
        }
        Ok(best)
    }

    /// Three-valued Zygmund verdict from the growth of the constant under
    /// successive grid refinements toward 0.
    pub fn zygmund_check(&self, kind: ZygmundKind, opts: &ZygmundOptions) -> Result<ZygmundReport> {
        self.require_classifiable()?;
        if opts.depths.len() < 2 || opts.depths.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Parameter("Zygmund refinement depths must increase".into()));
        }
        let deepest = *opts.depths.last().unwrap();
        let step = LN_2 / opts.points_per_octave as f64;
        let ln_d = self.delta0.ln();
        let count = deepest as usize * opts.points_per_octave as usize;
        let mut ratios = Vec::with_capacity(count + 1);
        for j in 0..=count {
            let ln_t = ln_d - j as f64 * step;
            ratios.push((ln_t, self.zygmund_ratio(kind, ln_t, opts.quad_tol)?));
        }
        let mut constants = Vec::with_capacity(opts.depths.len());
        let mut worst = (f64::NEG_INFINITY, 0.0);
        let mut cursor = 0;
        for &d in &opts.depths {
            let end = d as usize * opts.points_per_octave as usize;
            while cursor <= end {
                let (ln_t, r) = ratios[cursor];
                if r > worst.0 {
                    worst = (r, ln_t);
                }
                cursor += 1;
            }
            constants.push(worst.0);
        }
        let growth: Vec<f64> = constants.windows(2).map(|w| w[1] / w[0]).collect();
        let constant = *constants.last().unwrap();
        let holds = if !constant.is_finite() {
            Some(false)
        } else if growth.last().is_some_and(|&g| g < STABILITY_FACTOR) {
            Some(true)
        } else if growth.iter().all(|&g| g >= STABILITY_FACTOR) {
            Some(false)
        } else {
            None
        };
        let base_end = opts.depths[0] as usize * opts.points_per_octave as usize;
        Ok(ZygmundReport {
            kind,
            holds,
            constant,
            worst_t: worst.1.exp(),
            refinement_constants: constants,
            samples: ratios[..=base_end]
                .iter()
                .map(|&(ln_t, ratio)| ZygmundSample { t: ln_t.exp(), ratio })
                .collect(),
        })
    }

    /// True when both Zygmund conditions hold on the default refinement ladder.
    pub fn bary_stechkin(&self) -> Result<bool> {
        let opts = ZygmundOptions::default();
        let z0 = self.zygmund_check(ZygmundKind::Z0, &opts)?;
        let zk = self.zygmund_check(ZygmundKind::Zk, &opts)?;
        Ok(z0.holds == Some(true) && zk.holds == Some(true))
    }

    /// Lower bound on `[δ₀, ∞)` and integrability of `ω²/t⁵` there, for the
    /// constant extension.
    pub fn tail_assumptions_check(&self) -> Result<TailReport> {
        let w = self.extension;
        if !(w > 0.0) {
            return Err(Error::InvalidExtension(w));
        }
        Ok(TailReport {
            holds: true,
            lower_bound: w,
            integral: w * w / (4.0 * self.delta0.powi(4)),
        })
    }
}

const STABILITY_FACTOR: f64 = 1.1;
const MO_CONVERGED: f64 = 0.01;
const MO_FAILURE: f64 = 0.05;

#[derive(Debug, Clone, Copy)]
pub struct MonotonicityOptions {
    pub grid_size: usize,
    /// The scan covers `[δ₀·2^(−depth), δ₀]`; the refinement doubles both.
    pub depth_octaves: f64,
    /// Full pairwise scan instead of prefix/suffix maxima.
    pub exhaustive: bool,
}

impl Default for MonotonicityOptions {
    fn default() -> Self {
        Self {
            grid_size: 8192,
            depth_octaves: 48.0,
            exhaustive: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonotonicityReport {
    pub is_almost_increasing: bool,
    pub constant_up: f64,
    pub is_ratio_almost_decreasing: bool,
    pub constant_down: f64,
    pub exponent_tested: f64,
    pub refined_constant_up: f64,
    pub refined_constant_down: f64,
}

/// Grids for the index limits, all in natural-log coordinates.
#[derive(Debug, Clone)]
pub struct MoGrids {
    /// `ln ε`, decreasing toward −∞.
    pub ln_eps: Vec<f64>,
    /// `ln t < 0`, decreasing (t → 0) for the lower index.
    pub ln_t_small: Vec<f64>,
    /// `ln t > 0`, increasing (t → ∞) for the upper index.
    pub ln_t_large: Vec<f64>,
    /// Number of smallest ε values the lim sup is taken over.
    pub limsup_window: usize,
}

impl Default for MoGrids {
    /// `ε = 2^(−2^j)` for `j = 10..=40`, `t = 2^(∓2^i)` for `i = 0..=8`.
    fn default() -> Self {
        Self {
            ln_eps: (10..=40).map(|j| -LN_2 * 2f64.powi(j)).collect(),
            ln_t_small: (0..=8).map(|i| -LN_2 * 2f64.powi(i)).collect(),
            ln_t_large: (0..=8).map(|i| LN_2 * 2f64.powi(i)).collect(),
            limsup_window: 3,
        }
    }
}

impl MoGrids {
    /// Grids that stay inside the sample hull of a tabulated modulus.
    pub fn for_modulus(m: &Modulus) -> Result<Self> {
        match &m.family {
            Family::Tabulated(table) => {
                let (a, b) = table.hull();
                let octaves = ((b - a) / LN_2).floor();
                if octaves < 12.0 {
                    return Err(Error::Parameter("sample hull spans fewer than 12 octaves".into()));
                }
                let reach = (octaves / 4.0).floor().max(2.0);
                let t_steps = reach as i32;
                let eps_top = b - reach * LN_2;
                let eps_bottom = a + reach * LN_2;
                let n_eps = 8;
                Ok(Self {
                    ln_eps: (0..n_eps)
                        .map(|i| eps_top + (eps_bottom - eps_top) * i as f64 / (n_eps - 1) as f64)
                        .collect(),
                    ln_t_small: (1..=t_steps).map(|i| -LN_2 * i as f64).collect(),
                    ln_t_large: (1..=t_steps).map(|i| LN_2 * i as f64).collect(),
                    limsup_window: 3,
                })
            }
            _ => Ok(Self::default()),
        }
    }

    fn validate(&self) -> Result<()> {
        if self.ln_eps.is_empty() || self.ln_t_small.is_empty() || self.ln_t_large.is_empty() {
            return Err(Error::Parameter("MO grids must be non-empty".into()));
        }
        if self.ln_eps.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::Parameter("eps grid must decrease toward 0".into()));
        }
        if self.ln_t_small.iter().any(|&x| x >= 0.0) || self.ln_t_large.iter().any(|&x| x <= 0.0) {
            return Err(Error::Parameter("t grids must lie in (0,1) and (1,∞)".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MOIndices {
    pub m_lower: f64,
    #[serde(rename = "M_upper")]
    pub m_upper: f64,
    pub ln_eps_grid: Vec<f64>,
    pub ln_t_grid: Vec<f64>,
    pub converged: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ZygmundKind {
    Z0,
    Zk,
}

#[derive(Debug, Clone)]
pub struct ZygmundOptions {
    /// Grid depths in octaves below δ₀, one constant per depth.
    pub depths: Vec<u32>,
    pub points_per_octave: u32,
    pub quad_tol: f64,
}

impl Default for ZygmundOptions {
    fn default() -> Self {
        Self {
            depths: vec![32, 64, 128, 256],
            points_per_octave: 2,
            quad_tol: 1e-10,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ZygmundSample {
    pub t: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZygmundReport {
    pub kind: ZygmundKind,
    /// `None` when the refinements neither settle nor grow consistently.
    pub holds: Option<bool>,
    pub constant: f64,
    pub worst_t: f64,
    pub refinement_constants: Vec<f64>,
    /// Ratios on the shallowest grid, one per tested t.
    #[serde(skip)]
    pub samples: Vec<ZygmundSample>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailReport {
    pub holds: bool,
    pub lower_bound: f64,
    /// `∫_{δ₀}^∞ W²/t⁵ dt`.
    pub integral: f64,
}

/// JSON form of a modulus: `{"family":"power","gamma":0.5,"k":2,"delta0":1.0,"W":1.0}`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModulusDescriptor {
    pub family: Option<String>,
    pub gamma: Option<f64>,
    pub lambda: Option<f64>,
    pub k: Option<f64>,
    pub delta0: Option<f64>,
    #[serde(rename = "W")]
    pub w: Option<f64>,
    pub samples: Option<Vec<(f64, f64)>>,
}

impl ModulusDescriptor {
    /// Builds the modulus, naming the offending field (under `prefix`) on error.
    pub fn build(&self, prefix: &str) -> Result<Modulus> {
        let field = |name: &str| {
            if prefix.is_empty() {
                name.to_string()
            } else {
                format!("{prefix}.{name}")
            }
        };
        let need = |v: Option<f64>, name: &str| v.ok_or_else(|| Error::config(field(name), "missing required field"));
        let family = self.family.as_deref().ok_or_else(|| Error::config(field("family"), "missing required field"))?;
        let k = need(self.k, "k")?;
        let wrap = |e: Error, name: &str| match e {
            Error::Parameter(msg) => Error::config(field(name), msg),
            other => other,
        };
        let fam = match family {
            "power" => Family::Power {
                gamma: need(self.gamma, "gamma")?,
            },
            "powerlog" => Family::PowerLog {
                gamma: need(self.gamma, "gamma")?,
                lambda: need(self.lambda, "lambda")?,
            },
            "powerloglog" => Family::PowerLogLog {
                gamma: need(self.gamma, "gamma")?,
                lambda: need(self.lambda, "lambda")?,
            },
            "tabulated" => {
                let samples = self
                    .samples
                    .as_ref()
                    .ok_or_else(|| Error::config(field("samples"), "missing required field"))?;
                Family::Tabulated(Table::new(samples).map_err(|e| wrap(e, "samples"))?)
            }
            other => return Err(Error::config(field("family"), format!("unknown family `{other}`"))),
        };
        let mut m = Modulus::new(fam, k).map_err(|e| wrap(e, "gamma"))?;
        if let Some(d) = self.delta0 {
            m = m.with_delta0(d).map_err(|e| wrap(e, "delta0"))?;
        } else if let Family::Tabulated(table) = &m.family {
            let hi = table.hull().1.exp();
            m = m.with_delta0(hi)?;
        }
        if let Some(w) = self.w {
            m = m.with_extension(w).map_err(|e| wrap(e, "W"))?;
        }
        Ok(m)
    }
}
