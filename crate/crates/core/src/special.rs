//! Normalized Bessel functions `Γ(ν+1)·(2/x)^ν·J_ν(x)`.
//!
//! These are the radial plane-wave averages on `ℝⁿ` with `ν = (n−2)/2`.
//! Evaluation switches between the power series (small `x`), Miller's
//! backward recurrence (moderate `x`) and the Hankel asymptotic expansion
//! (large `x`). Orders are restricted to integers and half-integers `≥ −1/2`,
//! which is all the Euclidean backends need.

use statrs::function::gamma::{gamma, ln_gamma};

const SERIES_LIMIT: f64 = 6.0;

fn is_integer(nu: f64) -> bool {
    nu.fract() == 0.0
}

fn asymptotic_limit(nu: f64) -> f64 {
    30f64.max(2.0 * nu * nu + 10.0)
}

/// Power series `Σ (−x²/4)^k / (k! (ν+1)_k)`, starting at `k = first`.
fn normalized_series(nu: f64, x: f64, first: usize) -> f64 {
    let q = -0.25 * x * x;
    let mut term = 1.0;
    let mut sum = if first == 0 { 1.0 } else { 0.0 };
    for k in 1..200 {
        let kf = k as f64;
        term *= q / (kf * (nu + kf));
        if k >= first {
            sum += term;
        }
        if term.abs() <= 1e-18 * sum.abs().max(f64::MIN_POSITIVE) && k >= first {
            break;
        }
    }
    sum
}

/// `Γ(ν+1)(2/x)^ν J_ν(x)`, equal to 1 at `x = 0`.
pub fn normalized_bessel(nu: f64, x: f64) -> f64 {
    debug_assert!(nu >= -0.5 && (is_integer(nu) || is_integer(nu + 0.5)));
    let x = x.abs();
    if nu == -0.5 {
        return x.cos();
    }
    if nu == 0.5 {
        return if x < 1e-4 {
            normalized_series(nu, x, 0)
        } else {
            x.sin() / x
        };
    }
    if x <= SERIES_LIMIT {
        return normalized_series(nu, x, 0);
    }
    let j = bessel_j(nu, x);
    (ln_gamma(nu + 1.0) + nu * (2.0 / x).ln()).exp() * j
}

/// `1 − normalized_bessel(ν, x)` without cancellation at small `x`.
pub fn normalized_bessel_gap(nu: f64, x: f64) -> f64 {
    let x = x.abs();
    if x <= 1.0 {
        return -normalized_series(nu, x, 1);
    }
    if nu == -0.5 {
        let s = (0.5 * x).sin();
        return 2.0 * s * s;
    }
    1.0 - normalized_bessel(nu, x)
}

/// Bessel function of the first kind `J_ν(x)` for `x > 0`.
pub fn bessel_j(nu: f64, x: f64) -> f64 {
    debug_assert!(x > 0.0);
    if x <= SERIES_LIMIT {
        // J_ν(x) = (x/2)^ν / Γ(ν+1) · series
        return (0.5 * x).powf(nu) / gamma(nu + 1.0) * normalized_series(nu, x, 0);
    }
    if x >= asymptotic_limit(nu) {
        return bessel_j_asymptotic(nu, x);
    }
    bessel_j_miller(nu, x)
}

/// Hankel's expansion, truncated at the smallest term.
fn bessel_j_asymptotic(nu: f64, x: f64) -> f64 {
    let mu = 4.0 * nu * nu;
    let mut p = 0.0;
    let mut q = 0.0;
    let mut term = 1.0;
    let mut last = f64::INFINITY;
    for k in 0..60 {
        if k > 0 {
            let kf = k as f64;
            term *= (mu - (2.0 * kf - 1.0).powi(2)) / (kf * 8.0 * x);
        }
        if term.abs() > last && k > 2 {
            break;
        }
        last = term.abs();
        match k % 4 {
            0 => p += term,
            1 => q += term,
            2 => p -= term,
            _ => q -= term,
        }
        if term.abs() < 1e-17 * p.abs().max(1e-300) {
            break;
        }
    }
    let chi = x - (0.5 * nu + 0.25) * std::f64::consts::PI;
    (2.0 / (std::f64::consts::PI * x)).sqrt() * (p * chi.cos() - q * chi.sin())
}

/// Miller's backward recurrence, normalized by a sum rule (integer orders)
/// or by the elementary half-integer functions.
fn bessel_j_miller(nu: f64, x: f64) -> f64 {
    let base = if is_integer(nu) { 0.0 } else { -0.5 };
    let target = (nu - base).round() as usize;
    let start = target + x.ceil() as usize + 60;
    let start = start + (start % 2);

    let mut upper = 0.0; // J_{μ+1}
    let mut current = 1e-280; // J_μ
    let mut at_target = 0.0;
    let mut norm_sum = 0.0;
    let mut below_base = 0.0; // J_{base+1}, needed for half-integer normalization
    for m in (0..=start).rev() {
        let order = base + m as f64;
        if m == target {
            at_target = current;
        }
        if m == 1 {
            below_base = current;
        }
        if base == 0.0 && m % 2 == 0 {
            norm_sum += if m == 0 { current } else { 2.0 * current };
        }
        if m == 0 {
            break;
        }
        let lower = 2.0 * order / x * current - upper;
        upper = current;
        current = lower;
        if current.abs() > 1e250 {
            current *= 1e-250;
            upper *= 1e-250;
            at_target *= 1e-250;
            norm_sum *= 1e-250;
            below_base *= 1e-250;
        }
    }
    let scale = if base == 0.0 {
        1.0 / norm_sum
    } else {
        // current = J_{-1/2}, below_base = J_{1/2} up to a common factor
        let amp = (2.0 / (std::f64::consts::PI * x)).sqrt();
        let (c, s) = (x.cos(), x.sin());
        if c.abs() > s.abs() {
            amp * c / current
        } else {
            amp * s / below_base
        }
    };
    at_target * scale
}

/// Hypersurface area of the unit sphere in `ℝⁿ`.
pub fn unit_sphere_area(n: usize) -> f64 {
    let half = 0.5 * n as f64;
    2.0 * std::f64::consts::PI.powf(half) / gamma(half)
}
