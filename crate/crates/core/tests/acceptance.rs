//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

use std::process::ExitCode;
use std::time::Instant;

use lipfourier::cli::{self, Command, ExperimentConfig};
use lipfourier::equivalence::{self, fit_exponent, EquivalenceOptions, Verdict};
use lipfourier::functionals::{self, dyadic_grid, FunctionalOptions};
use lipfourier::modulus::{Family, MoGrids, Modulus, ZygmundKind, ZygmundOptions};
use lipfourier::spaces::{self, bundled_profiles, RadialProfile, SpectralSpace, Spectrum};

type Outcome = Result<String, String>;

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn e<E: std::fmt::Display>(err: E) -> String {
    err.to_string()
}

const PAIRS: [(f64, usize); 9] = [
    (0.5, 1),
    (0.5, 2),
    (0.5, 3),
    (1.0, 1),
    (1.0, 2),
    (1.0, 3),
    (1.5, 1),
    (1.5, 2),
    (1.5, 3),
];

fn power_case(alpha: f64, n: usize) -> Result<(Spectrum, Modulus), String> {
    let space = SpectralSpace::euclidean(n).map_err(e)?;
    let spec = Spectrum::new(&space, &RadialProfile::power(alpha, n).map_err(e)?).map_err(e)?;
    Ok((spec, Modulus::power(alpha, 2.0).map_err(e)?))
}

fn forward_power_family() -> Outcome {
    let opts = EquivalenceOptions::default();
    let mut slowest = 0.0f64;
    for (alpha, n) in PAIRS {
        let start = Instant::now();
        let (spec, m) = power_case(alpha, n)?;
        let want = 1.0 / (2.0 * alpha + n as f64 - 1.0);
        let r = equivalence::forward_check(&spec, &m, &opts).map_err(e)?;
        for &v in &r.ratios {
            check((v - want).abs() <= 1e-8 * want, || format!("α={alpha}, n={n}: ratio {v} vs {want}"))?;
        }
        let grid = dyadic_grid(0.5, opts.j_max);
        let tail = functionals::tail_curve(&spec, &grid, &opts.functional).map_err(e)?;
        let fit = fit_exponent(&tail, 2..grid.len() - 2).map_err(e)?;
        let slope = 2.0 * alpha + n as f64 - 1.0;
        check((fit.slope - slope).abs() <= 0.02, || format!("α={alpha}, n={n}: T slope {}", fit.slope))?;
        let secs = start.elapsed().as_secs_f64();
        check(secs <= 10.0, || format!("α={alpha}, n={n} took {secs:.1}s"))?;
        slowest = slowest.max(secs);
    }
    Ok(format!("9 pairs, ratios within 1e-8, slowest pair {slowest:.2}s"))
}

fn backward_power_family() -> Outcome {
    let opts = EquivalenceOptions::default();
    let mut worst_slope = 0.0f64;
    let mut slowest = 0.0f64;
    for (alpha, n) in PAIRS {
        let start = Instant::now();
        let (spec, m) = power_case(alpha, n)?;
        let grid = dyadic_grid(0.5, opts.j_max + opts.refine);
        let l = functionals::lipschitz_curve(&spec, &grid, &opts.functional).map_err(e)?;
        let r = equivalence::backward_ratios(&l, &m, opts.j_max + 1).map_err(e)?;
        check(r.finite_and_stable(), || {
            format!("α={alpha}, n={n}: sup L/ω {} → {}", r.ratio_sup, r.ratio_sup_refined)
        })?;
        let base = l.truncated(opts.j_max + 1);
        let fit = fit_exponent(&base, 2..base.len() - 2).map_err(e)?;
        check((fit.slope - alpha).abs() <= 0.05, || format!("α={alpha}, n={n}: L slope {}", fit.slope))?;
        worst_slope = worst_slope.max((fit.slope - alpha).abs());
        let secs = start.elapsed().as_secs_f64();
        check(secs <= 60.0, || format!("α={alpha}, n={n} took {secs:.1}s"))?;
        slowest = slowest.max(secs);
    }
    Ok(format!("largest |L slope − α| = {worst_slope:.2e}, slowest pair {slowest:.2}s"))
}

fn titchmarsh() -> Outcome {
    let profile = RadialProfile::power(0.5, 1).map_err(e)?;
    let r = equivalence::titchmarsh_n1(&profile, 0.5, &EquivalenceOptions::default()).map_err(e)?;
    let f = r.direction_forward.ratio_sup;
    check((f - 1.0).abs() <= 1e-6, || format!("forward ratio {f}"))?;
    check(r.verdict == Verdict::EquivalentWithinConstants, || format!("verdict {:?}", r.verdict))?;
    Ok(format!("forward ratio {f:.12}, verdict {}", r.verdict.as_str()))
}

fn lemma_grid() -> Outcome {
    let start = Instant::now();
    let grid = |per_octave: i32| -> Vec<f64> {
        (-6 * per_octave..=6 * per_octave)
            .map(|k| 2f64.powf(k as f64 / per_octave as f64))
            .collect()
    };
    let (base, fine) = (grid(1), grid(2));
    let spaces = [
        SpectralSpace::euclidean(1),
        SpectralSpace::euclidean(2),
        SpectralSpace::euclidean(3),
        SpectralSpace::hyperbolic(2),
        SpectralSpace::hyperbolic(3),
    ];
    let mut notes = Vec::new();
    for space in spaces {
        let space = space.map_err(e)?;
        let a = space.lemma_estimates(&base, &base).map_err(e)?;
        let b = space.lemma_estimates(&fine, &fine).map_err(e)?;
        let label = space.label();
        for est in [&a, &b] {
            check(est.max_abs_phi <= 1.0 + 1e-12, || format!("{label}: max|φ| = {}", est.max_abs_phi))?;
            check(est.worst_quadratic_ratio <= 1.0 + 1e-9, || {
                format!("{label}: quadratic ratio {}", est.worst_quadratic_ratio)
            })?;
            check(est.min_gap_constant > 0.0, || format!("{label}: min gap {}", est.min_gap_constant))?;
        }
        let drift = (b.min_gap_constant - a.min_gap_constant).abs() / a.min_gap_constant;
        check(drift <= 0.05, || {
            format!("{label}: min gap {} → {} under doubling", a.min_gap_constant, b.min_gap_constant)
        })?;
        notes.push(format!("{label} C={:.4}", a.min_gap_constant));
    }
    let secs = start.elapsed().as_secs_f64();
    check(secs <= 30.0, || format!("took {secs:.1}s"))?;
    Ok(format!("{} in {secs:.2}s", notes.join(", ")))
}

fn plancherel_routes() -> Outcome {
    let start = Instant::now();
    let grid = dyadic_grid(0.5, 20);
    let opts = FunctionalOptions::default();
    let mut worst = 0.0f64;
    for n in 1..=3 {
        let space = SpectralSpace::euclidean(n).map_err(e)?;
        let spec = Spectrum::new(&space, &RadialProfile::gaussian(0.5).map_err(e)?).map_err(e)?;
        let spectral = functionals::lipschitz_curve(&spec, &grid, &opts).map_err(e)?;
        let physical = functionals::physical_lipschitz_curve(&spec, &grid).map_err(e)?;
        for (j, (a, b)) in spectral.values.iter().zip(&physical.values).enumerate() {
            let rel = (a - b).abs() / b;
            check(rel <= 1e-5, || format!("n={n}, t={:e}: {a} vs {b}", grid[j]))?;
            worst = worst.max(rel);
        }
    }
    let secs = start.elapsed().as_secs_f64();
    check(secs <= 120.0, || format!("took {secs:.1}s"))?;
    Ok(format!("largest relative difference {worst:.2e} in {secs:.2}s"))
}

fn plancherel_round_trips() -> Outcome {
    let mut notes = Vec::new();
    for b in bundled_profiles().map_err(e)? {
        let Some(p) = b.profile.physical else { continue };
        let r = spaces::plancherel_check(&b.space, &p).map_err(e)?;
        let tol = if b.space.is_euclidean() { 1e-6 } else { 1e-4 };
        check(r.calibration.rel_error <= tol, || {
            format!("{}: calibration error {}", b.label, r.calibration.rel_error)
        })?;
        check(r.norm_rel_error <= tol && r.round_trip_rel_error <= tol, || {
            format!("{}: norm {:e}, round trip {:e}", b.label, r.norm_rel_error, r.round_trip_rel_error)
        })?;
        notes.push(format!("{} {:.1e}", b.label, r.norm_rel_error.max(r.round_trip_rel_error)));
    }
    Ok(notes.join(", "))
}

fn modulus_suite() -> Outcome {
    for gamma in [0.25, 0.5, 1.0, 1.5] {
        let m = Modulus::power(gamma, 2.0).map_err(e)?;
        let idx = m.mo_indices(&MoGrids::default()).map_err(e)?;
        check((idx.m_lower - gamma).abs() <= 1e-6 && (idx.m_upper - gamma).abs() <= 1e-6, || {
            format!("power {gamma}: m = {}, M = {}", idx.m_lower, idx.m_upper)
        })?;
        let d = functionals::dyadic_sum_check(&m, 0.5, 32).map_err(e)?;
        let want = 1.0 / (1.0 - 4f64.powf(-gamma));
        check((d.bound_constant - want).abs() <= 1e-9 * want, || {
            format!("power {gamma}: dyadic constant {}", d.bound_constant)
        })?;
    }
    for (gamma, lambda) in [(0.5, 1.0), (0.5, -1.0), (1.0, 2.0)] {
        let m = Modulus::power_log(gamma, lambda, 2.0).map_err(e)?;
        let idx = match m.mo_indices(&MoGrids::default()) {
            Ok(i) => i,
            Err(lipfourier::Error::MoNonConvergence { partial, .. }) => *partial,
            Err(err) => return Err(e(err)),
        };
        check((idx.m_lower - gamma).abs() <= 0.05 && (idx.m_upper - gamma).abs() <= 0.05, || {
            format!("power-log ({gamma}, {lambda}): m = {}, M = {}", idx.m_lower, idx.m_upper)
        })?;
    }
    let family = [
        (Family::Power { gamma: 0.25 }, 2.0),
        (Family::Power { gamma: 0.5 }, 2.0),
        (Family::Power { gamma: 1.0 }, 2.0),
        (Family::Power { gamma: 1.5 }, 2.0),
        (Family::Power { gamma: 2.0 }, 2.0),
        (Family::Power { gamma: 1.0 }, 1.0),
        (Family::PowerLog { gamma: 0.5, lambda: 1.0 }, 2.0),
        (Family::PowerLog { gamma: 0.5, lambda: -1.0 }, 2.0),
        (Family::PowerLog { gamma: 1.0, lambda: 2.0 }, 2.0),
        (Family::PowerLogLog { gamma: 0.5, lambda: 1.0 }, 2.0),
        (Family::PowerLog { gamma: 0.0, lambda: -1.0 }, 2.0),
        (Family::PowerLog { gamma: 2.0, lambda: -1.0 }, 2.0),
    ];
    let opts = ZygmundOptions::default();
    let mut failing_zk = 0;
    for (fam, k) in family {
        let m = Modulus::new(fam.clone(), k).map_err(e)?;
        let idx = match m.mo_indices(&MoGrids::default()) {
            Ok(i) => i,
            Err(lipfourier::Error::MoNonConvergence { partial, .. }) => *partial,
            Err(err) => return Err(e(err)),
        };
        let z0 = m.zygmund_check(ZygmundKind::Z0, &opts).map_err(e)?.holds;
        let zk = m.zygmund_check(ZygmundKind::Zk, &opts).map_err(e)?.holds;
        let want_z0 = idx.m_lower > 0.025;
        let want_zk = idx.m_upper < k - 0.025;
        check(z0 == Some(want_z0) && zk == Some(want_zk), || {
            format!(
                "{fam:?}, k={k}: m={:.3}, M={:.3}, Z0 {z0:?}, Zk {zk:?}",
                idx.m_lower, idx.m_upper
            )
        })?;
        if zk == Some(false) {
            failing_zk += 1;
        }
    }
    Ok(format!("12 instances agree ({failing_zk} with Zk failing), indices and dyadic constants exact"))
}

fn diagnostics_suite() -> Outcome {
    let grid = dyadic_grid(0.5, 20);
    let opts = FunctionalOptions::default();
    let mut count = 0;
    let mut worst_ibp = 0.0f64;
    for b in bundled_profiles().map_err(e)? {
        let spec = Spectrum::new(&b.space, &b.profile).map_err(e)?;
        for &t in &grid {
            let js = functionals::j_split(&spec, t, &opts).map_err(e)?;
            let l2 = functionals::lipschitz_squared(&spec, t, &opts).map_err(e)?;
            let sum = js.j1.value + js.j2.value;
            let tol = (1e-8 * l2.value).max(3.0 * (js.j1.error + js.j2.error + l2.error));
            check((sum - l2.value).abs() <= tol, || format!("{} t={t:e}: J1+J2 = {sum}, L² = {}", b.label, l2.value))?;
            let w = functionals::weighted_tail(&spec, t, &opts).map_err(e)?.value;
            check(js.j2.value <= 4.0 * w * (1.0 + 1e-12), || format!("{} t={t:e}: J2 {} > 4·{w}", b.label, js.j2.value))?;
            let ks = functionals::k_split(&spec, t, &opts).map_err(e)?;
            check(js.j1.value <= 2.0 * (ks.k1.value + ks.k2.value) * (1.0 + 1e-12), || {
                format!("{} t={t:e}: J1 {} vs K {} {}", b.label, js.j1.value, ks.k1.value, ks.k2.value)
            })?;
            let aux = functionals::aux_tail_identity(&spec, t, &opts).map_err(e)?;
            check(aux.holds, || format!("{} t={t:e}: by-parts error {}", b.label, aux.rel_error))?;
            worst_ibp = worst_ibp.max(aux.rel_error);
            count += 1;
        }
    }
    Ok(format!("{count} profile/grid points, largest by-parts error {worst_ibp:.1e}"))
}

fn determinism() -> Outcome {
    let dirs = [tempfile::tempdir().map_err(e)?, tempfile::tempdir().map_err(e)?];
    let runs = [
        ("titchmarsh-n1", Command::Equivalence),
        ("corollary-power", Command::Equivalence),
        ("hyperbolic-h3", Command::Equivalence),
        ("plancherel-gaussian", Command::Plancherel),
        ("corollary-power", Command::Functionals),
    ];
    let mut compared = 0;
    for (i, (recipe, command)) in runs.iter().enumerate() {
        let mut bytes = Vec::new();
        for dir in &dirs {
            let mut cfg = ExperimentConfig::recipe(recipe).map_err(e)?;
            cfg.out = Some(dir.path().join(format!("{i}-{recipe}")));
            let outcome = cli::dispatch(*command, &cfg).map_err(e)?;
            let mut files: Vec<_> = outcome
                .files
                .into_iter()
                .filter(|f| f.extension().is_some_and(|x| x == "csv"))
                .collect();
            files.sort();
            bytes.push(
                files
                    .iter()
                    .map(|f| std::fs::read(f).map(|b| (f.file_name().unwrap().to_owned(), b)))
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(e)?,
            );
        }
        check(!bytes[0].is_empty() && bytes[0] == bytes[1], || format!("{recipe}: CSV outputs differ"))?;
        compared += bytes[0].len();
    }
    Ok(format!("{compared} CSV files byte-identical across two runs"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("forward ratio and tail exponent on the exact power family", forward_power_family),
        ("Lipschitz exponent and stability on the exact power family", backward_power_family),
        ("one-dimensional Titchmarsh recipe", titchmarsh),
        ("spherical function estimates on the dyadic grid", lemma_grid),
        ("spectral and physical Lipschitz routes agree", plancherel_routes),
        ("Plancherel norm equality and round trips", plancherel_round_trips),
        ("modulus indices, Zygmund verdicts and dyadic sums", modulus_suite),
        ("proof diagnostics on bundled profiles", diagnostics_suite),
        ("byte-identical CSV output", determinism),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {} PASS: {name}: {detail} [{secs:.1}s]", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {} FAIL: {name}: {why} [{secs:.1}s]", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
