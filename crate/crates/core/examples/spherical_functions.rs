//! Spherical functions on each backend and the three estimates on a dyadic grid.

use lipfourier::spaces::SpectralSpace;

fn main() -> lipfourier::Result<()> {
    let spaces = [
        SpectralSpace::euclidean(1)?,
        SpectralSpace::euclidean(3)?,
        SpectralSpace::hyperbolic(2)?,
        SpectralSpace::hyperbolic(3)?,
    ];
    let dyadic: Vec<f64> = (-10..=10).map(|j| 2f64.powi(j)).collect();
    for s in &spaces {
        print!("{}  φ_λ(1) for λ = 0, 1, 5, 50:", s.label());
        for lambda in [0.0, 1.0, 5.0, 50.0] {
            print!(" {:+.6}", s.phi(lambda, 1.0)?);
        }
        let e = s.lemma_estimates(&dyadic, &dyadic)?;
        println!(
            "\n    max|φ| = {:.6}, max (1−φ)/(t²(λ²+ρ²)) = {:.4}, min (1−φ) at λt ≥ 1 = {:.4} at (λ, t) = ({:e}, {:e})",
            e.max_abs_phi, e.worst_quadratic_ratio, e.min_gap_constant, e.min_gap_at.0, e.min_gap_at.1
        );
    }
    Ok(())
}
