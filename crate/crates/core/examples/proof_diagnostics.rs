//! Splits of L² at λ = 1/t, the bounds on each piece and the by-parts identity.

use lipfourier::functionals::{aux_tail_identity, dyadic_sum_check, j_split, k_split, lipschitz_squared, weighted_tail, FunctionalOptions};
use lipfourier::modulus::Modulus;
use lipfourier::spaces::{RadialProfile, SpectralSpace, Spectrum};

fn main() -> lipfourier::Result<()> {
    let space = SpectralSpace::hyperbolic(3)?;
    let spec = Spectrum::new(&space, &RadialProfile::power(1.0, 3)?)?;
    let opts = FunctionalOptions::default();
    println!("{:>10} {:>14} {:>14} {:>14} {:>14} {:>14} {:>10}", "t", "L²", "J1", "J2", "4W", "2(K1+K2)", "by-parts");
    for t in [0.25, 0.0625, 1.0 / 64.0, 1.0 / 1024.0] {
        let l2 = lipschitz_squared(&spec, t, &opts)?.value;
        let js = j_split(&spec, t, &opts)?;
        let ks = k_split(&spec, t, &opts)?;
        let w = weighted_tail(&spec, t, &opts)?.value;
        let aux = aux_tail_identity(&spec, t, &opts)?;
        println!(
            "{t:>10.3e} {l2:>14.6e} {:>14.6e} {:>14.6e} {:>14.6e} {:>14.6e} {:>10.1e}",
            js.j1.value,
            js.j2.value,
            4.0 * w,
            2.0 * (ks.k1.value + ks.k2.value),
            aux.rel_error
        );
    }
    let m = Modulus::power(1.0, 2.0)?;
    let d = dyadic_sum_check(&m, 0.5, 32)?;
    println!("Σ ω(t/2^j)² ≤ {:.6} ω(t)² (geometric ratio 4^−{})", d.bound_constant, d.delta);
    Ok(())
}
