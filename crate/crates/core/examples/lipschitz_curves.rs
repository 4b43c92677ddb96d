//! L(t) and T(t) on a dyadic grid for a Gaussian and a power profile on ℝ³.

use lipfourier::functionals::{dyadic_grid, lipschitz_curve, tail_curve, FunctionalOptions};
use lipfourier::spaces::{RadialProfile, SpectralSpace, Spectrum};

fn main() -> lipfourier::Result<()> {
    let space = SpectralSpace::euclidean(3)?;
    let grid = dyadic_grid(0.5, 12);
    let opts = FunctionalOptions::default();
    for (label, p) in [
        ("gaussian a=0.5", RadialProfile::gaussian(0.5)?),
        ("power α=0.75", RadialProfile::power(0.75, 3)?),
    ] {
        let spec = Spectrum::new(&space, &p)?;
        let l = lipschitz_curve(&spec, &grid, &opts)?;
        let t = tail_curve(&spec, &grid, &opts)?;
        println!("{label}");
        println!("{:>12} {:>22} {:>22}", "t", "L(t)", "T(t)");
        for i in 0..grid.len() {
            println!("{:>12.4e} {:>22.15e} {:>22.15e}", grid[i], l.values[i], t.values[i]);
        }
    }
    Ok(())
}
