//! The equivalence on H³ for a power spectrum and for the Jacobi-type Gaussian.

use lipfourier::equivalence::{equivalence_report, EquivalenceOptions};
use lipfourier::modulus::Modulus;
use lipfourier::spaces::{Physical, RadialProfile, SpectralSpace, Spectrum};

fn main() -> lipfourier::Result<()> {
    let space = SpectralSpace::hyperbolic(3)?;
    let opts = EquivalenceOptions::default();
    let cases = [
        ("power α=1", RadialProfile::power(1.0, 3)?, Modulus::power(1.0, 2.0)?),
        ("jacobi gaussian", RadialProfile::from_physical(Physical::JacobiGaussian { a: 1.0 })?, Modulus::power(1.0, 2.0)?),
    ];
    for (label, p, m) in cases {
        let r = equivalence_report(&Spectrum::new(&space, &p)?, &m, &opts)?;
        println!("{label}: {}", r.summary_row());
    }
    Ok(())
}
