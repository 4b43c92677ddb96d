//! Power moduli in several Euclidean dimensions: T(t) = t^{2α+n−1}/(2α+n−1) exactly.

use lipfourier::equivalence::{equivalence_report, EquivalenceOptions};
use lipfourier::modulus::Modulus;
use lipfourier::spaces::{RadialProfile, SpectralSpace, Spectrum};

fn main() -> lipfourier::Result<()> {
    let opts = EquivalenceOptions::default();
    for n in 1..=3 {
        let space = SpectralSpace::euclidean(n)?;
        for alpha in [0.5, 1.0, 1.5] {
            let spec = Spectrum::new(&space, &RadialProfile::power(alpha, n)?)?;
            let r = equivalence_report(&spec, &Modulus::power(alpha, 2.0)?, &opts)?;
            let expected = 1.0 / (2.0 * alpha + n as f64 - 1.0);
            println!(
                "n={n} α={alpha:<4} forward sup {:.12} (expected {expected:.12})  verdict {}",
                r.direction_forward.ratio_sup,
                r.verdict.as_str()
            );
        }
    }
    Ok(())
}
