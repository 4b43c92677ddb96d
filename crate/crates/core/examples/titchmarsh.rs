//! The one-dimensional case: ω(t) = t^α with k = 2 and an exact power profile.

use lipfourier::equivalence::{titchmarsh_n1, EquivalenceOptions};
use lipfourier::spaces::RadialProfile;

fn main() -> lipfourier::Result<()> {
    let opts = EquivalenceOptions::default();
    for alpha in [0.25, 0.5, 1.0, 1.5] {
        let r = titchmarsh_n1(&RadialProfile::power(alpha, 1)?, alpha, &opts)?;
        let slope = |f: Option<lipfourier::equivalence::ExponentFit>| f.map_or(f64::NAN, |f| f.slope);
        println!(
            "α={alpha:<5} {:<26} forward sup {:.6}  backward sup {:.6}  L slope {:.4}  T slope {:.4}",
            r.verdict.as_str(),
            r.direction_forward.ratio_sup,
            r.direction_backward.ratio_sup,
            slope(r.fitted_exponents.l_slope),
            slope(r.fitted_exponents.t_slope)
        );
    }
    Ok(())
}
