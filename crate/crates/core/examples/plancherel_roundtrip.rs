//! Norm equality and inverse-transform round trips for the bundled profiles.

use lipfourier::spaces::{bundled_profiles, plancherel_check};

fn main() -> lipfourier::Result<()> {
    for b in bundled_profiles()? {
        let Some(p) = b.profile.physical else { continue };
        let r = plancherel_check(&b.space, &p)?;
        println!(
            "{:<24} ‖f‖² = {:.12e}  ∫H dμ = {:.12e}  norm err {:.1e}  round trip err {:.1e}  calibration err {:.1e}",
            b.label, r.physical_norm_squared, r.spectral_norm_squared, r.norm_rel_error, r.round_trip_rel_error, r.calibration.rel_error
        );
    }
    Ok(())
}
