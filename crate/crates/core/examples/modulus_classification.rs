//! Indices, Zygmund conditions and the Bary–Stechkin property for a few moduli.

use lipfourier::modulus::{MoGrids, Modulus, ZygmundKind, ZygmundOptions};

fn main() -> lipfourier::Result<()> {
    let moduli = [
        ("t^0.5, k=2", Modulus::power(0.5, 2.0)?),
        ("t^1.5 ln-weighted, k=2", Modulus::power_log(1.5, 1.0, 2.0)?),
        ("t^2, k=2", Modulus::power(2.0, 2.0)?),
        ("t^0.8 loglog, k=1", Modulus::power_log_log(0.8, -1.0, 1.0)?),
    ];
    let opts = ZygmundOptions::default();
    for (label, m) in &moduli {
        let idx = m.mo_indices(&MoGrids::for_modulus(m)?)?;
        let z0 = m.zygmund_check(ZygmundKind::Z0, &opts)?;
        let zk = m.zygmund_check(ZygmundKind::Zk, &opts)?;
        println!(
            "{label:<24} m={:.4} M={:.4} Z0={:?} (C={:.3}) Zk={:?} (C={:.3}) Bary-Stechkin={}",
            idx.m_lower,
            idx.m_upper,
            z0.holds,
            z0.constant,
            zk.holds,
            zk.constant,
            m.bary_stechkin()?
        );
    }
    Ok(())
}
