//! Constant chains for the shear-flow lower bounds and their checks.

pub mod c2;
pub mod mixing;
pub mod sharpness;

pub use c2::{c2_certificate, mode_mk, nu_scaling_report, Branch, C2Certificate, ModeRecord, C_RES};
pub use mixing::{mixing_certificate, MixCertificate};
pub use sharpness::{sharpness_family, SharpnessCase};

use crate::error::Result;
use crate::report::{BoundKind, BoundReport, Sample};
use crate::trajectory::Trajectory;

/// Ceiling that treats values within rounding of an integer as that integer,
/// so e.g. `0.25⁻¹` or `2·0.2/0.1` do not round up past the exact value.
pub fn snapped_ceil(x: f64) -> f64 {
    let r = x.round();
    if (x - r).abs() <= 1e-12 * r.abs().max(1.0) {
        r
    } else {
        x.ceil()
    }
}

/// `‖ρ(t)‖₂ e^{c₂t}/N` at every sample.
pub fn check_exponential_bound(traj: &Trajectory, cert: &C2Certificate, tol: f64) -> Result<BoundReport> {
    let ln_n = cert.n.ln();
    let samples = traj
        .iter()
        .map(|(t, f)| Sample::from_log(BoundKind::Lower, t, f.l2_norm(), ln_n - cert.c2 * t))
        .collect();
    Ok(BoundReport::new(
        "exponential_lower",
        BoundKind::Lower,
        serde_json::to_value(cert)?,
        samples,
        tol,
    ))
}

/// Upper half of the sandwich, `‖ρ(t)‖₂ ≤ N e^{−νt}`.
pub fn check_heat_upper(traj: &Trajectory, n: f64, tol: f64) -> Result<BoundReport> {
    let ln_n = n.ln();
    let samples = traj
        .iter()
        .map(|(t, f)| Sample::from_log(BoundKind::Upper, t, f.l2_norm(), ln_n - traj.nu * t))
        .collect();
    Ok(BoundReport::new(
        "heat_upper",
        BoundKind::Upper,
        serde_json::json!({ "N": n, "nu": traj.nu }),
        samples,
        tol,
    ))
}

/// `mixing_scale(ρ(t)) · 2R_*` at every sample; the largest margin is the slack.
pub fn check_mixing_bound(traj: &Trajectory, cert: &MixCertificate, tol: f64) -> Result<BoundReport> {
    let mut samples = Vec::with_capacity(traj.len());
    for (t, f) in traj.iter() {
        samples.push(Sample::new(BoundKind::Lower, t, f.mixing_scale()?, cert.c_star));
    }
    let report = BoundReport::new(
        "mixing_floor",
        BoundKind::Lower,
        serde_json::to_value(cert)?,
        samples,
        tol,
    );
    let slack = report.min_margin;
    Ok(report.with_note(format!("slack: minimum ratio / c_star = {slack:.6}")))
}

/// `L_{k,N_k}(t) / (½E_k(t))` for every certified mode and sample; samples are
/// ordered by mode, then time, with `t` the sample time.
pub fn check_retention(traj: &Trajectory, cert: &MixCertificate, tol: f64) -> Result<BoundReport> {
    let mut samples = Vec::new();
    for m in &cert.modes {
        for (t, f) in traj.iter() {
            let g = f.x_mode(m.k)?;
            let e = g.energy();
            if e == 0.0 {
                continue;
            }
            samples.push(Sample::new(BoundKind::Lower, t, g.low_block_energy(m.n_k), 0.5 * e));
        }
    }
    Ok(BoundReport::new(
        "retention",
        BoundKind::Lower,
        serde_json::to_value(cert)?,
        samples,
        tol,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn snapped_ceil_absorbs_rounding() {
        assert_eq!(snapped_ceil(4.000000000000001), 4.0);
        assert_eq!(snapped_ceil(3.9999999999999996), 4.0);
        assert_eq!(snapped_ceil(4.01), 5.0);
        assert_eq!(snapped_ceil(0.0), 0.0);
    }
}
