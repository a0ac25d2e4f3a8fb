//! Adjoint observables `q_j(t) = ⟨ρ(t), φ_j⟩` under the bilinear pairing.

use num_complex::Complex64;

use crate::spectral::SpectralField2D;
use crate::trajectory::Trajectory;

/// One row per trajectory sample, one entry per basis field.
pub fn observable_series(traj: &Trajectory, basis: &[SpectralField2D]) -> Vec<Vec<Complex64>> {
    traj.fields
        .iter()
        .map(|rho| basis.iter().map(|phi| rho.pairing(phi)).collect())
        .collect()
}

/// Euclidean norm of each row.
pub fn observable_norms(series: &[Vec<Complex64>]) -> Vec<f64> {
    series
        .iter()
        .map(|q| q.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
        .collect()
}
