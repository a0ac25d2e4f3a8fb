//! All-time floor `‖ρ(t)‖_{Ḣ⁻¹}/‖ρ(t)‖₂ ≥ 1/(2R_*)` for shear flows.

use serde::{Deserialize, Serialize};

use crate::certificates::c2::MODE_EPS;
use crate::certificates::snapped_ceil;
use crate::error::{param, MixError, Result};
use crate::spectral::SpectralField2D;

/// Window data of one retained x-mode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixMode {
    pub k: i64,
    pub a_k: f64,
    #[serde(rename = "J_k")]
    pub j_k: usize,
    #[serde(rename = "N_k")]
    pub n_k: usize,
    /// `sqrt(k² + N_k²)`.
    pub radius: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixCertificate {
    pub c2: f64,
    pub nu: f64,
    #[serde(rename = "M")]
    pub m: f64,
    #[serde(rename = "N")]
    pub n: f64,
    #[serde(rename = "K_c")]
    pub k_c: u64,
    #[serde(rename = "K_0")]
    pub k_0: u64,
    #[serde(rename = "K")]
    pub k_big: u64,
    pub modes: Vec<MixMode>,
    #[serde(rename = "J_star")]
    pub j_star: usize,
    pub r_star: f64,
    pub c_star: f64,
}

impl MixCertificate {
    pub fn mode(&self, k: i64) -> Option<&MixMode> {
        self.modes.iter().find(|m| m.k == k)
    }
}

pub fn mixing_certificate(rho0: &SpectralField2D, m_sup: f64, nu: f64, c2: f64) -> Result<MixCertificate> {
    if !(nu.is_finite() && nu > 0.0) {
        return Err(param(format!("viscosity must be positive, got {nu}")));
    }
    if !(c2.is_finite() && c2 > 0.0) {
        return Err(param(format!("c2 must be positive, got {c2}")));
    }
    rho0.ensure_mean_zero()?;
    let n = rho0.l2_norm();
    if n == 0.0 {
        return Err(MixError::ZeroField);
    }
    let lat = rho0.lattice();
    let kmax = lat.kmax as i64;
    let energies = rho0.x_mode_energies();
    let a2 = |k: i64| energies[(k + kmax) as usize];

    let k_c = snapped_ceil((2.0 * c2 / nu).sqrt()) as u64;
    // least J with Σ_{|k|>J} a_k² ≤ N²/2
    let k_0 = (0..=kmax)
        .find(|&j| (j + 1..=kmax).map(|k| a2(k) + a2(-k)).sum::<f64>() <= 0.5 * n * n)
        .unwrap_or(kmax) as u64;
    let k_big = k_c.max(k_0);
    let reach = (k_big.min(kmax as u64)) as i64;

    let mut modes = Vec::new();
    for k in -reach..=reach {
        let g = rho0.x_mode(k)?;
        let a_k = g.l2_norm();
        if a_k < MODE_EPS * n {
            continue;
        }
        let j_k = g.tail_cutoff(0.5 * a_k * a_k, 1);
        let n_k = if k == 0 {
            j_k
        } else {
            let barrier = snapped_ceil(k.unsigned_abs() as f64 * m_sup / nu) as usize;
            j_k.max(barrier).max(1)
        };
        let radius = (((k * k) as f64) + (n_k * n_k) as f64).sqrt();
        modes.push(MixMode {
            k,
            a_k,
            j_k,
            n_k,
            radius,
        });
    }
    if modes.is_empty() {
        return Err(MixError::Numerical("no retained mode in the window".into()));
    }
    let j_star = modes.iter().map(|m| m.j_k).max().unwrap_or(0);
    let r_star = modes.iter().map(|m| m.radius).fold(0.0, f64::max);
    Ok(MixCertificate {
        c2,
        nu,
        m: m_sup,
        n,
        k_c,
        k_0,
        k_big,
        modes,
        j_star,
        r_star,
        c_star: 1.0 / (2.0 * r_star),
    })
}
