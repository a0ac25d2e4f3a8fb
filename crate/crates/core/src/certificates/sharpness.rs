//! Heat-eigenfunction family `ρ₀ = cos(n_ν y)`, `U = 0`, `n_ν = ⌈ν^{−p}⌉`.
//!
//! The mixing scale stays exactly `1/n_ν` and the decay rate is `ν n_ν²`, so the
//! floor `1/(2R_*)` and the exponent `c₂` are attained up to fixed factors.

use serde::{Deserialize, Serialize};

use crate::certificates::snapped_ceil;
use crate::error::{param, Result};
use crate::flows::ShearSpec;
use crate::spectral::{Lattice, RealTerm, SpectralField2D};

#[derive(Debug, Clone, PartialEq)]
pub struct SharpnessCase {
    pub nu: f64,
    pub p: f64,
    pub n: u64,
    pub rho0: SpectralField2D,
    pub shear: ShearSpec,
    /// Exact mixing scale `1/n_ν` at every time.
    pub expected_ratio: f64,
    /// Exact decay rate `ν n_ν²`.
    pub decay_rate: f64,
    /// Expected floor `1/(2n_ν)`.
    pub expected_c_star: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SharpnessSummary {
    pub nu: f64,
    pub p: f64,
    pub n: u64,
    pub expected_ratio: f64,
    pub decay_rate: f64,
    pub expected_c_star: f64,
    /// For `p = 1`: `(ν⁻¹, 4ν⁻¹)`, which must bracket the decay rate.
    pub rate_window: Option<(f64, f64)>,
}

pub fn sharpness_family(nu: f64, p: f64) -> Result<SharpnessCase> {
    if !(nu > 0.0 && nu <= 1.0) {
        return Err(param(format!("viscosity {nu} outside (0, 1]")));
    }
    if !(p > 0.0 && p.is_finite()) {
        return Err(param(format!("exponent p must be positive, got {p}")));
    }
    let n = snapped_ceil(nu.powf(-p)) as u64;
    let lattice = Lattice::new(1, n as usize)?;
    let rho0 = SpectralField2D::from_terms(lattice, &[RealTerm::cos(1.0, 0, n as i64)])?;
    let nf = n as f64;
    Ok(SharpnessCase {
        nu,
        p,
        n,
        rho0,
        shear: ShearSpec::zero(),
        expected_ratio: 1.0 / nf,
        decay_rate: nu * nf * nf,
        expected_c_star: 0.5 / nf,
    })
}

impl SharpnessCase {
    pub fn summary(&self) -> SharpnessSummary {
        SharpnessSummary {
            nu: self.nu,
            p: self.p,
            n: self.n,
            expected_ratio: self.expected_ratio,
            decay_rate: self.decay_rate,
            expected_c_star: self.expected_c_star,
            rate_window: (self.p == 1.0).then(|| (1.0 / self.nu, 4.0 / self.nu)),
        }
    }
}
