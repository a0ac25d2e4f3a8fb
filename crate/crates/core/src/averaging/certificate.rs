//! Threshold `A₀(ν,η)`, exponent `c_A` and prefactor for fast-oscillating flows,
//! assembled from estimated spectral constants.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::averaging::damping::{damping_constant, DampingEstimate};
use crate::averaging::spectrum::DetectingSpectrum;
use crate::averaging::sylvester::SylvesterEstimate;
use crate::error::{param, Result};
use crate::flows::FlowSpec;
use crate::report::{BoundKind, BoundReport, Sample};
use crate::spectral::SpectralField2D;
use crate::trajectory::Trajectory;

/// First mean-zero Laplacian eigenvalue with integer frequencies.
pub const LAMBDA1: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind", content = "value")]
pub enum EtaChoice {
    Fixed(f64),
    /// `η = νλ₁`, allowed when `νλ₁ ≤ 1`.
    Viscous,
}

impl EtaChoice {
    pub fn resolve(self, nu: f64) -> Result<f64> {
        let eta = match self {
            EtaChoice::Fixed(e) => e,
            EtaChoice::Viscous => nu * LAMBDA1,
        };
        if !(eta > 0.0 && eta <= 1.0) {
            return Err(param(format!("eta must lie in (0, 1], got {eta}")));
        }
        Ok(eta)
    }
}

/// `C_R(L) = max{L/2π, 1, √(L/4π)} · √(2 max(1/L, L))`.
pub fn multiplier_constant(period: f64) -> f64 {
    let l = period;
    (l / (2.0 * PI)).max(1.0).max((l / (4.0 * PI)).sqrt()) * (2.0 * (1.0 / l).max(l)).sqrt()
}

/// Scalar inputs of the certificate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FastInputs {
    pub nu: f64,
    pub eta: f64,
    pub gamma_nu: f64,
    #[serde(rename = "Q_nu")]
    pub q_nu: f64,
    #[serde(rename = "K0_nu")]
    pub k0_nu: f64,
    #[serde(rename = "K2_nu")]
    pub k2_nu: f64,
    pub g_nu: f64,
    #[serde(rename = "C_R")]
    pub c_r: f64,
    #[serde(rename = "C_S")]
    pub c_s: f64,
    /// `1 + ‖u‖_{L∞W^{1,∞}}`.
    #[serde(rename = "M")]
    pub m: f64,
    #[serde(rename = "D_eta")]
    pub d_eta: f64,
    pub rho0_l2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdTerms {
    pub four_k: f64,
    pub nu: f64,
    pub sixty_four_k2_over_nu: f64,
    pub thousand_cs_k: f64,
    pub two_k_rho0_over_q: f64,
    pub d_k_over_eta: f64,
}

impl ThresholdTerms {
    pub fn as_array(&self) -> [f64; 6] {
        [
            self.four_k,
            self.nu,
            self.sixty_four_k2_over_nu,
            self.thousand_cs_k,
            self.two_k_rho0_over_q,
            self.d_k_over_eta,
        ]
    }

    pub fn max(&self) -> f64 {
        self.as_array().into_iter().fold(f64::NEG_INFINITY, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FastCertificate {
    pub inputs: FastInputs,
    #[serde(rename = "S_nu")]
    pub s_nu: f64,
    #[serde(rename = "K_nu")]
    pub k_nu: f64,
    pub terms: ThresholdTerms,
    #[serde(rename = "A0")]
    pub a0: f64,
    pub c_a: f64,
    #[serde(rename = "C")]
    pub prefactor: f64,
    pub lambda1: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub damping: Option<DampingEstimate>,
    pub estimated_at_truncation: bool,
}

impl FastCertificate {
    pub fn from_inputs(inputs: FastInputs) -> Result<FastCertificate> {
        let FastInputs {
            nu,
            eta,
            gamma_nu,
            q_nu,
            k0_nu,
            k2_nu,
            g_nu,
            c_r,
            c_s,
            m,
            d_eta,
            rho0_l2,
        } = inputs;
        if nu.is_nan() || nu <= 0.0 {
            return Err(param("nu must be positive"));
        }
        if !(eta > 0.0 && eta <= 1.0) {
            return Err(param(format!("eta must lie in (0, 1], got {eta}")));
        }
        if q_nu.is_nan() || q_nu <= 0.0 {
            return Err(param("Q_nu must be positive"));
        }
        let s_nu = 1.0 + k2_nu + g_nu;
        let k = 1e6 * (c_r * c_s * m * s_nu).powi(2);
        let terms = ThresholdTerms {
            four_k: 4.0 * k,
            nu,
            sixty_four_k2_over_nu: 64.0 * k * k / nu,
            thousand_cs_k: 1000.0 * c_s * k,
            two_k_rho0_over_q: 2.0 * k * rho0_l2 / q_nu,
            d_k_over_eta: d_eta * k / eta,
        };
        Ok(FastCertificate {
            inputs,
            s_nu,
            k_nu: k,
            a0: terms.max(),
            terms,
            c_a: gamma_nu + 2.0 * eta,
            prefactor: q_nu / (2.0 * d_eta * (k0_nu + 1.0)),
            lambda1: LAMBDA1,
            damping: None,
            estimated_at_truncation: false,
        })
    }

    /// `γ_ν + η + D_η𝒦_ν/A`.
    pub fn sharper_exponent(&self, a: f64) -> f64 {
        self.inputs.gamma_nu + self.inputs.eta + self.inputs.d_eta * self.k_nu / a
    }

    /// Exponent used at amplitude `A`, and whether `A` clears the threshold.
    pub fn exponent_at(&self, a: f64) -> (f64, bool) {
        if a > self.a0 {
            (self.c_a.min(self.sharper_exponent(a)), true)
        } else {
            (self.sharper_exponent(a), false)
        }
    }
}

/// Certificate from the estimated spectral data of `flow` and `rho0`.
pub fn fast_certificate(
    flow: &FlowSpec,
    rho0: &SpectralField2D,
    nu: f64,
    eta: EtaChoice,
    spectrum: &DetectingSpectrum,
    sylvester: &SylvesterEstimate,
) -> Result<FastCertificate> {
    let eta = eta.resolve(nu)?;
    let damping = damping_constant(&spectrum.g, spectrum.gamma_nu, eta)?;
    let inputs = FastInputs {
        nu,
        eta,
        gamma_nu: spectrum.gamma_nu,
        q_nu: spectrum.q_norm,
        k0_nu: spectrum.k0,
        k2_nu: spectrum.k2,
        g_nu: spectrum.g_norm,
        c_r: multiplier_constant(flow.period()),
        c_s: sylvester.c_s,
        m: 1.0 + flow.lip(),
        d_eta: damping.d,
        rho0_l2: rho0.l2_norm(),
    };
    let mut cert = FastCertificate::from_inputs(inputs)?;
    cert.damping = Some(damping);
    cert.estimated_at_truncation = true;
    Ok(cert)
}

/// `‖ρ(t)‖₂ ≥ C e^{−c t}` with `c = c_A` above the threshold and the
/// A-dependent exponent otherwise.
pub fn check_fast_bound(traj: &Trajectory, cert: &FastCertificate, a: f64, tol: f64) -> Result<BoundReport> {
    let (rate, above) = cert.exponent_at(a);
    let ln_c = cert.prefactor.ln();
    let samples = traj
        .iter()
        .map(|(t, f)| Sample::from_log(BoundKind::Lower, t, f.l2_norm(), ln_c - rate * t))
        .collect();
    let mut report = BoundReport::new(
        "fast_lower",
        BoundKind::Lower,
        serde_json::json!({ "certificate": cert, "A": a, "rate": rate }),
        samples,
        tol,
    );
    if !above {
        report = report.with_note(format!(
            "A = {a} is below A0 = {:.3e}; checked with the A-dependent exponent {rate:.6e}",
            cert.a0
        ));
    }
    if cert.estimated_at_truncation {
        report = report.with_note("spectral constants estimated at truncation, not rigorous");
    }
    Ok(report)
}
