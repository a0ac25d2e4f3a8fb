//! Explicit exponential lower bound `‖ρ(t)‖₂ ≥ ‖ρ₀‖₂ e^{−c₂t}` for shear flows.

use serde::{Deserialize, Serialize};

use crate::error::{param, MixError, Result};
use crate::spectral::SpectralField2D;

/// Resolvent constant of the block estimate.
pub const C_RES: f64 = 1e4;

/// Modes with `a_k < MODE_EPS · N` are treated as absent.
pub const MODE_EPS: f64 = 1e-12;

/// Both block inequalities at `m`: `C_RES k²M²/(ν²m²) ≤ ¼` and `C_RES/(νm) ≤ δ_k/16`.
pub fn mk_predicate(k: i64, m_sup: f64, nu: f64, delta_k: f64, m: u64) -> bool {
    let k2 = (k * k) as f64;
    let mf = m as f64;
    C_RES * k2 * m_sup * m_sup / (nu * nu * mf * mf) <= 0.25 && C_RES / (nu * mf) <= delta_k / 16.0
}

/// Least `m ≥ 1` satisfying [`mk_predicate`], from the closed form
/// `max{⌈200|k|M/ν⌉, ⌈16·10⁴/(νδ_k)⌉, 1}` nudged onto the exact predicate.
pub fn mode_mk(k: i64, m_sup: f64, nu: f64, delta_k: f64) -> u64 {
    let first = (2.0 * C_RES.sqrt() * k.unsigned_abs() as f64 * m_sup / nu).ceil();
    let second = (16.0 * C_RES / (nu * delta_k)).ceil();
    let mut m = first.max(second).max(1.0) as u64;
    // rounding in the ratios can leave the ceiling one off in either direction
    while m > 1 && mk_predicate(k, m_sup, nu, delta_k, m - 1) {
        m -= 1;
    }
    while !mk_predicate(k, m_sup, nu, delta_k, m) {
        m += 1;
    }
    m
}

/// Reference search for the least admissible `m` using only the predicate
/// (doubling, then bisection; the predicate is monotone in `m`).
pub fn mode_mk_scan(k: i64, m_sup: f64, nu: f64, delta_k: f64) -> u64 {
    let ok = |m| mk_predicate(k, m_sup, nu, delta_k, m);
    if ok(1) {
        return 1;
    }
    let mut hi = 2u64;
    while !ok(hi) {
        hi *= 2;
    }
    let mut lo = hi / 2;
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if ok(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// Constants of one nonzero x-mode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeRecord {
    pub k: i64,
    pub a_k: f64,
    /// `‖A_k g_k‖₂` with `A_k = k² − ∂_yy`.
    pub ak_g: f64,
    #[serde(rename = "L_k")]
    pub l_k: f64,
    pub beta_k: f64,
    pub delta_k: f64,
    pub m_k: u64,
    #[serde(rename = "Lambda_k")]
    pub lambda_k: f64,
    #[serde(rename = "D_k")]
    pub d_k: f64,
    pub theta_k: f64,
    pub gamma_k: f64,
    #[serde(rename = "C_k")]
    pub c_k: f64,
}

/// Candidate exponent from one heat-only mode `cos(ly)`-type component.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeatRecord {
    pub l: i64,
    pub b_l: f64,
    #[serde(rename = "C_l")]
    pub c_l: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    XModes,
    HeatOnly,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct C2Certificate {
    #[serde(rename = "N")]
    pub n: f64,
    #[serde(rename = "M")]
    pub m: f64,
    pub nu: f64,
    #[serde(rename = "L_0")]
    pub l0: f64,
    pub beta_0: f64,
    pub delta_0: f64,
    pub laplacian_norm: f64,
    pub dx_norm: f64,
    pub branch: Branch,
    pub records: Vec<ModeRecord>,
    pub heat_records: Vec<HeatRecord>,
    pub k_star: Option<i64>,
    pub l_star: Option<i64>,
    /// Largest |frequency| examined before the divergence stopping rule fired.
    pub searched_to: i64,
    pub c2: f64,
}

/// `max{β₀, νk² + β₀·max(0, ln(N|k|/‖∂ₓρ₀‖))}`, below every `C_{k'}` with `|k'| ≥ |k|`.
fn x_mode_floor(beta0: f64, nu: f64, n: f64, dx: f64, k: i64) -> f64 {
    let kf = k.unsigned_abs() as f64;
    let log = (n * kf / dx).ln().max(0.0);
    beta0.max(nu * kf * kf + beta0 * log)
}

fn mode_record(
    rho0: &SpectralField2D,
    k: i64,
    m_sup: f64,
    nu: f64,
    n: f64,
    beta0: f64,
    delta0: f64,
) -> Result<Option<ModeRecord>> {
    let g = rho0.x_mode(k)?;
    let a_k = g.l2_norm();
    if a_k < MODE_EPS * n {
        return Ok(None);
    }
    let ak_g = g.ak_norm();
    let l_k = nu * ak_g + k.unsigned_abs() as f64 * m_sup * a_k;
    let beta_k = 2.0 * l_k / a_k;
    let delta_k = 1.0 / beta_k;
    let m_k = mode_mk(k, m_sup, nu, delta_k);
    let mf = m_k as f64;
    let lambda_k = nu * ((k * k) as f64 + mf * mf + mf + 0.5);
    let d_k = C_RES / (nu * mf);
    let theta_k = (delta_k / (32.0 * d_k)).sqrt().min(1.0);
    let gamma_k = beta_k.max(lambda_k + (1.0 / theta_k).ln() / delta_k);
    let c_k = beta0.max(gamma_k + (n / a_k).ln() / delta0);
    Ok(Some(ModeRecord {
        k,
        a_k,
        ak_g,
        l_k,
        beta_k,
        delta_k,
        m_k,
        lambda_k,
        d_k,
        theta_k,
        gamma_k,
        c_k,
    }))
}

/// Evaluate the constant chain and minimize over modes.
///
/// Modes are visited in the order `−1, 1, −2, 2, …`; a later mode replaces the
/// incumbent only when strictly smaller. The search stops once the closed-form
/// floor for all larger `|k|` reaches the incumbent.
pub fn c2_certificate(rho0: &SpectralField2D, m_sup: f64, nu: f64) -> Result<C2Certificate> {
    if !(nu.is_finite() && nu > 0.0) {
        return Err(param(format!("viscosity must be positive, got {nu}")));
    }
    if !(m_sup.is_finite() && m_sup >= 0.0) {
        return Err(param(format!("M must be finite and nonnegative, got {m_sup}")));
    }
    rho0.ensure_mean_zero()?;
    let n = rho0.l2_norm();
    if n == 0.0 {
        return Err(MixError::ZeroField);
    }
    let lap = rho0.laplacian_norm();
    let dx = rho0.dx_norm();
    let l0 = nu * lap + m_sup * dx;
    let beta0 = 2.0 * l0 / n;
    let delta0 = 1.0 / beta0;
    let lat = rho0.lattice();

    let has_x_modes = (1..=lat.kmax as i64)
        .flat_map(|k| [-k, k])
        .any(|k| rho0.x_mode(k).map(|p| p.l2_norm() >= MODE_EPS * n).unwrap_or(false));

    let mut cert = C2Certificate {
        n,
        m: m_sup,
        nu,
        l0,
        beta_0: beta0,
        delta_0: delta0,
        laplacian_norm: lap,
        dx_norm: dx,
        branch: if has_x_modes { Branch::XModes } else { Branch::HeatOnly },
        records: Vec::new(),
        heat_records: Vec::new(),
        k_star: None,
        l_star: None,
        searched_to: 0,
        c2: f64::INFINITY,
    };

    if has_x_modes {
        for kabs in 1..=lat.kmax as i64 {
            if x_mode_floor(beta0, nu, n, dx, kabs) >= cert.c2 {
                break;
            }
            cert.searched_to = kabs;
            for k in [-kabs, kabs] {
                if let Some(r) = mode_record(rho0, k, m_sup, nu, n, beta0, delta0)? {
                    if r.c_k < cert.c2 {
                        cert.c2 = r.c_k;
                        cert.k_star = Some(k);
                    }
                    cert.records.push(r);
                }
            }
        }
    } else {
        let g0 = rho0.x_mode(0)?;
        for labs in 1..=lat.lmax as i64 {
            if beta0.max(nu * (labs * labs) as f64) >= cert.c2 {
                break;
            }
            cert.searched_to = labs;
            for l in [-labs, labs] {
                let b_l = g0.get(l).norm();
                if b_l < MODE_EPS * n {
                    continue;
                }
                let c_l = beta0.max(nu * (l * l) as f64 + (n / b_l).ln() / delta0);
                if c_l < cert.c2 {
                    cert.c2 = c_l;
                    cert.l_star = Some(l);
                }
                cert.heat_records.push(HeatRecord { l, b_l, c_l });
            }
        }
    }
    if !cert.c2.is_finite() {
        return Err(MixError::Numerical(
            "no admissible mode produced a finite exponent".into(),
        ));
    }
    Ok(cert)
}

/// One row of the viscosity sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingRow {
    pub nu: f64,
    pub c2: f64,
    pub c2_times_nu: f64,
    pub c2_over_nu: f64,
    pub branch: Branch,
}

/// `c₂` over a list of viscosities for fixed data.
pub fn nu_scaling_report(rho0: &SpectralField2D, m_sup: f64, nus: &[f64]) -> Result<Vec<ScalingRow>> {
    nus.iter()
        .map(|&nu| {
            if !(nu > 0.0 && nu <= 1.0) {
                return Err(param(format!("viscosity {nu} outside (0, 1]")));
            }
            let c = c2_certificate(rho0, m_sup, nu)?;
            Ok(ScalingRow {
                nu,
                c2: c.c2,
                c2_times_nu: c.c2 * nu,
                c2_over_nu: c.c2 / nu,
                branch: c.branch,
            })
        })
        .collect()
}
