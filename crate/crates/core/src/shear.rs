//! Viscous transport by a shear, one x-mode at a time.
//!
//! For `ρ = Σ f_k(y,t) e^{ikx}` each profile solves
//! `∂_t f_k + ν(k² − ∂_yy) f_k = −ikU(t,y) f_k`. Steps are Strang-split: exact
//! heat half-steps in l-space around a unimodular grid multiplication by
//! `e^{−ikU(t_mid,y)dt}`.

use std::collections::HashMap;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{param, Result};
use crate::flows::ShearSpec;
use crate::grid::{fast_len, Fft1};
use crate::spectral::{ModeProfile, SpectralField2D};
use crate::trajectory::{check_times, substeps, Trajectory};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShearOptions {
    /// Fixed step for every mode; `None` picks [`default_dt`] per mode.
    pub dt: Option<f64>,
    /// Grid size relative to the profile width.
    pub oversample: usize,
}

impl Default for ShearOptions {
    fn default() -> Self {
        ShearOptions {
            dt: None,
            oversample: 2,
        }
    }
}

/// `min(1e-2, 0.1/(|k|M + 1))`.
pub fn default_dt(k: i64, m: f64) -> f64 {
    (0.1 / (k.unsigned_abs() as f64 * m + 1.0)).min(1e-2)
}

/// Reusable integrator for one x-mode.
pub struct ModeStepper<'a> {
    shear: &'a ShearSpec,
    nu: f64,
    k: i64,
    lmax: usize,
    fft: Fft1,
    buf: Vec<Complex64>,
    advect: bool,
    steady: HashMap<u64, Vec<Complex64>>,
}

impl<'a> ModeStepper<'a> {
    pub fn new(shear: &'a ShearSpec, nu: f64, k: i64, lmax: usize, oversample: usize) -> Result<Self> {
        if !(nu.is_finite() && nu > 0.0) {
            return Err(param(format!(
                "viscosity must be positive (got {nu}); use the inviscid solver for nu = 0"
            )));
        }
        // 2x the profile plus room for the exponential's spectral tail
        let n = fast_len((oversample.max(2) * (2 * lmax + 1)).max(2 * lmax + 2 + 12 * shear.band()));
        Ok(ModeStepper {
            shear,
            nu,
            k,
            lmax,
            fft: Fft1::new(n),
            buf: vec![Complex64::new(0.0, 0.0); n],
            advect: k != 0 && !shear.is_zero(),
            steady: HashMap::new(),
        })
    }

    fn heat(&self, coeff: &mut [Complex64], h: f64) {
        let k2 = (self.k * self.k) as f64;
        for (i, c) in coeff.iter_mut().enumerate() {
            let l = i as f64 - self.lmax as f64;
            *c *= (-self.nu * (k2 + l * l) * h).exp();
        }
    }

    fn phase_factors(&self, t_mid: f64, h: f64) -> Vec<Complex64> {
        let kh = self.k as f64 * h;
        self.shear
            .eval_grid(t_mid, self.fft.len())
            .into_iter()
            .map(|u| Complex64::from_polar(1.0, -kh * u))
            .collect()
    }

    fn advection(&mut self, coeff: &mut [Complex64], t: f64, h: f64) {
        let factors = if self.shear.is_steady() {
            let key = h.to_bits();
            if !self.steady.contains_key(&key) {
                let f = self.phase_factors(0.0, h);
                self.steady.insert(key, f);
            }
            self.steady[&key].clone()
        } else {
            self.phase_factors(t + 0.5 * h, h)
        };
        self.fft.synthesize_into(coeff, self.lmax, &mut self.buf);
        for (v, e) in self.buf.iter_mut().zip(&factors) {
            *v *= e;
        }
        self.fft.analyze_into(&mut self.buf, self.lmax, coeff);
    }

    /// One Strang step from `t` to `t + h`.
    pub fn step(&mut self, coeff: &mut [Complex64], t: f64, h: f64) {
        if !self.advect {
            self.heat(coeff, h);
            return;
        }
        self.heat(coeff, 0.5 * h);
        self.advection(coeff, t, h);
        self.heat(coeff, 0.5 * h);
    }

    /// Advance from `t0` to `t1` in equal substeps no longer than `dt`.
    pub fn advance(&mut self, coeff: &mut [Complex64], t0: f64, t1: f64, dt: f64) {
        if !self.advect {
            // the heat semigroup is applied exactly in one factor
            self.heat(coeff, t1 - t0);
            return;
        }
        let (n, h) = substeps(t0, t1, dt);
        for i in 0..n {
            self.step(coeff, t0 + i as f64 * h, h);
        }
    }
}

/// Single Strang step of one profile.
pub fn step_mode(profile: &ModeProfile, shear: &ShearSpec, nu: f64, t: f64, dt: f64) -> Result<ModeProfile> {
    if dt.is_nan() || dt <= 0.0 {
        return Err(param(format!("time step must be positive, got {dt}")));
    }
    let mut st = ModeStepper::new(shear, nu, profile.k, profile.lmax, 2)?;
    let mut c = profile.coeff.clone();
    st.step(&mut c, t, dt);
    ModeProfile::new(profile.k, profile.lmax, c)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModeTrajectory {
    pub k: i64,
    pub nu: f64,
    pub times: Vec<f64>,
    pub profiles: Vec<ModeProfile>,
    pub energies: Vec<f64>,
}

/// Integrate one profile, recording it at `times` (starting from `t = 0`).
pub fn evolve_mode(
    profile: &ModeProfile,
    shear: &ShearSpec,
    nu: f64,
    times: &[f64],
    opts: &ShearOptions,
) -> Result<ModeTrajectory> {
    check_times(times)?;
    let dt = opts.dt.unwrap_or_else(|| default_dt(profile.k, shear.m()));
    if dt.is_nan() || dt <= 0.0 {
        return Err(param(format!("time step must be positive, got {dt}")));
    }
    let mut st = ModeStepper::new(shear, nu, profile.k, profile.lmax, opts.oversample)?;
    let mut c = profile.coeff.clone();
    let mut now = 0.0;
    let mut profiles = Vec::with_capacity(times.len());
    for &t in times {
        st.advance(&mut c, now, t, dt);
        now = t;
        profiles.push(ModeProfile::new(profile.k, profile.lmax, c.clone())?);
    }
    let energies = profiles.iter().map(|p| p.energy()).collect();
    Ok(ModeTrajectory {
        k: profile.k,
        nu,
        times: times.to_vec(),
        profiles,
        energies,
    })
}

/// Integrate every x-mode independently and reassemble the fields.
pub fn evolve_shear(
    rho0: &SpectralField2D,
    shear: &ShearSpec,
    nu: f64,
    times: &[f64],
    opts: &ShearOptions,
) -> Result<Trajectory> {
    rho0.ensure_mean_zero()?;
    check_times(times)?;
    let lat = rho0.lattice();
    let kmax = lat.kmax as i64;
    let modes: Vec<Result<Option<ModeTrajectory>>> = (-kmax..=kmax)
        .into_par_iter()
        .map(|k| {
            let p = rho0.x_mode(k)?;
            if p.energy() == 0.0 {
                return Ok(None);
            }
            evolve_mode(&p, shear, nu, times, opts).map(Some)
        })
        .collect();
    let mut fields = vec![SpectralField2D::zeros(lat); times.len()];
    for m in modes {
        if let Some(m) = m? {
            for (f, p) in fields.iter_mut().zip(&m.profiles) {
                f.set_x_mode(p)?;
            }
        }
    }
    Ok(Trajectory {
        nu,
        times: times.to_vec(),
        fields,
    })
}

/// Energy-identity residuals `|Δ(½‖ρ‖²)/Δt + ν⟨‖∇ρ‖²⟩| / ‖ρ₀‖²` per sample interval,
/// with the dissipation averaged by the trapezoid rule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DissipationReport {
    pub times: Vec<f64>,
    pub residuals: Vec<f64>,
    pub max_residual: f64,
}

pub fn dissipation_report(traj: &Trajectory) -> DissipationReport {
    let n0 = traj.fields.first().map(|f| f.l2_norm().powi(2)).unwrap_or(0.0);
    let e: Vec<f64> = traj.fields.iter().map(|f| 0.5 * f.l2_norm().powi(2)).collect();
    let g: Vec<f64> = traj.fields.iter().map(|f| f.grad_norm().powi(2)).collect();
    let mut times = Vec::new();
    let mut residuals = Vec::new();
    for i in 1..traj.len() {
        let dt = traj.times[i] - traj.times[i - 1];
        let r = ((e[i] - e[i - 1]) / dt + traj.nu * 0.5 * (g[i] + g[i - 1])).abs();
        times.push(0.5 * (traj.times[i] + traj.times[i - 1]));
        residuals.push(if n0 > 0.0 { r / n0 } else { r });
    }
    let max_residual = residuals.iter().copied().fold(0.0, f64::max);
    DissipationReport {
        times,
        residuals,
        max_residual,
    }
}
