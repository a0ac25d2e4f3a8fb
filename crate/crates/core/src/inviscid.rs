//! Exact transport by a shear without diffusion and the polynomial Ḣ⁻¹ floor.
//!
//! Each x-mode evolves as `f_k(y,t) = e^{−ikΦ(y,t)} f_k(y,0)` with
//! `Φ = ∫_0^t U`, so per-mode L² mass is conserved and only the y-spectrum
//! spreads. The floor `‖θ(t)‖_{Ḣ⁻¹} ≥ c_*/(1+t²)` follows from controlling how
//! fast that spreading can go.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{MixError, Result};
use crate::flows::ShearSpec;
use crate::grid::{fast_len, Fft1};
use crate::report::{BoundKind, BoundReport, Sample};
use crate::spectral::{ModeProfile, SpectralField2D};

/// Modes with `a_k < MODE_EPS · ‖θ₀‖₂` are ignored.
pub const MODE_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InviscidOptions {
    /// Multiplier applied to the sampled `L∞` and `L¹` norms.
    pub safety: f64,
    /// Grid oversampling factor for those norms.
    pub oversample: usize,
}

impl Default for InviscidOptions {
    fn default() -> Self {
        InviscidOptions {
            safety: 1.01,
            oversample: 4,
        }
    }
}

/// Constants of the floor for one x-mode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InviscidCandidate {
    pub k: i64,
    /// `S = Σ_m |θ̂(k,m)|²`, conserved in time.
    pub s: f64,
    /// `‖∂_y f_k⁰‖_{L¹}` (sampled, inflated).
    pub a: f64,
    /// `|k| · w11 · ‖f_k⁰‖_∞` (sampled, inflated).
    pub b: f64,
    pub d: f64,
    pub c_star: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InviscidCertificate {
    pub k: i64,
    #[serde(rename = "S")]
    pub s: f64,
    #[serde(rename = "A")]
    pub a: f64,
    #[serde(rename = "B")]
    pub b: f64,
    #[serde(rename = "D")]
    pub d: f64,
    pub c_star: f64,
    pub stationary: bool,
    pub w11: f64,
    pub safety: f64,
    pub candidates: Vec<InviscidCandidate>,
}

impl InviscidCertificate {
    /// `V(t) = A + Bt`, the bound on `‖∂_y f_k(·,t)‖_{L¹}`.
    pub fn v(&self, t: f64) -> f64 {
        self.a + self.b * t
    }

    /// `N(t) = max{1, ⌈4V(t)²/S⌉}`.
    pub fn tail_cutoff(&self, t: f64) -> usize {
        let v = self.v(t);
        ((4.0 * v * v / self.s).ceil() as usize).max(1)
    }

    pub fn envelope(&self, t: f64) -> f64 {
        self.c_star / (1.0 + t * t)
    }
}

fn grid_for(lmax: usize, band: usize, reach: f64) -> usize {
    // room for the exponential's spectrum so the truncated product is alias-free
    let spread = (1.2 * reach).ceil() as usize + 32;
    fast_len((2 * (2 * lmax + 1)).max(lmax + band + spread + 1))
}

/// Multiply every x-mode by its transport phase.
pub fn evolve_inviscid(theta0: &SpectralField2D, shear: &ShearSpec, t: f64) -> Result<SpectralField2D> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(MixError::Parameter(format!("time must be nonnegative, got {t}")));
    }
    if t == 0.0 {
        return Ok(theta0.clone());
    }
    let (reduced, drift) = shear.mean_zero_reduce();
    let lat = theta0.lattice();
    let shift = drift.value(t);
    let phi_max = reduced.phase_integral(t).iter().map(|c| c.norm()).sum::<f64>();

    let ks: Vec<i64> = (-(lat.kmax as i64)..=lat.kmax as i64).collect();
    let evolved: Vec<Result<ModeProfile>> = ks
        .par_iter()
        .map(|&k| {
            let f = theta0.x_mode(k)?;
            if k == 0 || f.energy() == 0.0 {
                return Ok(f);
            }
            let kf = k as f64;
            let n = grid_for(lat.lmax, lat.lmax, kf.abs() * phi_max);
            let fft = Fft1::new(n);
            let phi = reduced.phase_grid(t, n);
            let mut buf = fft.synthesize(&f.coeff, f.lmax);
            for (v, p) in buf.iter_mut().zip(&phi) {
                *v *= Complex64::from_polar(1.0, -kf * (p + shift));
            }
            ModeProfile::new(k, f.lmax, fft.analyze(&mut buf, f.lmax))
        })
        .collect();
    let mut out = SpectralField2D::zeros(lat);
    for p in evolved {
        out.set_x_mode(&p?)?;
    }
    Ok(out)
}

/// Sampled `‖f‖_∞` and `‖∂_y f‖_{L¹}` of a profile on an oversampled grid.
pub fn profile_sup_and_variation(f: &ModeProfile, oversample: usize) -> (f64, f64) {
    let n = fast_len(oversample.max(2) * (2 * f.lmax + 1));
    let fft = Fft1::new(n);
    let vals = fft.synthesize(&f.coeff, f.lmax);
    let sup = vals.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let lmax = f.lmax as i64;
    let deriv: Vec<Complex64> = (-lmax..=lmax)
        .map(|l| f.get(l) * Complex64::new(0.0, l as f64))
        .collect();
    let dv = fft.synthesize(&deriv, f.lmax);
    let l1 = dv.iter().map(|z| z.norm()).sum::<f64>() / n as f64;
    (sup, l1)
}

fn candidate(f: &ModeProfile, w11: f64, opts: &InviscidOptions) -> InviscidCandidate {
    let k = f.k;
    let s = f.energy();
    let (sup, var) = profile_sup_and_variation(f, opts.oversample);
    let a = opts.safety * var;
    let b = k.unsigned_abs() as f64 * w11 * opts.safety * sup;
    let d = 1.0 + 8.0 * (a * a + b * b) / s;
    let c_star = (s / (2.0 * ((k * k) as f64 + 2.0 * d * d))).sqrt();
    InviscidCandidate { k, s, a, b, d, c_star }
}

pub fn inviscid_certificate(theta0: &SpectralField2D, shear: &ShearSpec) -> Result<InviscidCertificate> {
    inviscid_certificate_with(theta0, shear, &InviscidOptions::default())
}

/// Evaluate the floor constants for every usable x-mode and keep the best.
pub fn inviscid_certificate_with(
    theta0: &SpectralField2D,
    shear: &ShearSpec,
    opts: &InviscidOptions,
) -> Result<InviscidCertificate> {
    let norm = theta0.l2_norm();
    if norm == 0.0 {
        return Err(MixError::ZeroField);
    }
    theta0.ensure_mean_zero()?;
    let kmax = theta0.lattice().kmax as i64;
    let w11 = shear.w11();
    let mut candidates = Vec::new();
    for k in (1..=kmax).flat_map(|k| [-k, k]) {
        let f = theta0.x_mode(k)?;
        if f.l2_norm() >= MODE_EPS * norm {
            candidates.push(candidate(&f, w11, opts));
        }
    }
    let best = candidates
        .iter()
        .fold(None::<&InviscidCandidate>, |acc, c| match acc {
            Some(b) if b.c_star >= c.c_star => Some(b),
            _ => Some(c),
        })
        .cloned();
    Ok(match best {
        Some(c) => InviscidCertificate {
            k: c.k,
            s: c.s,
            a: c.a,
            b: c.b,
            d: c.d,
            c_star: c.c_star,
            stationary: false,
            w11,
            safety: opts.safety,
            candidates,
        },
        None => InviscidCertificate {
            k: 0,
            s: theta0.x_mode(0)?.energy(),
            a: 0.0,
            b: 0.0,
            d: 1.0,
            c_star: theta0.hneg1_norm()?,
            stationary: true,
            w11,
            safety: opts.safety,
            candidates,
        },
    })
}

/// Margins of `‖θ(t)‖_{Ḣ⁻¹}(1+t²)/c_*` at the requested times.
pub fn check_inviscid_bound(
    theta0: &SpectralField2D,
    shear: &ShearSpec,
    cert: &InviscidCertificate,
    times: &[f64],
    tol: f64,
) -> Result<BoundReport> {
    let mut samples = Vec::with_capacity(times.len());
    for &t in times {
        let theta = evolve_inviscid(theta0, shear, t)?;
        samples.push(Sample::new(BoundKind::Lower, t, theta.hneg1_norm()?, cert.envelope(t)));
    }
    Ok(BoundReport::new(
        "inviscid_hneg1",
        BoundKind::Lower,
        serde_json::to_value(cert)?,
        samples,
        tol,
    ))
}

/// Tail control of the certified mode at time `t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailCheck {
    pub t: f64,
    pub n: usize,
    pub tail: f64,
    pub half_s: f64,
    /// Sampled `‖∂_y f_k(·,t)‖_{L¹}` against `V(t)`.
    pub variation: f64,
    pub v: f64,
}

impl TailCheck {
    pub fn holds(&self) -> bool {
        self.tail <= self.half_s
    }
}

/// Check `Σ_{|m|>N(t)} |θ̂(k,m,t)|² ≤ S/2` on an evolved field.
pub fn tail_check(theta_t: &SpectralField2D, cert: &InviscidCertificate, t: f64) -> Result<TailCheck> {
    let f = theta_t.x_mode(cert.k)?;
    let n = cert.tail_cutoff(t);
    let (_, variation) = profile_sup_and_variation(&f, 4);
    Ok(TailCheck {
        t,
        n,
        tail: f.high_block_energy(n),
        half_s: 0.5 * cert.s,
        variation,
        v: cert.v(t),
    })
}
