//! `D = sup_{t≥0} e^{−(γ+η)t} ‖e^{−Gᵀt}‖₂` by sampling, refinement and a tail bound.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::averaging::expm::expm;
use crate::averaging::schur::SchurForm;
use crate::error::{param, Result};

const SAMPLES: usize = 400;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DampingEstimate {
    #[serde(rename = "D")]
    pub d: f64,
    /// Time at which the sampled supremum is attained.
    pub t_max: f64,
    /// Sampling horizon `10 d_ν/η`.
    pub horizon: f64,
    /// Upper bound on the integrand beyond the horizon.
    pub tail_bound: f64,
    /// Closed-form upper bound `s^{−(d−1)} Σ_{k<d} η^{−k}` from a scaled Schur basis.
    pub jordan_bound: f64,
    pub eta: f64,
}

fn spectral_norm(m: &DMatrix<Complex64>) -> f64 {
    m.clone().singular_values().max()
}

pub fn damping_constant(g: &DMatrix<Complex64>, gamma: f64, eta: f64) -> Result<DampingEstimate> {
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(param(format!("eta must lie in (0, 1], got {eta}")));
    }
    let d = g.nrows();
    if d == 0 {
        return Err(param("empty root space"));
    }
    let shift = Complex64::new(gamma + eta, 0.0);
    let a = -g.transpose() - DMatrix::<Complex64>::identity(d, d) * shift;
    let f = |t: f64| spectral_norm(&expm(&(&a * Complex64::new(t, 0.0))));

    let horizon = 10.0 * d as f64 / eta;
    let h = horizon / SAMPLES as f64;
    let (mut best_t, mut best) = (0.0, f(0.0));
    for i in 1..=SAMPLES {
        let t = i as f64 * h;
        let v = f(t);
        if v > best {
            best = v;
            best_t = t;
        }
    }
    // golden-section refinement on the bracketing samples
    let (mut lo, mut hi) = ((best_t - h).max(0.0), (best_t + h).min(horizon));
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let (mut x1, mut x2) = (hi - r * (hi - lo), lo + r * (hi - lo));
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..60 {
        if f1 > f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - r * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + r * (hi - lo);
            f2 = f(x2);
        }
    }
    for (t, v) in [(x1, f1), (x2, f2)] {
        if v > best {
            best = v;
            best_t = t;
        }
    }

    // Schur data of the shifted generator: ‖e^{At}‖ ≤ e^{αt} Σ_{k<d} (‖R‖t)^k/k!
    let schur = SchurForm::new(a.clone())?;
    let alpha = schur
        .eigenvalues()
        .iter()
        .map(|z| z.re)
        .fold(f64::NEG_INFINITY, f64::max);
    let mut strict = schur.t.clone();
    for i in 0..d {
        strict[(i, i)] = Complex64::new(0.0, 0.0);
    }
    let rnorm = strict.norm();
    let mut term = 1.0;
    let mut tail = 0.0;
    for k in 0..d {
        if k > 0 {
            term *= rnorm * horizon / k as f64;
        }
        tail += term;
    }
    let tail_bound = (alpha * horizon).exp() * tail;

    let s = if rnorm > 1.0 { 1.0 / rnorm } else { 1.0 };
    let jordan_bound = s.powi(-(d as i32 - 1)) * (0..d).map(|k| eta.powi(-(k as i32))).sum::<f64>();

    Ok(DampingEstimate {
        d: best.max(tail_bound),
        t_max: best_t,
        horizon,
        tail_bound,
        jordan_bound,
        eta,
    })
}
