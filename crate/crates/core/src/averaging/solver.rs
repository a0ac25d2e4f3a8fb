//! Pseudospectral integration of `∂_tρ = νΔρ − u(At, x)·∇ρ` on a fixed lattice.
//!
//! Strang splitting: exact heat half-steps around one RK4 step of the advection,
//! with the products formed on a grid large enough that truncating back to the
//! lattice is an exact Galerkin projection.

use num_complex::Complex64;

use crate::error::{param, Result};
use crate::flows::{FlowSpec, TimeMode};
use crate::grid::{fast_len, node, Fft2};
use crate::spectral::{Lattice, SpectralField2D, Trig};
use crate::trajectory::{check_times, substeps, Trajectory};

pub const CFL: f64 = 0.2;
pub const DEFAULT_DT: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Solve2dOptions {
    /// Requested step; reduced further by the CFL guard.
    pub dt: f64,
    pub cfl: f64,
}

impl Default for Solve2dOptions {
    fn default() -> Self {
        Solve2dOptions {
            dt: DEFAULT_DT,
            cfl: CFL,
        }
    }
}

/// `CFL/(A·2π/L + lip·K)`, or infinity when nothing moves.
pub fn cfl_limit(flow: &FlowSpec, a: f64, lattice: Lattice, cfl: f64) -> f64 {
    let kmax = lattice.kmax.max(lattice.lmax) as f64;
    let rate = if flow.is_steady() {
        0.0
    } else {
        a * std::f64::consts::TAU / flow.period()
    };
    let denom = rate + flow.lip() * kmax;
    if denom > 0.0 {
        cfl / denom
    } else {
        f64::INFINITY
    }
}

/// Grid velocity of one streamfunction term, per unit amplitude.
struct TermGrid {
    ux: Vec<f64>,
    uy: Vec<f64>,
    mode: TimeMode,
    harmonic: u32,
}

struct Advection {
    lattice: Lattice,
    fft: Fft2,
    terms: Vec<(f64, TermGrid)>,
    period: f64,
    a: f64,
    dx: Vec<Complex64>,
    dy: Vec<Complex64>,
}

impl Advection {
    fn new(flow: &FlowSpec, lattice: Lattice, a: f64) -> Advection {
        let bx = flow
            .terms()
            .iter()
            .map(|t| t.kx.unsigned_abs() as usize)
            .max()
            .unwrap_or(0);
        let by = flow
            .terms()
            .iter()
            .map(|t| t.ky.unsigned_abs() as usize)
            .max()
            .unwrap_or(0);
        let nx = fast_len(2 * lattice.kmax + bx + 1);
        let ny = fast_len(2 * lattice.lmax + by + 1);
        let mut steady_x = vec![0.0; nx * ny];
        let mut steady_y = vec![0.0; nx * ny];
        let mut terms = Vec::new();
        for t in flow.terms() {
            if t.ampl == 0.0 || (t.kx == 0 && t.ky == 0) {
                continue;
            }
            let (kx, ky) = (t.kx as f64, t.ky as f64);
            let mut ux = vec![0.0; nx * ny];
            let mut uy = vec![0.0; nx * ny];
            for ix in 0..nx {
                let x = node(ix, nx);
                for iy in 0..ny {
                    let p = kx * x + ky * node(iy, ny);
                    let d = match t.phase_mode {
                        Trig::Cos => -p.sin(),
                        Trig::Sin => p.cos(),
                    };
                    ux[ix * ny + iy] = -ky * d;
                    uy[ix * ny + iy] = kx * d;
                }
            }
            // at A = 0 every term is frozen at phase 0
            let mode = if a == 0.0 { TimeMode::Steady } else { t.time_mode };
            let scale = t.ampl
                * if a == 0.0 {
                    t.time_factor(0.0, flow.period())
                } else {
                    1.0
                };
            if mode == TimeMode::Steady {
                for i in 0..nx * ny {
                    steady_x[i] += scale * ux[i];
                    steady_y[i] += scale * uy[i];
                }
            } else {
                terms.push((
                    scale,
                    TermGrid {
                        ux,
                        uy,
                        mode,
                        harmonic: t.harmonic,
                    },
                ));
            }
        }
        terms.insert(
            0,
            (
                1.0,
                TermGrid {
                    ux: steady_x,
                    uy: steady_y,
                    mode: TimeMode::Steady,
                    harmonic: 1,
                },
            ),
        );
        let len = lattice.len();
        let i = Complex64::new(0.0, 1.0);
        let dx = (0..len).map(|j| i * lattice.mode(j).0 as f64).collect();
        let dy = (0..len).map(|j| i * lattice.mode(j).1 as f64).collect();
        Advection {
            lattice,
            fft: Fft2::new(nx, ny),
            terms,
            period: flow.period(),
            a,
            dx,
            dy,
        }
    }

    fn factor(&self, g: &TermGrid, t: f64) -> f64 {
        let w = std::f64::consts::TAU * g.harmonic as f64 / self.period;
        let theta = self.a * t;
        match g.mode {
            TimeMode::Steady => 1.0,
            TimeMode::Cos => (w * theta).cos(),
            TimeMode::Sin => (w * theta).sin(),
        }
    }

    /// `−u(At)·∇f` projected onto the lattice.
    fn rhs(&self, f: &[Complex64], t: f64) -> Vec<Complex64> {
        let Lattice { kmax, lmax } = self.lattice;
        let fx: Vec<Complex64> = f.iter().zip(&self.dx).map(|(c, d)| c * d).collect();
        let fy: Vec<Complex64> = f.iter().zip(&self.dy).map(|(c, d)| c * d).collect();
        let gx = self.fft.synthesize(&fx, kmax, lmax);
        let gy = self.fft.synthesize(&fy, kmax, lmax);
        let mut prod = vec![Complex64::new(0.0, 0.0); gx.len()];
        for (s, g) in &self.terms {
            let c = s * self.factor(g, t);
            if c == 0.0 {
                continue;
            }
            for (i, p) in prod.iter_mut().enumerate() {
                *p -= c * (g.ux[i] * gx[i] + g.uy[i] * gy[i]);
            }
        }
        let mut out = self.fft.analyze(prod, kmax, lmax);
        out[self.lattice.index(0, 0)] = Complex64::new(0.0, 0.0);
        out
    }

    fn rk4(&self, f: &mut [Complex64], t: f64, h: f64) {
        let axpy = |a: &[Complex64], s: f64, b: &[Complex64]| -> Vec<Complex64> {
            a.iter().zip(b).map(|(x, y)| x + s * y).collect()
        };
        let k1 = self.rhs(f, t);
        let k2 = self.rhs(&axpy(f, 0.5 * h, &k1), t + 0.5 * h);
        let k3 = self.rhs(&axpy(f, 0.5 * h, &k2), t + 0.5 * h);
        let k4 = self.rhs(&axpy(f, h, &k3), t + h);
        for i in 0..f.len() {
            f[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
    }
}

fn heat(f: &mut [Complex64], decay: &[f64], h: f64) {
    for (c, d) in f.iter_mut().zip(decay) {
        *c *= (d * h).exp();
    }
}

/// Solution on `rho0`'s lattice at each time in `times`. `a = 0` freezes the flow at phase 0.
pub fn evolve_2d(
    rho0: &SpectralField2D,
    flow: &FlowSpec,
    a: f64,
    nu: f64,
    times: &[f64],
    opts: Solve2dOptions,
) -> Result<Trajectory> {
    check_times(times)?;
    rho0.ensure_mean_zero()?;
    if !nu.is_finite() || nu < 0.0 {
        return Err(param(format!("nu must be finite and nonnegative, got {nu}")));
    }
    if !a.is_finite() || a < 0.0 {
        return Err(param(format!("A must be finite and nonnegative, got {a}")));
    }
    if opts.dt.is_nan() || opts.dt <= 0.0 {
        return Err(param("dt must be positive"));
    }
    let lattice = rho0.lattice();
    let adv = Advection::new(flow, lattice, a);
    let moving = adv
        .terms
        .iter()
        .any(|(_, g)| g.ux.iter().chain(&g.uy).any(|v| *v != 0.0));
    let dt = opts.dt.min(cfl_limit(flow, a, lattice, opts.cfl));
    if dt < opts.dt {
        log::debug!("CFL guard lowers dt from {} to {dt}", opts.dt);
    }
    let decay: Vec<f64> = lattice.modes().map(|(k, l)| -nu * (k * k + l * l) as f64).collect();

    let mut f = rho0.coeffs().to_vec();
    let mut t = 0.0;
    let mut fields = Vec::with_capacity(times.len());
    for &target in times {
        if !moving {
            heat(&mut f, &decay, target - t);
        } else {
            let (n, h) = substeps(t, target, dt);
            for j in 0..n {
                let s = t + j as f64 * h;
                heat(&mut f, &decay, 0.5 * h);
                adv.rk4(&mut f, s, h);
                heat(&mut f, &decay, 0.5 * h);
            }
        }
        t = target;
        fields.push(SpectralField2D::from_vec(lattice, f.clone())?);
    }
    Ok(Trajectory {
        nu,
        times: times.to_vec(),
        fields,
    })
}
