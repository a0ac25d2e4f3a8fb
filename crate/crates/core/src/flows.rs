//! Shear profiles and streamfunction-defined velocity fields.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{schema, MixError, Result};
use crate::grid::node;
use crate::quadrature::{integrate_periodic, DEFAULT_PANELS};
use crate::spectral::{Lattice, RealTerm, SpectralField2D, Trig};

/// Relative slack allowed when checking declared bounds against samples.
pub const BOUND_CHECK_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TimeMode {
    Steady,
    Cos,
    Sin,
}

/// `ampl · T(s) · trig(kx x + ky y)` with `T` one of `1`, `cos(2π h s/L)`, `sin(2π h s/L)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlowTerm {
    pub ampl: f64,
    #[serde(default)]
    pub kx: i64,
    #[serde(default)]
    pub ky: i64,
    #[serde(default = "cos_trig")]
    pub phase_mode: Trig,
    #[serde(default = "steady_mode")]
    pub time_mode: TimeMode,
    #[serde(default = "one", skip_serializing_if = "is_one")]
    pub harmonic: u32,
}

fn cos_trig() -> Trig {
    Trig::Cos
}
fn steady_mode() -> TimeMode {
    TimeMode::Steady
}
fn one() -> u32 {
    1
}
fn is_one(h: &u32) -> bool {
    *h == 1
}

impl FlowTerm {
    pub fn steady(ampl: f64, kx: i64, ky: i64, phase_mode: Trig) -> Self {
        FlowTerm {
            ampl,
            kx,
            ky,
            phase_mode,
            time_mode: TimeMode::Steady,
            harmonic: 1,
        }
    }

    pub fn with_time(mut self, time_mode: TimeMode, harmonic: u32) -> Self {
        self.time_mode = time_mode;
        self.harmonic = harmonic;
        self
    }

    pub fn time_factor(&self, s: f64, period: f64) -> f64 {
        let w = TAU * self.harmonic as f64 / period;
        match self.time_mode {
            TimeMode::Steady => 1.0,
            TimeMode::Cos => (w * s).cos(),
            TimeMode::Sin => (w * s).sin(),
        }
    }

    /// `∫_0^t T(s) ds` by composite Gauss–Legendre quadrature (exact for steady terms).
    pub fn time_integral(&self, t: f64, period: f64, panels: usize) -> f64 {
        match self.time_mode {
            TimeMode::Steady => t,
            _ => integrate_periodic(
                |s| self.time_factor(s, period),
                0.0,
                t,
                period / self.harmonic.max(1) as f64,
                panels,
            ),
        }
    }

    /// Average of `T` over one period; exact, since quadrature round-off would
    /// leave spurious couplings in the averaged operator.
    pub fn time_mean(&self) -> f64 {
        match (self.time_mode, self.harmonic) {
            (TimeMode::Steady, _) | (TimeMode::Cos, 0) => 1.0,
            _ => 0.0,
        }
    }

    fn spatial(&self, x: f64, y: f64) -> f64 {
        let p = self.kx as f64 * x + self.ky as f64 * y;
        match self.phase_mode {
            Trig::Cos => p.cos(),
            Trig::Sin => p.sin(),
        }
    }

    fn spatial_term(&self, ampl: f64) -> RealTerm {
        RealTerm {
            ampl,
            kx: self.kx,
            ky: self.ky,
            trig: self.phase_mode,
        }
    }
}

/// Time dependence of a specification.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind", content = "period")]
pub enum TimeKind {
    Steady,
    Periodic(f64),
}

fn time_kind(terms: &[FlowTerm], period: f64) -> TimeKind {
    if terms.iter().all(|t| t.time_mode == TimeMode::Steady) {
        TimeKind::Steady
    } else {
        TimeKind::Periodic(period)
    }
}

fn check_period(period: f64) -> Result<()> {
    if !(period.is_finite() && period > 0.0) {
        return Err(MixError::Parameter(format!("period must be positive, got {period}")));
    }
    Ok(())
}

fn check_declared(name: &'static str, declared: f64, sampled: f64) -> Result<()> {
    if !(declared.is_finite() && declared >= 0.0) {
        return Err(MixError::Parameter(format!(
            "{name} must be finite and nonnegative, got {declared}"
        )));
    }
    if sampled > declared * (1.0 + BOUND_CHECK_TOL) + BOUND_CHECK_TOL {
        return Err(MixError::BoundViolated {
            name,
            declared,
            sampled,
        });
    }
    Ok(())
}

fn sample_times(kind: TimeKind) -> Vec<f64> {
    match kind {
        TimeKind::Steady => vec![0.0],
        TimeKind::Periodic(l) => (0..64).map(|i| l * i as f64 / 64.0).collect(),
    }
}

/// Shear velocity `(U(t,y), 0)` as a sum of `y`-only terms.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShearSpec {
    terms: Vec<FlowTerm>,
    m: f64,
    w11: f64,
    period: f64,
    panels: usize,
}

impl ShearSpec {
    /// Validates that terms are `x`-independent and the declared `M = ‖U‖_∞` and
    /// `w11 ≥ ‖∂_yU‖_{L¹}` (normalized measure) dominate sampled values.
    pub fn new(terms: Vec<FlowTerm>, m: f64, w11: f64, period: f64) -> Result<Self> {
        check_period(period)?;
        if let Some(t) = terms.iter().find(|t| t.kx != 0) {
            return Err(MixError::Parameter(format!(
                "shear terms must have kx = 0, got kx = {}",
                t.kx
            )));
        }
        let spec = ShearSpec {
            terms,
            m,
            w11,
            period,
            panels: DEFAULT_PANELS,
        };
        let (sup, l1) = spec.sampled_bounds();
        check_declared("M", m, sup)?;
        check_declared("w11", w11, l1)?;
        Ok(spec)
    }

    pub fn zero() -> Self {
        ShearSpec {
            terms: Vec::new(),
            m: 0.0,
            w11: 0.0,
            period: 1.0,
            panels: DEFAULT_PANELS,
        }
    }

    /// Steady `U = a sin(n y)` with `M = |a|` and `w11 = 2|a|n/π`.
    pub fn sin_mode(ampl: f64, n: i64) -> Self {
        let w11 = 2.0 * ampl.abs() * n.unsigned_abs() as f64 / PI;
        ShearSpec {
            terms: vec![FlowTerm::steady(ampl, 0, n, Trig::Sin)],
            m: ampl.abs(),
            w11,
            period: 1.0,
            panels: DEFAULT_PANELS,
        }
    }

    /// Steady `U = c`.
    pub fn constant(c: f64) -> Self {
        ShearSpec {
            terms: vec![FlowTerm::steady(c, 0, 0, Trig::Cos)],
            m: c.abs(),
            w11: 0.0,
            period: 1.0,
            panels: DEFAULT_PANELS,
        }
    }

    pub fn with_panels(mut self, panels: usize) -> Self {
        self.panels = panels.max(1);
        self
    }

    pub fn terms(&self) -> &[FlowTerm] {
        &self.terms
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    pub fn w11(&self) -> f64 {
        self.w11
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn time_kind(&self) -> TimeKind {
        time_kind(&self.terms, self.period)
    }

    pub fn is_steady(&self) -> bool {
        self.time_kind() == TimeKind::Steady
    }

    pub fn is_zero(&self) -> bool {
        self.terms.iter().all(|t| t.ampl == 0.0)
    }

    /// Largest `|ky|` among the terms (at least 1).
    pub fn band(&self) -> usize {
        self.terms
            .iter()
            .map(|t| t.ky.unsigned_abs() as usize)
            .max()
            .unwrap_or(0)
            .max(1)
    }

    pub fn value(&self, t: f64, y: f64) -> f64 {
        self.terms
            .iter()
            .map(|term| term.ampl * term.time_factor(t, self.period) * term.spatial(0.0, y))
            .sum()
    }

    /// `U(t, y_j)` on an `n`-point grid.
    pub fn eval_grid(&self, t: f64, n: usize) -> Vec<f64> {
        let weights: Vec<f64> = self
            .terms
            .iter()
            .map(|term| term.ampl * term.time_factor(t, self.period))
            .collect();
        self.combine_grid(&weights, n)
    }

    fn combine_grid(&self, weights: &[f64], n: usize) -> Vec<f64> {
        let mut out = vec![0.0; n];
        for (term, w) in self.terms.iter().zip(weights) {
            if *w == 0.0 {
                continue;
            }
            for (j, o) in out.iter_mut().enumerate() {
                *o += w * term.spatial(0.0, node(j, n));
            }
        }
        out
    }

    /// y-Fourier coefficients of `U(t,·)`, indexed `l = -band..=band`.
    pub fn profile(&self, t: f64) -> Vec<Complex64> {
        let weights: Vec<f64> = self
            .terms
            .iter()
            .map(|term| term.ampl * term.time_factor(t, self.period))
            .collect();
        self.combine_coeffs(&weights)
    }

    fn combine_coeffs(&self, weights: &[f64]) -> Vec<Complex64> {
        let band = self.band() as i64;
        let mut out = vec![Complex64::new(0.0, 0.0); (2 * band + 1) as usize];
        for (term, w) in self.terms.iter().zip(weights) {
            let (plus, minus) = term.spatial_term(*w).exp_pair();
            if term.ky == 0 {
                out[band as usize] += plus + minus;
            } else {
                out[(band + term.ky) as usize] += plus;
                out[(band - term.ky) as usize] += minus;
            }
        }
        out
    }

    /// `Ū(t)`, the y-average.
    pub fn mean_at(&self, t: f64) -> f64 {
        self.terms
            .iter()
            .filter(|term| term.ky == 0 && term.phase_mode == Trig::Cos)
            .map(|term| term.ampl * term.time_factor(t, self.period))
            .sum()
    }

    /// Split `U = Ũ + Ū(t)`; the drift integrates `Ū`.
    pub fn mean_zero_reduce(&self) -> (ShearSpec, Drift) {
        let (mean, rest): (Vec<FlowTerm>, Vec<FlowTerm>) = self.terms.iter().partition(|term| term.ky == 0);
        let mean: Vec<FlowTerm> = mean.into_iter().filter(|term| term.phase_mode == Trig::Cos).collect();
        let shift: f64 = mean.iter().map(|term| term.ampl.abs()).sum();
        let reduced = ShearSpec {
            terms: rest,
            m: self.m + shift,
            w11: self.w11,
            period: self.period,
            panels: self.panels,
        };
        let drift = Drift {
            terms: mean,
            period: self.period,
            panels: self.panels,
        };
        (reduced, drift)
    }

    pub fn is_mean_zero(&self) -> bool {
        self.terms
            .iter()
            .all(|t| t.ky != 0 || t.ampl == 0.0 || t.phase_mode == Trig::Sin)
    }

    fn phase_weights(&self, t: f64) -> Vec<f64> {
        self.terms
            .iter()
            .map(|term| term.ampl * term.time_integral(t, self.period, self.panels))
            .collect()
    }

    /// `Φ(·,t) = ∫_0^t U(s,·) ds` as y-coefficients, indexed like [`Self::profile`].
    pub fn phase_integral(&self, t: f64) -> Vec<Complex64> {
        self.combine_coeffs(&self.phase_weights(t))
    }

    /// `Φ(y_j, t)` on an `n`-point grid.
    pub fn phase_grid(&self, t: f64, n: usize) -> Vec<f64> {
        self.combine_grid(&self.phase_weights(t), n)
    }

    /// Sampled `sup |U|` and normalized `∫|∂_y U|` (max over sample times).
    pub fn sampled_bounds(&self) -> (f64, f64) {
        let n = (64 * self.band()).max(1024);
        let mut sup: f64 = 0.0;
        let mut l1: f64 = 0.0;
        for t in sample_times(self.time_kind()) {
            let u = self.eval_grid(t, n);
            sup = u.iter().fold(sup, |a, v| a.max(v.abs()));
            let mut d = 0.0;
            for j in 0..n {
                let y = node(j, n);
                let dv: f64 = self
                    .terms
                    .iter()
                    .map(|term| {
                        let s = term.ampl * term.time_factor(t, self.period) * term.ky as f64;
                        match term.phase_mode {
                            Trig::Cos => -s * (term.ky as f64 * y).sin(),
                            Trig::Sin => s * (term.ky as f64 * y).cos(),
                        }
                    })
                    .sum();
                d += dv.abs();
            }
            l1 = l1.max(d / n as f64);
        }
        (sup, l1)
    }
}

/// `X(t) = ∫_0^t Ū(s) ds`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Drift {
    terms: Vec<FlowTerm>,
    period: f64,
    panels: usize,
}

impl Drift {
    pub fn value(&self, t: f64) -> f64 {
        self.terms
            .iter()
            .map(|term| term.ampl * term.time_integral(t, self.period, self.panels))
            .sum()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.iter().all(|t| t.ampl == 0.0)
    }
}

/// Velocity coefficients `(û_x, û_y)` on a small lattice; the mean mode may be nonzero.
#[derive(Debug, Clone, PartialEq)]
pub struct VelocityField {
    pub ux: SpectralField2D,
    pub uy: SpectralField2D,
}

impl VelocityField {
    pub fn lattice(&self) -> Lattice {
        self.ux.lattice()
    }

    /// `max_κ |κ·û(κ)|`.
    pub fn divergence_defect(&self) -> f64 {
        self.lattice()
            .modes()
            .map(|(k, l)| (self.ux.get(k, l) * k as f64 + self.uy.get(k, l) * l as f64).norm())
            .fold(0.0, f64::max)
    }

    pub fn is_zero(&self) -> bool {
        self.ux.is_zero() && self.uy.is_zero()
    }

    /// Largest `max(|k|,|l|)` carrying a nonzero coefficient.
    pub fn band(&self) -> usize {
        let lat = self.lattice();
        lat.modes()
            .filter(|&(k, l)| self.ux.get(k, l).norm_sqr() + self.uy.get(k, l).norm_sqr() > 0.0)
            .map(|(k, l)| k.unsigned_abs().max(l.unsigned_abs()) as usize)
            .max()
            .unwrap_or(0)
    }
}

/// Divergence-free velocity `u = (−∂_yψ, ∂_xψ)` from a streamfunction `ψ(θ,x,y)`,
/// with phase `θ` of period `L`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FlowSpec {
    terms: Vec<FlowTerm>,
    lip: f64,
    period: f64,
    panels: usize,
}

impl FlowSpec {
    /// Validates that `lip ≥ max(sup|u|, sup|∇u|)` (Euclidean and Frobenius norms) on samples.
    pub fn new(terms: Vec<FlowTerm>, lip: f64, period: f64) -> Result<Self> {
        check_period(period)?;
        let spec = FlowSpec {
            terms,
            lip,
            period,
            panels: DEFAULT_PANELS,
        };
        check_declared("lip", lip, spec.sampled_lip())?;
        Ok(spec)
    }

    pub fn zero() -> Self {
        FlowSpec {
            terms: Vec::new(),
            lip: 0.0,
            period: 1.0,
            panels: DEFAULT_PANELS,
        }
    }

    /// `ψ = −(a/n)·…` chosen so that `u = (U(t,y), 0)` for the given shear.
    pub fn from_shear(shear: &ShearSpec) -> Result<Self> {
        let mut terms = Vec::with_capacity(shear.terms.len());
        for t in &shear.terms {
            if t.ky == 0 {
                if t.phase_mode == Trig::Sin || t.ampl == 0.0 {
                    continue;
                }
                return Err(MixError::Parameter(
                    "a shear with nonzero mean has no periodic streamfunction".into(),
                ));
            }
            let n = t.ky as f64;
            // −∂_y[(a/n) cos(ny)] = a sin(ny); −∂_y[−(a/n) sin(ny)] = a cos(ny)
            let (ampl, phase_mode) = match t.phase_mode {
                Trig::Sin => (t.ampl / n, Trig::Cos),
                Trig::Cos => (-t.ampl / n, Trig::Sin),
            };
            terms.push(FlowTerm { ampl, phase_mode, ..*t });
        }
        let lip = shear
            .terms
            .iter()
            .map(|t| t.ampl.abs() * (t.ky.unsigned_abs() as f64).max(1.0))
            .sum::<f64>();
        FlowSpec::new(terms, lip.max(shear.m), shear.period)
    }

    pub fn with_panels(mut self, panels: usize) -> Self {
        self.panels = panels.max(1);
        self
    }

    pub fn terms(&self) -> &[FlowTerm] {
        &self.terms
    }

    pub fn lip(&self) -> f64 {
        self.lip
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn time_kind(&self) -> TimeKind {
        time_kind(&self.terms, self.period)
    }

    pub fn is_steady(&self) -> bool {
        self.time_kind() == TimeKind::Steady
    }

    pub fn is_zero(&self) -> bool {
        self.terms.iter().all(|t| t.ampl == 0.0 || (t.kx == 0 && t.ky == 0))
    }

    /// Lattice holding every streamfunction term.
    pub fn lattice(&self) -> Lattice {
        let kx = self.terms.iter().map(|t| t.kx.unsigned_abs()).max().unwrap_or(0);
        let ky = self.terms.iter().map(|t| t.ky.unsigned_abs()).max().unwrap_or(0);
        Lattice {
            kmax: (kx as usize).max(1),
            lmax: (ky as usize).max(1),
        }
    }

    fn stream_from_weights(&self, weights: &[f64]) -> SpectralField2D {
        let terms: Vec<RealTerm> = self
            .terms
            .iter()
            .zip(weights)
            .map(|(t, w)| t.spatial_term(*w))
            .collect();
        SpectralField2D::from_terms(self.lattice(), &terms).expect("terms fit their own lattice")
    }

    fn velocity_from_weights(&self, weights: &[f64]) -> VelocityField {
        let psi = self.stream_from_weights(weights);
        let i = Complex64::new(0.0, 1.0);
        VelocityField {
            ux: psi.map_modes(|_, l| -i * l as f64),
            uy: psi.map_modes(|k, _| i * k as f64),
        }
    }

    fn weights_at(&self, theta: f64) -> Vec<f64> {
        self.terms
            .iter()
            .map(|t| t.ampl * t.time_factor(theta, self.period))
            .collect()
    }

    /// Streamfunction coefficients at phase `θ`.
    pub fn stream_at(&self, theta: f64) -> SpectralField2D {
        self.stream_from_weights(&self.weights_at(theta))
    }

    pub fn velocity_at(&self, theta: f64) -> VelocityField {
        self.velocity_from_weights(&self.weights_at(theta))
    }

    /// Steady flow with each term's amplitude replaced by its phase average.
    pub fn averaged(&self) -> FlowSpec {
        let terms = self
            .terms
            .iter()
            .map(|t| FlowTerm {
                ampl: t.ampl * t.time_mean(),
                time_mode: TimeMode::Steady,
                harmonic: 1,
                ..*t
            })
            .collect();
        FlowSpec {
            terms,
            lip: self.lip,
            period: self.period,
            panels: self.panels,
        }
    }

    /// `ū = (1/L)∫_0^L u(θ,·) dθ`.
    pub fn time_average(&self) -> VelocityField {
        self.averaged().velocity_at(0.0)
    }

    /// Sampled `max(sup|u|, sup|∇u|_F)` over space and phase.
    pub fn sampled_lip(&self) -> f64 {
        let n = 8 * self.lattice().kmax.max(self.lattice().lmax) + 32;
        let mut best: f64 = 0.0;
        for theta in sample_times(self.time_kind()) {
            let w = self.weights_at(theta);
            for ix in 0..n {
                let x = node(ix, n);
                for iy in 0..n {
                    let y = node(iy, n);
                    let (mut ux, mut uy) = (0.0, 0.0);
                    let (mut g11, mut g12, mut g21, mut g22) = (0.0, 0.0, 0.0, 0.0);
                    for (t, a) in self.terms.iter().zip(&w) {
                        let (kx, ky) = (t.kx as f64, t.ky as f64);
                        let p = kx * x + ky * y;
                        // ψ = a·c(p), ψ' = a·s1(p), ψ'' = a·s2(p)
                        let (d1, d2) = match t.phase_mode {
                            Trig::Cos => (-p.sin(), -p.cos()),
                            Trig::Sin => (p.cos(), -p.sin()),
                        };
                        ux += -a * ky * d1;
                        uy += a * kx * d1;
                        g11 += -a * ky * kx * d2;
                        g12 += -a * ky * ky * d2;
                        g21 += a * kx * kx * d2;
                        g22 += a * kx * ky * d2;
                    }
                    let speed = (ux * ux + uy * uy).sqrt();
                    let grad = (g11 * g11 + g12 * g12 + g21 * g21 + g22 * g22).sqrt();
                    best = best.max(speed).max(grad);
                }
            }
        }
        best
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FlowKind {
    Shear,
    Flow2d,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct BoundsJson {
    #[serde(rename = "M", default, skip_serializing_if = "Option::is_none")]
    pub m: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub w11: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lip: Option<f64>,
}

/// On-disk flow description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowJson {
    pub kind: FlowKind,
    #[serde(default)]
    pub terms: Vec<FlowTerm>,
    #[serde(default)]
    pub bounds: BoundsJson,
    #[serde(default = "unit_period")]
    pub period: f64,
}

fn unit_period() -> f64 {
    1.0
}

/// A parsed flow of either kind.
#[derive(Debug, Clone, PartialEq)]
pub enum Flow {
    Shear(ShearSpec),
    Flow2d(FlowSpec),
}

impl Flow {
    pub fn from_json(json: &FlowJson, path: &str) -> Result<Flow> {
        match json.kind {
            FlowKind::Shear => {
                let m = json
                    .bounds
                    .m
                    .ok_or_else(|| schema(format!("{path}.bounds.M"), "missing field"))?;
                let w11 = json
                    .bounds
                    .w11
                    .ok_or_else(|| schema(format!("{path}.bounds.w11"), "missing field"))?;
                ShearSpec::new(json.terms.clone(), m, w11, json.period).map(Flow::Shear)
            }
            FlowKind::Flow2d => {
                let lip = json
                    .bounds
                    .lip
                    .ok_or_else(|| schema(format!("{path}.bounds.lip"), "missing field"))?;
                FlowSpec::new(json.terms.clone(), lip, json.period).map(Flow::Flow2d)
            }
        }
    }

    pub fn to_json(&self) -> FlowJson {
        match self {
            Flow::Shear(s) => FlowJson {
                kind: FlowKind::Shear,
                terms: s.terms.clone(),
                bounds: BoundsJson {
                    m: Some(s.m),
                    w11: Some(s.w11),
                    lip: None,
                },
                period: s.period,
            },
            Flow::Flow2d(f) => FlowJson {
                kind: FlowKind::Flow2d,
                terms: f.terms.clone(),
                bounds: BoundsJson {
                    m: None,
                    w11: None,
                    lip: Some(f.lip),
                },
                period: f.period,
            },
        }
    }

    /// Named presets. `"couette"` is the periodic stand-in `U = sin y` (a linear
    /// profile is not a torus function); `"cellular"` is `ψ = sin x sin y`.
    pub fn preset(name: &str) -> Option<Flow> {
        match name {
            "couette" => Some(Flow::Shear(ShearSpec::sin_mode(1.0, 1))),
            "cellular" => Some(Flow::Flow2d(cellular())),
            "zero" => Some(Flow::Shear(ShearSpec::zero())),
            _ => None,
        }
    }

    pub fn as_shear(&self) -> Option<&ShearSpec> {
        match self {
            Flow::Shear(s) => Some(s),
            Flow::Flow2d(_) => None,
        }
    }

    /// The flow as a 2D field (shears are converted through their streamfunction).
    pub fn to_flow2d(&self) -> Result<FlowSpec> {
        match self {
            Flow::Shear(s) => FlowSpec::from_shear(s),
            Flow::Flow2d(f) => Ok(f.clone()),
        }
    }
}

fn cellular() -> FlowSpec {
    // sin x sin y = ½cos(x−y) − ½cos(x+y)
    FlowSpec {
        terms: vec![
            FlowTerm::steady(0.5, 1, -1, Trig::Cos),
            FlowTerm::steady(-0.5, 1, 1, Trig::Cos),
        ],
        lip: 2f64.sqrt(),
        period: 1.0,
        panels: DEFAULT_PANELS,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{Composite, DEFAULT_ORDER};

    #[test]
    fn presets_pass_their_own_bound_checks() {
        let s = ShearSpec::sin_mode(1.0, 1);
        let (sup, l1) = s.sampled_bounds();
        assert!(sup <= 1.0 + 1e-12);
        assert!(l1 <= 2.0 / PI + 1e-12);
        let c = cellular();
        assert!(c.sampled_lip() <= c.lip() * (1.0 + 1e-12));
        assert!(c.sampled_lip() > 1.4);
    }

    #[test]
    fn exact_phase_mean_matches_quadrature() {
        for (mode, h) in [
            (TimeMode::Cos, 0),
            (TimeMode::Cos, 2),
            (TimeMode::Sin, 1),
            (TimeMode::Steady, 1),
        ] {
            let t = FlowTerm {
                time_mode: mode,
                harmonic: h,
                ..FlowTerm::steady(1.0, 0, 1, Trig::Cos)
            };
            let q = Composite::new(0.0, 3.0, 64, DEFAULT_ORDER).integrate(|s| t.time_factor(s, 3.0)) / 3.0;
            assert!((t.time_mean() - q).abs() <= 1e-14);
        }
    }

    #[test]
    fn understated_bound_is_rejected() {
        let terms = vec![FlowTerm::steady(2.0, 0, 1, Trig::Cos)];
        assert!(matches!(
            ShearSpec::new(terms, 1.0, 5.0, 1.0),
            Err(MixError::BoundViolated { name: "M", .. })
        ));
    }

    #[test]
    fn shear_and_streamfunction_agree() {
        let s = ShearSpec::new(
            vec![
                FlowTerm::steady(0.7, 0, 2, Trig::Cos),
                FlowTerm::steady(-0.3, 0, 1, Trig::Sin),
            ],
            1.0,
            2.0,
            1.0,
        )
        .unwrap();
        let f = FlowSpec::from_shear(&s).unwrap();
        let v = f.velocity_at(0.0);
        let p = s.profile(0.0);
        let band = s.band() as i64;
        for l in -band..=band {
            assert!((v.ux.get(0, l) - p[(l + band) as usize]).norm() < 1e-15);
            assert_eq!(v.uy.get(0, l).norm(), 0.0);
        }
    }
}
