//! Certify, evolve and check one scenario.

use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::averaging::{
    averaged_operator, check_fast_bound, detecting_spectrum, evolve_2d, fast_certificate, sylvester_constant,
    Solve2dOptions,
};
use crate::certificates::{
    c2_certificate, check_exponential_bound, check_heat_upper, check_mixing_bound, check_retention, mixing_certificate,
};
use crate::error::{schema, Result};
use crate::flows::ShearSpec;
use crate::harness::scenario::{Regime, Resolved};
use crate::inviscid::{check_inviscid_bound, evolve_inviscid, inviscid_certificate, tail_check};
use crate::report::{BoundKind, BoundReport, Sample, Verdict};
use crate::shear::{dissipation_report, evolve_shear, ShearOptions};
use crate::trajectory::Trajectory;

/// All checks of one scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioReport {
    pub scenario: String,
    pub regime: Regime,
    pub verdict: Verdict,
    pub min_margin: f64,
    pub checks: Vec<BoundReport>,
    /// Regime-specific side output (energy residuals, spectrum summary, ...).
    #[serde(default, skip_serializing_if = "Value::is_null")]
    pub diagnostics: Value,
    pub runtime_s: f64,
}

impl ScenarioReport {
    fn new(s: &Resolved, checks: Vec<BoundReport>, diagnostics: Value, start: Instant) -> ScenarioReport {
        let checks: Vec<BoundReport> = checks.into_iter().map(|c| c.with_scenario(&s.name)).collect();
        let verdict = if checks.iter().all(BoundReport::passed) {
            Verdict::Pass
        } else {
            Verdict::Fail
        };
        let min_margin = checks.iter().map(|c| c.min_margin).fold(f64::INFINITY, f64::min);
        ScenarioReport {
            scenario: s.name.clone(),
            regime: s.regime,
            verdict,
            min_margin,
            checks,
            diagnostics,
            runtime_s: start.elapsed().as_secs_f64(),
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub fn check(&self, name: &str) -> Option<&BoundReport> {
        self.checks.iter().find(|c| c.check == name)
    }

    /// The report with every timing field zeroed, for byte-level comparisons.
    pub fn without_timing(&self) -> ScenarioReport {
        let mut r = self.clone();
        r.runtime_s = 0.0;
        for c in &mut r.checks {
            c.runtime_s = 0.0;
        }
        r
    }
}

fn shear_of(s: &Resolved) -> Result<&ShearSpec> {
    s.flow
        .as_shear()
        .ok_or_else(|| schema("flow", "this regime needs a shear flow"))
}

fn timed(start: Instant, report: BoundReport) -> BoundReport {
    let mut r = report;
    r.runtime_s = start.elapsed().as_secs_f64();
    r
}

/// Evolve the scenario without checking anything.
pub fn simulate(s: &Resolved) -> Result<Trajectory> {
    match s.regime {
        Regime::Inviscid => {
            let shear = shear_of(s)?;
            let fields = s
                .times
                .iter()
                .map(|&t| evolve_inviscid(&s.rho0, shear, t))
                .collect::<Result<Vec<_>>>()?;
            Ok(Trajectory {
                nu: 0.0,
                times: s.times.clone(),
                fields,
            })
        }
        Regime::DiffusiveShear => {
            let opts = ShearOptions {
                dt: s.dt,
                ..Default::default()
            };
            evolve_shear(&s.rho0, shear_of(s)?, viscosity(s), &s.times, &opts)
        }
        Regime::FastOscillation => {
            let flow = s.flow.to_flow2d()?;
            evolve_2d(&s.rho0, &flow, s.a, viscosity(s), &s.times, solve_opts(s))
        }
    }
}

fn viscosity(s: &Resolved) -> f64 {
    s.nu.unwrap_or(0.0)
}

fn solve_opts(s: &Resolved) -> Solve2dOptions {
    let mut o = Solve2dOptions::default();
    if let Some(dt) = s.dt {
        o.dt = dt;
    }
    o
}

/// The regime's certificate as JSON, without simulating.
pub fn certify(s: &Resolved) -> Result<Value> {
    match s.regime {
        Regime::Inviscid => Ok(serde_json::to_value(inviscid_certificate(&s.rho0, shear_of(s)?)?)?),
        Regime::DiffusiveShear => {
            let shear = shear_of(s)?;
            let nu = viscosity(s);
            let c2 = c2_certificate(&s.rho0, shear.m(), nu)?;
            let mix = mixing_certificate(&s.rho0, shear.m(), nu, c2.c2)?;
            Ok(json!({ "c2": c2, "mixing": mix }))
        }
        Regime::FastOscillation => {
            let (cert, spectrum, sylvester) = fast_pipeline(s)?;
            Ok(json!({
                "certificate": cert,
                "spectrum": spectrum.summary(64),
                "sylvester": sylvester,
            }))
        }
    }
}

type FastParts = (
    crate::averaging::FastCertificate,
    crate::averaging::DetectingSpectrum,
    crate::averaging::SylvesterEstimate,
);

fn fast_pipeline(s: &Resolved) -> Result<FastParts> {
    let flow = s.flow.to_flow2d()?;
    let nu = viscosity(s);
    let op = averaged_operator(&flow, nu, s.cutoff)?;
    let spectrum = detecting_spectrum(&op, &s.rho0)?;
    let sylvester = sylvester_constant(&op, &spectrum)?;
    let cert = fast_certificate(&flow, &s.rho0, nu, s.eta, &spectrum, &sylvester)?;
    Ok((cert, spectrum, sylvester))
}

/// Detecting-spectrum summary of the averaged operator at the scenario's cutoff.
pub fn spectrum(s: &Resolved, max_eigenvalues: usize) -> Result<Value> {
    let flow = s.flow.to_flow2d()?;
    let nu =
        s.nu.ok_or_else(|| schema("nu", "the averaged operator needs a viscosity"))?;
    let op = averaged_operator(&flow, nu, s.cutoff)?;
    let spec = detecting_spectrum(&op, &s.rho0)?;
    Ok(json!({
        "cutoff": s.cutoff,
        "dim": op.dim(),
        "drift_skewness": op.drift_skewness(),
        "spectrum": spec.summary(max_eigenvalues),
    }))
}

fn run_inviscid(s: &Resolved) -> Result<(Vec<BoundReport>, Value)> {
    let shear = shear_of(s)?;
    let t0 = Instant::now();
    let cert = inviscid_certificate(&s.rho0, shear)?;
    let main = timed(t0, check_inviscid_bound(&s.rho0, shear, &cert, &s.times, s.tol)?);

    let t1 = Instant::now();
    let mut samples = Vec::with_capacity(s.times.len());
    let mut worst_variation: f64 = 0.0;
    for &t in &s.times {
        let theta = evolve_inviscid(&s.rho0, shear, t)?;
        let tc = tail_check(&theta, &cert, t)?;
        worst_variation = worst_variation.max(tc.variation / tc.v.max(f64::MIN_POSITIVE));
        samples.push(Sample::new(BoundKind::Upper, t, tc.tail, tc.half_s));
    }
    let tail = BoundReport::new(
        "inviscid_tail",
        BoundKind::Upper,
        json!({ "k": cert.k, "S": cert.s, "safety": cert.safety }),
        samples,
        s.tol,
    );
    let tail = timed(t1, tail);
    Ok((vec![main, tail], json!({ "max_variation_over_V": worst_variation })))
}

fn run_diffusive(s: &Resolved) -> Result<(Vec<BoundReport>, Value)> {
    let shear = shear_of(s)?;
    let nu = viscosity(s);
    let t0 = Instant::now();
    let c2 = c2_certificate(&s.rho0, shear.m(), nu)?;
    let mix = mixing_certificate(&s.rho0, shear.m(), nu, c2.c2)?;
    let traj = simulate(s)?;
    let elapsed = t0.elapsed().as_secs_f64();
    let mut checks = vec![
        check_exponential_bound(&traj, &c2, s.tol)?,
        check_heat_upper(&traj, c2.n, s.tol)?,
        check_mixing_bound(&traj, &mix, s.tol)?,
        check_retention(&traj, &mix, s.tol)?,
    ];
    // certificates and the trajectory are shared, so each check carries the total
    for c in &mut checks {
        c.runtime_s = elapsed;
    }
    let energy = dissipation_report(&traj);
    Ok((checks, json!({ "energy_identity": energy })))
}

fn run_fast(s: &Resolved) -> Result<(Vec<BoundReport>, Value)> {
    let t0 = Instant::now();
    let (cert, spectrum, sylvester) = fast_pipeline(s)?;
    let traj = simulate(s)?;
    let report = timed(t0, check_fast_bound(&traj, &cert, s.a, s.tol)?);
    let diag = json!({
        "spectrum": spectrum.summary(16),
        "C_S": sylvester.c_s,
        "gap": sylvester.gap,
    });
    Ok((vec![report], diag))
}

/// Run every check of the scenario's regime.
pub fn run(s: &Resolved) -> Result<ScenarioReport> {
    let start = Instant::now();
    let (checks, diag) = match s.regime {
        Regime::Inviscid => run_inviscid(s)?,
        Regime::DiffusiveShear => run_diffusive(s)?,
        Regime::FastOscillation => run_fast(s)?,
    };
    log::info!(
        "{}: {} checks in {:.2}s",
        s.name,
        checks.len(),
        start.elapsed().as_secs_f64()
    );
    Ok(ScenarioReport::new(s, checks, diag, start))
}
