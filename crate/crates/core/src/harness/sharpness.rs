//! Run the heat-eigenfunction family and compare measured rates with the certificate.

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::certificates::sharpness::{sharpness_family, SharpnessSummary};
use crate::error::Result;
use crate::harness::run::{run, simulate, ScenarioReport};
use crate::harness::scenario::Scenario;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SharpnessReport {
    pub family: SharpnessSummary,
    /// Least-squares slope of `−ln‖ρ(t)‖₂`.
    pub measured_rate: f64,
    /// Mixing scale at every sample.
    pub ratios: Vec<f64>,
    pub certified_c_star: f64,
    /// `min_t mixing_scale(t) / c_*`.
    pub measured_over_certified: f64,
    pub report: ScenarioReport,
}

pub fn sharpness_scenario(nu: f64, p: f64, t_end: f64, samples: usize) -> Result<Scenario> {
    let case = sharpness_family(nu, p)?;
    let v = json!({
        "name": format!("sharpness_p{p}_nu{nu}"),
        "regime": "diffusive_shear",
        "initial": {
            "lattice": { "kmax": 1, "lmax": case.n },
            "terms": [{ "ampl": 1.0, "kx": 0, "ky": case.n }]
        },
        "flow": "zero",
        "nu": nu,
        "times": { "t_end": t_end, "samples": samples }
    });
    Ok(serde_json::from_value(v)?)
}

pub fn sharpness_run(nu: f64, p: f64, t_end: f64, samples: usize) -> Result<SharpnessReport> {
    let case = sharpness_family(nu, p)?;
    let resolved = sharpness_scenario(nu, p, t_end, samples)?.resolve()?;
    let traj = simulate(&resolved)?;
    let report = run(&resolved)?;

    let xs = &traj.times;
    let ys: Vec<f64> = traj.l2_series().iter().map(|v| -v.ln()).collect();
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();

    let ratios = traj
        .fields
        .iter()
        .map(|f| f.mixing_scale())
        .collect::<Result<Vec<_>>>()?;
    let c_star = report
        .check("mixing_floor")
        .and_then(|c| c.certificate["c_star"].as_f64())
        .unwrap_or(f64::NAN);
    let worst = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(SharpnessReport {
        family: case.summary(),
        measured_rate: sxy / sxx,
        ratios,
        certified_c_star: c_star,
        measured_over_certified: worst / c_star,
        report,
    })
}
