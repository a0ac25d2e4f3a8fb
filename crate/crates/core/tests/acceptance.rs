//! Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any fails.

use std::cell::Cell;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use mixlab_core::averaging::expm::expm;
use mixlab_core::averaging::observables::observable_norms;
use mixlab_core::averaging::{averaged_operator, detecting_spectrum, evolve_2d, observable_series, Solve2dOptions};
use mixlab_core::certificates::c2::mode_mk_scan;
use mixlab_core::certificates::{c2_certificate, mixing_certificate, mode_mk};
use mixlab_core::flows::{FlowSpec, FlowTerm, ShearSpec, TimeMode};
use mixlab_core::harness::{builtin, run, sharpness_run, simulate, Resolved, Scenario};
use mixlab_core::inviscid::{evolve_inviscid, inviscid_certificate, tail_check};
use mixlab_core::spectral::{Lattice, RealTerm, SpectralField2D, Trig};
use mixlab_core::trajectory::linspace;
use mixlab_core::Result;
use nalgebra::DVector;
use num_complex::Complex64;
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestCaseError, TestRng, TestRunner};

type Criterion<'a> = Box<dyn Fn() -> Result<Outcome> + 'a>;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Result<Outcome> {
    Ok(Outcome { pass, detail })
}

fn builtin_resolved(name: &str) -> Result<Resolved> {
    builtin(name).expect("builtin exists").resolve()
}

fn corpus() -> Result<Vec<Resolved>> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("scenarios");
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)?
        .map(|e| e.map(|e| e.path()))
        .collect::<std::io::Result<_>>()?;
    paths.retain(|p| p.extension().is_some_and(|e| e == "json"));
    paths.sort();
    paths.iter().map(|p| Scenario::from_path(p)?.resolve()).collect()
}

fn c1_heat_exactness() -> Result<Outcome> {
    let nu = 0.1;
    let lat = Lattice::new(1, 4)?;
    let rho0 = SpectralField2D::from_terms(lat, &[RealTerm::cos(1.0, 0, 1)])?;
    let times = [0.5, 1.0, 2.0];
    let shear = mixlab_core::shear::evolve_shear(&rho0, &ShearSpec::zero(), nu, &times, &Default::default())?;
    let grid = evolve_2d(&rho0, &FlowSpec::zero(), 0.0, nu, &times, Solve2dOptions::default())?;
    let mut worst: f64 = 0.0;
    for traj in [&shear, &grid] {
        for (t, f) in traj.iter() {
            let exact = (-nu * t).exp() / 2f64.sqrt();
            worst = worst.max((f.l2_norm() - exact).abs() / exact);
        }
    }
    outcome(
        worst <= 1e-10,
        format!("max relative error {worst:.2e} over both solvers (tol 1e-10)"),
    )
}

fn c2_energy_identity() -> Result<Outcome> {
    let s = builtin_resolved("couette_cosx")?;
    let report = run(&s)?;
    let r = report.diagnostics["energy_identity"]["max_residual"]
        .as_f64()
        .unwrap_or(f64::INFINITY);
    outcome(
        r <= 1e-5 && s.dt == Some(1e-3),
        format!("sin y shear, dt = 1e-3: max residual {r:.2e} (tol 1e-5)"),
    )
}

fn c3_inviscid() -> Result<Outcome> {
    let s = builtin_resolved("inviscid_cosx")?;
    let shear = s.flow.as_shear().expect("shear flow");
    let cert = inviscid_certificate(&s.rho0, shear)?;
    let mut worst_floor = f64::INFINITY;
    let mut worst_tail = f64::INFINITY;
    for &t in &s.times {
        let theta = evolve_inviscid(&s.rho0, shear, t)?;
        worst_floor = worst_floor.min(theta.hneg1_norm()? * (1.0 + t * t) / cert.c_star);
        let tc = tail_check(&theta, &cert, t)?;
        worst_tail = worst_tail.min(tc.half_s / tc.tail.max(f64::MIN_POSITIVE));
    }
    let n = s.times.len();
    let (t0, t1) = (s.times[0], s.times[n - 1]);
    outcome(
        n == 200 && worst_floor >= 1.0 && worst_tail >= 1.0 && s.rho0.lattice().lmax <= 96,
        format!(
            "{n} samples on [{t0}, {t1}]: min hneg1(1+t^2)/c_star = {worst_floor:.3}, min (S/2)/tail = {worst_tail:.3e}"
        ),
    )
}

fn c4_c2_validity(corpus: &[(Resolved, mixlab_core::trajectory::Trajectory)]) -> Result<Outcome> {
    let mut worst_lower = f64::INFINITY;
    let mut worst_upper = f64::INFINITY;
    for (s, traj) in corpus {
        let m = s.flow.as_shear().expect("shear flow").m();
        let cert = c2_certificate(&s.rho0, m, traj.nu)?;
        for (t, f) in traj.iter() {
            let l2 = f.l2_norm();
            // compared in logs: e^{c₂t} overflows for the x-mode exponents
            worst_lower = worst_lower.min((l2.ln() + cert.c2 * t - cert.n.ln()).exp());
            worst_upper = worst_upper.min(cert.n * (-traj.nu * t).exp() * (1.0 + 1e-8) / l2);
        }
    }
    outcome(
        corpus.len() == 12 && worst_lower >= 1.0 - 1e-6 && worst_upper >= 1.0,
        format!(
            "{} scenarios: min ||rho|| e^(c2 t)/N = {worst_lower:.9}, min heat-envelope ratio = {worst_upper:.9}",
            corpus.len()
        ),
    )
}

fn c5_heat_branch() -> Result<Outcome> {
    let rho0 = SpectralField2D::from_terms(Lattice::new(1, 4)?, &[RealTerm::cos(1.0, 0, 1)])?;
    let mut worst: f64 = 0.0;
    for nu in [0.1, 0.05, 0.025] {
        let c = c2_certificate(&rho0, 0.0, nu)?;
        worst = worst.max((c.c2 - 2.0 * nu).abs());
    }
    outcome(
        worst <= 1e-12,
        format!("max |c2 - 2 nu| = {worst:.1e} over nu in {{0.1, 0.05, 0.025}}"),
    )
}

fn c6_sharpness() -> Result<Outcome> {
    let r = sharpness_run(0.25, 1.0, 2.0, 21)?;
    let rate_ok = (r.measured_rate - 4.0).abs() <= 1e-8;
    let window_ok = r
        .family
        .rate_window
        .is_some_and(|(lo, hi)| lo <= r.measured_rate && r.measured_rate <= hi);
    let ratio_err = r.ratios.iter().map(|x| (x - 0.25).abs()).fold(0.0, f64::max);
    let c_ok = (r.certified_c_star - 0.125).abs() <= 1e-15;
    let q_ok = (r.measured_over_certified - 2.0).abs() <= 1e-12;
    outcome(
        r.family.n == 4 && rate_ok && window_ok && ratio_err <= 1e-12 && c_ok && q_ok,
        format!(
            "n = {}, rate {:.12}, max |ratio - 0.25| {ratio_err:.1e}, c_star {}, measured/certified {}",
            r.family.n, r.measured_rate, r.certified_c_star, r.measured_over_certified
        ),
    )
}

fn c7_mixing_floor(corpus: &[(Resolved, mixlab_core::trajectory::Trajectory)]) -> Result<Outcome> {
    let mut worst_floor = f64::INFINITY;
    let mut worst_retention = f64::INFINITY;
    for (s, traj) in corpus {
        let m = s.flow.as_shear().expect("shear flow").m();
        let c2 = c2_certificate(&s.rho0, m, traj.nu)?.c2;
        let mix = mixing_certificate(&s.rho0, m, traj.nu, c2)?;
        for (_, f) in traj.iter() {
            worst_floor = worst_floor.min(f.mixing_scale()? - (mix.c_star - 1e-6));
            for mode in &mix.modes {
                let g = f.x_mode(mode.k)?;
                worst_retention = worst_retention.min(g.low_block_energy(mode.n_k) - (0.5 * g.energy() - 1e-8));
            }
        }
    }
    outcome(
        worst_floor >= 0.0 && worst_retention >= 0.0,
        format!("min slack: mixing floor {worst_floor:.3e}, retention {worst_retention:.3e}"),
    )
}

fn c8_mode_mk() -> Result<Outcome> {
    let config = Config {
        cases: 200,
        failure_persistence: None,
        ..Config::default()
    };
    let mut runner = TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha));
    let checked = Cell::new(0usize);
    let strategy = (
        (1i64..=60).prop_flat_map(|k| prop_oneof![Just(k), Just(-k)]),
        0.0..5.0f64,
        1e-3..1.0f64,
        1e-3..10.0f64,
    );
    let result = runner.run(&strategy, |(k, m, nu, delta)| {
        checked.set(checked.get() + 1);
        let (a, b) = (mode_mk(k, m, nu, delta), mode_mk_scan(k, m, nu, delta));
        if a == b {
            Ok(())
        } else {
            Err(TestCaseError::fail(format!(
                "k={k} M={m} nu={nu} delta={delta}: {a} vs {b}"
            )))
        }
    });
    let n = checked.get();
    match result {
        Ok(()) => outcome(n == 200, format!("closed form equals scan on {n} tuples")),
        Err(e) => outcome(false, format!("mismatch: {e}")),
    }
}

fn c9_spectrum() -> Result<Outcome> {
    let nu = 0.1;
    let cutoff = 24;
    let lat = Lattice::square(cutoff)?;
    let cos_y = SpectralField2D::from_terms(lat, &[RealTerm::cos(1.0, 0, 1)])?;
    let cos_x = SpectralField2D::from_terms(lat, &[RealTerm::cos(1.0, 1, 0)])?;

    let op = averaged_operator(&FlowSpec::zero(), nu, cutoff)?;
    let spec = detecting_spectrum(&op, &cos_y)?;
    let mut got: Vec<f64> = spec.eigenvalues.iter().map(|z| z.re).collect();
    let mut expected: Vec<f64> = (0..op.dim())
        .map(|i| {
            let (k, l) = op.mode(i);
            -nu * (k * k + l * l) as f64
        })
        .collect();
    got.sort_by(f64::total_cmp);
    expected.sort_by(f64::total_cmp);
    let heat_exact = got == expected && spec.eigenvalues.iter().all(|z| z.im == 0.0);

    let shear = FlowSpec::from_shear(&ShearSpec::sin_mode(1.0, 1))?;
    let op = averaged_operator(&shear, nu, cutoff)?;
    let residual = detecting_spectrum(&op, &cos_x)?
        .residuals
        .iter()
        .copied()
        .fold(0.0, f64::max);
    let lambda = detecting_spectrum(&op, &cos_y)?.lambda_nu;
    let lambda_err = (lambda - Complex64::new(-nu, 0.0)).norm();
    outcome(
        heat_exact && residual <= 1e-8 && lambda_err <= 1e-10,
        format!(
            "cutoff {cutoff}: zero-flow eigenvalues exact = {heat_exact}, shear residual {residual:.1e}, |lambda + nu| = {lambda_err:.1e}"
        ),
    )
}

fn c10_observables() -> Result<Outcome> {
    let nu = 0.1;
    let n = 10;
    let flow = FlowSpec::from_shear(&ShearSpec::sin_mode(1.0, 1))?;
    let op = averaged_operator(&flow, nu, n)?;
    let rho0 = SpectralField2D::from_terms(Lattice::square(n)?, &[RealTerm::cos(1.0, 1, 0)])?;
    let spec = detecting_spectrum(&op, &rho0)?;
    let times = linspace(2.0, 21);
    let opts = Solve2dOptions {
        dt: 1e-3,
        ..Default::default()
    };
    let traj = evolve_2d(&rho0, &flow, 0.0, nu, &times, opts)?;
    let q = observable_series(&traj, &spec.basis_fields(&op));
    let q0 = DVector::from_vec(q[0].clone());
    let scale = observable_norms(&q)[0];
    let g_t = spec.g.transpose();
    let mut worst: f64 = 0.0;
    for (row, t) in q.iter().zip(&times) {
        // q' = Gᵀq; on an eigenvector this is e^{λt}q(0)
        let exact = expm(&(&g_t * Complex64::new(*t, 0.0))) * &q0;
        let err = row
            .iter()
            .zip(exact.iter())
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt();
        worst = worst.max(err / scale);
    }
    outcome(
        worst <= 1e-5,
        format!(
            "d_nu = {}, max |q(t) - e^(G^T t) q(0)| / |q(0)| = {worst:.2e} on [0, 2] (tol 1e-5)",
            spec.d_nu
        ),
    )
}

fn c11_averaging_order() -> Result<Outcome> {
    let nu = 0.1;
    let flow = FlowSpec::new(
        vec![
            FlowTerm::steady(1.0, 0, 1, Trig::Cos).with_time(TimeMode::Sin, 1),
            FlowTerm::steady(0.5, 1, 1, Trig::Sin).with_time(TimeMode::Sin, 1),
        ],
        2.0,
        1.0,
    )?;
    let lat = Lattice::square(8)?;
    let rho0 = SpectralField2D::from_terms(lat, &[RealTerm::cos(1.0, 1, 0), RealTerm::sin(0.5, 1, 2)])?;
    let heat = evolve_2d(&rho0, &flow.averaged(), 0.0, nu, &[1.0], Solve2dOptions::default())?;
    let amps = [50.0, 100.0, 200.0, 400.0];
    let mut errs = Vec::new();
    for &a in &amps {
        let opts = Solve2dOptions {
            dt: 2e-5,
            ..Default::default()
        };
        let traj = evolve_2d(&rho0, &flow, a, nu, &[1.0], opts)?;
        errs.push(traj.fields[0].distance(&heat.fields[0]));
    }
    let xs: Vec<f64> = amps.iter().map(|a: &f64| a.ln()).collect();
    let ys: Vec<f64> = errs.iter().map(|e| e.ln()).collect();
    let (mx, my) = (xs.iter().sum::<f64>() / 4.0, ys.iter().sum::<f64>() / 4.0);
    let slope = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>()
        / xs.iter().map(|x| (x - mx).powi(2)).sum::<f64>();
    outcome(
        (-1.25..=-0.75).contains(&slope),
        format!(
            "log-log slope {slope:.4} (errors {})",
            errs.iter().map(|e| format!("{e:.2e}")).collect::<Vec<_>>().join(", ")
        ),
    )
}

fn c12_fast_bound() -> Result<Outcome> {
    let mut details = Vec::new();
    let mut pass = true;
    for name in ["fast_shear", "fast_cellular"] {
        let s = builtin_resolved(name)?;
        let report = run(&s)?;
        let check = report.check("fast_lower").expect("fast check");
        let cert = &check.certificate["certificate"];
        let terms = cert["terms"].as_object().map_or(0, |t| t.len());
        let a0 = cert["A0"].as_f64().unwrap_or(f64::NAN);
        let t_end = check.samples.last().map_or(0.0, |x| x.t);
        let ok = check.min_margin >= 1.0 - 1e-6 && terms == 6 && (t_end - 2.0).abs() < 1e-12;
        pass &= ok;
        let route = if s.a >= a0 { "c_A" } else { "A-dependent exponent" };
        details.push(format!(
            "{name}: A = {}, A0 = {a0:.2e} ({route}), {terms} terms, min margin {:.3}",
            s.a, check.min_margin
        ));
    }
    outcome(pass, details.join("; "))
}

fn main() -> ExitCode {
    let start = Instant::now();
    let corpus_runs = corpus().and_then(|c| {
        c.into_iter()
            .map(|s| simulate(&s).map(|t| (s, t)))
            .collect::<Result<Vec<_>>>()
    });
    let corpus_runs = match corpus_runs {
        Ok(c) => c,
        Err(e) => {
            println!("corpus could not be loaded: {e}");
            return ExitCode::FAILURE;
        }
    };
    let criteria: [(&str, Criterion); 12] = [
        ("heat exactness", Box::new(c1_heat_exactness)),
        ("energy identity", Box::new(c2_energy_identity)),
        ("inviscid certificate", Box::new(c3_inviscid)),
        ("c2 certificate validity", Box::new(|| c4_c2_validity(&corpus_runs))),
        ("heat-branch closed form", Box::new(c5_heat_branch)),
        ("sharpness family", Box::new(c6_sharpness)),
        ("mixing floor and retention", Box::new(|| c7_mixing_floor(&corpus_runs))),
        ("mode_mk oracle", Box::new(c8_mode_mk)),
        ("averaged-operator spectrum", Box::new(c9_spectrum)),
        ("observable law", Box::new(c10_observables)),
        ("averaging order", Box::new(c11_averaging_order)),
        ("fast-bound check", Box::new(c12_fast_bound)),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let t0 = Instant::now();
        let (pass, detail) = match check() {
            Ok(o) => (o.pass, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        if !pass {
            failed += 1;
        }
        println!(
            "criterion {:>2} {} {name}: {detail} [{:.1}s]",
            i + 1,
            if pass { "PASS" } else { "FAIL" },
            t0.elapsed().as_secs_f64()
        );
    }
    println!(
        "acceptance: {} of 12 criteria pass in {:.1}s",
        12 - failed,
        start.elapsed().as_secs_f64()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
