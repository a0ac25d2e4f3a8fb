use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::Value;

use mixlab_core::harness::{self, corpus_run, Overrides, Regime, RowStatus};
use mixlab_core::MixError;

/// Passive-scalar mixing laboratory: simulate, certify and verify lower bounds.
#[derive(Parser)]
#[command(name = "mixlab", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Default)]
struct OverrideArgs {
    /// Override the scenario viscosity.
    #[arg(long)]
    nu: Option<f64>,
    /// Override the integrator time step.
    #[arg(long)]
    dt: Option<f64>,
    /// Override the damping margin η of the fast-oscillation certificate.
    #[arg(long)]
    eta: Option<f64>,
    /// Override the averaged-operator cutoff.
    #[arg(long)]
    cutoff: Option<usize>,
}

impl OverrideArgs {
    fn to_overrides(&self) -> Overrides {
        Overrides {
            nu: self.nu,
            dt: self.dt,
            eta: self.eta,
            cutoff: self.cutoff,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum CertKind {
    Inviscid,
    C2,
    Mixing,
    Fast,
}

#[derive(Subcommand)]
enum Command {
    /// Evolve a scenario and write the trajectory.
    Simulate {
        /// Scenario file or built-in name.
        #[arg(long)]
        scenario: String,
        /// Trajectory CSV (`-` for stdout); the default when no --out is given.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Final field as JSON.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Report x-mode energies for |k| up to this value.
        #[arg(long, default_value_t = 2)]
        kreport: usize,
        #[command(flatten)]
        overrides: OverrideArgs,
    },
    /// Compute a certificate without simulating.
    Certify {
        /// Certificate to compute; inferred from the scenario regime when omitted.
        kind: Option<CertKind>,
        /// Scenario file or built-in name; defaults to a built-in matching the kind.
        #[arg(long)]
        scenario: Option<String>,
        /// Certificate JSON (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        overrides: OverrideArgs,
    },
    /// Run every check of a scenario; exits 1 if any fails.
    Verify {
        /// Scenario file or built-in name.
        #[arg(long)]
        scenario: String,
        /// Report JSON (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write the trajectory CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
        #[command(flatten)]
        overrides: OverrideArgs,
    },
    /// Run the heat-eigenfunction family ρ₀ = cos(n y), n = ⌈ν^{-p}⌉.
    Sharpness {
        /// Viscosity.
        #[arg(long, default_value_t = 0.25)]
        nu: f64,
        /// Exponent in n = ⌈ν^{-p}⌉.
        #[arg(long, default_value_t = 1.0)]
        p: f64,
        /// Final time.
        #[arg(long, default_value_t = 2.0)]
        t_end: f64,
        /// Number of output times including t = 0.
        #[arg(long, default_value_t = 21)]
        samples: usize,
        /// Report JSON (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Eigenvalues and detecting cluster of the averaged operator.
    Spectrum {
        /// Scenario file or built-in name in the fast-flow regime.
        #[arg(long, default_value = "fast_shear")]
        scenario: String,
        /// Number of leading eigenvalues to list.
        #[arg(long, default_value_t = 64)]
        max: usize,
        /// Spectrum JSON (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        overrides: OverrideArgs,
    },
    /// Run every scenario file in a directory; exits 1 on any FAIL, 2 on errors only.
    Corpus {
        /// Directory of scenario JSON files.
        dir: PathBuf,
        /// Directory for summary.csv and per-scenario reports.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn configure_threads() -> Result<()> {
    let Ok(v) = std::env::var("MIXLAB_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .with_context(|| format!("MIXLAB_THREADS must be a positive integer, got `{v}`"))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    Ok(())
}

fn load(spec: &str, o: &OverrideArgs) -> Result<harness::Resolved> {
    let mut s = harness::load(spec)?;
    s.apply(&o.to_overrides());
    Ok(s.resolve()?)
}

fn emit(value: &Value, out: Option<&Path>) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    match out {
        Some(p) => fs::write(p, text + "\n").with_context(|| format!("writing {}", p.display())),
        None => {
            let mut stdout = io::stdout().lock();
            writeln!(stdout, "{text}")?;
            Ok(())
        }
    }
}

fn write_csv(traj: &mixlab_core::trajectory::Trajectory, path: &Path, kreport: usize) -> Result<()> {
    if path == Path::new("-") {
        traj.write_csv(io::stdout().lock(), kreport)?;
    } else {
        let f = fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
        traj.write_csv(io::BufWriter::new(f), kreport)?;
    }
    Ok(())
}

fn default_scenario(kind: Option<CertKind>) -> &'static str {
    match kind {
        Some(CertKind::Inviscid) => "inviscid_cosx",
        Some(CertKind::Fast) => "fast_shear",
        _ => "couette_cosx",
    }
}

fn certify(kind: Option<CertKind>, s: &harness::Resolved) -> Result<Value> {
    let expected = match kind {
        None => s.regime,
        Some(CertKind::Inviscid) => Regime::Inviscid,
        Some(CertKind::C2 | CertKind::Mixing) => Regime::DiffusiveShear,
        Some(CertKind::Fast) => Regime::FastOscillation,
    };
    if expected != s.regime {
        bail!("scenario `{}` is in the {} regime, not {}", s.name, s.regime, expected);
    }
    let mut v = harness::certify(s)?;
    Ok(match kind {
        Some(CertKind::C2) => v["c2"].take(),
        Some(CertKind::Mixing) => v["mixing"].take(),
        _ => v,
    })
}

fn real_main() -> Result<ExitCode> {
    let cli = Cli::parse();
    configure_threads()?;
    match cli.command {
        Command::Simulate {
            scenario,
            csv,
            out,
            kreport,
            overrides,
        } => {
            let s = load(&scenario, &overrides)?;
            let traj = harness::simulate(&s)?;
            if let Some(out) = &out {
                let last = traj.last().context("empty trajectory")?;
                emit(&serde_json::to_value(last.to_json())?, Some(out))?;
            }
            match (&csv, &out) {
                (Some(p), _) => write_csv(&traj, p, kreport)?,
                (None, None) => write_csv(&traj, Path::new("-"), kreport)?,
                (None, Some(_)) => {}
            }
        }
        Command::Certify {
            kind,
            scenario,
            out,
            overrides,
        } => {
            let spec = scenario.as_deref().unwrap_or(default_scenario(kind));
            let s = load(spec, &overrides)?;
            emit(&certify(kind, &s)?, out.as_deref())?;
        }
        Command::Verify {
            scenario,
            out,
            csv,
            overrides,
        } => {
            let s = load(&scenario, &overrides)?;
            if let Some(p) = &csv {
                write_csv(&harness::simulate(&s)?, p, 2)?;
            }
            let report = harness::run(&s)?;
            for c in &report.checks {
                eprintln!(
                    "{:<20} {:?} min_margin={:.6e} samples={}",
                    c.check,
                    c.verdict,
                    c.min_margin,
                    c.samples.len()
                );
            }
            emit(&serde_json::to_value(&report)?, out.as_deref())?;
            if !report.passed() {
                return Ok(ExitCode::from(1));
            }
        }
        Command::Sharpness {
            nu,
            p,
            t_end,
            samples,
            out,
        } => {
            let r = harness::sharpness_run(nu, p, t_end, samples)?;
            emit(&serde_json::to_value(&r)?, out.as_deref())?;
            if !r.report.passed() {
                return Ok(ExitCode::from(1));
            }
        }
        Command::Spectrum {
            scenario,
            max,
            out,
            overrides,
        } => {
            let s = load(&scenario, &overrides)?;
            emit(&harness::spectrum(&s, max)?, out.as_deref())?;
        }
        Command::Corpus { dir, out } => {
            let summary = corpus_run(&dir, out.as_deref())?;
            for r in &summary.rows {
                let margin = r.min_margin.map(|m| format!("{m:.6e}")).unwrap_or_else(|| "-".into());
                let status = match r.status {
                    RowStatus::Pass => "PASS",
                    RowStatus::Fail => "FAIL",
                    RowStatus::Error => "ERROR",
                };
                println!(
                    "{status:<6} {:<36} {margin} {}",
                    r.file,
                    r.error.as_deref().unwrap_or("")
                );
            }
            eprintln!(
                "{} scenarios: {} pass, {} fail, {} error",
                summary.rows.len(),
                summary.count(RowStatus::Pass),
                summary.count(RowStatus::Fail),
                summary.count(RowStatus::Error)
            );
            return Ok(ExitCode::from(summary.exit_code() as u8));
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn is_broken_pipe(e: &anyhow::Error) -> bool {
    e.chain().any(|c| {
        let kind = c
            .downcast_ref::<io::Error>()
            .map(io::Error::kind)
            .or_else(|| c.downcast_ref::<MixError>().and_then(MixError::io_kind));
        kind == Some(io::ErrorKind::BrokenPipe)
    })
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match real_main() {
        Ok(code) => code,
        // a closed downstream pipe (`| head`) is not a failure
        Err(e) if is_broken_pipe(&e) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
