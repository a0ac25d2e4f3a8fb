//! Scenario files: what to simulate, against which certificate, at which samples.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::averaging::EtaChoice;
use crate::error::{schema, MixError, Result};
use crate::flows::{Flow, FlowJson};
use crate::report::DEFAULT_TOL;
use crate::spectral::{FieldJson, Lattice, RealTerm, SpectralField2D};
use crate::trajectory::{check_times, linspace};

/// Operator cutoff used for the averaged operator when a scenario gives none.
pub const DEFAULT_CUTOFF: usize = 16;
pub const DEFAULT_ETA: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Inviscid,
    DiffusiveShear,
    FastOscillation,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeJson {
    pub kmax: usize,
    pub lmax: usize,
}

/// Initial datum: real trigonometric terms, a coefficient list, or a field file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lattice: Option<LatticeJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub terms: Option<Vec<RealTerm>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field: Option<FieldJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub file: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TimesJson {
    Grid { t_end: f64, samples: usize },
    List(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum EtaJson {
    Value(f64),
    Named(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    pub regime: Regime,
    pub initial: InitialJson,
    /// A preset name, `{"file": path}`, or an inline flow object.
    #[serde(default = "zero_flow")]
    pub flow: serde_json::Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nu: Option<f64>,
    #[serde(rename = "A", default, skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<EtaJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cutoff: Option<usize>,
    pub times: TimesJson,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    /// Directory that relative file references resolve against.
    #[serde(skip)]
    pub base_dir: Option<PathBuf>,
}

fn zero_flow() -> serde_json::Value {
    serde_json::Value::String("zero".into())
}

/// Command-line overrides applied on top of a scenario.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Overrides {
    pub nu: Option<f64>,
    pub dt: Option<f64>,
    pub eta: Option<f64>,
    pub cutoff: Option<usize>,
}

/// A validated scenario with every reference loaded.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub name: String,
    pub regime: Regime,
    pub rho0: SpectralField2D,
    pub flow: Flow,
    pub nu: Option<f64>,
    pub a: f64,
    pub eta: EtaChoice,
    pub cutoff: usize,
    pub times: Vec<f64>,
    pub dt: Option<f64>,
    pub tol: f64,
}

fn parse<T: serde::de::DeserializeOwned>(text: &str, prefix: &str) -> Result<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let inner = e.path().to_string();
        let path = match (prefix.is_empty(), inner.as_str()) {
            (true, _) => inner,
            (false, ".") => prefix.to_string(),
            (false, p) => format!("{prefix}.{p}"),
        };
        schema(path, e.into_inner().to_string())
    })
}

fn parse_value<T: serde::de::DeserializeOwned>(value: serde_json::Value, prefix: &str) -> Result<T> {
    serde_path_to_error::deserialize(value).map_err(|e| {
        let inner = e.path().to_string();
        let path = if inner == "." {
            prefix.to_string()
        } else {
            format!("{prefix}.{inner}")
        };
        schema(path, e.into_inner().to_string())
    })
}

impl Scenario {
    pub fn from_json_str(text: &str) -> Result<Scenario> {
        parse(text, "")
    }

    pub fn from_path(path: &Path) -> Result<Scenario> {
        let text = std::fs::read_to_string(path)?;
        let mut s = Scenario::from_json_str(&text)?;
        s.base_dir = path.parent().map(Path::to_path_buf);
        Ok(s)
    }

    pub fn to_json_pretty(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn apply(&mut self, o: &Overrides) {
        if o.nu.is_some() {
            self.nu = o.nu;
        }
        if o.dt.is_some() {
            self.dt = o.dt;
        }
        if let Some(e) = o.eta {
            self.eta = Some(EtaJson::Value(e));
        }
        if o.cutoff.is_some() {
            self.cutoff = o.cutoff;
        }
    }

    fn path_of(&self, rel: &str) -> PathBuf {
        let p = Path::new(rel);
        match (&self.base_dir, p.is_absolute()) {
            (Some(dir), false) => dir.join(p),
            _ => p.to_path_buf(),
        }
    }

    fn initial_field(&self) -> Result<SpectralField2D> {
        let init = &self.initial;
        let given = [init.terms.is_some(), init.field.is_some(), init.file.is_some()];
        if given.iter().filter(|&&b| b).count() != 1 {
            return Err(schema("initial", "exactly one of `terms`, `field`, `file` is required"));
        }
        let field = if let Some(terms) = &init.terms {
            let lat = init
                .lattice
                .ok_or_else(|| schema("initial.lattice", "missing field (required with `terms`)"))?;
            let lattice = Lattice::new(lat.kmax, lat.lmax).map_err(|e| schema("initial.lattice", e.to_string()))?;
            SpectralField2D::from_terms(lattice, terms).map_err(|e| schema("initial.terms", e.to_string()))?
        } else {
            let json = match (&init.field, &init.file) {
                (Some(f), _) => f.clone(),
                (None, Some(file)) => {
                    let text = std::fs::read_to_string(self.path_of(file))?;
                    parse::<FieldJson>(&text, "initial.file")?
                }
                (None, None) => unreachable!(),
            };
            let f = SpectralField2D::from_json(&json).map_err(|e| schema("initial.field", e.to_string()))?;
            match init.lattice {
                Some(l) => {
                    f.resample(Lattice::new(l.kmax, l.lmax).map_err(|e| schema("initial.lattice", e.to_string()))?)
                }
                None => f,
            }
        };
        field.ensure_real(1e-12).map_err(|e| schema("initial", e.to_string()))?;
        field.ensure_mean_zero().map_err(|e| schema("initial", e.to_string()))?;
        if field.is_zero() {
            return Err(schema("initial", "initial datum is identically zero"));
        }
        Ok(field)
    }

    fn resolve_flow(&self) -> Result<Flow> {
        use serde_json::Value;
        match &self.flow {
            Value::String(name) => Flow::preset(name).ok_or_else(|| {
                schema(
                    "flow",
                    format!("unknown preset `{name}` (expected couette, cellular or zero)"),
                )
            }),
            Value::Object(map) if map.contains_key("file") => {
                let file = match (map.len(), map.get("file")) {
                    (1, Some(Value::String(f))) => f,
                    _ => return Err(schema("flow.file", "expected {\"file\": \"path\"} and nothing else")),
                };
                let text = std::fs::read_to_string(self.path_of(file))?;
                let json: FlowJson = parse(&text, "flow.file")?;
                Flow::from_json(&json, "flow.file")
            }
            Value::Object(_) => {
                let json: FlowJson = parse_value(self.flow.clone(), "flow")?;
                Flow::from_json(&json, "flow")
            }
            _ => Err(schema(
                "flow",
                "expected a preset name, {\"file\": path} or a flow object",
            )),
        }
    }

    fn sample_times(&self) -> Result<Vec<f64>> {
        let times = match &self.times {
            TimesJson::Grid { t_end, samples } => {
                if !(t_end.is_finite() && *t_end > 0.0) || *samples < 2 {
                    return Err(schema("times", "need t_end > 0 and at least 2 samples"));
                }
                linspace(*t_end, *samples)
            }
            TimesJson::List(v) => v.clone(),
        };
        if times.is_empty() {
            return Err(schema("times", "no sample times"));
        }
        check_times(&times).map_err(|e| schema("times", e.to_string()))?;
        Ok(times)
    }

    /// Validate regime-dependent fields and load every reference.
    pub fn resolve(&self) -> Result<Resolved> {
        if self.name.trim().is_empty() {
            return Err(schema("name", "must not be empty"));
        }
        let rho0 = self.initial_field()?;
        let flow = self.resolve_flow()?;
        let times = self.sample_times()?;
        let tol = self.tol.unwrap_or(DEFAULT_TOL);
        if !(0.0..1.0).contains(&tol) {
            return Err(schema("tol", "must lie in [0, 1)"));
        }
        if let Some(dt) = self.dt {
            if !(dt > 0.0 && dt.is_finite()) {
                return Err(schema("dt", "must be positive"));
            }
        }
        match self.regime {
            Regime::Inviscid => {
                if self.nu.is_some() {
                    return Err(schema("nu", "the inviscid regime takes no viscosity"));
                }
                if flow.as_shear().is_none() {
                    return Err(schema("flow", "the inviscid regime needs a shear flow"));
                }
            }
            Regime::DiffusiveShear | Regime::FastOscillation => {
                let nu = self
                    .nu
                    .ok_or_else(|| schema("nu", "missing field (required for viscous regimes)"))?;
                if !(nu > 0.0 && nu.is_finite()) {
                    return Err(schema("nu", "must be positive"));
                }
                if self.regime == Regime::DiffusiveShear && flow.as_shear().is_none() {
                    return Err(schema("flow", "the diffusive_shear regime needs a shear flow"));
                }
            }
        }
        let a = match (self.regime, self.a) {
            (Regime::FastOscillation, Some(a)) if a > 0.0 && a.is_finite() => a,
            (Regime::FastOscillation, Some(_)) => return Err(schema("A", "must be positive")),
            (Regime::FastOscillation, None) => {
                return Err(schema("A", "missing field (required for fast_oscillation)"))
            }
            (_, _) => 0.0,
        };
        let eta = match &self.eta {
            None => EtaChoice::Fixed(DEFAULT_ETA),
            Some(EtaJson::Value(e)) => EtaChoice::Fixed(*e),
            Some(EtaJson::Named(s)) if s == "viscous" => EtaChoice::Viscous,
            Some(EtaJson::Named(s)) => {
                return Err(schema("eta", format!("expected a number or \"viscous\", got \"{s}\"")))
            }
        };
        if let Some(nu) = self.nu {
            eta.resolve(nu).map_err(|e| schema("eta", e.to_string()))?;
        }
        let cutoff = self.cutoff.unwrap_or(DEFAULT_CUTOFF);
        if cutoff == 0 {
            return Err(schema("cutoff", "must be at least 1"));
        }
        Ok(Resolved {
            name: self.name.clone(),
            regime: self.regime,
            rho0,
            flow,
            nu: self.nu,
            a,
            eta,
            cutoff,
            times,
            dt: self.dt,
            tol,
        })
    }
}

impl std::str::FromStr for Regime {
    type Err = MixError;

    fn from_str(s: &str) -> Result<Regime> {
        serde_json::from_value(serde_json::Value::String(s.into()))
            .map_err(|_| schema("regime", format!("unknown regime `{s}`")))
    }
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Regime::Inviscid => "inviscid",
            Regime::DiffusiveShear => "diffusive_shear",
            Regime::FastOscillation => "fast_oscillation",
        })
    }
}
