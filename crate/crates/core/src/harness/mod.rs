//! Scenario files, run orchestration and report persistence.

pub mod builtins;
pub mod corpus;
pub mod run;
pub mod scenario;
pub mod sharpness;

pub use builtins::{builtin, BUILTIN_NAMES};
pub use corpus::{corpus_run, CorpusRow, CorpusSummary, RowStatus};
pub use run::{certify, run, simulate, spectrum, ScenarioReport};
pub use scenario::{Overrides, Regime, Resolved, Scenario};
pub use sharpness::{sharpness_run, SharpnessReport};

use std::path::Path;

use crate::error::{MixError, Result};

/// Load a scenario from a file, falling back to a built-in of that name.
pub fn load(spec: &str) -> Result<Scenario> {
    let path = Path::new(spec);
    if path.exists() {
        return Scenario::from_path(path);
    }
    builtin(spec).ok_or_else(|| {
        MixError::Parameter(format!(
            "`{spec}` is neither a scenario file nor a built-in ({})",
            BUILTIN_NAMES.join(", ")
        ))
    })
}
