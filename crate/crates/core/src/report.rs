//! Time-sampled comparisons of measured norms against certified envelopes.

use serde::{Deserialize, Serialize};

/// Margins are clamped here so reports stay finite JSON.
pub const MARGIN_CAP: f64 = 1e300;

/// Default relative tolerance on margins.
pub const DEFAULT_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundKind {
    /// measured ≥ envelope
    Lower,
    /// measured ≤ envelope
    Upper,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub t: f64,
    pub measured: f64,
    pub envelope: f64,
    pub margin: f64,
    /// Natural log of the margin; exact even where `margin` saturates.
    pub log_margin: f64,
}

impl Sample {
    /// Envelope given through its logarithm, which may be far below `f64` range.
    pub fn from_log(kind: BoundKind, t: f64, measured: f64, log_envelope: f64) -> Sample {
        let lm = measured.ln();
        let log_margin = match kind {
            BoundKind::Lower => lm - log_envelope,
            BoundKind::Upper => log_envelope - lm,
        };
        let log_margin = if log_margin.is_nan() {
            f64::NEG_INFINITY
        } else {
            log_margin
        };
        Sample {
            t,
            measured,
            envelope: log_envelope.exp(),
            margin: log_margin.exp().min(MARGIN_CAP),
            log_margin: log_margin.clamp(-MARGIN_CAP, MARGIN_CAP),
        }
    }

    pub fn new(kind: BoundKind, t: f64, measured: f64, envelope: f64) -> Sample {
        Self::from_log(kind, t, measured, envelope.ln())
    }
}

/// Result of one certified inequality checked along a trajectory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub scenario: String,
    pub check: String,
    pub kind: BoundKind,
    pub certificate: serde_json::Value,
    pub samples: Vec<Sample>,
    pub min_margin: f64,
    pub tol: f64,
    pub verdict: Verdict,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    pub runtime_s: f64,
}

impl BoundReport {
    pub fn new(
        check: impl Into<String>,
        kind: BoundKind,
        certificate: serde_json::Value,
        samples: Vec<Sample>,
        tol: f64,
    ) -> BoundReport {
        let min_margin = samples.iter().map(|s| s.margin).fold(f64::INFINITY, f64::min);
        let min_margin = if samples.is_empty() { 1.0 } else { min_margin };
        let verdict = if min_margin >= 1.0 - tol {
            Verdict::Pass
        } else {
            Verdict::Fail
        };
        BoundReport {
            scenario: String::new(),
            check: check.into(),
            kind,
            certificate,
            samples,
            min_margin,
            tol,
            verdict,
            notes: Vec::new(),
            runtime_s: 0.0,
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }

    pub fn with_scenario(mut self, name: &str) -> Self {
        self.scenario = name.to_string();
        self
    }

    /// Largest margin; for mixing checks this is the slack above the floor.
    pub fn max_margin(&self) -> f64 {
        self.samples.iter().map(|s| s.margin).fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_envelope_below_underflow() {
        let s = Sample::from_log(BoundKind::Lower, 1.0, 1e-3, -2000.0);
        assert_eq!(s.envelope, 0.0);
        assert_eq!(s.margin, MARGIN_CAP);
        assert!(s.log_margin > 1000.0);
    }

    #[test]
    fn verdict_follows_min_margin() {
        let ok = vec![Sample::new(BoundKind::Lower, 0.0, 1.0, 1.0)];
        assert!(BoundReport::new("x", BoundKind::Lower, serde_json::Value::Null, ok, 1e-6).passed());
        let bad = vec![Sample::new(BoundKind::Upper, 0.0, 1.1, 1.0)];
        assert!(!BoundReport::new("x", BoundKind::Upper, serde_json::Value::Null, bad, 1e-6).passed());
    }
}
