//! Sampled solution histories and their CSV form.

use std::io::Write;

use crate::error::{MixError, Result};
use crate::spectral::SpectralField2D;

/// Fields at increasing sample times.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub nu: f64,
    pub times: Vec<f64>,
    pub fields: Vec<SpectralField2D>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, &SpectralField2D)> {
        self.times.iter().copied().zip(self.fields.iter())
    }

    pub fn last(&self) -> Option<&SpectralField2D> {
        self.fields.last()
    }

    pub fn l2_series(&self) -> Vec<f64> {
        self.fields.iter().map(|f| f.l2_norm()).collect()
    }

    /// Columns `t, l2, hneg1, mix_scale, E_{-kreport} … E_{kreport}`.
    pub fn write_csv<W: Write>(&self, out: W, kreport: usize) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let kr = kreport as i64;
        let mut header = vec!["t".to_string(), "l2".into(), "hneg1".into(), "mix_scale".into()];
        header.extend((-kr..=kr).map(|k| format!("E_{k}")));
        w.write_record(&header)?;
        for (t, f) in self.iter() {
            let l2 = f.l2_norm();
            let h = f.hneg1_norm()?;
            let mix = if l2 > 0.0 { h / l2 } else { f64::NAN };
            let energies = f.x_mode_energies();
            let kmax = f.lattice().kmax as i64;
            let mut row = vec![t, l2, h, mix];
            row.extend((-kr..=kr).map(|k| {
                if k.abs() <= kmax {
                    energies[(k + kmax) as usize]
                } else {
                    0.0
                }
            }));
            w.write_record(row.iter().map(|v| format!("{v:.17e}")))?;
        }
        w.flush().map_err(MixError::Io)?;
        Ok(())
    }
}

/// Validate a list of sample times: finite, nonnegative, strictly increasing.
pub fn check_times(times: &[f64]) -> Result<()> {
    for (i, t) in times.iter().enumerate() {
        if !(t.is_finite() && *t >= 0.0) {
            return Err(MixError::Parameter(format!("time {t} is not a nonnegative number")));
        }
        if i > 0 && *t <= times[i - 1] {
            return Err(MixError::Parameter("sample times must increase strictly".into()));
        }
    }
    Ok(())
}

/// `n` evenly spaced samples on `[0, t_end]`, both ends included.
pub fn linspace(t_end: f64, n: usize) -> Vec<f64> {
    if n < 2 {
        return vec![t_end];
    }
    (0..n).map(|i| t_end * i as f64 / (n - 1) as f64).collect()
}

/// Split `[a, b]` into equal substeps no longer than `dt`.
pub(crate) fn substeps(a: f64, b: f64, dt: f64) -> (usize, f64) {
    let span = b - a;
    if span <= 0.0 {
        return (0, 0.0);
    }
    let n = ((span / dt) * (1.0 - 1e-12)).ceil().max(1.0) as usize;
    (n, span / n as f64)
}
