//! Mean-zero Fourier fields on the normalized torus.
//!
//! A field is `Σ c(k,l) e^{i(kx+ly)}` on `[0,2π)²` with averaged measure, so the
//! L² norm is the plain ℓ² norm of the coefficients.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{MixError, Result};
use crate::grid::{fast_len, Fft1, Fft2};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Truncation `|k| ≤ kmax`, `|l| ≤ lmax` of the integer lattice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Lattice {
    pub kmax: usize,
    pub lmax: usize,
}

impl Lattice {
    pub fn new(kmax: usize, lmax: usize) -> Result<Self> {
        if kmax == 0 || lmax == 0 {
            return Err(MixError::Lattice(format!(
                "cutoffs must be at least 1 (got kmax = {kmax}, lmax = {lmax})"
            )));
        }
        Ok(Lattice { kmax, lmax })
    }

    pub fn square(n: usize) -> Result<Self> {
        Self::new(n, n)
    }

    pub fn nk(&self) -> usize {
        2 * self.kmax + 1
    }

    pub fn nl(&self) -> usize {
        2 * self.lmax + 1
    }

    pub fn len(&self) -> usize {
        self.nk() * self.nl()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, k: i64, l: i64) -> bool {
        k.unsigned_abs() as usize <= self.kmax && l.unsigned_abs() as usize <= self.lmax
    }

    /// Dense index of `(k,l)`. Panics outside the lattice.
    #[inline]
    pub fn index(&self, k: i64, l: i64) -> usize {
        assert!(self.contains(k, l), "mode ({k},{l}) outside lattice");
        (k + self.kmax as i64) as usize * self.nl() + (l + self.lmax as i64) as usize
    }

    #[inline]
    pub fn mode(&self, idx: usize) -> (i64, i64) {
        let nl = self.nl();
        (
            (idx / nl) as i64 - self.kmax as i64,
            (idx % nl) as i64 - self.lmax as i64,
        )
    }

    pub fn modes(&self) -> impl Iterator<Item = (i64, i64)> + '_ {
        (0..self.len()).map(move |i| self.mode(i))
    }

    /// The componentwise larger of two lattices.
    pub fn union(&self, other: &Lattice) -> Lattice {
        Lattice {
            kmax: self.kmax.max(other.kmax),
            lmax: self.lmax.max(other.lmax),
        }
    }
}

impl Default for Lattice {
    fn default() -> Self {
        Lattice { kmax: 64, lmax: 64 }
    }
}

/// Spatial factor of a real trigonometric term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Trig {
    Cos,
    Sin,
}

/// `ampl · cos(kx x + ky y)` or `ampl · sin(kx x + ky y)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RealTerm {
    pub ampl: f64,
    pub kx: i64,
    pub ky: i64,
    #[serde(default = "default_trig", rename = "phase_mode")]
    pub trig: Trig,
}

fn default_trig() -> Trig {
    Trig::Cos
}

impl RealTerm {
    pub fn cos(ampl: f64, kx: i64, ky: i64) -> Self {
        RealTerm {
            ampl,
            kx,
            ky,
            trig: Trig::Cos,
        }
    }

    pub fn sin(ampl: f64, kx: i64, ky: i64) -> Self {
        RealTerm {
            ampl,
            kx,
            ky,
            trig: Trig::Sin,
        }
    }

    /// The two exponential coefficients: value at `(kx,ky)` and at `(-kx,-ky)`.
    pub fn exp_pair(&self) -> (Complex64, Complex64) {
        let h = 0.5 * self.ampl;
        match self.trig {
            Trig::Cos => (Complex64::new(h, 0.0), Complex64::new(h, 0.0)),
            Trig::Sin => (Complex64::new(0.0, -h), Complex64::new(0.0, h)),
        }
    }
}

/// Dense coefficient array on a [`Lattice`].
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField2D {
    lattice: Lattice,
    coeff: Vec<Complex64>,
}

impl SpectralField2D {
    pub fn zeros(lattice: Lattice) -> Self {
        SpectralField2D {
            lattice,
            coeff: vec![ZERO; lattice.len()],
        }
    }

    pub fn from_vec(lattice: Lattice, coeff: Vec<Complex64>) -> Result<Self> {
        if coeff.len() != lattice.len() {
            return Err(MixError::Lattice(format!(
                "coefficient array has length {} but lattice needs {}",
                coeff.len(),
                lattice.len()
            )));
        }
        if coeff.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(MixError::Numerical("non-finite coefficient".into()));
        }
        Ok(SpectralField2D { lattice, coeff })
    }

    /// Sum of real trigonometric terms; the result is conjugate-symmetric.
    pub fn from_terms(lattice: Lattice, terms: &[RealTerm]) -> Result<Self> {
        let mut f = Self::zeros(lattice);
        for t in terms {
            if !lattice.contains(t.kx, t.ky) {
                return Err(MixError::Lattice(format!(
                    "term ({},{}) outside lattice {}x{}",
                    t.kx, t.ky, lattice.kmax, lattice.lmax
                )));
            }
            let (plus, minus) = t.exp_pair();
            if t.kx == 0 && t.ky == 0 {
                // cos(0) is a constant, sin(0) vanishes
                let i = lattice.index(0, 0);
                f.coeff[i] += plus + minus;
                continue;
            }
            let i = lattice.index(t.kx, t.ky);
            let j = lattice.index(-t.kx, -t.ky);
            f.coeff[i] += plus;
            f.coeff[j] += minus;
        }
        Ok(f)
    }

    pub fn lattice(&self) -> Lattice {
        self.lattice
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeff
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeff
    }

    /// Coefficient at `(k,l)`, zero outside the lattice.
    pub fn get(&self, k: i64, l: i64) -> Complex64 {
        if self.lattice.contains(k, l) {
            self.coeff[self.lattice.index(k, l)]
        } else {
            ZERO
        }
    }

    pub fn set(&mut self, k: i64, l: i64, value: Complex64) {
        let i = self.lattice.index(k, l);
        self.coeff[i] = value;
    }

    pub fn mean(&self) -> Complex64 {
        self.get(0, 0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeff.iter().all(|c| c.norm_sqr() == 0.0)
    }

    /// Largest `|c(k,l) − conj c(−k,−l)|`.
    pub fn symmetry_defect(&self) -> f64 {
        self.lattice
            .modes()
            .map(|(k, l)| (self.get(k, l) - self.get(-k, -l).conj()).norm())
            .fold(0.0, f64::max)
    }

    pub fn ensure_real(&self, tol: f64) -> Result<()> {
        let d = self.symmetry_defect();
        if d > tol * self.l2_norm().max(1.0) {
            return Err(MixError::NotReal(d));
        }
        Ok(())
    }

    pub fn ensure_mean_zero(&self) -> Result<()> {
        let m = self.mean().norm();
        if m != 0.0 {
            return Err(MixError::NonZeroMean(m));
        }
        Ok(())
    }

    /// `Σ w(k,l) |c(k,l)|²`.
    pub fn weighted_energy(&self, w: impl Fn(i64, i64) -> f64) -> f64 {
        self.coeff
            .iter()
            .enumerate()
            .filter(|(_, c)| c.norm_sqr() != 0.0)
            .map(|(i, c)| {
                let (k, l) = self.lattice.mode(i);
                w(k, l) * c.norm_sqr()
            })
            .sum()
    }

    pub fn l2_norm(&self) -> f64 {
        self.coeff.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Homogeneous Ḣ⁻¹ norm; the datum must have zero mean.
    pub fn hneg1_norm(&self) -> Result<f64> {
        self.ensure_mean_zero()?;
        Ok(self
            .weighted_energy(|k, l| {
                if k == 0 && l == 0 {
                    0.0
                } else {
                    1.0 / (k * k + l * l) as f64
                }
            })
            .sqrt())
    }

    /// `‖f‖_{Ḣ⁻¹} / ‖f‖₂`.
    pub fn mixing_scale(&self) -> Result<f64> {
        let l2 = self.l2_norm();
        if l2 == 0.0 {
            return Err(MixError::ZeroField);
        }
        Ok(self.hneg1_norm()? / l2)
    }

    /// `‖∇f‖₂`.
    pub fn grad_norm(&self) -> f64 {
        self.weighted_energy(|k, l| (k * k + l * l) as f64).sqrt()
    }

    /// `‖Δf‖₂`.
    pub fn laplacian_norm(&self) -> f64 {
        self.weighted_energy(|k, l| ((k * k + l * l) as f64).powi(2)).sqrt()
    }

    /// `‖∂ₓf‖₂`.
    pub fn dx_norm(&self) -> f64 {
        self.weighted_energy(|k, _| (k * k) as f64).sqrt()
    }

    /// The y-profile of the `e^{ikx}` component.
    pub fn x_mode(&self, k: i64) -> Result<ModeProfile> {
        if k.unsigned_abs() as usize > self.lattice.kmax {
            return Err(MixError::ModeOutOfRange {
                k,
                kmax: self.lattice.kmax,
            });
        }
        let nl = self.lattice.nl();
        let start = self.lattice.index(k, -(self.lattice.lmax as i64));
        Ok(ModeProfile {
            k,
            lmax: self.lattice.lmax,
            coeff: self.coeff[start..start + nl].to_vec(),
        })
    }

    /// Overwrite the `e^{ikx}` component; the profile is resized to the lattice.
    pub fn set_x_mode(&mut self, profile: &ModeProfile) -> Result<()> {
        let k = profile.k;
        if k.unsigned_abs() as usize > self.lattice.kmax {
            return Err(MixError::ModeOutOfRange {
                k,
                kmax: self.lattice.kmax,
            });
        }
        let lmax = self.lattice.lmax as i64;
        for l in -lmax..=lmax {
            let i = self.lattice.index(k, l);
            self.coeff[i] = profile.get(l);
        }
        Ok(())
    }

    /// `E_k = Σ_l |c(k,l)|²` for `k = -kmax..=kmax`.
    pub fn x_mode_energies(&self) -> Vec<f64> {
        self.coeff
            .chunks(self.lattice.nl())
            .map(|row| row.iter().map(|c| c.norm_sqr()).sum())
            .collect()
    }

    /// Copy into another lattice, truncating or zero-padding.
    pub fn resample(&self, lattice: Lattice) -> SpectralField2D {
        let mut out = SpectralField2D::zeros(lattice);
        for (i, c) in self.coeff.iter().enumerate() {
            let (k, l) = self.lattice.mode(i);
            if lattice.contains(k, l) {
                out.set(k, l, *c);
            }
        }
        out
    }

    /// `‖self − other‖₂`, comparing on the union of both lattices.
    pub fn distance(&self, other: &SpectralField2D) -> f64 {
        let u = self.lattice.union(&other.lattice);
        u.modes()
            .map(|(k, l)| (self.get(k, l) - other.get(k, l)).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn scaled(&self, s: f64) -> SpectralField2D {
        SpectralField2D {
            lattice: self.lattice,
            coeff: self.coeff.iter().map(|c| c * s).collect(),
        }
    }

    /// Multiply each coefficient by `g(k,l)`.
    pub fn map_modes(&self, g: impl Fn(i64, i64) -> Complex64) -> SpectralField2D {
        SpectralField2D {
            lattice: self.lattice,
            coeff: self
                .coeff
                .iter()
                .enumerate()
                .map(|(i, c)| {
                    let (k, l) = self.lattice.mode(i);
                    c * g(k, l)
                })
                .collect(),
        }
    }

    /// Bilinear pairing `∫ f g = Σ f(κ) g(−κ)`.
    pub fn pairing(&self, other: &SpectralField2D) -> Complex64 {
        self.coeff
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let (k, l) = self.lattice.mode(i);
                c * other.get(-k, -l)
            })
            .sum()
    }

    fn check_grid(&self, nx: usize, ny: usize) -> Result<()> {
        let min_x = 2 * self.lattice.nk();
        let min_y = 2 * self.lattice.nl();
        if nx < min_x || ny < min_y {
            return Err(MixError::GridTooSmall { nx, ny, min_x, min_y });
        }
        Ok(())
    }

    /// Default sampling grid: twice the lattice width, rounded to a fast FFT size.
    pub fn default_grid(&self) -> (usize, usize) {
        (fast_len(2 * self.lattice.nk()), fast_len(2 * self.lattice.nl()))
    }

    /// Complex grid values (x-major, `ix * ny + iy`).
    pub fn grid_sample_complex(&self, nx: usize, ny: usize) -> Result<Vec<Complex64>> {
        self.check_grid(nx, ny)?;
        Ok(Fft2::new(nx, ny).synthesize(&self.coeff, self.lattice.kmax, self.lattice.lmax))
    }

    /// Real grid values of a conjugate-symmetric field.
    pub fn grid_sample(&self, nx: usize, ny: usize) -> Result<Vec<f64>> {
        self.ensure_real(1e-12)?;
        Ok(self.grid_sample_complex(nx, ny)?.into_iter().map(|z| z.re).collect())
    }

    /// Analyze grid samples onto `lattice`.
    pub fn synthesize(lattice: Lattice, samples: &[f64], nx: usize, ny: usize) -> Result<Self> {
        let buf: Vec<Complex64> = samples.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        Self::synthesize_complex(lattice, buf, nx, ny)
    }

    pub fn synthesize_complex(lattice: Lattice, samples: Vec<Complex64>, nx: usize, ny: usize) -> Result<Self> {
        if samples.len() != nx * ny {
            return Err(MixError::Parameter(format!(
                "expected {} samples, got {}",
                nx * ny,
                samples.len()
            )));
        }
        Self::zeros(lattice).check_grid(nx, ny)?;
        let coeff = Fft2::new(nx, ny).analyze(samples, lattice.kmax, lattice.lmax);
        Ok(SpectralField2D { lattice, coeff })
    }

    pub fn to_json(&self) -> FieldJson {
        let coeffs = self
            .coeff
            .iter()
            .enumerate()
            .filter(|(_, c)| c.norm_sqr() != 0.0)
            .map(|(i, c)| {
                let (k, l) = self.lattice.mode(i);
                [k as f64, l as f64, c.re, c.im]
            })
            .collect();
        FieldJson {
            kmax: self.lattice.kmax,
            lmax: self.lattice.lmax,
            coeffs,
        }
    }

    pub fn from_json(json: &FieldJson) -> Result<Self> {
        let lattice = Lattice::new(json.kmax, json.lmax)?;
        let mut f = Self::zeros(lattice);
        for (n, row) in json.coeffs.iter().enumerate() {
            let [k, l, re, im] = *row;
            if k.fract() != 0.0 || l.fract() != 0.0 {
                return Err(crate::error::schema(
                    format!("coeffs[{n}]"),
                    "frequencies must be integers",
                ));
            }
            let (k, l) = (k as i64, l as i64);
            if !lattice.contains(k, l) {
                return Err(crate::error::schema(
                    format!("coeffs[{n}]"),
                    format!("mode ({k},{l}) outside lattice"),
                ));
            }
            f.set(k, l, Complex64::new(re, im));
        }
        Ok(f)
    }
}

/// On-disk form of a field: nonzero coefficients only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldJson {
    pub kmax: usize,
    pub lmax: usize,
    #[serde(serialize_with = "integer_frequencies")]
    pub coeffs: Vec<[f64; 4]>,
}

// frequencies are stored as f64 for lenient input but written back as integers
fn integer_frequencies<S: serde::Serializer>(rows: &[[f64; 4]], ser: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = ser.serialize_seq(Some(rows.len()))?;
    for &[k, l, re, im] in rows {
        seq.serialize_element(&(k as i64, l as i64, re, im))?;
    }
    seq.end()
}

/// The y-profile `f_k(y) = Σ_l c_l e^{ily}` of a single x-mode.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeProfile {
    pub k: i64,
    pub lmax: usize,
    pub coeff: Vec<Complex64>,
}

impl ModeProfile {
    pub fn zeros(k: i64, lmax: usize) -> Self {
        ModeProfile {
            k,
            lmax,
            coeff: vec![ZERO; 2 * lmax + 1],
        }
    }

    pub fn new(k: i64, lmax: usize, coeff: Vec<Complex64>) -> Result<Self> {
        if coeff.len() != 2 * lmax + 1 {
            return Err(MixError::Parameter(format!(
                "profile needs {} coefficients, got {}",
                2 * lmax + 1,
                coeff.len()
            )));
        }
        Ok(ModeProfile { k, lmax, coeff })
    }

    pub fn get(&self, l: i64) -> Complex64 {
        if l.unsigned_abs() as usize <= self.lmax {
            self.coeff[(l + self.lmax as i64) as usize]
        } else {
            ZERO
        }
    }

    pub fn set(&mut self, l: i64, v: Complex64) {
        assert!(l.unsigned_abs() as usize <= self.lmax);
        self.coeff[(l + self.lmax as i64) as usize] = v;
    }

    pub fn energy(&self) -> f64 {
        self.coeff.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn l2_norm(&self) -> f64 {
        self.energy().sqrt()
    }

    /// `Σ_{|l|≤n} |c_l|²`.
    pub fn low_block_energy(&self, n: usize) -> f64 {
        let n = n.min(self.lmax) as i64;
        (-n..=n).map(|l| self.get(l).norm_sqr()).sum()
    }

    /// `Σ_{|l|>n} |c_l|²`, summed directly rather than as a difference.
    pub fn high_block_energy(&self, n: usize) -> f64 {
        let lmax = self.lmax as i64;
        let n = n as i64;
        (-lmax..=lmax)
            .filter(|l| l.abs() > n)
            .map(|l| self.get(l).norm_sqr())
            .sum()
    }

    /// Least `J ≥ min_j` with `Σ_{|l|>J}|c_l|² ≤ bound`.
    pub fn tail_cutoff(&self, bound: f64, min_j: usize) -> usize {
        (min_j..self.lmax)
            .find(|&j| self.high_block_energy(j) <= bound)
            .unwrap_or(self.lmax.max(min_j))
    }

    /// `‖A_k f‖₂` with `A_k = k² − ∂_yy`.
    pub fn ak_norm(&self) -> f64 {
        let k2 = (self.k * self.k) as f64;
        let lmax = self.lmax as i64;
        (-lmax..=lmax)
            .map(|l| ((k2 + (l * l) as f64) * self.get(l).norm()).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    /// Copy into a profile of a different `lmax`.
    pub fn resized(&self, lmax: usize) -> ModeProfile {
        let mut out = ModeProfile::zeros(self.k, lmax);
        let m = lmax.min(self.lmax) as i64;
        for l in -m..=m {
            out.set(l, self.get(l));
        }
        out
    }

    /// Grid values at `n` points; `n` must exceed `2·lmax`.
    pub fn grid_values(&self, n: usize) -> Result<Vec<Complex64>> {
        if n <= 2 * self.lmax {
            return Err(MixError::GridTooSmall {
                nx: 1,
                ny: n,
                min_x: 1,
                min_y: 2 * self.lmax + 1,
            });
        }
        Ok(Fft1::new(n).synthesize(&self.coeff, self.lmax))
    }
}

/// Nonzero coefficients grouped per x-mode, used for compact audit output.
pub fn support(field: &SpectralField2D) -> BTreeMap<i64, Vec<i64>> {
    let mut map: BTreeMap<i64, Vec<i64>> = BTreeMap::new();
    for (i, c) in field.coeffs().iter().enumerate() {
        if c.norm_sqr() != 0.0 {
            let (k, l) = field.lattice().mode(i);
            map.entry(k).or_default().push(l);
        }
    }
    map
}
