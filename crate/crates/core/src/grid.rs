//! FFT bridges between truncated coefficient arrays and physical grids.
//!
//! Grid point `j` of an `n`-point axis sits at `2πj/n`. Synthesis evaluates
//! `Σ c_l e^{i l y_j}`; analysis divides by `n`, so the pair is an exact inverse
//! whenever `n > 2·lmax`.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

/// One-dimensional transform for coefficient vectors indexed `l = -lmax..=lmax`.
#[derive(Clone)]
pub struct Fft1 {
    n: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl Fft1 {
    pub fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        Fft1 {
            n,
            fwd: planner.plan_fft_forward(n),
            inv: planner.plan_fft_inverse(n),
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Grid values of `Σ_{|l|≤lmax} c_l e^{ily}`. Requires `n > 2 lmax`.
    pub fn synthesize(&self, coeff: &[Complex64], lmax: usize) -> Vec<Complex64> {
        let mut buf = vec![Complex64::new(0.0, 0.0); self.n];
        self.synthesize_into(coeff, lmax, &mut buf);
        buf
    }

    pub fn synthesize_into(&self, coeff: &[Complex64], lmax: usize, buf: &mut [Complex64]) {
        debug_assert!(self.n > 2 * lmax);
        debug_assert_eq!(coeff.len(), 2 * lmax + 1);
        buf.fill(Complex64::new(0.0, 0.0));
        let n = self.n as i64;
        for (i, c) in coeff.iter().enumerate() {
            let l = i as i64 - lmax as i64;
            buf[l.rem_euclid(n) as usize] = *c;
        }
        self.inv.process(buf);
    }

    /// Coefficients `|l| ≤ lmax` of grid data; modes above `lmax` are discarded.
    pub fn analyze(&self, buf: &mut [Complex64], lmax: usize) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); 2 * lmax + 1];
        self.analyze_into(buf, lmax, &mut out);
        out
    }

    pub fn analyze_into(&self, buf: &mut [Complex64], lmax: usize, out: &mut [Complex64]) {
        debug_assert!(self.n > 2 * lmax);
        self.fwd.process(buf);
        let n = self.n as i64;
        let scale = 1.0 / self.n as f64;
        for (i, o) in out.iter_mut().enumerate() {
            let l = i as i64 - lmax as i64;
            *o = buf[l.rem_euclid(n) as usize] * scale;
        }
    }
}

/// Two-dimensional transform; grid storage is x-major (`ix * ny + iy`).
#[derive(Clone)]
pub struct Fft2 {
    nx: usize,
    ny: usize,
    x: Fft1,
    y: Fft1,
}

impl Fft2 {
    pub fn new(nx: usize, ny: usize) -> Self {
        Fft2 {
            nx,
            ny,
            x: Fft1::new(nx),
            y: Fft1::new(ny),
        }
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.nx, self.ny)
    }

    /// Grid values of the truncated series with `coeff` laid out like
    /// [`crate::spectral::Lattice::index`].
    pub fn synthesize(&self, coeff: &[Complex64], kmax: usize, lmax: usize) -> Vec<Complex64> {
        debug_assert!(self.nx > 2 * kmax && self.ny > 2 * lmax);
        let (nx, ny) = (self.nx, self.ny);
        let nl = 2 * lmax + 1;
        let mut buf = vec![Complex64::new(0.0, 0.0); nx * ny];
        for (i, c) in coeff.iter().enumerate() {
            if c.re == 0.0 && c.im == 0.0 {
                continue;
            }
            let k = (i / nl) as i64 - kmax as i64;
            let l = (i % nl) as i64 - lmax as i64;
            let ix = k.rem_euclid(nx as i64) as usize;
            let iy = l.rem_euclid(ny as i64) as usize;
            buf[ix * ny + iy] = *c;
        }
        self.transform(&mut buf, false);
        buf
    }

    /// Coefficients on the `(kmax, lmax)` lattice of grid data.
    pub fn analyze(&self, mut buf: Vec<Complex64>, kmax: usize, lmax: usize) -> Vec<Complex64> {
        debug_assert!(self.nx > 2 * kmax && self.ny > 2 * lmax);
        let (nx, ny) = (self.nx, self.ny);
        self.transform(&mut buf, true);
        let scale = 1.0 / (nx * ny) as f64;
        let nl = 2 * lmax + 1;
        let mut out = vec![Complex64::new(0.0, 0.0); (2 * kmax + 1) * nl];
        for (i, o) in out.iter_mut().enumerate() {
            let k = (i / nl) as i64 - kmax as i64;
            let l = (i % nl) as i64 - lmax as i64;
            let ix = k.rem_euclid(nx as i64) as usize;
            let iy = l.rem_euclid(ny as i64) as usize;
            *o = buf[ix * ny + iy] * scale;
        }
        out
    }

    fn transform(&self, buf: &mut [Complex64], forward: bool) {
        let (nx, ny) = (self.nx, self.ny);
        let (fx, fy) = if forward {
            (&self.x.fwd, &self.y.fwd)
        } else {
            (&self.x.inv, &self.y.inv)
        };
        // rows are contiguous in y; rustfft handles the batch
        fy.process(buf);
        let mut t = vec![Complex64::new(0.0, 0.0); nx * ny];
        for ix in 0..nx {
            for iy in 0..ny {
                t[iy * nx + ix] = buf[ix * ny + iy];
            }
        }
        fx.process(&mut t);
        for iy in 0..ny {
            for ix in 0..nx {
                buf[ix * ny + iy] = t[iy * nx + ix];
            }
        }
    }
}

/// Smallest size `≥ min` whose only prime factors are 2, 3 and 5.
pub fn fast_len(min: usize) -> usize {
    let mut n = min.max(1);
    loop {
        let mut m = n;
        for p in [2, 3, 5] {
            while m.is_multiple_of(p) {
                m /= p;
            }
        }
        if m == 1 {
            return n;
        }
        n += 1;
    }
}

/// Grid coordinate `2πj/n`.
#[inline]
pub fn node(j: usize, n: usize) -> f64 {
    std::f64::consts::TAU * j as f64 / n as f64
}
