//! `B* = νΔ + ū·∇` on the mean-zero modes of a square truncation.
//!
//! The drift couples only modes a velocity wavevector apart, so the matrix is
//! held as its diagonal plus a coupling list and densified per connected block.

use std::collections::{BTreeMap, HashMap};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{param, Result};
use crate::flows::{FlowSpec, VelocityField};
use crate::spectral::{Lattice, SpectralField2D};

#[derive(Debug, Clone)]
pub struct AveragedOperator {
    pub nu: f64,
    pub cutoff: Lattice,
    pub velocity: VelocityField,
    /// `−ν|κ|²` per mode.
    diag: Vec<f64>,
    /// Off-diagonal entries `(row κ, col κ', i ū̂(κ−κ')·κ')`.
    drift: Vec<(usize, usize, Complex64)>,
}

/// Assemble the operator for the phase-averaged velocity of `flow`.
pub fn averaged_operator(flow: &FlowSpec, nu: f64, cutoff: usize) -> Result<AveragedOperator> {
    AveragedOperator::from_velocity(flow.time_average(), nu, cutoff)
}

impl AveragedOperator {
    pub fn from_velocity(velocity: VelocityField, nu: f64, cutoff: usize) -> Result<Self> {
        if !(nu.is_finite() && nu > 0.0) {
            return Err(param(format!("viscosity must be positive, got {nu}")));
        }
        let lat = Lattice::square(cutoff)?;
        if 2 * velocity.band() > cutoff {
            log::warn!(
                "velocity band {} exceeds half the cutoff {cutoff}; truncation leaks drift",
                velocity.band()
            );
        }
        let dim = lat.len() - 1;
        let vlat = velocity.lattice();
        let waves: Vec<(i64, i64, Complex64, Complex64)> = vlat
            .modes()
            .filter_map(|(qk, ql)| {
                let ux = velocity.ux.get(qk, ql);
                let uy = velocity.uy.get(qk, ql);
                (ux.norm_sqr() + uy.norm_sqr() > 0.0).then_some((qk, ql, ux, uy))
            })
            .collect();
        let i = Complex64::new(0.0, 1.0);
        let mut diag = Vec::with_capacity(dim);
        let mut drift = Vec::new();
        for col in 0..dim {
            let (k, l) = mode_of(&lat, col);
            diag.push(-nu * (k * k + l * l) as f64);
            for &(qk, ql, ux, uy) in &waves {
                let (rk, rl) = (k + qk, l + ql);
                if (rk == 0 && rl == 0) || !lat.contains(rk, rl) {
                    continue;
                }
                let v = i * (ux * k as f64 + uy * l as f64);
                if v.norm_sqr() > 0.0 {
                    drift.push((index_of(&lat, rk, rl), col, v));
                }
            }
        }
        Ok(AveragedOperator {
            nu,
            cutoff: lat,
            velocity,
            diag,
            drift,
        })
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn mode(&self, idx: usize) -> (i64, i64) {
        mode_of(&self.cutoff, idx)
    }

    pub fn index(&self, k: i64, l: i64) -> Option<usize> {
        (self.cutoff.contains(k, l) && (k, l) != (0, 0)).then(|| index_of(&self.cutoff, k, l))
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.diag
    }

    /// Off-diagonal couplings `(row, col, value)`.
    pub fn couplings(&self) -> &[(usize, usize, Complex64)] {
        &self.drift
    }

    /// Dense matrix on the given (sorted) index set.
    pub fn block(&self, idx: &[usize]) -> DMatrix<Complex64> {
        let pos: HashMap<usize, usize> = idx.iter().enumerate().map(|(p, &i)| (i, p)).collect();
        let mut m = DMatrix::<Complex64>::zeros(idx.len(), idx.len());
        for (p, &i) in idx.iter().enumerate() {
            m[(p, p)] = Complex64::new(self.diag[i], 0.0);
        }
        for &(r, c, v) in &self.drift {
            if let (Some(&pr), Some(&pc)) = (pos.get(&r), pos.get(&c)) {
                m[(pr, pc)] += v;
            }
        }
        m
    }

    /// The full dense matrix (use only for small cutoffs).
    pub fn dense(&self) -> DMatrix<Complex64> {
        let all: Vec<usize> = (0..self.dim()).collect();
        self.block(&all)
    }

    /// Coefficients of `f` on the mean-zero truncation.
    pub fn to_vector(&self, f: &SpectralField2D) -> DVector<Complex64> {
        DVector::from_iterator(
            self.dim(),
            (0..self.dim()).map(|i| {
                let (k, l) = self.mode(i);
                f.get(k, l)
            }),
        )
    }

    pub fn to_field(&self, v: &DVector<Complex64>) -> SpectralField2D {
        let mut f = SpectralField2D::zeros(self.cutoff);
        for (i, c) in v.iter().enumerate() {
            let (k, l) = self.mode(i);
            f.set(k, l, *c);
        }
        f
    }

    pub fn matvec(&self, v: &DVector<Complex64>) -> DVector<Complex64> {
        let mut out = DVector::from_iterator(self.dim(), self.diag.iter().zip(v.iter()).map(|(d, x)| x * *d));
        for &(r, c, a) in &self.drift {
            out[r] += a * v[c];
        }
        out
    }

    pub fn apply(&self, f: &SpectralField2D) -> SpectralField2D {
        self.to_field(&self.matvec(&self.to_vector(f)))
    }

    /// Largest entry of `D + Dᴴ` for the drift part `D`; zero for exact skewness.
    pub fn drift_skewness(&self) -> f64 {
        let mut sums: HashMap<(usize, usize), Complex64> = HashMap::new();
        for &(r, c, v) in &self.drift {
            *sums.entry((r, c)).or_default() += v;
            *sums.entry((c, r)).or_default() += v.conj();
        }
        sums.values().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Connected components of the coupling graph, each sorted, ordered by first index.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let n = self.dim();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for &(r, c, _) in &self.drift {
            let (a, b) = (find(&mut parent, r), find(&mut parent, c));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
        let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for i in 0..n {
            let root = find(&mut parent, i);
            groups.entry(root).or_default().push(i);
        }
        let mut out: Vec<Vec<usize>> = groups.into_values().collect();
        out.sort_by_key(|g| g[0]);
        out
    }
}

fn mode_of(lat: &Lattice, idx: usize) -> (i64, i64) {
    let center = lat.index(0, 0);
    lat.mode(if idx >= center { idx + 1 } else { idx })
}

fn index_of(lat: &Lattice, k: i64, l: i64) -> usize {
    let i = lat.index(k, l);
    if i > lat.index(0, 0) {
        i - 1
    } else {
        i
    }
}
