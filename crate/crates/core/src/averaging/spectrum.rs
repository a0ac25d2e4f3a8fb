//! Eigenvalue clusters of the averaged operator and the detecting root space.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::averaging::operator::AveragedOperator;
use crate::averaging::schur::SchurForm;
use crate::error::{MixError, Result};
use crate::spectral::SpectralField2D;

/// Cluster radius relative to `ν`.
pub const TOL_CLUSTER_REL: f64 = 1e-6;
/// Root-space projections below `EPS_DETECT · ‖ρ₀‖₂` count as zero.
pub const EPS_DETECT: f64 = 1e-8;

/// Schur form of one connected block of the operator.
#[derive(Debug, Clone)]
pub struct ComponentSchur {
    pub indices: Vec<usize>,
    pub form: SchurForm,
    /// Leading diagonal entries of `form` that belong to the selected cluster.
    pub cluster_size: usize,
}

#[derive(Debug, Clone)]
pub struct DetectingSpectrum {
    /// All eigenvalues ordered by `−Re`, then `Im`.
    pub eigenvalues: Vec<Complex64>,
    pub cluster: Vec<Complex64>,
    pub lambda_nu: Complex64,
    pub gamma_nu: f64,
    pub d_nu: usize,
    /// Orthonormal basis of the root space as columns over the operator's modes.
    pub phi: DMatrix<Complex64>,
    pub g: DMatrix<Complex64>,
    /// `q_j = ⟨ρ₀, φ_j⟩` under the bilinear pairing.
    pub q: Vec<Complex64>,
    pub q_norm: f64,
    pub k0: f64,
    pub k2: f64,
    pub g_norm: f64,
    pub residuals: Vec<f64>,
    /// Distance from `λ_ν` to the rest of the spectrum.
    pub gap: f64,
    pub tol_cluster: f64,
    pub eps_detect: f64,
    /// Representatives of lower-`−Re` clusters that the datum does not see.
    pub skipped: Vec<Complex64>,
    pub components: Vec<ComponentSchur>,
}

/// Serializable digest of a [`DetectingSpectrum`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumSummary {
    pub eigenvalues: Vec<[f64; 2]>,
    pub cluster: Vec<[f64; 2]>,
    pub lambda_nu: [f64; 2],
    pub gamma_nu: f64,
    pub d_nu: usize,
    #[serde(rename = "Q_nu")]
    pub q_norm: f64,
    #[serde(rename = "K0_nu")]
    pub k0: f64,
    #[serde(rename = "K2_nu")]
    pub k2: f64,
    pub g_nu: f64,
    #[serde(rename = "G_nu")]
    pub g: Vec<Vec<[f64; 2]>>,
    pub max_residual: f64,
    pub gap: f64,
    pub tol_cluster: f64,
    pub skipped: Vec<[f64; 2]>,
}

fn pair(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

impl DetectingSpectrum {
    pub fn summary(&self, max_eigenvalues: usize) -> SpectrumSummary {
        SpectrumSummary {
            eigenvalues: self
                .eigenvalues
                .iter()
                .take(max_eigenvalues)
                .map(|z| pair(*z))
                .collect(),
            cluster: self.cluster.iter().map(|z| pair(*z)).collect(),
            lambda_nu: pair(self.lambda_nu),
            gamma_nu: self.gamma_nu,
            d_nu: self.d_nu,
            q_norm: self.q_norm,
            k0: self.k0,
            k2: self.k2,
            g_nu: self.g_norm,
            g: (0..self.g.nrows())
                .map(|i| (0..self.g.ncols()).map(|j| pair(self.g[(i, j)])).collect())
                .collect(),
            max_residual: self.residuals.iter().copied().fold(0.0, f64::max),
            gap: self.gap,
            tol_cluster: self.tol_cluster,
            skipped: self.skipped.iter().map(|z| pair(*z)).collect(),
        }
    }

    /// Basis vectors as fields on the operator's lattice.
    pub fn basis_fields(&self, op: &AveragedOperator) -> Vec<SpectralField2D> {
        (0..self.d_nu)
            .map(|j| op.to_field(&self.phi.column(j).into_owned()))
            .collect()
    }
}

/// Eigenvalues of every block, each tagged `(value, component, position)`.
fn all_eigenvalues(parts: &[ComponentSchur]) -> Vec<(Complex64, usize, usize)> {
    let mut out = Vec::new();
    for (c, part) in parts.iter().enumerate() {
        for (p, z) in part.form.eigenvalues().into_iter().enumerate() {
            out.push((z, c, p));
        }
    }
    out.sort_by(|a, b| {
        (-a.0.re)
            .total_cmp(&-b.0.re)
            .then(a.0.im.total_cmp(&b.0.im))
            .then(a.1.cmp(&b.1))
            .then(a.2.cmp(&b.2))
    });
    out
}

/// Single-linkage groups of sorted eigenvalues within `tol`, in order of first member.
fn clusters(sorted: &[(Complex64, usize, usize)], tol: f64) -> Vec<Vec<usize>> {
    let n = sorted.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for i in 0..n {
        for j in i + 1..n {
            if sorted[i].0.re - sorted[j].0.re > tol {
                break;
            }
            if (sorted[i].0 - sorted[j].0).norm() <= tol {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for i in 0..n {
        let r = find(&mut parent, i);
        groups.entry(r).or_default().push(i);
    }
    groups.into_values().collect()
}

/// Schur decomposition of every connected block.
pub fn block_schur(op: &AveragedOperator) -> Result<Vec<ComponentSchur>> {
    op.components()
        .into_iter()
        .map(|indices| {
            let form = SchurForm::new(op.block(&indices))?;
            Ok(ComponentSchur {
                indices,
                form,
                cluster_size: 0,
            })
        })
        .collect()
}

/// Locate the detecting cluster with the smallest decay rate and build its root-space data.
pub fn detecting_spectrum(op: &AveragedOperator, rho0: &SpectralField2D) -> Result<DetectingSpectrum> {
    detecting_spectrum_with(op, rho0, TOL_CLUSTER_REL * op.nu, EPS_DETECT)
}

pub fn detecting_spectrum_with(
    op: &AveragedOperator,
    rho0: &SpectralField2D,
    tol_cluster: f64,
    eps_detect: f64,
) -> Result<DetectingSpectrum> {
    let norm = rho0.l2_norm();
    if norm == 0.0 {
        return Err(MixError::ZeroField);
    }
    let parts = block_schur(op)?;
    let sorted = all_eigenvalues(&parts);
    let groups = clusters(&sorted, tol_cluster);
    let rho = op.to_vector(rho0);
    // bilinear pairing partner: ρ̂₀(κ) multiplies φ̂(−κ)
    let mirror: Vec<Option<usize>> = (0..op.dim())
        .map(|i| {
            let (k, l) = op.mode(i);
            op.index(-k, -l)
        })
        .collect();

    let mut skipped = Vec::new();
    for group in groups {
        let mut work = parts.clone();
        let mut select: Vec<Vec<bool>> = work.iter().map(|p| vec![false; p.form.dim()]).collect();
        for &s in &group {
            let (_, c, p) = sorted[s];
            select[c][p] = true;
        }
        let mut d = 0;
        for (part, sel) in work.iter_mut().zip(&select) {
            if sel.iter().any(|&b| b) {
                part.cluster_size = part.form.reorder(sel);
                d += part.cluster_size;
            }
        }
        let dim = op.dim();
        let mut phi = DMatrix::<Complex64>::zeros(dim, d);
        let mut g = DMatrix::<Complex64>::zeros(d, d);
        let mut col = 0;
        for part in work.iter().filter(|p| p.cluster_size > 0) {
            let p = part.cluster_size;
            for j in 0..p {
                for (r, &i) in part.indices.iter().enumerate() {
                    phi[(i, col + j)] = part.form.q[(r, j)];
                }
                for i in 0..p {
                    g[(col + i, col + j)] = part.form.t[(i, j)];
                }
            }
            col += p;
        }
        let q: Vec<Complex64> = (0..d)
            .map(|j| (0..dim).filter_map(|i| mirror[i].map(|m| rho[i] * phi[(m, j)])).sum())
            .collect();
        let q_norm = q.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let members: Vec<Complex64> = group.iter().map(|&s| sorted[s].0).collect();
        if q_norm <= eps_detect * norm {
            skipped.push(members[0]);
            continue;
        }

        // the most strongly damped member is the conservative representative
        let lambda_nu = members
            .iter()
            .copied()
            .fold(members[0], |a, z| if -z.re > -a.re { z } else { a });
        let gap = sorted
            .iter()
            .enumerate()
            .filter(|(s, _)| !group.contains(s))
            .map(|(_, e)| (e.0 - lambda_nu).norm())
            .fold(f64::INFINITY, f64::min);

        let residuals: Vec<f64> = (0..d)
            .map(|j| {
                let v: DVector<Complex64> = phi.column(j).into_owned();
                let lhs = op.matvec(&v);
                let rhs = &phi * g.column(j);
                (lhs - rhs).norm()
            })
            .collect();
        let weights2: Vec<f64> = (0..dim)
            .map(|i| {
                let (k, l) = op.mode(i);
                (1.0 + (k * k + l * l) as f64).powi(2)
            })
            .collect();
        let k0 = phi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let k2 = (0..d)
            .map(|j| (0..dim).map(|i| weights2[i] * phi[(i, j)].norm_sqr()).sum::<f64>())
            .sum::<f64>()
            .sqrt();
        let g_norm = g.clone().singular_values().max();

        return Ok(DetectingSpectrum {
            eigenvalues: sorted.iter().map(|e| e.0).collect(),
            cluster: members,
            lambda_nu,
            gamma_nu: -lambda_nu.re,
            d_nu: d,
            phi,
            g,
            q,
            q_norm,
            k0,
            k2,
            g_norm,
            residuals,
            gap,
            tol_cluster,
            eps_detect,
            skipped,
            components: work,
        });
    }
    Err(MixError::NoDetectingCluster)
}
