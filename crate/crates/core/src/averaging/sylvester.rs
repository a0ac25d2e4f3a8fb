//! Contour estimate of the constant bounding solutions of
//! `−B*Y + YG + ΦH = R`, `PY = 0`, in the pairs of norms `H⁻¹ → H¹` and `L² → H²`.
//!
//! With `Γ` a circle around `λ_ν` of radius half the spectral gap,
//! `Y = (2πi)⁻¹∮_Γ (z − B*)⁻¹ Π⊥R (z − G)⁻¹ dz` and `H` is the root-space
//! coordinate vector of `PR`. The estimate is a maximum over quadrature nodes
//! on the truncated operator; it is not a rigorous bound.

use std::f64::consts::TAU;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::averaging::operator::AveragedOperator;
use crate::averaging::schur::triangular_sylvester;
use crate::averaging::spectrum::DetectingSpectrum;
use crate::error::{MixError, Result};

type CMat = DMatrix<Complex64>;

pub const CONTOUR_NODES: usize = 32;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeNorms {
    pub z: [f64; 2],
    /// `‖(z − B*)⁻¹Π⊥‖` in plain L².
    pub resolvent_l2: f64,
    /// `‖(z − B*)⁻¹Π⊥‖_{L²→H²}`.
    pub resolvent_h2: f64,
    /// `‖(z − B*)⁻¹Π⊥‖_{H⁻¹→H¹}`.
    pub resolvent_h1: f64,
    /// `‖(z − G)⁻¹‖`.
    pub g_resolvent: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SylvesterEstimate {
    #[serde(rename = "C_S")]
    pub c_s: f64,
    /// Contributions for the `L² → H²` and `H⁻¹ → H¹` estimates.
    pub c_l2: f64,
    pub c_hneg1: f64,
    pub radius: f64,
    pub gap: f64,
    /// `‖H‖` coefficient maps in the two norms.
    pub coord_l2: f64,
    pub coord_hneg1: f64,
    pub nodes: Vec<NodeNorms>,
    pub estimated_at_truncation: bool,
}

struct Block {
    weights: Vec<f64>,
    t22: CMat,
    /// `Q₁X + Q₂`, mapping complement coordinates back to modes.
    left: CMat,
    /// `Q₂ᴴ`.
    right: CMat,
    /// `Q₁ᴴ − XQ₂ᴴ`, the root-space coordinate map.
    coord: CMat,
}

fn norm2(m: &CMat) -> f64 {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0.0;
    }
    m.clone().singular_values().max()
}

fn scale_rows(m: &CMat, w: &[f64], p: f64) -> CMat {
    let mut out = m.clone();
    for (i, mut row) in out.row_iter_mut().enumerate() {
        row *= Complex64::new(w[i].powf(p), 0.0);
    }
    out
}

fn scale_cols(m: &CMat, w: &[f64], p: f64) -> CMat {
    let mut out = m.clone();
    for (j, mut col) in out.column_iter_mut().enumerate() {
        col *= Complex64::new(w[j].powf(p), 0.0);
    }
    out
}

fn upper_inverse_shifted(t: &CMat, z: Complex64) -> Result<CMat> {
    let n = t.nrows();
    let mut m = -t.clone();
    for i in 0..n {
        m[(i, i)] += z;
    }
    m.solve_upper_triangular(&CMat::identity(n, n))
        .ok_or_else(|| MixError::Numerical("contour node hits the spectrum".into()))
}

pub fn sylvester_constant(op: &AveragedOperator, spec: &DetectingSpectrum) -> Result<SylvesterEstimate> {
    let tol = spec.tol_cluster;
    if !spec.gap.is_finite() || spec.gap <= tol {
        return Err(MixError::GapTooSmall { gap: spec.gap, tol });
    }
    let radius = 0.5 * spec.gap;

    let mut blocks = Vec::new();
    for part in &spec.components {
        let n = part.indices.len();
        let p = part.cluster_size;
        let weights: Vec<f64> = part
            .indices
            .iter()
            .map(|&i| {
                let (k, l) = op.mode(i);
                1.0 + (k * k + l * l) as f64
            })
            .collect();
        let t = &part.form.t;
        let q = &part.form.q;
        let t11 = t.view((0, 0), (p, p)).into_owned();
        let t12 = t.view((0, p), (p, n - p)).into_owned();
        let t22 = t.view((p, p), (n - p, n - p)).into_owned();
        let q1 = q.columns(0, p).into_owned();
        let q2 = q.columns(p, n - p).into_owned();
        let x = triangular_sylvester(&t11, &t22, &(-t12))?;
        blocks.push(Block {
            weights,
            t22,
            left: &q1 * &x + &q2,
            right: q2.adjoint(),
            coord: q1.adjoint() - &x * q2.adjoint(),
        });
    }

    // weight w = 1+|κ|²; Λ_s multiplies by w^{s/2}
    let mut coord_l2: f64 = 0.0;
    let mut coord_hneg1: f64 = 0.0;
    for b in &blocks {
        if b.coord.nrows() == 0 {
            continue;
        }
        coord_l2 = coord_l2.max(norm2(&b.coord));
        coord_hneg1 = coord_hneg1.max(norm2(&scale_cols(&b.coord, &b.weights, 0.5)));
    }

    let mut nodes = Vec::with_capacity(CONTOUR_NODES);
    for j in 0..CONTOUR_NODES {
        let angle = TAU * (j as f64 + 0.5) / CONTOUR_NODES as f64;
        let z = spec.lambda_nu + Complex64::from_polar(radius, angle);
        let (mut r_l2, mut r_h2, mut r_h1): (f64, f64, f64) = (0.0, 0.0, 0.0);
        for b in &blocks {
            if b.t22.nrows() == 0 {
                continue;
            }
            let core = upper_inverse_shifted(&b.t22, z)?;
            let m = &b.left * core * &b.right;
            r_l2 = r_l2.max(norm2(&m));
            r_h2 = r_h2.max(norm2(&scale_rows(&m, &b.weights, 1.0)));
            let h1 = scale_cols(&scale_rows(&m, &b.weights, 0.5), &b.weights, 0.5);
            r_h1 = r_h1.max(norm2(&h1));
        }
        let g_res = norm2(&upper_or_general_inverse(&spec.g, z)?);
        nodes.push(NodeNorms {
            z: [z.re, z.im],
            resolvent_l2: r_l2,
            resolvent_h2: r_h2,
            resolvent_h1: r_h1,
            g_resolvent: g_res,
        });
    }
    let c_l2 = radius * nodes.iter().map(|n| n.resolvent_h2 * n.g_resolvent).fold(0.0, f64::max) + coord_l2;
    let c_hneg1 = radius * nodes.iter().map(|n| n.resolvent_h1 * n.g_resolvent).fold(0.0, f64::max) + coord_hneg1;
    Ok(SylvesterEstimate {
        c_s: c_l2.max(c_hneg1).max(1.0),
        c_l2,
        c_hneg1,
        radius,
        gap: spec.gap,
        coord_l2,
        coord_hneg1,
        nodes,
        estimated_at_truncation: true,
    })
}

fn upper_or_general_inverse(g: &CMat, z: Complex64) -> Result<CMat> {
    let n = g.nrows();
    let mut m = -g.clone();
    for i in 0..n {
        m[(i, i)] += z;
    }
    m.try_inverse()
        .ok_or_else(|| MixError::Numerical("contour node hits the root-space spectrum".into()))
}
