//! Serializable views of the library's results.
//!
//! Complex vectors are written as lists of `[re, im]` pairs. Infinite
//! amplification factors become `null`.

use serde::Serialize;

use crate::decompose::{verify_bounds, BoundsReport, Decomposition};
use crate::functional::ExtensionReport;
use crate::hilbert::{norm, Vector};
use crate::linalg::CVec;
use crate::subspace::{Containment, InclinationReport};

pub fn complex_pairs(v: &CVec) -> Vec<[f64; 2]> {
    v.iter().map(|z| [z.re, z.im]).collect()
}

fn vector_pairs(v: &Vector) -> Vec<[f64; 2]> {
    complex_pairs(v.coeffs())
}

fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

#[derive(Debug, Clone, Serialize)]
pub struct PairJson {
    pub u: Vec<[f64; 2]>,
    pub v: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, Serialize)]
pub struct InclinationJson {
    pub c: f64,
    pub q_dim: usize,
    pub l_reduced_dim: usize,
    pub m_reduced_dim: usize,
    pub angles: Vec<f64>,
    pub containment: Containment,
    pub near_degenerate: bool,
    pub amplification: Option<f64>,
    pub top_pair: Option<PairJson>,
    pub tol: f64,
}

impl From<&InclinationReport> for InclinationJson {
    fn from(r: &InclinationReport) -> Self {
        Self {
            c: r.c,
            q_dim: r.q_dim,
            l_reduced_dim: r.l_reduced.dim(),
            m_reduced_dim: r.m_reduced.dim(),
            angles: r.angles.clone(),
            containment: r.containment,
            near_degenerate: r.near_degenerate,
            amplification: finite(r.amplification()),
            top_pair: r.top_pair.as_ref().map(|(u, v)| PairJson { u: vector_pairs(u), v: vector_pairs(v) }),
            tol: r.tol,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DecompositionNorms {
    pub x: f64,
    pub y_hat: f64,
    pub xl_hat: f64,
    pub xm_hat: f64,
    pub xl: f64,
    pub xm: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct DecompositionVectors {
    pub x: Vec<[f64; 2]>,
    pub y_hat: Vec<[f64; 2]>,
    pub xl_hat: Vec<[f64; 2]>,
    pub xm_hat: Vec<[f64; 2]>,
    pub xl: Vec<[f64; 2]>,
    pub xm: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, Serialize)]
pub struct DecompositionJson {
    pub a1: f64,
    pub a2: f64,
    pub c: f64,
    pub q_dim: usize,
    pub big_a1: f64,
    pub big_a2: f64,
    pub residual: f64,
    pub norms: DecompositionNorms,
    pub vectors: DecompositionVectors,
    pub bounds: BoundsReport,
}

impl From<&Decomposition> for DecompositionJson {
    fn from(d: &Decomposition) -> Self {
        Self {
            a1: d.a1,
            a2: d.a2,
            c: d.c,
            q_dim: d.q_dim,
            big_a1: d.big_a1,
            big_a2: d.big_a2,
            residual: d.residual,
            norms: DecompositionNorms {
                x: norm(&d.x),
                y_hat: norm(&d.y_hat),
                xl_hat: norm(&d.xl_hat),
                xm_hat: norm(&d.xm_hat),
                xl: norm(&d.xl),
                xm: norm(&d.xm),
            },
            vectors: DecompositionVectors {
                x: vector_pairs(&d.x),
                y_hat: vector_pairs(&d.y_hat),
                xl_hat: vector_pairs(&d.xl_hat),
                xm_hat: vector_pairs(&d.xm_hat),
                xl: vector_pairs(&d.xl),
                xm: vector_pairs(&d.xm),
            },
            bounds: verify_bounds(d),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ExtensionJson {
    pub c: f64,
    pub norm_f: f64,
    pub norm_f_l: f64,
    pub norm_f_tilde: f64,
    pub bound: f64,
    pub bound_slack: f64,
    pub on_l_error: f64,
    pub on_m_error: f64,
    pub f: Vec<[f64; 2]>,
    pub f_tilde: Vec<[f64; 2]>,
}

impl From<&ExtensionReport> for ExtensionJson {
    fn from(e: &ExtensionReport) -> Self {
        Self {
            c: e.c,
            norm_f: e.f.norm(),
            norm_f_l: e.norm_f_l,
            norm_f_tilde: e.norm_f_tilde,
            bound: e.bound,
            bound_slack: e.bound - e.norm_f_tilde,
            on_l_error: e.on_l_error,
            on_m_error: e.on_m_error,
            f: vector_pairs(e.f.riesz()),
            f_tilde: vector_pairs(e.f_tilde.riesz()),
        }
    }
}
