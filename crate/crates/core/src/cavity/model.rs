//! Spectral model of zero-tangential-trace vector fields on the unit box.
//!
//! Ambient coordinates index single-component basis fields. Component `j`
//! carries `sin(k_i π x_i)` (`k_i = 1..N`) on every other axis and either
//! `sin(kπx_j)` (`k = 1..N`) or `cos(kπx_j)` (`k = 0..N`) on its own axis, so
//! the tangential trace vanishes identically. The metric is the energy form
//!
//! ```text
//! ‖u‖²_H = ∫ |rot u|² + |div u|² + |u|²
//! ```
//!
//! `𝓛` is spanned by the all-sine basis fields (the `H₀¹` part) and `𝓜` by
//! gradients of all-sine scalars.

use std::collections::HashMap;
use std::sync::Arc;

use nalgebra::{Cholesky, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::decompose::{decompose_with_report, verify_bounds, BoundsReport, DEFAULT_A1};
use crate::error::{Error, Result};
use crate::hilbert::{norm, HilbertSpace, Vector, DEFAULT_RANK_TOL};
use crate::linalg::{self, max_abs, CMat, CVec, C64};
use crate::subspace::{inclination, intersect, ominus, InclinationReport, Subspace, DEFAULT_INTERSECT_TOL};

use super::trig::{apply_div, apply_grad, apply_rot, Curl, Kind, Mode, TrigField, TrigTensor};

/// Largest mode cutoff accepted in two dimensions.
pub const MAX_MODES_2D: usize = 6;
/// Largest mode cutoff accepted in three dimensions.
pub const MAX_MODES_3D: usize = 3;

/// Relative tolerance for membership of a field in `𝓛` or `L̂`.
pub const MEMBERSHIP_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CavityConfig {
    pub d: usize,
    pub n_modes: usize,
    #[serde(default = "default_korn_samples")]
    pub korn_samples: usize,
}

fn default_korn_samples() -> usize {
    50
}

impl CavityConfig {
    pub fn new(d: usize, n_modes: usize) -> Result<Self> {
        let cfg = Self { d, n_modes, korn_samples: default_korn_samples() };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.d == 2 || self.d == 3) {
            return Err(Error::InvalidConfig(format!("d must be 2 or 3, got {}", self.d)));
        }
        if self.n_modes == 0 {
            return Err(Error::InvalidConfig("n_modes must be at least 1".into()));
        }
        let cap = if self.d == 2 { MAX_MODES_2D } else { MAX_MODES_3D };
        if self.n_modes > cap {
            return Err(Error::ConfigTooLarge(format!(
                "n_modes = {} exceeds the cap {cap} for d = {}",
                self.n_modes, self.d
            )));
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// `d (2N+1) N^{d−1}`.
    pub fn ambient_dim(&self) -> usize {
        self.d * (2 * self.n_modes + 1) * self.n_modes.pow(self.d as u32 - 1)
    }
}

/// One ambient basis field: a single mode product in component `component`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BasisField {
    pub component: usize,
    pub modes: Vec<Mode>,
}

impl BasisField {
    pub fn is_all_sin(&self) -> bool {
        self.modes.iter().all(|m| m.kind == Kind::Sin)
    }

    pub fn to_field(&self) -> TrigField {
        let d = self.modes.len();
        let mut f = TrigField::zero(d);
        f.component_mut(self.component).add_term(self.modes.clone(), 1.0);
        f
    }
}

/// All tuples in `1..=n` of length `d`, lexicographic.
fn sine_indices(d: usize, n: usize) -> Vec<Vec<u32>> {
    let mut out = vec![Vec::new()];
    for _ in 0..d {
        out = out
            .into_iter()
            .flat_map(|p| {
                (1..=n as u32).map(move |k| {
                    let mut q = p.clone();
                    q.push(k);
                    q
                })
            })
            .collect();
    }
    out
}

fn ambient_basis(d: usize, n: usize) -> Vec<BasisField> {
    let own: Vec<Mode> = (1..=n as u32).map(Mode::sin).chain((0..=n as u32).map(Mode::cos)).collect();
    let mut out = Vec::new();
    for component in 0..d {
        for others in sine_indices(d - 1, n) {
            for &m in &own {
                let mut modes = Vec::with_capacity(d);
                let mut it = others.iter();
                for axis in 0..d {
                    if axis == component {
                        modes.push(m);
                    } else {
                        modes.push(Mode::sin(*it.next().expect("index per off axis")));
                    }
                }
                out.push(BasisField { component, modes });
            }
        }
    }
    out
}

#[derive(Debug, Clone)]
pub struct CavityModel {
    pub config: CavityConfig,
    pub ambient: Arc<HilbertSpace>,
    pub basis: Vec<BasisField>,
    index: HashMap<BasisField, usize>,
    pub l_sub: Subspace,
    pub m_sub: Subspace,
    pub l_hat: Subspace,
    pub q_dim: usize,
    pub c: f64,
    /// Inclination of `(L̂, 𝓜)`, used for the vortex/potential split.
    pub split_report: InclinationReport,
    pub mass_gram: CMat,
    pub rot_gram: CMat,
    pub div_gram: CMat,
    pub grad_gram: CMat,
}

struct Derived {
    div: TrigTensor,
    rot: Curl,
    grad: TrigField,
}

/// Fill a symmetric `n × n` matrix from its upper triangle, optionally on a
/// dedicated rayon pool.
fn assemble<F>(n: usize, threads: usize, entry: F) -> Result<CMat>
where
    F: Fn(usize, usize) -> Result<f64> + Sync,
{
    let row = |a: usize| -> Result<Vec<f64>> { (a..n).map(|b| entry(a, b)).collect() };
    let rows: Vec<Vec<f64>> = if threads > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| Error::Numerical(e.to_string()))?;
        pool.install(|| (0..n).into_par_iter().map(row).collect::<Result<_>>())?
    } else {
        (0..n).map(row).collect::<Result<_>>()?
    };
    let mut m = CMat::zeros(n, n);
    for (a, r) in rows.into_iter().enumerate() {
        for (off, v) in r.into_iter().enumerate() {
            let b = a + off;
            m[(a, b)] = C64::new(v, 0.0);
            m[(b, a)] = C64::new(v, 0.0);
        }
    }
    Ok(m)
}

pub fn build_cavity(config: &CavityConfig) -> Result<CavityModel> {
    build_cavity_with_threads(config, 1)
}

/// As [`build_cavity`], spreading Gram assembly over `threads` workers. The
/// result does not depend on the thread count.
pub fn build_cavity_with_threads(config: &CavityConfig, threads: usize) -> Result<CavityModel> {
    config.validate()?;
    let (d, n) = (config.d, config.n_modes);
    let basis = ambient_basis(d, n);
    debug_assert_eq!(basis.len(), config.ambient_dim());
    let fields: Vec<TrigField> = basis.iter().map(BasisField::to_field).collect();
    let derived: Vec<Derived> = fields
        .iter()
        .zip(&basis)
        .map(|(f, b)| {
            Ok(Derived {
                div: apply_div(f)?,
                rot: apply_rot(f)?,
                grad: apply_grad(f.component(b.component)),
            })
        })
        .collect::<Result<_>>()?;

    let dim = basis.len();
    let mass = assemble(dim, threads, |a, b| fields[a].l2_inner(&fields[b]))?;
    let rot = assemble(dim, threads, |a, b| derived[a].rot.l2_inner(&derived[b].rot))?;
    let div = assemble(dim, threads, |a, b| derived[a].div.l2_inner(&derived[b].div))?;
    let grad = assemble(dim, threads, |a, b| {
        if basis[a].component != basis[b].component {
            return Ok(0.0);
        }
        derived[a].grad.l2_inner(&derived[b].grad)
    })?;
    let energy = assemble(dim, threads, |a, b| {
        let (u, v) = (&derived[a], &derived[b]);
        Ok(u.rot.l2_inner(&v.rot)? + u.div.l2_inner(&v.div)? + fields[a].l2_inner(&fields[b])?)
    })?;

    let ambient = HilbertSpace::new(energy)?
        .with_label(format!("cavity d={d} N={n}"))
        .shared();
    let index: HashMap<BasisField, usize> = basis.iter().cloned().enumerate().map(|(i, b)| (b, i)).collect();

    let l_cols: Vec<usize> = (0..dim).filter(|&i| basis[i].is_all_sin()).collect();
    let mut l_gen = CMat::zeros(dim, l_cols.len());
    for (j, &i) in l_cols.iter().enumerate() {
        l_gen[(i, j)] = C64::new(1.0, 0.0);
    }
    let l_sub = Subspace::span(&ambient, &l_gen, DEFAULT_RANK_TOL)?;

    let scalars = sine_indices(d, n);
    let mut m_gen = CMat::zeros(dim, scalars.len());
    for (j, ks) in scalars.iter().enumerate() {
        let phi = TrigTensor::monomial(ks.iter().map(|&k| Mode::sin(k)).collect(), 1.0);
        let g = apply_grad(&phi);
        let coords = coordinates_in(&index, dim, &g)?;
        m_gen.set_column(j, &coords);
    }
    let m_sub = Subspace::span(&ambient, &m_gen, DEFAULT_RANK_TOL)?;

    let report = inclination(&l_sub, &m_sub, DEFAULT_INTERSECT_TOL)?;
    let q = intersect(&l_sub, &m_sub, DEFAULT_INTERSECT_TOL)?;
    let l_hat = ominus(&l_sub, &q, DEFAULT_INTERSECT_TOL)?;
    let split_report = if q.is_zero() { report.clone() } else { inclination(&l_hat, &m_sub, DEFAULT_INTERSECT_TOL)? };

    Ok(CavityModel {
        config: config.clone(),
        ambient,
        basis,
        index,
        l_sub,
        m_sub,
        l_hat,
        q_dim: q.dim(),
        c: report.c,
        split_report,
        mass_gram: mass,
        rot_gram: rot,
        div_gram: div,
        grad_gram: grad,
    })
}

fn coordinates_in(index: &HashMap<BasisField, usize>, dim: usize, u: &TrigField) -> Result<CVec> {
    let mut out = CVec::zeros(dim);
    for (component, t) in u.components().iter().enumerate() {
        for (modes, coeff) in t.terms() {
            let key = BasisField { component, modes: modes.clone() };
            let i = index
                .get(&key)
                .ok_or_else(|| Error::NotInAmbient(format!("component {component}, modes {modes:?}")))?;
            out[*i] += C64::new(coeff, 0.0);
        }
    }
    Ok(out)
}

/// Real symmetric quadratic form `x* A x` (real part).
fn quad(a: &CMat, x: &CVec) -> f64 {
    x.dotc(&(a * x)).re
}

impl CavityModel {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn d(&self) -> usize {
        self.config.d
    }

    pub fn index_of(&self, b: &BasisField) -> Option<usize> {
        self.index.get(b).copied()
    }

    /// Ambient coordinates of a field; fails on any term outside the basis.
    pub fn coordinates_of(&self, u: &TrigField) -> Result<CVec> {
        if u.dim() != self.d() {
            return Err(Error::DimensionMismatch { expected: self.d(), found: u.dim() });
        }
        coordinates_in(&self.index, self.dim(), u)
    }

    pub fn vector_of(&self, u: &TrigField) -> Result<Vector> {
        Vector::new(Arc::clone(&self.ambient), self.coordinates_of(u)?)
    }

    /// Field with the real parts of `coords` as coefficients.
    pub fn field_of(&self, coords: &CVec) -> TrigField {
        let mut f = TrigField::zero(self.d());
        for (b, z) in self.basis.iter().zip(coords.iter()) {
            f.component_mut(b.component).add_term(b.modes.clone(), z.re);
        }
        f
    }

    /// `max |G − (rot + div + mass)|`.
    pub fn energy_split_defect(&self) -> f64 {
        max_abs(&(self.ambient.gram() - (&self.rot_gram + &self.div_gram + &self.mass_gram)))
    }

    /// Random field in `𝓛` with coefficients uniform in `[−1, 1]`.
    pub fn random_l_field<R: Rng>(&self, rng: &mut R) -> TrigField {
        let mut f = TrigField::zero(self.d());
        for b in self.basis.iter().filter(|b| b.is_all_sin()) {
            f.component_mut(b.component).add_term(b.modes.clone(), rng.random_range(-1.0..1.0));
        }
        f
    }

    /// Random element of `L̂` as an ambient vector.
    pub fn random_lhat_vector<R: Rng>(&self, rng: &mut R) -> Vector {
        let k = self.l_hat.dim();
        let coords = CVec::from_fn(k, |_, _| C64::new(rng.random_range(-1.0..1.0), 0.0));
        self.l_hat.combine(&coords).expect("coordinate count matches L-hat")
    }

    /// Random element of `L̂` as a field. `L̂` has a real basis whenever
    /// `Q = {0}` (it is then `𝓛`), so the real-part projection is exact.
    pub fn random_lhat_field<R: Rng>(&self, rng: &mut R) -> Result<TrigField> {
        if self.q_dim == 0 {
            return Ok(self.random_l_field(rng));
        }
        Ok(self.field_of(self.random_lhat_vector(rng).coeffs()))
    }

    fn require_lhat(&self, x: &Vector) -> Result<()> {
        let dist = self.l_hat.distance_to(x)?;
        if dist > MEMBERSHIP_TOL * norm(x).max(f64::MIN_POSITIVE) {
            return Err(Error::NotInLHat(dist));
        }
        Ok(())
    }
}

/// Vortex/potential split of a field.
#[derive(Debug, Clone)]
pub struct FieldSplit {
    pub potential: TrigField,
    pub vortex: TrigField,
    pub residual: f64,
    pub c: f64,
    pub bounds: BoundsReport,
}

/// Split `u = potential + vortex` with `potential ∈ 𝓜`, `vortex ∈ L̂`.
///
/// `L̂ + 𝓜` is a proper subspace of the ambient span, so fields outside it
/// fail with `NotInSumSpace`.
pub fn decompose_field(model: &CavityModel, u: &TrigField, tol: f64) -> Result<FieldSplit> {
    let x = model.vector_of(u)?;
    let dec = decompose_with_report(&model.split_report, &x, DEFAULT_A1, tol)?;
    let bounds = verify_bounds(&dec);
    Ok(FieldSplit {
        potential: model.field_of(dec.xm.coeffs()),
        vortex: model.field_of(dec.xl.coeffs()),
        residual: dec.residual,
        c: dec.c,
        bounds,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IdentityCheck {
    pub q_grad: f64,
    pub q_rot: f64,
    pub q_div: f64,
    /// `q_grad − q_rot − q_div`.
    pub slack: f64,
    pub ok: bool,
}

/// `‖∇u‖² = ‖rot u‖² + ‖div u‖²` for `u ∈ 𝓛`, evaluated with the assembled
/// form matrices.
pub fn identity_check(model: &CavityModel, u: &TrigField) -> Result<IdentityCheck> {
    let x = model.coordinates_of(u)?;
    let scale = x.iter().fold(0.0_f64, |a, z| a.max(z.norm()));
    let off: f64 = model
        .basis
        .iter()
        .zip(x.iter())
        .filter(|(b, _)| !b.is_all_sin())
        .map(|(_, z)| z.norm_sqr())
        .sum::<f64>()
        .sqrt();
    if off > 1e-12 * scale {
        return Err(Error::NotInL(off));
    }
    let q_grad = quad(&model.grad_gram, &x);
    let q_rot = quad(&model.rot_gram, &x);
    let q_div = quad(&model.div_gram, &x);
    let slack = q_grad - q_rot - q_div;
    Ok(IdentityCheck { q_grad, q_rot, q_div, slack, ok: slack.abs() <= 1e-10 * q_grad })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ContractionCheck {
    pub norm_u: f64,
    pub norm_proj: f64,
    pub c: f64,
    /// `c²‖u‖² − ‖P_𝓜 u‖²`.
    pub slack_sq: f64,
    /// `c‖u‖ − ‖P_𝓜 u‖`.
    pub slack: f64,
    pub ok: bool,
}

/// `‖P_𝓜 u‖_H ≤ c ‖u‖_H` for `u ∈ L̂`.
pub fn contraction_check(model: &CavityModel, u: &TrigField) -> Result<ContractionCheck> {
    contraction_check_vector(model, &model.vector_of(u)?)
}

pub fn contraction_check_vector(model: &CavityModel, x: &Vector) -> Result<ContractionCheck> {
    model.require_lhat(x)?;
    let norm_u = norm(x);
    let norm_proj = norm(&model.m_sub.project(x)?);
    let c = model.c;
    let slack_sq = c * c * norm_u * norm_u - norm_proj * norm_proj;
    let slack = c * norm_u - norm_proj;
    let ok = slack_sq >= -1e-10 * norm_u * norm_u && slack >= -1e-10 * norm_u;
    Ok(ContractionCheck { norm_u, norm_proj, c, slack_sq, slack, ok })
}

#[derive(Debug, Clone, Serialize)]
pub struct KornReport {
    /// Largest generalized eigenvalue of `(G, rot + mass)` on `L̂`.
    pub kappa: f64,
    /// `1/(1−c²)`.
    pub bound: f64,
    pub margin: f64,
    /// Largest quotient seen over the random vortex samples.
    pub sample_max: f64,
    pub samples: usize,
    pub argmax: TrigField,
}

fn reduced_forms(model: &CavityModel) -> Result<(CMat, CMat)> {
    if model.l_hat.is_zero() {
        return Err(Error::ZeroSubspace);
    }
    let b = model.l_hat.basis();
    let g = b.adjoint() * model.ambient.gram() * b;
    let rm = b.adjoint() * (&model.rot_gram + &model.mass_gram) * b;
    let herm = |m: CMat| (&m + m.adjoint()) * C64::new(0.5, 0.0);
    Ok((herm(g), herm(rm)))
}

/// Measure the Korn-type constant on the vortex fields: the supremum of
/// `‖u‖²_H / (‖rot u‖² + ‖u‖²)` over `L̂`, against `1/(1−c²)`.
pub fn korn_measure(model: &CavityModel, seed: u64) -> Result<KornReport> {
    let (g, rm) = reduced_forms(model)?;
    let eig = linalg::generalized_eigen(&g, &rm)?;
    let top = eig.values.len() - 1;
    let kappa = eig.values[top];
    let y = eig.vectors.column(top).into_owned();
    let mut coords = model.l_hat.basis() * y;
    if let Some((_, &z)) = coords.iter().enumerate().max_by(|a, b| a.1.norm().total_cmp(&b.1.norm())) {
        if z.norm() > 0.0 {
            coords *= z.conj() / z.norm();
        }
    }
    let argmax = model.field_of(&coords);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let samples = model.config.korn_samples;
    let mut sample_max: f64 = f64::NEG_INFINITY;
    for _ in 0..samples {
        let x = CVec::from_fn(g.nrows(), |_, _| C64::new(rng.random_range(-1.0..1.0), 0.0));
        sample_max = sample_max.max(quad(&g, &x) / quad(&rm, &x));
    }
    let bound = 1.0 / (1.0 - model.c * model.c);
    Ok(KornReport { kappa, bound, margin: bound - kappa, sample_max, samples, argmax })
}

/// Independent maximization of the Korn quotient: block Rayleigh–Ritz
/// ascent over `span{x, r, p}` (current iterate, residual, previous step)
/// from `restarts` random starts. The small projected problems use the
/// library Hermitian eigensolver rather than the Jacobi path.
pub fn korn_rayleigh_max(model: &CavityModel, restarts: usize, seed: u64) -> Result<f64> {
    let (a, b) = reduced_forms(model)?;
    let k = a.nrows();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = f64::NEG_INFINITY;
    for _ in 0..restarts.max(1) {
        let mut x = CVec::from_fn(k, |_, _| C64::new(rng.random_range(-1.0..1.0), 0.0));
        x /= C64::new(x.norm(), 0.0);
        let mut prev: Option<CVec> = None;
        let mut rho = quad(&a, &x) / quad(&b, &x);
        let mut stalled = 0;
        for _ in 0..2000 {
            let ax = &a * &x;
            let bx = &b * &x;
            let next = x.dotc(&ax).re / x.dotc(&bx).re;
            stalled = if next - rho <= 1e-15 * next.abs() { stalled + 1 } else { 0 };
            rho = next;
            // The quotient error is quadratic in the residual.
            let r = &ax - &bx * C64::new(rho, 0.0);
            if r.norm() <= 1e-10 * (ax.norm() + rho.abs() * bx.norm()) || stalled >= 5 {
                break;
            }
            let mut cols = vec![x.clone(), r];
            if let Some(p) = &prev {
                if p.norm() > 0.0 {
                    cols.push(p.clone());
                }
            }
            let s = CMat::from_columns(&cols);
            let q = s.qr().q();
            let sa = q.adjoint() * &a * &q;
            let sb = q.adjoint() * &b * &q;
            let chol = Cholesky::new((&sb + sb.adjoint()) * C64::new(0.5, 0.0))
                .ok_or_else(|| Error::Numerical("Ritz block lost definiteness".into()))?;
            let l = chol.l();
            let t = l
                .solve_lower_triangular(&sa)
                .ok_or_else(|| Error::Numerical("singular Ritz factor".into()))?;
            let c = l
                .solve_lower_triangular(&t.adjoint())
                .ok_or_else(|| Error::Numerical("singular Ritz factor".into()))?
                .adjoint();
            let eig = SymmetricEigen::new((&c + c.adjoint()) * C64::new(0.5, 0.0));
            let (imax, _) = eig
                .eigenvalues
                .iter()
                .enumerate()
                .fold((0, f64::NEG_INFINITY), |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc });
            let z = eig.eigenvectors.column(imax).into_owned();
            let w = l
                .adjoint()
                .solve_upper_triangular(&z)
                .ok_or_else(|| Error::Numerical("singular Ritz factor".into()))?;
            let mut xn = &q * w;
            xn /= C64::new(xn.norm(), 0.0);
            let overlap = x.dotc(&xn);
            prev = Some(&xn - &x * overlap);
            x = xn;
        }
        best = best.max(rho);
    }
    Ok(best)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DivProbe {
    /// `‖div u′‖_{L²}` with `u′ = u − P_𝓜 u`.
    pub div_norm: f64,
    /// `max_ψ |∫ div u′ ψ| / (‖u‖_H ‖ψ‖)` over all-sine products `ψ`.
    pub orthogonality_residual: f64,
    pub ok: bool,
}

/// Measure how far `u − P_𝓜 u` is from divergence free, and verify that its
/// divergence is L²-orthogonal to every all-sine scalar mode.
pub fn div_orthogonality_probe(model: &CavityModel, u: &TrigField) -> Result<DivProbe> {
    let x = model.vector_of(u)?;
    model.require_lhat(&x)?;
    let u_prime = x.sub(&model.m_sub.project(&x)?)?;
    let field = model.field_of(u_prime.coeffs());
    let div = apply_div(&field)?;
    let div_norm = div.l2_inner(&div)?.max(0.0).sqrt();
    let unorm = norm(&x);
    let mut worst: f64 = 0.0;
    for ks in sine_indices(model.d(), model.config.n_modes) {
        let psi = TrigTensor::monomial(ks.iter().map(|&k| Mode::sin(k)).collect(), 1.0);
        let psi_norm = psi.l2_inner(&psi)?.sqrt();
        let r = div.l2_inner(&psi)?.abs() / psi_norm;
        worst = worst.max(r);
    }
    let orthogonality_residual = if unorm > 0.0 { worst / unorm } else { worst };
    Ok(DivProbe { div_norm, orthogonality_residual, ok: orthogonality_residual <= 1e-10 })
}

/// Summary of an assembled model.
#[derive(Debug, Clone, Serialize)]
pub struct CavitySummary {
    pub d: usize,
    pub n_modes: usize,
    pub ambient_dim: usize,
    pub dim_l: usize,
    pub dim_m: usize,
    pub dim_q: usize,
    pub c: f64,
    pub energy_split_defect: f64,
    pub gram_digest: String,
}

impl CavityModel {
    pub fn summary(&self) -> CavitySummary {
        CavitySummary {
            d: self.config.d,
            n_modes: self.config.n_modes,
            ambient_dim: self.dim(),
            dim_l: self.l_sub.dim(),
            dim_m: self.m_sub.dim(),
            dim_q: self.q_dim,
            c: self.c,
            energy_split_defect: self.energy_split_defect(),
            gram_digest: self.ambient.gram_digest(),
        }
    }
}
