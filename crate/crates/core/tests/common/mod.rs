//! Seeded generators for random spaces, subspace pairs and vectors.

#![allow(dead_code)]

use std::sync::Arc;

use obliq::hilbert::{HilbertSpace, DEFAULT_RANK_TOL};
use obliq::subspace::{inclination, InclinationReport, Subspace, DEFAULT_INTERSECT_TOL};
use obliq::{CMat, CVec, Vector, C64};
use rand::Rng;

pub fn complex_matrix<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> CMat {
    CMat::from_fn(rows, cols, |_, _| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
}

pub fn complex_vector<R: Rng>(rng: &mut R, n: usize) -> CVec {
    CVec::from_fn(n, |_, _| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
}

/// `G = A*A/n + δI` with `δ ∈ [0.05, 1]`: Hermitian, well conditioned.
pub fn random_space<R: Rng>(rng: &mut R, n: usize) -> Arc<HilbertSpace> {
    let a = complex_matrix(rng, n, n);
    let delta = rng.random_range(0.05..1.0);
    let g = a.adjoint() * &a / C64::new(n as f64, 0.0) + CMat::identity(n, n) * C64::new(delta, 0.0);
    let g = (&g + g.adjoint()) * C64::new(0.5, 0.0);
    Arc::new(HilbertSpace::new(g).expect("random Gram is positive definite"))
}

pub struct PairInstance {
    pub space: Arc<HilbertSpace>,
    pub l: Subspace,
    pub m: Subspace,
    pub report: InclinationReport,
    /// Generators of `L` and `M` side by side, for building members of `L + M`.
    pub generators: CMat,
}

/// Subspaces sharing a random `q`-dimensional part, with `kl` and `km`
/// further random directions. Retries until `dim Q = q`, no containment and
/// `c ≤ c_max`.
pub fn random_pair<R: Rng>(rng: &mut R, n: usize, q: usize, kl: usize, km: usize, c_max: f64) -> PairInstance {
    assert!(q + kl + km <= n && kl >= 1 && km >= 1);
    loop {
        let space = random_space(rng, n);
        let shared = complex_matrix(rng, n, q);
        let gl = complex_matrix(rng, n, kl);
        let gm = complex_matrix(rng, n, km);
        let lgen = concat(&[&shared, &gl]);
        let mgen = concat(&[&shared, &gm]);
        let l = Subspace::span(&space, &lgen, DEFAULT_RANK_TOL).unwrap();
        let m = Subspace::span(&space, &mgen, DEFAULT_RANK_TOL).unwrap();
        let report = inclination(&l, &m, DEFAULT_INTERSECT_TOL).unwrap();
        if report.q_dim == q && !report.is_degenerate() && report.c <= c_max {
            let generators = concat(&[&shared, &gl, &gm]);
            return PairInstance { space, l, m, report, generators };
        }
    }
}

pub fn concat(blocks: &[&CMat]) -> CMat {
    let rows = blocks[0].nrows();
    let cols: usize = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = CMat::zeros(rows, cols);
    let mut at = 0;
    for b in blocks {
        out.columns_mut(at, b.ncols()).copy_from(b);
        at += b.ncols();
    }
    out
}

/// Pair with prescribed principal cosines, built in Cholesky coordinates of a
/// random metric. With a random unitary `U = [u_0 … u_{n−1}]`:
/// `Q = span u_0..u_q`, `L ⊖ Q = span u_q..u_{q+p}`, and `M ⊖ Q` has
/// directions `cos θ_i u_{q+i} + sin θ_i u_{q+p+i}` for `i < min(p, r)`
/// and `u_{q+p+i}` beyond. The inclination is therefore `max cos θ_i`.
pub fn constructed_pair<R: Rng>(rng: &mut R, n: usize, q: usize, p: usize, r: usize, cosines: &[f64]) -> PairInstance {
    assert!(q + p + r <= n && p >= 1 && r >= 1 && cosines.len() == p.min(r));
    let space = random_space(rng, n);
    let u = complex_matrix(rng, n, n).qr().q();
    let mut ly = CMat::zeros(n, q + p);
    let mut my = CMat::zeros(n, q + r);
    for j in 0..q {
        ly.set_column(j, &u.column(j));
        my.set_column(j, &u.column(j));
    }
    for i in 0..p {
        ly.set_column(q + i, &u.column(q + i));
    }
    for i in 0..r {
        let tail = u.column(q + p + i).into_owned();
        let col = match cosines.get(i) {
            Some(&c) => u.column(q + i) * C64::new(c, 0.0) + tail * C64::new((1.0 - c * c).sqrt(), 0.0),
            None => tail,
        };
        my.set_column(q + i, &col);
    }
    // Scramble each generator set so the spans, not the columns, carry the structure.
    let lgen = space.from_chol(&ly).unwrap() * complex_matrix(rng, q + p, q + p);
    let mgen = space.from_chol(&my).unwrap() * complex_matrix(rng, q + r, q + r);
    let l = Subspace::span(&space, &lgen, DEFAULT_RANK_TOL).unwrap();
    let m = Subspace::span(&space, &mgen, DEFAULT_RANK_TOL).unwrap();
    let report = inclination(&l, &m, DEFAULT_INTERSECT_TOL).unwrap();
    let generators = concat(&[&lgen, &mgen]);
    PairInstance { space, l, m, report, generators }
}

/// Random dimensions `(n, q, p, r)` with `n ≤ n_max`, `q ≤ q_max`, and the
/// cosines for [`constructed_pair`] drawn in `[0, c_max]`; when `dense` the
/// pair fills the space.
pub fn random_shape<R: Rng>(rng: &mut R, n_max: usize, q_max: usize, c_max: f64, dense: bool) -> (usize, usize, usize, usize, Vec<f64>) {
    let q = rng.random_range(0..=q_max);
    let n = rng.random_range((q + 2).max(2)..=n_max);
    let room = n - q;
    let p = rng.random_range(1..room);
    let r = if dense { room - p } else { rng.random_range(1..=room - p) };
    let cosines = (0..p.min(r)).map(|_| rng.random_range(0.0..=c_max)).collect();
    (n, q, p, r, cosines)
}

/// Random element of `L + M` (random combination of the generators).
pub fn vector_in_sum<R: Rng>(rng: &mut R, inst: &PairInstance) -> Vector {
    let coef = complex_vector(rng, inst.generators.ncols());
    Vector::new(Arc::clone(&inst.space), &inst.generators * coef).unwrap()
}

pub fn random_vector<R: Rng>(rng: &mut R, space: &Arc<HilbertSpace>) -> Vector {
    Vector::new(Arc::clone(space), complex_vector(rng, space.dim())).unwrap()
}

/// Random element of a subspace.
pub fn vector_in<R: Rng>(rng: &mut R, s: &Subspace) -> Vector {
    s.combine(&complex_vector(rng, s.dim())).unwrap()
}
