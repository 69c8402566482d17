//! Subspaces of a [`HilbertSpace`] and their relative geometry: principal
//! angles, intersection, relative complement, sum, orthogonal complement,
//! projection and the inclination `c(L, M)`.
//!
//! Principal angles come from the SVD of the metric cross-Gram `B_L* G B_M`
//! of orthonormal bases. Cosines within `tol` of one are treated as shared
//! directions and collected into `Q = L ∩ M`.

use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::hilbert::{HilbertSpace, Vector, DEFAULT_RANK_TOL};
use crate::linalg::{self, CMat, CVec, C64};

/// Default threshold on `1 − cos θ` below which a principal direction is
/// counted as part of the intersection.
pub const DEFAULT_INTERSECT_TOL: f64 = 1e-8;

/// Inclinations closer than this to one are flagged near-degenerate.
pub const NEAR_DEGENERATE_GAP: f64 = 1e-12;

/// Tolerance on `max |B* G B − I|` accepted for a caller-supplied basis.
pub const ORTHONORMAL_TOL: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct Subspace {
    space: Arc<HilbertSpace>,
    basis: CMat,
}

impl Subspace {
    /// Orthonormalized span of the generator columns.
    pub fn span(space: &Arc<HilbertSpace>, generators: &CMat, rank_tol: f64) -> Result<Self> {
        let basis = space.gram_orthonormalize(generators, rank_tol)?;
        Ok(Self { space: Arc::clone(space), basis })
    }

    /// Wrap a basis that is already metric-orthonormal.
    pub fn from_orthonormal(space: &Arc<HilbertSpace>, basis: CMat) -> Result<Self> {
        if basis.nrows() != space.dim() {
            return Err(Error::DimensionMismatch { expected: space.dim(), found: basis.nrows() });
        }
        let s = Self { space: Arc::clone(space), basis };
        let defect = s.orthonormality_defect();
        if defect > ORTHONORMAL_TOL {
            return Err(Error::Numerical(format!(
                "basis is not orthonormal in the metric (defect {defect:e})"
            )));
        }
        Ok(s)
    }

    pub(crate) fn from_orthonormal_unchecked(space: &Arc<HilbertSpace>, basis: CMat) -> Self {
        Self { space: Arc::clone(space), basis }
    }

    pub fn zero(space: &Arc<HilbertSpace>) -> Self {
        Self { space: Arc::clone(space), basis: CMat::zeros(space.dim(), 0) }
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn is_zero(&self) -> bool {
        self.basis.ncols() == 0
    }

    pub fn basis(&self) -> &CMat {
        &self.basis
    }

    pub fn space(&self) -> &Arc<HilbertSpace> {
        &self.space
    }

    /// `max |B* G B − I|`.
    pub fn orthonormality_defect(&self) -> f64 {
        let k = self.dim();
        let g = self.space.cross_gram(&self.basis, &self.basis);
        linalg::max_abs(&(g - CMat::identity(k, k)))
    }

    /// Basis columns as vectors.
    pub fn basis_vectors(&self) -> Vec<Vector> {
        (0..self.dim())
            .map(|j| Vector::new(Arc::clone(&self.space), self.basis.column(j).into_owned()).expect("basis column length"))
            .collect()
    }

    /// Coordinates `B* G x` of the projection of `x` in this basis.
    pub fn coordinates(&self, x: &Vector) -> Result<CVec> {
        HilbertSpace::check_same(&self.space, x.space())?;
        Ok(self.basis.adjoint() * (self.space.gram() * x.coeffs()))
    }

    /// Vector with basis coordinates `coords`.
    pub fn combine(&self, coords: &CVec) -> Result<Vector> {
        if coords.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: coords.len() });
        }
        Vector::new(Arc::clone(&self.space), &self.basis * coords)
    }

    /// Orthogonal projection `P_S x = B (B* G x)`.
    pub fn project(&self, x: &Vector) -> Result<Vector> {
        let c = self.coordinates(x)?;
        self.combine(&c)
    }

    /// `‖x − P_S x‖`.
    pub fn distance_to(&self, x: &Vector) -> Result<f64> {
        let p = self.project(x)?;
        Ok(crate::hilbert::norm(&x.sub(&p)?))
    }

    /// Basis in Cholesky coordinates (Euclidean-orthonormal columns).
    pub(crate) fn chol_basis(&self) -> CMat {
        self.space.to_chol(&self.basis)
    }
}

/// Principal vectors of a subspace pair, ordered by descending cosine.
#[derive(Debug, Clone)]
pub struct PrincipalPairs {
    pub cosines: Vec<f64>,
    /// Columns are G-orthonormal principal vectors in `L`.
    pub l_vectors: CMat,
    /// Columns are G-orthonormal principal vectors in `M`.
    pub m_vectors: CMat,
}

/// Principal cosines and vectors of `(L, M)`, with `inner(l_i, m_i) = cos_i`
/// real and nonnegative.
pub fn principal_pairs(l: &Subspace, m: &Subspace) -> Result<PrincipalPairs> {
    HilbertSpace::check_same(&l.space, &m.space)?;
    let cross = l.space.cross_gram(&l.basis, &m.basis);
    let dec = linalg::svd(&cross);
    Ok(PrincipalPairs {
        cosines: dec.s.iter().map(|s| s.clamp(0.0, 1.0)).collect(),
        l_vectors: &l.basis * &dec.u,
        m_vectors: &m.basis * &dec.v,
    })
}

/// Principal angles (radians, ascending).
pub fn principal_angles(l: &Subspace, m: &Subspace) -> Result<Vec<f64>> {
    Ok(principal_pairs(l, m)?.cosines.iter().map(|c| c.acos()).collect())
}

/// `L ∩ M`: span of the `L`-side principal vectors whose cosine exceeds
/// `1 − tol`.
pub fn intersect(l: &Subspace, m: &Subspace, tol: f64) -> Result<Subspace> {
    let pairs = principal_pairs(l, m)?;
    let q = pairs.cosines.iter().take_while(|&&c| c > 1.0 - tol).count();
    Ok(Subspace::from_orthonormal_unchecked(&l.space, pairs.l_vectors.columns(0, q).into_owned()))
}

/// `L ⊖ Q`: the part of `L` orthogonal to `Q`. Requires `Q ⊆ L` within `tol`
/// on every principal cosine.
pub fn ominus(l: &Subspace, q: &Subspace, tol: f64) -> Result<Subspace> {
    HilbertSpace::check_same(&l.space, &q.space)?;
    if q.is_zero() {
        return Ok(l.clone());
    }
    let cross = l.space.cross_gram(&l.basis, &q.basis);
    let dec = linalg::svd(&cross);
    let min_cosine = if q.dim() > l.dim() {
        0.0
    } else {
        dec.s.last().copied().unwrap_or(0.0)
    };
    if q.dim() > l.dim() || min_cosine < 1.0 - tol {
        return Err(Error::NotASubspaceOf { min_cosine });
    }
    let w = linalg::complement(&dec.u);
    Ok(Subspace::from_orthonormal_unchecked(&l.space, &l.basis * w))
}

/// `L + M` with the default rank threshold.
pub fn sum(l: &Subspace, m: &Subspace) -> Result<Subspace> {
    sum_with_tol(l, m, DEFAULT_RANK_TOL)
}

pub fn sum_with_tol(l: &Subspace, m: &Subspace, rank_tol: f64) -> Result<Subspace> {
    HilbertSpace::check_same(&l.space, &m.space)?;
    let mut gens = CMat::zeros(l.space.dim(), l.dim() + m.dim());
    gens.columns_mut(0, l.dim()).copy_from(&l.basis);
    gens.columns_mut(l.dim(), m.dim()).copy_from(&m.basis);
    Subspace::span(&l.space, &gens, rank_tol)
}

/// Metric-orthogonal complement of `S` in the ambient space.
pub fn perp(s: &Subspace) -> Result<Subspace> {
    let w = linalg::complement(&s.chol_basis());
    let basis = s.space.from_chol(&w)?;
    Ok(Subspace::from_orthonormal_unchecked(&s.space, basis))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Containment {
    None,
    LInM,
    MInL,
}

/// Inclination of a subspace pair together with the objects it was computed
/// from.
#[derive(Debug, Clone)]
pub struct InclinationReport {
    pub c: f64,
    pub q_dim: usize,
    /// Principal angles between `L ⊖ Q` and `M ⊖ Q`, ascending.
    pub angles: Vec<f64>,
    pub q: Subspace,
    pub l_reduced: Subspace,
    pub m_reduced: Subspace,
    pub containment: Containment,
    /// Set when `c` lies within [`NEAR_DEGENERATE_GAP`] of one without a
    /// detected containment.
    pub near_degenerate: bool,
    /// Top principal pair `(u*, v*)`, unit norm, `inner(u*, v*) = c`.
    pub top_pair: Option<(Vector, Vector)>,
    pub tol: f64,
}

impl InclinationReport {
    /// `1/√(1−c²)`; infinite when the pair is degenerate.
    pub fn amplification(&self) -> f64 {
        if self.containment != Containment::None || self.c >= 1.0 {
            f64::INFINITY
        } else {
            1.0 / (1.0 - self.c * self.c).sqrt()
        }
    }

    pub fn is_degenerate(&self) -> bool {
        self.containment != Containment::None || self.near_degenerate || self.c >= 1.0 - NEAR_DEGENERATE_GAP
    }
}

/// `c(L, M)`: the largest principal cosine between `L ⊖ Q` and `M ⊖ Q`.
///
/// When either reduced subspace is trivial the pair is flagged as a
/// containment and `c = 1`.
pub fn inclination(l: &Subspace, m: &Subspace, tol: f64) -> Result<InclinationReport> {
    HilbertSpace::check_same(&l.space, &m.space)?;
    if l.is_zero() || m.is_zero() {
        return Err(Error::ZeroSubspace);
    }
    let q = intersect(l, m, tol)?;
    let l_reduced = ominus(l, &q, tol)?;
    let m_reduced = ominus(m, &q, tol)?;
    let q_dim = q.dim();

    let containment = if l_reduced.is_zero() {
        Containment::LInM
    } else if m_reduced.is_zero() {
        Containment::MInL
    } else {
        Containment::None
    };
    if containment != Containment::None {
        return Ok(InclinationReport {
            c: 1.0,
            q_dim,
            angles: Vec::new(),
            q,
            l_reduced,
            m_reduced,
            containment,
            near_degenerate: false,
            top_pair: None,
            tol,
        });
    }

    let pairs = principal_pairs(&l_reduced, &m_reduced)?;
    let c = pairs.cosines[0];
    let space = &l.space;
    let u = Vector::new(Arc::clone(space), pairs.l_vectors.column(0).into_owned())?;
    let v = Vector::new(Arc::clone(space), pairs.m_vectors.column(0).into_owned())?;
    Ok(InclinationReport {
        c,
        q_dim,
        angles: pairs.cosines.iter().map(|x| x.acos()).collect(),
        q,
        l_reduced,
        m_reduced,
        containment,
        near_degenerate: c > 1.0 - NEAR_DEGENERATE_GAP,
        top_pair: Some((u, v)),
        tol,
    })
}

/// Independent evaluation of `c(L, M)` as `‖P_{L⊖Q} P_{M⊖Q}‖`.
///
/// Works with ambient projectors in Cholesky coordinates. `Q` is read off the
/// spectrum of `P_L P_M P_L` (eigenvalues whose square root exceeds `1 − tol`),
/// and the norm is the square root of the top eigenvalue of
/// `P_{L⊖Q} P_{M⊖Q} P_{L⊖Q}`. Uses the Jacobi eigensolver only; no SVD.
pub fn inclination_oracle(l: &Subspace, m: &Subspace, tol: f64) -> Result<f64> {
    HilbertSpace::check_same(&l.space, &m.space)?;
    if l.is_zero() || m.is_zero() {
        return Err(Error::ZeroSubspace);
    }
    let ul = l.chol_basis();
    let um = m.chol_basis();
    let pl = &ul * ul.adjoint();
    let pm = &um * um.adjoint();

    let h = &pl * &pm * &pl;
    let eig = linalg::hermitian_eigen(&h);
    let n = eig.values.len();
    let shared: Vec<usize> = (0..n).rev().take_while(|&i| eig.values[i].max(0.0).sqrt() > 1.0 - tol).collect();
    let q = shared.len();
    if q >= l.dim() || q >= m.dim() {
        return Ok(1.0);
    }

    let mut pl_red = pl;
    let mut pm_red = pm.clone();
    for &i in &shared {
        let ql = eig.vectors.column(i).into_owned();
        pl_red -= &ql * ql.adjoint();
        let mut qm = &pm * &ql;
        let nrm = qm.norm();
        qm /= C64::new(nrm, 0.0);
        pm_red -= &qm * qm.adjoint();
    }
    let prod = &pl_red * &pm_red * &pl_red;
    let top = linalg::hermitian_eigen(&prod).values.last().copied().unwrap_or(0.0);
    Ok(top.max(0.0).sqrt().min(1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{inner, make_space, norm};
    use crate::linalg::real_matrix;

    fn eucl(n: usize) -> Arc<HilbertSpace> {
        HilbertSpace::euclidean(n).shared()
    }

    fn cols(space: &Arc<HilbertSpace>, rows: usize, cols: usize, data: &[f64]) -> Subspace {
        Subspace::span(space, &real_matrix(rows, cols, data), DEFAULT_RANK_TOL).unwrap()
    }

    #[test]
    fn project_examples() {
        let e = eucl(2);
        let s = cols(&e, 2, 1, &[1.0, 0.0]);
        let x = Vector::from_real(e.clone(), &[3.0, 4.0]).unwrap();
        let p = s.project(&x).unwrap();
        assert!((p.coeffs()[0].re - 3.0).abs() < 1e-15 && p.coeffs()[1].norm() < 1e-15);
        let pp = s.project(&p).unwrap();
        assert!((pp.coeffs() - p.coeffs()).norm() < 1e-12);

        // metric diag(1,4), S = span{e1+e2}, x = e1: (x,b)/(b,b) = 1/5
        let d = make_space(real_matrix(2, 2, &[1.0, 0.0, 0.0, 4.0])).unwrap();
        let s = cols(&d, 2, 1, &[1.0, 1.0]);
        let p = s.project(&Vector::unit(d, 0)).unwrap();
        assert!((p.coeffs()[0].re - 0.2).abs() < 1e-15);
        assert!((p.coeffs()[1].re - 0.2).abs() < 1e-15);
    }

    #[test]
    fn residual_of_projection_is_orthogonal() {
        let g = make_space(real_matrix(3, 3, &[3.0, 1.0, 0.0, 1.0, 2.0, 0.5, 0.0, 0.5, 1.0])).unwrap();
        let s = cols(&g, 3, 2, &[1.0, 0.0, 2.0, 1.0, 0.0, -1.0]);
        let x = Vector::from_real(g, &[0.3, -1.2, 2.0]).unwrap();
        let r = x.sub(&s.project(&x).unwrap()).unwrap();
        for b in s.basis_vectors() {
            assert!(inner(&r, &b).unwrap().norm() < 1e-14);
        }
    }

    #[test]
    fn intersect_examples() {
        let e = eucl(3);
        let l = cols(&e, 3, 2, &[1.0, 0.0, 0.0, 1.0, 0.0, 0.0]);
        let m = cols(&e, 3, 2, &[0.0, 0.0, 1.0, 0.0, 0.0, 1.0]);
        let q = intersect(&l, &m, DEFAULT_INTERSECT_TOL).unwrap();
        assert_eq!(q.dim(), 1);
        assert!((q.basis()[(1, 0)].norm() - 1.0).abs() < 1e-14);

        let e2 = eucl(2);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let l = cols(&e2, 2, 1, &[1.0, 0.0]);
        let m = cols(&e2, 2, 1, &[s, s]);
        assert_eq!(intersect(&l, &m, DEFAULT_INTERSECT_TOL).unwrap().dim(), 0);
    }

    #[test]
    fn ominus_examples() {
        let e = eucl(2);
        let l = cols(&e, 2, 2, &[1.0, 0.0, 0.0, 1.0]);
        let q = cols(&e, 2, 1, &[1.0, 0.0]);
        let r = ominus(&l, &q, DEFAULT_INTERSECT_TOL).unwrap();
        assert_eq!(r.dim(), 1);
        assert!(r.basis()[(0, 0)].norm() < 1e-14);

        let r = ominus(&l, &Subspace::zero(&e), DEFAULT_INTERSECT_TOL).unwrap();
        assert_eq!(r.dim(), 2);

        let l = cols(&e, 2, 2, &[1.0, 1.0, 1.0, -1.0]);
        let q = cols(&e, 2, 1, &[1.0, 1.0]);
        let r = ominus(&l, &q, DEFAULT_INTERSECT_TOL).unwrap();
        let b = r.basis();
        assert!((b[(0, 0)] + b[(1, 0)]).norm() < 1e-14);
    }

    #[test]
    fn ominus_rejects_non_contained() {
        let e = eucl(3);
        let l = cols(&e, 3, 1, &[1.0, 0.0, 0.0]);
        let q = cols(&e, 3, 1, &[0.0, 1.0, 0.0]);
        assert!(matches!(ominus(&l, &q, DEFAULT_INTERSECT_TOL), Err(Error::NotASubspaceOf { .. })));
    }

    #[test]
    fn sum_and_perp_examples() {
        let e = eucl(2);
        let a = cols(&e, 2, 1, &[1.0, 0.0]);
        let b = cols(&e, 2, 1, &[0.0, 1.0]);
        assert_eq!(sum(&a, &b).unwrap().dim(), 2);

        let e3 = eucl(3);
        let s = cols(&e3, 3, 1, &[1.0, 0.0, 0.0]);
        let p = perp(&s).unwrap();
        assert_eq!(p.dim(), 2);
        for j in 0..2 {
            assert!(p.basis()[(0, j)].norm() < 1e-14);
        }

        // (e1, v)_G = 2 v1 + v2 = 0  =>  v ∝ (1, -2)
        let g = make_space(real_matrix(2, 2, &[2.0, 1.0, 1.0, 2.0])).unwrap();
        let s = cols(&g, 2, 1, &[1.0, 0.0]);
        let p = perp(&s).unwrap();
        assert_eq!(p.dim(), 1);
        let v = p.basis().column(0);
        assert!((v[1] + v[0] * 2.0).norm() < 1e-14);
        assert!(p.orthonormality_defect() < 1e-14);
    }

    #[test]
    fn inclination_examples() {
        let e = eucl(3);
        let l = cols(&e, 3, 2, &[1.0, 0.0, 0.0, 1.0, 0.0, 0.0]);
        let m = cols(&e, 3, 2, &[1.0, 0.0, 0.0, 0.0, 0.0, 1.0]);
        let r = inclination(&l, &m, DEFAULT_INTERSECT_TOL).unwrap();
        assert_eq!(r.q_dim, 1);
        assert!(r.c.abs() < 1e-14);
        assert_eq!(r.containment, Containment::None);

        let e2 = eucl(2);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let l = cols(&e2, 2, 1, &[1.0, 0.0]);
        let m = cols(&e2, 2, 1, &[s, s]);
        let r = inclination(&l, &m, DEFAULT_INTERSECT_TOL).unwrap();
        assert!((r.c - s).abs() < 1e-15);
        let (u, v) = r.top_pair.clone().unwrap();
        assert!((inner(&u, &v).unwrap().re - r.c).abs() < 1e-14);
        assert!((norm(&u) - 1.0).abs() < 1e-14);
        assert!((inclination_oracle(&l, &m, DEFAULT_INTERSECT_TOL).unwrap() - r.c).abs() < 1e-12);
    }

    #[test]
    fn containment_sets_flag() {
        let e = eucl(3);
        let l = cols(&e, 3, 1, &[1.0, 0.0, 0.0]);
        let m = cols(&e, 3, 2, &[1.0, 0.0, 0.0, 1.0, 0.0, 0.0]);
        let r = inclination(&l, &m, DEFAULT_INTERSECT_TOL).unwrap();
        assert_eq!(r.containment, Containment::LInM);
        assert_eq!(r.c, 1.0);
        let r = inclination(&m, &l, DEFAULT_INTERSECT_TOL).unwrap();
        assert_eq!(r.containment, Containment::MInL);
        assert_eq!(inclination_oracle(&m, &l, DEFAULT_INTERSECT_TOL).unwrap(), 1.0);
    }

    #[test]
    fn zero_subspace_rejected() {
        let e = eucl(2);
        let l = cols(&e, 2, 1, &[1.0, 0.0]);
        assert!(matches!(inclination(&l, &Subspace::zero(&e), 1e-8), Err(Error::ZeroSubspace)));
        assert!(matches!(inclination_oracle(&Subspace::zero(&e), &l, 1e-8), Err(Error::ZeroSubspace)));
    }

    #[test]
    fn from_orthonormal_validates() {
        let e = eucl(2);
        assert!(Subspace::from_orthonormal(&e, real_matrix(2, 1, &[1.0, 1.0])).is_err());
        assert!(Subspace::from_orthonormal(&e, real_matrix(2, 1, &[1.0, 0.0])).is_ok());
    }
}
