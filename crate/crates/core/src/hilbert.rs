//! Finite-dimensional complex Hilbert spaces with an arbitrary Gram metric.
//!
//! Inner product convention: `inner(x, y) = y* G x`, linear in the first
//! argument and conjugate-linear in the second. A functional with Riesz
//! vector `w` is therefore `f(x) = inner(x, w)`, linear in `x`.
//!
//! Every metric computation goes through the cached upper Cholesky factor
//! `R` (`G = R* R`): in coordinates `y = R x` the metric is Euclidean.

use std::sync::Arc;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::linalg::{self, CMat, CVec, C64};

/// Default relative rank threshold for orthonormalization.
pub const DEFAULT_RANK_TOL: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct HilbertSpace {
    dim: usize,
    gram: CMat,
    factor: CMat,
    label: String,
}

impl HilbertSpace {
    /// Validate `gram` and cache its Cholesky factor.
    pub fn new(gram: CMat) -> Result<Self> {
        let (rows, cols) = gram.shape();
        if rows != cols {
            return Err(Error::DimensionMismatch { expected: rows, found: cols });
        }
        if rows == 0 {
            return Err(Error::InvalidConfig("Gram matrix must be at least 1x1".into()));
        }
        let scale = linalg::max_abs(&gram);
        if !scale.is_finite() {
            return Err(Error::InvalidConfig("Gram matrix has non-finite entries".into()));
        }
        let asym = linalg::max_abs(&(&gram - gram.adjoint()));
        let allowed = 1e-12 * scale;
        if asym > allowed {
            return Err(Error::GramNotHermitian { asymmetry: asym, allowed });
        }
        let gram = (&gram + gram.adjoint()) * C64::new(0.5, 0.0);
        let floor = rows as f64 * 1e-14 * scale;
        let lower = linalg::cholesky_lower(&gram, floor)
            .map_err(|(index, pivot)| Error::GramNotPositiveDefinite { index, pivot, floor })?;
        Ok(Self { dim: rows, gram, factor: lower.adjoint(), label: String::new() })
    }

    /// Coordinate space ℂⁿ with the identity metric.
    pub fn euclidean(dim: usize) -> Self {
        assert!(dim > 0, "dimension must be positive");
        Self {
            dim,
            gram: CMat::identity(dim, dim),
            factor: CMat::identity(dim, dim),
            label: format!("euclidean-{dim}"),
        }
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn shared(self) -> Arc<Self> {
        Arc::new(self)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn gram(&self) -> &CMat {
        &self.gram
    }

    /// Upper-triangular `R` with `G = R* R`.
    pub fn gram_factor(&self) -> &CMat {
        &self.factor
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// SHA-256 over the little-endian bytes of the Gram entries, column major.
    pub fn gram_digest(&self) -> String {
        let mut h = Sha256::new();
        h.update((self.dim as u64).to_le_bytes());
        for z in self.gram.iter() {
            h.update(z.re.to_le_bytes());
            h.update(z.im.to_le_bytes());
        }
        hex::encode(h.finalize())
    }

    /// Map ambient coordinates to Cholesky coordinates (`R x`).
    pub fn to_chol(&self, x: &CMat) -> CMat {
        &self.factor * x
    }

    /// Map Cholesky coordinates back to ambient coordinates (`R⁻¹ y`).
    pub fn from_chol(&self, y: &CMat) -> Result<CMat> {
        linalg::solve_upper(&self.factor, y)
    }

    pub fn inner_coeffs(&self, x: &CVec, y: &CVec) -> C64 {
        (y.adjoint() * &self.gram * x)[(0, 0)]
    }

    /// Metric cross-Gram `A* G B` for column sets `A`, `B`.
    pub fn cross_gram(&self, a: &CMat, b: &CMat) -> CMat {
        a.adjoint() * &self.gram * b
    }

    /// Orthonormal basis (in this metric) for the numerical column span of
    /// `generators`. Singular values of `R·generators` below
    /// `rank_tol · σ_max` are discarded.
    pub fn gram_orthonormalize(&self, generators: &CMat, rank_tol: f64) -> Result<CMat> {
        if generators.nrows() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: generators.nrows() });
        }
        let y = self.to_chol(generators);
        let u = linalg::orth(&y, rank_tol);
        self.from_chol(&u)
    }

    /// True when `other` is the same space (shared pointer or identical Gram).
    pub fn same_as(&self, other: &HilbertSpace) -> bool {
        std::ptr::eq(self, other) || (self.dim == other.dim && self.gram == other.gram)
    }

    pub(crate) fn check_same(a: &Arc<HilbertSpace>, b: &Arc<HilbertSpace>) -> Result<()> {
        if Arc::ptr_eq(a, b) {
            return Ok(());
        }
        if a.dim != b.dim {
            return Err(Error::DimensionMismatch { expected: a.dim, found: b.dim });
        }
        if a.gram != b.gram {
            return Err(Error::SpaceMismatch);
        }
        Ok(())
    }
}

/// Validate a Gram matrix and build a shared space.
pub fn make_space(gram: CMat) -> Result<Arc<HilbertSpace>> {
    HilbertSpace::new(gram).map(Arc::new)
}

/// A point of a [`HilbertSpace`], stored as ambient coordinates.
#[derive(Debug, Clone)]
pub struct Vector {
    space: Arc<HilbertSpace>,
    coeffs: CVec,
}

impl Vector {
    pub fn new(space: Arc<HilbertSpace>, coeffs: CVec) -> Result<Self> {
        if coeffs.len() != space.dim() {
            return Err(Error::DimensionMismatch { expected: space.dim(), found: coeffs.len() });
        }
        Ok(Self { space, coeffs })
    }

    pub fn from_real(space: Arc<HilbertSpace>, coeffs: &[f64]) -> Result<Self> {
        Self::new(space, linalg::real_vector(coeffs))
    }

    pub fn zeros(space: Arc<HilbertSpace>) -> Self {
        let n = space.dim();
        Self { space, coeffs: CVec::zeros(n) }
    }

    /// `i`-th coordinate unit vector.
    pub fn unit(space: Arc<HilbertSpace>, i: usize) -> Self {
        let mut v = Self::zeros(space);
        v.coeffs[i] = linalg::ONE;
        v
    }

    pub fn space(&self) -> &Arc<HilbertSpace> {
        &self.space
    }

    pub fn coeffs(&self) -> &CVec {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> CVec {
        self.coeffs
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub(crate) fn with_coeffs(&self, coeffs: CVec) -> Self {
        debug_assert_eq!(coeffs.len(), self.coeffs.len());
        Self { space: Arc::clone(&self.space), coeffs }
    }

    pub fn scale(&self, a: C64) -> Self {
        self.with_coeffs(&self.coeffs * a)
    }

    pub fn add(&self, other: &Vector) -> Result<Self> {
        HilbertSpace::check_same(&self.space, &other.space)?;
        Ok(self.with_coeffs(&self.coeffs + &other.coeffs))
    }

    pub fn sub(&self, other: &Vector) -> Result<Self> {
        HilbertSpace::check_same(&self.space, &other.space)?;
        Ok(self.with_coeffs(&self.coeffs - &other.coeffs))
    }
}

/// `inner(x, y) = y* G x`.
pub fn inner(x: &Vector, y: &Vector) -> Result<C64> {
    HilbertSpace::check_same(&x.space, &y.space)?;
    Ok(x.space.inner_coeffs(&x.coeffs, &y.coeffs))
}

/// Metric norm, computed in Cholesky coordinates so it is never negative.
pub fn norm(x: &Vector) -> f64 {
    (x.space.gram_factor() * &x.coeffs).norm()
}

/// Metric distance `‖x − y‖`.
pub fn distance(x: &Vector, y: &Vector) -> Result<f64> {
    Ok(norm(&x.sub(y)?))
}

pub fn gram_orthonormalize(space: &HilbertSpace, generators: &CMat, rank_tol: f64) -> Result<CMat> {
    space.gram_orthonormalize(generators, rank_tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{max_abs, real_matrix};

    fn diag14() -> Arc<HilbertSpace> {
        make_space(real_matrix(2, 2, &[1.0, 0.0, 0.0, 4.0])).unwrap()
    }

    fn g2112() -> Arc<HilbertSpace> {
        make_space(real_matrix(2, 2, &[2.0, 1.0, 1.0, 2.0])).unwrap()
    }

    #[test]
    fn identity_metric_has_identity_factor() {
        let s = make_space(CMat::identity(3, 3)).unwrap();
        assert_eq!(s.dim(), 3);
        assert!(max_abs(&(s.gram_factor() - CMat::identity(3, 3))) == 0.0);
    }

    #[test]
    fn diagonal_metric_scales_norm() {
        let s = diag14();
        let e2 = Vector::unit(s, 1);
        assert!((norm(&e2) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn indefinite_gram_rejected() {
        assert!(make_space(real_matrix(2, 2, &[2.0, 1.0, 1.0, 2.0])).is_ok());
        let err = make_space(real_matrix(2, 2, &[1.0, 2.0, 2.0, 1.0])).unwrap_err();
        assert!(matches!(err, Error::GramNotPositiveDefinite { index: 1, .. }));
    }

    #[test]
    fn non_hermitian_gram_rejected() {
        let err = make_space(real_matrix(2, 2, &[2.0, 1.0, 0.5, 2.0])).unwrap_err();
        assert!(matches!(err, Error::GramNotHermitian { .. }));
    }

    #[test]
    fn non_square_gram_rejected() {
        let err = make_space(CMat::zeros(2, 3)).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { .. }));
    }

    #[test]
    fn inner_examples() {
        let e = HilbertSpace::euclidean(2).shared();
        let v = inner(&Vector::unit(e.clone(), 0), &Vector::unit(e, 1)).unwrap();
        assert_eq!(v, C64::new(0.0, 0.0));

        let d = diag14();
        let v = inner(&Vector::unit(d.clone(), 1), &Vector::unit(d, 1)).unwrap();
        assert!((v - C64::new(4.0, 0.0)).norm() < 1e-15);

        let g = g2112();
        let v = inner(&Vector::unit(g.clone(), 0), &Vector::unit(g, 1)).unwrap();
        assert!((v - C64::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn inner_is_linear_in_first_argument() {
        let g = g2112();
        let x = Vector::new(g.clone(), CVec::from_vec(vec![C64::new(1.0, 2.0), C64::new(-0.5, 0.3)])).unwrap();
        let y = Vector::new(g, CVec::from_vec(vec![C64::new(0.2, -1.0), C64::new(1.5, 0.1)])).unwrap();
        let a = C64::new(0.0, 1.0);
        let lhs = inner(&x.scale(a), &y).unwrap();
        let rhs = a * inner(&x, &y).unwrap();
        assert!((lhs - rhs).norm() < 1e-14);
        let conj_rhs = a.conj() * inner(&x, &y).unwrap();
        assert!((inner(&x, &y.scale(a)).unwrap() - conj_rhs).norm() < 1e-14);
    }

    #[test]
    fn norm_examples() {
        let e = HilbertSpace::euclidean(2).shared();
        assert_eq!(norm(&Vector::zeros(e.clone())), 0.0);
        let ones = Vector::from_real(e, &[1.0, 1.0]).unwrap();
        assert!((norm(&ones) - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn mismatched_dimensions_rejected() {
        let a = Vector::unit(HilbertSpace::euclidean(2).shared(), 0);
        let b = Vector::unit(HilbertSpace::euclidean(3).shared(), 0);
        assert!(matches!(inner(&a, &b), Err(Error::DimensionMismatch { expected: 2, found: 3 })));
        let c = Vector::unit(diag14(), 0);
        assert!(matches!(inner(&a, &c), Err(Error::SpaceMismatch)));
    }

    #[test]
    fn orthonormalize_examples() {
        let e = HilbertSpace::euclidean(2);
        let b = e.gram_orthonormalize(&real_matrix(2, 2, &[1.0, 2.0, 0.0, 0.0]), DEFAULT_RANK_TOL).unwrap();
        assert_eq!(b.ncols(), 1);
        assert!((b[(0, 0)] - C64::new(1.0, 0.0)).norm() < 1e-15);
        assert!(b[(1, 0)].norm() < 1e-15);

        let b = e.gram_orthonormalize(&real_matrix(2, 2, &[1.0, 1.0, 0.0, 1.0]), DEFAULT_RANK_TOL).unwrap();
        assert_eq!(b.ncols(), 2);
        assert!(max_abs(&(b.adjoint() * &b - CMat::identity(2, 2))) < 1e-14);

        let d = diag14();
        let b = d.gram_orthonormalize(&real_matrix(2, 1, &[0.0, 1.0]), DEFAULT_RANK_TOL).unwrap();
        assert!(b[(0, 0)].norm() < 1e-15);
        assert!((b[(1, 0)] - C64::new(0.5, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn orthonormalize_empty_generators() {
        let e = HilbertSpace::euclidean(3);
        let b = e.gram_orthonormalize(&CMat::zeros(3, 0), DEFAULT_RANK_TOL).unwrap();
        assert_eq!(b.shape(), (3, 0));
        let b = e.gram_orthonormalize(&CMat::zeros(3, 2), DEFAULT_RANK_TOL).unwrap();
        assert_eq!(b.shape(), (3, 0));
    }
}
