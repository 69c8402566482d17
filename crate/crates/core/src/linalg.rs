//! Dense complex kernels: Cholesky, SVD, Hermitian and generalized
//! Hermitian-definite eigensolves, least squares.
//!
//! All routines are deterministic for a fixed input. Singular and eigen
//! vectors follow one phase convention: the largest-magnitude entry of each
//! vector is real and positive (first such entry on ties).

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

pub(crate) const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
pub(crate) const ONE: C64 = C64 { re: 1.0, im: 0.0 };

/// Thin singular value decomposition `A = U diag(s) V*`, singular values
/// descending.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: CMat,
    pub s: Vec<f64>,
    pub v: CMat,
}

/// Hermitian eigendecomposition, eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct Eigen {
    pub values: Vec<f64>,
    pub vectors: CMat,
}

pub fn max_abs(m: &CMat) -> f64 {
    m.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()))
}

pub fn real_matrix(rows: usize, cols: usize, data_row_major: &[f64]) -> CMat {
    assert_eq!(data_row_major.len(), rows * cols);
    CMat::from_fn(rows, cols, |i, j| C64::new(data_row_major[i * cols + j], 0.0))
}

pub fn real_vector(data: &[f64]) -> CVec {
    CVec::from_iterator(data.len(), data.iter().map(|&x| C64::new(x, 0.0)))
}

/// Index of the entry whose magnitude is maximal; ties resolve to the first
/// index within a relative 1e-10 band.
fn dominant_index<'a>(col: impl Iterator<Item = &'a C64> + Clone) -> Option<usize> {
    let max = col.clone().fold(0.0_f64, |acc, z| acc.max(z.norm()));
    if max == 0.0 {
        return None;
    }
    col.enumerate()
        .find(|(_, z)| z.norm() >= max * (1.0 - 1e-10))
        .map(|(i, _)| i)
}

/// Phase that rotates column `j` of `m` so its dominant entry is real positive.
fn column_phase(m: &CMat, j: usize) -> C64 {
    let col = m.column(j);
    match dominant_index(col.iter()) {
        Some(i) => {
            let z = col[i];
            z.conj() / z.norm()
        }
        None => ONE,
    }
}

/// Lower Cholesky factor `L` with `A = L L*`. Fails when a pivot falls at or
/// below `floor`, reporting the offending index and pivot.
pub fn cholesky_lower(a: &CMat, floor: f64) -> std::result::Result<CMat, (usize, f64)> {
    let n = a.nrows();
    let mut l = CMat::zeros(n, n);
    for j in 0..n {
        let mut d = a[(j, j)].re;
        for k in 0..j {
            d -= l[(j, k)].norm_sqr();
        }
        // negated so a NaN pivot is rejected too
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if !(d > floor) {
            return Err((j, d));
        }
        let djj = d.sqrt();
        l[(j, j)] = C64::new(djj, 0.0);
        for i in (j + 1)..n {
            let mut s = a[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)].conj();
            }
            l[(i, j)] = s / djj;
        }
    }
    Ok(l)
}

/// Solve `U X = B` for upper-triangular `U`.
pub fn solve_upper(u: &CMat, b: &CMat) -> Result<CMat> {
    if b.ncols() == 0 {
        return Ok(CMat::zeros(u.nrows(), 0));
    }
    u.solve_upper_triangular(b)
        .ok_or_else(|| Error::Numerical("singular triangular factor".into()))
}

/// Solve `L X = B` for lower-triangular `L`.
pub fn solve_lower(l: &CMat, b: &CMat) -> Result<CMat> {
    if b.ncols() == 0 {
        return Ok(CMat::zeros(l.nrows(), 0));
    }
    l.solve_lower_triangular(b)
        .ok_or_else(|| Error::Numerical("singular triangular factor".into()))
}

/// Thin SVD with descending singular values and the crate phase convention
/// applied to the left vectors (the right vectors carry the same phase so the
/// factorization is unchanged).
///
/// One-sided Jacobi: columns are rotated pairwise until mutually orthogonal,
/// which keeps clustered and repeated singular values accurate.
pub fn svd(a: &CMat) -> Svd {
    let (m, n) = a.shape();
    let r = m.min(n);
    if r == 0 {
        return Svd { u: CMat::zeros(m, 0), s: Vec::new(), v: CMat::zeros(n, 0) };
    }
    let (u_raw, sv, v_raw) = if m >= n {
        one_sided_jacobi(a.clone())
    } else {
        let (v, s, u) = one_sided_jacobi(a.adjoint());
        (u, s, v)
    };

    let mut order: Vec<usize> = (0..r).collect();
    // stable sort keeps ties in column order
    order.sort_by(|&i, &j| sv[j].total_cmp(&sv[i]));

    let mut u = CMat::zeros(m, r);
    let mut v = CMat::zeros(n, r);
    let mut s = Vec::with_capacity(r);
    for (dst, &src) in order.iter().enumerate() {
        u.set_column(dst, &u_raw.column(src));
        v.set_column(dst, &v_raw.column(src));
        s.push(sv[src]);
    }
    complete_columns(&mut u, &s);
    for j in 0..r {
        let p = column_phase(&u, j);
        u.column_mut(j).scale_mut_c(p);
        v.column_mut(j).scale_mut_c(p);
    }
    Svd { u, s, v }
}

/// Orthogonalizes the columns of a tall `w` in place; returns the normalized
/// columns, their norms and the accumulated unitary.
fn one_sided_jacobi(mut w: CMat) -> (CMat, Vec<f64>, CMat) {
    let (m, n) = w.shape();
    let mut v = CMat::identity(n, n);
    let tol = f64::EPSILON * (m as f64).sqrt();
    for _sweep in 0..80 {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha = w.column(p).norm_squared();
                let beta = w.column(q).norm_squared();
                let gamma = w.column(p).dotc(&w.column(q));
                let g = gamma.norm();
                if g == 0.0 || g <= tol * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let e = gamma / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate_pair(&mut w, p, q, c, s, e);
                rotate_pair(&mut v, p, q, c, s, e);
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sv = Vec::with_capacity(n);
    for j in 0..n {
        let nrm = w.column(j).norm();
        sv.push(nrm);
        if nrm > 0.0 {
            w.column_mut(j).scale_mut_c(C64::new(1.0 / nrm, 0.0));
        }
    }
    (w, sv, v)
}

/// `[x_p, x_q] ← [c x_p − s ē x_q, s x_p + c ē x_q]`.
fn rotate_pair(x: &mut CMat, p: usize, q: usize, c: f64, s: f64, e: C64) {
    let eb = e.conj();
    for i in 0..x.nrows() {
        let xp = x[(i, p)];
        let xq = x[(i, q)] * eb;
        x[(i, p)] = xp * c - xq * s;
        x[(i, q)] = xp * s + xq * c;
    }
}

/// Replaces left vectors of negligible singular values, which carry no
/// direction information, by an orthonormal completion.
fn complete_columns(u: &mut CMat, s: &[f64]) {
    let smax = s.first().copied().unwrap_or(0.0);
    let floor = smax * f64::EPSILON * u.nrows() as f64;
    let Some(k) = s.iter().position(|&x| x <= floor) else {
        return;
    };
    for j in k..s.len() {
        // The unit vector least captured by the columns so far.
        let best = (0..u.nrows())
            .map(|i| (i, (0..j).map(|c| u[(i, c)].norm_sqr()).sum::<f64>()))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .map(|(i, _)| i)
            .unwrap_or(0);
        let mut x = CVec::zeros(u.nrows());
        x[best] = ONE;
        for _pass in 0..2 {
            for i in 0..j {
                let h = u.column(i).dotc(&x);
                x -= u.column(i) * h;
            }
        }
        let nrm = x.norm();
        u.set_column(j, &(x / C64::new(nrm, 0.0)));
    }
}

trait ScaleC {
    fn scale_mut_c(&mut self, p: C64);
}

impl<S> ScaleC for nalgebra::Matrix<C64, nalgebra::Dyn, nalgebra::U1, S>
where
    S: nalgebra::StorageMut<C64, nalgebra::Dyn, nalgebra::U1>,
{
    fn scale_mut_c(&mut self, p: C64) {
        for z in self.iter_mut() {
            *z *= p;
        }
    }
}

/// Euclidean orthonormal basis of the column range of `a`, keeping singular
/// values above `rank_tol * s_max`.
pub fn orth(a: &CMat, rank_tol: f64) -> CMat {
    let dec = svd(a);
    let smax = dec.s.first().copied().unwrap_or(0.0);
    if smax == 0.0 {
        return CMat::zeros(a.nrows(), 0);
    }
    let k = dec.s.iter().take_while(|&&s| s > rank_tol * smax).count();
    dec.u.columns(0, k).into_owned()
}

/// Euclidean orthonormal basis of the orthogonal complement of the column
/// span of `q`, whose columns must already be orthonormal.
pub fn complement(q: &CMat) -> CMat {
    let n = q.nrows();
    if q.ncols() == 0 {
        return CMat::identity(n, n);
    }
    let proj = CMat::identity(n, n) - q * q.adjoint();
    let dec = svd(&proj);
    let k = dec.s.iter().take_while(|&&s| s > 0.5).count();
    dec.u.columns(0, k).into_owned()
}

/// Cyclic Jacobi eigensolver for a Hermitian matrix.
///
/// Each rotation first removes the phase of the pivot entry, then applies a
/// real Givens rotation. Iterates until the off-diagonal Frobenius mass falls
/// below `1e-15` of the total.
pub fn hermitian_eigen(a: &CMat) -> Eigen {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "hermitian_eigen needs a square matrix");
    let mut m = (a + a.adjoint()) * C64::new(0.5, 0.0);
    let mut v = CMat::identity(n, n);
    let total = m.norm();
    if n == 0 || total == 0.0 {
        return finish_eigen(m, v);
    }

    for _sweep in 0..100 {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += m[(p, q)].norm_sqr();
            }
        }
        if off.sqrt() <= 1e-15 * total {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let b = m[(p, q)];
                let babs = b.norm();
                if babs <= 1e-300 || babs <= 1e-18 * total {
                    continue;
                }
                let e = b / babs;
                // unitary diag(1, conj(e)) on index q
                for k in 0..n {
                    m[(k, q)] *= e.conj();
                }
                for k in 0..n {
                    m[(q, k)] *= e;
                }
                for k in 0..n {
                    v[(k, q)] *= e.conj();
                }
                let app = m[(p, p)].re;
                let aqq = m[(q, q)].re;
                let theta = (aqq - app) / (2.0 * babs);
                let t = if theta == 0.0 {
                    1.0
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let xp = m[(k, p)];
                    let xq = m[(k, q)];
                    m[(k, p)] = xp * c - xq * s;
                    m[(k, q)] = xp * s + xq * c;
                }
                for k in 0..n {
                    let xp = m[(p, k)];
                    let xq = m[(q, k)];
                    m[(p, k)] = xp * c - xq * s;
                    m[(q, k)] = xp * s + xq * c;
                }
                for k in 0..n {
                    let xp = v[(k, p)];
                    let xq = v[(k, q)];
                    v[(k, p)] = xp * c - xq * s;
                    v[(k, q)] = xp * s + xq * c;
                }
                m[(p, q)] = ZERO;
                m[(q, p)] = ZERO;
                m[(p, p)] = C64::new(m[(p, p)].re, 0.0);
                m[(q, q)] = C64::new(m[(q, q)].re, 0.0);
            }
        }
    }
    finish_eigen(m, v)
}

fn finish_eigen(m: CMat, v: CMat) -> Eigen {
    let n = m.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        m[(i, i)]
            .re
            .partial_cmp(&m[(j, j)].re)
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let mut vectors = CMat::zeros(n, n);
    let mut values = Vec::with_capacity(n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &v.column(src));
        values.push(m[(src, src)].re);
    }
    for j in 0..n {
        let p = column_phase(&vectors, j);
        vectors.column_mut(j).scale_mut_c(p);
    }
    Eigen { values, vectors }
}

/// Generalized Hermitian-definite eigenproblem `A x = λ B x`.
///
/// Reduces through the Cholesky factor of `B`; returned vectors are
/// `B`-orthonormal, eigenvalues ascending.
pub fn generalized_eigen(a: &CMat, b: &CMat) -> Result<Eigen> {
    let n = a.nrows();
    if a.shape() != (n, n) || b.shape() != (n, n) {
        return Err(Error::DimensionMismatch { expected: n, found: b.nrows() });
    }
    let l = cholesky_lower(b, 0.0).map_err(|(index, pivot)| Error::Numerical(format!(
        "generalized eigensolve: B not positive definite (pivot {index} = {pivot:e})"
    )))?;
    // C = L^{-1} A L^{-*}
    let x = solve_lower(&l, a)?;
    let c = solve_lower(&l, &x.adjoint())?.adjoint();
    let eig = hermitian_eigen(&c);
    let mut vectors = solve_upper(&l.adjoint(), &eig.vectors)?;
    for j in 0..n {
        let p = column_phase(&vectors, j);
        vectors.column_mut(j).scale_mut_c(p);
    }
    Ok(Eigen { values: eig.values, vectors })
}

/// Minimum-norm least-squares solution of `A x ≈ b`, truncating singular
/// values below `rank_tol * s_max`.
pub fn lstsq(a: &CMat, b: &CVec, rank_tol: f64) -> CVec {
    let dec = svd(a);
    let mut x = CVec::zeros(a.ncols());
    let smax = dec.s.first().copied().unwrap_or(0.0);
    if smax == 0.0 {
        return x;
    }
    for (j, &s) in dec.s.iter().enumerate() {
        if s <= rank_tol * smax {
            break;
        }
        let coef = dec.u.column(j).dotc(b) / s;
        x += dec.v.column(j) * coef;
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(rng: &mut ChaCha8Rng, m: usize, n: usize) -> CMat {
        CMat::from_fn(m, n, |_, _| {
            C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
        })
    }

    fn random_hermitian(rng: &mut ChaCha8Rng, n: usize) -> CMat {
        let a = random_matrix(rng, n, n);
        &a + a.adjoint()
    }

    #[test]
    fn cholesky_reconstructs() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = random_matrix(&mut rng, 6, 6);
        let g = a.adjoint() * &a + CMat::identity(6, 6);
        let l = cholesky_lower(&g, 0.0).unwrap();
        assert!(max_abs(&(&l * l.adjoint() - &g)) < 1e-12);
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        let g = real_matrix(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        let err = cholesky_lower(&g, 0.0).unwrap_err();
        assert_eq!(err.0, 1);
        assert!((err.1 + 3.0).abs() < 1e-12);
    }

    #[test]
    fn svd_reconstructs_and_sorts() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for &(m, n) in &[(5, 3), (3, 5), (4, 4), (1, 3)] {
            let a = random_matrix(&mut rng, m, n);
            let d = svd(&a);
            let s = CMat::from_diagonal(&CVec::from_iterator(
                d.s.len(),
                d.s.iter().map(|&x| C64::new(x, 0.0)),
            ));
            let rec = &d.u * s * d.v.adjoint();
            assert!(max_abs(&(rec - &a)) < 1e-12);
            assert!(d.s.windows(2).all(|w| w[0] >= w[1]));
            for j in 0..d.u.ncols() {
                let i = dominant_index(d.u.column(j).iter()).unwrap();
                assert!(d.u[(i, j)].im.abs() < 1e-14 && d.u[(i, j)].re > 0.0);
            }
        }
    }

    #[test]
    fn svd_resolves_repeated_singular_values() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for (m, n, want) in [(3, 3, vec![1.0, 1.0, 0.45]), (3, 6, vec![1.0, 1.0, 0.2]), (4, 2, vec![2.0, 2.0])] {
            let k = want.len();
            let u = random_matrix(&mut rng, m, m).qr().q();
            let v = random_matrix(&mut rng, n, n).qr().q();
            let s = CMat::from_diagonal(&real_vector(&want));
            let a = u.columns(0, k) * s * v.columns(0, k).adjoint();
            let d = svd(&a);
            for (got, w) in d.s.iter().zip(&want) {
                assert!((got - w).abs() < 1e-13, "{:?} vs {want:?}", d.s);
            }
            assert!(max_abs(&(d.u.adjoint() * &d.u - CMat::identity(k, k))) < 1e-13);
        }
    }

    #[test]
    fn svd_completes_null_directions() {
        let a = real_matrix(3, 3, &[1.0, 1.0, 0.0, 1.0, 1.0, 0.0, 0.0, 0.0, 0.0]);
        let d = svd(&a);
        assert!((d.s[0] - 2.0).abs() < 1e-14 && d.s[1] < 1e-15 && d.s[2] < 1e-15);
        assert!(max_abs(&(d.u.adjoint() * &d.u - CMat::identity(3, 3))) < 1e-14);
    }

    #[test]
    fn svd_of_empty_is_empty() {
        let d = svd(&CMat::zeros(3, 0));
        assert_eq!(d.u.shape(), (3, 0));
        assert!(d.s.is_empty());
    }

    #[test]
    fn jacobi_matches_definition() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in [1, 2, 5, 12] {
            let a = random_hermitian(&mut rng, n);
            let e = hermitian_eigen(&a);
            let lam = CMat::from_diagonal(&CVec::from_iterator(
                n,
                e.values.iter().map(|&x| C64::new(x, 0.0)),
            ));
            assert!(max_abs(&(&a * &e.vectors - &e.vectors * lam)) < 1e-11);
            assert!(max_abs(&(e.vectors.adjoint() * &e.vectors - CMat::identity(n, n))) < 1e-12);
            assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
        }
    }

    #[test]
    fn jacobi_eigenvalues_of_2x2_by_hand() {
        // [[2,1],[1,2]] has eigenvalues 1 and 3
        let e = hermitian_eigen(&real_matrix(2, 2, &[2.0, 1.0, 1.0, 2.0]));
        assert!((e.values[0] - 1.0).abs() < 1e-14);
        assert!((e.values[1] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn jacobi_singular_values_agree_with_svd() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let a = random_matrix(&mut rng, 7, 4);
        let e = hermitian_eigen(&(a.adjoint() * &a));
        let d = svd(&a);
        for (k, s) in d.s.iter().enumerate() {
            let lam = e.values[e.values.len() - 1 - k];
            assert!((lam.sqrt() - s).abs() < 1e-12);
        }
    }

    #[test]
    fn generalized_eigen_satisfies_pencil() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = random_hermitian(&mut rng, 6);
        let c = random_matrix(&mut rng, 6, 6);
        let b = c.adjoint() * &c + CMat::identity(6, 6);
        let e = generalized_eigen(&a, &b).unwrap();
        for j in 0..6 {
            let x = e.vectors.column(j).into_owned();
            let r = &a * &x - (&b * &x) * C64::new(e.values[j], 0.0);
            assert!(r.norm() < 1e-10);
        }
        let gram = e.vectors.adjoint() * &b * &e.vectors;
        assert!(max_abs(&(gram - CMat::identity(6, 6))) < 1e-10);
    }

    #[test]
    fn lstsq_recovers_consistent_solution() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let a = random_matrix(&mut rng, 8, 3);
        let x = random_matrix(&mut rng, 3, 1).column(0).into_owned();
        let b = &a * &x;
        let got = lstsq(&a, &b, 1e-12);
        assert!((got - x).norm() < 1e-12);
    }

    #[test]
    fn complement_is_orthogonal_and_completes() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let q = orth(&random_matrix(&mut rng, 6, 2), 1e-10);
        let w = complement(&q);
        assert_eq!(w.ncols(), 4);
        assert!(max_abs(&(q.adjoint() * &w)) < 1e-12);
    }
}
