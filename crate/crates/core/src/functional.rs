//! Linear functionals by Riesz vector, and their extension from `L` to the
//! whole space with `f̃ = f` on `L`, `f̃ = 0` on `M`.
//!
//! The extension evaluates `f` on the `L ⊖ Q` part of the canonical split and
//! is zero on `Q` and on `(L + M)^⊥`, so `‖f̃‖ ≤ ‖f‖_{L*}/√(1−c²)`.

use std::sync::Arc;

use serde::Serialize;

use crate::decompose::check_nondegenerate;
use crate::error::{Error, Result};
use crate::hilbert::{inner, norm, HilbertSpace, Vector};
use crate::linalg::{CMat, CVec, C64};
use crate::subspace::{self, inclination, InclinationReport, Subspace};

/// `f(x) = inner(x, riesz)`.
#[derive(Debug, Clone)]
pub struct Functional {
    riesz: Vector,
}

impl Functional {
    pub fn new(riesz: Vector) -> Self {
        Self { riesz }
    }

    pub fn riesz(&self) -> &Vector {
        &self.riesz
    }

    pub fn space(&self) -> &Arc<HilbertSpace> {
        self.riesz.space()
    }

    pub fn apply(&self, x: &Vector) -> Result<C64> {
        inner(x, &self.riesz)
    }

    /// Norm on the whole space, `‖w‖`.
    pub fn norm(&self) -> f64 {
        norm(&self.riesz)
    }
}

/// `sup_{0≠x∈S} |f(x)|/‖x‖ = ‖P_S w‖`.
pub fn restriction_norm(f: &Functional, s: &Subspace) -> Result<f64> {
    Ok(norm(&s.project(f.riesz())?))
}

/// Whether `f` vanishes on `L ∩ M` (up to `tol·‖w‖`).
pub fn in_fq(f: &Functional, l: &Subspace, m: &Subspace, tol: f64) -> Result<bool> {
    let q = subspace::intersect(l, m, tol)?;
    Ok(restriction_norm(f, &q)? <= tol * f.norm())
}

#[derive(Debug, Clone)]
pub struct ExtensionReport {
    pub f: Functional,
    pub f_tilde: Functional,
    pub norm_f_l: f64,
    pub norm_f_tilde: f64,
    pub c: f64,
    /// `norm_f_l / √(1−c²)`.
    pub bound: f64,
    pub on_l_error: f64,
    pub on_m_error: f64,
}

pub fn extend(f: &Functional, l: &Subspace, m: &Subspace, tol: f64) -> Result<ExtensionReport> {
    HilbertSpace::check_same(f.space(), l.space())?;
    let report = inclination(l, m, tol)?;
    extend_with_report(f, l, m, &report, tol)
}

/// Extension using a precomputed inclination report for `(L, M)`.
pub fn extend_with_report(
    f: &Functional,
    l: &Subspace,
    m: &Subspace,
    report: &InclinationReport,
    tol: f64,
) -> Result<ExtensionReport> {
    HilbertSpace::check_same(f.space(), l.space())?;
    HilbertSpace::check_same(f.space(), m.space())?;
    check_nondegenerate(report)?;
    let restriction = restriction_norm(f, &report.q)?;
    let allowed = tol * f.norm();
    if restriction > allowed {
        return Err(Error::NotInFQ { restriction, allowed });
    }

    let space = Arc::clone(f.space());
    let n = space.dim();
    let perp = subspace::perp(&subspace::sum(l, m)?)?;
    let blocks = [&report.l_reduced, &report.m_reduced, &report.q, &perp];
    let total: usize = blocks.iter().map(|b| b.dim()).sum();
    if total != n {
        return Err(Error::Numerical(format!(
            "L⊖Q, M⊖Q, Q and (L+M)^⊥ span {total} dimensions, expected {n}"
        )));
    }
    let mut frame = CMat::zeros(n, n);
    let mut col = 0;
    for b in blocks {
        frame.columns_mut(col, b.dim()).copy_from(b.basis());
        col += b.dim();
    }
    // f̃(b_j) = f(b_j) on L⊖Q and 0 elsewhere; conj(f̃(b)) = b* G w̃
    let mut rhs = CVec::zeros(n);
    let gw = space.gram() * f.riesz().coeffs();
    for j in 0..report.l_reduced.dim() {
        rhs[j] = (frame.column(j).adjoint() * &gw)[(0, 0)];
    }
    let a = space.to_chol(&frame).adjoint();
    let z = a
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::Numerical("singular extension frame".into()))?;
    let zm = CMat::from_column_slice(n, 1, z.as_slice());
    let w_tilde = space.from_chol(&zm)?.column(0).into_owned();
    let f_tilde = Functional::new(Vector::new(Arc::clone(&space), w_tilde)?);

    let norm_f_l = restriction_norm(f, l)?;
    let norm_f_tilde = f_tilde.norm();
    let on_l_error = max_deviation(l, |b| Ok(f_tilde.apply(b)? - f.apply(b)?))?;
    let on_m_error = max_deviation(m, |b| f_tilde.apply(b))?;
    Ok(ExtensionReport {
        f: f.clone(),
        f_tilde,
        norm_f_l,
        norm_f_tilde,
        c: report.c,
        bound: norm_f_l / (1.0 - report.c * report.c).sqrt(),
        on_l_error,
        on_m_error,
    })
}

fn max_deviation(s: &Subspace, eval: impl Fn(&Vector) -> Result<C64>) -> Result<f64> {
    s.basis_vectors()
        .iter()
        .try_fold(0.0_f64, |acc, b| Ok(acc.max(eval(b)?.norm())))
}

/// One step of a degeneracy sweep.
#[derive(Debug, Clone, Serialize)]
pub struct ProbeRow {
    pub t: f64,
    pub c: f64,
    /// `1/√(1−c²)`, the extension bound for a unit functional.
    pub bound: f64,
    /// `‖f̃_t‖` for `f_t(x) = inner(x, u_t)`.
    pub attained_norm: f64,
    /// `1/‖u_t − v_t‖`, a lower bound on any admissible extension norm.
    pub witness: f64,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct ProbeTable {
    pub rows: Vec<ProbeRow>,
}

impl ProbeTable {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,c,bound,attained_norm,witness\n");
        for r in &self.rows {
            out.push_str(&format!("{:?},{:?},{:?},{:?},{:?}\n", r.t, r.c, r.bound, r.attained_norm, r.witness));
        }
        out
    }

    /// True when attained norms strictly increase along the table.
    pub fn attained_increasing(&self) -> bool {
        self.rows.windows(2).all(|w| w[1].attained_norm > w[0].attained_norm)
    }
}

/// Sweep aborted on a degenerate member; carries the rows computed so far.
#[derive(Debug, Clone)]
pub struct ProbeAbort {
    pub partial: ProbeTable,
    pub t: f64,
    pub error: Error,
}

impl std::fmt::Display for ProbeAbort {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "probe aborted at t = {} after {} rows: {}", self.t, self.partial.rows.len(), self.error)
    }
}

impl std::error::Error for ProbeAbort {}

/// For each member `(t, L_t, M_t)`, extend the functional defined by the top
/// principal vector `u_t` and record its norm.
pub fn degeneracy_probe<I>(family: I, tol: f64) -> std::result::Result<ProbeTable, ProbeAbort>
where
    I: IntoIterator<Item = (f64, Subspace, Subspace)>,
{
    let mut table = ProbeTable::default();
    for (t, l, m) in family {
        match probe_one(t, &l, &m, tol) {
            Ok(row) => table.rows.push(row),
            Err(error) => return Err(ProbeAbort { partial: table, t, error }),
        }
    }
    Ok(table)
}

fn probe_one(t: f64, l: &Subspace, m: &Subspace, tol: f64) -> Result<ProbeRow> {
    let report = inclination(l, m, tol)?;
    check_nondegenerate(&report)?;
    let (u, v) = report.top_pair.clone().ok_or(Error::ZeroSubspace)?;
    let f = Functional::new(u.clone());
    let ext = extend_with_report(&f, l, m, &report, tol)?;
    let gap = norm(&u.sub(&v)?);
    Ok(ProbeRow {
        t,
        c: report.c,
        bound: ext.bound,
        attained_norm: ext.norm_f_tilde,
        witness: 1.0 / gap,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::DEFAULT_RANK_TOL;
    use crate::linalg::real_matrix;
    use crate::subspace::DEFAULT_INTERSECT_TOL;

    fn cols(space: &Arc<HilbertSpace>, rows: usize, n: usize, data: &[f64]) -> Subspace {
        Subspace::span(space, &real_matrix(rows, n, data), DEFAULT_RANK_TOL).unwrap()
    }

    #[test]
    fn restriction_norm_examples() {
        let e = HilbertSpace::euclidean(2).shared();
        let s = cols(&e, 2, 1, &[1.0, 0.0]);
        let f = Functional::new(Vector::from_real(e.clone(), &[3.0, 4.0]).unwrap());
        assert!((restriction_norm(&f, &s).unwrap() - 3.0).abs() < 1e-15);
        let f = Functional::new(Vector::from_real(e.clone(), &[2.0, 0.0]).unwrap());
        assert!((restriction_norm(&f, &s).unwrap() - 2.0).abs() < 1e-15);
        let f = Functional::new(Vector::from_real(e, &[0.0, 5.0]).unwrap());
        assert_eq!(restriction_norm(&f, &s).unwrap(), 0.0);
    }

    #[test]
    fn fq_membership() {
        let e = HilbertSpace::euclidean(2).shared();
        let l = cols(&e, 2, 1, &[1.0, 0.0]);
        let m = cols(&e, 2, 1, &[1.0, 1.0]);
        let f = Functional::new(Vector::unit(e.clone(), 0));
        assert!(in_fq(&f, &l, &m, DEFAULT_INTERSECT_TOL).unwrap());
        assert!(!in_fq(&f, &l, &l, DEFAULT_INTERSECT_TOL).unwrap());
    }

    #[test]
    fn forty_five_degree_extension_is_sharp() {
        // f̃(e1) = 1, f̃(e1+e2) = 0  =>  w̃ = (1, −1)
        let e = HilbertSpace::euclidean(2).shared();
        let l = cols(&e, 2, 1, &[1.0, 0.0]);
        let m = cols(&e, 2, 1, &[1.0, 1.0]);
        let f = Functional::new(Vector::unit(e, 0));
        let r = extend(&f, &l, &m, DEFAULT_INTERSECT_TOL).unwrap();
        let w = r.f_tilde.riesz().coeffs();
        assert!((w[0] - C64::new(1.0, 0.0)).norm() < 1e-14);
        assert!((w[1] + C64::new(1.0, 0.0)).norm() < 1e-14);
        assert!((r.norm_f_tilde - 2f64.sqrt()).abs() < 1e-14);
        assert!((r.bound - 2f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn zero_functional_extends_to_zero() {
        let e = HilbertSpace::euclidean(3).shared();
        let l = cols(&e, 3, 1, &[1.0, 0.0, 0.0]);
        let m = cols(&e, 3, 1, &[1.0, 1.0, 0.0]);
        let f = Functional::new(Vector::zeros(e));
        let r = extend(&f, &l, &m, DEFAULT_INTERSECT_TOL).unwrap();
        assert_eq!(r.norm_f_tilde, 0.0);
    }

    #[test]
    fn extension_with_shared_directions() {
        // Q = span{e1}; f must vanish there
        let e = HilbertSpace::euclidean(4).shared();
        let l = cols(&e, 4, 2, &[1.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0]);
        let m = cols(&e, 4, 2, &[1.0, 0.0, 0.0, 1.0, 0.0, 2.0, 0.0, 0.0]);
        let good = Functional::new(Vector::unit(e.clone(), 1));
        let r = extend(&good, &l, &m, DEFAULT_INTERSECT_TOL).unwrap();
        assert!(r.on_l_error < 1e-14 && r.on_m_error < 1e-14);
        assert!(r.norm_f_tilde <= r.bound * (1.0 + 1e-12));
        // on the complement (e4) the extension is zero
        assert!(r.f_tilde.riesz().coeffs()[3].norm() < 1e-14);

        let bad = Functional::new(Vector::unit(e, 0));
        assert!(matches!(extend(&bad, &l, &m, DEFAULT_INTERSECT_TOL), Err(Error::NotInFQ { .. })));
    }

    #[test]
    fn degenerate_pair_refused() {
        let e = HilbertSpace::euclidean(2).shared();
        let l = cols(&e, 2, 1, &[1.0, 0.0]);
        let m = cols(&e, 2, 2, &[1.0, 0.0, 0.0, 1.0]);
        let f = Functional::new(Vector::unit(e, 0));
        assert!(matches!(extend(&f, &l, &m, 1e-8), Err(Error::DegenerateInclination { .. })));
    }

    #[test]
    fn probe_aborts_with_partial_table() {
        let e = HilbertSpace::euclidean(2).shared();
        let l = cols(&e, 2, 1, &[1.0, 0.0]);
        let good = cols(&e, 2, 1, &[1.0, 1.0]);
        let family = vec![(1.0, l.clone(), good), (2.0, l.clone(), l)];
        let abort = degeneracy_probe(family, DEFAULT_INTERSECT_TOL).unwrap_err();
        assert_eq!(abort.partial.rows.len(), 1);
        assert_eq!(abort.t, 2.0);
        assert!(matches!(abort.error, Error::DegenerateInclination { .. }));
    }
}
