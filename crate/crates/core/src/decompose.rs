//! Two-subspace decomposition `x = x^L + x^M` with certified norm bounds.
//!
//! The canonical split is `x = ŷ + x̂^L + x̂^M` with `ŷ = P_Q x`,
//! `x̂^L ∈ L ⊖ Q`, `x̂^M ∈ M ⊖ Q`. The `Q`-component is then shared out by
//! weights `a1 + a2 = 1`:
//!
//! ```text
//! x^L = x̂^L + a1·ŷ,   x^M = x̂^M + a2·ŷ
//! ‖x̂^L‖, ‖x̂^M‖ ≤ ‖x‖/√(1−c²),   ‖ŷ‖ ≤ ‖x‖
//! ‖x^L‖ ≤ A1‖x‖,  A_k = a_k + 1/√(1−c²)
//! ```
//!
//! When `Q = {0}` the weight term drops out of the constants (`a_k = 0`).

use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::hilbert::{norm, HilbertSpace, Vector};
use crate::linalg::{self, CMat, C64};
use crate::subspace::{self, inclination, InclinationReport, Subspace, NEAR_DEGENERATE_GAP};

/// Default weight of `ŷ` assigned to the `L` component.
pub const DEFAULT_A1: f64 = 0.5;

/// Slack allowed on every bound, relative to `‖x‖`.
pub const BOUND_SLACK: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct Decomposition {
    pub x: Vector,
    pub y_hat: Vector,
    pub xl_hat: Vector,
    pub xm_hat: Vector,
    pub xl: Vector,
    pub xm: Vector,
    pub a1: f64,
    pub a2: f64,
    pub c: f64,
    pub q_dim: usize,
    pub big_a1: f64,
    pub big_a2: f64,
    pub residual: f64,
}

impl Decomposition {
    /// `1/√(1−c²)`.
    pub fn amplification(&self) -> f64 {
        1.0 / (1.0 - self.c * self.c).sqrt()
    }
}

/// Decompose `x` over `(L, M)`, computing the inclination afresh.
pub fn decompose(l: &Subspace, m: &Subspace, x: &Vector, a1: f64, tol: f64) -> Result<Decomposition> {
    if !(0.0..=1.0).contains(&a1) {
        return Err(Error::BadWeights(a1));
    }
    let report = inclination(l, m, tol)?;
    decompose_with_report(&report, x, a1, tol)
}

/// Decompose `x` using a precomputed inclination report for the pair.
pub fn decompose_with_report(report: &InclinationReport, x: &Vector, a1: f64, tol: f64) -> Result<Decomposition> {
    if !(0.0..=1.0).contains(&a1) {
        return Err(Error::BadWeights(a1));
    }
    check_nondegenerate(report)?;
    let space = report.l_reduced.space();
    HilbertSpace::check_same(space, x.space())?;

    let y_hat = report.q.project(x)?;
    let rest = x.sub(&y_hat)?;
    let (xl_hat, xm_hat) = oblique_split(&report.l_reduced, &report.m_reduced, &rest)?;

    let recon = y_hat.add(&xl_hat)?.add(&xm_hat)?;
    let residual = norm(&x.sub(&recon)?);
    let xnorm = norm(x);
    let allowed = tol * xnorm;
    if residual > allowed {
        return Err(Error::NotInSumSpace { residual, allowed });
    }

    let a2 = 1.0 - a1;
    let xl = xl_hat.add(&y_hat.scale(C64::new(a1, 0.0)))?;
    let xm = xm_hat.add(&y_hat.scale(C64::new(a2, 0.0)))?;
    let amp = 1.0 / (1.0 - report.c * report.c).sqrt();
    let (w1, w2) = if report.q_dim == 0 { (0.0, 0.0) } else { (a1, a2) };
    Ok(Decomposition {
        x: x.clone(),
        y_hat,
        xl_hat,
        xm_hat,
        xl,
        xm,
        a1,
        a2,
        c: report.c,
        q_dim: report.q_dim,
        big_a1: w1 + amp,
        big_a2: w2 + amp,
        residual,
    })
}

pub(crate) fn check_nondegenerate(report: &InclinationReport) -> Result<()> {
    if report.containment != subspace::Containment::None {
        return Err(Error::DegenerateInclination {
            c: report.c,
            reason: format!("containment {:?}", report.containment),
        });
    }
    if report.near_degenerate || report.c >= 1.0 - NEAR_DEGENERATE_GAP {
        return Err(Error::DegenerateInclination { c: report.c, reason: "c within 1e-12 of 1".into() });
    }
    Ok(())
}

/// Least-squares split of `r` over the concatenated bases of `A` and `B`
/// (metric least squares, solved in Cholesky coordinates).
pub(crate) fn oblique_split(a: &Subspace, b: &Subspace, r: &Vector) -> Result<(Vector, Vector)> {
    let space: &Arc<HilbertSpace> = a.space();
    let (ka, kb) = (a.dim(), b.dim());
    let mut cat = CMat::zeros(space.dim(), ka + kb);
    cat.columns_mut(0, ka).copy_from(a.basis());
    cat.columns_mut(ka, kb).copy_from(b.basis());
    let lhs = space.to_chol(&cat);
    let rhs = space.gram_factor() * r.coeffs();
    let coef = linalg::lstsq(&lhs, &rhs, 1e-13);
    let ca = coef.rows(0, ka).into_owned();
    let cb = coef.rows(ka, kb).into_owned();
    Ok((a.combine(&ca)?, b.combine(&cb)?))
}

/// One checked inequality `lhs ≤ rhs`.
#[derive(Debug, Clone, Serialize)]
pub struct BoundCheck {
    pub name: &'static str,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub ok: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundsReport {
    pub checks: Vec<BoundCheck>,
    pub all_ok: bool,
}

/// Check the canonical-split bounds and the final component bounds.
pub fn verify_bounds(d: &Decomposition) -> BoundsReport {
    let xn = norm(&d.x);
    let amp = d.amplification();
    let floor = -BOUND_SLACK * xn;
    let mk = |name, lhs: f64, rhs: f64| {
        let slack = rhs - lhs;
        BoundCheck { name, lhs, rhs, slack, ok: slack >= floor }
    };
    let checks = vec![
        mk("y_hat <= x", norm(&d.y_hat), xn),
        mk("xl_hat <= x/sqrt(1-c^2)", norm(&d.xl_hat), amp * xn),
        mk("xm_hat <= x/sqrt(1-c^2)", norm(&d.xm_hat), amp * xn),
        mk("xl <= A1 x", norm(&d.xl), d.big_a1 * xn),
        mk("xm <= A2 x", norm(&d.xm), d.big_a2 * xn),
    ];
    let all_ok = checks.iter().all(|c| c.ok);
    BoundsReport { checks, all_ok }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SumDensity {
    pub dense: bool,
    /// `dim (L + M)^⊥`.
    pub defect: usize,
}

/// Whether `L + M` fills the ambient space.
pub fn sum_dense_check(l: &Subspace, m: &Subspace) -> Result<SumDensity> {
    let s = subspace::sum(l, m)?;
    let defect = subspace::perp(&s)?.dim();
    Ok(SumDensity { dense: defect == 0, defect })
}
