//! Truncated l² fixture with closed-form inclination, decomposition and
//! extension.
//!
//! Ambient space ℝ^{2N} ⊂ ℂ^{2N} with the Euclidean metric, coordinates
//! numbered `1..=2N`:
//!
//! * `L = { v : v_{2n} = 0 }`
//! * `M = { w : w_{2n} = θ_{2n} w_{2n−1} }`
//!
//! so `Q = {0}` and `c(L, M) = 1/√(1 + min θ²)`.

use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{HilbertSpace, Vector};
use crate::linalg::{CMat, CVec, C64};
use crate::subspace::Subspace;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct L2ModelConfig {
    pub n_pairs: usize,
    pub thetas: Vec<f64>,
}

impl L2ModelConfig {
    pub fn new(thetas: Vec<f64>) -> Result<Self> {
        let cfg = Self { n_pairs: thetas.len(), thetas };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_family(n_pairs: usize, family: ThetaFamily) -> Result<Self> {
        Self::new((1..=n_pairs).map(|n| family.theta(n)).collect())
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_pairs == 0 {
            return Err(Error::InvalidConfig("n_pairs must be positive".into()));
        }
        if self.thetas.len() != self.n_pairs {
            return Err(Error::DimensionMismatch { expected: self.n_pairs, found: self.thetas.len() });
        }
        for (index, &value) in self.thetas.iter().enumerate() {
            if value == 0.0 || !value.is_finite() {
                return Err(Error::BadTheta { index, value });
            }
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

    /// `θ = min θ₂ₙ²` over the truncation.
    pub fn theta_min_sq(&self) -> f64 {
        self.thetas.iter().map(|t| t * t).fold(f64::INFINITY, f64::min)
    }

    pub fn ambient_dim(&self) -> usize {
        2 * self.n_pairs
    }
}

/// Parameter families `n ↦ θ₂ₙ` used for sweeps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ThetaFamily {
    /// `θ₂ₙ = 1/n`; degenerates as the truncation grows.
    Reciprocal,
    /// `θ₂ₙ = n`.
    Linear,
    Constant(f64),
}

impl ThetaFamily {
    pub fn theta(&self, n: usize) -> f64 {
        match *self {
            ThetaFamily::Reciprocal => 1.0 / n as f64,
            ThetaFamily::Linear => n as f64,
            ThetaFamily::Constant(c) => c,
        }
    }
}

impl FromStr for ThetaFamily {
    type Err = Error;

    /// Accepts `1/n`, `n`, or a constant such as `1` or `2.5`.
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "1/n" => Ok(ThetaFamily::Reciprocal),
            "n" => Ok(ThetaFamily::Linear),
            other => other
                .parse::<f64>()
                .map(ThetaFamily::Constant)
                .map_err(|_| Error::Parse(format!("unknown theta family '{other}'"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct L2Model {
    pub config: L2ModelConfig,
    pub space: Arc<HilbertSpace>,
    pub l: Subspace,
    pub m: Subspace,
}

pub fn build(config: &L2ModelConfig) -> Result<L2Model> {
    config.validate()?;
    let n = config.n_pairs;
    let space = HilbertSpace::euclidean(2 * n)
        .with_label(format!("l2-truncated-{n}"))
        .shared();
    let mut lb = CMat::zeros(2 * n, n);
    let mut mb = CMat::zeros(2 * n, n);
    for (k, &theta) in config.thetas.iter().enumerate() {
        lb[(2 * k, k)] = C64::new(1.0, 0.0);
        let s = 1.0 / (1.0 + theta * theta).sqrt();
        mb[(2 * k, k)] = C64::new(s, 0.0);
        mb[(2 * k + 1, k)] = C64::new(theta * s, 0.0);
    }
    let l = Subspace::from_orthonormal(&space, lb)?;
    let m = Subspace::from_orthonormal(&space, mb)?;
    Ok(L2Model { config: config.clone(), space, l, m })
}

/// `c = 1/√(1 + θ)`, `θ = min θ₂ₙ²`.
pub fn analytic_inclination(config: &L2ModelConfig) -> f64 {
    1.0 / (1.0 + config.theta_min_sq()).sqrt()
}

/// `1/√(1−c²) = √((θ+1)/θ)`.
pub fn analytic_bound(config: &L2ModelConfig) -> f64 {
    let t = config.theta_min_sq();
    ((t + 1.0) / t).sqrt()
}

/// Closed-form split `u = v + w`, `v ∈ L`, `w ∈ M`:
/// `v₂ₙ₋₁ = u₂ₙ₋₁ − u₂ₙ/θ₂ₙ`, `w₂ₙ₋₁ = u₂ₙ/θ₂ₙ`, `w₂ₙ = u₂ₙ`.
pub fn analytic_decompose(config: &L2ModelConfig, u: &Vector) -> Result<(Vector, Vector)> {
    let dim = config.ambient_dim();
    if u.dim() != dim {
        return Err(Error::DimensionMismatch { expected: dim, found: u.dim() });
    }
    let uc = u.coeffs();
    let mut v = CVec::zeros(dim);
    let mut w = CVec::zeros(dim);
    for (k, &theta) in config.thetas.iter().enumerate() {
        let (odd, even) = (2 * k, 2 * k + 1);
        let ratio = uc[even] / theta;
        v[odd] = uc[odd] - ratio;
        w[odd] = ratio;
        w[even] = uc[even];
    }
    Ok((Vector::new(Arc::clone(u.space()), v)?, Vector::new(Arc::clone(u.space()), w)?))
}

/// Riesz vector of the extension of `f(v) = Σ v₂ₙ₋₁ a₂ₙ₋₁`:
/// `ã₂ₙ₋₁ = a₂ₙ₋₁`, `ã₂ₙ = −a₂ₙ₋₁/θ₂ₙ`. `a` holds the `N` odd-slot values.
pub fn analytic_extend(config: &L2ModelConfig, a: &[f64]) -> Result<CVec> {
    config.validate()?;
    if a.len() != config.n_pairs {
        return Err(Error::DimensionMismatch { expected: config.n_pairs, found: a.len() });
    }
    let mut out = CVec::zeros(config.ambient_dim());
    for (k, (&ak, &theta)) in a.iter().zip(&config.thetas).enumerate() {
        out[2 * k] = C64::new(ak, 0.0);
        out[2 * k + 1] = C64::new(-ak / theta, 0.0);
    }
    Ok(out)
}

/// Riesz vector `(a₁, 0, a₃, 0, …) ∈ L` of the functional with odd-slot
/// values `a`.
pub fn riesz_in_l(config: &L2ModelConfig, a: &[f64]) -> Result<CVec> {
    if a.len() != config.n_pairs {
        return Err(Error::DimensionMismatch { expected: config.n_pairs, found: a.len() });
    }
    let mut out = CVec::zeros(config.ambient_dim());
    for (k, &ak) in a.iter().enumerate() {
        out[2 * k] = C64::new(ak, 0.0);
    }
    Ok(out)
}

/// Members `(N, L_N, M_N)` of a family truncated at each size in `sizes`.
pub fn family_members(family: ThetaFamily, sizes: &[usize]) -> Result<Vec<(f64, Subspace, Subspace)>> {
    sizes
        .iter()
        .map(|&n| {
            let model = build(&L2ModelConfig::from_family(n, family)?)?;
            Ok((n as f64, model.l, model.m))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::subspace::{inclination, intersect, DEFAULT_INTERSECT_TOL};

    fn re(v: &CVec) -> Vec<f64> {
        v.iter().map(|z| z.re).collect()
    }

    #[test]
    fn single_pair_structure() {
        let m = build(&L2ModelConfig::new(vec![1.0]).unwrap()).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert_eq!(re(&m.l.basis().column(0).into_owned()), vec![1.0, 0.0]);
        let mb = re(&m.m.basis().column(0).into_owned());
        assert!((mb[0] - s).abs() < 1e-15 && (mb[1] - s).abs() < 1e-15);
    }

    #[test]
    fn two_pair_m_basis() {
        let m = build(&L2ModelConfig::new(vec![2.0, 3.0]).unwrap()).unwrap();
        let c0 = re(&m.m.basis().column(0).into_owned());
        let c1 = re(&m.m.basis().column(1).into_owned());
        assert!((c0[1] / c0[0] - 2.0).abs() < 1e-14 && c0[2] == 0.0 && c0[3] == 0.0);
        assert!((c1[3] / c1[2] - 3.0).abs() < 1e-14 && c1[0] == 0.0 && c1[1] == 0.0);
        assert_eq!(intersect(&m.l, &m.m, DEFAULT_INTERSECT_TOL).unwrap().dim(), 0);
    }

    #[test]
    fn zero_theta_rejected() {
        assert!(matches!(L2ModelConfig::new(vec![1.0, 0.0]), Err(Error::BadTheta { index: 1, .. })));
        assert!(matches!(L2ModelConfig::new(vec![f64::INFINITY]), Err(Error::BadTheta { index: 0, .. })));
    }

    #[test]
    fn analytic_inclination_values() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!((analytic_inclination(&L2ModelConfig::new(vec![1.0, 1.0]).unwrap()) - s).abs() < 1e-15);
        let c = analytic_inclination(&L2ModelConfig::new(vec![2.0, 3.0]).unwrap());
        assert!((c - 1.0 / 5f64.sqrt()).abs() < 1e-15);
        assert!(analytic_inclination(&L2ModelConfig::new(vec![1e9]).unwrap()) < 1e-8);
    }

    #[test]
    fn engine_matches_formula() {
        for thetas in [vec![1.0], vec![2.0, 3.0], vec![-0.5, 4.0, 0.7]] {
            let cfg = L2ModelConfig::new(thetas).unwrap();
            let m = build(&cfg).unwrap();
            let c = inclination(&m.l, &m.m, DEFAULT_INTERSECT_TOL).unwrap().c;
            assert!((c - analytic_inclination(&cfg)).abs() < 1e-14);
        }
    }

    #[test]
    fn analytic_decompose_examples() {
        let cfg = L2ModelConfig::new(vec![2.0]).unwrap();
        let space = build(&cfg).unwrap().space;
        let u = Vector::from_real(space.clone(), &[1.0, 1.0]).unwrap();
        let (v, w) = analytic_decompose(&cfg, &u).unwrap();
        assert_eq!(re(v.coeffs()), vec![0.5, 0.0]);
        assert_eq!(re(w.coeffs()), vec![0.5, 1.0]);

        let u = Vector::from_real(space, &[3.0, 0.0]).unwrap();
        let (v, w) = analytic_decompose(&cfg, &u).unwrap();
        assert_eq!(re(v.coeffs()), vec![3.0, 0.0]);
        assert_eq!(re(w.coeffs()), vec![0.0, 0.0]);

        let cfg = L2ModelConfig::new(vec![1.0]).unwrap();
        let space = build(&cfg).unwrap().space;
        let u = Vector::from_real(space, &[0.0, 1.0]).unwrap();
        let (v, w) = analytic_decompose(&cfg, &u).unwrap();
        assert_eq!(re(v.coeffs()), vec![-1.0, 0.0]);
        assert_eq!(re(w.coeffs()), vec![1.0, 1.0]);
    }

    #[test]
    fn analytic_extend_examples() {
        let cfg = L2ModelConfig::new(vec![2.0]).unwrap();
        assert_eq!(re(&analytic_extend(&cfg, &[1.0]).unwrap()), vec![1.0, -0.5]);
        assert_eq!(re(&analytic_extend(&cfg, &[0.0]).unwrap()), vec![0.0, -0.0]);

        let cfg = L2ModelConfig::new(vec![1.0, 1.0]).unwrap();
        let a = analytic_extend(&cfg, &[1.0, 1.0]).unwrap();
        assert_eq!(re(&a), vec![1.0, -1.0, 1.0, -1.0]);
        assert!((a.norm() - 2.0).abs() < 1e-15);
        assert!((a.norm() - 2f64.sqrt() * 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn config_formats() {
        let j = L2ModelConfig::from_json(r#"{"n_pairs": 2, "thetas": [2.0, 3.0]}"#).unwrap();
        let t = L2ModelConfig::from_toml("n_pairs = 2\nthetas = [2.0, 3.0]\n").unwrap();
        assert_eq!(j, t);
        assert!(L2ModelConfig::from_json(r#"{"n_pairs": 1, "thetas": [0.0]}"#).is_err());
    }

    #[test]
    fn family_parsing() {
        assert_eq!("1/n".parse::<ThetaFamily>().unwrap(), ThetaFamily::Reciprocal);
        assert_eq!("n".parse::<ThetaFamily>().unwrap(), ThetaFamily::Linear);
        assert_eq!("2".parse::<ThetaFamily>().unwrap(), ThetaFamily::Constant(2.0));
        assert!("x^2".parse::<ThetaFamily>().is_err());
        let cfg = L2ModelConfig::from_family(10, ThetaFamily::Reciprocal).unwrap();
        assert!((analytic_bound(&cfg) - 101f64.sqrt()).abs() < 1e-12);
    }
}
