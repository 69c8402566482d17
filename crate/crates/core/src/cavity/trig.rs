//! Exact tensor-product trigonometric calculus on the unit box.
//!
//! A [`TrigTensor`] is a finite sum `Σ c · Π_j φ_j(x_j)` with each
//! `φ_j ∈ {sin(kπx), cos(kπx)}`. Derivatives and L² inner products are
//! evaluated in closed form from 1D overlaps on `(0, 1)`.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Sin,
    Cos,
}

/// One-dimensional mode `sin(kπx)` or `cos(kπx)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(into = "(Kind, u32)", try_from = "(Kind, u32)")]
pub struct Mode {
    pub kind: Kind,
    pub k: u32,
}

impl Mode {
    pub fn sin(k: u32) -> Self {
        assert!(k >= 1, "sin mode needs k >= 1");
        Self { kind: Kind::Sin, k }
    }

    pub fn cos(k: u32) -> Self {
        Self { kind: Kind::Cos, k }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let arg = self.k as f64 * PI * x;
        match self.kind {
            Kind::Sin => arg.sin(),
            Kind::Cos => arg.cos(),
        }
    }

    /// `d/dx` as `(factor, mode)`; `None` when the derivative vanishes.
    pub fn derivative(&self) -> Option<(f64, Mode)> {
        let kp = self.k as f64 * PI;
        match self.kind {
            Kind::Sin => Some((kp, Mode::cos(self.k))),
            Kind::Cos if self.k == 0 => None,
            Kind::Cos => Some((-kp, Mode::sin(self.k))),
        }
    }
}

impl From<Mode> for (Kind, u32) {
    fn from(m: Mode) -> Self {
        (m.kind, m.k)
    }
}

impl TryFrom<(Kind, u32)> for Mode {
    type Error = String;

    fn try_from((kind, k): (Kind, u32)) -> std::result::Result<Self, String> {
        if kind == Kind::Sin && k == 0 {
            return Err("sin mode needs k >= 1".into());
        }
        Ok(Mode { kind, k })
    }
}

/// `∫₀¹ f g dx` in closed form.
pub fn trig_overlap(f: Mode, g: Mode) -> f64 {
    match (f.kind, g.kind) {
        (Kind::Sin, Kind::Sin) => {
            if f.k == g.k {
                0.5
            } else {
                0.0
            }
        }
        (Kind::Cos, Kind::Cos) => match (f.k, g.k) {
            (0, 0) => 1.0,
            (a, b) if a == b => 0.5,
            _ => 0.0,
        },
        (Kind::Sin, Kind::Cos) => sin_cos(f.k, g.k),
        (Kind::Cos, Kind::Sin) => sin_cos(g.k, f.k),
    }
}

/// `∫₀¹ sin(kπx) cos(mπx) dx = k(1 − (−1)^{k+m}) / (π(k² − m²))`, zero for `k = m`.
fn sin_cos(k: u32, m: u32) -> f64 {
    if k == m || (k + m).is_multiple_of(2) {
        return 0.0;
    }
    let (k, m) = (k as f64, m as f64);
    2.0 * k / (PI * (k * k - m * m))
}

/// Real linear combination of tensor-product modes in `d` variables.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TrigTensor {
    d: usize,
    terms: BTreeMap<Vec<Mode>, f64>,
}

impl TrigTensor {
    pub fn zero(d: usize) -> Self {
        Self { d, terms: BTreeMap::new() }
    }

    pub fn monomial(modes: Vec<Mode>, coeff: f64) -> Self {
        let mut t = Self::zero(modes.len());
        t.add_term(modes, coeff);
        t
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<Mode>, f64)> {
        self.terms.iter().map(|(m, &c)| (m, c))
    }

    pub fn coeff(&self, modes: &[Mode]) -> f64 {
        self.terms.get(modes).copied().unwrap_or(0.0)
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.terms.values().fold(0.0_f64, |a, c| a.max(c.abs()))
    }

    /// Accumulate `coeff · Π modes`; entries that cancel to exactly zero are
    /// removed.
    pub fn add_term(&mut self, modes: Vec<Mode>, coeff: f64) {
        assert_eq!(modes.len(), self.d, "mode tuple length must equal the dimension");
        if coeff == 0.0 {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(modes) {
            Entry::Vacant(v) => {
                v.insert(coeff);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += coeff;
                if *o.get() == 0.0 {
                    o.remove();
                }
            }
        }
    }

    pub fn scaled(&self, a: f64) -> Self {
        let mut out = Self::zero(self.d);
        for (m, c) in self.terms() {
            out.add_term(m.clone(), a * c);
        }
        out
    }

    pub fn plus(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let mut out = self.clone();
        for (m, c) in other.terms() {
            out.add_term(m.clone(), c);
        }
        Ok(out)
    }

    pub fn minus(&self, other: &Self) -> Result<Self> {
        self.plus(&other.scaled(-1.0))
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.d != other.d {
            return Err(Error::DimensionMismatch { expected: self.d, found: other.d });
        }
        Ok(())
    }

    /// Exact partial derivative along `axis`.
    pub fn differentiate(&self, axis: usize) -> Result<Self> {
        if axis >= self.d {
            return Err(Error::DimensionMismatch { expected: self.d, found: axis + 1 });
        }
        let mut out = Self::zero(self.d);
        for (modes, c) in self.terms() {
            if let Some((factor, dm)) = modes[axis].derivative() {
                let mut m = modes.clone();
                m[axis] = dm;
                out.add_term(m, c * factor);
            }
        }
        Ok(out)
    }

    /// `∫_{(0,1)^d} self · other dx`.
    pub fn l2_inner(&self, other: &Self) -> Result<f64> {
        self.check_dim(other)?;
        let mut acc = 0.0;
        for (ma, ca) in self.terms() {
            for (mb, cb) in other.terms() {
                let mut p = ca * cb;
                for (fa, fb) in ma.iter().zip(mb) {
                    p *= trig_overlap(*fa, *fb);
                    if p == 0.0 {
                        break;
                    }
                }
                acc += p;
            }
        }
        Ok(acc)
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        assert_eq!(x.len(), self.d);
        self.terms()
            .map(|(modes, c)| c * modes.iter().zip(x).map(|(m, &xi)| m.eval(xi)).product::<f64>())
            .sum()
    }
}

/// Vector field with one [`TrigTensor`] per axis.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigField {
    components: Vec<TrigTensor>,
}

impl TrigField {
    pub fn zero(d: usize) -> Self {
        Self { components: vec![TrigTensor::zero(d); d] }
    }

    pub fn new(components: Vec<TrigTensor>) -> Result<Self> {
        let d = components.len();
        if let Some(bad) = components.iter().find(|c| c.dim() != d) {
            return Err(Error::DimensionMismatch { expected: d, found: bad.dim() });
        }
        Ok(Self { components })
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[TrigTensor] {
        &self.components
    }

    pub fn component(&self, j: usize) -> &TrigTensor {
        &self.components[j]
    }

    pub(crate) fn component_mut(&mut self, j: usize) -> &mut TrigTensor {
        &mut self.components[j]
    }

    pub fn plus(&self, other: &Self) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: other.dim() });
        }
        let components = self
            .components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| a.plus(b))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { components })
    }

    pub fn minus(&self, other: &Self) -> Result<Self> {
        self.plus(&other.scaled(-1.0))
    }

    pub fn scaled(&self, a: f64) -> Self {
        Self { components: self.components.iter().map(|c| c.scaled(a)).collect() }
    }

    pub fn l2_inner(&self, other: &Self) -> Result<f64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: other.dim() });
        }
        self.components
            .iter()
            .zip(&other.components)
            .try_fold(0.0, |acc, (a, b)| Ok(acc + a.l2_inner(b)?))
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.components.iter().fold(0.0_f64, |a, c| a.max(c.max_abs_coeff()))
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(|c| c.is_empty())
    }

    pub fn eval(&self, x: &[f64]) -> Vec<f64> {
        self.components.iter().map(|c| c.eval(x)).collect()
    }
}

/// Curl of a field: scalar in 2D, vector in 3D.
#[derive(Debug, Clone, PartialEq)]
pub enum Curl {
    Scalar(TrigTensor),
    Vector(TrigField),
}

impl Curl {
    pub fn l2_inner(&self, other: &Curl) -> Result<f64> {
        match (self, other) {
            (Curl::Scalar(a), Curl::Scalar(b)) => a.l2_inner(b),
            (Curl::Vector(a), Curl::Vector(b)) => a.l2_inner(b),
            _ => Err(Error::DimensionMismatch { expected: 1, found: 3 }),
        }
    }

    pub fn max_abs_coeff(&self) -> f64 {
        match self {
            Curl::Scalar(t) => t.max_abs_coeff(),
            Curl::Vector(f) => f.max_abs_coeff(),
        }
    }
}

pub fn apply_grad(phi: &TrigTensor) -> TrigField {
    let components = (0..phi.dim())
        .map(|axis| phi.differentiate(axis).expect("axis within dimension"))
        .collect();
    TrigField { components }
}

pub fn apply_div(u: &TrigField) -> Result<TrigTensor> {
    let d = u.dim();
    let mut out = TrigTensor::zero(d);
    for (j, c) in u.components.iter().enumerate() {
        out = out.plus(&c.differentiate(j)?)?;
    }
    Ok(out)
}

pub fn apply_rot(u: &TrigField) -> Result<Curl> {
    let c = &u.components;
    match u.dim() {
        2 => Ok(Curl::Scalar(c[1].differentiate(0)?.minus(&c[0].differentiate(1)?)?)),
        3 => {
            let x = c[2].differentiate(1)?.minus(&c[1].differentiate(2)?)?;
            let y = c[0].differentiate(2)?.minus(&c[2].differentiate(0)?)?;
            let z = c[1].differentiate(0)?.minus(&c[0].differentiate(1)?)?;
            Ok(Curl::Vector(TrigField { components: vec![x, y, z] }))
        }
        d => Err(Error::InvalidConfig(format!("rot is defined for d = 2 or 3, got {d}"))),
    }
}

/// `Σ_j ∫ |∇u_j|²`, the H¹ seminorm squared.
pub fn grad_energy(u: &TrigField) -> Result<f64> {
    let mut acc = 0.0;
    for c in &u.components {
        let g = apply_grad(c);
        acc += g.l2_inner(&g)?;
    }
    Ok(acc)
}

#[derive(Serialize, Deserialize)]
struct TermRepr {
    modes: Vec<Mode>,
    coeff: f64,
}

#[derive(Serialize, Deserialize)]
struct FieldRepr {
    d: usize,
    components: Vec<Vec<TermRepr>>,
}

impl Serialize for TrigField {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let repr = FieldRepr {
            d: self.dim(),
            components: self
                .components
                .iter()
                .map(|c| c.terms().map(|(m, coeff)| TermRepr { modes: m.clone(), coeff }).collect())
                .collect(),
        };
        repr.serialize(s)
    }
}

impl<'de> Deserialize<'de> for TrigField {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = FieldRepr::deserialize(de)?;
        if repr.components.len() != repr.d {
            return Err(D::Error::custom(format!(
                "expected {} components, found {}",
                repr.d,
                repr.components.len()
            )));
        }
        let mut field = TrigField::zero(repr.d);
        for (j, terms) in repr.components.into_iter().enumerate() {
            for t in terms {
                if t.modes.len() != repr.d {
                    return Err(D::Error::custom("mode tuple length differs from d"));
                }
                field.components[j].add_term(t.modes, t.coeff);
            }
        }
        Ok(field)
    }
}

impl TrigField {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("field serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }
}
