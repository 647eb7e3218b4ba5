use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::{iv_circular, iv_dual, iv_lorentz, iv_mc_simplicial, iv_orthant, iv_product, IVVector};
use crate::parallel::Sampling;
use crate::{Error, Result};

/// Symbolic description of a closed convex cone.
///
/// Serialized as an externally tagged tree, e.g.
/// `{"product":[{"lorentz":4},{"orthant":3}]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConeSpec {
    Orthant(usize),
    Circular { n: usize, beta: f64 },
    Lorentz(usize),
    Product(Box<ConeSpec>, Box<ConeSpec>),
    Dual(Box<ConeSpec>),
    /// Cone spanned by `n` linearly independent generators of `R^n`.
    Simplicial(Vec<Vec<f64>>),
}

impl ConeSpec {
    pub fn product(a: ConeSpec, b: ConeSpec) -> Self {
        ConeSpec::Product(Box::new(a), Box::new(b))
    }

    pub fn dual(a: ConeSpec) -> Self {
        ConeSpec::Dual(Box::new(a))
    }

    pub fn ambient_dim(&self) -> usize {
        match self {
            ConeSpec::Orthant(n) | ConeSpec::Lorentz(n) | ConeSpec::Circular { n, .. } => *n,
            ConeSpec::Product(a, b) => a.ambient_dim() + b.ambient_dim(),
            ConeSpec::Dual(a) => a.ambient_dim(),
            ConeSpec::Simplicial(g) => g.len(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ConeSpec::Orthant(n) => {
                if *n == 0 {
                    return Err(Error::InvalidCone("orthant needs n >= 1".into()));
                }
            }
            ConeSpec::Lorentz(n) => {
                if *n < 2 {
                    return Err(Error::InvalidCone(format!("lorentz cone needs n >= 2, got {n}")));
                }
            }
            ConeSpec::Circular { n, beta } => {
                if *n < 2 {
                    return Err(Error::InvalidCone(format!("circular cone needs n >= 2, got {n}")));
                }
                if !(*beta > 0.0 && *beta < FRAC_PI_2) {
                    return Err(Error::InvalidCone(format!("circular cone needs beta in (0, pi/2), got {beta}")));
                }
            }
            ConeSpec::Product(a, b) => {
                a.validate()?;
                b.validate()?;
            }
            ConeSpec::Dual(a) => a.validate()?,
            ConeSpec::Simplicial(g) => validate_generators(g)?,
        }
        Ok(())
    }

    /// Whether the cone equals its dual. Products of self-dual cones are
    /// self-dual; a circular cone is only for `β = π/4`.
    pub fn is_self_dual(&self) -> bool {
        match self {
            ConeSpec::Orthant(_) | ConeSpec::Lorentz(_) => true,
            ConeSpec::Circular { beta, .. } => (beta - FRAC_PI_4).abs() < 1e-15,
            ConeSpec::Product(a, b) => a.is_self_dual() && b.is_self_dual(),
            ConeSpec::Dual(a) => a.is_self_dual(),
            ConeSpec::Simplicial(_) => false,
        }
    }

    /// True when the intrinsic volumes follow without sampling.
    pub fn has_closed_form(&self) -> bool {
        match self {
            ConeSpec::Simplicial(_) => false,
            ConeSpec::Product(a, b) => a.has_closed_form() && b.has_closed_form(),
            ConeSpec::Dual(a) => a.has_closed_form(),
            _ => true,
        }
    }

    /// Intrinsic volumes from closed forms where available. Simplicial
    /// leaves use `mc` and contribute their sample means.
    pub fn intrinsic_volumes(&self, mc: &Sampling) -> Result<IVVector> {
        self.validate()?;
        self.volumes(mc)
    }

    fn volumes(&self, mc: &Sampling) -> Result<IVVector> {
        match self {
            ConeSpec::Orthant(n) => iv_orthant(*n),
            ConeSpec::Lorentz(n) => iv_lorentz(*n),
            ConeSpec::Circular { n, beta } => iv_circular(*n, *beta),
            ConeSpec::Product(a, b) => Ok(iv_product(&a.volumes(mc)?, &b.volumes(mc)?)),
            ConeSpec::Dual(a) => Ok(iv_dual(&a.volumes(mc)?)),
            ConeSpec::Simplicial(g) => {
                let est = iv_mc_simplicial(g, mc)?;
                Ok(IVVector { n: g.len(), v: est.estimates.iter().map(|e| e.mean).collect() })
            }
        }
    }
}

pub(super) fn validate_generators(g: &[Vec<f64>]) -> Result<()> {
    let n = g.len();
    if n == 0 {
        return Err(Error::InvalidCone("simplicial cone needs at least one generator".into()));
    }
    if let Some(bad) = g.iter().find(|v| v.len() != n) {
        return Err(Error::InvalidCone(format!("{n} generators must live in R^{n}, found one of length {}", bad.len())));
    }
    if g.iter().flatten().any(|x| !x.is_finite()) {
        return Err(Error::InvalidCone("generators must be finite".into()));
    }
    let m = DMatrix::from_fn(n, n, |i, j| g[j][i]);
    let sv = m.singular_values();
    let max = sv.max();
    let min = sv.min();
    if !(max > 0.0) || min <= 1e-10 * max {
        return Err(Error::InvalidCone("generators are linearly dependent".into()));
    }
    Ok(())
}
