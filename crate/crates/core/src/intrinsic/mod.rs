//! Intrinsic-volume vectors of closed convex cones.
//!
//! Closed forms cover orthants and circular cones (including the Lorentz
//! cone); products and polars follow from convolution and reversal.
//! Simplicial cones are handled by a Monte Carlo face-frequency estimator
//! built on nonnegative least squares.

mod cone;
pub mod nnls;
mod simplicial;

use std::f64::consts::FRAC_PI_4;

use serde::{Deserialize, Serialize};

use crate::quad::adaptive_simpson;
use crate::specfn::{binomial, half_binom, sphere_volume};
use crate::{Error, Result};

pub use cone::ConeSpec;
pub use simplicial::{iv_mc_simplicial, FaceFrequencies, FACE_THRESHOLD};

/// Tolerance on `Σ V_j = 1` and the other linear identities.
pub const SUM_TOL: f64 = 1e-9;

const CAP_QUAD_TOL: f64 = 1e-13;

/// Intrinsic volumes `(V_0, …, V_n)` of a cone in `R^n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IVVector {
    pub n: usize,
    pub v: Vec<f64>,
}

impl IVVector {
    /// Validates nonnegativity and `Σ v = 1`.
    pub fn new(v: Vec<f64>) -> Result<Self> {
        if v.is_empty() {
            return Err(Error::Invariant("length: need at least one entry".into()));
        }
        if let Some((j, x)) = v.iter().enumerate().find(|(_, x)| !x.is_finite() || **x < -1e-15) {
            return Err(Error::Invariant(format!("nonnegativity: V_{j} = {x}")));
        }
        let sum: f64 = v.iter().sum();
        if (sum - 1.0).abs() > SUM_TOL {
            return Err(Error::Invariant(format!("normalization: sum = {sum}")));
        }
        Ok(IVVector { n: v.len() - 1, v })
    }

    /// The zero-dimensional cone `{0}` with `V_0 = 1`; neutral for products.
    pub fn point() -> Self {
        IVVector { n: 0, v: vec![1.0] }
    }

    pub fn get(&self, j: usize) -> f64 {
        self.v[j]
    }

    pub fn sum(&self) -> f64 {
        self.v.iter().sum()
    }

    /// `(Σ_{j even} V_j, Σ_{j odd} V_j)`.
    pub fn parity_sums(&self) -> (f64, f64) {
        self.v.iter().enumerate().fold((0.0, 0.0), |(e, o), (j, x)| if j % 2 == 0 { (e + x, o) } else { (e, o + x) })
    }

    /// Checks the identities that hold for regular cones: each entry at most
    /// 1/2 and both parity sums equal to 1/2.
    pub fn check_regular(&self) -> Result<()> {
        if let Some((j, x)) = self.v.iter().enumerate().find(|(_, x)| **x > 0.5 + SUM_TOL) {
            return Err(Error::Invariant(format!("V_j <= 1/2: V_{j} = {x}")));
        }
        let (even, odd) = self.parity_sums();
        if (even - 0.5).abs() > SUM_TOL || (odd - 0.5).abs() > SUM_TOL {
            return Err(Error::Invariant(format!("parity sums: even = {even}, odd = {odd}")));
        }
        Ok(())
    }
}

/// `V_j(R^n_+) = binom(n, j) 2^{-n}`.
pub fn iv_orthant(n: usize) -> Result<IVVector> {
    if n == 0 {
        return Err(Error::domain("iv_orthant", "need n >= 1"));
    }
    let scale = 0.5f64.powi(n as i32);
    let v = (0..=n).map(|j| binomial(n as i64, j as i64) * scale).collect();
    IVVector::new(v)
}

/// Normalized volume of a spherical cap of angular radius `r` in `S^{n-1}`.
fn cap_fraction(n: usize, r: f64) -> Result<f64> {
    let p = (n - 2) as i32;
    let integral = adaptive_simpson(|x| x.sin().powi(p), 0.0, r, CAP_QUAD_TOL)?;
    Ok(sphere_volume(n - 2) / sphere_volume(n - 1) * integral)
}

/// Intrinsic volumes of the circular cone of half-angle `beta` in `R^n`.
///
/// For `1 <= j <= n-1`,
/// `V_j = binom((n-2)/2, (j-1)/2) sin^{j-1}β cos^{n-j-1}β / 2`; `V_n` is the
/// normalized volume of the cap of radius `β` and `V_0` that of the polar cap
/// of radius `π/2 - β`, both by quadrature.
pub fn iv_circular(n: usize, beta: f64) -> Result<IVVector> {
    if n < 2 {
        return Err(Error::domain("iv_circular", format!("need n >= 2, got {n}")));
    }
    if !(beta > 0.0 && beta < std::f64::consts::FRAC_PI_2) {
        return Err(Error::domain("iv_circular", format!("beta = {beta} outside (0, pi/2)")));
    }
    let (s, c) = beta.sin_cos();
    let h = (n as f64 - 2.0) / 2.0;
    let mut v = vec![0.0; n + 1];
    for (j, slot) in v.iter_mut().enumerate().take(n).skip(1) {
        let hb = half_binom(h, (j as f64 - 1.0) / 2.0)?;
        *slot = hb * s.powi(j as i32 - 1) * c.powi((n - j) as i32 - 1) / 2.0;
    }
    v[n] = cap_fraction(n, beta)?;
    v[0] = cap_fraction(n, std::f64::consts::FRAC_PI_2 - beta)?;
    IVVector::new(v)
}

/// Intrinsic volumes `f(n)` of the Lorentz cone (half-angle `π/4`).
pub fn iv_lorentz(n: usize) -> Result<IVVector> {
    iv_circular(n, FRAC_PI_4)
}

/// Closed form `f_j(n) = binom((n-2)/2, (j-1)/2) 2^{-n/2}` for `1 <= j <= n-1`.
pub fn lorentz_closed_form(n: usize, j: usize) -> Result<f64> {
    if n < 2 || j == 0 || j >= n {
        return Err(Error::domain("lorentz_closed_form", format!("need 1 <= j <= n - 1, got n = {n}, j = {j}")));
    }
    Ok(half_binom((n as f64 - 2.0) / 2.0, (j as f64 - 1.0) / 2.0)? * 2f64.powf(-(n as f64) / 2.0))
}

/// `V_j(C_1 × C_2) = Σ_i V_i(C_1) V_{j-i}(C_2)`.
pub fn iv_product(a: &IVVector, b: &IVVector) -> IVVector {
    let mut v = vec![0.0; a.n + b.n + 1];
    for (i, x) in a.v.iter().enumerate() {
        for (j, y) in b.v.iter().enumerate() {
            v[i + j] += x * y;
        }
    }
    IVVector { n: a.n + b.n, v }
}

/// Intrinsic volumes of the polar cone: `V_j(C°) = V_{n-j}(C)`.
pub fn iv_dual(a: &IVVector) -> IVVector {
    IVVector { n: a.n, v: a.v.iter().rev().copied().collect() }
}

fn lorentz_ratios(a: &IVVector) -> Result<Vec<f64>> {
    if a.n < 2 {
        return Err(Error::domain("excess", format!("need ambient dimension >= 2, got {}", a.n)));
    }
    let f = iv_lorentz(a.n)?;
    Ok(a.v.iter().zip(&f.v).map(|(x, y)| x / y).collect())
}

/// Excess over the Lorentz cone, `min_j V_j(C) / f_j(n)`.
pub fn excess(a: &IVVector) -> Result<f64> {
    Ok(lorentz_ratios(a)?.into_iter().fold(f64::INFINITY, f64::min))
}

/// `max_j V_j(C) / f_j(n)`: the least `e` with `V_j(C) <= e f_j(n)` for all `j`.
pub fn lorentz_domination(a: &IVVector) -> Result<f64> {
    Ok(lorentz_ratios(a)?.into_iter().fold(0.0, f64::max))
}

/// Outcome of a log-concavity check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LogConcavity {
    pub holds: bool,
    pub first_violation: Option<usize>,
}

/// Checks `V_j^2 >= V_{j-1} V_{j+1} - 1e-12` for `1 <= j <= n-1`.
pub fn check_log_concavity(a: &IVVector) -> LogConcavity {
    let first_violation = (1..a.n).find(|&j| a.v[j] * a.v[j] < a.v[j - 1] * a.v[j + 1] - 1e-12);
    LogConcavity { holds: first_violation.is_none(), first_violation }
}

/// Outcome of the Lorentz convolution check `f(n1) * f(n2) <= 2 f(n1 + n2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConvolutionCheck {
    pub n1: usize,
    pub n2: usize,
    pub holds: bool,
    pub max_ratio: f64,
    pub argmax: usize,
}

fn convolution_ratio(f1: &IVVector, f2: &IVVector, f12: &IVVector) -> ConvolutionCheck {
    let conv = iv_product(f1, f2);
    let (argmax, max_ratio) = conv
        .v
        .iter()
        .zip(&f12.v)
        .map(|(c, f)| c / (2.0 * f))
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |best, (j, r)| if r > best.1 { (j, r) } else { best });
    ConvolutionCheck { n1: f1.n, n2: f2.n, holds: max_ratio <= 1.0 + SUM_TOL, max_ratio, argmax }
}

pub fn check_convolution_conjecture(n1: usize, n2: usize) -> Result<ConvolutionCheck> {
    if n1 < 2 || n2 < 2 {
        return Err(Error::domain("check_convolution_conjecture", format!("need n1, n2 >= 2, got ({n1}, {n2})")));
    }
    Ok(convolution_ratio(&iv_lorentz(n1)?, &iv_lorentz(n2)?, &iv_lorentz(n1 + n2)?))
}

/// Runs the convolution check for every `2 <= n1, n2 <= max`, reusing one
/// table of Lorentz vectors.
pub fn convolution_sweep(max: usize) -> Result<Vec<ConvolutionCheck>> {
    let table = (0..=2 * max).map(|n| if n >= 2 { iv_lorentz(n).map(Some) } else { Ok(None) }).collect::<Result<Vec<_>>>()?;
    let f = |n: usize| table[n].as_ref().expect("n >= 2");
    let mut out = Vec::new();
    for n1 in 2..=max {
        for n2 in 2..=max {
            out.push(convolution_ratio(f(n1), f(n2), f(n1 + n2)));
        }
    }
    Ok(out)
}

/// The half-angle grid `0.1, 0.2, …, 1.4, 1.47` used by the invariant sweeps.
pub fn beta_grid() -> Vec<f64> {
    let mut g: Vec<f64> = (1..=14).map(|i| i as f64 / 10.0).collect();
    g.push(1.47);
    g
}
