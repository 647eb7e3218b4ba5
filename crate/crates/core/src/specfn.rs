//! Gamma-based special quantities: sphere and ball volumes, half-integer
//! binomials, flag coefficients, the `I_{n,k}` integrals and Grassmannian
//! volume ratios.
//!
//! Gamma ratios are evaluated in log space and exponentiated at the end, so
//! everything stays finite for dimensions up to a few hundred.

use std::f64::consts::{FRAC_PI_2, LN_2};

use statrs::function::beta::{beta_reg, ln_beta};
pub use statrs::function::gamma::ln_gamma;

use crate::quad::adaptive_simpson;
use crate::{Error, Result};

const LN_PI: f64 = 1.144_729_885_849_400_2;

/// Target for the quadrature fallback of [`i_integral_quadrature`].
pub const SIMPSON_TOL: f64 = 1e-13;

/// `ln vol_k(S^k) = ln(2 π^{(k+1)/2} / Γ((k+1)/2))`.
pub fn ln_sphere_volume(k: usize) -> f64 {
    let h = (k as f64 + 1.0) / 2.0;
    LN_2 + h * LN_PI - ln_gamma(h)
}

/// Volume `O_k` of the unit sphere `S^k ⊂ R^{k+1}`.
pub fn sphere_volume(k: usize) -> f64 {
    ln_sphere_volume(k).exp()
}

/// `ln ω_n`, the log volume of the unit ball in `R^n`.
pub fn ln_ball_volume(n: usize) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let h = n as f64 / 2.0;
    h * LN_PI - ln_gamma(h + 1.0)
}

/// Volume `ω_n` of the unit ball in `R^n`, with `ω_0 = 1`.
pub fn ball_volume(n: usize) -> f64 {
    ln_ball_volume(n).exp()
}

fn ln_half_binom(x: f64, y: f64) -> f64 {
    ln_gamma(x + 1.0) - ln_gamma(y + 1.0) - ln_gamma(x - y + 1.0)
}

/// Analytic binomial `Γ(x+1) / (Γ(y+1) Γ(x-y+1))` for `x > -1`, `-1 < y < x + 1`.
pub fn half_binom(x: f64, y: f64) -> Result<f64> {
    if !(x.is_finite() && y.is_finite()) || x <= -1.0 || y <= -1.0 || y >= x + 1.0 {
        return Err(Error::domain(
            "half_binom",
            format!("need x > -1 and -1 < y < x + 1, got x = {x}, y = {y}"),
        ));
    }
    Ok(ln_half_binom(x, y).exp())
}

/// `ln` of the flag coefficient `√π Γ((n+1)/2) / (Γ((m+1)/2) Γ((n-m+1)/2))`.
pub fn ln_flag_coeff(n: usize, m: usize) -> f64 {
    let (n, m) = (n as f64, m as f64);
    0.5 * LN_PI + ln_gamma((n + 1.0) / 2.0) - ln_gamma((m + 1.0) / 2.0) - ln_gamma((n - m + 1.0) / 2.0)
}

/// Flag coefficient; equals `binom(n, m) / half_binom(n/2, m/2)`.
pub fn flag_coeff(n: usize, m: usize) -> Result<f64> {
    if m > n {
        return Err(Error::domain("flag_coeff", format!("need 0 <= m <= n, got n = {n}, m = {m}")));
    }
    Ok(ln_flag_coeff(n, m).exp())
}

/// Integer binomial as a float, zero outside `0 <= k <= n`.
pub fn binomial(n: i64, k: i64) -> f64 {
    if k < 0 || n < 0 || k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn check_i_args(op: &'static str, n: usize, k: usize, alpha: f64) -> Result<()> {
    if n < 2 || k > n - 2 {
        return Err(Error::domain(op, format!("need n >= 2 and 0 <= k <= n - 2, got n = {n}, k = {k}")));
    }
    if !(0.0..=FRAC_PI_2).contains(&alpha) {
        return Err(Error::domain(op, format!("alpha = {alpha} outside [0, pi/2]")));
    }
    Ok(())
}

/// `I_{n,k}(α) = ∫_0^α cos^k ρ · sin^{n-2-k} ρ dρ`.
///
/// Evaluated as `½ B(sin²α; (n-1-k)/2, (k+1)/2)` with the incomplete beta
/// function. At `α = π/2` the complete beta function is used directly.
pub fn i_integral(n: usize, k: usize, alpha: f64) -> Result<f64> {
    check_i_args("i_integral", n, k, alpha)?;
    if alpha == 0.0 {
        return Ok(0.0);
    }
    let a = (n - 1 - k) as f64 / 2.0;
    let b = (k + 1) as f64 / 2.0;
    let complete = 0.5 * ln_beta(a, b).exp();
    if alpha == FRAC_PI_2 {
        return Ok(complete);
    }
    let s = alpha.sin();
    Ok(complete * beta_reg(a, b, s * s))
}

/// The same integral by adaptive Simpson quadrature of the integrand.
pub fn i_integral_quadrature(n: usize, k: usize, alpha: f64) -> Result<f64> {
    check_i_args("i_integral_quadrature", n, k, alpha)?;
    let (pc, ps) = (k as i32, (n - 2 - k) as i32);
    adaptive_simpson(|r| r.cos().powi(pc) * r.sin().powi(ps), 0.0, alpha, SIMPSON_TOL)
}

/// Volume of the tube of radius `α` around a `k`-dimensional great subsphere
/// of `S^{n-1}`: `O_k · O_{n-2-k} · I_{n,k}(α)`.
pub fn subsphere_tube_volume(n: usize, k: usize, alpha: f64) -> Result<f64> {
    let i = i_integral(n, k, alpha)?;
    Ok(sphere_volume(k) * sphere_volume(n - 2 - k) * i)
}

fn check_gr_args(op: &'static str, n: usize, m: usize) -> Result<()> {
    if n < 3 || m == 0 || m >= n {
        return Err(Error::domain(op, format!("need n >= 3 and 1 <= m <= n - 1, got n = {n}, m = {m}")));
    }
    Ok(())
}

/// `vol Gr_{n-2,m-1} / vol Gr_{n,m} = m(n-m)/n · binom(n/2, m/2) / O_{n-2}`.
pub fn gr_volume_ratio(n: usize, m: usize) -> Result<f64> {
    check_gr_args("gr_volume_ratio", n, m)?;
    let (nf, mf) = (n as f64, m as f64);
    let ln = (mf * (nf - mf) / nf).ln() + ln_half_binom(nf / 2.0, mf / 2.0) - ln_sphere_volume(n - 2);
    Ok(ln.exp())
}

/// `ln vol O(n) = Σ_{i<n} ln O_i`.
pub fn ln_orthogonal_group_volume(n: usize) -> f64 {
    (0..n).map(ln_sphere_volume).sum()
}

/// `ln vol Gr_{n,m} = ln vol O(n) - ln vol O(m) - ln vol O(n-m)`.
pub fn ln_grassmann_volume(n: usize, m: usize) -> f64 {
    ln_orthogonal_group_volume(n) - ln_orthogonal_group_volume(m) - ln_orthogonal_group_volume(n - m)
}

/// The same ratio assembled from the orthogonal-group volume products.
pub fn gr_volume_ratio_product(n: usize, m: usize) -> Result<f64> {
    check_gr_args("gr_volume_ratio_product", n, m)?;
    Ok((ln_grassmann_volume(n - 2, m - 1) - ln_grassmann_volume(n, m)).exp())
}

/// `Γ(num) / Γ(den)` through log-gamma.
pub fn gamma_ratio(num: f64, den: f64) -> f64 {
    (ln_gamma(num) - ln_gamma(den)).exp()
}
