//! Tube-volume bounds around the ill-posed set of the Grassmannian, the
//! resulting tail and expectation bounds for the Grassmann condition
//! number, and numerical checks of the estimates used along the way.
//!
//! A subspace has condition at least `t` exactly when it lies in the tube of
//! radius `α = arcsin(1/t)`; see [`alpha_from_t`].

use serde::Serialize;

use crate::coeffs::{d_matrix, rational_to_f64};
use crate::intrinsic::{iv_circular, IVVector};
use crate::quad::adaptive_simpson;
use crate::specfn::{binomial, flag_coeff, half_binom, i_integral, ln_gamma, sphere_volume, SIMPSON_TOL};
use crate::{Error, Result};

use std::f64::consts::FRAC_PI_2;

/// Upper bounds on the normalized volume of the primal tube and of the
/// union of primal and dual tubes. Raw values; they may exceed 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TubeBoundResult {
    pub n: usize,
    pub m: usize,
    pub alpha: f64,
    pub primal_bound: f64,
    pub full_bound: f64,
}

fn check_tube_args(op: &'static str, n: usize, m: usize, alpha: f64) -> Result<()> {
    if n < 2 || m == 0 || m >= n {
        return Err(Error::domain(op, format!("need 1 <= m <= n - 1, got n = {n}, m = {m}")));
    }
    if !(0.0..=FRAC_PI_2).contains(&alpha) {
        return Err(Error::domain(op, format!("alpha = {alpha} outside [0, pi/2]")));
    }
    Ok(())
}

/// `(2m(n-m)/n) binom(n/2, m/2) Σ_j V_{j+1} flag(n-2, j) Σ_i d_ij^{nm} I_{n,i}(α)`,
/// with `n` the ambient dimension of `iv`.
pub fn tube_bound(iv: &IVVector, m: usize, alpha: f64) -> Result<TubeBoundResult> {
    let n = iv.n;
    check_tube_args("tube_bound", n, m, alpha)?;
    let d = d_matrix(n, m)?;
    let ints = (0..=n - 2).map(|i| i_integral(n, i, alpha)).collect::<Result<Vec<_>>>()?;
    let mut sum = 0.0;
    for j in 0..=n - 2 {
        let inner: f64 = (0..=n - 2).map(|i| rational_to_f64(d.get(i, j)) * ints[i]).sum();
        sum += iv.v[j + 1] * flag_coeff(n - 2, j)? * inner;
    }
    let (nf, mf) = (n as f64, m as f64);
    let primal = 2.0 * mf * (nf - mf) / nf * half_binom(nf / 2.0, mf / 2.0)? * sum;
    Ok(TubeBoundResult { n, m, alpha, primal_bound: primal, full_bound: 2.0 * primal })
}

/// The full bound rewritten as a Gamma-function double sum over `(i, k)`;
/// an independent evaluation of [`tube_bound`]'s `full_bound`.
pub fn tube_bound_alt(iv: &IVVector, m: usize, alpha: f64) -> Result<f64> {
    let n = iv.n;
    check_tube_args("tube_bound_alt", n, m, alpha)?;
    let (ni, mi) = (n as i64, m as i64);
    let (nf, mf) = (n as f64, m as f64);
    let mut total = 0.0;
    for i in 0..=ni - 2 {
        let int = i_integral(n, (ni - 2 - i) as usize, alpha)?;
        for k in 0..mi {
            if i - k < 0 || i - k > ni - mi - 1 {
                continue;
            }
            let c = (mi + i - 2 * k) as f64;
            let ln_g = ln_gamma((c + 1.0) / 2.0) - ln_gamma(mf / 2.0) + ln_gamma((nf - c + 1.0) / 2.0)
                - ln_gamma((nf - mf) / 2.0);
            let b = binomial(mi - 1, k) * binomial(ni - mi - 1, i - k);
            total += iv.v[(ni - mi - i + 2 * k) as usize] * ln_g.exp() * b * int;
        }
    }
    Ok(8.0 * total)
}

/// `arcsin(1/t)`: the tube radius matching condition threshold `t >= 1`.
pub fn alpha_from_t(t: f64) -> Result<f64> {
    if !(t >= 1.0) {
        return Err(Error::domain("alpha_from_t", format!("need t >= 1, got {t}")));
    }
    Ok((1.0 / t).asin())
}

pub fn t_from_alpha(alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha <= FRAC_PI_2) {
        return Err(Error::domain("t_from_alpha", format!("alpha = {alpha} outside (0, pi/2]")));
    }
    Ok(1.0 / alpha.sin())
}

/// Volume of a spherical cap of radius `r` in `S^{n-1}`, by quadrature of
/// `O_{n-2} sin^{n-2}`.
pub fn cap_volume(n: usize, r: f64) -> Result<f64> {
    if n < 2 {
        return Err(Error::domain("cap_volume", format!("need n >= 2, got {n}")));
    }
    let p = (n - 2) as i32;
    Ok(sphere_volume(n - 2) * adaptive_simpson(|x| x.sin().powi(p), 0.0, r, SIMPSON_TOL)?)
}

/// Weyl's tube formula for a cap `K = B(z, β)` of `S^{n-1}`:
/// `vol T(K, α) = vol K + Σ_j V_{j+1}(C) O_j O_{n-2-j} I_{n,j}(α)`, with `C`
/// the circular cone over `K`.
pub fn weyl_tube_volume(n: usize, beta: f64, alpha: f64) -> Result<f64> {
    if !(0.0..=FRAC_PI_2).contains(&alpha) {
        return Err(Error::domain("weyl_tube_volume", format!("alpha = {alpha} outside [0, pi/2]")));
    }
    let v = iv_circular(n, beta)?;
    let mut vol = v.v[n] * sphere_volume(n - 1);
    for j in 0..=n - 2 {
        vol += v.v[j + 1] * sphere_volume(j) * sphere_volume(n - 2 - j) * i_integral(n, j, alpha)?;
    }
    Ok(vol)
}

/// A tail bound `P[C(W) >= t] <= bound`, flagged with whether `t` lies in
/// the range where the bound is proved.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailBound {
    pub t: f64,
    pub bound: f64,
    pub valid: bool,
}

fn check_tail_args(op: &'static str, n: usize, m: usize, t: f64) -> Result<()> {
    if m == 0 || m >= n {
        return Err(Error::domain(op, format!("need 1 <= m <= n - 1, got n = {n}, m = {m}")));
    }
    if !(t > 1.0) || !t.is_finite() {
        return Err(Error::domain(op, format!("need finite t > 1, got {t}")));
    }
    Ok(())
}

/// `6 sqrt(m(n-m)) / t`, proved for `t > n^{3/2}`.
pub fn tail_bound_general(n: usize, m: usize, t: f64) -> Result<TailBound> {
    if n < 3 {
        return Err(Error::domain("tail_bound_general", format!("need n >= 3, got {n}")));
    }
    check_tail_args("tail_bound_general", n, m, t)?;
    let bound = 6.0 * ((m * (n - m)) as f64).sqrt() / t;
    Ok(TailBound { t, bound, valid: t > (n as f64).powf(1.5) })
}

/// `20 e sqrt(m) / t` for a self-dual cone with excess `e`, proved for
/// `t > m >= 8`.
pub fn tail_bound_selfdual(n: usize, m: usize, t: f64, e: f64) -> Result<TailBound> {
    check_tail_args("tail_bound_selfdual", n, m, t)?;
    if !(e >= 0.0) || !e.is_finite() {
        return Err(Error::domain("tail_bound_selfdual", format!("excess must be finite and nonnegative, got {e}")));
    }
    let bound = 20.0 * e * (m as f64).sqrt() / t;
    Ok(TailBound { t, bound, valid: m >= 8 && t > m as f64 })
}

/// `1.5 ln n + 1.5`, bounding `E[ln C(W)]` for `n >= 3`.
pub fn expectation_bound_general(n: f64) -> Result<f64> {
    if !(n >= 3.0) {
        return Err(Error::domain("expectation_bound_general", format!("need n >= 3, got {n}")));
    }
    Ok(1.5 * n.ln() + 1.5)
}

/// `ln m + max(ln e, 0) + 3` for self-dual cones with `m >= 8`.
pub fn expectation_bound_selfdual(m: f64, e: f64) -> Result<f64> {
    if !(m >= 1.0) || !(e > 0.0) {
        return Err(Error::domain("expectation_bound_selfdual", format!("need m >= 1 and e > 0, got m = {m}, e = {e}")));
    }
    Ok(m.ln() + e.ln().max(0.0) + 3.0)
}

fn ln_g(m: usize, n: usize) -> f64 {
    let (nf, mf) = (n as f64, m as f64);
    ln_gamma(nf / 2.0) + nf / mf - ln_gamma(mf / 2.0) - ln_gamma((nf - mf) / 2.0) - nf / 2.0 * std::f64::consts::LN_2
}

/// `g_m(n) = Γ(n/2) e^{n/m} / (Γ(m/2) Γ((n-m)/2) 2^{n/2})`.
pub fn g_m(m: usize, n: usize) -> Result<f64> {
    if n < 2 || m == 0 || m >= n {
        return Err(Error::domain("g_m", format!("need n >= 2 and 1 <= m <= n - 1, got n = {n}, m = {m}")));
    }
    Ok(ln_g(m, n).exp())
}

/// Properties of `n ↦ g_m(n)` on a finite window.
#[derive(Debug, Clone, Serialize)]
pub struct GReport {
    pub m: usize,
    /// Largest `n` inspected.
    pub n_max: usize,
    /// First `n >= m + 2` with `g(n)^2 < g(n-1) g(n+1) (1 - 1e-9)`.
    pub log_concavity_failure: Option<usize>,
    pub argmax: usize,
    pub max_value: f64,
    /// `argmax ∈ {2m+5, 2m+6, 2m+7}`; claimed for `m >= 8`.
    pub argmax_in_window: bool,
    /// `max_n g_m(n) < 2.5 sqrt(m)`; claimed for `m >= 8`.
    pub below_bound: bool,
}

impl GReport {
    /// Whether every property claimed for this `m` holds.
    pub fn holds(&self) -> bool {
        self.log_concavity_failure.is_none() && (self.m < 8 || (self.argmax_in_window && self.below_bound))
    }
}

/// Checks `g_m` for `m < n <= n_max`.
pub fn g_properties(m: usize, n_max: usize) -> Result<GReport> {
    if m == 0 || n_max < m + 2 {
        return Err(Error::domain("g_properties", format!("need m >= 1 and n_max >= m + 2, got m = {m}, n_max = {n_max}")));
    }
    let slack = (1.0f64 - 1e-9).ln();
    let log_concavity_failure =
        (m + 2..n_max).find(|&n| 2.0 * ln_g(m, n) < ln_g(m, n - 1) + ln_g(m, n + 1) + slack);
    let (argmax, ln_max) = (m + 1..=n_max)
        .map(|n| (n, ln_g(m, n)))
        .fold((0, f64::NEG_INFINITY), |best, cur| if cur.1 > best.1 { cur } else { best });
    let max_value = ln_max.exp();
    Ok(GReport {
        m,
        n_max,
        log_concavity_failure,
        argmax,
        max_value,
        argmax_in_window: (2 * m + 5..=2 * m + 7).contains(&argmax),
        below_bound: max_value < 2.5 * (m as f64).sqrt(),
    })
}

/// Outcome of one family of numeric inequality checks.
#[derive(Debug, Clone, Serialize)]
pub struct InequalityFamily {
    pub name: &'static str,
    pub checked: usize,
    /// Cases where both sides agree exactly; allowed only where noted.
    pub equalities: usize,
    /// Largest `lhs / rhs` over the strictly checked cases.
    pub max_ratio: f64,
    pub violations: Vec<Witness>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Witness {
    pub case: String,
    pub lhs: f64,
    pub rhs: f64,
}

impl InequalityFamily {
    fn new(name: &'static str) -> Self {
        InequalityFamily { name, checked: 0, equalities: 0, max_ratio: 0.0, violations: Vec::new() }
    }

    fn strict(&mut self, case: impl FnOnce() -> String, lhs: f64, rhs: f64) {
        self.checked += 1;
        self.max_ratio = self.max_ratio.max(lhs / rhs);
        if !(lhs < rhs) {
            self.violations.push(Witness { case: case(), lhs, rhs });
        }
    }

    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

/// `Γ((m+l+1)/2) / Γ(m/2) < sqrt(m/2) ((m+l)/2)^{l/2}` for `1 <= m <= 40`,
/// `0 <= l <= 40`.
pub fn gamma_power_family() -> InequalityFamily {
    let mut fam = InequalityFamily::new("gamma ratio vs power");
    for m in 1..=40usize {
        for l in 0..=40usize {
            let (mf, lf) = (m as f64, l as f64);
            let lhs = ln_gamma((mf + lf + 1.0) / 2.0) - ln_gamma(mf / 2.0);
            let rhs = 0.5 * (mf / 2.0).ln() + lf / 2.0 * ((mf + lf) / 2.0).ln();
            fam.strict(|| format!("m={m} l={l}"), lhs.exp(), rhs.exp());
        }
    }
    fam
}

/// `((m+i-2k)/(n-m-i+2k))^{(i-2k)/2} < n^{i/2}` over `0 <= k <= m-1`,
/// `0 <= i-k <= n-m-1`, `2 <= n <= 30`. At `i = 0` both sides are 1; those
/// cases are counted as equalities rather than checked strictly.
pub fn ratio_power_family() -> InequalityFamily {
    let mut fam = InequalityFamily::new("ratio power vs n^(i/2)");
    for n in 2..=30i64 {
        for m in 1..n {
            for k in 0..m {
                for i in k..=k + n - m - 1 {
                    let e = (i - 2 * k) as f64 / 2.0;
                    let base = (m + i - 2 * k) as f64 / (n - m - i + 2 * k) as f64;
                    let lhs = base.powf(e);
                    let rhs = (n as f64).powf(i as f64 / 2.0);
                    if i == 0 {
                        fam.equalities += 1;
                        if lhs != rhs {
                            fam.violations.push(Witness { case: format!("n={n} m={m} i=0 k=0"), lhs, rhs });
                        }
                        continue;
                    }
                    fam.strict(|| format!("n={n} m={m} i={i} k={k}"), lhs, rhs);
                }
            }
        }
    }
    fam
}

/// Multipliers of the threshold at which the tail sums are evaluated.
pub const THRESHOLD_FACTORS: [f64; 6] = [1.0 + 1e-9, 1.001, 1.1, 2.0, 10.0, 100.0];

fn tail_sum(n: usize, alpha: f64, weight: impl Fn(usize) -> f64) -> Result<f64> {
    let mut s = 0.0;
    for i in 0..=n - 2 {
        s += binomial(n as i64 - 2, i as i64) * weight(i) * i_integral(n, n - 2 - i, alpha)?;
    }
    Ok(s)
}

/// `Σ_i binom(n-2, i) n^{i/2} I_{n,n-2-i}(α) < 3/t` for `t = 1/sin α > n^{3/2}`,
/// `3 <= n <= 20`.
pub fn general_tail_family() -> Result<InequalityFamily> {
    let mut fam = InequalityFamily::new("general tail sum");
    for n in 3..=20usize {
        for f in THRESHOLD_FACTORS {
            let t = (n as f64).powf(1.5) * f;
            let lhs = tail_sum(n, alpha_from_t(t)?, |i| (n as f64).powf(i as f64 / 2.0))?;
            fam.strict(|| format!("n={n} t={t}"), lhs, 3.0 / t);
        }
    }
    Ok(fam)
}

/// `Σ_i binom(n-2, i) I_{n,n-2-i}(α) < e^{n/m} / t` for `t = 1/sin α > m`,
/// `3 <= n <= 20`, `1 <= m <= n-1`.
pub fn selfdual_tail_family() -> Result<InequalityFamily> {
    let mut fam = InequalityFamily::new("self-dual tail sum");
    for n in 3..=20usize {
        for m in 1..n {
            for f in THRESHOLD_FACTORS {
                let t = m as f64 * f;
                if t <= 1.0 {
                    continue;
                }
                let lhs = tail_sum(n, alpha_from_t(t)?, |_| 1.0)?;
                fam.strict(|| format!("n={n} m={m} t={t}"), lhs, (n as f64 / m as f64).exp() / t);
            }
        }
    }
    Ok(fam)
}

/// All four inequality families.
pub fn inequality_suite() -> Result<Vec<InequalityFamily>> {
    Ok(vec![gamma_power_family(), ratio_power_family(), general_tail_family()?, selfdual_tail_family()?])
}
