//! Exact rational tube-formula coefficients `d_ij^{nm}` and the signed
//! coefficients of the averaged twisted characteristic polynomial.

use num_bigint::BigInt;
use num_integer::binomial;
use num_rational::BigRational;
use num_traits::Zero;

use crate::{Error, Result};

pub type Rational = BigRational;

/// `binom(n, k)` as a big integer, zero when `k < 0` or `k > n`.
pub fn binom(n: i64, k: i64) -> BigInt {
    if n < 0 || k < 0 || k > n {
        return BigInt::zero();
    }
    binomial(BigInt::from(n), BigInt::from(k))
}

fn ratio(num: BigInt, den: BigInt) -> Rational {
    Rational::new(num, den)
}

fn check_dims(n: usize, m: usize) -> Result<()> {
    if n < 2 || m == 0 || m >= n {
        return Err(Error::domain("d_coeff", format!("need n >= 2 and 1 <= m <= n - 1, got n = {n}, m = {m}")));
    }
    Ok(())
}

/// Tube-formula coefficient `d_ij^{nm}`.
///
/// Nonzero only when `i + j + m` is odd, `0 <= (i-j)/2 + (m-1)/2 <= m-1`
/// and `0 <= (i+j)/2 - (m-1)/2 <= n-m-1`; there it equals
/// `binom(m-1, ·) binom(n-m-1, ·) / binom(n-2, j)`.
pub fn d_coeff(n: usize, m: usize, i: usize, j: usize) -> Result<Rational> {
    check_dims(n, m)?;
    if i > n - 2 || j > n - 2 {
        return Err(Error::domain("d_coeff", format!("indices ({i}, {j}) outside [0, {}]", n - 2)));
    }
    let (n, m, i, j) = (n as i64, m as i64, i as i64, j as i64);
    if (i + j + m) % 2 == 0 {
        return Ok(Rational::zero());
    }
    let a = (i - j + m - 1) / 2;
    let b = (i + j - m + 1) / 2;
    let num = binom(m - 1, a) * binom(n - m - 1, b);
    Ok(ratio(num, binom(n - 2, j)))
}

/// The `(n-1) × (n-1)` matrix `D_{n,m} = (d_ij^{nm})`, indices `0..=n-2`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DMatrix {
    pub n: usize,
    pub m: usize,
    entries: Vec<Vec<Rational>>,
}

impl DMatrix {
    pub fn dim(&self) -> usize {
        self.n - 1
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.entries[i][j]
    }

    pub fn rows(&self) -> &[Vec<Rational>] {
        &self.entries
    }

    /// Entries rendered as `"p/q"` strings (integers without a denominator).
    pub fn to_strings(&self) -> Vec<Vec<String>> {
        self.entries.iter().map(|row| row.iter().map(|r| r.to_string()).collect()).collect()
    }

    pub fn to_f64(&self) -> Vec<Vec<f64>> {
        self.entries.iter().map(|row| row.iter().map(rational_to_f64).collect()).collect()
    }
}

pub fn d_matrix(n: usize, m: usize) -> Result<DMatrix> {
    check_dims(n, m)?;
    let entries = (0..=n - 2)
        .map(|i| (0..=n - 2).map(|j| d_coeff(n, m, i, j)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    Ok(DMatrix { n, m, entries })
}

/// Signed coefficient `d_ij` of the averaged twisted characteristic
/// polynomial `E[ch_Y(φ, t)] = Σ d_ij σ_{k-j}(φ) t^{k-i}` for subspaces of
/// dimension `l` in a `k`-dimensional space.
pub fn signed_avg_coeff(k: usize, l: usize, i: usize, j: usize) -> Result<Rational> {
    if k == 0 || l > k || i > k || j > k {
        return Err(Error::domain(
            "signed_avg_coeff",
            format!("need k >= 1, 0 <= l <= k and 0 <= i, j <= k, got k = {k}, l = {l}, i = {i}, j = {j}"),
        ));
    }
    let (k, l, i, j) = (k as i64, l as i64, i as i64, j as i64);
    if (i + j + l) % 2 != 0 {
        return Ok(Rational::zero());
    }
    let a = (i - j + l) / 2;
    let b = (i + j - l) / 2;
    let num = binom(l, a) * binom(k - l, b);
    if num.is_zero() {
        return Ok(Rational::zero());
    }
    let v = ratio(num, binom(k, j));
    // sign (-1)^{(i-j-l)/2} = (-1)^{a-l}
    Ok(if (a - l).rem_euclid(2) == 1 { -v } else { v })
}

/// All `(k+1) × (k+1)` signed coefficients for subspace dimension `l`.
pub fn signed_avg_matrix(k: usize, l: usize) -> Result<Vec<Vec<Rational>>> {
    (0..=k).map(|i| (0..=k).map(|j| signed_avg_coeff(k, l, i, j)).collect()).collect()
}

/// Checks `d^{n,n-m}_{i,n-2-j} = d^{nm}_{ij}`, `d^{nm}_{n-2-i,n-2-j} = d^{nm}_{ij}`
/// and their composition `d^{n,n-m}_{n-2-i,j} = d^{nm}_{ij}` exactly for every
/// `m`. Returns the first failing `(relation, m, i, j)`.
pub fn check_symmetries(n: usize) -> Result<Option<(&'static str, usize, usize, usize)>> {
    for m in 1..n {
        let d = d_matrix(n, m)?;
        let dual = d_matrix(n, n - m)?;
        let top = n - 2;
        for i in 0..=top {
            for j in 0..=top {
                let x = d.get(i, j);
                if dual.get(i, top - j) != x {
                    return Ok(Some(("complement", m, i, j)));
                }
                if d.get(top - i, top - j) != x {
                    return Ok(Some(("reversal", m, i, j)));
                }
                if dual.get(top - i, j) != x {
                    return Ok(Some(("composition", m, i, j)));
                }
            }
        }
    }
    Ok(None)
}

pub fn rational_to_f64(r: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or_else(|| {
        // numerator/denominator too large for direct conversion
        let n = r.numer().to_f64().unwrap_or(f64::NAN);
        let d = r.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}
