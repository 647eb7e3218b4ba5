//! Twisted characteristic polynomials and their averages over uniformly
//! random subspaces.
//!
//! For `A ∈ R^{k×k}` split into blocks at `l`,
//! `ch_l(A, t) = det [[A1 - tI, A2], [tA3, tA4 + I]]`; the positive variant
//! uses `A1 + tI`. Averaging `ch_l(QᵀAQ, t)` over Haar-random orthogonal `Q`
//! gives a polynomial in `t` whose coefficients are linear in the
//! characteristic-polynomial coefficients `σ_i(A)`.

use nalgebra::DMatrix;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::coeffs::{rational_to_f64, signed_avg_coeff};
use crate::mc::{MCEstimate, Moments};
use crate::parallel::{map_chunks, Sampling};
use crate::specfn::binomial;
use crate::{Error, Result};

pub type SquareMatrix = DMatrix<f64>;

/// Builds a square matrix from rows, rejecting ragged or non-finite input.
pub fn matrix_from_rows(rows: &[Vec<f64>]) -> Result<SquareMatrix> {
    let k = rows.len();
    if k == 0 {
        return Err(Error::domain("matrix", "need k >= 1"));
    }
    if rows.iter().any(|r| r.len() != k) {
        return Err(Error::domain("matrix", format!("expected a {k}x{k} matrix")));
    }
    if rows.iter().flatten().any(|x| !x.is_finite()) {
        return Err(Error::domain("matrix", "entries must be finite"));
    }
    Ok(DMatrix::from_fn(k, k, |i, j| rows[i][j]))
}

/// Real polynomial in `t`; `coeffs[i]` multiplies `t^i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PolyInT {
    pub coeffs: Vec<f64>,
}

impl PolyInT {
    pub fn new(coeffs: Vec<f64>) -> Self {
        PolyInT { coeffs }
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * t + c)
    }

    /// Degree after trimming exact zeros; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|c| *c != 0.0)
    }

    pub fn coeff(&self, i: usize) -> f64 {
        self.coeffs.get(i).copied().unwrap_or(0.0)
    }

    /// Coefficient-wise comparison with absolute tolerance
    /// `1e-9 (1 + max |coeff|)`; missing coefficients count as zero.
    pub fn approx_eq(&self, other: &PolyInT) -> bool {
        let len = self.coeffs.len().max(other.coeffs.len());
        let scale = self.coeffs.iter().chain(&other.coeffs).fold(0.0f64, |m, c| m.max(c.abs()));
        let tol = 1e-9 * (1.0 + scale);
        (0..len).all(|i| (self.coeff(i) - other.coeff(i)).abs() <= tol)
    }

    /// `(s - t)^l (1 + s t)^{k-l}`, the value of `ch_l(sI_k, t)`.
    pub fn scalar_charpoly(k: usize, l: usize, s: f64) -> Self {
        let mut p = vec![1.0];
        let mul = |p: &[f64], a: f64, b: f64| {
            // p * (a + b t)
            let mut q = vec![0.0; p.len() + 1];
            for (i, c) in p.iter().enumerate() {
                q[i] += a * c;
                q[i + 1] += b * c;
            }
            q
        };
        for _ in 0..l {
            p = mul(&p, s, -1.0);
        }
        for _ in l..k {
            p = mul(&p, 1.0, s);
        }
        PolyInT { coeffs: p }
    }
}

/// `σ_0, …, σ_k`: the coefficients of `det(tI - A) = Σ (-1)^i σ_i t^{k-i}`,
/// by the Faddeev–LeVerrier trace recurrence.
pub fn sigma_coeffs(a: &SquareMatrix) -> Result<Vec<f64>> {
    let k = a.nrows();
    if k == 0 || !a.is_square() {
        return Err(Error::domain("sigma_coeffs", "need a square matrix with k >= 1"));
    }
    let mut sigma = vec![1.0];
    let mut m = DMatrix::<f64>::zeros(k, k);
    let mut c_prev = 1.0;
    for i in 1..=k {
        m = a * &m;
        for d in 0..k {
            m[(d, d)] += c_prev;
        }
        let c = -(a * &m).trace() / i as f64;
        sigma.push(if i % 2 == 0 { c } else { -c });
        c_prev = c;
    }
    Ok(sigma)
}

fn check_split(op: &'static str, a: &SquareMatrix, l: usize) -> Result<usize> {
    let k = a.nrows();
    if k == 0 || !a.is_square() {
        return Err(Error::domain(op, "need a square matrix with k >= 1"));
    }
    if l > k {
        return Err(Error::domain(op, format!("block split l = {l} exceeds k = {k}")));
    }
    Ok(k)
}

fn block_det(a: &SquareMatrix, l: usize, t: f64, lead: f64) -> f64 {
    let k = a.nrows();
    let mut b = a.clone();
    for i in 0..k {
        if i < l {
            b[(i, i)] += lead * t;
        } else {
            for j in 0..k {
                b[(i, j)] *= t;
            }
            b[(i, i)] += 1.0;
        }
    }
    b.determinant()
}

/// `ch_l(A, t)`.
pub fn twisted_charpoly(a: &SquareMatrix, l: usize, t: f64) -> Result<f64> {
    check_split("twisted_charpoly", a, l)?;
    Ok(block_det(a, l, t, -1.0))
}

/// `ch⁺_l(A, t)`, with `A1 + tI` in the leading block.
pub fn positive_charpoly(a: &SquareMatrix, l: usize, t: f64) -> Result<f64> {
    check_split("positive_charpoly", a, l)?;
    Ok(block_det(a, l, t, 1.0))
}

/// Chebyshev nodes of the first kind on `[-2, 2]`.
fn chebyshev_nodes(count: usize) -> Vec<f64> {
    (0..count)
        .map(|i| 2.0 * ((2 * i + 1) as f64 * std::f64::consts::PI / (2 * count) as f64).cos())
        .collect()
}

/// Monomial coefficients of the interpolant through `(x_i, y_i)`, via
/// Newton divided differences.
fn interpolate(x: &[f64], y: &[f64]) -> PolyInT {
    let n = x.len();
    let mut dd = y.to_vec();
    for level in 1..n {
        for i in (level..n).rev() {
            dd[i] = (dd[i] - dd[i - 1]) / (x[i] - x[i - level]);
        }
    }
    let mut p = vec![0.0; n];
    for i in (0..n).rev() {
        // p = p * (t - x_i) + dd_i
        let mut q = vec![0.0; n];
        for j in 0..n - 1 {
            q[j + 1] += p[j];
            q[j] -= x[i] * p[j];
        }
        q[0] += dd[i];
        p = q;
    }
    PolyInT { coeffs: p }
}

fn charpoly_in_t(a: &SquareMatrix, l: usize, lead: f64) -> PolyInT {
    let nodes = chebyshev_nodes(a.nrows() + 1);
    let values: Vec<f64> = nodes.iter().map(|&t| block_det(a, l, t, lead)).collect();
    interpolate(&nodes, &values)
}

/// `ch_l(A, ·)` as a polynomial of degree at most `k`.
pub fn twisted_charpoly_poly(a: &SquareMatrix, l: usize) -> Result<PolyInT> {
    check_split("twisted_charpoly_poly", a, l)?;
    Ok(charpoly_in_t(a, l, -1.0))
}

pub fn positive_charpoly_poly(a: &SquareMatrix, l: usize) -> Result<PolyInT> {
    check_split("positive_charpoly_poly", a, l)?;
    Ok(charpoly_in_t(a, l, 1.0))
}

fn averaged(a: &SquareMatrix, l: usize, op: &'static str, absolute: bool) -> Result<PolyInT> {
    let k = check_split(op, a, l)?;
    let sigma = sigma_coeffs(a)?;
    let mut coeffs = vec![0.0; k + 1];
    for i in 0..=k {
        for j in 0..=k {
            let d = rational_to_f64(&signed_avg_coeff(k, l, i, j)?);
            let d = if absolute { d.abs() } else { d };
            coeffs[k - i] += d * sigma[k - j];
        }
    }
    Ok(PolyInT { coeffs })
}

/// `E_Q[ch_l(QᵀAQ, t)] = Σ_{i,j} d_ij σ_{k-j}(A) t^{k-i}`.
pub fn avg_twisted_exact(a: &SquareMatrix, l: usize) -> Result<PolyInT> {
    averaged(a, l, "avg_twisted_exact", false)
}

/// `E_Q[ch⁺_l(QᵀAQ, t)] = Σ_{i,j} |d_ij| σ_{k-j}(A) t^{k-i}`, which bounds
/// `E|ch_l|` for positive semidefinite `A` and `t >= 0`.
pub fn avg_positive_exact(a: &SquareMatrix, l: usize) -> Result<PolyInT> {
    averaged(a, l, "avg_positive_exact", true)
}

/// Average determinant of `A` restricted to a random `l`-dimensional
/// subspace: `σ_l(A) / binom(k, l)`.
pub fn avg_restricted_det_exact(a: &SquareMatrix, l: usize) -> Result<f64> {
    let k = check_split("avg_restricted_det_exact", a, l)?;
    Ok(sigma_coeffs(a)?[l] / binomial(k as i64, l as i64))
}

/// Haar-distributed orthogonal matrix from `rng`: QR of a Gaussian matrix
/// with columns sign-corrected so that `R` has a positive diagonal.
pub fn sample_haar<R: Rng + ?Sized>(k: usize, rng: &mut R) -> SquareMatrix {
    let g = DMatrix::<f64>::from_fn(k, k, |_, _| rng.sample(StandardNormal));
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..k {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}

pub fn haar_orthogonal(k: usize, seed: u64) -> Result<SquareMatrix> {
    if k == 0 {
        return Err(Error::domain("haar_orthogonal", "need k >= 1"));
    }
    Ok(sample_haar(k, &mut ChaCha8Rng::seed_from_u64(seed)))
}

/// Averages `f(QᵀAQ)` over Haar `Q`, one estimate per output component.
fn mc_conjugated<F>(a: &SquareMatrix, mc: &Sampling, width: usize, f: F) -> Result<Vec<MCEstimate>>
where
    F: Fn(&SquareMatrix) -> Vec<f64> + Sync,
{
    if mc.samples == 0 {
        return Err(Error::domain("monte carlo", "need at least one sample"));
    }
    let k = a.nrows();
    let chunks = map_chunks(mc, |rng, len| {
        let mut acc = vec![Moments::default(); width];
        for _ in 0..len {
            let q = sample_haar(k, rng);
            let b = q.transpose() * a * &q;
            for (m, x) in acc.iter_mut().zip(f(&b)) {
                m.push(x);
            }
        }
        acc
    });
    let mut total = vec![Moments::default(); width];
    for chunk in &chunks {
        for (t, c) in total.iter_mut().zip(chunk) {
            t.merge(c);
        }
    }
    Ok(total.iter().map(|m| m.estimate(mc.seed)).collect())
}

/// Monte Carlo estimate of `E_Q[ch_l(QᵀAQ, t)]`.
pub fn mc_avg_twisted(a: &SquareMatrix, l: usize, t: f64, mc: &Sampling) -> Result<MCEstimate> {
    check_split("mc_avg_twisted", a, l)?;
    Ok(mc_conjugated(a, mc, 1, |b| vec![block_det(b, l, t, -1.0)])?[0])
}

/// Monte Carlo estimate of `E_Q|ch_l(QᵀAQ, t)|`.
pub fn mc_avg_abs_twisted(a: &SquareMatrix, l: usize, t: f64, mc: &Sampling) -> Result<MCEstimate> {
    check_split("mc_avg_abs_twisted", a, l)?;
    Ok(mc_conjugated(a, mc, 1, |b| vec![block_det(b, l, t, -1.0).abs()])?[0])
}

/// Monte Carlo estimates of the coefficients of `E_Q[ch_l(QᵀAQ, ·)]`.
pub fn mc_avg_twisted_coeffs(a: &SquareMatrix, l: usize, mc: &Sampling) -> Result<Vec<MCEstimate>> {
    let k = check_split("mc_avg_twisted_coeffs", a, l)?;
    mc_conjugated(a, mc, k + 1, |b| charpoly_in_t(b, l, -1.0).coeffs)
}

/// Monte Carlo estimate of the average leading `l×l` principal minor of `QᵀAQ`.
pub fn mc_avg_restricted_det(a: &SquareMatrix, l: usize, mc: &Sampling) -> Result<MCEstimate> {
    check_split("mc_avg_restricted_det", a, l)?;
    Ok(mc_conjugated(a, mc, 1, |b| vec![b.view((0, 0), (l, l)).determinant()])?[0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::Rng;

    fn random_matrix(k: usize, seed: u64, symmetric: bool) -> SquareMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = DMatrix::<f64>::from_fn(k, k, |_, _| rng.sample(StandardNormal));
        if symmetric {
            (&g + g.transpose()) * 0.5
        } else {
            g
        }
    }

    fn principal_minor(a: &SquareMatrix, subset: u32) -> f64 {
        let idx: Vec<usize> = (0..a.nrows()).filter(|i| subset >> i & 1 == 1).collect();
        DMatrix::from_fn(idx.len(), idx.len(), |r, c| a[(idx[r], idx[c])]).determinant()
    }

    /// σ_i as the sum of all i×i principal minors.
    fn sigma_by_minors(a: &SquareMatrix) -> Vec<f64> {
        let k = a.nrows();
        let mut s = vec![0.0; k + 1];
        for subset in 0..1u32 << k {
            s[subset.count_ones() as usize] += principal_minor(a, subset);
        }
        s
    }

    /// Subset expansion of `ch_l` and `ch⁺_l` over principal minors.
    fn expansion(a: &SquareMatrix, l: usize) -> (PolyInT, PolyInT) {
        let k = a.nrows();
        let lead = (1u32 << l) - 1;
        let mut tw = vec![0.0; k + 1];
        let mut pos = vec![0.0; k + 1];
        for subset in 0..1u32 << k {
            let c1 = (lead & !subset).count_ones();
            let c2 = (c1 + (subset & !lead).count_ones()) as usize;
            let p = principal_minor(a, subset);
            tw[c2] += if c1 % 2 == 0 { p } else { -p };
            pos[c2] += p;
        }
        (PolyInT::new(tw), PolyInT::new(pos))
    }

    #[test]
    fn sigma_examples() {
        let s = sigma_coeffs(&DMatrix::identity(3, 3)).unwrap();
        assert_eq!(s, vec![1.0, 3.0, 3.0, 1.0]);
        let s = sigma_coeffs(&DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![2.0, 5.0]))).unwrap();
        assert_eq!(s, vec![1.0, 7.0, 10.0]);
        assert!(sigma_coeffs(&DMatrix::zeros(0, 0)).is_err());
    }

    #[test]
    fn sigma_matches_principal_minors() {
        for k in 1..=8 {
            for seed in 0..3 {
                let a = random_matrix(k, seed * 31 + k as u64, false);
                let s = sigma_coeffs(&a).unwrap();
                let o = sigma_by_minors(&a);
                assert!(PolyInT::new(s).approx_eq(&PolyInT::new(o)), "k={k}");
            }
        }
    }

    #[test]
    fn integer_sigma_is_exact() {
        let a = matrix_from_rows(&[vec![2.0, 1.0, 0.0], vec![1.0, 3.0, 1.0], vec![0.0, 1.0, 4.0]]).unwrap();
        let s = sigma_coeffs(&a).unwrap();
        assert_eq!(s, vec![1.0, 9.0, 24.0, 18.0]);
    }

    #[test]
    fn specializations() {
        let a = random_matrix(4, 7, false);
        let p = twisted_charpoly_poly(&a, 4).unwrap();
        let s = sigma_coeffs(&a).unwrap();
        // det(A - tI) = Σ (-1)^{k-i} σ_i t^{k-i}
        let expect: Vec<f64> = (0..=4).map(|p| if p % 2 == 0 { s[4 - p] } else { -s[4 - p] }).collect();
        assert!(p.approx_eq(&PolyInT::new(expect)));
        for t in [-1.3, 0.4, 2.0] {
            let ch0 = twisted_charpoly(&a, 0, t).unwrap();
            let direct = (&a * t + DMatrix::identity(4, 4)).determinant();
            assert!((ch0 - direct).abs() < 1e-10);
        }
        for l in 0..=4 {
            let lead = a.view((0, 0), (l, l)).determinant();
            assert!((twisted_charpoly(&a, l, 0.0).unwrap() - lead).abs() < 1e-12);
            assert!((positive_charpoly(&a, l, 0.0).unwrap() - lead).abs() < 1e-12);
        }
        assert!(twisted_charpoly(&a, 5, 0.0).is_err());
    }

    #[test]
    fn scalar_matrices() {
        let grid = [-1.0, 0.0, 0.5, 2.0];
        for k in 1..=6 {
            for l in 0..=k {
                for &s in &grid {
                    let a = DMatrix::identity(k, k) * s;
                    let target = PolyInT::scalar_charpoly(k, l, s);
                    for &t in &grid {
                        let v = twisted_charpoly(&a, l, t).unwrap();
                        assert!((v - target.eval(t)).abs() < 1e-10 * (1.0 + v.abs()));
                    }
                    assert!(avg_twisted_exact(&a, l).unwrap().approx_eq(&target), "k={k} l={l} s={s}");
                    assert!(twisted_charpoly_poly(&a, l).unwrap().approx_eq(&target));
                }
            }
        }
    }

    #[test]
    fn positive_small_case() {
        let a = DMatrix::identity(2, 2);
        assert_eq!(positive_charpoly(&a, 1, 1.0).unwrap(), 4.0);
    }

    #[test]
    fn full_split_average_is_trivial() {
        for k in 1..=6 {
            let a = random_matrix(k, 100 + k as u64, false);
            let avg = avg_twisted_exact(&a, k).unwrap();
            assert!(avg.approx_eq(&twisted_charpoly_poly(&a, k).unwrap()));
        }
    }

    #[test]
    fn expansion_identity() {
        for k in 1..=5 {
            let a = random_matrix(k, 200 + k as u64, false);
            for l in 0..=k {
                let (tw, pos) = expansion(&a, l);
                assert!(tw.approx_eq(&twisted_charpoly_poly(&a, l).unwrap()), "k={k} l={l}");
                assert!(pos.approx_eq(&positive_charpoly_poly(&a, l).unwrap()), "k={k} l={l}");
            }
        }
    }

    #[test]
    fn restricted_det() {
        let a = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![3.0, 7.0]));
        assert_eq!(avg_restricted_det_exact(&a, 1).unwrap(), 5.0);
        for l in 0..=5 {
            assert!((avg_restricted_det_exact(&DMatrix::identity(5, 5), l).unwrap() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn support_of_average() {
        // a coefficient of the average vanishes when no j is in the support
        for k in 1..=7 {
            for l in 0..=k {
                let a = random_matrix(k, 300 + (k * 8 + l) as u64, false);
                let avg = avg_twisted_exact(&a, l).unwrap();
                assert!(avg.coeffs.len() == k + 1);
                for i in 0..=k {
                    let supported = (0..=k).any(|j| signed_avg_coeff(k, l, i, j).map(|d| d != Default::default()).unwrap());
                    if !supported {
                        assert_eq!(avg.coeffs[k - i], 0.0);
                    }
                }
            }
        }
    }

    #[test]
    fn haar_is_orthogonal() {
        for k in 1..=8 {
            let q = haar_orthogonal(k, k as u64).unwrap();
            let e = &q.transpose() * &q - DMatrix::<f64>::identity(k, k);
            assert!(e.amax() < 1e-12);
        }
        assert!(haar_orthogonal(0, 0).is_err());
    }

    #[test]
    fn haar_moments() {
        let k = 4;
        let mc = Sampling::new(100_000, 17);
        let est = mc_conjugated(&DMatrix::identity(k, k), &mc, 0, |_| vec![]).unwrap();
        assert!(est.is_empty());
        let chunks = map_chunks(&mc, |rng, len| {
            let mut col = vec![Moments::default(); k];
            let mut sq = Moments::default();
            for _ in 0..len {
                let q = sample_haar(k, rng);
                for (i, m) in col.iter_mut().enumerate() {
                    m.push(q[(i, 0)]);
                }
                sq.push(q[(0, 0)] * q[(0, 0)]);
            }
            (col, sq)
        });
        let mut col = vec![Moments::default(); k];
        let mut sq = Moments::default();
        for (c, s) in &chunks {
            for (t, x) in col.iter_mut().zip(c) {
                t.merge(x);
            }
            sq.merge(s);
        }
        for m in &col {
            assert!(m.estimate(17).within(0.0, 4.0));
        }
        assert!(sq.estimate(17).within(1.0 / k as f64, 4.0));
    }

    #[test]
    fn mc_matches_exact() {
        let a = random_matrix(4, 11, true);
        let exact = avg_twisted_exact(&a, 2).unwrap();
        let mc = Sampling::new(40_000, 4);
        for t in [-1.0, 0.0, 1.0] {
            let e = mc_avg_twisted(&a, 2, t, &mc).unwrap();
            assert!(e.within(exact.eval(t), 4.0), "t={t}: {e:?} vs {}", exact.eval(t));
        }
        let coeffs = mc_avg_twisted_coeffs(&a, 2, &mc).unwrap();
        for (e, x) in coeffs.iter().zip(&exact.coeffs) {
            assert!(e.within(*x, 4.0) || (e.mean - x).abs() < 1e-9, "{e:?} vs {x}");
        }
        let a5 = random_matrix(5, 12, false);
        let e = mc_avg_restricted_det(&a5, 2, &mc).unwrap();
        assert!(e.within(avg_restricted_det_exact(&a5, 2).unwrap(), 4.0));
    }

    #[test]
    fn scalar_mc_has_no_spread() {
        let a = DMatrix::identity(3, 3) * 0.5;
        let e = mc_avg_twisted(&a, 1, 2.0, &Sampling::new(1000, 1)).unwrap();
        let target = PolyInT::scalar_charpoly(3, 1, 0.5).eval(2.0);
        assert!((e.mean - target).abs() < 1e-12);
        assert!(e.stderr < 1e-12);
    }

    #[test]
    fn positive_bound_in_mean() {
        let g = random_matrix(4, 21, false);
        let a = &g * g.transpose();
        let bound = avg_positive_exact(&a, 2).unwrap();
        for t in [0.0, 0.5, 1.5] {
            let e = mc_avg_abs_twisted(&a, 2, t, &Sampling::new(20_000, 2)).unwrap();
            assert!(e.mean <= bound.eval(t) + 4.0 * e.stderr + 1e-12);
        }
    }

    proptest! {
        #[test]
        fn positive_dominates_for_psd(entries in proptest::collection::vec(-1.0f64..1.0, 25), l in 0usize..=5, t in 0.0f64..3.0) {
            let g = DMatrix::from_vec(5, 5, entries);
            let a = &g * g.transpose();
            let tw = twisted_charpoly(&a, l, t).unwrap();
            let pos = positive_charpoly(&a, l, t).unwrap();
            prop_assert!(tw.abs() <= pos + 1e-9 * (1.0 + pos.abs()));
        }

        #[test]
        fn interpolation_reproduces_values(entries in proptest::collection::vec(-2.0f64..2.0, 16), l in 0usize..=4, t in -2.0f64..2.0) {
            let a = DMatrix::from_vec(4, 4, entries);
            let p = twisted_charpoly_poly(&a, l).unwrap();
            let v = twisted_charpoly(&a, l, t).unwrap();
            prop_assert!((p.eval(t) - v).abs() < 1e-9 * (1.0 + v.abs()));
        }
    }
}
