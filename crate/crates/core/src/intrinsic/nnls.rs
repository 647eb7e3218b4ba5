//! Lawson–Hanson nonnegative least squares in Gram form.
//!
//! Minimizes `‖G x - y‖` over `x >= 0` given `H = GᵀG` and `b = Gᵀy`.

/// A factor-ready Gram matrix.
#[derive(Debug, Clone)]
pub struct Gram {
    n: usize,
    h: Vec<f64>,
}

impl Gram {
    /// `columns[j]` is the `j`-th column of `G`.
    pub fn from_columns(columns: &[Vec<f64>]) -> Self {
        let n = columns.len();
        let mut h = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                h[i * n + j] = columns[i].iter().zip(&columns[j]).map(|(a, b)| a * b).sum();
            }
        }
        Gram { n, h }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    fn at(&self, i: usize, j: usize) -> f64 {
        self.h[i * self.n + j]
    }

    /// Solves the NNLS problem for right-hand side `b = Gᵀy`. Returns `None`
    /// if the active-set iteration does not terminate.
    pub fn solve(&self, b: &[f64], scratch: &mut Scratch) -> Option<Vec<f64>> {
        let n = self.n;
        let tol = 1e-13 * b.iter().fold(0.0f64, |m, x| m.max(x.abs())).max(f64::MIN_POSITIVE);
        let mut x = vec![0.0; n];
        let mut passive = vec![false; n];
        let mut w = b.to_vec();
        for _ in 0..3 * n + 3 {
            let pick = (0..n).filter(|&j| !passive[j] && w[j] > tol).max_by(|&a, &c| w[a].total_cmp(&w[c]));
            let Some(j) = pick else {
                return Some(x);
            };
            passive[j] = true;
            let mut settled = false;
            for _ in 0..3 * n + 3 {
                let z = self.solve_passive(b, &passive, scratch)?;
                if (0..n).all(|i| !passive[i] || z[i] > 0.0) {
                    x = z;
                    settled = true;
                    break;
                }
                let mut alpha = f64::INFINITY;
                for i in (0..n).filter(|&i| passive[i] && z[i] <= 0.0) {
                    alpha = alpha.min(x[i] / (x[i] - z[i]));
                }
                for i in 0..n {
                    x[i] += alpha * (z[i] - x[i]);
                    if passive[i] && x[i] <= tol * 1e-3 {
                        passive[i] = false;
                        x[i] = 0.0;
                    }
                }
            }
            if !settled {
                return None;
            }
            for (i, wi) in w.iter_mut().enumerate() {
                *wi = b[i] - (0..n).map(|k| self.at(i, k) * x[k]).sum::<f64>();
            }
        }
        None
    }

    /// Unconstrained least squares restricted to the passive set, by Cholesky.
    fn solve_passive(&self, b: &[f64], passive: &[bool], s: &mut Scratch) -> Option<Vec<f64>> {
        s.idx.clear();
        s.idx.extend((0..self.n).filter(|&i| passive[i]));
        let p = s.idx.len();
        s.l.clear();
        s.l.resize(p * p, 0.0);
        for r in 0..p {
            for c in 0..=r {
                let mut v = self.at(s.idx[r], s.idx[c]);
                for k in 0..c {
                    v -= s.l[r * p + k] * s.l[c * p + k];
                }
                if r == c {
                    if v <= 0.0 {
                        return None;
                    }
                    s.l[r * p + r] = v.sqrt();
                } else {
                    s.l[r * p + c] = v / s.l[c * p + c];
                }
            }
        }
        let mut y: Vec<f64> = s.idx.iter().map(|&i| b[i]).collect();
        for r in 0..p {
            for k in 0..r {
                y[r] -= s.l[r * p + k] * y[k];
            }
            y[r] /= s.l[r * p + r];
        }
        for r in (0..p).rev() {
            for k in r + 1..p {
                y[r] -= s.l[k * p + r] * y[k];
            }
            y[r] /= s.l[r * p + r];
        }
        let mut z = vec![0.0; self.n];
        for (k, &i) in s.idx.iter().enumerate() {
            z[i] = y[k];
        }
        Some(z)
    }
}

/// Reusable buffers for [`Gram::solve`].
#[derive(Debug, Default)]
pub struct Scratch {
    idx: Vec<usize>,
    l: Vec<f64>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn residual(cols: &[Vec<f64>], x: &[f64], y: &[f64]) -> Vec<f64> {
        let mut r = y.to_vec();
        for (c, xi) in cols.iter().zip(x) {
            for (ri, ci) in r.iter_mut().zip(c) {
                *ri -= ci * xi;
            }
        }
        r
    }

    #[test]
    fn orthant_projection_is_clipping() {
        let cols = vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]];
        let g = Gram::from_columns(&cols);
        let x = g.solve(&[0.5, -1.0, 2.0], &mut Scratch::default()).unwrap();
        assert_eq!(x, vec![0.5, 0.0, 2.0]);
    }

    proptest! {
        // KKT conditions: x >= 0, gradient >= 0 on the zero set and ~0 on the support.
        #[test]
        fn kkt(seed in proptest::collection::vec(-1.0f64..1.0, 16), y in proptest::collection::vec(-2.0f64..2.0, 4)) {
            let mut cols: Vec<Vec<f64>> = seed.chunks(4).map(|c| c.to_vec()).collect();
            for (i, c) in cols.iter_mut().enumerate() {
                c[i] += 2.5;
            }
            let g = Gram::from_columns(&cols);
            let b: Vec<f64> = cols.iter().map(|c| c.iter().zip(&y).map(|(a, b)| a * b).sum()).collect();
            let x = g.solve(&b, &mut Scratch::default()).unwrap();
            let r = residual(&cols, &x, &y);
            for (c, xi) in cols.iter().zip(&x) {
                prop_assert!(*xi >= 0.0);
                let grad: f64 = c.iter().zip(&r).map(|(a, b)| a * b).sum();
                if *xi > 0.0 {
                    prop_assert!(grad.abs() < 1e-9);
                } else {
                    prop_assert!(grad < 1e-9);
                }
            }
        }
    }
}
