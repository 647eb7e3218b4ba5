//! Brute-force check of the experimental subspace distance formula for
//! planes in R^3. The ill-posed planes of a circular cone are its tangent
//! planes, parameterized by the direction `ψ` of the touching generator; the
//! oracle minimizes the Grassmann distance to them by dense search plus
//! golden-section refinement. Set `GRASSCOND_BLESS=1` to rewrite the golden
//! file.

use std::f64::consts::{PI, TAU};
use std::path::PathBuf;

use grasscond::condmc::subspace_theta;
use nalgebra::{DMatrix, Matrix3x2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

const BETAS: [f64; 2] = [0.6, PI / 4.0];
const SAMPLES: usize = 100;
const SEED: u64 = 2024;
const GRID: usize = 3600;

#[derive(Debug, Serialize, Deserialize, PartialEq)]
struct Case {
    beta: f64,
    theta: f64,
    formula: f64,
    oracle: f64,
}

#[derive(Debug, Serialize, Deserialize)]
struct Golden {
    n: usize,
    m: usize,
    seed: u64,
    max_abs_diff: f64,
    cases: Vec<Case>,
}

fn tangent_plane(beta: f64, psi: f64) -> Matrix3x2<f64> {
    let (sb, cb) = beta.sin_cos();
    let (sp, cp) = psi.sin_cos();
    Matrix3x2::new(sb * cp, -sp, sb * sp, cp, cb, 0.0)
}

/// Largest principal angle between two planes with orthonormal bases.
fn grassmann_distance(q: &DMatrix<f64>, b: &Matrix3x2<f64>) -> f64 {
    let b = DMatrix::from_column_slice(3, 2, b.as_slice());
    let s = (q.transpose() * b).singular_values();
    s.min().clamp(-1.0, 1.0).acos()
}

fn oracle_distance(q: &DMatrix<f64>, beta: f64) -> f64 {
    let d = |psi: f64| grassmann_distance(q, &tangent_plane(beta, psi));
    let step = TAU / GRID as f64;
    let best = (0..GRID).map(|i| i as f64 * step).min_by(|a, b| d(*a).total_cmp(&d(*b))).unwrap();
    let (mut lo, mut hi) = (best - step, best + step);
    let g = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..80 {
        let a = hi - g * (hi - lo);
        let b = lo + g * (hi - lo);
        if d(a) < d(b) {
            hi = b;
        } else {
            lo = a;
        }
    }
    d(0.5 * (lo + hi))
}

fn compute() -> Golden {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut cases = Vec::new();
    for &beta in &BETAS {
        for _ in 0..SAMPLES {
            let g = DMatrix::<f64>::from_fn(3, 2, |_, _| rng.sample(StandardNormal));
            let theta = subspace_theta(&g).expect("full rank");
            let q = g.qr().q();
            cases.push(Case { beta, theta, formula: (theta - beta).abs(), oracle: oracle_distance(&q, beta) });
        }
    }
    let max_abs_diff = cases.iter().map(|c| (c.formula - c.oracle).abs()).fold(0.0, f64::max);
    Golden { n: 3, m: 2, seed: SEED, max_abs_diff, cases }
}

fn golden_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden/subspace_n3_m2.json")
}

#[test]
fn formula_matches_brute_force_oracle() {
    let fresh = compute();
    assert!(fresh.max_abs_diff < 1e-3, "max deviation {}", fresh.max_abs_diff);
    let path = golden_path();
    if std::env::var("GRASSCOND_BLESS").as_deref() == Ok("1") {
        std::fs::write(&path, serde_json::to_string_pretty(&fresh).unwrap() + "\n").unwrap();
        return;
    }
    let stored: Golden = serde_json::from_str(&std::fs::read_to_string(&path).expect("golden file; run with GRASSCOND_BLESS=1"))
        .unwrap();
    assert_eq!(stored.cases.len(), fresh.cases.len());
    assert!(stored.max_abs_diff < 1e-3);
    for (s, f) in stored.cases.iter().zip(&fresh.cases) {
        assert_eq!(s.beta, f.beta);
        assert!((s.theta - f.theta).abs() < 1e-12);
        assert!((s.oracle - f.oracle).abs() < 1e-9);
    }
}
