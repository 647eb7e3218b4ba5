//! Grassmann condition number of uniformly random subspaces with respect to
//! a circular cone of half-angle `β` around the axis `e_n`.
//!
//! For a line `W = span(x)` the geodesic distance to the ill-posed set is
//! `|θ - β|`, where `θ ∈ [0, π/2]` is the angle between the line and the
//! axis, so `C(W) = 1 / sin|θ - β|`. The folded angle has density
//! proportional to `sin^{n-2} θ`, which gives exact tails and expectations
//! to test the samplers against.

use std::f64::consts::FRAC_PI_2;

use nalgebra::DMatrix;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::mc::{proportion, MCEstimate, Moments};
use crate::parallel::{map_chunks, Sampling};
use crate::quad::adaptive_gk;
use crate::specfn::i_integral;
use crate::{Error, Result};

/// Reported condition numbers are capped here to keep logarithms finite.
pub const CONDITION_CAP: f64 = 1e12;

const LOG_QUAD_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConditionSample {
    /// Angle between the sampled subspace and the axis.
    pub theta: f64,
    pub condition: f64,
}

/// Samples with their bookkeeping counters.
#[derive(Debug, Clone, Serialize)]
pub struct ConditionSamples {
    pub samples: Vec<ConditionSample>,
    /// Redraws caused by a zero vector, a rank-deficient matrix or `θ = β`.
    pub resampled: u64,
    /// Samples whose condition number hit [`CONDITION_CAP`].
    pub capped: u64,
    /// Set for samplers whose distance formula is not proved.
    pub experimental: bool,
}

fn check_line_args(op: &'static str, n: usize, beta: f64) -> Result<()> {
    if n < 3 {
        return Err(Error::domain(op, format!("need n >= 3, got {n}")));
    }
    if !(beta > 0.0 && beta < FRAC_PI_2) {
        return Err(Error::domain(op, format!("beta = {beta} outside (0, pi/2)")));
    }
    Ok(())
}

/// `1 / sin|θ - β|`, capped at [`CONDITION_CAP`].
pub fn condition_from_theta(theta: f64, beta: f64) -> f64 {
    (1.0 / (theta - beta).abs().sin()).min(CONDITION_CAP)
}

/// Folded angle of `span(x)` to the axis `e_n`; `None` for `x = 0`.
pub fn line_theta(x: &[f64]) -> Option<f64> {
    let (last, rest) = x.split_last()?;
    let r = rest.iter().map(|v| v * v).sum::<f64>().sqrt();
    if r == 0.0 && *last == 0.0 {
        return None;
    }
    Some(r.atan2(last.abs()))
}

/// Draws one line sample, redrawing degenerate cases. Returns the sample and
/// the number of redraws.
fn draw_line(n: usize, beta: f64, rng: &mut ChaCha8Rng, x: &mut [f64]) -> (ConditionSample, u64) {
    let mut redraws = 0;
    loop {
        for v in x.iter_mut() {
            *v = rng.sample(StandardNormal);
        }
        match line_theta(&x[..n]) {
            Some(theta) if theta != beta => return (ConditionSample { theta, condition: condition_from_theta(theta, beta) }, redraws),
            _ => redraws += 1,
        }
    }
}

fn collect(chunks: Vec<(Vec<ConditionSample>, u64)>, experimental: bool) -> ConditionSamples {
    let mut samples = Vec::with_capacity(chunks.iter().map(|c| c.0.len()).sum());
    let mut resampled = 0;
    for (s, r) in chunks {
        samples.extend(s);
        resampled += r;
    }
    let capped = samples.iter().filter(|s| s.condition >= CONDITION_CAP).count() as u64;
    ConditionSamples { samples, resampled, capped, experimental }
}

/// Condition numbers of uniformly random lines in `R^n`.
pub fn sample_condition_line(n: usize, beta: f64, mc: &Sampling) -> Result<ConditionSamples> {
    check_line_args("sample_condition_line", n, beta)?;
    let chunks = map_chunks(mc, |rng, len| {
        let mut x = vec![0.0; n];
        let mut out = Vec::with_capacity(len as usize);
        let mut redraws = 0;
        for _ in 0..len {
            let (s, r) = draw_line(n, beta, rng, &mut x);
            out.push(s);
            redraws += r;
        }
        (out, redraws)
    });
    Ok(collect(chunks, false))
}

/// Condition numbers of uniformly random `m`-dimensional subspaces, using
/// `C(W) = 1 / sin|θ - β|` with `θ` the angle between the axis and `W`.
/// For `m = 1` this draws exactly the lines of [`sample_condition_line`];
/// for `m >= 2` the distance formula is experimental.
pub fn sample_condition_subspace(n: usize, m: usize, beta: f64, mc: &Sampling) -> Result<ConditionSamples> {
    check_line_args("sample_condition_subspace", n, beta)?;
    if m == 0 || m >= n {
        return Err(Error::domain("sample_condition_subspace", format!("need 1 <= m <= n - 1, got m = {m}")));
    }
    let chunks = map_chunks(mc, |rng, len| {
        let mut out = Vec::with_capacity(len as usize);
        let mut redraws = 0;
        for _ in 0..len {
            loop {
                let g = DMatrix::<f64>::from_fn(n, m, |_, _| rng.sample(StandardNormal));
                match subspace_theta(&g) {
                    Some(theta) if theta != beta => {
                        out.push(ConditionSample { theta, condition: condition_from_theta(theta, beta) });
                        break;
                    }
                    _ => redraws += 1,
                }
            }
        }
        (out, redraws)
    });
    Ok(collect(chunks, m >= 2))
}

/// Angle between `e_n` and the column span of `g`; `None` if `g` is
/// numerically rank deficient.
pub fn subspace_theta(g: &DMatrix<f64>) -> Option<f64> {
    if g.ncols() == 1 {
        return line_theta(g.as_slice());
    }
    let qr = g.clone().qr();
    let r = qr.r();
    let diag: Vec<f64> = (0..g.ncols()).map(|i| r[(i, i)].abs()).collect();
    let max = diag.iter().cloned().fold(0.0, f64::max);
    if !(max > 0.0) || diag.iter().any(|d| *d <= 1e-12 * max) {
        return None;
    }
    let q = qr.q();
    let last = q.row(g.nrows() - 1);
    let c = last.norm().min(1.0);
    Some((1.0 - c * c).max(0.0).sqrt().atan2(c))
}

/// `P[θ <= x]` for the folded angle of a uniform line in `R^n`.
pub fn theta_cdf(n: usize, x: f64) -> Result<f64> {
    let x = x.clamp(0.0, FRAC_PI_2);
    Ok(i_integral(n, 0, x)? / i_integral(n, 0, FRAC_PI_2)?)
}

/// Exact `P[C(W) >= t]` for a uniform line: the folded-angle mass of
/// `(β - arcsin(1/t), β + arcsin(1/t)) ∩ [0, π/2]`.
pub fn exact_tail_line(n: usize, beta: f64, t: f64) -> Result<f64> {
    check_line_args("exact_tail_line", n, beta)?;
    if !(t > 1.0) {
        return Err(Error::domain("exact_tail_line", format!("need t > 1, got {t}")));
    }
    if t.is_infinite() {
        return Ok(0.0);
    }
    let a = (1.0 / t).asin();
    let lo = (beta - a).max(0.0);
    let hi = (beta + a).min(FRAC_PI_2);
    Ok(theta_cdf(n, hi)? - theta_cdf(n, lo)?)
}

/// `E[ln C(W)]` for a uniform line, by Gauss–Kronrod quadrature split at the
/// logarithmic singularity `θ = β`.
pub fn expected_log_condition_line(n: usize, beta: f64) -> Result<f64> {
    check_line_args("expected_log_condition_line", n, beta)?;
    let p = (n - 2) as i32;
    // integrate in u = θ - β so that nodes near the singularity do not round onto it
    let f = |u: f64| -(u.abs().sin().ln()) * (beta + u).sin().powi(p);
    let total = adaptive_gk(f, -beta, 0.0, LOG_QUAD_TOL)? + adaptive_gk(f, 0.0, FRAC_PI_2 - beta, LOG_QUAD_TOL)?;
    Ok(total / i_integral(n, 0, FRAC_PI_2)?)
}

/// Empirical tail estimate at one threshold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailEstimate {
    pub t: f64,
    pub tail: MCEstimate,
}

/// Streaming statistics of the line sampler.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LineStatistics {
    pub n: usize,
    pub beta: f64,
    pub tails: Vec<TailEstimate>,
    pub log_mean: MCEstimate,
    pub resampled: u64,
    pub capped: u64,
}

/// Empirical `P[C(W) >= t]` for each `t` in `thresholds` and the mean of
/// `ln C(W)`, without storing samples.
pub fn line_statistics(n: usize, beta: f64, thresholds: &[f64], mc: &Sampling) -> Result<LineStatistics> {
    check_line_args("line_statistics", n, beta)?;
    if mc.samples == 0 {
        return Err(Error::domain("line_statistics", "need at least one sample"));
    }
    let chunks = map_chunks(mc, |rng, len| {
        let mut x = vec![0.0; n];
        let mut hits = vec![0u64; thresholds.len()];
        let mut log = Moments::default();
        let (mut redraws, mut capped) = (0, 0);
        for _ in 0..len {
            let (s, r) = draw_line(n, beta, rng, &mut x);
            redraws += r;
            if s.condition >= CONDITION_CAP {
                capped += 1;
            }
            for (h, t) in hits.iter_mut().zip(thresholds) {
                if s.condition >= *t {
                    *h += 1;
                }
            }
            log.push(s.condition.ln());
        }
        (hits, log, redraws, capped)
    });
    let mut hits = vec![0u64; thresholds.len()];
    let mut log = Moments::default();
    let (mut resampled, mut capped) = (0, 0);
    for (h, l, r, c) in &chunks {
        for (a, b) in hits.iter_mut().zip(h) {
            *a += b;
        }
        log.merge(l);
        resampled += r;
        capped += c;
    }
    let tails = thresholds
        .iter()
        .zip(&hits)
        .map(|(&t, &h)| TailEstimate { t, tail: proportion(h, mc.samples, mc.seed) })
        .collect();
    Ok(LineStatistics { n, beta, tails, log_mean: log.estimate(mc.seed), resampled, capped })
}

/// Empirical tails of a stored sample set.
pub fn empirical_tails(samples: &ConditionSamples, thresholds: &[f64], seed: u64) -> Vec<TailEstimate> {
    let total = samples.samples.len() as u64;
    thresholds
        .iter()
        .map(|&t| {
            let hits = samples.samples.iter().filter(|s| s.condition >= t).count() as u64;
            TailEstimate { t, tail: proportion(hits, total, seed) }
        })
        .collect()
}

/// Kolmogorov–Smirnov distance between the sampled angles and the folded
/// `sin^{n-2}` law.
pub fn theta_ks_distance(n: usize, samples: &ConditionSamples) -> Result<f64> {
    let mut thetas: Vec<f64> = samples.samples.iter().map(|s| s.theta).collect();
    thetas.sort_by(f64::total_cmp);
    let total = thetas.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in thetas.iter().enumerate() {
        let f = theta_cdf(n, x)?;
        d = d.max((f - i as f64 / total).abs()).max(((i + 1) as f64 / total - f).abs());
    }
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parallel::Execution;
    use crate::quad::adaptive_simpson;
    use crate::tube::{expectation_bound_general, tail_bound_general};
    use std::f64::consts::FRAC_PI_4;

    #[test]
    fn axis_and_orthogonal_lines() {
        let beta = 0.6;
        let t = line_theta(&[0.0, 0.0, 2.0]).unwrap();
        assert_eq!(t, 0.0);
        assert!((condition_from_theta(t, beta) - 1.0 / beta.sin()).abs() < 1e-15);
        let t = line_theta(&[1.0, 0.0, 0.0]).unwrap();
        assert_eq!(t, FRAC_PI_2);
        assert!((condition_from_theta(t, beta) - 1.0 / beta.cos()).abs() < 1e-12);
        assert_eq!(line_theta(&[0.0, 0.0, 0.0]), None);
        assert_eq!(line_theta(&[0.0, 0.0, -1.0]).unwrap(), 0.0);
        assert_eq!(condition_from_theta(beta, beta), CONDITION_CAP);
    }

    #[test]
    fn tail_limits() {
        assert!(exact_tail_line(4, 0.5, f64::INFINITY).unwrap() == 0.0);
        assert!(exact_tail_line(4, 0.5, 1e12).unwrap() < 1e-11);
        // arcsin(1/t) covers the whole range
        let t = 1.0 / (FRAC_PI_2 - 0.3).sin();
        assert!((exact_tail_line(5, 0.3, t * 0.999).unwrap() - 1.0).abs() < 1e-14);
        assert!(exact_tail_line(4, 0.5, 1.0).is_err());
        assert!(exact_tail_line(2, 0.5, 3.0).is_err());
    }

    #[test]
    fn tail_by_quadrature() {
        for n in [3, 4, 7] {
            for beta in [0.3, FRAC_PI_4, 1.2] {
                for t in [1.5f64, 10.0, 50.0] {
                    let a = (1.0 / t).asin();
                    let (lo, hi) = ((beta - a).max(0.0), (beta + a).min(FRAC_PI_2));
                    let p = (n - 2) as i32;
                    let num = adaptive_simpson(|x| x.sin().powi(p), lo, hi, 1e-14).unwrap();
                    let den = adaptive_simpson(|x| x.sin().powi(p), 0.0, FRAC_PI_2, 1e-14).unwrap();
                    assert!((exact_tail_line(n, beta, t).unwrap() - num / den).abs() < 1e-11);
                }
            }
        }
    }

    #[test]
    fn expected_log_symmetric_and_bounded() {
        for n in [3, 4, 10, 20] {
            for beta in [0.2, 0.5, FRAC_PI_4, 1.3] {
                let e = expected_log_condition_line(n, beta).unwrap();
                assert!(e < expectation_bound_general(n as f64).unwrap());
                assert!(e > 0.0);
            }
        }
        let e = expected_log_condition_line(5, FRAC_PI_4).unwrap();
        assert!(e.is_finite());
    }

    #[test]
    fn duality_lines_versus_hyperplanes() {
        // W ↦ W^⊥ maps lines against the cone of half-angle β to hyperplanes
        // against the polar cone of half-angle π/2 - β
        for (n, beta) in [(3, 0.4), (5, 0.3)] {
            let exact = expected_log_condition_line(n, beta).unwrap();
            let s = sample_condition_subspace(n, n - 1, FRAC_PI_2 - beta, &Sampling::new(100_000, 13)).unwrap();
            let mut m = Moments::default();
            for x in &s.samples {
                m.push(x.condition.ln());
            }
            assert!(m.estimate(13).within(exact, 4.0), "n={n}: {:?} vs {exact}", m.estimate(13));
        }
        // the line quantity itself is not symmetric in β ↔ π/2 - β
        let a = expected_log_condition_line(3, 0.2).unwrap();
        let b = expected_log_condition_line(3, FRAC_PI_2 - 0.2).unwrap();
        assert!((a - b).abs() > 0.5);
    }

    #[test]
    fn mc_matches_exact_line() {
        let mc = Sampling::new(200_000, 8);
        let ts = [10.0, 20.0, 50.0];
        let stats = line_statistics(4, FRAC_PI_4, &ts, &mc).unwrap();
        for te in &stats.tails {
            assert!(te.tail.within(exact_tail_line(4, FRAC_PI_4, te.t).unwrap(), 4.0), "{te:?}");
        }
        assert!(stats.log_mean.within(expected_log_condition_line(4, FRAC_PI_4).unwrap(), 4.0));
        let samples = sample_condition_line(4, FRAC_PI_4, &mc).unwrap();
        let tails = empirical_tails(&samples, &ts, 8);
        assert_eq!(tails, stats.tails);
        assert!(theta_ks_distance(4, &samples).unwrap() < 0.005);
    }

    #[test]
    fn theorem_tail_on_lines() {
        let n = 4;
        let stats = line_statistics(n, 0.5, &[9.0, 16.0, 40.0], &Sampling::new(100_000, 3)).unwrap();
        for te in &stats.tails {
            let b = tail_bound_general(n, 1, te.t).unwrap();
            assert!(b.valid);
            assert!(te.tail.mean <= b.bound + 4.0 * te.tail.stderr);
        }
    }

    #[test]
    fn subspace_sampler_reduces_to_lines() {
        let mc = Sampling::new(5000, 21);
        let a = sample_condition_line(5, 0.7, &mc).unwrap();
        let b = sample_condition_subspace(5, 1, 0.7, &mc).unwrap();
        assert!(!b.experimental);
        assert_eq!(a.samples, b.samples);
        let c = sample_condition_subspace(5, 2, 0.7, &mc).unwrap();
        assert!(c.experimental);
        assert!(sample_condition_subspace(5, 5, 0.7, &mc).is_err());
    }

    #[test]
    fn subspace_tail_below_theorem_bound() {
        let (n, m) = (4, 2);
        let s = sample_condition_subspace(n, m, FRAC_PI_4, &Sampling::new(100_000, 5)).unwrap();
        for te in empirical_tails(&s, &[9.0, 16.0, 40.0], 5) {
            let b = tail_bound_general(n, m, te.t).unwrap();
            assert!(b.valid && te.tail.mean <= b.bound + 4.0 * te.tail.stderr);
        }
    }

    #[test]
    fn sampler_deterministic_across_schedules() {
        let s = Sampling::new(20_000, 2);
        let a = line_statistics(6, 0.5, &[12.0], &s.with_execution(Execution::Sequential)).unwrap();
        let b = line_statistics(6, 0.5, &[12.0], &s.with_execution(Execution::Parallel)).unwrap();
        assert_eq!(a, b);
    }
}
