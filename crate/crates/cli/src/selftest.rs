//! Invariant suites behind `--selftest`. Each prints a JSON report and fails
//! with exit code 1 if any check does not hold.

use serde::Serialize;

use grasscond::coeffs::check_symmetries;
use grasscond::condmc::{
    exact_tail_line, expected_log_condition_line, line_statistics, sample_condition_line, theta_ks_distance,
};
use grasscond::intrinsic::{
    beta_grid, check_log_concavity, convolution_sweep, iv_circular, iv_dual, iv_lorentz, iv_orthant, iv_product,
    lorentz_domination, IVVector,
};
use grasscond::tube::{
    alpha_from_t, expectation_bound_general, g_properties, inequality_suite as suite, tail_bound_general,
    tail_bound_selfdual, tube_bound as tube, tube_bound_alt,
};
use grasscond::twisted::{avg_twisted_exact, haar_orthogonal, matrix_from_rows, mc_avg_twisted_coeffs, PolyInT};
use grasscond::Sampling;

use crate::commands::{g_window, CliError, CliResult};
use crate::output::json;

#[derive(Serialize)]
struct Check {
    name: String,
    passed: bool,
    detail: String,
}

#[derive(Serialize)]
struct Suite {
    suite: &'static str,
    passed: bool,
    checks: Vec<Check>,
}

struct Runner {
    suite: &'static str,
    checks: Vec<Check>,
}

impl Runner {
    fn new(suite: &'static str) -> Self {
        Runner { suite, checks: Vec::new() }
    }

    fn check(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check { name: name.into(), passed, detail: detail.into() });
    }

    fn finish(self) -> CliResult<Vec<u8>> {
        let failed: Vec<&str> = self.checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
        if !failed.is_empty() {
            return Err(CliError::Numeric(format!("selftest {} failed: {}", self.suite, failed.join(", "))));
        }
        let report = Suite { suite: self.suite, passed: true, checks: self.checks };
        Ok(json(&report)?)
    }
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}

fn max_diff(a: &IVVector, b: &IVVector) -> f64 {
    if a.n != b.n {
        return f64::INFINITY;
    }
    a.v.iter().zip(&b.v).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn named_cones() -> CliResult<Vec<(String, IVVector)>> {
    let mut out = Vec::new();
    for n in 2..=12 {
        out.push((format!("orthant({n})"), iv_orthant(n)?));
        out.push((format!("lorentz({n})"), iv_lorentz(n)?));
        out.push((format!("circular({n}, 0.4)"), iv_circular(n, 0.4)?));
    }
    Ok(out)
}

pub fn coeffs() -> CliResult<Vec<u8>> {
    let mut r = Runner::new("coeffs");
    for n in 2..=14 {
        let res = check_symmetries(n)?;
        let detail = res.map(|(s, m, i, j)| format!("{s} fails at m = {m}, ({i}, {j})")).unwrap_or_default();
        r.check(format!("symmetries n = {n}"), res.is_none(), detail);
    }
    r.finish()
}

pub fn iv() -> CliResult<Vec<u8>> {
    let mut r = Runner::new("iv");
    for (name, v) in named_cones()? {
        let (even, odd) = v.parity_sums();
        r.check(format!("{name} sums"), close(v.sum(), 1.0, 1e-12) && close(even, 0.5, 1e-12) && close(odd, 0.5, 1e-12), format!("even {even}, odd {odd}"));
        r.check(format!("{name} log-concave"), check_log_concavity(&v).holds, "");
    }
    for n in 2..=12 {
        let d = max_diff(&iv_lorentz(n)?, &iv_circular(n, std::f64::consts::FRAC_PI_4)?);
        r.check(format!("lorentz({n}) = circular(pi/4)"), d < 1e-12, format!("max diff {d:e}"));
        let d = max_diff(&iv_dual(&iv_circular(n, 0.3)?), &iv_circular(n, std::f64::consts::FRAC_PI_2 - 0.3)?);
        r.check(format!("dual circular({n})"), d < 1e-12, format!("max diff {d:e}"));
        for k in 1..n {
            let d = max_diff(&iv_product(&iv_orthant(k)?, &iv_orthant(n - k)?), &iv_orthant(n)?);
            r.check(format!("orthant({k}) x orthant({}) = orthant({n})", n - k), d < 1e-14, format!("max diff {d:e}"));
        }
    }
    r.finish()
}

pub fn tube_bound() -> CliResult<Vec<u8>> {
    let mut r = Runner::new("tube-bound");
    for (name, v) in named_cones()? {
        if v.n < 4 {
            continue;
        }
        for m in 1..v.n {
            let mut last = 0.0;
            let mut monotone = true;
            let mut worst: f64 = 0.0;
            for step in 1..=10 {
                let alpha = 0.15 * step as f64;
                let b = tube(&v, m, alpha)?;
                let alt = tube_bound_alt(&v, m, alpha)?;
                worst = worst.max((b.full_bound - alt).abs() / b.full_bound.abs().max(1e-300));
                monotone &= b.full_bound >= last;
                last = b.full_bound;
            }
            r.check(format!("{name} m = {m} two routes"), worst < 1e-9, format!("max rel diff {worst:e}"));
            r.check(format!("{name} m = {m} monotone"), monotone, "");
            let dual = tube(&iv_dual(&v), v.n - m, 0.7)?.full_bound;
            let primal = tube(&v, m, 0.7)?.full_bound;
            r.check(format!("{name} m = {m} duality"), close(dual, primal, 1e-10), format!("{primal} vs {dual}"));
        }
    }
    r.finish()
}

pub fn tail() -> CliResult<Vec<u8>> {
    let mut r = Runner::new("tail");
    for (name, v) in named_cones()? {
        let n = v.n;
        if n < 3 {
            continue;
        }
        let selfdual = name.starts_with("orthant") || name.starts_with("lorentz");
        let e = lorentz_domination(&v)?;
        for m in 1..n {
            for t in [2.0, 5.0, 2.0 * (n as f64).powf(1.5), 50.0 * n as f64] {
                let tb = tube(&v, m, alpha_from_t(t)?)?.full_bound;
                let g = tail_bound_general(n, m, t)?;
                if g.valid {
                    r.check(format!("{name} m = {m} t = {t} general"), g.bound >= tb * (1.0 - 1e-12), format!("{} vs tube {tb}", g.bound));
                }
                if selfdual {
                    let s = tail_bound_selfdual(n, m, t, e)?;
                    if s.valid {
                        r.check(format!("{name} m = {m} t = {t} self-dual"), s.bound >= tb * (1.0 - 1e-12), format!("{} vs tube {tb}", s.bound));
                    }
                }
            }
        }
    }
    r.finish()
}

pub fn expect() -> CliResult<Vec<u8>> {
    let mut r = Runner::new("expect");
    for n in 3..=12 {
        let bound = expectation_bound_general(n as f64)?;
        for b in beta_grid() {
            let e = expected_log_condition_line(n, b)?;
            r.check(format!("n = {n} beta = {b}"), e.is_finite() && e >= 0.0 && e <= bound, format!("{e} vs {bound}"));
        }
    }
    r.finish()
}

pub fn avg_charpoly() -> CliResult<Vec<u8>> {
    let mut r = Runner::new("avg-charpoly");
    for k in 1..=5 {
        for l in 0..=k {
            for s in [-1.5, 0.0, 2.0] {
                let id: Vec<Vec<f64>> = (0..k).map(|i| (0..k).map(|j| if i == j { s } else { 0.0 }).collect()).collect();
                let avg = avg_twisted_exact(&matrix_from_rows(&id)?, l)?;
                r.check(format!("scalar k = {k} l = {l} s = {s}"), avg.approx_eq(&PolyInT::scalar_charpoly(k, l, s)), "");
            }
        }
    }
    // Exact averages are invariant under orthogonal conjugation.
    let a = matrix_from_rows(&[vec![1.0, 2.0, 0.5], vec![-1.0, 0.3, 2.0], vec![0.7, 0.0, -1.2]])?;
    let q = haar_orthogonal(3, 7)?;
    let b = &q * &a * q.transpose();
    for l in 0..=3 {
        let (x, y) = (avg_twisted_exact(&a, l)?, avg_twisted_exact(&b, l)?);
        r.check(format!("conjugation invariance l = {l}"), x.approx_eq(&y), "");
        let s = Sampling::new(4000, 11);
        let est = mc_avg_twisted_coeffs(&a, l, &s)?;
        let worst = est.iter().enumerate().map(|(p, e)| (e.mean - x.coeff(p)).abs() / (e.stderr + 1e-9 * (1.0 + x.coeff(p).abs()))).fold(0.0, f64::max);
        r.check(format!("sampled coefficients l = {l}"), worst < 5.0, format!("max z {worst:.2}"));
    }
    r.finish()
}

pub fn mc_condition() -> CliResult<Vec<u8>> {
    let mut r = Runner::new("mc-condition");
    let s = Sampling::new(20_000, 5);
    for (n, beta) in [(3, 0.6), (5, std::f64::consts::FRAC_PI_4), (8, 1.2)] {
        let ks = theta_ks_distance(n, &sample_condition_line(n, beta, &s)?)?;
        let limit = 1.63 / (s.samples as f64).sqrt();
        r.check(format!("theta law n = {n}"), ks < limit, format!("ks {ks:.5} vs {limit:.5}"));
        let ts = [2.0, 5.0, 20.0];
        let st = line_statistics(n, beta, &ts, &s)?;
        for te in st.tails {
            let exact = exact_tail_line(n, beta, te.t)?;
            let z = (te.tail.mean - exact).abs() / te.tail.stderr.max(1e-12);
            r.check(format!("tail n = {n} t = {}", te.t), z < 5.0, format!("z {z:.2}"));
        }
        let exact = expected_log_condition_line(n, beta)?;
        let z = (st.log_mean.mean - exact).abs() / st.log_mean.stderr;
        r.check(format!("log mean n = {n}"), z < 5.0, format!("z {z:.2}"));
    }
    r.finish()
}

pub fn check_conjectures() -> CliResult<Vec<u8>> {
    let mut r = Runner::new("check-conjectures");
    for c in convolution_sweep(20)? {
        if !c.holds {
            r.check(format!("convolution {} x {}", c.n1, c.n2), false, format!("ratio {}", c.max_ratio));
        }
    }
    r.check("convolution sweep up to 20", r.checks.is_empty(), "");
    for n in 1..=40 {
        r.check(format!("orthant({n}) log-concave"), check_log_concavity(&iv_orthant(n)?).holds, "");
    }
    r.finish()
}

pub fn inequality_suite() -> CliResult<Vec<u8>> {
    let mut r = Runner::new("inequality-suite");
    for f in suite()? {
        let detail = f.violations.first().map(|w| format!("{}: {} vs {}", w.case, w.lhs, w.rhs)).unwrap_or_default();
        r.check(f.name, f.holds(), detail);
    }
    r.finish()
}

pub fn g_report() -> CliResult<Vec<u8>> {
    let mut r = Runner::new("g-report");
    for m in 1..=12 {
        let g = g_properties(m, g_window(m))?;
        r.check(format!("m = {m}"), g.holds(), format!("argmax {}, max {}", g.argmax, g.max_value));
    }
    r.finish()
}
