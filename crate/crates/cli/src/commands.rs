use std::fmt;

use clap::Args;
use serde::Serialize;

use grasscond::coeffs::{d_matrix, DMatrix};
use grasscond::condmc::{
    empirical_tails, exact_tail_line, expected_log_condition_line, line_statistics, sample_condition_subspace,
};
use grasscond::intrinsic::{
    beta_grid, check_log_concavity, convolution_sweep, excess, iv_circular, iv_mc_simplicial, iv_orthant, iv_product,
    lorentz_domination, ConeSpec, IVVector,
};
use grasscond::mc::Moments;
use grasscond::tube::{
    alpha_from_t, expectation_bound_general, expectation_bound_selfdual, g_properties,
    t_from_alpha, tail_bound_general, tail_bound_selfdual, tube_bound_alt, GReport, TailBound,
};
use grasscond::twisted::{
    avg_positive_exact, avg_restricted_det_exact, avg_twisted_exact, matrix_from_rows, mc_avg_restricted_det,
    mc_avg_twisted, mc_avg_twisted_coeffs,
};
use grasscond::{tube, MCEstimate, Sampling};

use crate::output::{num, Report};
use crate::{Common, Mc};

#[derive(Debug)]
pub enum CliError {
    /// Bad flags or inputs; exit code 2.
    Config(String),
    /// Numerical failure or failed self-test; exit code 1.
    Numeric(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numeric(_) | CliError::Io(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "invalid configuration: {m}"),
            CliError::Numeric(m) => write!(f, "numerical failure: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl From<grasscond::Error> for CliError {
    fn from(e: grasscond::Error) -> Self {
        if e.is_config() {
            CliError::Config(e.to_string())
        } else {
            CliError::Numeric(e.to_string())
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;

fn required<T: Copy>(v: Option<T>, flag: &str) -> CliResult<T> {
    v.ok_or_else(|| CliError::Config(format!("--{flag} is required")))
}

fn config(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

fn parse_cone(s: Option<&str>) -> CliResult<ConeSpec> {
    let s = s.ok_or_else(|| config("--cone is required"))?;
    let cone: ConeSpec = serde_json::from_str(s).map_err(|e| config(format!("--cone is not a valid cone description: {e}")))?;
    cone.validate()?;
    Ok(cone)
}

fn sampling(mc: &Mc) -> CliResult<Sampling> {
    if mc.samples == 0 {
        return Err(config("--samples must be at least 1"));
    }
    Ok(Sampling::new(mc.samples, mc.seed))
}

fn bool_cell(b: bool) -> String {
    b.to_string()
}

// ---------------------------------------------------------------- coeffs

#[derive(Debug, Args)]
pub struct CoeffsArgs {
    #[arg(long)]
    pub n: Option<usize>,
    /// Omit to emit D_{n,m} for every 1 <= m <= n-1.
    #[arg(long)]
    pub m: Option<usize>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Serialize)]
struct CoeffsOut {
    n: usize,
    m: usize,
    d: Vec<Vec<String>>,
}

#[derive(Serialize)]
struct CoeffsAll {
    n: usize,
    matrices: Vec<CoeffsOut>,
}

pub fn coeffs(a: &CoeffsArgs) -> CliResult<Report> {
    let n = required(a.n, "n")?;
    if n < 2 {
        return Err(config(format!("coeffs: need n >= 2, got {n}")));
    }
    let ms: Vec<usize> = match a.m {
        Some(m) => vec![m],
        None => (1..n).collect(),
    };
    let mats = ms.iter().map(|&m| d_matrix(n, m)).collect::<Result<Vec<DMatrix>, _>>()?;
    let mut rows = Vec::new();
    for d in &mats {
        for (i, row) in d.to_strings().into_iter().enumerate() {
            for (j, x) in row.into_iter().enumerate() {
                rows.push(vec![d.m.to_string(), i.to_string(), j.to_string(), x]);
            }
        }
    }
    let outs: Vec<CoeffsOut> = mats.iter().map(|d| CoeffsOut { n, m: d.m, d: d.to_strings() }).collect();
    let header = ["m", "i", "j", "d"];
    match a.m {
        Some(_) => Report::new(&outs[0], &header, &rows),
        None => Report::new(&CoeffsAll { n, matrices: outs }, &header, &rows),
    }
    .map_err(Into::into)
}

// ---------------------------------------------------------------- iv

#[derive(Debug, Args)]
pub struct IvArgs {
    /// Cone as JSON, e.g. '{"product":[{"lorentz":4},{"orthant":3}]}'.
    #[arg(long)]
    pub cone: Option<String>,
    /// Used for simplicial cones only.
    #[command(flatten)]
    pub mc: Mc,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Serialize)]
struct IvOut {
    n: usize,
    v: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    stderr: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    excluded: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    excess: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    lorentz_domination: Option<f64>,
}

/// Intrinsic volumes of `cone`, with standard errors when it is a bare
/// simplicial cone.
fn cone_volumes(cone: &ConeSpec, mc: &Mc) -> CliResult<(IVVector, Option<Vec<MCEstimate>>, Option<u64>)> {
    match cone {
        ConeSpec::Simplicial(g) => {
            let f = iv_mc_simplicial(g, &sampling(mc)?)?;
            let v = IVVector { n: g.len(), v: f.estimates.iter().map(|e| e.mean).collect() };
            Ok((v, Some(f.estimates), Some(f.excluded)))
        }
        _ => Ok((cone.intrinsic_volumes(&sampling(mc)?)?, None, None)),
    }
}

pub fn iv(a: &IvArgs) -> CliResult<Report> {
    let cone = parse_cone(a.cone.as_deref())?;
    let (v, est, excluded) = cone_volumes(&cone, &a.mc)?;
    let (e, dom) = if v.n >= 2 { (Some(excess(&v)?), Some(lorentz_domination(&v)?)) } else { (None, None) };
    let stderr = est.as_ref().map(|es| es.iter().map(|e| e.stderr).collect::<Vec<_>>());
    let rows: Vec<Vec<String>> = v
        .v
        .iter()
        .enumerate()
        .map(|(j, x)| vec![j.to_string(), num(*x), stderr.as_ref().map(|s| num(s[j])).unwrap_or_default()])
        .collect();
    let out = IvOut { n: v.n, v: v.v.clone(), stderr, excluded, excess: e, lorentz_domination: dom };
    Ok(Report::new(&out, &["j", "v", "stderr"], &rows)?)
}

// ---------------------------------------------------------------- tube-bound

#[derive(Debug, Args)]
pub struct TubeArgs {
    #[arg(long)]
    pub cone: Option<String>,
    #[arg(long)]
    pub m: Option<usize>,
    /// Tube radii in [0, pi/2], comma separated.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub alpha: Vec<f64>,
    /// Condition thresholds t >= 1 (radius arcsin(1/t)), comma separated.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub t: Vec<f64>,
    #[command(flatten)]
    pub mc: Mc,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Serialize)]
struct TubeRow {
    alpha: f64,
    t: f64,
    primal: f64,
    full: f64,
    full_alt: f64,
    /// `min(full, 1)`.
    probability: f64,
    /// Whether the raw bound is informative, i.e. at most 1.
    valid: bool,
}

#[derive(Serialize)]
struct TubeOut {
    n: usize,
    m: usize,
    rows: Vec<TubeRow>,
}

pub fn tube_bound(a: &TubeArgs) -> CliResult<Report> {
    let cone = parse_cone(a.cone.as_deref())?;
    let m = required(a.m, "m")?;
    let use_t = match (a.alpha.is_empty(), a.t.is_empty()) {
        (false, true) => false,
        (true, false) => true,
        _ => return Err(config("tube-bound: give exactly one of --alpha or --t")),
    };
    let (v, _, _) = cone_volumes(&cone, &a.mc)?;
    let inputs = if use_t { &a.t } else { &a.alpha };
    let mut rows = Vec::new();
    let mut cells = Vec::new();
    for &x in inputs {
        let (alpha, t) = if use_t { (alpha_from_t(x)?, x) } else { (x, if x > 0.0 { t_from_alpha(x).unwrap_or(f64::INFINITY) } else { f64::INFINITY }) };
        let r = tube::tube_bound(&v, m, alpha)?;
        let alt = tube_bound_alt(&v, m, alpha)?;
        let row = TubeRow {
            alpha,
            t,
            primal: r.primal_bound,
            full: r.full_bound,
            full_alt: alt,
            probability: r.full_bound.min(1.0),
            valid: r.full_bound <= 1.0,
        };
        cells.push(vec![num(x), num(row.primal), num(row.full), bool_cell(row.valid), num(row.probability)]);
        rows.push(row);
    }
    let out = TubeOut { n: v.n, m, rows };
    Ok(Report::new(&out, &["alpha_or_t", "primal", "full", "valid", "probability"], &cells)?)
}

// ---------------------------------------------------------------- tail

#[derive(Debug, Args)]
pub struct TailArgs {
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub t: Vec<f64>,
    /// Use the self-dual bound with this excess constant.
    #[arg(long)]
    pub excess: Option<f64>,
    /// Use the self-dual bound with the constant computed for this cone.
    #[arg(long)]
    pub cone: Option<String>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Serialize)]
struct TailRow {
    t: f64,
    alpha: f64,
    bound: f64,
    primal: f64,
    probability: f64,
    valid: bool,
}

#[derive(Serialize)]
struct TailOut {
    theorem: &'static str,
    n: usize,
    m: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    excess: Option<f64>,
    rows: Vec<TailRow>,
}

/// Self-dual constant for a cone: the least `e` with `V_j <= e f_j(n)`.
fn selfdual_constant(cone: &ConeSpec, n: Option<usize>) -> CliResult<(usize, f64)> {
    if !cone.is_self_dual() {
        return Err(config("the self-dual bound needs a self-dual cone"));
    }
    let dim = cone.ambient_dim();
    if let Some(n) = n {
        if n != dim {
            return Err(config(format!("--n = {n} does not match the cone's ambient dimension {dim}")));
        }
    }
    let v = cone.intrinsic_volumes(&Sampling::new(1, 0))?;
    Ok((dim, lorentz_domination(&v)?))
}

pub fn tail(a: &TailArgs) -> CliResult<Report> {
    if a.t.is_empty() {
        return Err(config("--t is required"));
    }
    let m = required(a.m, "m")?;
    let (theorem, n, e) = match (&a.cone, a.excess) {
        (Some(_), Some(_)) => return Err(config("give at most one of --cone and --excess")),
        (Some(c), None) => {
            let (n, e) = selfdual_constant(&parse_cone(Some(c))?, a.n)?;
            ("selfdual", n, Some(e))
        }
        (None, Some(e)) => ("selfdual", required(a.n, "n")?, Some(e)),
        (None, None) => ("general", required(a.n, "n")?, None),
    };
    let mut rows = Vec::new();
    let mut cells = Vec::new();
    for &t in &a.t {
        let b: TailBound = match e {
            Some(e) => tail_bound_selfdual(n, m, t, e)?,
            None => tail_bound_general(n, m, t)?,
        };
        let row = TailRow { t, alpha: alpha_from_t(t)?, bound: b.bound, primal: b.bound / 2.0, probability: b.bound.min(1.0), valid: b.valid };
        cells.push(vec![num(t), num(row.primal), num(row.bound), bool_cell(row.valid), num(row.probability)]);
        rows.push(row);
    }
    let out = TailOut { theorem, n, m, excess: e, rows };
    Ok(Report::new(&out, &["alpha_or_t", "primal", "full", "valid", "probability"], &cells)?)
}

// ---------------------------------------------------------------- expect

#[derive(Debug, Args)]
pub struct ExpectArgs {
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long)]
    pub excess: Option<f64>,
    #[arg(long)]
    pub cone: Option<String>,
    /// Also evaluate E[ln C] for lines against the circular cone of this half-angle.
    #[arg(long)]
    pub beta: Option<f64>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Serialize)]
struct ExpectOut {
    n: usize,
    general: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    selfdual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    selfdual_valid: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    line_expectation: Option<f64>,
}

pub fn expect(a: &ExpectArgs) -> CliResult<Report> {
    let (n, e) = match (&a.cone, a.excess) {
        (Some(_), Some(_)) => return Err(config("give at most one of --cone and --excess")),
        (Some(c), None) => {
            let (n, e) = selfdual_constant(&parse_cone(Some(c))?, a.n)?;
            (n, Some(e))
        }
        (None, e) => (required(a.n, "n")?, e),
    };
    let general = expectation_bound_general(n as f64)?;
    let (selfdual, selfdual_valid) = match e {
        Some(e) => {
            let m = required(a.m, "m")?;
            if m == 0 || m >= n {
                return Err(config(format!("need 1 <= m <= n - 1, got m = {m}")));
            }
            (Some(expectation_bound_selfdual(m as f64, e)?), Some(m >= 8))
        }
        None => (None, None),
    };
    let line_expectation = match a.beta {
        Some(b) => {
            if a.m.is_some_and(|m| m != 1) {
                return Err(config("--beta evaluates the line case and needs m = 1"));
            }
            Some(expected_log_condition_line(n, b)?)
        }
        None => None,
    };
    let mut cells = vec![vec!["general".into(), num(general), bool_cell(n >= 3)]];
    if let (Some(s), Some(v)) = (selfdual, selfdual_valid) {
        cells.push(vec!["selfdual".into(), num(s), bool_cell(v)]);
    }
    if let Some(x) = line_expectation {
        cells.push(vec!["line_expectation".into(), num(x), bool_cell(true)]);
    }
    let out = ExpectOut { n, general, selfdual, selfdual_valid, line_expectation };
    Ok(Report::new(&out, &["quantity", "value", "valid"], &cells)?)
}

// ---------------------------------------------------------------- avg-charpoly

#[derive(Debug, Args)]
pub struct CharpolyArgs {
    /// Square matrix as JSON rows, e.g. '[[2,1],[1,3]]'.
    #[arg(long)]
    pub matrix: Option<String>,
    #[arg(long)]
    pub l: Option<usize>,
    /// Point at which the sampled average is evaluated.
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub t: f64,
    /// Skip the Monte Carlo estimates.
    #[arg(long)]
    pub exact_only: bool,
    #[command(flatten)]
    pub mc: Mc,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Serialize)]
struct Estimate {
    mean: f64,
    stderr: f64,
}

impl From<MCEstimate> for Estimate {
    fn from(e: MCEstimate) -> Self {
        Estimate { mean: e.mean, stderr: e.stderr }
    }
}

#[derive(Serialize)]
struct AtT {
    t: f64,
    exact: f64,
    mean: f64,
    stderr: f64,
}

#[derive(Serialize)]
struct RestrictedDet {
    exact: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    mean: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    stderr: Option<f64>,
}

#[derive(Serialize)]
struct CharpolyOut {
    k: usize,
    l: usize,
    exact: Vec<f64>,
    positive: Vec<f64>,
    restricted_det: RestrictedDet,
    #[serde(skip_serializing_if = "Option::is_none")]
    mc: Option<AtT>,
    #[serde(skip_serializing_if = "Option::is_none")]
    mc_coeffs: Option<Vec<Estimate>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    samples: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
}

pub fn avg_charpoly(a: &CharpolyArgs) -> CliResult<Report> {
    let src = a.matrix.as_deref().ok_or_else(|| config("--matrix is required"))?;
    let rows: Vec<Vec<f64>> = serde_json::from_str(src).map_err(|e| config(format!("--matrix must be JSON rows: {e}")))?;
    let mat = matrix_from_rows(&rows)?;
    let k = mat.nrows();
    let l = required(a.l, "l")?;
    if l > k {
        return Err(config(format!("need 0 <= l <= k = {k}, got l = {l}")));
    }
    if !a.t.is_finite() {
        return Err(config("--t must be finite"));
    }
    let exact = avg_twisted_exact(&mat, l)?;
    let positive = avg_positive_exact(&mat, l)?;
    let det_exact = avg_restricted_det_exact(&mat, l)?;
    let mut cells: Vec<Vec<String>> = Vec::new();
    let mut out = CharpolyOut {
        k,
        l,
        exact: exact.coeffs.clone(),
        positive: positive.coeffs,
        restricted_det: RestrictedDet { exact: det_exact, mean: None, stderr: None },
        mc: None,
        mc_coeffs: None,
        samples: None,
        seed: None,
    };
    if a.exact_only {
        for (p, c) in exact.coeffs.iter().enumerate() {
            cells.push(vec!["coeff".into(), p.to_string(), num(*c), String::new(), String::new()]);
        }
        cells.push(vec!["restricted_det".into(), l.to_string(), num(det_exact), String::new(), String::new()]);
    } else {
        let s = sampling(&a.mc)?;
        let coeffs = mc_avg_twisted_coeffs(&mat, l, &s)?;
        let at_t = mc_avg_twisted(&mat, l, a.t, &s)?;
        let det = mc_avg_restricted_det(&mat, l, &s)?;
        for (p, (c, e)) in exact.coeffs.iter().zip(&coeffs).enumerate() {
            cells.push(vec!["coeff".into(), p.to_string(), num(*c), num(e.mean), num(e.stderr)]);
        }
        cells.push(vec!["at_t".into(), num(a.t), num(exact.eval(a.t)), num(at_t.mean), num(at_t.stderr)]);
        cells.push(vec!["restricted_det".into(), l.to_string(), num(det_exact), num(det.mean), num(det.stderr)]);
        out.restricted_det.mean = Some(det.mean);
        out.restricted_det.stderr = Some(det.stderr);
        out.mc = Some(AtT { t: a.t, exact: exact.eval(a.t), mean: at_t.mean, stderr: at_t.stderr });
        out.mc_coeffs = Some(coeffs.into_iter().map(Estimate::from).collect());
        out.samples = Some(s.samples);
        out.seed = Some(s.seed);
    }
    Ok(Report::new(&out, &["quantity", "index", "exact", "mean", "stderr"], &cells)?)
}

// ---------------------------------------------------------------- mc-condition

#[derive(Debug, Args)]
pub struct ConditionArgs {
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, default_value_t = 1)]
    pub m: usize,
    /// Half-angle of the circular cone.
    #[arg(long)]
    pub beta: Option<f64>,
    /// Thresholds; defaults to ceil(n^1.5)+1, 2 n^1.5 and 5 n^1.5.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub t: Vec<f64>,
    /// Allow m >= 2, whose distance formula is validated only for n = 3.
    #[arg(long)]
    pub experimental: bool,
    #[command(flatten)]
    pub mc: Mc,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Serialize)]
struct ConditionRow {
    t: f64,
    empirical_tail: f64,
    stderr: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    exact_tail: Option<f64>,
    theoretical_bound: f64,
    valid: bool,
}

#[derive(Serialize)]
struct ConditionOut {
    n: usize,
    m: usize,
    beta: f64,
    samples: u64,
    seed: u64,
    experimental: bool,
    rows: Vec<ConditionRow>,
    log_mean: f64,
    log_stderr: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    log_exact: Option<f64>,
    log_bound: f64,
    resampled: u64,
    capped: u64,
}

/// Default thresholds for `n`.
pub fn default_thresholds(n: usize) -> Vec<f64> {
    let p = (n as f64).powf(1.5);
    vec![p.ceil() + 1.0, 2.0 * p, 5.0 * p]
}

pub fn mc_condition(a: &ConditionArgs) -> CliResult<Report> {
    let n = required(a.n, "n")?;
    let beta = required(a.beta, "beta")?;
    let m = a.m;
    if n < 3 {
        return Err(config(format!("mc-condition: need n >= 3, got {n}")));
    }
    if m == 0 || m >= n {
        return Err(config(format!("mc-condition: need 1 <= m <= n - 1, got m = {m}")));
    }
    if m >= 2 && !a.experimental {
        return Err(config("mc-condition: m >= 2 requires --experimental"));
    }
    let ts = if a.t.is_empty() { default_thresholds(n) } else { a.t.clone() };
    if let Some(t) = ts.iter().find(|t| !(**t > 1.0) || !t.is_finite()) {
        return Err(config(format!("mc-condition: thresholds must be finite and > 1, got {t}")));
    }
    let s = sampling(&a.mc)?;
    let (tails, log, resampled, capped) = if m == 1 {
        let st = line_statistics(n, beta, &ts, &s)?;
        (st.tails, st.log_mean, st.resampled, st.capped)
    } else {
        let samples = sample_condition_subspace(n, m, beta, &s)?;
        let mut log = Moments::default();
        for x in &samples.samples {
            log.push(x.condition.ln());
        }
        (empirical_tails(&samples, &ts, s.seed), log.estimate(s.seed), samples.resampled, samples.capped)
    };
    let mut rows = Vec::new();
    let mut cells = Vec::new();
    for te in tails {
        let b = tail_bound_general(n, m, te.t)?;
        let exact_tail = if m == 1 { Some(exact_tail_line(n, beta, te.t)?) } else { None };
        cells.push(vec![num(te.t), num(te.tail.mean), num(te.tail.stderr), num(b.bound), bool_cell(b.valid)]);
        rows.push(ConditionRow { t: te.t, empirical_tail: te.tail.mean, stderr: te.tail.stderr, exact_tail, theoretical_bound: b.bound, valid: b.valid });
    }
    let out = ConditionOut {
        n,
        m,
        beta,
        samples: s.samples,
        seed: s.seed,
        experimental: m >= 2,
        rows,
        log_mean: log.mean,
        log_stderr: log.stderr,
        log_exact: if m == 1 { Some(expected_log_condition_line(n, beta)?) } else { None },
        log_bound: expectation_bound_general(n as f64)?,
        resampled,
        capped,
    };
    Ok(Report::new(&out, &["t", "empirical_tail", "stderr", "theoretical_bound", "valid"], &cells)?)
}

// ---------------------------------------------------------------- check-conjectures

#[derive(Debug, Args)]
pub struct ConjectureArgs {
    /// Largest n1, n2 in the Lorentz convolution sweep.
    #[arg(long, default_value_t = 40)]
    pub max: usize,
    /// Largest n in the log-concavity grid of circular cones.
    #[arg(long, default_value_t = 30)]
    pub max_circular: usize,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Serialize, Default)]
pub struct LogConcavitySummary {
    pub checked: usize,
    pub failures: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_failure: Option<String>,
}

impl LogConcavitySummary {
    fn record(&mut self, v: &IVVector, label: impl FnOnce() -> String) {
        self.checked += 1;
        let r = check_log_concavity(v);
        if !r.holds {
            self.failures += 1;
            if self.first_failure.is_none() {
                self.first_failure = Some(format!("{} at j = {}", label(), r.first_violation.unwrap_or(0)));
            }
        }
    }
}

#[derive(Serialize)]
struct ConvolutionSummary {
    max: usize,
    checked: usize,
    failures: usize,
    max_ratio: f64,
    worst: [usize; 3],
}

#[derive(Serialize)]
struct ConjectureOut {
    convolution: ConvolutionSummary,
    log_concavity_orthant: LogConcavitySummary,
    log_concavity_circular: LogConcavitySummary,
    log_concavity_products: LogConcavitySummary,
}

/// Circular cones on the grid `3 <= n <= max_n`, half-angles [`beta_grid`].
pub fn circular_grid(max_n: usize) -> CliResult<Vec<(usize, f64, IVVector)>> {
    let mut out = Vec::new();
    for n in 3..=max_n {
        for b in beta_grid() {
            out.push((n, b, iv_circular(n, b)?));
        }
    }
    Ok(out)
}

pub fn check_conjectures(a: &ConjectureArgs) -> CliResult<Report> {
    if a.max < 2 {
        return Err(config("--max must be at least 2"));
    }
    let sweep = convolution_sweep(a.max)?;
    let worst = sweep.iter().max_by(|x, y| x.max_ratio.total_cmp(&y.max_ratio)).expect("nonempty sweep");
    let convolution = ConvolutionSummary {
        max: a.max,
        checked: sweep.len(),
        failures: sweep.iter().filter(|c| !c.holds).count(),
        max_ratio: worst.max_ratio,
        worst: [worst.n1, worst.n2, worst.argmax],
    };
    let mut orth = LogConcavitySummary::default();
    for n in 1..=60 {
        orth.record(&iv_orthant(n)?, || format!("orthant n = {n}"));
    }
    let grid = circular_grid(a.max_circular)?;
    let mut circ = LogConcavitySummary::default();
    let mut prod = LogConcavitySummary::default();
    for (n, b, v) in &grid {
        circ.record(v, || format!("circular n = {n} beta = {b}"));
    }
    for (i, (n1, b1, v1)) in grid.iter().enumerate() {
        for (n2, b2, v2) in &grid[i..] {
            prod.record(&iv_product(v1, v2), || format!("circular({n1}, {b1}) x circular({n2}, {b2})"));
        }
    }
    let cells = vec![
        vec!["convolution".into(), convolution.checked.to_string(), convolution.failures.to_string(), num(convolution.max_ratio)],
        vec!["log_concavity_orthant".into(), orth.checked.to_string(), orth.failures.to_string(), String::new()],
        vec!["log_concavity_circular".into(), circ.checked.to_string(), circ.failures.to_string(), String::new()],
        vec!["log_concavity_products".into(), prod.checked.to_string(), prod.failures.to_string(), String::new()],
    ];
    let out = ConjectureOut { convolution, log_concavity_orthant: orth, log_concavity_circular: circ, log_concavity_products: prod };
    Ok(Report::new(&out, &["check", "checked", "failures", "max_ratio"], &cells)?)
}

// ---------------------------------------------------------------- inequality-suite

#[derive(Debug, Args)]
pub struct SuiteArgs {
    #[command(flatten)]
    pub common: Common,
}

pub fn inequality_suite(_: &SuiteArgs) -> CliResult<Report> {
    let fams = tube::inequality_suite()?;
    let cells: Vec<Vec<String>> = fams
        .iter()
        .map(|f| vec![f.name.into(), f.checked.to_string(), f.equalities.to_string(), num(f.max_ratio), f.violations.len().to_string()])
        .collect();
    Ok(Report::new(&fams, &["family", "checked", "equalities", "max_ratio", "violations"], &cells)?)
}

// ---------------------------------------------------------------- g-report

#[derive(Debug, Args)]
pub struct GArgs {
    #[arg(long, default_value_t = 1)]
    pub m_min: usize,
    #[arg(long, default_value_t = 40)]
    pub m_max: usize,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Serialize)]
struct GRow {
    #[serde(flatten)]
    report: GReport,
    bound: f64,
    holds: bool,
}

/// Window used for `m`: at least `n <= 200` and `n <= 20m`.
pub fn g_window(m: usize) -> usize {
    (20 * m).max(200)
}

pub fn g_report(a: &GArgs) -> CliResult<Report> {
    if a.m_min == 0 || a.m_max < a.m_min {
        return Err(config("need 1 <= --m-min <= --m-max"));
    }
    let mut rows = Vec::new();
    let mut cells = Vec::new();
    for m in a.m_min..=a.m_max {
        let r = g_properties(m, g_window(m))?;
        let bound = 2.5 * (m as f64).sqrt();
        let holds = r.holds();
        cells.push(vec![
            m.to_string(),
            r.n_max.to_string(),
            r.log_concavity_failure.map(|n| n.to_string()).unwrap_or_default(),
            r.argmax.to_string(),
            num(r.max_value),
            num(bound),
            bool_cell(holds),
        ]);
        rows.push(GRow { report: r, bound, holds });
    }
    Ok(Report::new(&rows, &["m", "n_max", "log_concavity_failure", "argmax", "max_value", "bound", "holds"], &cells)?)
}
