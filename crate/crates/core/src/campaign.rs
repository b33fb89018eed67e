//! Batch sweeps over `(rho, b)` grids: configuration, execution on a worker
//! pool, per-trial and per-cell output, and the theory comparison.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::{coupled_statistics, trial_statistics, TrialRecord};
use crate::error::{Error, Result};
use crate::geometry::Metric;
use crate::models::{load_table, ConnectionModel, ModelKind};
use crate::sampler::{couple_torus_to_square, fmt_real, sample_network, SampleParams};
use crate::theory::{
    chen_stein_terms, poisson_pmf_to_tail, theory_report, tv_distance,
    ChenSteinParams, DiscreteDistribution,
};

/// Two-sided 99% normal quantile.
pub const Z99: f64 = 2.576;

pub const SEED_ENV: &str = "RCM_SEED";

pub const TRIAL_COLUMNS: [&str; 13] = [
    "rho",
    "b",
    "metric",
    "trial",
    "n_points",
    "n_edges",
    "isolated",
    "n_components",
    "connected",
    "mean_degree",
    "isolated_torus",
    "isolated_square",
    "isolated_boundary",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CampaignMetric {
    Torus,
    Square,
    /// Torus graph thinned to the square graph on the same points.
    Coupled,
}

impl CampaignMetric {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Torus => "torus",
            Self::Square => "square",
            Self::Coupled => "coupled",
        }
    }

    /// Metric of the graph whose statistics fill the base columns.
    pub fn graph_metric(&self) -> Metric {
        match self {
            Self::Torus => Metric::Torus,
            Self::Square | Self::Coupled => Metric::Square,
        }
    }
}

impl FromStr for CampaignMetric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "torus" => Ok(Self::Torus),
            "square" => Ok(Self::Square),
            "coupled" => Ok(Self::Coupled),
            other => Err(Error::Parse(format!("unknown metric {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl OutputFormat {
    pub fn extension(&self) -> &'static str {
        match self {
            Self::Csv => "csv",
            Self::Json => "json",
        }
    }
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            other => Err(Error::Parse(format!("unknown format {other:?}"))),
        }
    }
}

/// Kernel selection in a config file. Tables come inline or from a file
/// whose path is relative to the config file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelSpec {
    UnitDisk,
    Gaussian,
    LogNormal {
        sigma_db: f64,
        eta: f64,
    },
    Table {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        knots: Option<Vec<(f64, f64)>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        path: Option<PathBuf>,
    },
}

impl ModelSpec {
    pub fn to_kind(&self, base_dir: &Path) -> Result<ModelKind> {
        Ok(match self {
            Self::UnitDisk => ModelKind::UnitDisk,
            Self::Gaussian => ModelKind::Gaussian,
            Self::LogNormal { sigma_db, eta } => ModelKind::LogNormal {
                sigma_db: *sigma_db,
                eta: *eta,
            },
            Self::Table { knots, path } => match (knots, path) {
                (Some(k), None) => ModelKind::Table { knots: k.clone() },
                (None, Some(p)) => ModelKind::Table {
                    knots: load_table(&base_dir.join(p))?,
                },
                _ => {
                    return Err(Error::Config(
                        "model: a table needs exactly one of `knots` or `path`".into(),
                    ))
                }
            },
        })
    }

    /// Builds the model without requiring it to pass validation.
    pub fn build(&self, base_dir: &Path) -> Result<ConnectionModel> {
        ConnectionModel::new(self.to_kind(base_dir)?)
    }
}

/// `unit_disk`, `gaussian`, `log_normal:SIGMA_DB:ETA` or `table:PATH`.
impl FromStr for ModelSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("cannot parse model {s:?}"));
        let mut parts = s.splitn(2, ':');
        let head = parts.next().unwrap_or_default();
        let rest = parts.next();
        match (head, rest) {
            ("unit_disk", None) => Ok(Self::UnitDisk),
            ("gaussian", None) => Ok(Self::Gaussian),
            ("log_normal" | "lognormal", Some(args)) => {
                let (s_db, eta) = args.split_once(':').ok_or_else(bad)?;
                Ok(Self::LogNormal {
                    sigma_db: s_db.parse().map_err(|_| bad())?,
                    eta: eta.parse().map_err(|_| bad())?,
                })
            }
            ("table", Some(path)) if !path.is_empty() => Ok(Self::Table {
                knots: None,
                path: Some(PathBuf::from(path)),
            }),
            _ => Err(bad()),
        }
    }
}

fn default_epsilon() -> f64 {
    ChenSteinParams::DEFAULT_EPSILON
}

fn default_output() -> PathBuf {
    PathBuf::from("results")
}

fn yes() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CampaignConfig {
    pub model: ModelSpec,
    pub rho_list: Vec<f64>,
    pub b_list: Vec<f64>,
    pub metric: CampaignMetric,
    pub trials: u64,
    pub master_seed: u64,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    /// Directory receiving `trials.<ext>` and `summary.<ext>`.
    #[serde(default = "default_output")]
    pub output_path: PathBuf,
    #[serde(default)]
    pub format: OutputFormat,
    /// Whether to evaluate the theory columns of the summary.
    #[serde(default = "yes")]
    pub theory: bool,
    /// Directory that relative table paths resolve against.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

impl CampaignConfig {
    pub fn from_json(text: &str, base_dir: &Path) -> Result<Self> {
        let mut cfg: Self =
            serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.base_dir = base_dir.to_path_buf();
        cfg.check()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let base = path.parent().unwrap_or(Path::new(".")).to_path_buf();
        Self::from_json(&text, &base)
    }

    /// Field-level checks. Cells with `ln rho + b <= 0` are not rejected
    /// here; they are skipped at run time.
    pub fn check(&self) -> Result<()> {
        let field = |name: &str, msg: &str| Err(Error::Config(format!("{name}: {msg}")));
        if self.rho_list.is_empty() {
            return field("rho_list", "must not be empty");
        }
        if self.b_list.is_empty() {
            return field("b_list", "must not be empty");
        }
        if self.rho_list.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
            return field("rho_list", "densities must be positive and finite");
        }
        if self.b_list.iter().any(|b| !b.is_finite()) {
            return field("b_list", "values must be finite");
        }
        if self.trials < 1 {
            return field("trials", "must be at least 1");
        }
        if !(self.epsilon > 0.0 && self.epsilon < 0.5) {
            return field("epsilon", "must lie in (0, 1/2)");
        }
        if let ModelSpec::Table { knots, path } = &self.model {
            if knots.is_some() == path.is_some() {
                return field("model", "a table needs exactly one of `knots` or `path`");
            }
        }
        Ok(())
    }

    /// Applies the `RCM_SEED` override when it is set.
    pub fn apply_env(&mut self) -> Result<()> {
        if let Some(seed) = seed_override(std::env::var(SEED_ENV).ok().as_deref())? {
            self.master_seed = seed;
        }
        Ok(())
    }

    pub fn build_model(&self) -> Result<ConnectionModel> {
        self.model.build(&self.base_dir)
    }

    pub fn cells(&self) -> Vec<(f64, f64)> {
        self.rho_list
            .iter()
            .flat_map(|&rho| self.b_list.iter().map(move |&b| (rho, b)))
            .collect()
    }
}

pub fn seed_override(value: Option<&str>) -> Result<Option<u64>> {
    match value.map(str::trim) {
        None | Some("") => Ok(None),
        Some(v) => v
            .parse()
            .map(Some)
            .map_err(|_| Error::Config(format!("{SEED_ENV}: not an unsigned 64-bit integer: {v:?}"))),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrialRow {
    pub rho: f64,
    pub b: f64,
    pub metric: CampaignMetric,
    pub record: TrialRecord,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CellSummary {
    pub rho: f64,
    pub b: f64,
    pub metric: String,
    pub status: String,
    pub reason: Option<String>,
    pub trials: u64,
    pub mean_isolated: Option<f64>,
    pub var_isolated: Option<f64>,
    pub ci_isolated: Option<f64>,
    pub p_no_isolated: Option<f64>,
    pub ci_p_no_isolated: Option<f64>,
    pub frac_connected: Option<f64>,
    pub ci_frac_connected: Option<f64>,
    pub mean_degree: Option<f64>,
    pub ci_mean_degree: Option<f64>,
    pub mean_isolated_torus: Option<f64>,
    pub ci_isolated_torus: Option<f64>,
    pub mean_isolated_boundary: Option<f64>,
    pub ci_isolated_boundary: Option<f64>,
    pub tv_to_poisson: Option<f64>,
    pub expected_isolated: Option<f64>,
    pub expected_isolated_error: Option<f64>,
    pub asymptotic_mean: Option<f64>,
    pub prob_no_isolated: Option<f64>,
    pub mean_degree_theory: Option<f64>,
    pub boundary_excess: Option<f64>,
    pub epsilon: f64,
    pub b1: Option<f64>,
    pub b2: Option<f64>,
    pub theory_note: Option<String>,
    pub chen_stein_note: Option<String>,
}

impl CellSummary {
    pub fn is_skipped(&self) -> bool {
        self.status == "skipped"
    }
}

pub const SUMMARY_COLUMNS: [&str; 31] = [
    "rho",
    "b",
    "metric",
    "status",
    "reason",
    "trials",
    "mean_isolated",
    "var_isolated",
    "ci_isolated",
    "p_no_isolated",
    "ci_p_no_isolated",
    "frac_connected",
    "ci_frac_connected",
    "mean_degree",
    "ci_mean_degree",
    "mean_isolated_torus",
    "ci_isolated_torus",
    "mean_isolated_boundary",
    "ci_isolated_boundary",
    "tv_to_poisson",
    "expected_isolated",
    "expected_isolated_error",
    "asymptotic_mean",
    "prob_no_isolated",
    "mean_degree_theory",
    "boundary_excess",
    "epsilon",
    "b1",
    "b2",
    "theory_note",
    "chen_stein_note",
];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub cells: Vec<CellSummary>,
}

impl SweepSummary {
    pub fn cell(&self, rho: f64, b: f64) -> Option<&CellSummary> {
        self.cells.iter().find(|c| c.rho == rho && c.b == b)
    }
}

#[derive(Clone, Debug)]
pub struct CampaignResult {
    pub rows: Vec<TrialRow>,
    pub summary: SweepSummary,
}

/// Mean and 99% half-width of a sample.
pub fn mean_ci(xs: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = if xs.len() > 1 {
        xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    (mean, var, Z99 * (var / n).sqrt())
}

/// Proportion and its 99% normal-approximation half-width.
pub fn proportion_ci(hits: usize, n: usize) -> (f64, f64) {
    let p = hits as f64 / n as f64;
    (p, Z99 * (p * (1.0 - p) / n as f64).sqrt())
}

/// Runs one trial of a cell.
pub fn run_trial(
    model: &Arc<ConnectionModel>,
    rho: f64,
    b: f64,
    metric: CampaignMetric,
    master_seed: u64,
    trial: u64,
) -> Result<TrialRecord> {
    let params = SampleParams::new(rho, b, model.clone(), metric.graph_metric(), master_seed, trial)?;
    Ok(match metric {
        CampaignMetric::Coupled => coupled_statistics(&couple_torus_to_square(&params)?),
        _ => trial_statistics(&sample_network(&params)?),
    })
}

/// Reason a cell cannot be simulated, if any.
fn cell_obstacle(
    model: &Arc<ConnectionModel>,
    rho: f64,
    b: f64,
    metric: CampaignMetric,
    master_seed: u64,
) -> Option<String> {
    let mut checks = vec![metric.graph_metric()];
    if metric == CampaignMetric::Coupled {
        checks.push(Metric::Torus);
    }
    for m in checks {
        match SampleParams::new(rho, b, model.clone(), m, master_seed, 0) {
            Err(e) => return Some(e.to_string()),
            Ok(p) if p.reach() > 0.5 => {
                return Some(format!(
                    "connection reach r * cutoff = {} exceeds 1/2",
                    p.reach()
                ))
            }
            Ok(_) => {}
        }
    }
    None
}

/// Executes every trial of every cell on `workers` threads (0 = all cores)
/// and assembles the summary. Output order is cell-major, trial-minor,
/// independent of the worker count.
pub fn run_campaign(cfg: &CampaignConfig, workers: usize) -> Result<CampaignResult> {
    cfg.check()?;
    let model = Arc::new(cfg.build_model()?);
    model.ensure_usable()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Config(format!("worker pool: {e}")))?;

    let cells = cfg.cells();
    let obstacles: Vec<Option<String>> = cells
        .iter()
        .map(|&(rho, b)| cell_obstacle(&model, rho, b, cfg.metric, cfg.master_seed))
        .collect();
    let units: Vec<(usize, u64)> = cells
        .iter()
        .enumerate()
        .filter(|(i, _)| obstacles[*i].is_none())
        .flat_map(|(i, _)| (0..cfg.trials).map(move |t| (i, t)))
        .collect();

    let outcomes: Vec<Result<TrialRecord>> = pool.install(|| {
        units
            .par_iter()
            .map(|&(i, t)| {
                let (rho, b) = cells[i];
                run_trial(&model, rho, b, cfg.metric, cfg.master_seed, t)
            })
            .collect()
    });

    let mut per_cell: Vec<Vec<TrialRecord>> = vec![Vec::new(); cells.len()];
    let mut failures: Vec<Option<String>> = obstacles;
    for (&(i, _), outcome) in units.iter().zip(outcomes) {
        match outcome {
            Ok(rec) => per_cell[i].push(rec),
            Err(e) => {
                failures[i].get_or_insert_with(|| e.to_string());
            }
        }
    }

    let params = ChenSteinParams::new(cfg.epsilon)?;
    let summaries: Vec<CellSummary> = pool.install(|| {
        cells
            .par_iter()
            .enumerate()
            .map(|(i, &(rho, b))| match &failures[i] {
                Some(reason) => CellSummary {
                    rho,
                    b,
                    metric: cfg.metric.as_str().into(),
                    status: "skipped".into(),
                    reason: Some(reason.clone()),
                    epsilon: cfg.epsilon,
                    ..Default::default()
                },
                None => summarize_cell(&model, rho, b, cfg, &params, &per_cell[i]),
            })
            .collect()
    });

    let mut rows = Vec::with_capacity(units.len());
    for (i, recs) in per_cell.into_iter().enumerate() {
        if failures[i].is_some() {
            continue;
        }
        let (rho, b) = cells[i];
        rows.extend(recs.into_iter().map(|record| TrialRow {
            rho,
            b,
            metric: cfg.metric,
            record,
        }));
    }
    Ok(CampaignResult {
        rows,
        summary: SweepSummary { cells: summaries },
    })
}

fn summarize_cell(
    model: &ConnectionModel,
    rho: f64,
    b: f64,
    cfg: &CampaignConfig,
    params: &ChenSteinParams,
    recs: &[TrialRecord],
) -> CellSummary {
    let n = recs.len();
    let iso: Vec<f64> = recs.iter().map(|r| r.isolated as f64).collect();
    let (mean_iso, var_iso, ci_iso) = mean_ci(&iso);
    let (p0, ci_p0) = proportion_ci(recs.iter().filter(|r| r.isolated == 0).count(), n);
    let (fc, ci_fc) = proportion_ci(recs.iter().filter(|r| r.connected).count(), n);
    let deg: Vec<f64> = recs.iter().map(|r| r.mean_degree).collect();
    let (mean_deg, _, ci_deg) = mean_ci(&deg);

    let mut s = CellSummary {
        rho,
        b,
        metric: cfg.metric.as_str().into(),
        status: "ok".into(),
        trials: n as u64,
        mean_isolated: Some(mean_iso),
        var_isolated: Some(var_iso),
        ci_isolated: Some(ci_iso),
        p_no_isolated: Some(p0),
        ci_p_no_isolated: Some(ci_p0),
        frac_connected: Some(fc),
        ci_frac_connected: Some(ci_fc),
        mean_degree: Some(mean_deg),
        ci_mean_degree: Some(ci_deg),
        epsilon: cfg.epsilon,
        ..Default::default()
    };
    if cfg.metric == CampaignMetric::Coupled {
        let t: Vec<f64> = recs.iter().filter_map(|r| r.isolated_torus).map(|x| x as f64).collect();
        let e: Vec<f64> = recs.iter().filter_map(|r| r.isolated_boundary).map(|x| x as f64).collect();
        let (mt, _, ct) = mean_ci(&t);
        let (me, _, ce) = mean_ci(&e);
        s.mean_isolated_torus = Some(mt);
        s.ci_isolated_torus = Some(ct);
        s.mean_isolated_boundary = Some(me);
        s.ci_isolated_boundary = Some(ce);
    }
    if !cfg.theory {
        return s;
    }

    match theory_report(model, rho, b, cfg.metric.graph_metric()) {
        Ok(rep) => {
            let e = rep.expected_isolated.expect("finite-density report");
            s.expected_isolated = Some(e.value);
            s.expected_isolated_error = Some(e.abs_error);
            s.asymptotic_mean = Some(rep.asymptotic_mean);
            s.prob_no_isolated = Some(rep.prob_no_isolated);
            s.mean_degree_theory = Some(rep.mean_degree);
            s.boundary_excess = rep.boundary_excess;
            if e.value > 0.0 {
                let empirical = DiscreteDistribution::from_samples(recs.iter().map(|r| r.isolated));
                let po = poisson_pmf_to_tail(e.value, 1e-12);
                if let (Ok(emp), Ok(po)) = (empirical, po) {
                    s.tv_to_poisson = Some(tv_distance(&emp, &po));
                }
            }
        }
        Err(err) => s.theory_note = Some(err.to_string()),
    }
    match chen_stein_terms(model, rho, b, params) {
        Ok(cs) => {
            s.b1 = Some(cs.b1);
            s.b2 = Some(cs.b2);
        }
        Err(err) => s.chen_stein_note = Some(err.to_string()),
    }
    s
}

fn opt(x: Option<f64>) -> String {
    x.map(fmt_real).unwrap_or_default()
}

fn opt_count(x: Option<usize>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

pub fn trial_row_fields(row: &TrialRow) -> [String; 13] {
    let r = &row.record;
    [
        fmt_real(row.rho),
        fmt_real(row.b),
        row.metric.as_str().to_string(),
        r.trial_index.to_string(),
        r.n_points.to_string(),
        r.n_edges.to_string(),
        r.isolated.to_string(),
        r.n_components.to_string(),
        r.connected.to_string(),
        fmt_real(r.mean_degree),
        opt_count(r.isolated_torus),
        opt_count(r.isolated_square),
        opt_count(r.isolated_boundary),
    ]
}

fn summary_fields(c: &CellSummary) -> Vec<String> {
    vec![
        fmt_real(c.rho),
        fmt_real(c.b),
        c.metric.clone(),
        c.status.clone(),
        c.reason.clone().unwrap_or_default(),
        c.trials.to_string(),
        opt(c.mean_isolated),
        opt(c.var_isolated),
        opt(c.ci_isolated),
        opt(c.p_no_isolated),
        opt(c.ci_p_no_isolated),
        opt(c.frac_connected),
        opt(c.ci_frac_connected),
        opt(c.mean_degree),
        opt(c.ci_mean_degree),
        opt(c.mean_isolated_torus),
        opt(c.ci_isolated_torus),
        opt(c.mean_isolated_boundary),
        opt(c.ci_isolated_boundary),
        opt(c.tv_to_poisson),
        opt(c.expected_isolated),
        opt(c.expected_isolated_error),
        opt(c.asymptotic_mean),
        opt(c.prob_no_isolated),
        opt(c.mean_degree_theory),
        opt(c.boundary_excess),
        fmt_real(c.epsilon),
        opt(c.b1),
        opt(c.b2),
        c.theory_note.clone().unwrap_or_default(),
        c.chen_stein_note.clone().unwrap_or_default(),
    ]
}

fn csv_err(path: &Path, e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::Parse(format!("{}: {other:?}", path.display())),
    }
}

pub fn write_trials_csv<W: Write>(rows: &[TrialRow], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(TRIAL_COLUMNS)?;
    for row in rows {
        w.write_record(trial_row_fields(row))?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_summary_csv<W: Write>(summary: &SweepSummary, out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SUMMARY_COLUMNS)?;
    for c in &summary.cells {
        w.write_record(summary_fields(c))?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize, Deserialize)]
struct JsonRow {
    rho: f64,
    b: f64,
    metric: CampaignMetric,
    #[serde(flatten)]
    record: TrialRecord,
}

/// Parses the per-trial CSV back into rows.
pub fn read_trials_csv<R: std::io::Read>(input: R) -> Result<Vec<TrialRow>> {
    let mut rd = csv::Reader::from_reader(input);
    let header = rd.headers().map_err(|e| Error::Parse(e.to_string()))?.clone();
    if header.iter().ne(TRIAL_COLUMNS.iter().copied()) {
        return Err(Error::Parse(format!("unexpected trial header {header:?}")));
    }
    let mut rows = Vec::new();
    for rec in rd.records() {
        let rec = rec.map_err(|e| Error::Parse(e.to_string()))?;
        let f = |i: usize| &rec[i];
        let num = |i: usize| -> Result<f64> {
            f(i).parse().map_err(|_| Error::Parse(format!("{}: {:?}", TRIAL_COLUMNS[i], f(i))))
        };
        let int = |i: usize| -> Result<usize> {
            f(i).parse().map_err(|_| Error::Parse(format!("{}: {:?}", TRIAL_COLUMNS[i], f(i))))
        };
        let maybe = |i: usize| -> Result<Option<usize>> {
            if f(i).is_empty() {
                Ok(None)
            } else {
                int(i).map(Some)
            }
        };
        rows.push(TrialRow {
            rho: num(0)?,
            b: num(1)?,
            metric: f(2).parse()?,
            record: TrialRecord {
                trial_index: int(3)? as u64,
                n_points: int(4)?,
                n_edges: int(5)?,
                isolated: int(6)?,
                n_components: int(7)?,
                connected: f(8)
                    .parse()
                    .map_err(|_| Error::Parse(format!("connected: {:?}", f(8))))?,
                mean_degree: num(9)?,
                isolated_torus: maybe(10)?,
                isolated_square: maybe(11)?,
                isolated_boundary: maybe(12)?,
            },
        });
    }
    Ok(rows)
}

/// Paths written by [`write_outputs`].
#[derive(Clone, Debug, PartialEq)]
pub struct OutputFiles {
    pub trials: PathBuf,
    pub summary: PathBuf,
}

pub fn output_files(dir: &Path, format: OutputFormat) -> OutputFiles {
    OutputFiles {
        trials: dir.join(format!("trials.{}", format.extension())),
        summary: dir.join(format!("summary.{}", format.extension())),
    }
}

/// Writes the per-trial table and the per-cell summary into `dir`.
pub fn write_outputs(result: &CampaignResult, dir: &Path, format: OutputFormat) -> Result<OutputFiles> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let files = output_files(dir, format);
    let create = |p: &Path| {
        fs::File::create(p)
            .map(std::io::BufWriter::new)
            .map_err(|e| Error::io(p, e))
    };
    let mut trials = create(&files.trials)?;
    let mut summary = create(&files.summary)?;
    match format {
        OutputFormat::Csv => {
            write_trials_csv(&result.rows, &mut trials).map_err(|e| csv_err(&files.trials, e))?;
            write_summary_csv(&result.summary, &mut summary)
                .map_err(|e| csv_err(&files.summary, e))?;
        }
        OutputFormat::Json => {
            let rows: Vec<JsonRow> = result
                .rows
                .iter()
                .map(|r| JsonRow {
                    rho: r.rho,
                    b: r.b,
                    metric: r.metric,
                    record: r.record.clone(),
                })
                .collect();
            let json_err = |p: &Path| {
                let p = p.to_path_buf();
                move |e: serde_json::Error| match e.io_error_kind() {
                    Some(kind) => Error::io(&p, std::io::Error::from(kind)),
                    None => Error::Parse(e.to_string()),
                }
            };
            serde_json::to_writer_pretty(&mut trials, &rows).map_err(json_err(&files.trials))?;
            serde_json::to_writer_pretty(&mut summary, &result.summary)
                .map_err(json_err(&files.summary))?;
        }
    }
    for (w, p) in [(&mut trials, &files.trials), (&mut summary, &files.summary)] {
        w.flush().map_err(|e| Error::io(p, e))?;
    }
    Ok(files)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(json: &str) -> Result<CampaignConfig> {
        CampaignConfig::from_json(json, Path::new("."))
    }

    const BASE: &str = r#"{"model": {"kind": "unit_disk"}, "rho_list": [200], "b_list": [0, 1],
        "metric": "torus", "trials": 3, "master_seed": 5, "theory": false}"#;

    #[test]
    fn config_defaults_and_unknown_keys() {
        let c = cfg(BASE).unwrap();
        assert_eq!(c.epsilon, 0.25);
        assert_eq!(c.format, OutputFormat::Csv);
        let typo = BASE.replace("\"trials\"", "\"trails\"");
        let err = cfg(&typo).unwrap_err().to_string();
        assert!(err.contains("trails"), "{err}");
    }

    #[test]
    fn config_field_checks_name_the_field() {
        for (from, to, field) in [
            ("[200]", "[]", "rho_list"),
            ("[0, 1]", "[]", "b_list"),
            ("\"trials\": 3", "\"trials\": 0", "trials"),
            ("\"theory\": false", "\"theory\": false, \"epsilon\": 0.7", "epsilon"),
        ] {
            let err = cfg(&BASE.replace(from, to)).unwrap_err().to_string();
            assert!(err.contains(field), "{field}: {err}");
        }
    }

    #[test]
    fn model_spec_strings() {
        assert_eq!("unit_disk".parse::<ModelSpec>().unwrap(), ModelSpec::UnitDisk);
        assert_eq!(
            "log_normal:4:2".parse::<ModelSpec>().unwrap(),
            ModelSpec::LogNormal { sigma_db: 4.0, eta: 2.0 }
        );
        assert!("table:".parse::<ModelSpec>().is_err());
        assert!("disk".parse::<ModelSpec>().is_err());
    }

    #[test]
    fn seed_override_parsing() {
        assert_eq!(seed_override(None).unwrap(), None);
        assert_eq!(seed_override(Some("17")).unwrap(), Some(17));
        assert!(seed_override(Some("x")).is_err());
    }

    #[test]
    fn cardinality_and_skips() {
        let c = cfg(&BASE.replace("[200]", "[2, 200]").replace("[0, 1]", "[-1, 0, 1]")).unwrap();
        let res = run_campaign(&c, 1).unwrap();
        assert_eq!(res.summary.cells.len(), 6);
        let skipped = res.summary.cell(2.0, -1.0).unwrap();
        assert!(skipped.is_skipped());
        assert!(skipped.reason.as_deref().unwrap().contains("log rho + b <= 0"));
        let ok = res.summary.cells.iter().filter(|c| !c.is_skipped()).count();
        assert_eq!(res.rows.len(), ok * 3);
    }

    #[test]
    fn ci_helpers() {
        let (m, v, h) = mean_ci(&[1.0, 2.0, 3.0]);
        assert_eq!((m, v), (2.0, 1.0));
        assert!((h - Z99 / 3f64.sqrt()).abs() < 1e-15);
        assert_eq!(mean_ci(&[4.0]).2, 0.0);
        assert_eq!(proportion_ci(0, 10), (0.0, 0.0));
    }
}
