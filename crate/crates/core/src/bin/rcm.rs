use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;

use rcm::campaign::{
    run_campaign, write_outputs, CampaignConfig, CampaignMetric, CampaignResult, ModelSpec,
    OutputFormat,
};
use rcm::sampler::{fmt_real, truncation_bias};
use rcm::theory::{chen_stein_terms, theory_report, ChenSteinParams, ChenSteinTerms, TheoryReport};
use rcm::{Error, Metric};

#[derive(Parser)]
#[command(name = "rcm", version, about = "Isolated nodes and connectivity in random connection model networks")]
struct Cli {
    /// Worker threads (0 = one per core).
    #[arg(long, global = true, default_value_t = 0)]
    workers: usize,
    /// Output directory; overrides the config's `output_path`.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// csv or json; overrides the config's `format`.
    #[arg(long, global = true)]
    format: Option<OutputFormat>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the sweep described by a config file.
    Simulate { config: PathBuf },
    /// Run the sweep with torus-to-square coupling regardless of the config's metric.
    Couple { config: PathBuf },
    /// Print the finite-density and asymptotic theory for one parameter point.
    Theory {
        /// unit_disk, gaussian, log_normal:SIGMA_DB:ETA or table:PATH
        #[arg(long)]
        model: ModelSpec,
        #[arg(long)]
        rho: f64,
        #[arg(long, allow_negative_numbers = true)]
        b: f64,
        #[arg(long, default_value_t = ChenSteinParams::DEFAULT_EPSILON)]
        epsilon: f64,
        #[arg(long, default_value = "torus")]
        metric: Metric,
    },
    /// Check the config's connection function against the model conditions.
    ValidateModel { config: PathBuf },
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_) | Error::Parse(_) | Error::Parameter(_) | Error::PointOutOfCell { .. } => 2,
        Error::Model(_) | Error::Divergent(_) | Error::Quadrature { .. } => 3,
        Error::Io { .. } => 4,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("rcm: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn run(cli: Cli) -> rcm::Result<u8> {
    match &cli.command {
        Command::Simulate { config } => simulate(&cli, config, None),
        Command::Couple { config } => simulate(&cli, config, Some(CampaignMetric::Coupled)),
        Command::Theory {
            model,
            rho,
            b,
            epsilon,
            metric,
        } => theory(&cli, model, *rho, *b, *epsilon, *metric),
        Command::ValidateModel { config } => validate_model(config),
    }
}

fn load_config(cli: &Cli, path: &Path) -> rcm::Result<CampaignConfig> {
    let mut cfg = CampaignConfig::load(path)?;
    cfg.apply_env()?;
    if let Some(out) = &cli.output {
        cfg.output_path = out.clone();
    }
    if let Some(format) = cli.format {
        cfg.format = format;
    }
    Ok(cfg)
}

fn simulate(cli: &Cli, path: &Path, force: Option<CampaignMetric>) -> rcm::Result<u8> {
    let mut cfg = load_config(cli, path)?;
    if let Some(metric) = force {
        cfg.metric = metric;
    }
    let result = run_campaign(&cfg, cli.workers)?;
    let files = write_outputs(&result, &cfg.output_path, cfg.format)?;
    report_cells(&result);
    println!("trials  -> {}", files.trials.display());
    println!("summary -> {}", files.summary.display());
    Ok(0)
}

fn report_cells(result: &CampaignResult) {
    let out = std::io::stdout();
    let mut out = out.lock();
    for c in &result.summary.cells {
        if let Some(reason) = &c.reason {
            eprintln!("warning: skipped rho = {} b = {}: {reason}", c.rho, c.b);
            continue;
        }
        let f = |x: Option<f64>| x.map_or("-".to_string(), |v| format!("{v:.4}"));
        let _ = write!(
            out,
            "rho={} b={} {}: mean_isolated={} ±{} P(W=0)={} connected={} mean_degree={}",
            c.rho,
            c.b,
            c.metric,
            f(c.mean_isolated),
            f(c.ci_isolated),
            f(c.p_no_isolated),
            f(c.frac_connected),
            f(c.mean_degree),
        );
        if c.mean_isolated_boundary.is_some() {
            let _ = write!(
                out,
                " isolated_torus={} isolated_boundary={} ±{}",
                f(c.mean_isolated_torus),
                f(c.mean_isolated_boundary),
                f(c.ci_isolated_boundary)
            );
        }
        if c.expected_isolated.is_some() {
            let _ = write!(
                out,
                " | theory E={} e^-b={} tv={}",
                f(c.expected_isolated),
                f(c.asymptotic_mean),
                f(c.tv_to_poisson)
            );
        }
        let _ = writeln!(out);
    }
}

#[derive(Serialize)]
struct TheoryOutput {
    model: String,
    report: TheoryReport,
    chen_stein: Option<ChenSteinTerms>,
    chen_stein_note: Option<String>,
}

fn theory(cli: &Cli, spec: &ModelSpec, rho: f64, b: f64, epsilon: f64, metric: Metric) -> rcm::Result<u8> {
    let model = spec.build(Path::new("."))?;
    model.ensure_usable()?;
    let params = ChenSteinParams::new(epsilon)?;
    let report = theory_report(&model, rho, b, metric)?;
    let (chen_stein, chen_stein_note) = match chen_stein_terms(&model, rho, b, &params) {
        Ok(t) => (Some(t), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let out = TheoryOutput {
        model: model.kind().label(),
        report,
        chen_stein,
        chen_stein_note,
    };
    match cli.format {
        Some(OutputFormat::Json) => {
            let text = serde_json::to_string_pretty(&out).map_err(|e| Error::Parse(e.to_string()))?;
            println!("{text}");
        }
        Some(OutputFormat::Csv) => print_theory_csv(&out),
        None => print_theory_text(&out, epsilon),
    }
    Ok(0)
}

fn print_theory_text(out: &TheoryOutput, epsilon: f64) {
    let r = &out.report;
    let e = r.expected_isolated.expect("finite-density report");
    println!("model             {}", out.model);
    println!("rho               {}", r.rho);
    println!("b                 {}", r.b);
    println!("metric            {}", r.metric.map_or("-", |m| m.as_str()));
    println!("expected_isolated {:.10} (quadrature error {:.1e})", e.value, e.abs_error);
    println!("asymptotic_mean   {:.10}", r.asymptotic_mean);
    println!("prob_no_isolated  {:.10}", r.prob_no_isolated);
    println!("mean_degree       {:.10}", r.mean_degree);
    match r.boundary_excess {
        Some(x) => println!("boundary_excess   {x:.10}"),
        None => println!("boundary_excess   -"),
    }
    println!("epsilon           {epsilon}");
    match (&out.chen_stein, &out.chen_stein_note) {
        (Some(cs), _) => {
            println!("b1                {:.10}", cs.b1);
            println!("b2                {:.10} (quadrature error {:.1e})", cs.b2, cs.b2_abs_error);
            println!("(finite-density evaluation of asymptotic expressions; b3 not computed)");
        }
        (None, Some(note)) => println!("chen-stein        unavailable: {note}"),
        _ => {}
    }
}

fn print_theory_csv(out: &TheoryOutput) {
    let r = &out.report;
    let e = r.expected_isolated.expect("finite-density report");
    let opt = |x: Option<f64>| x.map(fmt_real).unwrap_or_default();
    println!(
        "model,rho,b,metric,expected_isolated,expected_isolated_error,asymptotic_mean,prob_no_isolated,mean_degree,boundary_excess,epsilon,b1,b2,b2_error"
    );
    println!(
        "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
        out.model,
        fmt_real(r.rho),
        fmt_real(r.b),
        r.metric.map_or("", |m| m.as_str()),
        fmt_real(e.value),
        fmt_real(e.abs_error),
        fmt_real(r.asymptotic_mean),
        fmt_real(r.prob_no_isolated),
        fmt_real(r.mean_degree),
        opt(r.boundary_excess),
        out.chen_stein.map(|c| fmt_real(c.epsilon)).unwrap_or_default(),
        opt(out.chen_stein.map(|c| c.b1)),
        opt(out.chen_stein.map(|c| c.b2)),
        opt(out.chen_stein.map(|c| c.b2_abs_error)),
    );
}

fn validate_model(path: &Path) -> rcm::Result<u8> {
    let cfg = CampaignConfig::load(path)?;
    let model = cfg.build_model()?;
    let c = model.c_estimate();
    println!("model           {}", model.kind().label());
    println!("{}", model.validation());
    println!("C               {} (error {:.1e})", c.value, c.abs_error);
    println!("cutoff          {}", model.cutoff());
    if !model.is_usable() {
        eprintln!("rcm: {}", model.ensure_usable().unwrap_err());
        return Ok(3);
    }
    for (rho, b) in cfg.cells() {
        match truncation_bias(&model, rho, b) {
            Ok(bias) => println!("rho={rho} b={b}: expected truncated pairs per trial {bias:.3e}"),
            Err(e) => println!("rho={rho} b={b}: {e}"),
        }
    }
    println!("model passes validation");
    Ok(0)
}
