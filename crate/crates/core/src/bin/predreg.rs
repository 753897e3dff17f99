use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use predreg::dgp::{
    simulate_continuous_path, simulate_discrete, DgpContinuousConfig, DgpDiscreteConfig, VolModel,
};
use predreg::estimators::Parity;
use predreg::experiments::{d2_study, run_grid, Method};
use predreg::inference::{Sided, TestOutcome};
use predreg::io::{load_experiment, parse_csv, CsvSchema, RunManifest};
use predreg::stats::RngStream;
use predreg::{Error, Result};

#[derive(Parser)]
#[command(name = "predreg", version, about = "Sign-instrument tests for predictive regressions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Test H0: beta = 0 on a CSV of returns and predictor levels.
    Test(TestArgs),
    /// Run a Monte Carlo experiment file and write rejection tables.
    Table(TableArgs),
    /// Simulate one path of a design and dump it as CSV.
    Simulate(SimulateArgs),
    /// Simulate the D_2 ratio and write its histogram.
    D2(D2Args),
}

#[derive(Clone, Copy, ValueEnum)]
enum TestMethod {
    /// Group t-test with `--q` groups.
    Tq,
    /// Hybrid test with the OLS residual variance.
    Hybrid,
    /// Hybrid test with the mean of y^2 as variance.
    HybridRawY,
}

#[derive(Clone, Copy, ValueEnum)]
enum ParityArg {
    Even,
    Odd,
}

impl From<ParityArg> for Parity {
    fn from(p: ParityArg) -> Self {
        match p {
            ParityArg::Even => Parity::Even,
            ParityArg::Odd => Parity::Odd,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SidedArg {
    Two,
    Right,
    Left,
}

impl From<SidedArg> for Sided {
    fn from(s: SidedArg) -> Self {
        match s {
            SidedArg::Two => Sided::Two,
            SidedArg::Right => Sided::Right,
            SidedArg::Left => Sided::Left,
        }
    }
}

#[derive(Args)]
struct TestArgs {
    /// CSV file with a header row.
    #[arg(long)]
    data: PathBuf,
    #[arg(long, default_value = "date")]
    date_col: String,
    #[arg(long, default_value = "y")]
    y_col: String,
    #[arg(long, default_value = "x")]
    x_col: String,
    /// Minimum number of data rows.
    #[arg(long, default_value_t = 10)]
    min_rows: usize,
    #[arg(long, value_enum, default_value = "hybrid")]
    method: TestMethod,
    /// Number of groups for the group t-test; may be repeated.
    #[arg(long, default_value = "12")]
    q: Vec<usize>,
    /// Parity stream for the intercept variants.
    #[arg(long, value_enum, default_value = "even")]
    parity: ParityArg,
    /// Allow a nonzero intercept (first-differenced estimators).
    #[arg(long)]
    intercept: bool,
    #[arg(long, value_enum, default_value = "right")]
    sided: SidedArg,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    /// Directory for `test_results.csv`.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct TableArgs {
    /// Experiment file (JSON) or a manifest written by a previous run.
    #[arg(long)]
    config: PathBuf,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Override the master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the number of replications.
    #[arg(long)]
    reps: Option<usize>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long, value_enum)]
    sided: Option<SidedArg>,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Continuous,
    Discrete,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long, value_enum, default_value = "continuous")]
    kind: KindArg,
    /// Design settings (JSON); defaults are used for missing keys.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    vol: Option<VolModel>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    kappa: Option<f64>,
    /// Years (continuous) or observations (discrete).
    #[arg(long = "T")]
    span: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Replication index within the seed.
    #[arg(long, default_value_t = 0)]
    stream: u64,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Args)]
struct D2Args {
    #[arg(long, default_value_t = 100_000)]
    draws: usize,
    #[arg(long, default_value_t = 1000)]
    steps: usize,
    #[arg(long, default_value_t = 4.303)]
    threshold: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn marker(p: f64) -> &'static str {
    if p <= 0.01 {
        "**"
    } else if p <= 0.05 {
        "*"
    } else {
        ""
    }
}

fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn cmd_test(a: TestArgs) -> Result<()> {
    let schema = CsvSchema {
        date_col: a.date_col,
        y_col: a.y_col,
        x_col: a.x_col,
        min_rows: a.min_rows,
    };
    let data = parse_csv(&a.data, &schema)?;
    let sample = data.to_sample()?;
    let parity: Parity = a.parity.into();
    let methods: Vec<Method> = match (a.method, a.intercept) {
        (TestMethod::Tq, false) => a.q.iter().map(|&q| Method::Tq { q }).collect(),
        (TestMethod::Tq, true) => a.q.iter().map(|&q| Method::GroupedHybrid { parity, q }).collect(),
        (TestMethod::Hybrid, false) => vec![Method::Hybrid],
        (TestMethod::Hybrid, true) => vec![Method::HybridIntercept { parity }],
        (TestMethod::HybridRawY, false) => vec![Method::HybridRawY],
        (TestMethod::HybridRawY, true) => {
            return Err(Error::Config(
                "hybrid-raw-y has no intercept variant; use --method hybrid with --intercept".into(),
            ))
        }
    };
    let sided: Sided = a.sided.into();
    let outcomes: Vec<(Method, TestOutcome)> = methods
        .into_iter()
        .map(|m| m.evaluate(&sample, a.alpha, sided).map(|o| (m, o)))
        .collect::<Result<_>>()?;

    println!(
        "{} observations ({} to {}), {}-sided, alpha = {}",
        sample.len(),
        data.dates[1],
        data.dates[data.len() - 1],
        sided.as_str(),
        a.alpha
    );
    for (m, o) in &outcomes {
        println!(
            "{:<8} stat = {:>9.4}{:<2}  p = {:.4}  ref {}  {}",
            m.label(),
            o.statistic,
            marker(o.p_value),
            o.p_value,
            o.ref_dist,
            if o.reject { "reject" } else { "do not reject" }
        );
        if o.validity_warning {
            println!("         warning: alpha above the range where this test is known to be valid");
        }
    }

    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::Io(e.to_string());
    w.write_record(["method", "statistic", "ref_dist", "p_value", "sided", "alpha", "reject", "marker"])
        .map_err(io)?;
    for (m, o) in &outcomes {
        w.write_record([
            m.label(),
            o.statistic.to_string(),
            o.ref_dist.to_string(),
            o.p_value.to_string(),
            o.sided.as_str().to_string(),
            o.alpha.to_string(),
            o.reject.to_string(),
            marker(o.p_value).to_string(),
        ])
        .map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    print!("{}", String::from_utf8_lossy(&bytes));
    if let Some(dir) = a.out {
        ensure_dir(&dir)?;
        write_file(&dir.join("test_results.csv"), &bytes)?;
    }
    Ok(())
}

fn cmd_table(a: TableArgs) -> Result<()> {
    let mut grid = load_experiment(&a.config)?;
    if let Some(s) = a.seed {
        grid.master_seed = s;
    }
    if let Some(r) = a.reps {
        grid.n_reps = r;
    }
    if let Some(al) = a.alpha {
        grid.alpha = al;
    }
    if let Some(s) = a.sided {
        grid.sided = s.into();
    }
    grid.validate()?;
    let table = run_grid(&grid, a.workers)?;

    ensure_dir(&a.out)?;
    let mut csv_bytes = Vec::new();
    table.write_csv(&mut csv_bytes)?;
    write_file(&a.out.join("table.csv"), &csv_bytes)?;
    let text = table.to_text();
    write_file(&a.out.join("table.txt"), text.as_bytes())?;
    let manifest = serde_json::to_string_pretty(&RunManifest::new(grid)).expect("manifest serializes");
    write_file(&a.out.join("manifest.json"), manifest.as_bytes())?;
    print!("{text}");
    let degenerate: usize = table.cells.iter().map(|c| c.degenerate).sum();
    if degenerate > 0 {
        println!("{degenerate} degenerate replications counted as non-rejections");
    }
    println!("wrote table.csv, table.txt, manifest.json to {}", a.out.display());
    Ok(())
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

fn cmd_simulate(a: SimulateArgs) -> Result<()> {
    let mut stream = RngStream::new(a.seed, a.stream);
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::Io(e.to_string());
    let name = match a.kind {
        KindArg::Continuous => {
            let mut cfg: DgpContinuousConfig = match &a.config {
                Some(p) => read_json(p)?,
                None => DgpContinuousConfig::default(),
            };
            cfg.vol = a.vol.unwrap_or(cfg.vol);
            cfg.beta = a.beta.unwrap_or(cfg.beta);
            cfg.kappa_bar = a.kappa.unwrap_or(cfg.kappa_bar);
            cfg.years = a.span.unwrap_or(cfg.years);
            let p = simulate_continuous_path(&cfg, &mut stream)?;
            w.write_record(["step", "y", "x_lag", "x_level", "sigma"]).map_err(io)?;
            for i in 0..p.y.len() {
                w.write_record([
                    (i + 1).to_string(),
                    p.y[i].to_string(),
                    p.x_lag[i].to_string(),
                    p.x_level[i].to_string(),
                    p.vol.sigma[i].to_string(),
                ])
                .map_err(io)?;
            }
            "continuous_path.csv"
        }
        KindArg::Discrete => {
            let mut cfg: DgpDiscreteConfig = match &a.config {
                Some(p) => read_json(p)?,
                None => DgpDiscreteConfig::default(),
            };
            cfg.vol = a.vol.unwrap_or(cfg.vol);
            cfg.beta = a.beta.unwrap_or(cfg.beta);
            cfg.kappa_bar = a.kappa.unwrap_or(cfg.kappa_bar);
            if let Some(t) = a.span {
                if t.fract() != 0.0 || t < 0.0 {
                    return Err(Error::Config(format!("discrete T must be a whole number, got {t}")));
                }
                cfg.n_obs = t as usize;
            }
            let s = simulate_discrete(&cfg, &mut stream)?;
            let lev = s.require_levels()?;
            w.write_record(["t", "y", "x_lag"]).map_err(io)?;
            for i in 0..s.len() {
                w.write_record([(i + 1).to_string(), s.y()[i].to_string(), lev[i].to_string()])
                    .map_err(io)?;
            }
            "discrete_path.csv"
        }
    };
    ensure_dir(&a.out)?;
    let path = a.out.join(name);
    write_file(&path, &w.into_inner().map_err(|e| Error::Io(e.to_string()))?)?;
    println!("wrote {}", path.display());
    Ok(())
}

fn cmd_d2(a: D2Args) -> Result<()> {
    let s = d2_study(a.draws, a.steps, a.threshold, a.seed, a.workers)?;
    println!("draws     {}", s.n_draws);
    println!("steps     {}", s.n_steps);
    println!("min       {:.4}", s.min_value);
    println!("P(D2 > {}) = {:.4} (mc se {:.4})", s.threshold, s.tail_prob, s.tail_mc_se);
    if let Some(dir) = a.out {
        ensure_dir(&dir)?;
        let mut buf = Vec::new();
        s.write_histogram_csv(&mut buf)?;
        write_file(&dir.join("d2_histogram.csv"), &buf)?;
        let summary = serde_json::json!({
            "n_draws": s.n_draws,
            "n_steps": s.n_steps,
            "threshold": s.threshold,
            "seed": a.seed,
            "min_value": s.min_value,
            "tail_prob": s.tail_prob,
            "tail_mc_se": s.tail_mc_se,
            "overflow": s.overflow,
        });
        write_file(
            &dir.join("d2_summary.json"),
            serde_json::to_string_pretty(&summary).expect("summary serializes").as_bytes(),
        )?;
        println!("wrote d2_histogram.csv, d2_summary.json to {}", dir.display());
    }
    Ok(())
}

fn hint(e: &Error) -> Option<&'static str> {
    match e {
        Error::Partition { .. } => Some("use fewer groups (--q) or a longer sample"),
        Error::InsufficientData { .. } => Some("supply more rows or lower --min-rows"),
        Error::DegenerateDenominator(_) => Some("the predictor is zero throughout; check the x column"),
        Error::DegenerateVariance => Some("y is fitted exactly by x; the data look synthetic or duplicated"),
        Error::Parse { .. } => Some("fix or remove the offending row"),
        _ => None,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Test(a) => cmd_test(a),
        Command::Table(a) => cmd_table(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::D2(a) => cmd_d2(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if let Some(h) = hint(&e) {
                eprintln!("hint: {h}");
            }
            ExitCode::FAILURE
        }
    }
}
