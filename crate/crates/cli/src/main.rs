//! Command-line front end: reads one JSON experiment configuration, runs a
//! subcommand, and writes reproducible CSV/JSON artifacts plus a manifest
//! with content checksums.

mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use reftrend_core::error::{Error as CoreError, ErrorKind};
use reftrend_core::estimator::{decompose_error, estimate_trend};
use reftrend_core::experiments::Experiment;
use reftrend_core::fbm::GENERATOR_NAME;

use config::RawConfig;
use output::{fmt_float, svg_loglog, OutputDir, RunManifest};

#[derive(Parser)]
#[command(
    name = "reftrend",
    version,
    about = "Reflected fractional SDE simulation and trend estimation studies"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Experiment configuration file (JSON)
    #[arg(long)]
    config: PathBuf,
    /// Override the master seed from the config
    #[arg(long)]
    seed: Option<u64>,
    /// Directory for output artifacts
    #[arg(long, default_value = "out")]
    out_dir: PathBuf,
    /// Worker threads for replication sweeps (default: all cores)
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate one noisy path and dump it as CSV
    Simulate {
        #[command(flatten)]
        common: Common,
        /// Replication (stream) index
        #[arg(long, default_value_t = 0)]
        rep: u64,
        /// Noise level; defaults to the first configured epsilon
        #[arg(long)]
        epsilon: Option<f64>,
    },
    /// Solve the deterministic trend system and dump it as CSV
    Trend {
        #[command(flatten)]
        common: Common,
    },
    /// Estimate the trend from one simulated path, with the error split
    Estimate {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 0)]
        rep: u64,
        #[arg(long)]
        epsilon: Option<f64>,
    },
    /// Monte Carlo risk curve over the epsilon ladder and its log-log slope
    RiskSweep {
        #[command(flatten)]
        common: Common,
        /// Also write a self-contained SVG chart of the risk curve
        #[arg(long)]
        svg: bool,
    },
    /// eps^2 scaling of sup |X_eps - x| and sup |Y_eps - y|
    Lemma4 {
        #[command(flatten)]
        common: Common,
    },
    /// Pointwise variance and bias asymptotics at one grid time
    Asymptotics {
        #[command(flatten)]
        common: Common,
        /// Evaluation time (grid-aligned); defaults to T/2
        #[arg(long)]
        time: Option<f64>,
    },
    /// Print the asymptotic variance constant for the configured kernel and H
    Sigma2 {
        #[command(flatten)]
        common: Common,
    },
}

enum CliError {
    /// Unreadable or unparseable configuration: exit 2
    Config(String),
    /// Core library failure: exit by error kind
    Core(CoreError),
    /// Output I/O failure: exit 1
    Output(std::io::Error),
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Output(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Core(e) => match e.kind() {
                ErrorKind::Config => 2,
                ErrorKind::Numerical => 3,
                ErrorKind::Precondition => 4,
            },
            CliError::Output(_) => 1,
        }
    }

    fn message(&self) -> String {
        match self {
            CliError::Config(m) => m.clone(),
            CliError::Core(e) => e.to_string(),
            CliError::Output(e) => format!("output error: {e}"),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.exit_code())
        }
    }
}

struct Loaded {
    cfg: reftrend_core::experiments::ExperimentConfig,
    config_sha256: String,
}

fn load(common: &Common) -> Result<Loaded, CliError> {
    let bytes = std::fs::read(&common.config).map_err(|e| {
        CliError::Config(format!(
            "cannot read config file {}: {e}",
            common.config.display()
        ))
    })?;
    let raw: RawConfig = serde_json::from_str(
        std::str::from_utf8(&bytes)
            .map_err(|e| CliError::Config(format!("config is not UTF-8: {e}")))?,
    )
    .map_err(|e| {
        CliError::Config(format!(
            "invalid config {}: {e}",
            common.config.display()
        ))
    })?;
    let (mut cfg, warnings) = raw.build()?;
    for w in warnings {
        eprintln!("warning: {w}");
    }
    if let Some(seed) = common.seed {
        cfg.master_seed = seed;
    }
    Ok(Loaded {
        cfg,
        config_sha256: output::sha256_hex(&bytes),
    })
}

fn with_pool<T: Send>(
    threads: Option<usize>,
    f: impl FnOnce() -> T + Send,
) -> Result<T, CliError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Config(format!("cannot build thread pool: {e}")))?;
    Ok(pool.install(f))
}

fn manifest_for(
    command: &str,
    loaded: &Loaded,
    common: &Common,
    started: Instant,
) -> RunManifest {
    RunManifest {
        tool_version: env!("CARGO_PKG_VERSION"),
        command: command.to_string(),
        config_sha256: loaded.config_sha256.clone(),
        master_seed: loaded.cfg.master_seed,
        prng: GENERATOR_NAME,
        grid_steps: loaded.cfg.steps,
        horizon: loaded.cfg.horizon,
        threads: common.threads,
        wall_ms: started.elapsed().as_millis(),
        outputs: Vec::new(),
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Simulate {
            common,
            rep,
            epsilon,
        } => cmd_simulate(common, rep, epsilon),
        Command::Trend { common } => cmd_trend(common),
        Command::Estimate {
            common,
            rep,
            epsilon,
        } => cmd_estimate(common, rep, epsilon),
        Command::RiskSweep { common, svg } => cmd_risk_sweep(common, svg),
        Command::Lemma4 { common } => cmd_lemma4(common),
        Command::Asymptotics { common, time } => cmd_asymptotics(common, time),
        Command::Sigma2 { common } => cmd_sigma2(common),
    }
}

fn cmd_simulate(common: Common, rep: u64, epsilon: Option<f64>) -> Result<(), CliError> {
    let started = Instant::now();
    let loaded = load(&common)?;
    let exp = Experiment::prepare(loaded.cfg.clone())?;
    let eps = epsilon.unwrap_or(exp.config().epsilons[0]);
    let fbm = exp.sample_path(rep);
    let noisy = exp.solve_noisy(&fbm, eps)?;
    let grid = *exp.grid();
    let tube = exp.tube_grid();

    let mut out = OutputDir::create(&common.out_dir)?;
    out.csv(
        "path.csv",
        &["t", "X", "Y", "W", "l", "u"],
        (0..=grid.n()).map(|k| {
            vec![
                fmt_float(grid.time(k)),
                fmt_float(noisy.state[k]),
                fmt_float(noisy.reflection[k]),
                fmt_float(noisy.noise[k]),
                fmt_float(tube.lower[k]),
                fmt_float(tube.upper[k]),
            ]
        }),
    )?;
    println!(
        "simulate: rep {rep}, epsilon {}, {} steps -> {}",
        eps,
        grid.n(),
        common.out_dir.join("path.csv").display()
    );
    let manifest = manifest_for("simulate", &loaded, &common, started);
    out.finish(manifest)?;
    Ok(())
}

fn cmd_trend(common: Common) -> Result<(), CliError> {
    let started = Instant::now();
    let loaded = load(&common)?;
    let exp = Experiment::prepare(loaded.cfg.clone())?;
    let grid = *exp.grid();
    let sol = exp.trend();

    let mut out = OutputDir::create(&common.out_dir)?;
    out.csv(
        "trend.csv",
        &["t", "x", "y", "tau", "regime"],
        (0..=grid.n()).map(|k| {
            vec![
                fmt_float(grid.time(k)),
                fmt_float(sol.state[k]),
                fmt_float(sol.reflection[k]),
                fmt_float(sol.trend[k]),
                sol.regime[k].name().to_string(),
            ]
        }),
    )?;
    println!(
        "trend: {} steps, contact tolerance {:.3e} -> {}",
        grid.n(),
        sol.contact_tol(),
        common.out_dir.join("trend.csv").display()
    );
    let manifest = manifest_for("trend", &loaded, &common, started);
    out.finish(manifest)?;
    Ok(())
}

fn cmd_estimate(common: Common, rep: u64, epsilon: Option<f64>) -> Result<(), CliError> {
    let started = Instant::now();
    let loaded = load(&common)?;
    let exp = Experiment::prepare(loaded.cfg.clone())?;
    let eps = epsilon.unwrap_or(exp.config().epsilons[0]);
    let fbm = exp.sample_path(rep);
    let noisy = exp.solve_noisy(&fbm, eps)?;
    let est_cfg = exp.estimator_config(eps)?;
    let grid = *exp.grid();
    let tau_hat = estimate_trend(&noisy.state, &grid, &est_cfg)?;

    let mut rows = Vec::new();
    for (i, &idx) in exp.eval_indices().iter().enumerate() {
        let d = decompose_error(
            &noisy,
            exp.trend(),
            &fbm.values,
            &exp.config().drift,
            eps,
            &est_cfg,
            idx,
        )?;
        rows.push(vec![
            fmt_float(grid.time(idx)),
            fmt_float(tau_hat[i]),
            fmt_float(exp.trend().trend[idx]),
            fmt_float(d.alpha),
            fmt_float(d.beta),
            fmt_float(d.gamma),
            fmt_float(d.zeta),
            fmt_float(d.eta),
        ]);
    }
    let mut out = OutputDir::create(&common.out_dir)?;
    out.csv(
        "estimate.csv",
        &["t", "tau_hat", "tau", "alpha", "beta", "gamma", "zeta", "eta"],
        rows,
    )?;
    println!(
        "estimate: rep {rep}, epsilon {eps}, bandwidth {:.6} -> {}",
        est_cfg.bandwidth,
        common.out_dir.join("estimate.csv").display()
    );
    let manifest = manifest_for("estimate", &loaded, &common, started);
    out.finish(manifest)?;
    Ok(())
}

fn cmd_risk_sweep(common: Common, svg: bool) -> Result<(), CliError> {
    let started = Instant::now();
    let loaded = load(&common)?;
    let cfg = loaded.cfg.clone();
    let report = with_pool(common.threads, move || -> Result<_, CoreError> {
        let exp = Experiment::prepare(cfg)?;
        exp.run_risk_sweep()
    })??;

    let mut out = OutputDir::create(&common.out_dir)?;
    out.csv(
        "risk_curve.csv",
        &[
            "epsilon",
            "bandwidth",
            "risk",
            "std_error",
            "assumption_ratio",
            "bandwidth_steps",
        ],
        report.entries.iter().map(|e| {
            vec![
                fmt_float(e.epsilon),
                fmt_float(e.bandwidth),
                fmt_float(e.risk),
                fmt_float(e.std_error),
                fmt_float(e.assumption_ratio),
                fmt_float(e.bandwidth_steps),
            ]
        }),
    )?;
    out.csv(
        "pointwise_risk.csv",
        &["epsilon", "t", "risk"],
        report.entries.iter().flat_map(|e| {
            report
                .metadata
                .eval_times
                .iter()
                .zip(&e.pointwise_risk)
                .map(|(&t, &r)| vec![fmt_float(e.epsilon), fmt_float(t), fmt_float(r)])
                .collect::<Vec<_>>()
        }),
    )?;
    out.json("risk_report.json", &report)?;
    if svg {
        let pts: Vec<(f64, f64)> = report
            .entries
            .iter()
            .map(|e| (e.epsilon, e.risk))
            .collect();
        out.raw(
            "risk_curve.svg",
            &svg_loglog(
                "sup-risk vs epsilon (log-log)",
                &pts,
                report.fit.slope,
                report.fit.intercept,
            ),
        )?;
    }
    for e in &report.entries {
        println!(
            "  eps {:>10.6}: risk {:.6e} +- {:.1e}",
            e.epsilon, e.risk, e.std_error
        );
    }
    println!(
        "risk-sweep: slope {:.4} +- {:.4} (target {:.4})",
        report.fit.slope, report.fit.ci_half_width, report.target_slope
    );
    let manifest = manifest_for("risk-sweep", &loaded, &common, started);
    out.finish(manifest)?;
    Ok(())
}

fn cmd_lemma4(common: Common) -> Result<(), CliError> {
    let started = Instant::now();
    let loaded = load(&common)?;
    let cfg = loaded.cfg.clone();
    let report = with_pool(common.threads, move || -> Result<_, CoreError> {
        let exp = Experiment::prepare(cfg)?;
        exp.lemma4_study()
    })??;

    let mut out = OutputDir::create(&common.out_dir)?;
    out.csv(
        "lemma4.csv",
        &["epsilon", "x_risk", "x_std_error", "y_risk", "y_std_error"],
        report.entries.iter().map(|e| {
            vec![
                fmt_float(e.epsilon),
                fmt_float(e.x_risk),
                fmt_float(e.x_std_error),
                fmt_float(e.y_risk),
                fmt_float(e.y_std_error),
            ]
        }),
    )?;
    out.json("lemma4_report.json", &report)?;
    match &report.y_fit {
        Some(y) => println!(
            "lemma4: X slope {:.4} +- {:.4}, Y slope {:.4} +- {:.4} (target 2)",
            report.x_fit.slope, report.x_fit.ci_half_width, y.slope, y.ci_half_width
        ),
        None => println!(
            "lemma4: X slope {:.4} +- {:.4} (target 2); Y deviation vanished, no fit",
            report.x_fit.slope, report.x_fit.ci_half_width
        ),
    }
    let manifest = manifest_for("lemma4", &loaded, &common, started);
    out.finish(manifest)?;
    Ok(())
}

fn cmd_asymptotics(common: Common, time: Option<f64>) -> Result<(), CliError> {
    let started = Instant::now();
    let loaded = load(&common)?;
    let cfg = loaded.cfg.clone();
    let t = time.unwrap_or(0.5 * cfg.horizon);
    let report = with_pool(common.threads, move ||-> Result<_, CoreError> {
        let exp = Experiment::prepare(cfg)?;
        exp.asymptotic_study(t)
    })??;

    let mut out = OutputDir::create(&common.out_dir)?;
    out.json("asymptotics.json", &report)?;
    for v in &report.variance_checks {
        println!(
            "  eps {:>10.6}: scaled variance / sigma2 = {:.5}",
            v.epsilon, v.ratio
        );
    }
    for g in &report.gaussian_checks {
        println!(
            "  eps {:>10.6}: KS = {:.4} (threshold {:.4}) {}",
            g.epsilon,
            g.ks_statistic,
            g.threshold,
            if g.pass { "ok" } else { "FAIL" }
        );
    }
    match (report.mu, report.mu_hat) {
        (Some(mu), Some(mu_hat)) => println!(
            "asymptotics at t = {}: sigma2 = {:.7}, mu = {:.7}, extrapolated mu_hat = {:.7}",
            report.t, report.sigma2, mu, mu_hat
        ),
        _ => println!(
            "asymptotics at t = {}: sigma2 = {:.7} (bias limit skipped: kernel support \
             starts left of zero)",
            report.t, report.sigma2
        ),
    }
    let manifest = manifest_for("asymptotics", &loaded, &common, started);
    out.finish(manifest)?;
    Ok(())
}

fn cmd_sigma2(common: Common) -> Result<(), CliError> {
    let started = Instant::now();
    let loaded = load(&common)?;
    let kernel = loaded.cfg.kernel;
    let hurst = loaded.cfg.hurst;
    let sigma2 = kernel.sigma2(hurst)?;
    println!(
        "sigma2[{}, H={}] = {}",
        kernel.family().name(),
        hurst,
        fmt_float(sigma2)
    );

    #[derive(serde::Serialize)]
    struct Sigma2Out {
        kernel: String,
        support: (f64, f64),
        hurst: f64,
        sigma2: f64,
    }
    let mut out = OutputDir::create(&common.out_dir)?;
    out.json(
        "sigma2.json",
        &Sigma2Out {
            kernel: kernel.family().name().to_string(),
            support: kernel.support(),
            hurst,
            sigma2,
        },
    )?;
    let manifest = manifest_for("sigma2", &loaded, &common, started);
    out.finish(manifest)?;
    Ok(())
}
