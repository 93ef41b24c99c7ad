//! `lexweight`: run language-game experiments, print predictions, and emit
//! plot data.
//!
//! Exit codes: 0 success, 1 estimation failure, 2 bad config or arguments,
//! 3 I/O failure.

mod plot;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use lexweight_core::analysis::{
    predict, predict_mean_trajectory, predict_var_trajectory, EstimateMethod,
};
use lexweight_core::experiment::{
    compare_models, format_number, read_config, sweep, validate_predictions, SweepParameter,
};
use lexweight_core::{run_experiment, Error, ExperimentConfig, UpdateModel};

use plot::Curve;

const MAX_PREDICTED_POINTS: usize = 10_000;

#[derive(Parser)]
#[command(
    name = "lexweight",
    version,
    about = "Weighted-sum concept combination language game"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Experiment config file; built-in defaults when omitted.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Master seed, overriding the config.
    #[arg(long, value_name = "N")]
    seed: Option<u64>,
    /// Directory for CSV and plot-data files.
    #[arg(long, value_name = "DIR", default_value = "results")]
    out: PathBuf,
    /// Write `<experiment>_<curve>.dat` files into the output directory.
    #[arg(long)]
    emit_plot_data: bool,
    /// Worker threads for independent runs (default: all cores).
    #[arg(long, value_name = "N")]
    workers: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Run the configured experiment and write per-run, aggregate and final-state CSVs.
    Simulate {
        #[command(flatten)]
        common: Common,
    },
    /// Print resting values and convergence times without simulating.
    Predict {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 0.01)]
        tol: f64,
        /// Monte Carlo samples for E(A) and Var(A).
        #[arg(long, default_value_t = 1_000_000)]
        samples: usize,
    },
    /// Final mean and SD of λ for each value of one parameter.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Parameter to sweep: w or h.
        #[arg(long)]
        param: SweepParameter,
        #[arg(long, value_delimiter = ',', required = true, num_args = 1..)]
        values: Vec<f64>,
    },
    /// The w sweep under both updating models.
    Compare {
        #[command(flatten)]
        common: Common,
        #[arg(
            long,
            value_delimiter = ',',
            num_args = 1..,
            default_value = "0.5,0.55,0.6,0.65,0.7,0.75,0.8,0.85,0.9,0.95,1"
        )]
        w_values: Vec<f64>,
    },
    /// Compare simulated model-2 trajectories with the predicted ones for each h.
    Validate {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 0.01)]
        tol: f64,
        #[arg(long, default_value_t = 1_000_000)]
        samples: usize,
        #[arg(long, value_delimiter = ',', num_args = 1.., default_value = "0.01,0.001,0.0001,0.00001")]
        h_values: Vec<f64>,
    },
}

/// A failure and the exit code it maps to.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Io { .. } => 3,
            Error::Estimation(_) | Error::NonConvergence { .. } => 1,
            _ => 2,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn load(common: &Common) -> Result<ExperimentConfig, Failure> {
    let mut cfg = match &common.config {
        // A missing or unreadable config is a config error, not an output failure.
        Some(path) => read_config(path).map_err(|e| Failure {
            code: 2,
            message: match e {
                Error::Io { .. } => e.to_string(),
                _ => format!("{}: {e}", path.display()),
            },
        })?,
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = common.seed {
        cfg.master_seed = seed;
    }
    cfg.workers = common.workers;
    Ok(cfg)
}

fn emit(common: &Common, experiment: &str, curves: &[Curve]) -> Result<(), Failure> {
    if common.emit_plot_data {
        plot::emit(&common.out, experiment, curves)?;
    }
    Ok(())
}

fn num(v: f64) -> String {
    format_number(v)
}

fn simulate(common: &Common) -> Result<(), Failure> {
    let mut cfg = load(common)?;
    cfg.outputs = Some(common.out.clone());
    let res = run_experiment(&cfg)?;
    let last = res.aggregate.last();
    println!("runs={}", cfg.runs);
    println!("timestep={}", last.timestep);
    println!("mean_lambda={}", num(last.mean_of_means));
    println!("sd_lambda={}", num(last.mean_sd));
    println!("sem_lambda={}", num(last.sem_of_means));
    println!("output_dir={}", common.out.display());
    let series = &res.aggregate.series;
    emit(
        common,
        "simulate",
        &[
            Curve::new(
                "mean",
                series
                    .iter()
                    .map(|p| (p.timestep as f64, p.mean_of_means))
                    .collect(),
            ),
            Curve::new(
                "sd",
                series
                    .iter()
                    .map(|p| (p.timestep as f64, p.mean_sd))
                    .collect(),
            ),
        ],
    )
}

fn run_predict(common: &Common, tol: f64, samples: usize) -> Result<(), Failure> {
    let cfg = load(common)?;
    let p = predict(&cfg.game, &cfg.env, tol, samples, cfg.master_seed)?;
    match p.p_plus {
        Some(pp) => {
            println!("p_plus={}", num(pp.value));
            let method = match pp.method {
                EstimateMethod::Analytic => "analytic",
                EstimateMethod::MonteCarlo => "monte_carlo",
            };
            println!("p_plus_method={method}");
            if let Some(se) = pp.std_error {
                println!("p_plus_std_error={}", num(se));
            }
        }
        None => println!("p_plus=undefined"),
    }
    println!("model={}", cfg.game.model.number());
    println!("e_a={}", num(p.a.mean));
    println!("var_a={}", num(p.a.variance));
    println!("e_lambda_rest={}", num(p.e_lambda_rest));
    println!("var_lambda_rest={}", num(p.var_lambda_rest));
    println!("tol={}", num(p.tol));
    println!("t_mean_updates={}", p.t_mean);
    println!("t_var_updates={}", p.t_var);
    println!("t_mean_timesteps={}", p.timesteps_mean);
    println!("t_var_timesteps={}", p.timesteps_var);

    let turns = cfg
        .game
        .schedule
        .listener_turns_per_timestep(cfg.game.n_agents);
    // Thinned so the curve size does not grow with the horizon.
    let total = cfg.game.timesteps;
    let step = cfg.record_every.max(total.div_ceil(MAX_PREDICTED_POINTS));
    let mut ts: Vec<usize> = (0..=total).step_by(step).collect();
    if ts.last() != Some(&total) {
        ts.push(total);
    }
    let curve = |f: &dyn Fn(f64) -> f64| -> Vec<(f64, f64)> {
        ts.iter()
            .map(|&t| (t as f64, f(t as f64 * turns)))
            .collect()
    };
    let h = cfg.game.h;
    emit(
        common,
        "predict",
        &[
            Curve::new(
                "mean",
                curve(&|u| predict_mean_trajectory(p.e_lambda0, p.e_lambda_rest, h, u)),
            ),
            Curve::new(
                "var",
                curve(&|u| predict_var_trajectory(p.var_lambda0, p.a.variance, h, u)),
            ),
        ],
    )
}

fn run_sweep(common: &Common, param: SweepParameter, values: &[f64]) -> Result<(), Failure> {
    let cfg = load(common)?;
    let rows = sweep(&cfg, param, values)?;
    for r in &rows {
        println!(
            "{}={} mean_lambda={} sd_lambda={} sem_lambda={}",
            param.name(),
            num(r.value),
            num(r.final_mean),
            num(r.final_sd),
            num(r.final_sem)
        );
    }
    emit(
        common,
        "sweep",
        &[
            Curve::new(
                "mean",
                rows.iter().map(|r| (r.value, r.final_mean)).collect(),
            ),
            Curve::new("sd", rows.iter().map(|r| (r.value, r.final_sd)).collect()),
        ],
    )
}

fn run_compare(common: &Common, w_values: &[f64]) -> Result<(), Failure> {
    let cfg = load(common)?;
    let rows = compare_models(&cfg, w_values)?;
    for r in &rows {
        println!(
            "w={} model1_mean={} model1_sd={} model2_mean={} model2_sd={}",
            num(r.w),
            num(r.model1_mean),
            num(r.model1_sd),
            num(r.model2_mean),
            num(r.model2_sd)
        );
    }
    let col = |f: fn(&lexweight_core::experiment::ComparisonRow) -> f64| -> Vec<(f64, f64)> {
        rows.iter().map(|r| (r.w, f(r))).collect()
    };
    emit(
        common,
        "compare",
        &[
            Curve::new("model1_mean", col(|r| r.model1_mean)),
            Curve::new("model1_sd", col(|r| r.model1_sd)),
            Curve::new("model2_mean", col(|r| r.model2_mean)),
            Curve::new("model2_sd", col(|r| r.model2_sd)),
        ],
    )
}

fn run_validate(
    common: &Common,
    tol: f64,
    samples: usize,
    h_values: &[f64],
) -> Result<(), Failure> {
    let mut cfg = load(common)?;
    if cfg.game.model != UpdateModel::Mismatch {
        eprintln!("note: validate simulates updating model 2");
        cfg.game.model = UpdateModel::Mismatch;
    }
    let report = validate_predictions(&cfg, h_values, tol, samples)?;
    let turns = cfg
        .game
        .schedule
        .listener_turns_per_timestep(cfg.game.n_agents);
    let mut curves = Vec::new();
    for r in &report.rows {
        let arrival = r
            .arrival_timestep
            .map_or("none".to_string(), |t| t.to_string());
        println!(
            "h={} e_a={} var_a={} resting_var={} mean_sup_dev={} var_sup_dev={} arrival_timestep={} predicted_arrival_timestep={}",
            num(r.h),
            num(r.a.mean),
            num(r.a.variance),
            num(r.resting_var),
            num(r.mean_sup_dev),
            num(r.var_sup_dev),
            arrival,
            (r.predicted_arrival_updates as f64 / turns).ceil() as u64
        );
        let tag = format!("h{}", num(r.h));
        curves.push(Curve::new(
            format!("{tag}_empirical"),
            r.points
                .iter()
                .map(|p| (p.timestep as f64, p.empirical_mean))
                .collect(),
        ));
        curves.push(Curve::new(
            format!("{tag}_predicted"),
            r.points
                .iter()
                .map(|p| (p.timestep as f64, p.predicted_mean))
                .collect(),
        ));
    }
    emit(common, "validate", &curves)
}

fn run(cli: Cli) -> Result<(), Failure> {
    match &cli.command {
        Command::Simulate { common } => simulate(common),
        Command::Predict {
            common,
            tol,
            samples,
        } => run_predict(common, *tol, *samples),
        Command::Sweep {
            common,
            param,
            values,
        } => run_sweep(common, *param, values),
        Command::Compare { common, w_values } => run_compare(common, w_values),
        Command::Validate {
            common,
            tol,
            samples,
            h_values,
        } => run_validate(common, *tol, *samples, h_values),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
