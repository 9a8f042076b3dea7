//! The six batch commands.

use std::fmt::Write as _;
use std::path::PathBuf;

use anyhow::{bail, Result};
use clap::Args;
use rayon::prelude::*;
use serde_json::json;

use qmem_core::baselines::{baseline_suite, mean_std_of, SuiteRow};
use qmem_core::hyperopt::{monomial_comparison, AdamConfig};
use qmem_core::pipeline::{run_pipeline_with, PipelineResult};
use qmem_core::readout::FitOptions;
use qmem_core::reservoir::ReservoirConfig;
use qmem_core::tasks::{self, Dataset};
use qmem_core::tomography;

use crate::args::{DataOpts, DriveArg, FeedbackArg, IntListArg, TaskArg};
use crate::report::{atomic_write, RunReport, REPORT_SCHEMA};
use crate::setup::{build_task, default_config, TaskSetup};

fn float_csv(v: f64) -> String {
    format!("{v:.16e}")
}

fn percentile(sorted: &[f64], q: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let pos = q * (n - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    sorted[lo] * (1.0 - frac) + sorted[hi] * frac
}

// ---------------------------------------------------------------------------
// run

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Benchmark to run.
    #[arg(value_enum)]
    pub task: TaskArg,

    /// Feedback rule (ema:M_D | ma:M,A,B | frozen:R); defaults to the task's
    /// standard setting.
    #[arg(long)]
    pub feedback: Option<FeedbackArg>,

    /// Which output probability drives the rule.
    #[arg(long, value_enum, default_value = "through")]
    pub drive: DriveArg,

    /// Shots per step (absent: exact probabilities).
    #[arg(long)]
    pub shots: Option<u64>,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Output directory for report.json, features.csv, predictions.csv,
    /// model.json.
    #[arg(long, default_value = "out")]
    pub out: PathBuf,

    /// Ridge regularization of the readout (default none).
    #[arg(long)]
    pub ridge: Option<f64>,

    /// Fit the readout without an intercept.
    #[arg(long)]
    pub no_intercept: bool,

    #[command(flatten)]
    pub data: DataOpts,
}

pub struct RunOutcome {
    pub report: RunReport,
    pub pipeline: PipelineResult,
    pub dataset: Dataset,
}

pub fn cmd_run(args: &RunArgs) -> Result<RunOutcome> {
    let setup = build_task(args.task, &args.data, args.seed)?;
    let mut cfg = default_config(&setup, args.seed);
    if let Some(FeedbackArg(rule)) = &args.feedback {
        cfg.rule = rule.clone();
        if let qmem_core::memristor::FeedbackRule::Frozen { r } = rule {
            cfg.r0 = *r;
        }
    }
    cfg.drive = args.drive.into();
    cfg.shots = args.shots;

    let opts = FitOptions {
        intercept: !args.no_intercept,
        ridge: args.ridge.unwrap_or(0.0),
    };
    let ds = &setup.dataset;
    let pipe = run_pipeline_with(ds, &cfg, &opts)?;

    let features_path = args.out.join("features.csv");
    let mut buf = Vec::new();
    pipe.features.write_csv(&mut buf)?;
    atomic_write(&features_path, &buf)?;

    let predictions_path = args.out.join("predictions.csv");
    let mut text = String::from("t,y_true,y_pred\n");
    for t in ds.split.test_range() {
        let _ = writeln!(
            text,
            "{t},{},{}",
            float_csv(ds.targets[t]),
            float_csv(pipe.predictions[t])
        );
    }
    atomic_write(&predictions_path, text.as_bytes())?;

    let model_path = args.out.join("model.json");
    atomic_write(
        &model_path,
        format!("{}\n", pipe.model.to_json()).as_bytes(),
    )?;

    let report = RunReport {
        schema: REPORT_SCHEMA,
        task: args.task.name().into(),
        config: cfg,
        split: ds.split,
        seed: args.seed,
        task_params: setup.task_params.clone(),
        weights: pipe.model.weights,
        intercept: pipe.model.intercept,
        ridge: pipe.model.ridge,
        rank_deficient: pipe.model.rank_deficient,
        mse_train: pipe.mse_train,
        mse_test: pipe.mse_test,
        clamp_events: pipe.features.clamp_events(),
        artifact_paths: vec![
            "features.csv".into(),
            "predictions.csv".into(),
            "model.json".into(),
        ],
    };
    report.write(&args.out.join("report.json"))?;

    println!(
        "{}: mse_train={:.6e} mse_test={:.6e} (seed {}, {:?})",
        args.task.name(),
        report.mse_train,
        report.mse_test,
        args.seed,
        report.config.rule,
    );
    Ok(RunOutcome {
        report,
        pipeline: pipe,
        dataset: setup.dataset,
    })
}

// ---------------------------------------------------------------------------
// sweep-memory

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(value_enum)]
    pub task: TaskArg,

    /// Memory decays to sweep: `1:20` or `1,2,4,8`.
    #[arg(long, default_value = "1:20")]
    pub m_values: IntListArg,

    /// Seeds per decay value.
    #[arg(long, default_value_t = 50)]
    pub runs: usize,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    #[arg(long, default_value = "out")]
    pub out: PathBuf,

    #[command(flatten)]
    pub data: DataOpts,
}

fn sweep_mses(
    task: TaskArg,
    data: &DataOpts,
    rule_for: impl Fn(&TaskSetup) -> ReservoirConfig + Sync,
    runs: usize,
    base_seed: u64,
) -> Result<Vec<f64>> {
    (0..runs as u64)
        .into_par_iter()
        .map(|k| {
            let setup = build_task(task, data, base_seed + k)?;
            let mut cfg = rule_for(&setup);
            cfg.seed = base_seed + k;
            let pipe = run_pipeline_with(&setup.dataset, &cfg, &FitOptions::default())?;
            Ok(pipe.mse_test)
        })
        .collect::<Result<Vec<f64>>>()
}

fn stat_row(label: &str, m: Option<usize>, mses: &mut [f64]) -> String {
    let (mean, std) = mean_std_of(mses);
    mses.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let std_field = std.map(float_csv).unwrap_or_default();
    format!(
        "{label},{},{},{},{std_field},{},{},{}\n",
        m.map(|v| v.to_string()).unwrap_or_default(),
        mses.len(),
        float_csv(mean),
        float_csv(percentile(mses, 0.10)),
        float_csv(percentile(mses, 0.50)),
        float_csv(percentile(mses, 0.90)),
    )
}

pub fn cmd_sweep_memory(args: &SweepArgs) -> Result<Vec<(usize, f64)>> {
    if args.m_values.0.is_empty() {
        bail!("no memory-decay values given");
    }
    let mut csv = String::from("rule,m,runs,mean_mse,std_mse,p10,p50,p90\n");
    let mut means = Vec::new();

    for &m in &args.m_values.0 {
        let mut mses = sweep_mses(
            args.task,
            &args.data,
            |setup| {
                let mut cfg = default_config(setup, setup.dataset.seed);
                cfg.rule = qmem_core::memristor::FeedbackRule::ExpMovingAverage { m_d: m as f64 };
                cfg
            },
            args.runs,
            args.seed,
        )?;
        let mean = mses.iter().sum::<f64>() / mses.len() as f64;
        means.push((m, mean));
        csv.push_str(&stat_row("ema", Some(m), &mut mses));
    }

    // No-memory reference over the same seeds.
    let mut frozen = sweep_mses(
        args.task,
        &args.data,
        |setup| default_config(setup, setup.dataset.seed).frozen_variant(),
        args.runs,
        args.seed,
    )?;
    csv.push_str(&stat_row("frozen", None, &mut frozen));

    atomic_write(&args.out.join("sweep_memory.csv"), csv.as_bytes())?;

    let best = means
        .iter()
        .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
        .copied()
        .expect("nonempty sweep");
    println!(
        "{}: minimum mean MSE {:.6e} at m = {} ({} runs each); frozen reference {:.6e}",
        args.task.name(),
        best.1,
        best.0,
        args.runs,
        frozen.iter().sum::<f64>() / frozen.len() as f64,
    );
    Ok(means)
}

// ---------------------------------------------------------------------------
// table1

#[derive(Debug, Args)]
pub struct Table1Args {
    #[arg(long, default_value_t = 100)]
    pub runs: usize,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Memory decay of the quantum-memristor row.
    #[arg(long, default_value_t = 4.0)]
    pub m_d: f64,

    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

/// Paper-style "mean(std)" in units of 10⁻⁴, std scaled to the mean's last
/// printed digit.
fn format_entry(mean: f64, std: Option<f64>) -> String {
    let mean_u = mean / 1e-4;
    match std {
        Some(s) => format!("{:.2}({:.0})", mean_u, (s / 1e-4) * 100.0),
        None => format!("{mean_u:.2}"),
    }
}

pub fn cmd_table1(args: &Table1Args) -> Result<Vec<SuiteRow>> {
    if args.runs < 1 {
        bail!("need at least one run");
    }
    let mut rows = baseline_suite(|seed| tasks::narma(1000, seed), args.runs, args.seed)?;

    let qmem: Vec<f64> = (0..args.runs as u64)
        .into_par_iter()
        .map(|k| {
            let ds = tasks::narma(1000, args.seed + k)?;
            let mut cfg = ReservoirConfig::new(
                qmem_core::encoding::EncodingScheme::AmplitudeDirect,
                qmem_core::memristor::FeedbackRule::ExpMovingAverage { m_d: args.m_d },
            );
            cfg.seed = args.seed + k;
            Ok(run_pipeline_with(&ds, &cfg, &FitOptions::default())?.mse_test)
        })
        .collect::<qmem_core::Result<_>>()?;
    let (mean, std) = mean_std_of(&qmem);
    rows.push(SuiteRow {
        label: "QMEM".into(),
        mean_mse: mean,
        std_mse: std,
        runs: args.runs,
    });

    let mut csv = String::from("model,mean_mse,std_mse,runs\n");
    let mut table = format!("{:<6} {:>12}\n", "MODEL", "MSE (x1e-4)");
    for row in &rows {
        let _ = writeln!(
            csv,
            "{},{},{},{}",
            row.label,
            float_csv(row.mean_mse),
            row.std_mse.map(float_csv).unwrap_or_default(),
            row.runs
        );
        let _ = writeln!(
            table,
            "{:<6} {:>12}",
            row.label,
            format_entry(row.mean_mse, row.std_mse)
        );
    }
    atomic_write(&args.out.join("table1.csv"), csv.as_bytes())?;
    print!("{table}");
    Ok(rows)
}

// ---------------------------------------------------------------------------
// lagplot

#[derive(Debug, Args)]
pub struct LagplotArgs {
    #[arg(value_enum)]
    pub task: TaskArg,

    /// Lag in steps; defaults to 10 for mackey-glass and 1 otherwise.
    #[arg(long)]
    pub tau: Option<usize>,

    #[arg(long)]
    pub feedback: Option<FeedbackArg>,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    #[arg(long, default_value = "out")]
    pub out: PathBuf,

    #[command(flatten)]
    pub data: DataOpts,
}

pub fn cmd_lagplot(args: &LagplotArgs) -> Result<PathBuf> {
    let tau = args.tau.unwrap_or(match args.task {
        TaskArg::MackeyGlass => 10,
        _ => 1,
    });
    if tau < 1 {
        bail!("lag must be at least 1");
    }
    let setup = build_task(args.task, &args.data, args.seed)?;
    let mut cfg = default_config(&setup, args.seed);
    if let Some(FeedbackArg(rule)) = &args.feedback {
        cfg.rule = rule.clone();
    }
    let ds = &setup.dataset;
    let with = run_pipeline_with(ds, &cfg, &FitOptions::default())?;
    let frozen = run_pipeline_with(ds, &cfg.frozen_variant(), &FitOptions::default())?;

    let te = ds.split.test_range();
    let truth = &ds.targets[te.clone()];
    let mem = &with.predictions[te.clone()];
    let fz = &frozen.predictions[te.clone()];
    if truth.len() <= tau {
        bail!(
            "test slice of {} rows is too short for lag {tau}",
            truth.len()
        );
    }

    let mut csv = String::from("x_truth,y_truth,x_mem,y_mem,x_frozen,y_frozen\n");
    for t in 0..truth.len() - tau {
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{}",
            float_csv(truth[t]),
            float_csv(truth[t + tau]),
            float_csv(mem[t]),
            float_csv(mem[t + tau]),
            float_csv(fz[t]),
            float_csv(fz[t + tau]),
        );
    }
    let path = args.out.join("lagplot.csv");
    atomic_write(&path, csv.as_bytes())?;
    println!(
        "{}: tau={tau}, truth lag correlation {:.4}",
        args.task.name(),
        tasks::lag_correlation(truth, tau)
    );
    Ok(path)
}

// ---------------------------------------------------------------------------
// tomo-grid

#[derive(Debug, Args)]
pub struct TomoArgs {
    /// Grid points per axis over [0, 1].
    #[arg(long, default_value_t = 11)]
    pub grid_points: usize,

    /// Shots per measurement setting (absent: exact).
    #[arg(long)]
    pub shots: Option<u64>,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

pub fn cmd_tomo_grid(args: &TomoArgs) -> Result<PathBuf> {
    if args.grid_points < 2 {
        bail!("grid needs at least two points per axis");
    }
    let axis = tasks::uniform_grid(args.grid_points);
    let records = tomography::purity_grid(&axis, &axis, args.shots, args.seed)?;

    let mut csv = String::from("x,R,purity_reconstructed,purity_closed_form\n");
    let mut worst: f64 = 0.0;
    for rec in &records {
        worst = worst.max((rec.purity_reconstructed - rec.purity_closed_form).abs());
        let _ = writeln!(
            csv,
            "{},{},{},{}",
            float_csv(rec.x),
            float_csv(rec.r),
            float_csv(rec.purity_reconstructed),
            float_csv(rec.purity_closed_form),
        );
    }
    let path = args.out.join("tomography.csv");
    atomic_write(&path, csv.as_bytes())?;
    println!(
        "tomography grid {}x{}: {} points, worst |reconstructed - closed form| = {:.3e}",
        args.grid_points,
        args.grid_points,
        records.len(),
        worst
    );
    Ok(path)
}

// ---------------------------------------------------------------------------
// hyperopt

#[derive(Debug, Args)]
pub struct HyperoptArgs {
    /// Monomial exponent.
    #[arg(long, short = 'n', default_value_t = 4)]
    pub exponent: u32,

    #[arg(long, default_value_t = 101)]
    pub grid_points: usize,

    #[arg(long, default_value_t = 0.9)]
    pub cutoff: f64,

    #[arg(long, default_value_t = 400)]
    pub iters: usize,

    #[arg(long, default_value_t = 8)]
    pub restarts: usize,

    /// Window lengths swept outside the gradient loop.
    #[arg(long, default_value = "1:8")]
    pub m_values: IntListArg,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

pub fn cmd_hyperopt(args: &HyperoptArgs) -> Result<serde_json::Value> {
    let grid = tasks::uniform_grid(args.grid_points);
    let adam = AdamConfig {
        iters: args.iters,
        ..Default::default()
    };
    let cmp = monomial_comparison(
        args.exponent,
        &grid,
        args.cutoff,
        &adam,
        args.restarts,
        args.seed,
        &args.m_values.0,
    )?;

    // Pointwise test-error ratios both ways: squared and absolute.
    let ds = tasks::monomial(args.exponent, &grid, args.cutoff)?;
    let te = ds.split.test_range();
    let mae = |cfg: &ReservoirConfig| -> Result<f64> {
        let pipe = run_pipeline_with(&ds, cfg, &FitOptions::default())?;
        Ok(ds.targets[te.clone()]
            .iter()
            .zip(&pipe.predictions[te.clone()])
            .map(|(y, p)| (y - p).abs())
            .sum::<f64>()
            / te.len() as f64)
    };
    let mae_with = mae(&cmp.with_feedback.params.reservoir_config())?;
    let mae_frozen = mae(&cmp.frozen.params.reservoir_config())?;

    let summary = json!({
        "exponent": args.exponent,
        "adam": adam,
        "restarts": args.restarts,
        "seed": args.seed,
        "with_feedback": {
            "params": cmp.with_feedback.params,
            "loss": cmp.with_feedback.loss,
            "mse_train": cmp.with_feedback.mse_train,
            "mse_test": cmp.with_feedback.mse_test,
            "clamp_events": cmp.with_feedback.clamp_events,
            "diverged_restarts": cmp.with_feedback.diverged_restarts,
        },
        "frozen": {
            "params": cmp.frozen.params,
            "reflectivity": cmp.frozen.params.reflectivity(),
            "loss": cmp.frozen.loss,
            "mse_train": cmp.frozen.mse_train,
            "mse_test": cmp.frozen.mse_test,
        },
        "test_mse_ratio_frozen_over_feedback": cmp.frozen.mse_test / cmp.with_feedback.mse_test,
        "test_mae_ratio_frozen_over_feedback": mae_frozen / mae_with,
        "grid": { "points": args.grid_points, "order": "ascending", "cutoff": args.cutoff },
    });

    atomic_write(
        &args.out.join("hyperopt.json"),
        format!("{}\n", serde_json::to_string_pretty(&summary)?).as_bytes(),
    )?;
    atomic_write(
        &args.out.join("best_params.json"),
        format!(
            "{}\n",
            serde_json::to_string_pretty(&cmp.with_feedback.params)?
        )
        .as_bytes(),
    )?;

    println!(
        "x^{}: feedback test MSE {:.4e} (m={}), frozen test MSE {:.4e} ({:.1}x)",
        args.exponent,
        cmp.with_feedback.mse_test,
        cmp.with_feedback.params.m,
        cmp.frozen.mse_test,
        cmp.frozen.mse_test / cmp.with_feedback.mse_test,
    );
    Ok(summary)
}
