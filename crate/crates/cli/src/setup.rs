//! Task wiring: which dataset, encoding and feedback defaults each benchmark
//! uses.

use std::env;
use std::path::PathBuf;

use anyhow::{Context, Result};
use serde_json::json;

use qmem_core::encoding::EncodingScheme;
use qmem_core::memristor::FeedbackRule;
use qmem_core::reservoir::ReservoirConfig;
use qmem_core::tasks::{self, Dataset, MackeyGlassParams};

use crate::args::{DataOpts, TaskArg};

pub struct TaskSetup {
    pub dataset: Dataset,
    pub scheme: EncodingScheme,
    pub default_rule: FeedbackRule,
    /// Echoed into the run report.
    pub task_params: serde_json::Value,
}

pub fn build_task(task: TaskArg, opts: &DataOpts, seed: u64) -> Result<TaskSetup> {
    match task {
        TaskArg::Narma => {
            let dataset = tasks::narma(opts.points, seed)?;
            Ok(TaskSetup {
                dataset,
                scheme: EncodingScheme::AmplitudeDirect,
                default_rule: FeedbackRule::ExpMovingAverage { m_d: 4.0 },
                task_params: json!({ "points": opts.points }),
            })
        }
        TaskArg::MackeyGlass => {
            let params = MackeyGlassParams::default();
            let dataset = tasks::mackey_glass(opts.points + 1, &params)?;
            Ok(TaskSetup {
                dataset,
                scheme: EncodingScheme::SqrtFlipped,
                default_rule: FeedbackRule::ExpMovingAverage { m_d: 2.0 },
                task_params: json!({ "points": opts.points, "generator": params }),
            })
        }
        TaskArg::SantaFe => {
            let (dataset, source) = load_santa_fe(opts)?;
            Ok(TaskSetup {
                dataset,
                scheme: EncodingScheme::SqrtFlipped,
                default_rule: FeedbackRule::ExpMovingAverage { m_d: 6.0 },
                task_params: json!({ "source": source, "offset": opts.offset }),
            })
        }
        TaskArg::Monomial => {
            let grid = tasks::uniform_grid(opts.grid_points);
            let dataset = tasks::monomial(opts.exponent, &grid, opts.cutoff)?;
            Ok(TaskSetup {
                dataset,
                scheme: EncodingScheme::SqrtDirect,
                default_rule: FeedbackRule::Frozen { r: 0.5 },
                task_params: json!({
                    "exponent": opts.exponent,
                    "cutoff": opts.cutoff,
                    "grid_points": opts.grid_points,
                }),
            })
        }
    }
}

/// Resolution order for the laser data: `--data`, then $QMEM_DATA_DIR, then
/// the bundled fixture.
fn load_santa_fe(opts: &DataOpts) -> Result<(Dataset, String)> {
    let explicit = opts.data.clone().or_else(|| {
        env::var_os("QMEM_DATA_DIR").map(|dir| PathBuf::from(dir).join("santa_fe.txt"))
    });
    match explicit {
        Some(path) => {
            let ds = tasks::santa_fe_load_segment(&path, opts.offset, None)
                .with_context(|| format!("loading laser data from {}", path.display()))?;
            Ok((ds, path.display().to_string()))
        }
        None => {
            if opts.offset != 0 {
                anyhow::bail!("--offset needs an explicit data file");
            }
            Ok((tasks::santa_fe_bundled(), "<bundled>".into()))
        }
    }
}

/// Default reservoir configuration for a task, before flag overrides.
pub fn default_config(setup: &TaskSetup, seed: u64) -> ReservoirConfig {
    let mut cfg = ReservoirConfig::new(setup.scheme, setup.default_rule.clone());
    cfg.seed = seed;
    cfg
}
