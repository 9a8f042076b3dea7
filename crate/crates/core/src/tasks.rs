//! Dataset generators and loaders for the benchmark tasks, with their scaling
//! and split conventions.
//!
//! All generators are pure functions of their parameters and seed; loaders
//! are read-only. Inputs are always within [0, 1] after scaling.

use std::fmt::Write as _;
use std::io::{self, Write};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::readout::SplitSpec;

/// A benchmark series: aligned input/target pairs plus the split protocol.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub name: String,
    pub inputs: Vec<f64>,
    pub targets: Vec<f64>,
    pub seed: u64,
    pub split: SplitSpec,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.inputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inputs.is_empty()
    }

    /// CSV export with header `t,x,y`.
    pub fn write_csv<W: Write>(&self, w: &mut W) -> io::Result<()> {
        writeln!(w, "t,x,y")?;
        for (t, (x, y)) in self.inputs.iter().zip(&self.targets).enumerate() {
            writeln!(w, "{t},{x:.16e},{y:.16e}")?;
        }
        Ok(())
    }

    /// CSV import for series previously exported with [`Dataset::write_csv`].
    /// The split defaults to the 20/480/rest protocol when the series is long
    /// enough, otherwise everything lands in the training slice.
    pub fn read_csv(path: impl AsRef<Path>) -> Result<Dataset> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        let mut inputs = Vec::new();
        let mut targets = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            if idx == 0 {
                continue; // header
            }
            let mut fields = line.split(',');
            let parse = |s: Option<&str>| -> Result<f64> {
                s.map(str::trim)
                    .and_then(|v| v.parse::<f64>().ok())
                    .ok_or_else(|| Error::Parse {
                        path: path.display().to_string(),
                        line: idx + 1,
                        message: format!("malformed record {line:?}"),
                    })
            };
            let _t = parse(fields.next())?;
            inputs.push(parse(fields.next())?);
            targets.push(parse(fields.next())?);
        }
        if inputs.is_empty() {
            return Err(Error::Parse {
                path: path.display().to_string(),
                line: 1,
                message: "no data rows".into(),
            });
        }
        let len = inputs.len();
        let split = SplitSpec::for_length(len).unwrap_or(SplitSpec::new(0, len, 0));
        Ok(Dataset {
            name: "csv".into(),
            inputs,
            targets,
            seed: 0,
            split,
        })
    }
}

/// NARMA recurrence: y_{t+1} = 0.4·y_t + 0.4·y_t·y_{t−1} + 0.6·x_t³ + 0.1,
/// inputs drawn uniformly from the open interval (0, 1/2), y₀ = y₁ = 0.
/// Pair t is (x_t, y_{t+1}).
pub fn narma(n: usize, seed: u64) -> Result<Dataset> {
    if n < 3 {
        return Err(domain("NARMA series needs at least 3 steps"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let eps = 1e-9;
    let xs: Vec<f64> = (0..n).map(|_| rng.random_range(eps..0.5 - eps)).collect();
    let mut ds = narma_from_inputs(xs, (0.0, 0.0))?;
    ds.seed = seed;
    Ok(ds)
}

/// NARMA targets for caller-provided inputs and initial conditions. The
/// washout protocol makes the initial pair immaterial downstream.
pub fn narma_from_inputs(xs: Vec<f64>, init: (f64, f64)) -> Result<Dataset> {
    let n = xs.len();
    if n < 3 {
        return Err(domain("NARMA series needs at least 3 steps"));
    }
    let mut y = vec![0.0; n + 1];
    y[0] = init.0;
    y[1] = init.1;
    for t in 1..n {
        y[t + 1] = 0.4 * y[t] + 0.4 * y[t] * y[t - 1] + 0.6 * xs[t].powi(3) + 0.1;
    }
    let split = SplitSpec::for_length(n).unwrap_or(SplitSpec::new(0, n, 0));
    Ok(Dataset {
        name: "narma".into(),
        inputs: xs,
        targets: y[1..].to_vec(),
        seed: 0,
        split,
    })
}

/// Delay-differential generator parameters:
/// dx/dt = β·x(t−τ) / (1 + x(t−τ)ⁿ) − γ·x(t).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MackeyGlassParams {
    pub beta: f64,
    pub gamma: f64,
    /// Nonlinearity exponent.
    pub n: f64,
    /// Delay, in the equation's time units.
    pub tau: f64,
    /// Integrator step.
    pub dt: f64,
    /// Constant history value for t ≤ 0.
    pub x0: f64,
    /// Integrator steps per emitted sample.
    pub sample_stride: usize,
}

impl Default for MackeyGlassParams {
    /// The canonical chaotic regime, sampled once per time unit.
    fn default() -> Self {
        Self {
            beta: 0.2,
            gamma: 0.1,
            n: 10.0,
            tau: 17.0,
            dt: 0.1,
            x0: 1.2,
            sample_stride: 10,
        }
    }
}

impl MackeyGlassParams {
    pub fn validate(&self) -> Result<()> {
        if self.dt.is_nan() || self.dt <= 0.0 {
            return Err(domain("integrator step must be positive"));
        }
        if self.sample_stride < 1 {
            return Err(domain("sample stride must be at least 1"));
        }
        if self.tau < 0.0 {
            return Err(domain("delay must be nonnegative"));
        }
        let ratio = self.tau / self.dt;
        if (ratio - ratio.round()).abs() > 1e-9 {
            return Err(domain(format!(
                "delay {} must be an integer multiple of dt {}",
                self.tau, self.dt
            )));
        }
        Ok(())
    }
}

/// Raw (unscaled) delay-equation solution: `n` samples starting at t = 0,
/// integrated with fourth-order Runge-Kutta; the delayed value at half steps
/// is linearly interpolated.
pub fn mackey_glass_series(n: usize, params: &MackeyGlassParams) -> Result<Vec<f64>> {
    params.validate()?;
    if n == 0 {
        return Err(domain("series length must be positive"));
    }
    let delay_steps = (params.tau / params.dt).round() as usize;
    let total_steps = (n - 1) * params.sample_stride;

    // Grid of x values at integer multiples of dt; index 0 is t = 0.
    let mut grid = Vec::with_capacity(total_steps + 1);
    grid.push(params.x0);

    // Delayed value at grid offset `i - delay_steps + frac`, flat history
    // before t = 0.
    let delayed = |grid: &[f64], i: usize, frac: f64| -> f64 {
        if delay_steps == 0 {
            return grid[i];
        }
        let base = i as i64 - delay_steps as i64;
        let at = |k: i64| -> f64 {
            if k < 0 {
                params.x0
            } else {
                grid[k as usize]
            }
        };
        if frac == 0.0 {
            at(base)
        } else {
            (1.0 - frac) * at(base) + frac * at(base + 1)
        }
    };

    let f = |x: f64, xd: f64| -> f64 {
        params.beta * xd / (1.0 + xd.powf(params.n)) - params.gamma * x
    };

    for i in 0..total_steps {
        let x = grid[i];
        let d0 = delayed(&grid, i, 0.0);
        let d_half = delayed(&grid, i, 0.5);
        let d1 = delayed(&grid, i + 1, 0.0);
        let k1 = f(x, d0);
        let k2 = f(x + 0.5 * params.dt * k1, d_half);
        let k3 = f(x + 0.5 * params.dt * k2, d_half);
        let k4 = f(x + params.dt * k3, d1);
        grid.push(x + params.dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
    }

    Ok(grid.iter().step_by(params.sample_stride).copied().collect())
}

/// One-step-ahead prediction dataset from the delay equation: `n` samples
/// scaled so the maximum is one, paired as (x_t, x_{t+1}).
pub fn mackey_glass(n: usize, params: &MackeyGlassParams) -> Result<Dataset> {
    if n < 2 {
        return Err(domain("need at least 2 samples to form pairs"));
    }
    let series = mackey_glass_series(n, params)?;
    let max = series.iter().cloned().fold(f64::MIN, f64::max);
    if max.is_nan() || max <= 0.0 {
        return Err(domain(format!("cannot scale series with maximum {max}")));
    }
    let scaled: Vec<f64> = series.iter().map(|v| v / max).collect();
    let pairs = scaled.len() - 1;
    let split = SplitSpec::for_length(pairs).unwrap_or(SplitSpec::new(0, pairs, 0));
    Ok(Dataset {
        name: "mackey-glass".into(),
        inputs: scaled[..pairs].to_vec(),
        targets: scaled[1..].to_vec(),
        seed: 0,
        split,
    })
}

/// Bundled 1000-point laser-intensity fixture in the raw one-integer-per-line
/// format: a synthetic chaotic-laser series (squared field amplitude of a
/// Lorenz-type flow). Regenerate with the `gen_santa_fe_fixture` example.
const SANTA_FE_FIXTURE: &str = include_str!("../data/santa_fe.txt");

/// Loads a laser-intensity series: one nonnegative integer per line, scaled
/// so the maximum is one, paired as (x_t, x_{t+1}).
pub fn santa_fe_load(path: impl AsRef<Path>) -> Result<Dataset> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    santa_fe_from_text(&text, &path.display().to_string(), 0, None)
}

/// As [`santa_fe_load`], keeping `count` samples starting at `offset`.
pub fn santa_fe_load_segment(
    path: impl AsRef<Path>,
    offset: usize,
    count: Option<usize>,
) -> Result<Dataset> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    santa_fe_from_text(&text, &path.display().to_string(), offset, count)
}

/// The bundled fixture as a dataset.
pub fn santa_fe_bundled() -> Dataset {
    santa_fe_from_text(SANTA_FE_FIXTURE, "<bundled>", 0, None)
        .expect("bundled fixture is well-formed")
}

fn santa_fe_from_text(
    text: &str,
    origin: &str,
    offset: usize,
    count: Option<usize>,
) -> Result<Dataset> {
    let mut values = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let v: u64 = trimmed.parse().map_err(|_| Error::Parse {
            path: origin.to_string(),
            line: idx + 1,
            message: format!("expected a nonnegative integer, got {trimmed:?}"),
        })?;
        values.push(v as f64);
    }
    if values.is_empty() {
        return Err(Error::Parse {
            path: origin.to_string(),
            line: 1,
            message: "no intensity records".into(),
        });
    }
    if offset >= values.len() {
        return Err(domain(format!(
            "offset {offset} beyond series of length {}",
            values.len()
        )));
    }
    let end = count
        .map(|c| (offset + c).min(values.len()))
        .unwrap_or(values.len());
    let values = &values[offset..end];
    if values.len() < 2 {
        return Err(domain("need at least 2 samples to form pairs"));
    }
    let max = values.iter().cloned().fold(f64::MIN, f64::max);
    if max <= 0.0 {
        return Err(domain("all intensities are zero; cannot scale"));
    }
    let scaled: Vec<f64> = values.iter().map(|v| v / max).collect();
    let pairs = scaled.len() - 1;
    let split = SplitSpec::for_length(pairs).unwrap_or(SplitSpec::new(0, pairs, 0));
    Ok(Dataset {
        name: "santa-fe".into(),
        inputs: scaled[..pairs].to_vec(),
        targets: scaled[1..].to_vec(),
        seed: 0,
        split,
    })
}

/// Monomial reproduction task: targets xⁿ on the given sorted grid; points
/// below `train_cutoff` train the readout, the rest test it. No washout, the
/// task is memoryless.
pub fn monomial(n_exp: u32, grid: &[f64], train_cutoff: f64) -> Result<Dataset> {
    if n_exp == 0 {
        return Err(domain("exponent must be at least 1"));
    }
    if !(0.0 < train_cutoff && train_cutoff < 1.0) {
        return Err(domain(format!(
            "train cutoff {train_cutoff} outside (0, 1)"
        )));
    }
    if grid.is_empty() {
        return Err(domain("grid must be nonempty"));
    }
    for pair in grid.windows(2) {
        if pair[1] < pair[0] {
            return Err(domain("grid must be sorted ascending"));
        }
    }
    if grid[0] < 0.0 || *grid.last().unwrap() > 1.0 {
        return Err(domain("grid values must lie in [0, 1]"));
    }
    let targets: Vec<f64> = grid.iter().map(|x| x.powi(n_exp as i32)).collect();
    let train = grid.iter().filter(|&&x| x < train_cutoff).count();
    let mut name = String::new();
    let _ = write!(name, "monomial-{n_exp}");
    Ok(Dataset {
        name,
        inputs: grid.to_vec(),
        targets,
        seed: 0,
        split: SplitSpec::new(0, train, grid.len() - train),
    })
}

/// Uniform grid of `points` values spanning [0, 1] inclusive.
pub fn uniform_grid(points: usize) -> Vec<f64> {
    assert!(points >= 2, "grid needs at least two points");
    (0..points)
        .map(|i| i as f64 / (points - 1) as f64)
        .collect()
}

/// Pearson correlation between s_t and s_{t+tau}.
pub fn lag_correlation(series: &[f64], tau: usize) -> f64 {
    assert!(
        tau >= 1 && series.len() > tau + 1,
        "series too short for lag"
    );
    let a = &series[..series.len() - tau];
    let b = &series[tau..];
    let n = a.len() as f64;
    let mean_a: f64 = a.iter().sum::<f64>() / n;
    let mean_b: f64 = b.iter().sum::<f64>() / n;
    let mut cov = 0.0;
    let mut var_a = 0.0;
    let mut var_b = 0.0;
    for (x, y) in a.iter().zip(b) {
        cov += (x - mean_a) * (y - mean_b);
        var_a += (x - mean_a) * (x - mean_a);
        var_b += (y - mean_b) * (y - mean_b);
    }
    cov / (var_a * var_b).sqrt()
}
