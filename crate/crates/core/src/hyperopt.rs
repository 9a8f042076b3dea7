//! Hyperparameter search for the monomial task: gradient descent with the
//! Adam update on the interferometer phases and the feedback coefficients,
//! minimizing the squared deviation of the first output probability from xⁿ.
//! Gradients come from central finite differences; the loss threads through a
//! sequential feedback loop, so differentiating numerically is both simpler
//! and cheap at this parameter count.
//!
//! The with-feedback and no-feedback models are always optimized separately —
//! the comparison API is the only way to obtain the pair, so neither side can
//! borrow the other's settings.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::encoding::EncodingScheme;
use crate::error::{domain, Result};
use crate::memristor::FeedbackRule;
use crate::pipeline::{run_pipeline, PipelineResult};
use crate::reservoir::{run, FeedbackDrive, MziPhases, ReservoirConfig};
use crate::tasks::{monomial, Dataset};

/// Tunable parameters of the with-feedback model: the two rotation phase
/// pairs and the linear feedback coefficients. The window length `m` is a
/// small integer swept outside the gradient loop.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HyperParams {
    pub theta1: f64,
    pub psi1: f64,
    pub theta5: f64,
    pub psi4: f64,
    pub a: f64,
    pub b: f64,
    pub m: usize,
}

impl HyperParams {
    pub fn reservoir_config(&self) -> ReservoirConfig {
        ReservoirConfig {
            scheme: EncodingScheme::SqrtDirect,
            u1: MziPhases::new(self.theta1, self.psi1),
            u2: MziPhases::new(self.theta5, self.psi4),
            rule: FeedbackRule::MovingAverage {
                m: self.m,
                a: self.a,
                b: self.b,
            },
            drive: FeedbackDrive::ThroughRail,
            r0: 0.5,
            shots: None,
            seed: 0,
        }
    }

    fn from_vec(v: &[f64], m: usize) -> Self {
        Self {
            theta1: v[0],
            psi1: v[1],
            theta5: v[2],
            psi4: v[3],
            a: v[4],
            b: v[5],
            m,
        }
    }
}

/// Tunable parameters of the no-feedback control: rotation phases plus a
/// fixed reflectivity, carried as an angle so the search space stays smooth
/// (r = sin² r_angle).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrozenParams {
    pub theta1: f64,
    pub psi1: f64,
    pub theta5: f64,
    pub psi4: f64,
    pub r_angle: f64,
}

impl FrozenParams {
    pub fn reflectivity(&self) -> f64 {
        self.r_angle.sin().powi(2)
    }

    pub fn reservoir_config(&self) -> ReservoirConfig {
        let r = self.reflectivity();
        ReservoirConfig {
            scheme: EncodingScheme::SqrtDirect,
            u1: MziPhases::new(self.theta1, self.psi1),
            u2: MziPhases::new(self.theta5, self.psi4),
            rule: FeedbackRule::Frozen { r },
            drive: FeedbackDrive::ThroughRail,
            r0: r,
            shots: None,
            seed: 0,
        }
    }

    fn from_vec(v: &[f64]) -> Self {
        Self {
            theta1: v[0],
            psi1: v[1],
            theta5: v[2],
            psi4: v[3],
            r_angle: v[4],
        }
    }
}

/// Adam settings; the learning rate default of 0.4 is deliberate for this
/// loss surface.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdamConfig {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    pub iters: usize,
    pub fd_step: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        Self {
            lr: 0.4,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            iters: 400,
            fd_step: 1e-5,
        }
    }
}

impl AdamConfig {
    pub fn validate(&self) -> Result<()> {
        if self.lr.is_nan() || self.lr <= 0.0 {
            return Err(domain("learning rate must be positive"));
        }
        if !(0.0 < self.beta1 && self.beta1 < 1.0 && 0.0 < self.beta2 && self.beta2 < 1.0) {
            return Err(domain("moment decays must lie in (0, 1)"));
        }
        if self.fd_step.is_nan() || self.fd_step <= 0.0 {
            return Err(domain("finite-difference step must be positive"));
        }
        Ok(())
    }
}

/// Mean squared deviation of the first output probability from xⁿ over the
/// grid, fed to the reservoir in ascending order as one sequence.
pub fn loss(hp: &HyperParams, n_exp: u32, grid: &[f64]) -> Result<f64> {
    p_target_loss(&hp.reservoir_config(), n_exp, grid)
}

/// The same loss for the no-feedback control.
pub fn loss_frozen(fp: &FrozenParams, n_exp: u32, grid: &[f64]) -> Result<f64> {
    p_target_loss(&fp.reservoir_config(), n_exp, grid)
}

fn p_target_loss(cfg: &ReservoirConfig, n_exp: u32, grid: &[f64]) -> Result<f64> {
    let fm = run(grid, cfg)?;
    let mut acc = 0.0;
    for (row, &x) in fm.rows().iter().zip(grid) {
        let d = row[0] - x.powi(n_exp as i32);
        acc += d * d;
    }
    Ok(acc / grid.len() as f64)
}

/// Central finite-difference gradient.
pub(crate) fn central_gradient<F: Fn(&[f64]) -> f64>(f: &F, x: &[f64], h: f64) -> Vec<f64> {
    let mut g = Vec::with_capacity(x.len());
    let mut probe = x.to_vec();
    for i in 0..x.len() {
        probe[i] = x[i] + h;
        let fp = f(&probe);
        probe[i] = x[i] - h;
        let fm = f(&probe);
        probe[i] = x[i];
        g.push((fp - fm) / (2.0 * h));
    }
    g
}

struct AdamOutcome {
    x: Vec<f64>,
    loss: f64,
    diverged: bool,
}

/// Adam descent tracking the best iterate seen, so the reported loss is the
/// running minimum of the trajectory.
fn adam_minimize<F: Fn(&[f64]) -> f64>(f: &F, x0: Vec<f64>, cfg: &AdamConfig) -> AdamOutcome {
    let dim = x0.len();
    let mut x = x0;
    let mut m = vec![0.0; dim];
    let mut v = vec![0.0; dim];

    let mut best_loss = f(&x);
    let mut best_x = x.clone();
    if !best_loss.is_finite() {
        return AdamOutcome {
            x: best_x,
            loss: f64::INFINITY,
            diverged: true,
        };
    }

    for t in 1..=cfg.iters {
        let g = central_gradient(f, &x, cfg.fd_step);
        if g.iter().any(|gi| !gi.is_finite()) {
            return AdamOutcome {
                x: best_x,
                loss: best_loss,
                diverged: true,
            };
        }
        let bc1 = 1.0 - cfg.beta1.powi(t as i32);
        let bc2 = 1.0 - cfg.beta2.powi(t as i32);
        for i in 0..dim {
            m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * g[i];
            v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * g[i] * g[i];
            x[i] -= cfg.lr * (m[i] / bc1) / ((v[i] / bc2).sqrt() + cfg.eps);
        }
        let l = f(&x);
        if !l.is_finite() {
            return AdamOutcome {
                x: best_x,
                loss: best_loss,
                diverged: true,
            };
        }
        if l < best_loss {
            best_loss = l;
            best_x = x.clone();
        }
    }
    AdamOutcome {
        x: best_x,
        loss: best_loss,
        diverged: false,
    }
}

fn restart_rng(seed: u64, k: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed.wrapping_add(k.wrapping_mul(0x9e37_79b9_7f4a_7c15)))
}

/// Best-of-restarts search result.
#[derive(Debug, Clone, Copy)]
pub struct Optimized<P> {
    pub params: P,
    pub loss: f64,
    /// Trajectories abandoned and redrawn after a non-finite loss.
    pub diverged_restarts: u64,
}

fn best_of_restarts<P, FInit, FRun>(
    restarts: usize,
    seed: u64,
    init: FInit,
    run_one: FRun,
) -> Result<Optimized<P>>
where
    P: Send + Copy,
    FInit: Fn(&mut ChaCha8Rng) -> Vec<f64> + Sync,
    FRun: Fn(Vec<f64>) -> (P, f64, bool) + Sync,
{
    if restarts < 1 {
        return Err(domain("need at least one restart"));
    }
    let outcomes: Vec<(f64, P, u64)> = (0..restarts as u64)
        .into_par_iter()
        .map(|k| {
            let mut rng = restart_rng(seed, k);
            let mut diverged = 0;
            // Redraw a slot whose trajectory went non-finite, a bounded
            // number of times.
            for _ in 0..8 {
                let (p, l, bad) = run_one(init(&mut rng));
                if !bad {
                    return (l, p, diverged);
                }
                diverged += 1;
            }
            let (p, l, _) = run_one(init(&mut rng));
            (l, p, diverged + 1)
        })
        .collect();

    let diverged_restarts = outcomes.iter().map(|o| o.2).sum();
    let best = outcomes
        .into_iter()
        .enumerate()
        .min_by(|(i, a), (j, b)| a.0.partial_cmp(&b.0).unwrap().then(i.cmp(j)))
        .map(|(_, o)| o)
        .expect("at least one restart");
    Ok(Optimized {
        params: best.1,
        loss: best.0,
        diverged_restarts,
    })
}

/// Optimizes the with-feedback model for a fixed window length `m`.
pub fn optimize(
    n_exp: u32,
    grid: &[f64],
    adam: &AdamConfig,
    restarts: usize,
    seed: u64,
    m: usize,
) -> Result<Optimized<HyperParams>> {
    adam.validate()?;
    if m < 1 {
        return Err(domain("window length must be at least 1"));
    }
    let objective = |v: &[f64]| -> f64 {
        loss(&HyperParams::from_vec(v, m), n_exp, grid).unwrap_or(f64::INFINITY)
    };
    best_of_restarts(
        restarts,
        seed,
        |rng| {
            vec![
                rng.random_range(0.0..TAU),
                rng.random_range(0.0..TAU),
                rng.random_range(0.0..TAU),
                rng.random_range(0.0..TAU),
                rng.random_range(-1.0..1.0),
                rng.random_range(0.0..1.0),
            ]
        },
        |x0| {
            let out = adam_minimize(&objective, x0, adam);
            (HyperParams::from_vec(&out.x, m), out.loss, out.diverged)
        },
    )
}

/// Optimizes the no-feedback control.
pub fn optimize_frozen(
    n_exp: u32,
    grid: &[f64],
    adam: &AdamConfig,
    restarts: usize,
    seed: u64,
) -> Result<Optimized<FrozenParams>> {
    adam.validate()?;
    let objective = |v: &[f64]| -> f64 {
        loss_frozen(&FrozenParams::from_vec(v), n_exp, grid).unwrap_or(f64::INFINITY)
    };
    best_of_restarts(
        restarts,
        seed,
        |rng| {
            vec![
                rng.random_range(0.0..TAU),
                rng.random_range(0.0..TAU),
                rng.random_range(0.0..TAU),
                rng.random_range(0.0..TAU),
                rng.random_range(0.0..std::f64::consts::FRAC_PI_2),
            ]
        },
        |x0| {
            let out = adam_minimize(&objective, x0, adam);
            (FrozenParams::from_vec(&out.x), out.loss, out.diverged)
        },
    )
}

/// One side of the monomial comparison after the downstream readout fit.
#[derive(Debug, Clone)]
pub struct MonomialSide<P> {
    pub params: P,
    pub loss: f64,
    pub mse_train: f64,
    pub mse_test: f64,
    pub clamp_events: u64,
    pub diverged_restarts: u64,
}

/// Both sides of the with/without-feedback comparison, each optimized
/// independently on the same grid.
#[derive(Debug, Clone)]
pub struct MonomialComparison {
    pub n_exp: u32,
    pub with_feedback: MonomialSide<HyperParams>,
    pub frozen: MonomialSide<FrozenParams>,
}

fn evaluate(cfg: &ReservoirConfig, ds: &Dataset) -> Result<PipelineResult> {
    run_pipeline(ds, cfg)
}

/// Optimizes the with-feedback model, sweeping the window length over
/// `m_candidates` and selecting by downstream training MSE.
pub fn optimize_monomial(
    n_exp: u32,
    grid: &[f64],
    train_cutoff: f64,
    adam: &AdamConfig,
    restarts: usize,
    seed: u64,
    m_candidates: &[usize],
) -> Result<MonomialSide<HyperParams>> {
    if m_candidates.is_empty() {
        return Err(domain("need at least one window-length candidate"));
    }
    let ds = monomial(n_exp, grid, train_cutoff)?;
    let mut best: Option<MonomialSide<HyperParams>> = None;
    for &m in m_candidates {
        let opt = optimize(n_exp, grid, adam, restarts, seed, m)?;
        let pipe = evaluate(&opt.params.reservoir_config(), &ds)?;
        let side = MonomialSide {
            params: opt.params,
            loss: opt.loss,
            mse_train: pipe.mse_train,
            mse_test: pipe.mse_test,
            clamp_events: pipe.features.clamp_events(),
            diverged_restarts: opt.diverged_restarts,
        };
        if best
            .as_ref()
            .map(|b| side.mse_train < b.mse_train)
            .unwrap_or(true)
        {
            best = Some(side);
        }
    }
    Ok(best.expect("at least one candidate evaluated"))
}

/// Runs the full, structurally fair comparison: the feedback model and the
/// frozen control are optimized separately, then both feed the same readout
/// protocol.
pub fn monomial_comparison(
    n_exp: u32,
    grid: &[f64],
    train_cutoff: f64,
    adam: &AdamConfig,
    restarts: usize,
    seed: u64,
    m_candidates: &[usize],
) -> Result<MonomialComparison> {
    let with_feedback = optimize_monomial(
        n_exp,
        grid,
        train_cutoff,
        adam,
        restarts,
        seed,
        m_candidates,
    )?;

    let ds = monomial(n_exp, grid, train_cutoff)?;
    let frozen_opt = optimize_frozen(n_exp, grid, adam, restarts, seed)?;
    let pipe = evaluate(&frozen_opt.params.reservoir_config(), &ds)?;
    let frozen = MonomialSide {
        params: frozen_opt.params,
        loss: frozen_opt.loss,
        mse_train: pipe.mse_train,
        mse_test: pipe.mse_test,
        clamp_events: pipe.features.clamp_events(),
        diverged_restarts: frozen_opt.diverged_restarts,
    };

    Ok(MonomialComparison {
        n_exp,
        with_feedback,
        frozen,
    })
}
