//! The time-stepped quantum reservoir.
//!
//! Per input x_t: encode onto the dual rail, rotate with U₁ on (A, B), pass
//! through the memristive coupler U_mem(R_t) on (B, C), rotate with U₂ on
//! (A, B), read out the probability triple, then feed the configured drive
//! statistic (see [`FeedbackDrive`]) to the feedback rule. The reflectivity
//! applied at step t therefore depends on outcomes up to step t−1 only.
//!
//! A single run is strictly sequential; independent runs (seeds, parameter
//! candidates) can execute in parallel freely since all state is local.

use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::encoding::EncodingScheme;
use crate::error::{domain, Result};
use crate::memristor::{phase_of, FeedbackRule, MemristorState};
use crate::optics::{apply, embed, mzi_unitary, probabilities, sample_counts_with, Mode};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Which output statistic feeds the feedback rule.
///
/// After the memristive coupler, the photon's rail-B amplitude either crosses
/// into the update mode (probability R·h, read at output p₂) or stays on the
/// qubit rail (probability (1−R)·h, read at p₁), with h the encoded rail-B
/// weight. The one-step algebra of the update law is stated for the crossed
/// fraction; driving the averaging rules with it, however, makes R = 0
/// absorbing (p₂ never exceeds R), so the reflectivity decays geometrically
/// and the memory washes out of the features. The benchmarks therefore run
/// with the through-rail statistic, whose feedback relaxes to a stable
/// interior operating point instead.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FeedbackDrive {
    /// Feed the rule with p₂, the update-mode (cross-port) frequency.
    UpdateMode,
    /// Feed the rule with p₁, the through-rail frequency.
    ThroughRail,
}

/// Internal/external phase pair of one interferometer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MziPhases {
    pub theta: f64,
    pub psi: f64,
}

impl MziPhases {
    /// Bar configuration: the pair of modes passes through unmixed, so output
    /// statistics are those of the identity.
    pub const IDENTITY: MziPhases = MziPhases {
        theta: std::f64::consts::PI,
        psi: 0.0,
    };

    pub fn new(theta: f64, psi: f64) -> Self {
        Self { theta, psi }
    }
}

/// Full configuration of one reservoir run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReservoirConfig {
    pub scheme: EncodingScheme,
    /// Input rotation, composed with the encoder on modes (A, B).
    pub u1: MziPhases,
    /// Output rotation on modes (A, B).
    pub u2: MziPhases,
    pub rule: FeedbackRule,
    /// Which output probability the rule consumes.
    pub drive: FeedbackDrive,
    /// Initial reflectivity of the memristive coupler.
    pub r0: f64,
    /// When set, probabilities are replaced by count frequencies over this
    /// many heralded shots per step; `None` means exact probabilities.
    pub shots: Option<u64>,
    pub seed: u64,
}

impl ReservoirConfig {
    /// Identity rotations, through-rail feedback, balanced initial coupler,
    /// exact probabilities.
    pub fn new(scheme: EncodingScheme, rule: FeedbackRule) -> Self {
        Self {
            scheme,
            u1: MziPhases::IDENTITY,
            u2: MziPhases::IDENTITY,
            rule,
            drive: FeedbackDrive::ThroughRail,
            r0: 0.5,
            shots: None,
            seed: 0,
        }
    }

    /// The no-feedback control: same circuit, reflectivity pinned at `r0`.
    pub fn frozen_variant(&self) -> ReservoirConfig {
        let mut cfg = self.clone();
        cfg.rule = FeedbackRule::Frozen { r: self.r0 };
        cfg
    }

    pub fn validate(&self) -> Result<()> {
        self.rule.validate()?;
        if !(0.0..=1.0).contains(&self.r0) {
            return Err(domain(format!(
                "initial reflectivity {} outside [0, 1]",
                self.r0
            )));
        }
        for phases in [&self.u1, &self.u2] {
            if !phases.theta.is_finite() || !phases.psi.is_finite() {
                return Err(domain("interferometer phases must be finite"));
            }
        }
        if self.shots == Some(0) {
            return Err(domain("shot count must be at least 1"));
        }
        Ok(())
    }
}

/// Per-step output probability triples plus the reflectivity trace.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    rows: Vec<[f64; 3]>,
    r_trace: Vec<f64>,
    clamp_events: u64,
}

impl FeatureMatrix {
    /// One (p₀, p₁, p₂) triple per time step.
    #[inline]
    pub fn rows(&self) -> &[[f64; 3]] {
        &self.rows
    }

    /// Reflectivity applied at each step.
    #[inline]
    pub fn r_trace(&self) -> &[f64] {
        &self.r_trace
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Feedback updates that had to be clamped back into [0, 1].
    #[inline]
    pub fn clamp_events(&self) -> u64 {
        self.clamp_events
    }

    /// One probability column as a vector.
    pub fn column(&self, i: usize) -> Vec<f64> {
        self.rows.iter().map(|r| r[i]).collect()
    }

    /// CSV export: header `t,p0,p1,p2,R`, one row per step, 17 significant
    /// digits per float.
    pub fn write_csv<W: Write>(&self, w: &mut W) -> io::Result<()> {
        writeln!(w, "t,p0,p1,p2,R")?;
        for (t, (row, r)) in self.rows.iter().zip(&self.r_trace).enumerate() {
            writeln!(
                w,
                "{t},{:.16e},{:.16e},{:.16e},{:.16e}",
                row[0], row[1], row[2], r
            )?;
        }
        Ok(())
    }
}

/// Runs the reservoir over an input sequence, producing one feature row per
/// step.
pub fn run(xs: &[f64], cfg: &ReservoirConfig) -> Result<FeatureMatrix> {
    cfg.validate()?;
    let u1 = embed(&mzi_unitary(cfg.u1.theta, cfg.u1.psi)?, (Mode::A, Mode::B))?;
    let u2 = embed(&mzi_unitary(cfg.u2.theta, cfg.u2.psi)?, (Mode::A, Mode::B))?;
    // A frozen rule pins the reflectivity itself; r0 applies to the live rules.
    let r_init = match cfg.rule {
        FeedbackRule::Frozen { r } => r,
        _ => cfg.r0,
    };
    let mut mem = MemristorState::new(r_init)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    let mut rows = Vec::with_capacity(xs.len());
    let mut r_trace = Vec::with_capacity(xs.len());
    for &x in xs {
        let r = mem.reflectivity();
        let u_mem = embed(&mzi_unitary(phase_of(r)?, 0.0)?, (Mode::B, Mode::C))?;

        let state = cfg.scheme.encode(x)?;
        let state = apply(&u1, &state);
        let state = apply(&u_mem, &state);
        let state = apply(&u2, &state);
        let p = probabilities(&state);

        let row = match cfg.shots {
            None => p,
            Some(shots) => {
                let counts = sample_counts_with(p, shots, &mut rng)?;
                let n = shots as f64;
                let f0 = counts[0] as f64 / n;
                let f1 = counts[1] as f64 / n;
                [f0, f1, (1.0 - f0 - f1).max(0.0)]
            }
        };

        let fed = match cfg.drive {
            FeedbackDrive::UpdateMode => row[2],
            FeedbackDrive::ThroughRail => row[1],
        };
        r_trace.push(r);
        mem = mem.updated(&cfg.rule, fed)?;
        rows.push(row);
    }

    Ok(FeatureMatrix {
        rows,
        r_trace,
        clamp_events: mem.clamp_events(),
    })
}

/// Runs the same inputs through a feedback configuration and its frozen
/// control, row-aligned.
pub fn run_pair(
    xs: &[f64],
    cfg: &ReservoirConfig,
    frozen: &ReservoirConfig,
) -> Result<(FeatureMatrix, FeatureMatrix)> {
    if !frozen.rule.is_frozen() {
        return Err(domain("control configuration must use the frozen rule"));
    }
    Ok((run(xs, cfg)?, run(xs, frozen)?))
}
