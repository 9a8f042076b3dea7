//! Shared argument types and flag parsers.

use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, ValueEnum};
use qmem_core::memristor::FeedbackRule;
use qmem_core::reservoir::FeedbackDrive;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TaskArg {
    Narma,
    MackeyGlass,
    SantaFe,
    Monomial,
}

impl TaskArg {
    pub fn name(self) -> &'static str {
        match self {
            TaskArg::Narma => "narma",
            TaskArg::MackeyGlass => "mackey-glass",
            TaskArg::SantaFe => "santa-fe",
            TaskArg::Monomial => "monomial",
        }
    }
}

/// Feedback rule flag: `ema:M_D`, `ma:M,A,B` or `frozen:R`.
#[derive(Debug, Clone, PartialEq)]
pub struct FeedbackArg(pub FeedbackRule);

impl FromStr for FeedbackArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (kind, rest) = s
            .split_once(':')
            .ok_or_else(|| format!("expected RULE:PARAMS, got {s:?}"))?;
        let rule = match kind {
            "ema" => FeedbackRule::ExpMovingAverage {
                m_d: rest
                    .parse()
                    .map_err(|_| format!("bad memory decay {rest:?}"))?,
            },
            "ma" => {
                let parts: Vec<&str> = rest.split(',').collect();
                if parts.len() != 3 {
                    return Err(format!("expected ma:M,A,B, got {s:?}"));
                }
                FeedbackRule::MovingAverage {
                    m: parts[0]
                        .parse()
                        .map_err(|_| format!("bad window {:?}", parts[0]))?,
                    a: parts[1]
                        .parse()
                        .map_err(|_| format!("bad gain {:?}", parts[1]))?,
                    b: parts[2]
                        .parse()
                        .map_err(|_| format!("bad offset {:?}", parts[2]))?,
                }
            }
            "frozen" => FeedbackRule::Frozen {
                r: rest
                    .parse()
                    .map_err(|_| format!("bad reflectivity {rest:?}"))?,
            },
            other => return Err(format!("unknown feedback rule {other:?}")),
        };
        rule.validate().map_err(|e| e.to_string())?;
        Ok(FeedbackArg(rule))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DriveArg {
    /// Feed the rule with the update-mode (cross-port) frequency p₂.
    Update,
    /// Feed the rule with the through-rail frequency p₁.
    Through,
}

impl From<DriveArg> for FeedbackDrive {
    fn from(d: DriveArg) -> Self {
        match d {
            DriveArg::Update => FeedbackDrive::UpdateMode,
            DriveArg::Through => FeedbackDrive::ThroughRail,
        }
    }
}

/// Inclusive integer range or comma list: `1:20` or `1,2,4,8`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntListArg(pub Vec<usize>);

impl FromStr for IntListArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parse_one = |v: &str| -> Result<usize, String> {
            v.trim().parse().map_err(|_| format!("bad integer {v:?}"))
        };
        let values = if let Some((lo, hi)) = s.split_once(':') {
            let (lo, hi) = (parse_one(lo)?, parse_one(hi)?);
            if lo > hi {
                return Err(format!("empty range {s:?}"));
            }
            (lo..=hi).collect()
        } else {
            s.split(',').map(parse_one).collect::<Result<Vec<_>, _>>()?
        };
        if values.is_empty() {
            return Err("need at least one value".into());
        }
        Ok(IntListArg(values))
    }
}

/// Options shared by every dataset-producing command.
#[derive(Debug, Args, Clone)]
pub struct DataOpts {
    /// Prediction records to generate (driven tasks).
    #[arg(long, default_value_t = 1000)]
    pub points: usize,

    /// Monomial exponent.
    #[arg(long, short = 'n', default_value_t = 4)]
    pub exponent: u32,

    /// Monomial train/test boundary on the input value.
    #[arg(long, default_value_t = 0.9)]
    pub cutoff: f64,

    /// Monomial grid size over [0, 1].
    #[arg(long, default_value_t = 101)]
    pub grid_points: usize,

    /// Laser-intensity file (one integer per line); falls back to
    /// $QMEM_DATA_DIR/santa_fe.txt, then to the bundled fixture.
    #[arg(long)]
    pub data: Option<PathBuf>,

    /// Sample offset into the laser-intensity file.
    #[arg(long, default_value_t = 0)]
    pub offset: usize,
}
