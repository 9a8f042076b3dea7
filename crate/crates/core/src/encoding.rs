//! Maps a classical scalar in [0, 1] onto the dual-rail qubit (modes A/B,
//! ancilla C left in vacuum).
//!
//! All encoded amplitudes are real (zero encoding phase); none of the tasks
//! exploit a complex phase. The photon is injected into mode B, so the first
//! interferometer realizes the encoding rotation composed with any extra
//! input rotation as a single 2×2 unitary.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::optics::PhotonState;

/// The three scalar-to-qubit maps used by the benchmark tasks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EncodingScheme {
    /// x ↦ (√x, √(1−x), 0)
    SqrtDirect,
    /// x ↦ (x, √(1−x²), 0)
    AmplitudeDirect,
    /// x ↦ (√(1−x), √x, 0)
    SqrtFlipped,
}

impl EncodingScheme {
    /// Target amplitudes on modes (A, B).
    fn amp_pair(self, x: f64) -> (f64, f64) {
        match self {
            EncodingScheme::SqrtDirect => (x.sqrt(), (1.0 - x).sqrt()),
            EncodingScheme::AmplitudeDirect => (x, (1.0 - x * x).max(0.0).sqrt()),
            EncodingScheme::SqrtFlipped => ((1.0 - x).sqrt(), x.sqrt()),
        }
    }

    pub fn encode(self, x: f64) -> Result<PhotonState> {
        check_input(x)?;
        let (a, b) = self.amp_pair(x);
        PhotonState::from_real([a, b, 0.0])
    }

    /// Internal phase θ of the encoding interferometer: with the photon
    /// injected into mode B, `mzi_unitary(θ, 0)` reproduces the encoded
    /// amplitudes up to sign, i.e. cos(θ/2) equals the target mode-A
    /// amplitude.
    pub fn phase(self, x: f64) -> Result<f64> {
        check_input(x)?;
        let (a, _) = self.amp_pair(x);
        Ok(2.0 * a.clamp(0.0, 1.0).acos())
    }
}

fn check_input(x: f64) -> Result<()> {
    if !x.is_finite() || !(0.0..=1.0).contains(&x) {
        return Err(domain(format!("encoder input {x} outside [0, 1]")));
    }
    Ok(())
}

/// Encodes a scalar into a photon state under the given scheme.
pub fn encode(x: f64, scheme: EncodingScheme) -> Result<PhotonState> {
    scheme.encode(x)
}

/// Encoding interferometer phase for the given scheme (photon in mode B).
pub fn encoding_phase(x: f64, scheme: EncodingScheme) -> Result<f64> {
    scheme.phase(x)
}
