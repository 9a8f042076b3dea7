//! Verification of the reduced-state claims by simulated state tomography:
//! projective Pauli measurements through the output interferometer, linear
//! inversion, vacuum folding, and comparison against the closed-form purity.
//!
//! Post-selection keeps only the events where the photon exits one of the two
//! qubit rails; the vacuum branch (photon lost to the update mode) is folded
//! back into |0⟩⟨0| afterwards, weighted by its known probability x·R.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_PI_2;

use crate::error::{domain, Result};
use crate::memristor::phase_of;
use crate::optics::{
    apply, c, embed, mzi_unitary, probabilities, purity_closed_form, sample_counts_with, Mode,
    PhotonState, ReducedState, Unitary2,
};

/// Measurement bases of the single-qubit tomography.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PauliBasis {
    X,
    Y,
    Z,
}

/// One tomography setting: the basis plus the interferometer phase pair in
/// the hardware settings table, (internal, external) label order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PauliSetting {
    pub basis: PauliBasis,
    pub phi_internal: f64,
    pub psi_external: f64,
}

impl PauliSetting {
    /// The fixed settings table: X → (0, π/2), Y → (π/2, π/2), Z → (0, 0).
    pub fn for_basis(basis: PauliBasis) -> Self {
        let (phi_internal, psi_external) = match basis {
            PauliBasis::X => (0.0, FRAC_PI_2),
            PauliBasis::Y => (FRAC_PI_2, FRAC_PI_2),
            PauliBasis::Z => (0.0, 0.0),
        };
        Self {
            basis,
            phi_internal,
            psi_external,
        }
    }

    pub fn table() -> [PauliSetting; 3] {
        [
            Self::for_basis(PauliBasis::X),
            Self::for_basis(PauliBasis::Y),
            Self::for_basis(PauliBasis::Z),
        ]
    }

    /// Rotation applied by the measurement interferometer. The settings
    /// table carries the pair in its original label order; under this crate's
    /// matrix convention the two roles are exchanged, so the pair is consumed
    /// swapped (Y and Z are symmetric under the swap; for X the swap turns
    /// the stated pair into the balanced rotation it must be).
    pub fn measurement_unitary(&self) -> Result<Unitary2> {
        mzi_unitary(self.psi_external, self.phi_internal)
    }

    /// Output rail carrying the +1 eigenstate. The Z setting routes through
    /// the cross port, exchanging the rails.
    fn plus_port(&self) -> usize {
        match self.basis {
            PauliBasis::Z => 1,
            _ => 0,
        }
    }
}

fn encoded_input(x_enc: f64) -> Result<PhotonState> {
    if !(0.0..=1.0).contains(&x_enc) {
        return Err(domain(format!("encoded weight {x_enc} outside [0, 1]")));
    }
    PhotonState::new([c((1.0 - x_enc).sqrt()), c(x_enc.sqrt()), c(0.0)])
}

/// Expectation value of one Pauli operator for the encoded input √(1−x)|0⟩ +
/// √x|1⟩ passed through the coupler of reflectivity `r`, renormalized over
/// the post-selected single-photon events on the qubit rails.
pub fn measure_pauli(
    x_enc: f64,
    r: f64,
    setting: &PauliSetting,
    shots: Option<u64>,
    seed: u64,
) -> Result<f64> {
    if shots == Some(0) {
        return Err(domain("shot count must be at least 1"));
    }
    let state = encoded_input(x_enc)?;
    let u_mem = embed(&mzi_unitary(phase_of(r)?, 0.0)?, (Mode::B, Mode::C))?;
    let u_meas = embed(&setting.measurement_unitary()?, (Mode::A, Mode::B))?;
    let p = probabilities(&apply(&u_meas, &apply(&u_mem, &state)));

    let plus = setting.plus_port();
    let minus = 1 - plus;
    match shots {
        None => {
            let kept = p[0] + p[1];
            if kept < 1e-12 {
                return Err(domain("no post-selected probability mass"));
            }
            Ok((p[plus] - p[minus]) / kept)
        }
        Some(n) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let counts = sample_counts_with(p, n, &mut rng)?;
            let kept = counts[0] + counts[1];
            if kept == 0 {
                return Err(domain("no post-selected events"));
            }
            Ok((counts[plus] as f64 - counts[minus] as f64) / kept as f64)
        }
    }
}

/// Reconstructs the reduced output state by linear inversion of the three
/// Pauli expectations, then folds the vacuum branch (weight x·R) into
/// |0⟩⟨0|. With finite shots, negative eigenvalues from sampling noise are
/// clipped to zero and the state renormalized.
pub fn reconstruct(x_enc: f64, r: f64, shots: Option<u64>, seed: u64) -> Result<ReducedState> {
    if !(0.0..=1.0).contains(&r) {
        return Err(domain(format!("reflectivity {r} outside [0, 1]")));
    }
    let mut e = [0.0; 3];
    for (i, basis) in [PauliBasis::X, PauliBasis::Y, PauliBasis::Z]
        .iter()
        .enumerate()
    {
        let setting = PauliSetting::for_basis(*basis);
        // Separate stream per basis: three measurement runs, not one.
        e[i] = measure_pauli(x_enc, r, &setting, shots, seed.wrapping_add(i as u64))?;
    }
    let (ex, ey, ez) = (e[0], e[1], e[2]);
    let post_selected = [
        [c((1.0 + ez) / 2.0), Complex64::new(ex / 2.0, -ey / 2.0)],
        [Complex64::new(ex / 2.0, ey / 2.0), c((1.0 - ez) / 2.0)],
    ];

    let p_vac = x_enc * r;
    let weight = 1.0 - p_vac;
    let mut rho = [[Complex64::default(); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            rho[i][j] = post_selected[i][j] * weight;
        }
    }
    rho[0][0] += c(p_vac);

    if shots.is_some() {
        rho = clip_to_physical(rho);
    }
    ReducedState::new(rho)
}

/// Projects a Hermitian 2×2 matrix onto the physical set: eigenvalues clamped
/// at zero, trace renormalized to one.
fn clip_to_physical(rho: [[Complex64; 2]; 2]) -> [[Complex64; 2]; 2] {
    let a = rho[0][0].re;
    let d = rho[1][1].re;
    let z = rho[0][1];
    let half_tr = (a + d) / 2.0;
    let disc = ((a - d) / 2.0).powi(2) + z.norm_sqr();
    let root = disc.max(0.0).sqrt();
    let lam = [half_tr - root, half_tr + root];

    // Eigenvectors of [[a, z], [z̄, d]] for eigenvalue λ: (z, λ − a), except
    // when the matrix is already diagonal.
    if z.norm() < 1e-15 {
        let ca = a.max(0.0);
        let cd = d.max(0.0);
        let tr = ca + cd;
        return [[c(ca / tr), c(0.0)], [c(0.0), c(cd / tr)]];
    }

    let mut out = [[Complex64::default(); 2]; 2];
    let mut tr = 0.0;
    for &l in &lam {
        let v = [z, c(l - a)];
        let norm_sq = v[0].norm_sqr() + v[1].norm_sqr();
        let lc = l.max(0.0);
        tr += lc;
        for i in 0..2 {
            for j in 0..2 {
                out[i][j] += v[i] * v[j].conj() * (lc / norm_sq);
            }
        }
    }
    for row in &mut out {
        for e in row.iter_mut() {
            *e /= tr;
        }
    }
    out
}

/// One point of a tomography sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PurityRecord {
    pub x: f64,
    pub r: f64,
    pub purity_reconstructed: f64,
    pub purity_closed_form: f64,
}

/// Reconstruction purity across an (x, R) grid, paired with the closed form.
/// Points with no post-selected mass (x·R = 1, where every photon leaves
/// through the update mode) are skipped.
pub fn purity_grid(
    xs: &[f64],
    rs: &[f64],
    shots: Option<u64>,
    seed: u64,
) -> Result<Vec<PurityRecord>> {
    let mut records = Vec::with_capacity(xs.len() * rs.len());
    for (i, &x) in xs.iter().enumerate() {
        for (j, &r) in rs.iter().enumerate() {
            if x * r >= 1.0 - 1e-12 {
                continue;
            }
            let point_seed = seed
                .wrapping_add((i as u64) << 32)
                .wrapping_add((j as u64) << 8);
            let rho = reconstruct(x, r, shots, point_seed)?;
            records.push(PurityRecord {
                x,
                r,
                purity_reconstructed: rho.purity(),
                purity_closed_form: purity_closed_form(x, r),
            });
        }
    }
    Ok(records)
}
