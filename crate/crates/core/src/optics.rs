//! Complex linear algebra for one photon over three spatial modes.
//!
//! Modes A and B carry a dual-rail qubit (|0⟩ ≡ photon in A, |1⟩ ≡ photon in
//! B); mode C is the ancilla that feeds the measurement-conditioned update
//! loop. Everything here is a pure value: states, 2×2 and 3×3 unitaries,
//! measurement probabilities, the reduced state of the non-measured rails and
//! its purity.
//!
//! The Mach-Zehnder convention used throughout is
//!
//! ```text
//! U(θ, ψ) = | e^{iψ}·sin(θ/2)   cos(θ/2) |
//!           | e^{iψ}·cos(θ/2)  −sin(θ/2) |
//! ```
//!
//! with θ the internal phase and ψ an external phase shifter on the first
//! input arm. The cross coupling between the paired modes is cos²(θ/2), so
//! θ = π leaves the pair untouched and θ = 0 swaps it. Output statistics are
//! invariant under the global-phase choices this form discards.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};

use crate::error::{domain, Result};

/// Absolute tolerance for normalization, unitarity and Hermiticity checks.
pub const TOL: f64 = 1e-12;

#[inline]
pub(crate) fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Spatial modes of the three-waveguide circuit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    A,
    B,
    C,
}

impl Mode {
    #[inline]
    pub fn index(self) -> usize {
        match self {
            Mode::A => 0,
            Mode::B => 1,
            Mode::C => 2,
        }
    }
}

/// Amplitudes of a single photon over modes A, B, C. Always normalized.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhotonState {
    amp: [Complex64; 3],
}

impl PhotonState {
    /// Builds a state, rejecting amplitude triples that are not normalized
    /// within [`TOL`].
    pub fn new(amp: [Complex64; 3]) -> Result<Self> {
        for a in &amp {
            if !a.re.is_finite() || !a.im.is_finite() {
                return Err(domain("photon state amplitude is not finite"));
            }
        }
        let norm_sq: f64 = amp.iter().map(|a| a.norm_sqr()).sum();
        if (norm_sq - 1.0).abs() > TOL {
            return Err(domain(format!(
                "photon state not normalized: |amp|^2 = {norm_sq}"
            )));
        }
        Ok(Self { amp })
    }

    /// Builds a state from real amplitudes.
    pub fn from_real(amp: [f64; 3]) -> Result<Self> {
        Self::new([c(amp[0]), c(amp[1]), c(amp[2])])
    }

    #[inline]
    pub(crate) fn new_unchecked(amp: [Complex64; 3]) -> Self {
        Self { amp }
    }

    #[inline]
    pub fn amp(&self) -> &[Complex64; 3] {
        &self.amp
    }

    #[inline]
    pub fn norm_sq(&self) -> f64 {
        self.amp.iter().map(|a| a.norm_sqr()).sum()
    }
}

/// A 2×2 unitary acting on a pair of modes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Unitary2 {
    m: [[Complex64; 2]; 2],
}

impl Unitary2 {
    /// Validates U†U = I within [`TOL`].
    pub fn new(m: [[Complex64; 2]; 2]) -> Result<Self> {
        let u = Self { m };
        let dev = u.unitarity_deviation();
        if dev.is_nan() || dev > TOL {
            return Err(domain(format!(
                "matrix is not unitary: max deviation {dev}"
            )));
        }
        Ok(u)
    }

    pub fn identity() -> Self {
        Self {
            m: [[c(1.0), c(0.0)], [c(0.0), c(1.0)]],
        }
    }

    #[inline]
    pub fn entries(&self) -> &[[Complex64; 2]; 2] {
        &self.m
    }

    /// Max-norm of U†U − I.
    pub fn unitarity_deviation(&self) -> f64 {
        let mut dev: f64 = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                let mut s = Complex64::default();
                for k in 0..2 {
                    s += self.m[k][i].conj() * self.m[k][j];
                }
                let target = if i == j { 1.0 } else { 0.0 };
                dev = dev.max((s - c(target)).norm());
            }
        }
        dev
    }
}

/// Mach-Zehnder unitary with internal phase `theta` and external phase `psi`
/// (see the module-level convention). The cross coupling of the paired modes
/// is cos²(θ/2).
pub fn mzi_unitary(theta: f64, psi: f64) -> Result<Unitary2> {
    if !theta.is_finite() || !psi.is_finite() {
        return Err(domain("MZI phases must be finite"));
    }
    let (s, co) = ((theta / 2.0).sin(), (theta / 2.0).cos());
    let e = Complex64::from_polar(1.0, psi);
    Ok(Unitary2 {
        m: [[e * s, c(co)], [e * co, c(-s)]],
    })
}

/// A 3×3 unitary over modes A, B, C, remembering which pair it was embedded
/// from (when it was).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Unitary3 {
    m: [[Complex64; 3]; 3],
    acts_on: Option<(Mode, Mode)>,
}

impl Unitary3 {
    pub fn new(m: [[Complex64; 3]; 3]) -> Result<Self> {
        let u = Self { m, acts_on: None };
        let dev = u.unitarity_deviation();
        if dev.is_nan() || dev > TOL {
            return Err(domain(format!(
                "matrix is not unitary: max deviation {dev}"
            )));
        }
        Ok(u)
    }

    pub fn identity() -> Self {
        let mut m = [[c(0.0); 3]; 3];
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = c(1.0);
        }
        Self { m, acts_on: None }
    }

    #[inline]
    pub fn entries(&self) -> &[[Complex64; 3]; 3] {
        &self.m
    }

    /// The mode pair this operator was embedded from, if any.
    #[inline]
    pub fn acts_on(&self) -> Option<(Mode, Mode)> {
        self.acts_on
    }

    /// Max-norm of U†U − I.
    pub fn unitarity_deviation(&self) -> f64 {
        let mut dev: f64 = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                let mut s = Complex64::default();
                for k in 0..3 {
                    s += self.m[k][i].conj() * self.m[k][j];
                }
                let target = if i == j { 1.0 } else { 0.0 };
                dev = dev.max((s - c(target)).norm());
            }
        }
        dev
    }

    /// Composition `self · other` (apply `other` first).
    pub fn compose(&self, other: &Unitary3) -> Unitary3 {
        let mut m = [[Complex64::default(); 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    m[i][j] += self.m[i][k] * other.m[k][j];
                }
            }
        }
        Unitary3 { m, acts_on: None }
    }
}

/// Embeds a 2×2 unitary on the given ordered mode pair, identity elsewhere.
pub fn embed(u: &Unitary2, modes: (Mode, Mode)) -> Result<Unitary3> {
    let (p, q) = (modes.0.index(), modes.1.index());
    if p == q {
        return Err(domain("embedding requires two distinct modes"));
    }
    let mut m = [[c(0.0); 3]; 3];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = c(1.0);
    }
    let e = u.entries();
    m[p][p] = e[0][0];
    m[p][q] = e[0][1];
    m[q][p] = e[1][0];
    m[q][q] = e[1][1];
    Ok(Unitary3 {
        m,
        acts_on: Some(modes),
    })
}

/// Evolves a state through a 3-mode unitary.
pub fn apply(u: &Unitary3, s: &PhotonState) -> PhotonState {
    let a = s.amp();
    let m = u.entries();
    let mut out = [Complex64::default(); 3];
    for (i, o) in out.iter_mut().enumerate() {
        *o = m[i][0] * a[0] + m[i][1] * a[1] + m[i][2] * a[2];
    }
    PhotonState::new_unchecked(out)
}

/// Detection probabilities per output mode: pᵢ = |ampᵢ|², renormalized so the
/// triple sums to one (roundoff-scale negatives are clamped to zero first).
pub fn probabilities(s: &PhotonState) -> [f64; 3] {
    let mut p = [0.0; 3];
    for (i, a) in s.amp().iter().enumerate() {
        p[i] = a.norm_sqr().max(0.0);
    }
    let sum: f64 = p.iter().sum();
    [p[0] / sum, p[1] / sum, p[2] / sum]
}

/// Multinomial photon counts over the three output modes for a finite number
/// of heralded shots, from a fixed seed. Counts always sum to `shots`.
pub fn sample_counts(p: [f64; 3], shots: u64, rng_seed: u64) -> Result<[u64; 3]> {
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    sample_counts_with(p, shots, &mut rng)
}

/// As [`sample_counts`], drawing from a caller-owned RNG stream.
pub fn sample_counts_with<R: Rng + ?Sized>(
    p: [f64; 3],
    shots: u64,
    rng: &mut R,
) -> Result<[u64; 3]> {
    if shots == 0 {
        return Err(domain("shot count must be at least 1"));
    }
    let mut q = [0.0; 3];
    for (i, &pi) in p.iter().enumerate() {
        if !pi.is_finite() || pi < -TOL {
            return Err(domain(format!("invalid probability p[{i}] = {pi}")));
        }
        q[i] = pi.max(0.0);
    }
    let sum: f64 = q.iter().sum();
    if (sum - 1.0).abs() > 1e-9 {
        return Err(domain(format!("probabilities sum to {sum}, expected 1")));
    }

    // Chain of binomial splits: mode 0 vs rest, then mode 1 vs mode 2.
    let c0 = Binomial::new(shots, (q[0] / sum).min(1.0))
        .map_err(|e| domain(format!("binomial: {e}")))?
        .sample(rng);
    let rest = shots - c0;
    let c1 = if rest == 0 {
        0
    } else {
        let tail = q[1] + q[2];
        let cond = if tail > 0.0 {
            (q[1] / tail).min(1.0)
        } else {
            0.0
        };
        Binomial::new(rest, cond)
            .map_err(|e| domain(format!("binomial: {e}")))?
            .sample(rng)
    };
    Ok([c0, c1, rest - c1])
}

/// 2×2 density matrix of the dual-rail qubit after the update mode is traced
/// out, with the vacuum branch folded into |0⟩⟨0| (both "photon stayed in the
/// top rail" and "photon left through the update mode" present vacuum to the
/// lower rail).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedState {
    rho: [[Complex64; 2]; 2],
}

impl ReducedState {
    /// Validates Hermiticity, unit trace and positive semidefiniteness
    /// (eigenvalues ≥ −[`TOL`]).
    pub fn new(rho: [[Complex64; 2]; 2]) -> Result<Self> {
        let herm = (rho[0][1] - rho[1][0].conj())
            .norm()
            .max(rho[0][0].im.abs().max(rho[1][1].im.abs()));
        if herm > TOL {
            return Err(domain(format!("matrix not Hermitian: deviation {herm}")));
        }
        let trace = rho[0][0].re + rho[1][1].re;
        if (trace - 1.0).abs() > TOL {
            return Err(domain(format!("trace is {trace}, expected 1")));
        }
        let s = Self { rho };
        let [lo, _] = s.eigenvalues();
        if lo < -TOL {
            return Err(domain(format!("negative eigenvalue {lo}")));
        }
        Ok(s)
    }

    #[inline]
    pub fn rho(&self) -> &[[Complex64; 2]; 2] {
        &self.rho
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> [f64; 2] {
        let half_tr = (self.rho[0][0].re + self.rho[1][1].re) / 2.0;
        let det = (self.rho[0][0] * self.rho[1][1] - self.rho[0][1] * self.rho[1][0]).re;
        let disc = (half_tr * half_tr - det).max(0.0).sqrt();
        [half_tr - disc, half_tr + disc]
    }

    /// Tr(ρ²).
    pub fn purity(&self) -> f64 {
        self.rho.iter().flatten().map(|e| e.norm_sqr()).sum()
    }
}

/// Reduced output state for a dual-rail input (support on modes A and B only)
/// passed through the update-mode coupler of reflectivity `r`, after tracing
/// out the update mode and folding the vacuum branch into |0⟩⟨0|.
pub fn reduced_state(input: &PhotonState, r: f64) -> Result<ReducedState> {
    if !(0.0..=1.0).contains(&r) {
        return Err(domain(format!("reflectivity {r} outside [0, 1]")));
    }
    let a = input.amp();
    if a[2].norm() > 1e-9 {
        return Err(domain("input must have no amplitude on the ancilla mode"));
    }
    let pa = a[0].norm_sqr();
    let pb = a[1].norm_sqr();
    let keep = (1.0 - r).sqrt();
    let off = a[0] * a[1].conj() * keep;
    ReducedState::new([[c(pa + pb * r), off], [off.conj(), c(pb * (1.0 - r))]])
}

/// [`reduced_state`] for the encoded input cos α|0⟩ + e^{iφ} sin α|1⟩ with
/// sin²α = `x_enc`.
pub fn reduced_state_from_params(x_enc: f64, r: f64, phi: f64) -> Result<ReducedState> {
    if !(0.0..=1.0).contains(&x_enc) {
        return Err(domain(format!("encoded weight {x_enc} outside [0, 1]")));
    }
    if !phi.is_finite() {
        return Err(domain("encoding phase must be finite"));
    }
    let cos_a = (1.0 - x_enc).sqrt();
    let sin_a = x_enc.sqrt();
    let input = PhotonState::new([c(cos_a), Complex64::from_polar(sin_a, phi), c(0.0)])?;
    reduced_state(&input, r)
}

/// Tr(ρ²) of a reduced state.
pub fn purity(rho: &ReducedState) -> f64 {
    rho.purity()
}

/// Closed form of the purity after tracing out the update mode:
/// 1 − 2·x²·r(1−r) with x = sin²α the |1⟩ weight of the input.
/// The symmetric factor r(1−r) is grouped first so the r ↔ 1−r symmetry
/// survives floating-point evaluation bit-exactly.
pub fn purity_closed_form(x_enc: f64, r: f64) -> f64 {
    let mixing = r * (1.0 - r);
    1.0 - 2.0 * x_enc * x_enc * mixing
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn assert_mat2_eq(u: &Unitary2, want: [[f64; 2]; 2]) {
        for i in 0..2 {
            for j in 0..2 {
                assert_abs_diff_eq!(u.entries()[i][j].re, want[i][j], epsilon = 1e-15);
                assert_abs_diff_eq!(u.entries()[i][j].im, 0.0, epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn mzi_bar_state_at_pi() {
        let u = mzi_unitary(PI, 0.0).unwrap();
        assert_mat2_eq(&u, [[1.0, 0.0], [0.0, -1.0]]);
    }

    #[test]
    fn mzi_full_swap_at_zero() {
        let u = mzi_unitary(0.0, 0.0).unwrap();
        assert_mat2_eq(&u, [[0.0, 1.0], [1.0, 0.0]]);
    }

    #[test]
    fn mzi_balanced_at_half_pi() {
        let u = mzi_unitary(PI / 2.0, 0.0).unwrap();
        for row in u.entries() {
            for e in row {
                assert_abs_diff_eq!(e.norm(), FRAC_1_SQRT_2, epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn mzi_cross_coupling_is_cos_sq_half_theta() {
        for k in 0..=16 {
            let theta = PI * k as f64 / 16.0;
            let u = mzi_unitary(theta, 0.3).unwrap();
            let refl = (theta / 2.0).cos().powi(2);
            assert_abs_diff_eq!(u.entries()[0][1].norm_sqr(), refl, epsilon = 1e-14);
        }
    }

    #[test]
    fn mzi_rejects_non_finite() {
        assert!(mzi_unitary(f64::NAN, 0.0).is_err());
        assert!(mzi_unitary(0.0, f64::INFINITY).is_err());
    }

    #[test]
    fn embed_identity_is_identity() {
        let u = embed(&Unitary2::identity(), (Mode::B, Mode::C)).unwrap();
        assert_eq!(u.entries(), Unitary3::identity().entries());
        assert_eq!(u.acts_on(), Some((Mode::B, Mode::C)));
    }

    #[test]
    fn embed_swap_on_bc_permutes_lower_block() {
        let u = embed(&mzi_unitary(0.0, 0.0).unwrap(), (Mode::B, Mode::C)).unwrap();
        let s = PhotonState::from_real([0.0, 1.0, 0.0]).unwrap();
        let out = apply(&u, &s);
        assert_abs_diff_eq!(out.amp()[2].re, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(out.amp()[1].norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn embed_on_ab_leaves_c_untouched() {
        let u = embed(&mzi_unitary(PI / 2.0, 0.0).unwrap(), (Mode::A, Mode::B)).unwrap();
        assert_abs_diff_eq!(u.entries()[2][2].re, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(u.entries()[2][0].norm(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(u.entries()[0][2].norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn embed_rejects_repeated_mode() {
        assert!(embed(&Unitary2::identity(), (Mode::A, Mode::A)).is_err());
    }

    #[test]
    fn apply_identity_is_noop() {
        let s = PhotonState::from_real([0.6, 0.8, 0.0]).unwrap();
        let out = apply(&Unitary3::identity(), &s);
        assert_eq!(out.amp(), s.amp());
    }

    #[test]
    fn apply_balanced_splitter_splits_mode_b() {
        let u = embed(&mzi_unitary(PI / 2.0, 0.0).unwrap(), (Mode::B, Mode::C)).unwrap();
        let s = PhotonState::from_real([0.5_f64.sqrt(), 0.5_f64.sqrt(), 0.0]).unwrap();
        let p = probabilities(&apply(&u, &s));
        assert_abs_diff_eq!(p[0], 0.5, epsilon = 1e-14);
        assert_abs_diff_eq!(p[1], 0.25, epsilon = 1e-14);
        assert_abs_diff_eq!(p[2], 0.25, epsilon = 1e-14);
    }

    #[test]
    fn probabilities_of_basis_and_superposition() {
        let s = PhotonState::from_real([1.0, 0.0, 0.0]).unwrap();
        assert_eq!(probabilities(&s), [1.0, 0.0, 0.0]);
        let s = PhotonState::from_real([0.3_f64.sqrt(), 0.7_f64.sqrt(), 0.0]).unwrap();
        let p = probabilities(&s);
        assert_abs_diff_eq!(p[0], 0.3, epsilon = 1e-15);
        assert_abs_diff_eq!(p[1], 0.7, epsilon = 1e-15);
        assert_abs_diff_eq!(p[2], 0.0, epsilon = 1e-15);
    }

    #[test]
    fn sample_counts_degenerate_distribution() {
        assert_eq!(
            sample_counts([1.0, 0.0, 0.0], 100, 99).unwrap(),
            [100, 0, 0]
        );
    }

    #[test]
    fn sample_counts_binomial_concentration() {
        // 3σ = 3·√(n·p·q) = 1500 at n = 10⁶, p = 1/2.
        let counts = sample_counts([0.5, 0.5, 0.0], 1_000_000, 42).unwrap();
        assert!(counts[0].abs_diff(500_000) < 1500, "counts = {counts:?}");
        assert!(counts[1].abs_diff(500_000) < 1500, "counts = {counts:?}");
        assert_eq!(counts[2], 0);
    }

    #[test]
    fn sample_counts_deterministic_for_fixed_seed() {
        let p = [1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0];
        let a = sample_counts(p, 3, 7).unwrap();
        let b = sample_counts(p, 3, 7).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.iter().sum::<u64>(), 3);
    }

    #[test]
    fn sample_counts_rejects_zero_shots() {
        assert!(sample_counts([1.0, 0.0, 0.0], 0, 0).is_err());
    }

    #[test]
    fn reduced_state_purity_matches_reference_points() {
        for (x, r, want) in [
            (0.5, 0.0, 1.0),
            (0.9, 0.5, 0.595),
            (0.5, 0.5, 0.875),
            (0.1, 0.5, 0.995),
        ] {
            let rho = reduced_state_from_params(x, r, 0.0).unwrap();
            assert_abs_diff_eq!(rho.purity(), want, epsilon = 1e-12);
            assert_abs_diff_eq!(rho.purity(), purity_closed_form(x, r), epsilon = 1e-12);
        }
    }

    #[test]
    fn reduced_state_diagonal_and_off_diagonal() {
        let (x, r) = (0.3, 0.4);
        let rho = reduced_state_from_params(x, r, 0.0).unwrap();
        let m = rho.rho();
        assert_abs_diff_eq!(m[0][0].re, (1.0 - x) + x * r, epsilon = 1e-15);
        assert_abs_diff_eq!(m[1][1].re, x * (1.0 - r), epsilon = 1e-15);
        let want_off = ((1.0 - x) * x).sqrt() * (1.0 - r).sqrt();
        assert_abs_diff_eq!(m[0][1].norm(), want_off, epsilon = 1e-15);
    }

    #[test]
    fn purity_extremes() {
        // Identity coupler and full redirection both leave a pure state.
        for x in [0.0, 0.3, 1.0] {
            for r in [0.0, 1.0] {
                let rho = reduced_state_from_params(x, r, 0.1).unwrap();
                assert_abs_diff_eq!(rho.purity(), 1.0, epsilon = 1e-12);
            }
        }
        // Worst case: |1⟩ input on a balanced coupler.
        assert_abs_diff_eq!(purity_closed_form(1.0, 0.5), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn purity_symmetric_in_r() {
        // Bit-exact on dyadic reflectivities, where 1−r is itself exact and
        // both sides reduce to the same product r·(1−r).
        for k in 0..=32 {
            let r = k as f64 / 32.0;
            for x in [0.1, 0.5, 0.9] {
                assert_eq!(purity_closed_form(x, r), purity_closed_form(x, 1.0 - r));
            }
        }
        // Within roundoff everywhere else.
        for k in 0..=20 {
            let r = k as f64 / 20.0;
            assert_abs_diff_eq!(
                purity_closed_form(0.7, r),
                purity_closed_form(0.7, 1.0 - r),
                epsilon = 1e-15
            );
        }
    }

    #[test]
    fn reduced_state_rejects_out_of_range() {
        assert!(reduced_state_from_params(-0.1, 0.5, 0.0).is_err());
        assert!(reduced_state_from_params(0.5, 1.5, 0.0).is_err());
        let s = PhotonState::from_real([0.0, 0.0, 1.0]).unwrap();
        assert!(reduced_state(&s, 0.5).is_err());
    }

    #[test]
    fn photon_state_rejects_unnormalized() {
        assert!(PhotonState::from_real([1.0, 1.0, 0.0]).is_err());
        assert!(PhotonState::new([c(f64::NAN), c(0.0), c(0.0)]).is_err());
    }
}
