//! Closed-form propagators under the two integrability conditions.
//!
//! Both conditions constrain the mixing angle of a parity block: the first
//! freezes it (field and coupling stay proportional), the second ties its
//! rate to the level gap, `θ' = κ η`. Each yields the evolution of the four
//! instantaneous eigenstates `φ1..φ4` at `t = 0` as amplitude pairs
//! `x, y` (subspace I) and `z, w` (subspace II).

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64 as C64;
use thiserror::Error;

use crate::drive::{DriveError, DriveProfile};
use crate::model::{Couplings, Hamiltonian, ModelParams, Subspace};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExactError {
    #[error("first integrability condition fails in subspace {subspace:?}: field and coupling are not proportional (relative deviation {deviation:e} at t = {t})")]
    NotIntegrable { subspace: Subspace, deviation: f64, t: f64 },
    #[error("cos 2θ left [-1, 1] in subspace {subspace:?} at t = {t} (value {value})")]
    BranchExit { subspace: Subspace, t: f64, value: f64 },
    #[error("invalid setup: {0}")]
    InvalidSetup(String),
    #[error(transparent)]
    Drive(#[from] DriveError),
}

/// The instantaneous eigenstates at `t = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Eigenstate {
    Phi1,
    Phi2,
    Phi3,
    Phi4,
}

impl Eigenstate {
    pub const ALL: [Eigenstate; 4] = [Eigenstate::Phi1, Eigenstate::Phi2, Eigenstate::Phi3, Eigenstate::Phi4];

    pub fn subspace(self) -> Subspace {
        match self {
            Eigenstate::Phi1 | Eigenstate::Phi2 => Subspace::I,
            Eigenstate::Phi3 | Eigenstate::Phi4 => Subspace::II,
        }
    }

    pub fn label(self) -> AmplitudeLabel {
        match self {
            Eigenstate::Phi1 => AmplitudeLabel::X,
            Eigenstate::Phi2 => AmplitudeLabel::Y,
            Eigenstate::Phi3 => AmplitudeLabel::Z,
            Eigenstate::Phi4 => AmplitudeLabel::W,
        }
    }

    /// True for the upper level of its block (`φ1`, `φ3`).
    fn is_upper(self) -> bool {
        matches!(self, Eigenstate::Phi1 | Eigenstate::Phi3)
    }

    /// Amplitudes at `t = 0` for block angle `theta0`.
    pub fn initial(self, theta0: f64) -> BlockAmplitudes {
        let (s, c) = theta0.sin_cos();
        let (a1, a2) = if self.is_upper() { (c, s) } else { (-s, c) };
        BlockAmplitudes::new(C64::new(a1, 0.0), C64::new(a2, 0.0), self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AmplitudeLabel {
    X,
    Y,
    Z,
    W,
}

/// Two amplitudes of a state inside one parity block: `a1` on `|++>`
/// (or `|+->`), `a2` on `|-->` (or `|-+>`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockAmplitudes {
    pub a1: C64,
    pub a2: C64,
    pub subspace: Subspace,
    pub label: AmplitudeLabel,
}

impl BlockAmplitudes {
    pub fn new(a1: C64, a2: C64, origin: Eigenstate) -> Self {
        BlockAmplitudes {
            a1,
            a2,
            subspace: origin.subspace(),
            label: origin.label(),
        }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.a1.norm_sqr() + self.a2.norm_sqr()
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &BlockAmplitudes) -> C64 {
        self.a1.conj() * other.a1 + self.a2.conj() * other.a2
    }

    pub fn scaled(&self, factor: C64) -> Self {
        BlockAmplitudes {
            a1: factor * self.a1,
            a2: factor * self.a2,
            ..*self
        }
    }
}

/// How the dynamical phase of the first integrability condition is
/// accumulated.
///
/// `Signed` integrates the projection of the (field, coupling) vector onto
/// its fixed direction, which is the exact propagator phase. `Magnitude`
/// integrates the non-negative gap `η = sqrt(ω² + λ²)`; it differs from the
/// exact phase whenever the field changes sign.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PhaseConvention {
    #[default]
    Signed,
    Magnitude,
}

/// Mixing angles of the two blocks under the first integrability
/// condition: `tan 2θ10 = k` with `λm = k ω+`, and likewise `θ20` for
/// `λp = k' ω-`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ic1Setup {
    pub theta10: f64,
    pub theta20: f64,
}

impl Ic1Setup {
    /// Angles from the proportionality constants. Both lie in `(-π/4, π/4)`.
    pub fn from_k(k: f64, k2: f64) -> Self {
        Ic1Setup {
            theta10: 0.5 * k.atan(),
            theta20: 0.5 * k2.atan(),
        }
    }

    pub fn k(&self) -> f64 {
        (2.0 * self.theta10).tan()
    }

    pub fn k2(&self) -> f64 {
        (2.0 * self.theta20).tan()
    }

    pub fn theta0(&self, subspace: Subspace) -> f64 {
        match subspace {
            Subspace::I => self.theta10,
            Subspace::II => self.theta20,
        }
    }

    /// Infer the fixed angles from sampled couplings on `[0, t_end]`.
    ///
    /// The direction is taken from the sample with the largest
    /// `sqrt(ω² + λ²)` and canonicalised to `2θ ∈ (-π/2, π/2]`; a block whose
    /// field and coupling vanish everywhere gets angle 0.
    pub fn detect(params: &ModelParams, t_end: f64) -> Result<Self, ExactError> {
        let samples = sample_couplings(params, t_end);
        let detect_block = |subspace: Subspace| {
            let reference =
                samples
                    .iter()
                    .map(|(_, c)| field_coupling(c, subspace))
                    .fold((0.0_f64, 0.0_f64), |best, (w, l)| {
                        if w.hypot(l) > best.0.hypot(best.1) {
                            (w, l)
                        } else {
                            best
                        }
                    });
            let (w, l) = if reference.0 < 0.0 || (reference.0 == 0.0 && reference.1 < 0.0) {
                (-reference.0, -reference.1)
            } else {
                reference
            };
            if w == 0.0 && l == 0.0 {
                0.0
            } else {
                0.5 * l.atan2(w)
            }
        };
        let setup = Ic1Setup {
            theta10: detect_block(Subspace::I),
            theta20: detect_block(Subspace::II),
        };
        setup.verify(params, t_end)?;
        Ok(setup)
    }

    /// Check on 1000 grid points that each block's (field, coupling) vector
    /// stays along the direction fixed by its angle, to relative `1e-10`.
    pub fn verify(&self, params: &ModelParams, t_end: f64) -> Result<(), ExactError> {
        let samples = sample_couplings(params, t_end);
        for subspace in [Subspace::I, Subspace::II] {
            let (s, c) = (2.0 * self.theta0(subspace)).sin_cos();
            let scale = samples
                .iter()
                .map(|(_, cp)| {
                    let (w, l) = field_coupling(cp, subspace);
                    w.hypot(l)
                })
                .fold(0.0, f64::max);
            for (t, cp) in &samples {
                let (w, l) = field_coupling(cp, subspace);
                let deviation = (w * s - l * c).abs();
                if deviation > 1e-10 * scale {
                    return Err(ExactError::NotIntegrable {
                        subspace,
                        deviation: deviation / scale,
                        t: *t,
                    });
                }
            }
        }
        Ok(())
    }
}

const INTEGRABILITY_SAMPLES: usize = 1000;

fn sample_couplings(params: &ModelParams, t_end: f64) -> Vec<(f64, Couplings)> {
    let n = INTEGRABILITY_SAMPLES;
    (0..n)
        .map(|i| {
            let t = t_end * i as f64 / (n - 1) as f64;
            (t, params.couplings(t))
        })
        .collect()
}

fn field_coupling(c: &Couplings, subspace: Subspace) -> (f64, f64) {
    match subspace {
        Subspace::I => (c.omega_plus, c.lambda_m),
        Subspace::II => (c.omega_minus, c.lambda_p),
    }
}

/// Closed-form propagator under the first integrability condition.
#[derive(Debug, Clone)]
pub struct Ic1Propagator {
    setup: Ic1Setup,
    convention: PhaseConvention,
    /// Signed gap of each block: the (field, coupling) vector projected on
    /// its fixed direction.
    gap_i: DriveProfile,
    gap_ii: DriveProfile,
    lambda_z: DriveProfile,
}

impl Ic1Propagator {
    /// Detect the angles from `params` and verify the condition on
    /// `[0, t_end]`.
    pub fn new(params: &ModelParams, t_end: f64, convention: PhaseConvention) -> Result<Self, ExactError> {
        let setup = Ic1Setup::detect(params, t_end)?;
        Ok(Self::build(params, setup, convention))
    }

    /// Use the given angles, verifying that `params` satisfies them.
    pub fn with_setup(
        params: &ModelParams,
        setup: Ic1Setup,
        t_end: f64,
        convention: PhaseConvention,
    ) -> Result<Self, ExactError> {
        setup.verify(params, t_end)?;
        Ok(Self::build(params, setup, convention))
    }

    fn build(params: &ModelParams, setup: Ic1Setup, convention: PhaseConvention) -> Self {
        let project = |field: DriveProfile, coupling: DriveProfile, theta0: f64| {
            let (s, c) = (2.0 * theta0).sin_cos();
            DriveProfile::combine(c, &field, s, &coupling)
        };
        Ic1Propagator {
            setup,
            convention,
            gap_i: project(params.omega_plus_profile(), params.lambda_m_profile(), setup.theta10),
            gap_ii: project(params.omega_minus_profile(), params.lambda_p_profile(), setup.theta20),
            lambda_z: params.lambda_z.clone(),
        }
    }

    pub fn setup(&self) -> Ic1Setup {
        self.setup
    }

    pub fn convention(&self) -> PhaseConvention {
        self.convention
    }

    /// Accumulated gap phase `J(t)` of a block under the active convention.
    pub fn gap_phase(&self, t: f64, subspace: Subspace) -> Result<f64, ExactError> {
        let gap = match subspace {
            Subspace::I => &self.gap_i,
            Subspace::II => &self.gap_ii,
        };
        Ok(match self.convention {
            PhaseConvention::Signed => gap.integral(t),
            PhaseConvention::Magnitude => gap.abs_integral(t)?,
        })
    }

    /// `exp(-i ∫_0^t ε_j)`.
    pub fn phase(&self, t: f64, state: Eigenstate) -> Result<C64, ExactError> {
        let z = self.lambda_z.integral(t) / 4.0;
        let j = self.gap_phase(t, state.subspace())?;
        let z = if state.subspace() == Subspace::I { z } else { -z };
        let total = if state.is_upper() { z + j } else { z - j };
        Ok(C64::from_polar(1.0, -total))
    }

    pub fn evolve(&self, t: f64, initial: Eigenstate) -> Result<BlockAmplitudes, ExactError> {
        let phase = self.phase(t, initial)?;
        Ok(initial.initial(self.setup.theta0(initial.subspace())).scaled(phase))
    }
}

/// Verdict of the second-condition admissibility check.
#[derive(Debug, Clone, PartialEq)]
pub enum Admissibility {
    Valid,
    Violated(String),
}

impl Admissibility {
    pub fn is_valid(&self) -> bool {
        matches!(self, Admissibility::Valid)
    }
}

/// Parameters of the second integrability condition.
///
/// The field of each block is not free: it follows from the coupling and
/// the angle, `ω = λ / tan 2θ`.
#[derive(Debug, Clone, PartialEq)]
pub struct Ic2Setup {
    pub kappa: f64,
    pub chi: f64,
    pub theta10: f64,
    pub theta20: f64,
    pub lambda_m: DriveProfile,
    pub lambda_p: DriveProfile,
    pub lambda_z: DriveProfile,
}

const ENDPOINT_TOL: f64 = 1e-12;
const BRANCH_SLACK: f64 = 1e-12;

/// Per-block view of an [`Ic2Setup`].
struct Ic2Block<'a> {
    subspace: Subspace,
    rate: f64,
    theta0: f64,
    coupling: &'a DriveProfile,
}

impl Ic2Setup {
    pub fn new(
        kappa: f64,
        chi: f64,
        theta10: f64,
        theta20: f64,
        lambda_m: DriveProfile,
        lambda_p: DriveProfile,
        lambda_z: DriveProfile,
    ) -> Result<Self, ExactError> {
        for (name, v) in [("kappa", kappa), ("chi", chi)] {
            if v == 0.0 || !v.is_finite() {
                return Err(ExactError::InvalidSetup(format!(
                    "{name} must be finite and non-zero, got {v}"
                )));
            }
        }
        for (name, v) in [("theta10", theta10), ("theta20", theta20)] {
            if !(0.0..=FRAC_PI_2).contains(&v) {
                return Err(ExactError::InvalidSetup(format!(
                    "{name} must lie in [0, π/2], got {v}"
                )));
            }
        }
        Ok(Ic2Setup {
            kappa,
            chi,
            theta10,
            theta20,
            lambda_m,
            lambda_p,
            lambda_z,
        })
    }

    fn block(&self, subspace: Subspace) -> Ic2Block<'_> {
        match subspace {
            Subspace::I => Ic2Block {
                subspace,
                rate: self.kappa,
                theta0: self.theta10,
                coupling: &self.lambda_m,
            },
            Subspace::II => Ic2Block {
                subspace,
                rate: self.chi,
                theta0: self.theta20,
                coupling: &self.lambda_p,
            },
        }
    }

    /// Whether `cos 2θ(t)` stays inside `[-1, 1]` for all `t`.
    ///
    /// For a sinusoidal coupling `μ sin(βt + φ)` and `0 < θ0 < π/2` the
    /// requirement is `|β / (2 rate μ)| ≥ max(2/(1+cos 2θ0), 2/(1-cos 2θ0))`.
    /// At the endpoints `θ0 ∈ {0, π/2}` it is `φ = 0`, `|4 rate μ / β| ≤ 1`,
    /// and the integral must push `cos 2θ` inwards.
    pub fn admissibility(&self) -> Admissibility {
        for subspace in [Subspace::I, Subspace::II] {
            if let Some(reason) = self.block(subspace).violation() {
                return Admissibility::Violated(reason);
            }
        }
        Admissibility::Valid
    }

    /// Mixing angle `θ(t) ∈ [0, π/2]` from
    /// `cos 2θ = cos 2θ0 - 2 rate ∫_0^t λ`.
    pub fn theta(&self, t: f64, subspace: Subspace) -> Result<f64, ExactError> {
        self.block(subspace).theta(t)
    }

    pub fn evolve(&self, t: f64, initial: Eigenstate) -> Result<BlockAmplitudes, ExactError> {
        let block = self.block(initial.subspace());
        let theta = block.theta(t)?;
        let (a1, a2) = block.rotated_amplitudes(theta, initial.is_upper());
        let z = self.lambda_z.integral(t) / 4.0;
        let envelope = match initial.subspace() {
            Subspace::I => C64::from_polar(1.0, -z),
            Subspace::II => C64::from_polar(1.0, z),
        };
        Ok(BlockAmplitudes::new(envelope * a1, envelope * a2, initial))
    }

    /// Rotation amount `δ(t) = (θ(t) - θ0) sqrt(1 + rate⁻²)`.
    pub fn delta(&self, t: f64, subspace: Subspace) -> Result<f64, ExactError> {
        let block = self.block(subspace);
        Ok((block.theta(t)? - block.theta0) * block.stretch())
    }

    fn derived_field(&self, t: f64, subspace: Subspace) -> f64 {
        let block = self.block(subspace);
        let coupling = block.coupling.evaluate(t);
        match block.theta(t) {
            Ok(theta) => {
                let (s, c) = (2.0 * theta).sin_cos();
                if coupling == 0.0 || c == 0.0 {
                    0.0
                } else {
                    coupling * c / s
                }
            }
            Err(_) => f64::NAN,
        }
    }
}

impl Ic2Block<'_> {
    fn stretch(&self) -> f64 {
        (1.0 + self.rate.powi(-2)).sqrt()
    }

    /// `(1 - cos 2θ(t), 1 + cos 2θ(t))`, each computed without cancellation.
    fn distances(&self, t: f64) -> (f64, f64) {
        let shift = 2.0 * self.rate * self.coupling.integral(t);
        let (s0, c0) = self.theta0.sin_cos();
        (2.0 * s0 * s0 + shift, 2.0 * c0 * c0 - shift)
    }

    fn theta(&self, t: f64) -> Result<f64, ExactError> {
        let (below, above) = self.distances(t);
        if below < -BRANCH_SLACK || above < -BRANCH_SLACK {
            return Err(ExactError::BranchExit {
                subspace: self.subspace,
                t,
                value: 1.0 - below,
            });
        }
        Ok((0.5 * below.max(0.0)).sqrt().atan2((0.5 * above.max(0.0)).sqrt()))
    }

    /// Evolved amplitudes without the `λz` envelope.
    fn rotated_amplitudes(&self, theta: f64, upper: bool) -> (C64, C64) {
        let delta = (theta - self.theta0) * self.stretch();
        let norm = (1.0 + self.rate * self.rate).sqrt();
        // κ⁻¹ κ̄ and κ̄
        let a = self.rate.signum() / norm;
        let b = self.rate.abs() / norm;
        let (sd, cd) = delta.sin_cos();
        let (s, c) = theta.sin_cos();
        let i = C64::i();
        if upper {
            let rot = cd - i * a * sd;
            (c * rot + s * b * sd, s * rot - c * b * sd)
        } else {
            let rot = cd + i * a * sd;
            (-s * rot + c * b * sd, c * rot + s * b * sd)
        }
    }

    fn violation(&self) -> Option<String> {
        let w = self.coupling.waveform();
        let tag = match self.subspace {
            Subspace::I => "subspace I",
            Subspace::II => "subspace II",
        };
        if w.is_static() {
            if w.constant == 0.0 {
                return None;
            }
            return Some(format!(
                "{tag}: constant coupling {} drives cos 2θ out of [-1, 1]",
                w.constant
            ));
        }
        let Some(h) = w.single_harmonic() else {
            return Some(format!("{tag}: coupling must be a single sinusoid"));
        };
        let c0 = (2.0 * self.theta0).cos();
        let at_lower = self.theta0.abs() <= ENDPOINT_TOL;
        let at_upper = (self.theta0 - FRAC_PI_2).abs() <= ENDPOINT_TOL;
        if at_lower || at_upper {
            let name = if at_lower { "theta0 = 0" } else { "theta0 = π/2" };
            if h.phase.sin().abs() > ENDPOINT_TOL || h.phase.cos() < 0.0 {
                return Some(format!("{tag}: {name} requires phase = 0, got {}", h.phase));
            }
            let ratio = 4.0 * self.rate * h.amplitude / h.frequency;
            if ratio.abs() > 1.0 {
                return Some(format!(
                    "{tag}: {name} requires |4 rate mu / beta| <= 1, got {}",
                    ratio.abs()
                ));
            }
            // ∫λ has the sign of μ/β; cos 2θ must move away from the endpoint
            if (at_lower && ratio < 0.0) || (at_upper && ratio > 0.0) {
                return Some(format!(
                    "{tag}: {name} requires rate * mu / beta {} 0",
                    if at_lower { ">=" } else { "<=" }
                ));
            }
            return None;
        }
        let lhs = (h.frequency / (2.0 * self.rate * h.amplitude)).abs();
        let rhs = (2.0 / (1.0 + c0)).max(2.0 / (1.0 - c0));
        // equality is admissible; allow for rounding in cos 2θ0
        if lhs < rhs * (1.0 - BRANCH_SLACK) {
            return Some(format!(
                "{tag}: beta/(2 rate mu) = {lhs} < max(2/(1+cos 2theta0), 2/(1-cos 2theta0)) = {rhs}"
            ));
        }
        None
    }

    /// Times in `(0, t_end]` where `cos 2θ` touches ±1 and the principal
    /// branch reflects, plus `0` when the start sits on an endpoint.
    fn kinks(&self, t_end: f64) -> Vec<f64> {
        let mut out = Vec::new();
        if self.coupling.is_static() {
            return out;
        }
        if (2.0 * self.theta0).sin().abs() <= ENDPOINT_TOL {
            out.push(0.0);
        }
        let Some(h) = self.coupling.waveform().single_harmonic() else {
            return out;
        };
        let (s0, c0) = self.theta0.sin_cos();
        let scale = h.frequency / (self.rate * h.amplitude);
        // cos(βt + φ) values at which 1 ∓ cos 2θ vanishes
        for target in [h.phase.cos() + s0 * s0 * scale, h.phase.cos() - c0 * c0 * scale] {
            for (edge, offset) in [(1.0, 0.0), (-1.0, std::f64::consts::PI)] {
                if (target - edge).abs() > 1e-9 {
                    continue;
                }
                let period = std::f64::consts::TAU / h.frequency;
                let first = (offset - h.phase) / h.frequency;
                let mut n = (-first / period).ceil();
                loop {
                    let t = first + n * period;
                    if t > t_end {
                        break;
                    }
                    if t > 0.0 {
                        out.push(t);
                    }
                    n += 1.0;
                }
            }
        }
        out.sort_by(f64::total_cmp);
        out.dedup();
        out
    }
}

impl Hamiltonian for Ic2Setup {
    fn couplings(&self, t: f64) -> Couplings {
        Couplings {
            omega_plus: self.derived_field(t, Subspace::I),
            omega_minus: self.derived_field(t, Subspace::II),
            lambda_p: self.lambda_p.evaluate(t),
            lambda_m: self.lambda_m.evaluate(t),
            lambda_z: self.lambda_z.evaluate(t),
        }
    }

    fn frequencies(&self) -> Vec<f64> {
        [&self.lambda_m, &self.lambda_p, &self.lambda_z]
            .iter()
            .flat_map(|p| p.frequencies())
            .collect()
    }

    fn singular_times(&self, t_end: f64) -> Vec<f64> {
        let mut out = self.block(Subspace::I).kinks(t_end);
        out.extend(self.block(Subspace::II).kinks(t_end));
        out.sort_by(f64::total_cmp);
        out.dedup();
        out
    }
}
