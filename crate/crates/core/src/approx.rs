//! First-order perturbation theory and the rotating-wave approximation for
//! subspace I with one static and one sinusoidal parameter.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64 as C64;
use thiserror::Error;

use crate::drive::{DriveError, DriveProfile, Harmonic};
use crate::exact::{BlockAmplitudes, Eigenstate};
use crate::model::ModelParams;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ApproxError {
    #[error("resonance pole: |{which}| = {value:e} is below {RESONANCE_TOL:e}")]
    ResonancePole { which: &'static str, value: f64 },
    #[error("drive frequency must be positive, got {0}")]
    NonPositiveFrequency(f64),
    #[error("perturbative solution assumes zero drive phase, got {0}")]
    NonZeroPhase(f64),
    #[error(transparent)]
    Drive(#[from] DriveError),
}

const RESONANCE_TOL: f64 = 1e-12;

/// Which parameter of subspace I carries the sinusoid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RwaMode {
    /// `λm(t) = μ sin(βt + φ)` with constant `ω+`.
    #[default]
    LambdaDrive,
    /// `ω+(t) = μ sin(βt + φ)` with constant `λm`.
    FieldDrive,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RwaSetup {
    pub mode: RwaMode,
    /// The constant parameter: `ω+` for [`RwaMode::LambdaDrive`], `λm` for
    /// [`RwaMode::FieldDrive`].
    pub static_value: f64,
    pub drive: Harmonic,
    pub theta10: f64,
    pub lambda_z: DriveProfile,
}

impl RwaSetup {
    pub fn new(
        mode: RwaMode,
        static_value: f64,
        drive: Harmonic,
        theta10: f64,
        lambda_z: DriveProfile,
    ) -> Result<Self, ApproxError> {
        if !(drive.frequency > 0.0 && drive.frequency.is_finite()) {
            return Err(ApproxError::NonPositiveFrequency(drive.frequency));
        }
        for (name, value) in [
            ("static", static_value),
            ("amplitude", drive.amplitude),
            ("phase", drive.phase),
        ] {
            if !value.is_finite() {
                return Err(DriveError::NonFinite { name, value }.into());
            }
        }
        Ok(RwaSetup {
            mode,
            static_value,
            drive,
            theta10,
            lambda_z,
        })
    }

    /// `β - 2 × static`.
    pub fn detuning(&self) -> f64 {
        self.drive.frequency - 2.0 * self.static_value
    }

    /// `γ = sqrt(μ² + Δ²)`.
    pub fn gamma(&self) -> f64 {
        self.drive.amplitude.hypot(self.detuning())
    }

    /// `2θ` of the rotating frame, on the branch where `cos 2θ = Δ/γ`.
    pub fn two_theta(&self) -> f64 {
        self.drive.amplitude.atan2(self.detuning())
    }

    /// The full model this setup approximates (counter-rotating terms
    /// included), for comparison against the integrator.
    pub fn params(&self) -> Result<ModelParams, ApproxError> {
        let h = self.drive;
        let sinusoid = DriveProfile::sinusoid(h.amplitude, h.frequency, h.phase)?;
        let constant = DriveProfile::constant(self.static_value);
        let (field, coupling) = match self.mode {
            RwaMode::LambdaDrive => (constant, sinusoid),
            RwaMode::FieldDrive => (sinusoid, constant),
        };
        let z = DriveProfile::zero;
        Ok(ModelParams::from_combinations(
            field,
            z(),
            z(),
            coupling,
            self.lambda_z.clone(),
        ))
    }

    /// Rotating-frame propagator applied to `(α1, α2)`.
    fn kernel(&self, t: f64, alpha: (f64, f64)) -> (C64, C64) {
        let gamma = self.gamma();
        let (s2, c2) = if gamma == 0.0 {
            (0.0, 1.0)
        } else {
            self.two_theta().sin_cos()
        };
        let (sg, cg) = (0.5 * gamma * t).sin_cos();
        let i = C64::i();
        let phi = self.drive.phase;
        let beta = self.drive.frequency;
        let x1 = C64::from_polar(1.0, -0.5 * beta * t)
            * ((cg + i * sg * c2) * alpha.0 + s2 * sg * C64::from_polar(1.0, -phi) * alpha.1);
        let x2 = C64::from_polar(1.0, 0.5 * beta * t)
            * (-s2 * sg * C64::from_polar(1.0, phi) * alpha.0 + (cg - i * sg * c2) * alpha.1);
        (x1, x2)
    }

    fn evolve_from(&self, t: f64, alpha: (f64, f64), origin: Eigenstate) -> BlockAmplitudes {
        let lambda = C64::from_polar(1.0, -self.lambda_z.integral(t) / 4.0);
        let (x1, x2) = match self.mode {
            RwaMode::LambdaDrive => self.kernel(t, alpha),
            RwaMode::FieldDrive => {
                let r = FRAC_1_SQRT_2;
                let (plus, minus) = self.kernel(t, (r * (alpha.0 + alpha.1), r * (alpha.0 - alpha.1)));
                (r * (plus + minus), r * (plus - minus))
            }
        };
        BlockAmplitudes::new(lambda * x1, lambda * x2, origin)
    }
}

/// Evolution of `cos θ10 |++> + sin θ10 |-->`.
pub fn rwa_evolve(setup: &RwaSetup, t: f64) -> BlockAmplitudes {
    let (s, c) = setup.theta10.sin_cos();
    setup.evolve_from(t, (c, s), Eigenstate::Phi1)
}

/// Evolution of the orthogonal state `-sin θ10 |++> + cos θ10 |-->`.
pub fn rwa_orthogonal(setup: &RwaSetup, t: f64) -> BlockAmplitudes {
    let (s, c) = setup.theta10.sin_cos();
    setup.evolve_from(t, (-s, c), Eigenstate::Phi2)
}

/// Leading-order amplitude on `|++>`: `e^{-i ω+ t}`.
pub fn perturb_x1(omega_plus: f64, t: f64) -> C64 {
    C64::from_polar(1.0, -omega_plus * t)
}

fn poles(omega_plus: f64, drive: &Harmonic) -> Result<(f64, f64), ApproxError> {
    if drive.phase != 0.0 {
        return Err(ApproxError::NonZeroPhase(drive.phase));
    }
    let below = drive.frequency - 2.0 * omega_plus;
    let above = drive.frequency + 2.0 * omega_plus;
    if below.abs() < RESONANCE_TOL {
        return Err(ApproxError::ResonancePole {
            which: "beta - 2 omega",
            value: below.abs(),
        });
    }
    if above.abs() < RESONANCE_TOL {
        return Err(ApproxError::ResonancePole {
            which: "beta + 2 omega",
            value: above.abs(),
        });
    }
    Ok((below, above))
}

/// First-order amplitude on `|-->` starting from `|++>` with
/// `λm(t) = μ sin βt`.
pub fn perturb_x2(omega_plus: f64, drive: &Harmonic, t: f64) -> Result<C64, ApproxError> {
    let (below, above) = poles(omega_plus, drive)?;
    let i = C64::i();
    let bracket =
        C64::from_polar(1.0, below * t) / below + C64::from_polar(1.0, -above * t) / above - 1.0 / below - 1.0 / above;
    Ok(0.5 * i * C64::from_polar(1.0, omega_plus * t) * drive.amplitude * bracket)
}

/// `|μ / (β - 2ω+)|`, to be compared against 1.
pub fn perturb_validity(omega_plus: f64, drive: &Harmonic) -> Result<f64, ApproxError> {
    let (below, _) = poles(omega_plus, drive)?;
    Ok((drive.amplitude / below).abs())
}
