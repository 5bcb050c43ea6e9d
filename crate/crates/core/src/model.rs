//! The two-qubit Hamiltonian, its parity blocks and their instantaneous
//! spectra.
//!
//! Basis orders are frozen:
//! * uncoupled: `|++>, |-->, |+->, |-+>`
//! * coupled: `|++>, |-->, (|+-> + |-+>)/√2, (|+-> - |-+>)/√2`

use std::f64::consts::FRAC_1_SQRT_2;

use nalgebra::{Matrix2, Matrix4};
use num_complex::Complex64 as C64;
use thiserror::Error;

use crate::drive::DriveProfile;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("ground state requires a static Hamiltonian; `{0}` is time dependent")]
    NotStatic(&'static str),
}

/// Parity subspace: `I` is spanned by `|++>, |-->`, `II` by `|+->, |-+>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Subspace {
    I,
    II,
}

/// The five drive profiles of the Hamiltonian.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    pub lambda_x: DriveProfile,
    pub lambda_y: DriveProfile,
    pub lambda_z: DriveProfile,
    pub omega_1: DriveProfile,
    pub omega_2: DriveProfile,
}

/// Instantaneous values of the combinations that enter the matrix elements:
/// `λp = (λx+λy)/4`, `λm = (λx-λy)/4`, `ω± = (ω1±ω2)/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Couplings {
    pub omega_plus: f64,
    pub omega_minus: f64,
    pub lambda_p: f64,
    pub lambda_m: f64,
    pub lambda_z: f64,
}

/// A 2×2 Hermitian parity block.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockMatrix2 {
    pub entries: Matrix2<C64>,
    pub subspace: Subspace,
}

/// Eigen-decomposition of one parity block.
///
/// `theta` is the mixing angle, `gap` is η (subspace I) or ζ (subspace II)
/// and `eps_plus`/`eps_minus` are ε1/ε2 or ε3/ε4. When the field and the
/// coupling both vanish the angle is undefined: `degenerate` is set and
/// `theta` reported as 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Spectrum {
    pub theta: f64,
    pub gap: f64,
    pub eps_plus: f64,
    pub eps_minus: f64,
    pub degenerate: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroundState {
    Phi2,
    Phi4,
    /// `(e^{iα}|φ2> + |φ4>)/√2`; the relative phase α is left unspecified.
    DegeneratePair,
}

/// Anything that supplies the Hamiltonian's coupling values over time.
pub trait Hamiltonian: Sync {
    fn couplings(&self, t: f64) -> Couplings;

    /// Angular frequencies of the drives, used to choose integration steps.
    fn frequencies(&self) -> Vec<f64>;

    /// Times in `[0, t_end]` where the couplings are not smooth. Integrators
    /// split their grid there and evaluate one-sided limits.
    fn singular_times(&self, _t_end: f64) -> Vec<f64> {
        Vec::new()
    }
}

impl ModelParams {
    pub fn from_axes(
        lambda_x: DriveProfile,
        lambda_y: DriveProfile,
        lambda_z: DriveProfile,
        omega_1: DriveProfile,
        omega_2: DriveProfile,
    ) -> Self {
        ModelParams {
            lambda_x,
            lambda_y,
            lambda_z,
            omega_1,
            omega_2,
        }
    }

    /// Build from `ω+, ω-, λp, λm, λz`, the parametrisation used by the
    /// block matrices.
    pub fn from_combinations(
        omega_plus: DriveProfile,
        omega_minus: DriveProfile,
        lambda_p: DriveProfile,
        lambda_m: DriveProfile,
        lambda_z: DriveProfile,
    ) -> Self {
        ModelParams {
            lambda_x: DriveProfile::combine(2.0, &lambda_p, 2.0, &lambda_m),
            lambda_y: DriveProfile::combine(2.0, &lambda_p, -2.0, &lambda_m),
            lambda_z,
            omega_1: DriveProfile::combine(1.0, &omega_plus, 1.0, &omega_minus),
            omega_2: DriveProfile::combine(1.0, &omega_plus, -1.0, &omega_minus),
        }
    }

    pub fn zero() -> Self {
        let z = DriveProfile::zero;
        ModelParams::from_axes(z(), z(), z(), z(), z())
    }

    pub fn lambda_p_profile(&self) -> DriveProfile {
        DriveProfile::combine(0.25, &self.lambda_x, 0.25, &self.lambda_y)
    }

    pub fn lambda_m_profile(&self) -> DriveProfile {
        DriveProfile::combine(0.25, &self.lambda_x, -0.25, &self.lambda_y)
    }

    pub fn omega_plus_profile(&self) -> DriveProfile {
        DriveProfile::combine(0.5, &self.omega_1, 0.5, &self.omega_2)
    }

    pub fn omega_minus_profile(&self) -> DriveProfile {
        DriveProfile::combine(0.5, &self.omega_1, -0.5, &self.omega_2)
    }

    fn profiles(&self) -> [(&'static str, &DriveProfile); 5] {
        [
            ("lambda_x", &self.lambda_x),
            ("lambda_y", &self.lambda_y),
            ("lambda_z", &self.lambda_z),
            ("omega_1", &self.omega_1),
            ("omega_2", &self.omega_2),
        ]
    }

    pub fn hamiltonian_uncoupled(&self, t: f64) -> Matrix4<C64> {
        self.couplings(t).hamiltonian_uncoupled()
    }

    pub fn hamiltonian_coupled(&self, t: f64) -> Matrix4<C64> {
        self.couplings(t).hamiltonian_coupled()
    }

    pub fn block(&self, t: f64, subspace: Subspace) -> BlockMatrix2 {
        self.couplings(t).block(subspace)
    }

    pub fn spectrum(&self, t: f64, subspace: Subspace) -> Spectrum {
        self.couplings(t).spectrum(subspace)
    }

    /// Ground state of a time-independent Hamiltonian.
    pub fn static_ground_state(&self) -> Result<GroundState, ModelError> {
        for (name, p) in self.profiles() {
            if !p.is_static() {
                return Err(ModelError::NotStatic(name));
            }
        }
        let c = self.couplings(0.0);
        let eta = c.omega_plus.hypot(c.lambda_m);
        let zeta = c.omega_minus.hypot(c.lambda_p);
        let diff = eta - (c.lambda_z / 4.0 + zeta);
        Ok(if diff.abs() <= 1e-12 * eta.abs().max(1.0) {
            GroundState::DegeneratePair
        } else if diff > 0.0 {
            GroundState::Phi2
        } else {
            GroundState::Phi4
        })
    }
}

impl Hamiltonian for ModelParams {
    fn couplings(&self, t: f64) -> Couplings {
        let lx = self.lambda_x.evaluate(t);
        let ly = self.lambda_y.evaluate(t);
        let w1 = self.omega_1.evaluate(t);
        let w2 = self.omega_2.evaluate(t);
        Couplings {
            omega_plus: (w1 + w2) / 2.0,
            omega_minus: (w1 - w2) / 2.0,
            lambda_p: (lx + ly) / 4.0,
            lambda_m: (lx - ly) / 4.0,
            lambda_z: self.lambda_z.evaluate(t),
        }
    }

    fn frequencies(&self) -> Vec<f64> {
        self.profiles().iter().flat_map(|(_, p)| p.frequencies()).collect()
    }
}

fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Columns are the coupled basis vectors expressed in the uncoupled basis.
pub fn coupled_to_uncoupled() -> Matrix4<C64> {
    let h = re(FRAC_1_SQRT_2);
    let (o, z) = (re(1.0), re(0.0));
    Matrix4::new(
        o, z, z, z, //
        z, o, z, z, //
        z, z, h, h, //
        z, z, h, -h,
    )
}

impl Couplings {
    /// The Eq. 15-style replacement `λm↔λp, λz→-λz, ω+↔ω-` that maps one
    /// parity block onto the other.
    pub fn swapped(&self) -> Couplings {
        Couplings {
            omega_plus: self.omega_minus,
            omega_minus: self.omega_plus,
            lambda_p: self.lambda_m,
            lambda_m: self.lambda_p,
            lambda_z: -self.lambda_z,
        }
    }

    /// `(field, coupling, ±λz/4)` for the block of `subspace`.
    fn block_parts(&self, subspace: Subspace) -> (f64, f64, f64) {
        match subspace {
            Subspace::I => (self.omega_plus, self.lambda_m, self.lambda_z / 4.0),
            Subspace::II => (self.omega_minus, self.lambda_p, -self.lambda_z / 4.0),
        }
    }

    pub fn block(&self, subspace: Subspace) -> BlockMatrix2 {
        let (w, l, shift) = self.block_parts(subspace);
        BlockMatrix2 {
            entries: Matrix2::new(re(w + shift), re(l), re(l), re(-w + shift)),
            subspace,
        }
    }

    pub fn hamiltonian_uncoupled(&self) -> Matrix4<C64> {
        let mut h = Matrix4::zeros();
        h.fixed_view_mut::<2, 2>(0, 0)
            .copy_from(&self.block(Subspace::I).entries);
        h.fixed_view_mut::<2, 2>(2, 2)
            .copy_from(&self.block(Subspace::II).entries);
        h
    }

    pub fn hamiltonian_coupled(&self) -> Matrix4<C64> {
        let q = self.lambda_z / 4.0;
        let mut h = Matrix4::zeros();
        h.fixed_view_mut::<2, 2>(0, 0)
            .copy_from(&self.block(Subspace::I).entries);
        h[(2, 2)] = re(self.lambda_p - q);
        h[(2, 3)] = re(self.omega_minus);
        h[(3, 2)] = re(self.omega_minus);
        h[(3, 3)] = re(-self.lambda_p - q);
        h
    }

    pub fn spectrum(&self, subspace: Subspace) -> Spectrum {
        let (w, l, shift) = self.block_parts(subspace);
        let gap = w.hypot(l);
        let degenerate = w == 0.0 && l == 0.0;
        let theta = if degenerate { 0.0 } else { 0.5 * l.atan2(w) };
        Spectrum {
            theta,
            gap,
            eps_plus: shift + gap,
            eps_minus: shift - gap,
            degenerate,
        }
    }
}
