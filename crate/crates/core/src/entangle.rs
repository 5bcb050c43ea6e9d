//! Concurrence of two-qubit states.
//!
//! Amplitudes are ordered `|++>, |-->, |+->, |-+>` in the uncoupled basis
//! and `|++>, |-->, S, A` in the coupled basis, where
//! `S = (|+-> + |-+>)/√2` and `A = (|+-> - |-+>)/√2`.

use std::f64::consts::FRAC_1_SQRT_2;

use nalgebra::Matrix4;
use num_complex::Complex64 as C64;
use thiserror::Error;

use crate::exact::{BlockAmplitudes, ExactError, Ic2Setup};
use crate::linalg::{hermitian_eigen, psd_sqrt, singular_values};
use crate::model::Subspace;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EntangleError {
    #[error("state is not normalised: |f|^2 = {0}")]
    NotNormalized(f64),
    #[error("invalid density matrix: {0}")]
    InvalidDensityMatrix(String),
    #[error(transparent)]
    Exact(#[from] ExactError),
}

const NORM_TOL: f64 = 1e-9;
const TRACE_TOL: f64 = 1e-12;
const HERMITIAN_TOL: f64 = 1e-12;
const NEGATIVE_EIGEN_TOL: f64 = 1e-10;
/// Eigenvalues of ρ at or below this are rounding noise of a zero.
const RANK_FLOOR: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Basis {
    Uncoupled,
    Coupled,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FourState {
    basis: Basis,
    amps: [C64; 4],
}

impl FourState {
    pub fn new(basis: Basis, amps: [C64; 4]) -> Result<Self, EntangleError> {
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if norm.is_nan() || (norm - 1.0).abs() > NORM_TOL {
            return Err(EntangleError::NotNormalized(norm));
        }
        Ok(FourState { basis, amps })
    }

    /// Build without the normalisation check, e.g. for raw integrator
    /// output.
    pub fn new_unchecked(basis: Basis, amps: [C64; 4]) -> Self {
        FourState { basis, amps }
    }

    pub fn uncoupled(amps: [C64; 4]) -> Result<Self, EntangleError> {
        Self::new(Basis::Uncoupled, amps)
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn amplitudes(&self) -> [C64; 4] {
        self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn basis_convert(&self, target: Basis) -> FourState {
        if target == self.basis {
            return *self;
        }
        // the 2×2 map is its own inverse
        let [f1, f2, f3, f4] = self.amps;
        let r = FRAC_1_SQRT_2;
        FourState {
            basis: target,
            amps: [f1, f2, (f3 + f4) * r, (f3 - f4) * r],
        }
    }

    /// Amplitudes in the uncoupled basis.
    pub fn to_uncoupled(&self) -> [C64; 4] {
        self.basis_convert(Basis::Uncoupled).amps
    }

    pub fn density(&self) -> DensityMatrix {
        DensityMatrix::from_pure(self)
    }
}

/// Two-qubit density matrix in the uncoupled basis.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix(Matrix4<C64>);

impl DensityMatrix {
    pub fn new(m: Matrix4<C64>) -> Result<Self, EntangleError> {
        let asym = (m - m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if asym > HERMITIAN_TOL {
            return Err(EntangleError::InvalidDensityMatrix(format!(
                "not Hermitian (deviation {asym:e})"
            )));
        }
        let trace = m.trace();
        if (trace - C64::from(1.0)).norm() > TRACE_TOL {
            return Err(EntangleError::InvalidDensityMatrix(format!("trace {trace} != 1")));
        }
        let (values, _) = hermitian_eigen(&m);
        if values[0] < -NEGATIVE_EIGEN_TOL {
            return Err(EntangleError::InvalidDensityMatrix(format!(
                "negative eigenvalue {}",
                values[0]
            )));
        }
        Ok(DensityMatrix(m))
    }

    pub fn from_pure(s: &FourState) -> Self {
        let f = nalgebra::Vector4::from(s.to_uncoupled());
        let m = f * f.adjoint();
        DensityMatrix(m / C64::from(s.norm_sqr()))
    }

    /// `p |Φ+><Φ+| + (1 - p) I/4` with `Φ+ = (|++> + |-->)/√2`.
    pub fn werner(p: f64) -> Result<Self, EntangleError> {
        let bell = FourState::uncoupled([FRAC_1_SQRT_2.into(), FRAC_1_SQRT_2.into(), 0.0.into(), 0.0.into()])?;
        let m = bell.density().0 * C64::from(p) + Matrix4::identity() * C64::from((1.0 - p) / 4.0);
        Self::new(m)
    }

    pub fn matrix(&self) -> &Matrix4<C64> {
        &self.0
    }
}

/// `σy ⊗ σy` in the uncoupled order.
fn spin_flip() -> Matrix4<C64> {
    let mut y = Matrix4::zeros();
    y[(0, 1)] = C64::from(-1.0);
    y[(1, 0)] = C64::from(-1.0);
    y[(2, 3)] = C64::from(1.0);
    y[(3, 2)] = C64::from(1.0);
    y
}

/// `2 |f++ f-- - f+- f-+|`, or `|2 f1 f2 - (f3² - f4²)|` in the coupled
/// basis.
pub fn concurrence_pure(s: &FourState) -> f64 {
    let [f1, f2, f3, f4] = s.amps;
    let c = match s.basis {
        Basis::Uncoupled => 2.0 * (f1 * f2 - f3 * f4).norm(),
        Basis::Coupled => (2.0 * f1 * f2 - (f3 * f3 - f4 * f4)).norm(),
    };
    c / s.norm_sqr()
}

/// Wootters concurrence `max(0, λ1 - λ2 - λ3 - λ4)`, with `λi` the
/// decreasing square roots of the eigenvalues of `ρ ρ̃`,
/// `ρ̃ = (σy⊗σy) ρ* (σy⊗σy)`.
///
/// The `λi` are taken as singular values of `A = √ρ (σy⊗σy) √ρ*`, since
/// `A A† = √ρ ρ̃ √ρ`; this avoids a square root of eigenvalues that sit at
/// rounding level for rank-deficient states.
pub fn concurrence_wootters(rho: &DensityMatrix) -> f64 {
    let y = spin_flip();
    let root = psd_sqrt(&rho.0, RANK_FLOOR);
    let l = singular_values(&(root * y * root.conjugate()));
    (l[0] - l[1] - l[2] - l[3]).max(0.0)
}

/// Weights of the two block eigenstates in `a|u> + b|v>` for block angle
/// `theta0`, where `u, v` are the block's basis states.
fn eigen_weights(a: C64, b: C64, theta0: f64) -> (C64, C64) {
    let (s, c) = theta0.sin_cos();
    (a * c + b * s, -a * s + b * c)
}

/// Concurrence of `a|++> + b|-->` evolved inside subspace I, given the
/// evolved eigenstates `x` (from `φ1`) and `y` (from `φ2`).
pub fn concurrence_subspace_i(a: C64, b: C64, x: &BlockAmplitudes, y: &BlockAmplitudes, theta10: f64) -> f64 {
    let (p, q) = eigen_weights(a, b, theta10);
    2.0 * (p * p * x.a1 * x.a2 + q * q * y.a1 * y.a2 + p * q * (x.a1 * y.a2 + y.a1 * x.a2)).norm()
}

/// Concurrence of `a|++> + b|--> + c|+-> + d|-+>` evolved in both blocks,
/// given the evolved eigenstates `x, y` (subspace I) and `z, w`
/// (subspace II).
#[allow(clippy::too_many_arguments)]
pub fn concurrence_generic(
    a: C64,
    b: C64,
    c: C64,
    d: C64,
    x: &BlockAmplitudes,
    y: &BlockAmplitudes,
    z: &BlockAmplitudes,
    w: &BlockAmplitudes,
    theta10: f64,
    theta20: f64,
) -> f64 {
    let (p, q) = eigen_weights(a, b, theta10);
    let (r, u) = eigen_weights(c, d, theta20);
    let first = p * p * x.a1 * x.a2 + q * q * y.a1 * y.a2 + p * q * (x.a1 * y.a2 + y.a1 * x.a2);
    let second = r * r * z.a1 * z.a2 + u * u * w.a1 * w.a2 + r * u * (z.a1 * w.a2 + z.a2 * w.a1);
    2.0 * (first - second).norm()
}

/// Uncoupled amplitudes of `a|++> + b|--> + c|+-> + d|-+>` after
/// evolution, from the evolved block eigenstates.
#[allow(clippy::too_many_arguments)]
pub fn assemble_state(
    a: C64,
    b: C64,
    c: C64,
    d: C64,
    x: &BlockAmplitudes,
    y: &BlockAmplitudes,
    z: &BlockAmplitudes,
    w: &BlockAmplitudes,
    theta10: f64,
    theta20: f64,
) -> FourState {
    let (p, q) = eigen_weights(a, b, theta10);
    let (r, u) = eigen_weights(c, d, theta20);
    FourState::new_unchecked(
        Basis::Uncoupled,
        [
            p * x.a1 + q * y.a1,
            p * x.a2 + q * y.a2,
            r * z.a1 + u * w.a1,
            r * z.a2 + u * w.a2,
        ],
    )
}

/// Initial states inside subspace I with a closed-form concurrence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum InitialKind {
    /// `|++>`
    Pp,
    /// `|-->`
    Mm,
    /// `(|++> + |-->)/√2`
    BellS,
    /// `(|++> - |-->)/√2`
    BellA,
}

impl InitialKind {
    pub const ALL: [InitialKind; 4] = [InitialKind::Pp, InitialKind::Mm, InitialKind::BellS, InitialKind::BellA];

    /// Coefficients `(a, b)` on `|++>, |-->`.
    pub fn coefficients(self) -> (f64, f64) {
        match self {
            InitialKind::Pp => (1.0, 0.0),
            InitialKind::Mm => (0.0, 1.0),
            InitialKind::BellS => (FRAC_1_SQRT_2, FRAC_1_SQRT_2),
            InitialKind::BellA => (FRAC_1_SQRT_2, -FRAC_1_SQRT_2),
        }
    }
}

/// Concurrence under the first integrability condition as a function of
/// the accumulated gap phase `J`.
pub fn concurrence_ic1(kind: InitialKind, theta10: f64, j: f64) -> f64 {
    let (s, c) = (2.0 * theta10).sin_cos();
    let i = C64::i();
    let rot = -i * s * (2.0 * j).sin();
    let value = match kind {
        InitialKind::Pp => rot - 2.0 * s * c * j.sin().powi(2),
        InitialKind::Mm => rot + 2.0 * s * c * j.sin().powi(2),
        InitialKind::BellS => rot + s * s * (2.0 * j).cos() + c * c,
        InitialKind::BellA => rot - s * s * (2.0 * j).cos() - c * c,
    };
    value.norm()
}

/// `Re(x1 x2)`, `Im(x1 x2)` and `x1 y2 + y1 x2` for the second
/// integrability condition, without the `λz` envelope.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ic2Products {
    pub re_xx: f64,
    pub im_xx: f64,
    pub cross: f64,
}

impl Ic2Products {
    pub fn new(theta: f64, delta: f64, kappa: f64) -> Self {
        let norm = (1.0 + kappa * kappa).sqrt();
        let (s2t, c2t) = (2.0 * theta).sin_cos();
        let (s2d, c2d) = (2.0 * delta).sin_cos();
        let sd2 = delta.sin().powi(2);
        Ic2Products {
            re_xx: 0.5 * s2t * c2d - 0.5 * kappa.abs() * s2d * c2t / norm,
            im_xx: kappa * sd2 * c2t / (norm * norm) - 0.5 * kappa.signum() * s2t * s2d / norm,
            cross: kappa.abs() * s2t * s2d / norm
                + delta.cos().powi(2) * c2t
                + sd2 * c2t * (1.0 - kappa * kappa) / (norm * norm),
        }
    }
}

/// Concurrence under the second integrability condition at time `t`.
pub fn concurrence_ic2(kind: InitialKind, setup: &Ic2Setup, t: f64) -> Result<f64, EntangleError> {
    let theta = setup.theta(t, Subspace::I)?;
    let delta = setup.delta(t, Subspace::I)?;
    let p = Ic2Products::new(theta, delta, setup.kappa);
    let (s, c) = (2.0 * setup.theta10).sin_cos();
    let im = C64::new(0.0, 2.0 * p.im_xx);
    let value = match kind {
        InitialKind::Pp => 2.0 * c * p.re_xx + im - s * p.cross,
        InitialKind::Mm => -2.0 * c * p.re_xx + im + s * p.cross,
        InitialKind::BellS => 2.0 * s * p.re_xx + im + c * p.cross,
        InitialKind::BellA => -2.0 * s * p.re_xx + im - c * p.cross,
    };
    Ok(value.norm())
}
