//! Discrete symmetries of the Hamiltonian as transformations of parameters
//! and states.

use nalgebra::Matrix4;
use num_complex::Complex64 as C64;

use crate::entangle::FourState;
use crate::exact::Ic2Setup;
use crate::model::ModelParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Parity {
    Positive,
    Negative,
}

/// Product states of the uncoupled basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BasisState {
    PlusPlus,
    MinusMinus,
    PlusMinus,
    MinusPlus,
}

impl BasisState {
    pub const ALL: [BasisState; 4] = [
        BasisState::PlusPlus,
        BasisState::MinusMinus,
        BasisState::PlusMinus,
        BasisState::MinusPlus,
    ];

    pub fn index(self) -> usize {
        self as usize
    }
}

/// Parity under reflection of the x (or y) components of both spins.
pub fn parity(state: BasisState) -> Parity {
    match state {
        BasisState::PlusPlus | BasisState::MinusMinus => Parity::Positive,
        BasisState::PlusMinus | BasisState::MinusPlus => Parity::Negative,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SymmetryOp {
    /// `S_ix -> -S_ix` (equivalently `S_iy -> -S_iy`) on both spins.
    /// Leaves every parameter unchanged.
    SpinReflectionXy,
    /// Exchanges the two parity blocks.
    SubspaceSwap,
    /// Flips both spins along z and reverses both fields.
    GlobalFlip,
}

impl SymmetryOp {
    pub const ALL: [SymmetryOp; 3] = [
        SymmetryOp::SpinReflectionXy,
        SymmetryOp::SubspaceSwap,
        SymmetryOp::GlobalFlip,
    ];

    pub fn map_params(self, params: &ModelParams) -> ModelParams {
        match self {
            SymmetryOp::SpinReflectionXy => params.clone(),
            SymmetryOp::SubspaceSwap => map_params_i_to_ii(params),
            SymmetryOp::GlobalFlip => map_params_global_flip(params),
        }
    }

    pub fn map_state(self, s: &FourState) -> FourState {
        match self {
            SymmetryOp::SpinReflectionXy => map_state_spin_reflection_xy(s),
            SymmetryOp::SubspaceSwap => map_state_subspace_swap(s),
            SymmetryOp::GlobalFlip => map_state_global_flip(s),
        }
    }

    /// The operator acting on uncoupled amplitudes.
    pub fn matrix(self) -> Matrix4<C64> {
        let one = C64::from(1.0);
        let mut m = Matrix4::zeros();
        let perm: [(usize, usize, f64); 4] = match self {
            SymmetryOp::SpinReflectionXy => [(0, 0, 1.0), (1, 1, 1.0), (2, 2, -1.0), (3, 3, -1.0)],
            SymmetryOp::SubspaceSwap => [(0, 2, 1.0), (2, 0, 1.0), (1, 3, 1.0), (3, 1, 1.0)],
            SymmetryOp::GlobalFlip => [(0, 1, 1.0), (1, 0, 1.0), (2, 3, 1.0), (3, 2, 1.0)],
        };
        for (r, c, v) in perm {
            m[(r, c)] = one * v;
        }
        m
    }
}

/// `λm ↔ λp`, `λz → -λz`, `ω+ ↔ ω-`; on the axis parameters this is
/// `λy → -λy`, `λz → -λz`, `ω2 → -ω2`.
pub fn map_params_i_to_ii(params: &ModelParams) -> ModelParams {
    ModelParams {
        lambda_x: params.lambda_x.clone(),
        lambda_y: params.lambda_y.negated(),
        lambda_z: params.lambda_z.negated(),
        omega_1: params.omega_1.clone(),
        omega_2: params.omega_2.negated(),
    }
}

/// `ω1 → -ω1`, `ω2 → -ω2`.
pub fn map_params_global_flip(params: &ModelParams) -> ModelParams {
    ModelParams {
        omega_1: params.omega_1.negated(),
        omega_2: params.omega_2.negated(),
        ..params.clone()
    }
}

/// `|++> ↔ |-->`, `|+-> ↔ |-+>`.
pub fn map_state_global_flip(s: &FourState) -> FourState {
    permute(s, [1, 0, 3, 2])
}

/// `|++> ↔ |+->`, `|--> ↔ |-+>`.
pub fn map_state_subspace_swap(s: &FourState) -> FourState {
    permute(s, [2, 3, 0, 1])
}

/// Sign change on the negative-parity amplitudes.
pub fn map_state_spin_reflection_xy(s: &FourState) -> FourState {
    let [a, b, c, d] = s.to_uncoupled();
    FourState::new_unchecked(crate::entangle::Basis::Uncoupled, [a, b, -c, -d])
}

fn permute(s: &FourState, order: [usize; 4]) -> FourState {
    let f = s.to_uncoupled();
    FourState::new_unchecked(crate::entangle::Basis::Uncoupled, order.map(|i| f[i]))
}

/// Setup whose `|++>` concurrence reproduces the `|-->` concurrence of
/// `setup`: `θ10 → π/2 - θ10`, `κ → -κ`.
pub fn mirror_ic2(setup: &Ic2Setup) -> Ic2Setup {
    Ic2Setup {
        kappa: -setup.kappa,
        theta10: std::f64::consts::FRAC_PI_2 - setup.theta10,
        ..setup.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::drive::DriveProfile;
    use crate::model::Subspace;

    fn params() -> ModelParams {
        let s = |a, b, c| DriveProfile::sinusoid(a, b, c).unwrap();
        ModelParams::from_axes(
            s(0.7, 2.0, 0.1),
            s(-0.3, 1.0, 0.4),
            s(0.5, 3.0, 0.0),
            DriveProfile::constant(1.1),
            s(0.9, 0.5, 1.0),
        )
    }

    fn state() -> FourState {
        let c = |re, im| C64::new(re, im);
        FourState::uncoupled([c(0.5, 0.1), c(-0.3, 0.4), c(0.2, -0.5), c(0.2f64.sqrt(), 0.0)]).unwrap()
    }

    #[test]
    fn parity_classes() {
        assert_eq!(parity(BasisState::PlusPlus), Parity::Positive);
        assert_eq!(parity(BasisState::MinusMinus), Parity::Positive);
        assert_eq!(parity(BasisState::PlusMinus), Parity::Negative);
        assert_eq!(parity(BasisState::MinusPlus), Parity::Negative);
    }

    #[test]
    fn ops_are_involutions() {
        let p = params();
        let s = state();
        for op in SymmetryOp::ALL {
            assert_eq!(op.map_params(&op.map_params(&p)), p);
            assert_eq!(op.map_state(&op.map_state(&s)).amplitudes(), s.amplitudes());
            let m = op.matrix();
            assert_eq!(m * m, Matrix4::identity());
        }
    }

    #[test]
    fn swap_exchanges_blocks() {
        let p = params();
        let q = map_params_i_to_ii(&p);
        for t in [0.0, 0.4, 2.3] {
            assert_eq!(q.block(t, Subspace::I).entries, p.block(t, Subspace::II).entries);
            assert_eq!(q.block(t, Subspace::II).entries, p.block(t, Subspace::I).entries);
            assert_eq!(q.lambda_z.evaluate(t), -p.lambda_z.evaluate(t));
        }
    }

    #[test]
    fn hamiltonian_transforms_covariantly() {
        let p = params();
        for op in SymmetryOp::ALL {
            let m = op.matrix();
            let q = op.map_params(&p);
            for t in [0.0, 0.9, 3.1] {
                let lhs = m * p.hamiltonian_uncoupled(t) * m;
                assert!((lhs - q.hamiltonian_uncoupled(t)).norm() < 1e-14, "{op:?}");
            }
        }
    }

    #[test]
    fn global_flip_examples() {
        let one = C64::from(1.0);
        let z = C64::default();
        let pp = FourState::uncoupled([one, z, z, z]).unwrap();
        assert_eq!(map_state_global_flip(&pp).amplitudes(), [z, one, z, z]);
        let r = C64::from(std::f64::consts::FRAC_1_SQRT_2);
        let bell = FourState::uncoupled([r, r, z, z]).unwrap();
        assert_eq!(map_state_global_flip(&bell).amplitudes(), bell.amplitudes());
    }
}
