//! Two qubits coupled by a time-dependent XYZ Heisenberg exchange in a
//! non-uniform, time-varying magnetic field.
//!
//! The Hamiltonian splits into two 2×2 parity blocks. This crate provides
//! closed-form propagators for the integrable cases, rotating-wave and
//! perturbative approximations, an RK4 reference integrator, concurrence
//! evaluation and the discrete symmetries of the model.

pub mod approx;
pub mod drive;
pub mod entangle;
pub mod exact;
pub mod linalg;
pub mod model;
pub mod oracle;
pub mod symmetry;

pub use approx::{ApproxError, RwaMode, RwaSetup};
pub use drive::{DriveError, DriveProfile, Harmonic};
pub use entangle::{Basis, DensityMatrix, EntangleError, FourState, InitialKind};
pub use exact::{
    Admissibility, AmplitudeLabel, BlockAmplitudes, Eigenstate, ExactError, Ic1Propagator, Ic1Setup, Ic2Setup,
    PhaseConvention,
};
pub use model::{Couplings, Hamiltonian, ModelParams, Subspace};
pub use oracle::{IntegratorConfig, Method, OracleError};
pub use symmetry::SymmetryOp;
