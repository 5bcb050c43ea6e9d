//! Fixed-step RK4 integration of the Schrödinger equation `ψ' = -i H(t) ψ`
//! for a single parity block or the full 4×4 system.
//!
//! This is the reference every closed form is checked against, so it never
//! renormalises: norm drift is measured and reported.

use nalgebra::{Matrix2, Matrix4, SMatrix, SVector, Vector2, Vector4};
use num_complex::Complex64 as C64;
use thiserror::Error;

use crate::model::{Hamiltonian, Subspace};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("norm drift {drift:e} exceeds tolerance {tolerance:e}")]
    NormDrift { drift: f64, tolerance: f64 },
    #[error("invalid integrator configuration: {0}")]
    InvalidConfig(String),
    #[error("output times must be finite, non-negative and non-decreasing")]
    InvalidGrid,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Method {
    #[default]
    Rk4Fixed,
    /// RK4 at `h` and `h/2`; the finer result is returned together with the
    /// largest difference between the two as an error bound.
    Rk4Doubling,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorConfig {
    pub step: f64,
    pub method: Method,
    pub norm_tolerance: f64,
}

const STEPS_PER_PERIOD: f64 = 200.0;
const FALLBACK_STEP: f64 = 1e-2;
const ENERGY_SAMPLES: usize = 1000;

impl IntegratorConfig {
    pub fn new(step: f64, method: Method, norm_tolerance: f64) -> Result<Self, OracleError> {
        if !(step > 0.0 && step.is_finite()) {
            return Err(OracleError::InvalidConfig(format!("step must be positive, got {step}")));
        }
        if norm_tolerance.is_nan() || norm_tolerance <= 0.0 {
            return Err(OracleError::InvalidConfig(format!(
                "norm tolerance must be positive, got {norm_tolerance}"
            )));
        }
        Ok(IntegratorConfig {
            step,
            method,
            norm_tolerance,
        })
    }

    /// One two-hundredth of the shortest drive period, further capped so
    /// that the largest sampled energy on `[0, t_end]` is also resolved.
    pub fn default_step<H: Hamiltonian + ?Sized>(h: &H, t_end: f64) -> f64 {
        let by_drive = h
            .frequencies()
            .into_iter()
            .map(|beta| std::f64::consts::TAU / beta.abs() / STEPS_PER_PERIOD)
            .fold(f64::INFINITY, f64::min);
        let energy = (0..ENERGY_SAMPLES)
            .map(|i| t_end * (i as f64 + 0.5) / ENERGY_SAMPLES as f64)
            .map(|t| {
                let c = h.couplings(t);
                let a = c.omega_plus.hypot(c.lambda_m) + c.lambda_z.abs() / 4.0;
                let b = c.omega_minus.hypot(c.lambda_p) + c.lambda_z.abs() / 4.0;
                a.max(b)
            })
            .filter(|e| e.is_finite())
            .fold(0.0, f64::max);
        let by_energy = if energy > 0.0 {
            std::f64::consts::TAU / energy / STEPS_PER_PERIOD
        } else {
            f64::INFINITY
        };
        let step = by_drive.min(by_energy);
        if step.is_finite() {
            step
        } else {
            FALLBACK_STEP
        }
    }

    pub fn for_hamiltonian<H: Hamiltonian + ?Sized>(h: &H, t_end: f64) -> Self {
        IntegratorConfig {
            step: Self::default_step(h, t_end),
            method: Method::Rk4Fixed,
            norm_tolerance: 1e-6,
        }
    }
}

/// States sampled on the requested output times.
#[derive(Debug, Clone, PartialEq)]
pub struct Trace<const N: usize> {
    pub times: Vec<f64>,
    pub states: Vec<[C64; N]>,
    /// `max |‖ψ‖² - 1|` over the output samples, relative to the initial norm.
    pub max_norm_drift: f64,
    /// Present for [`Method::Rk4Doubling`].
    pub error_estimate: Option<f64>,
}

pub type BlockTrace = Trace<2>;
pub type FullTrace = Trace<4>;

/// Integrate one parity block from `initial` at `t = 0`.
pub fn integrate_block<H: Hamiltonian + ?Sized>(
    h: &H,
    subspace: Subspace,
    initial: [C64; 2],
    times: &[f64],
    cfg: &IntegratorConfig,
) -> Result<BlockTrace, OracleError> {
    let generator = |t: f64| -> Matrix2<C64> { h.couplings(t).block(subspace).entries };
    let t_end = times.last().copied().unwrap_or(0.0);
    integrate(generator, Vector2::from(initial), times, &h.singular_times(t_end), cfg)
}

/// Integrate the full system in the uncoupled basis from `initial` at
/// `t = 0`.
pub fn integrate_full<H: Hamiltonian + ?Sized>(
    h: &H,
    initial: [C64; 4],
    times: &[f64],
    cfg: &IntegratorConfig,
) -> Result<FullTrace, OracleError> {
    let generator = |t: f64| -> Matrix4<C64> { h.couplings(t).hamiltonian_uncoupled() };
    let t_end = times.last().copied().unwrap_or(0.0);
    integrate(generator, Vector4::from(initial), times, &h.singular_times(t_end), cfg)
}

/// Stage times landing on a singular time are moved this far (relative)
/// into the segment so that one-sided limits are used.
const ONE_SIDED_OFFSET: f64 = 1e-9;

fn integrate<const N: usize, F>(
    generator: F,
    initial: SVector<C64, N>,
    times: &[f64],
    singular: &[f64],
    cfg: &IntegratorConfig,
) -> Result<Trace<N>, OracleError>
where
    F: Fn(f64) -> SMatrix<C64, N, N>,
{
    if times.iter().any(|t| !t.is_finite() || *t < 0.0) || times.windows(2).any(|w| w[1] < w[0]) {
        return Err(OracleError::InvalidGrid);
    }
    let run = |step: f64| propagate(&generator, initial, times, singular, step);
    let (states, error_estimate) = match cfg.method {
        Method::Rk4Fixed => (run(cfg.step), None),
        Method::Rk4Doubling => {
            let coarse = run(cfg.step);
            let fine = run(0.5 * cfg.step);
            let diff = coarse
                .iter()
                .zip(&fine)
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max);
            (fine, Some(diff))
        }
    };
    let n0 = initial.norm_squared();
    let max_norm_drift = states
        .iter()
        .map(|s| (s.norm_squared() / n0 - 1.0).abs())
        .fold(0.0, f64::max);
    if max_norm_drift > cfg.norm_tolerance {
        return Err(OracleError::NormDrift {
            drift: max_norm_drift,
            tolerance: cfg.norm_tolerance,
        });
    }
    Ok(Trace {
        times: times.to_vec(),
        states: states.iter().map(|s| std::array::from_fn(|i| s[i])).collect(),
        max_norm_drift,
        error_estimate,
    })
}

fn propagate<const N: usize, F>(
    generator: &F,
    initial: SVector<C64, N>,
    times: &[f64],
    singular: &[f64],
    step: f64,
) -> Vec<SVector<C64, N>>
where
    F: Fn(f64) -> SMatrix<C64, N, N>,
{
    let minus_i = C64::new(0.0, -1.0);
    let rhs = |t: f64, psi: &SVector<C64, N>| generator(t) * psi * minus_i;
    let is_singular = |t: f64| singular.contains(&t);

    let mut out = Vec::with_capacity(times.len());
    let mut psi = initial;
    let mut now = 0.0;
    // segment ends: every output time and every singular time
    let mut stops: Vec<f64> = times.iter().chain(singular.iter()).copied().collect();
    stops.sort_by(f64::total_cmp);
    stops.dedup();
    let mut next_output = times.iter().peekable();
    while next_output.peek().is_some_and(|t| **t <= 0.0) {
        out.push(psi);
        next_output.next();
    }
    for stop in stops.into_iter().filter(|t| *t > 0.0) {
        let span = stop - now;
        let n = (span / step).ceil().max(1.0) as usize;
        let h = span / n as f64;
        let lo = if is_singular(now) {
            now + ONE_SIDED_OFFSET * now.max(1.0)
        } else {
            now
        };
        let hi = if is_singular(stop) {
            stop - ONE_SIDED_OFFSET * stop.max(1.0)
        } else {
            stop
        };
        let clamp = |t: f64| t.clamp(lo, hi);
        for k in 0..n {
            let t = now + k as f64 * h;
            let k1 = rhs(clamp(t), &psi);
            let k2 = rhs(clamp(t + 0.5 * h), &(psi + k1 * C64::from(0.5 * h)));
            let k3 = rhs(clamp(t + 0.5 * h), &(psi + k2 * C64::from(0.5 * h)));
            let k4 = rhs(clamp(t + h), &(psi + k3 * C64::from(h)));
            psi += (k1 + k2 * C64::from(2.0) + k3 * C64::from(2.0) + k4) * C64::from(h / 6.0);
        }
        now = stop;
        while next_output.peek().is_some_and(|t| **t == stop) {
            out.push(psi);
            next_output.next();
        }
    }
    out
}
