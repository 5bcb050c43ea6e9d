//! Single runs: dispatch a config to a propagator and collect the trace.

use std::f64::consts::FRAC_1_SQRT_2;
use std::io::{self, Write};

use num_complex::Complex64 as C64;
use thiserror::Error;
use xyz_dynamics::approx::{perturb_validity, perturb_x1, perturb_x2, rwa_evolve, rwa_orthogonal};
use xyz_dynamics::entangle::{assemble_state, concurrence_pure};
use xyz_dynamics::oracle::integrate_full;
use xyz_dynamics::{
    Admissibility, ApproxError, BlockAmplitudes, Eigenstate, EntangleError, ExactError, FourState, Hamiltonian,
    Harmonic, Ic1Propagator, Ic2Setup, IntegratorConfig, Method, ModelParams, OracleError, PhaseConvention, RwaMode,
    RwaSetup, Subspace,
};

use crate::config::{self, ConfigError, Convention, Document, MethodSpec, Mode, RunConfig, RwaDrive};

/// Norm tolerance of the closed-form and rotating-wave propagators.
pub const ANALYTIC_NORM_TOL: f64 = 1e-9;
/// Default norm tolerance of the integrator.
pub const NUMERIC_NORM_TOL: f64 = 1e-6;

#[derive(Debug, Error)]
#[error("IC2 parameters are not admissible: {inequality}")]
pub struct AdmissibilityError {
    /// The violated inequality, as reported by the check.
    pub inequality: String,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Admissibility(#[from] AdmissibilityError),
    #[error("solver error: {0}")]
    Solver(String),
    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: io::Error,
    },
}

impl CliError {
    pub fn io(context: impl Into<String>, source: io::Error) -> Self {
        CliError::Io {
            context: context.into(),
            source,
        }
    }
}

macro_rules! solver_from {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::Solver(e.to_string())
            }
        }
    )*};
}
solver_from!(ExactError, ApproxError, OracleError, EntangleError);

/// Command-line overrides applied on top of a config.
#[derive(Debug, Clone, Copy, Default)]
pub struct Overrides {
    /// Integrator step for `numeric` runs.
    pub step: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub t: f64,
    /// Uncoupled amplitudes `f++, f--, f+-, f-+`.
    pub amplitudes: [C64; 4],
    pub norm: f64,
    pub concurrence: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    /// `# `-prefixed header lines.
    pub header: Vec<String>,
    pub rows: Vec<Row>,
    /// Tolerance the norm column is held to, or `None` for propagators that
    /// are not unitary.
    pub norm_tolerance: Option<f64>,
}

pub const COLUMNS: &str = "t,re_fpp,im_fpp,re_fmm,im_fmm,re_fpm,im_fpm,re_fmp,im_fmp,norm,concurrence";

impl Trace {
    pub fn concurrence(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.concurrence).collect()
    }

    pub fn times(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.t).collect()
    }

    pub fn max_norm_drift(&self) -> f64 {
        self.rows.iter().map(|r| (r.norm - 1.0).abs()).fold(0.0, f64::max)
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        for line in &self.header {
            writeln!(out, "{line}")?;
        }
        writeln!(out, "{COLUMNS}")?;
        for r in &self.rows {
            write!(out, "{}", r.t)?;
            for a in r.amplitudes {
                write!(out, ",{},{}", a.re, a.im)?;
            }
            writeln!(out, ",{},{}", r.norm, r.concurrence)?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv is utf-8")
    }
}

/// The requested initial state.
#[derive(Debug, Clone, Copy)]
enum Initial {
    Amplitudes([C64; 4]),
    Eigen(Eigenstate),
}

fn initial(cfg: &RunConfig) -> Result<Initial, ConfigError> {
    let one = C64::from(1.0);
    let z = C64::default();
    let r = C64::from(FRAC_1_SQRT_2);
    if let Some(amps) = &cfg.initial.amplitudes {
        let a = [0, 1, 2, 3].map(|i| C64::new(amps[i][0].0, amps[i][1].0));
        FourState::uncoupled(a).map_err(|e| ConfigError::Invalid(format!("initial.amplitudes: {e}")))?;
        return Ok(Initial::Amplitudes(a));
    }
    let name = cfg.initial.state.as_deref().unwrap_or_default();
    Ok(match name {
        "pp" => Initial::Amplitudes([one, z, z, z]),
        "mm" => Initial::Amplitudes([z, one, z, z]),
        "pm" => Initial::Amplitudes([z, z, one, z]),
        "mp" => Initial::Amplitudes([z, z, z, one]),
        "bell_s" => Initial::Amplitudes([r, r, z, z]),
        "bell_a" => Initial::Amplitudes([r, -r, z, z]),
        "phi1" => Initial::Eigen(Eigenstate::Phi1),
        "phi2" => Initial::Eigen(Eigenstate::Phi2),
        "phi3" => Initial::Eigen(Eigenstate::Phi3),
        "phi4" => Initial::Eigen(Eigenstate::Phi4),
        other => {
            return Err(ConfigError::Invalid(format!(
                "unknown initial.state `{other}` (expected pp, mm, pm, mp, bell_s, bell_a, phi1..phi4)"
            )))
        }
    })
}

impl Initial {
    /// Uncoupled amplitudes, resolving eigenstates with the block angles.
    fn resolve(self, theta10: f64, theta20: f64) -> [C64; 4] {
        match self {
            Initial::Amplitudes(a) => a,
            Initial::Eigen(e) => {
                let theta = match e.subspace() {
                    Subspace::I => theta10,
                    Subspace::II => theta20,
                };
                let b = e.initial(theta);
                match e.subspace() {
                    Subspace::I => [b.a1, b.a2, C64::default(), C64::default()],
                    Subspace::II => [C64::default(), C64::default(), b.a1, b.a2],
                }
            }
        }
    }
}

fn row(t: f64, amplitudes: [C64; 4]) -> Row {
    let state = FourState::new_unchecked(xyz_dynamics::Basis::Uncoupled, amplitudes);
    Row {
        t,
        amplitudes,
        norm: state.norm_sqr().sqrt(),
        concurrence: concurrence_pure(&state),
    }
}

/// Rows from the four evolved eigenstates, one set per time.
fn assembled<F>(times: &[f64], start: [C64; 4], theta10: f64, theta20: f64, mut evolve: F) -> Result<Vec<Row>, CliError>
where
    F: FnMut(f64) -> Result<[BlockAmplitudes; 4], CliError>,
{
    let [a, b, c, d] = start;
    times
        .iter()
        .map(|&t| {
            let [x, y, z, w] = evolve(t)?;
            let s = assemble_state(a, b, c, d, &x, &y, &z, &w, theta10, theta20);
            Ok(row(t, s.amplitudes()))
        })
        .collect()
}

fn ic2_setup(cfg: &RunConfig) -> Result<Ic2Setup, CliError> {
    let spec = cfg
        .ic2
        .as_ref()
        .ok_or_else(|| ConfigError::Invalid("missing [ic2] section".into()))?;
    let profile = |v: &Option<toml::Value>, name: &str| config::optional_profile(v.as_ref(), &format!("ic2.{name}"));
    let setup = Ic2Setup::new(
        spec.kappa.0,
        spec.chi.map_or(1.0, |c| c.0),
        spec.theta10.0,
        spec.theta20.map_or(0.0, |c| c.0),
        profile(&spec.lambda_m, "lambda_m")?,
        profile(&spec.lambda_p, "lambda_p")?,
        profile(&spec.lambda_z, "lambda_z")?,
    )
    .map_err(|e| ConfigError::Invalid(e.to_string()))?;
    if let Admissibility::Violated(inequality) = setup.admissibility() {
        return Err(AdmissibilityError { inequality }.into());
    }
    Ok(setup)
}

fn rwa_setup(cfg: &RunConfig) -> Result<RwaSetup, CliError> {
    let spec = cfg
        .rwa
        .as_ref()
        .ok_or_else(|| ConfigError::Invalid("missing [rwa] section".into()))?;
    let mode = match spec.drive {
        RwaDrive::LambdaDrive => RwaMode::LambdaDrive,
        RwaDrive::FieldDrive => RwaMode::FieldDrive,
    };
    let drive = Harmonic {
        amplitude: spec.amplitude.0,
        frequency: spec.frequency.0,
        phase: spec.phase.map_or(0.0, |p| p.0),
    };
    let lambda_z = config::optional_profile(spec.lambda_z.as_ref(), "rwa.lambda_z")?;
    RwaSetup::new(
        mode,
        spec.static_value.0,
        drive,
        spec.theta10.map_or(0.0, |p| p.0),
        lambda_z,
    )
    .map_err(|e| ConfigError::Invalid(format!("[rwa]: {e}")).into())
}

fn model(cfg: &RunConfig) -> Result<ModelParams, CliError> {
    let table = cfg
        .model
        .as_ref()
        .ok_or_else(|| ConfigError::Invalid("missing [model] section".into()))?;
    Ok(config::model_params(table)?)
}

fn run_ic1(cfg: &RunConfig, times: &[f64], info: &mut Vec<String>) -> Result<Vec<Row>, CliError> {
    let params = model(cfg)?;
    let convention = match cfg.phase_convention {
        Convention::Signed => PhaseConvention::Signed,
        Convention::Magnitude => PhaseConvention::Magnitude,
    };
    let prop = Ic1Propagator::new(&params, cfg.time.t_end.0, convention)?;
    let setup = prop.setup();
    info.push(format!("theta10 = {}", setup.theta10));
    info.push(format!("theta20 = {}", setup.theta20));
    let start = initial(cfg)?.resolve(setup.theta10, setup.theta20);
    assembled(times, start, setup.theta10, setup.theta20, |t| {
        Ok(Eigenstate::ALL
            .map(|e| prop.evolve(t, e))
            .into_iter()
            .collect::<Result<Vec<_>, _>>()?
            .try_into()
            .unwrap())
    })
}

fn run_ic2(cfg: &RunConfig, times: &[f64]) -> Result<Vec<Row>, CliError> {
    let setup = ic2_setup(cfg)?;
    let start = initial(cfg)?.resolve(setup.theta10, setup.theta20);
    assembled(times, start, setup.theta10, setup.theta20, |t| {
        Ok(Eigenstate::ALL
            .map(|e| setup.evolve(t, e))
            .into_iter()
            .collect::<Result<Vec<_>, _>>()?
            .try_into()
            .unwrap())
    })
}

fn run_rwa(cfg: &RunConfig, times: &[f64], info: &mut Vec<String>) -> Result<Vec<Row>, CliError> {
    let setup = rwa_setup(cfg)?;
    info.push(format!("detuning = {}", setup.detuning()));
    info.push(format!("gamma = {}", setup.gamma()));
    let start = initial(cfg)?.resolve(setup.theta10, 0.0);
    assembled(times, start, setup.theta10, 0.0, |t| {
        // block II carries only the λz phase
        let phase = C64::from_polar(1.0, setup.lambda_z.integral(t) / 4.0);
        let zero = C64::default();
        Ok([
            rwa_evolve(&setup, t),
            rwa_orthogonal(&setup, t),
            BlockAmplitudes::new(phase, zero, Eigenstate::Phi3),
            BlockAmplitudes::new(zero, phase, Eigenstate::Phi4),
        ])
    })
}

fn run_perturbation(cfg: &RunConfig, times: &[f64], info: &mut Vec<String>) -> Result<Vec<Row>, CliError> {
    let spec = cfg
        .perturbation
        .as_ref()
        .ok_or_else(|| ConfigError::Invalid("missing [perturbation] section".into()))?;
    if cfg.initial.state.as_deref() != Some("pp") {
        return Err(ConfigError::Invalid("perturbation mode starts from initial.state = \"pp\" only".into()).into());
    }
    let omega = spec.omega_plus.0;
    let drive = Harmonic {
        amplitude: spec.amplitude.0,
        frequency: spec.frequency.0,
        phase: 0.0,
    };
    info.push(format!(
        "validity |mu/(beta - 2 omega)| = {}",
        perturb_validity(omega, &drive)?
    ));
    info.push("first-order amplitudes; norm is not conserved and concurrence is of the normalised state".into());
    let z = C64::default();
    times
        .iter()
        .map(|&t| Ok(row(t, [perturb_x1(omega, t), perturb_x2(omega, &drive, t)?, z, z])))
        .collect()
}

fn run_numeric(
    cfg: &RunConfig,
    times: &[f64],
    overrides: Overrides,
    info: &mut Vec<String>,
) -> Result<(Vec<Row>, f64), CliError> {
    let (h, theta10, theta20): (Box<dyn Hamiltonian>, f64, f64) = if cfg.model.is_some() {
        let params = model(cfg)?;
        let (a, b) = (
            params.spectrum(0.0, Subspace::I).theta,
            params.spectrum(0.0, Subspace::II).theta,
        );
        (Box::new(params), a, b)
    } else if cfg.ic2.is_some() {
        let setup = ic2_setup(cfg)?;
        let (a, b) = (setup.theta10, setup.theta20);
        (Box::new(setup), a, b)
    } else {
        let setup = rwa_setup(cfg)?;
        let theta10 = setup.theta10;
        (Box::new(setup.params()?), theta10, 0.0)
    };
    let t_end = cfg.time.t_end.0;
    let spec = cfg.numeric.clone().unwrap_or(config::NumericSpec {
        step: None,
        method: None,
        norm_tolerance: None,
    });
    let step = overrides
        .step
        .or(spec.step.map(|s| s.0))
        .unwrap_or_else(|| IntegratorConfig::default_step(h.as_ref(), t_end));
    let method = match spec.method {
        Some(MethodSpec::Rk4Doubling) => Method::Rk4Doubling,
        _ => Method::Rk4Fixed,
    };
    let tolerance = spec.norm_tolerance.map_or(NUMERIC_NORM_TOL, |n| n.0);
    let integrator = IntegratorConfig::new(step, method, tolerance)?;
    info.push(format!("step = {step}"));
    info.push(format!("method = {method:?}"));
    let start = initial(cfg)?.resolve(theta10, theta20);
    let trace = integrate_full(h.as_ref(), start, times, &integrator)?;
    info.push(format!("max norm drift = {:e}", trace.max_norm_drift));
    if let Some(e) = trace.error_estimate {
        info.push(format!("step-doubling error estimate = {e:e}"));
    }
    let rows = trace
        .times
        .iter()
        .zip(&trace.states)
        .map(|(&t, s)| row(t, *s))
        .collect();
    Ok((rows, tolerance))
}

/// Run one config (its sweep block, if any, is ignored).
pub fn execute(doc: &Document, overrides: Overrides) -> Result<Trace, CliError> {
    let cfg = &doc.config;
    let times = cfg.time_grid();
    let mut info = Vec::new();
    let (rows, norm_tolerance) = match cfg.mode {
        Mode::Ic1 => (run_ic1(cfg, &times, &mut info)?, Some(ANALYTIC_NORM_TOL)),
        Mode::Ic2 => (run_ic2(cfg, &times)?, Some(ANALYTIC_NORM_TOL)),
        Mode::Rwa => (run_rwa(cfg, &times, &mut info)?, Some(ANALYTIC_NORM_TOL)),
        Mode::Perturbation => (run_perturbation(cfg, &times, &mut info)?, None),
        Mode::Numeric => {
            let (rows, tol) = run_numeric(cfg, &times, overrides, &mut info)?;
            (rows, Some(tol))
        }
    };
    let mut header = doc.echo();
    header.extend(info.into_iter().map(|l| format!("# {l}")));
    Ok(Trace {
        header,
        rows,
        norm_tolerance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const FIG1C: &str = include_str!("../presets/fig1c.toml");

    #[test]
    fn csv_layout() {
        let doc = Document::parse(FIG1C).unwrap();
        let trace = execute(&doc, Overrides::default()).unwrap();
        let csv = trace.to_csv_string();
        let mut lines = csv.lines().skip_while(|l| l.starts_with('#'));
        assert_eq!(lines.next(), Some(COLUMNS));
        let first: Vec<f64> = lines.next().unwrap().split(',').map(|x| x.parse().unwrap()).collect();
        assert_eq!(first.len(), 11);
        assert_eq!(first[..3], [0.0, 1.0, 0.0]);
        assert_eq!(first[10], 0.0);
        assert!(csv.starts_with("# "));
    }

    #[test]
    fn named_states() {
        let doc =
            |state: &str| Document::parse(&FIG1C.replace("state = \"pp\"", &format!("state = \"{state}\""))).unwrap();
        for state in ["mm", "pm", "mp", "bell_s", "bell_a", "phi1", "phi2", "phi3", "phi4"] {
            let trace = execute(&doc(state), Overrides::default()).unwrap();
            assert!(trace.max_norm_drift() < ANALYTIC_NORM_TOL, "{state}");
        }
        let bell = execute(&doc("bell_s"), Overrides::default()).unwrap();
        assert_eq!(bell.rows[0].concurrence, 1.0);
        assert!(matches!(
            execute(&doc("up"), Overrides::default()),
            Err(CliError::Config(_))
        ));
    }

    #[test]
    fn rejects_unnormalised_amplitudes() {
        let text = FIG1C.replace("state = \"pp\"", "amplitudes = [[1, 0], [1, 0], [0, 0], [0, 0]]");
        let doc = Document::parse(&text).unwrap();
        assert!(matches!(execute(&doc, Overrides::default()), Err(CliError::Config(_))));
    }
}
