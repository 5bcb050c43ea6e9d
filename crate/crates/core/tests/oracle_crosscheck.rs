//! Closed-form and approximate propagators against the RK4 integrator.

use std::f64::consts::{FRAC_PI_4, PI};

use num_complex::Complex64 as C64;
use xyz_dynamics::approx::{rwa_evolve, RwaMode, RwaSetup};
use xyz_dynamics::oracle::{integrate_block, integrate_full, IntegratorConfig, Method};
use xyz_dynamics::{
    DriveProfile, Eigenstate, Harmonic, Ic1Propagator, Ic2Setup, ModelParams, PhaseConvention, Subspace,
};

fn grid(t_end: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| t_end * i as f64 / (n - 1) as f64).collect()
}

fn rk4(step: f64) -> IntegratorConfig {
    IntegratorConfig::new(step, Method::Rk4Fixed, 1e-6).unwrap()
}

fn fig1(k: f64) -> ModelParams {
    let wp = DriveProfile::sinusoid(2.0, 50.0, PI / 50.0).unwrap();
    let lm = DriveProfile::scaled(k, wp.clone()).unwrap();
    let z = DriveProfile::zero;
    ModelParams::from_combinations(wp, z(), z(), lm, z())
}

fn initial(e: Eigenstate, theta0: f64) -> [C64; 2] {
    let a = e.initial(theta0);
    [a.a1, a.a2]
}

fn max_error<F>(trace: &xyz_dynamics::oracle::BlockTrace, exact: F) -> f64
where
    F: Fn(f64) -> [C64; 2],
{
    trace
        .times
        .iter()
        .zip(&trace.states)
        .map(|(t, s)| {
            let e = exact(*t);
            (s[0] - e[0]).norm().max((s[1] - e[1]).norm())
        })
        .fold(0.0, f64::max)
}

#[test]
fn ic1_matches_integrator() {
    for k in [0.5, 1.0, 2.0] {
        let p = fig1(k);
        let prop = Ic1Propagator::new(&p, 10.0, PhaseConvention::Signed).unwrap();
        let th = prop.setup().theta10;
        for e in [Eigenstate::Phi1, Eigenstate::Phi2] {
            let tr = integrate_block(&p, Subspace::I, initial(e, th), &grid(10.0, 201), &rk4(1e-4)).unwrap();
            let err = max_error(&tr, |t| {
                let a = prop.evolve(t, e).unwrap();
                [a.a1, a.a2]
            });
            assert!(err <= 1e-6, "k = {k}, {e:?}: {err:e}");
        }
    }
}

#[test]
fn ic1_with_lambda_z_and_both_blocks() {
    let s = |a, b, c| DriveProfile::sinusoid(a, b, c).unwrap();
    let wp = s(1.5, 3.0, 0.2);
    let wm = s(0.8, 2.0, -0.4);
    let p = ModelParams::from_combinations(
        wp.clone(),
        wm.clone(),
        DriveProfile::scaled(-0.4, wm).unwrap(),
        DriveProfile::scaled(1.3, wp).unwrap(),
        s(2.0, 1.0, 0.5),
    );
    let prop = Ic1Propagator::new(&p, 10.0, PhaseConvention::Signed).unwrap();
    let setup = prop.setup();
    for e in Eigenstate::ALL {
        let sub = e.subspace();
        let tr = integrate_block(&p, sub, initial(e, setup.theta0(sub)), &grid(10.0, 101), &rk4(1e-3)).unwrap();
        let err = max_error(&tr, |t| {
            let a = prop.evolve(t, e).unwrap();
            [a.a1, a.a2]
        });
        assert!(err <= 1e-8, "{e:?}: {err:e}");
    }
}

#[test]
fn magnitude_convention_departs_from_integrator_when_field_changes_sign() {
    let p = fig1(1.0);
    let prop = Ic1Propagator::new(&p, 10.0, PhaseConvention::Magnitude).unwrap();
    let th = prop.setup().theta10;
    let tr = integrate_block(
        &p,
        Subspace::I,
        initial(Eigenstate::Phi1, th),
        &grid(10.0, 101),
        &rk4(1e-3),
    )
    .unwrap();
    let err = max_error(&tr, |t| {
        let a = prop.evolve(t, Eigenstate::Phi1).unwrap();
        [a.a1, a.a2]
    });
    assert!(err > 0.1);
}

fn ic2(mu: f64, beta: f64, phase: f64, kappa: f64, theta10: f64) -> Ic2Setup {
    let lm = DriveProfile::sinusoid(mu, beta, phase).unwrap();
    let z = DriveProfile::zero;
    Ic2Setup::new(kappa, 1.0, theta10, 0.0, lm, z(), z()).unwrap()
}

fn ic2_error(setup: &Ic2Setup, step: f64) -> f64 {
    let th = setup.theta10;
    [Eigenstate::Phi1, Eigenstate::Phi2]
        .into_iter()
        .map(|e| {
            let tr = integrate_block(setup, Subspace::I, initial(e, th), &grid(10.0, 201), &rk4(step)).unwrap();
            max_error(&tr, |t| {
                let a = setup.evolve(t, e).unwrap();
                [a.a1, a.a2]
            })
        })
        .fold(0.0, f64::max)
}

#[test]
fn ic2_matches_integrator() {
    let cases = [
        ic2(1.0, 10.0, PI / 50.0, 0.1, FRAC_PI_4),
        ic2(4.0, 10.0, PI / 50.0, 0.1, FRAC_PI_4),
        ic2(6.0, 10.0, PI / 50.0, 0.1, FRAC_PI_4),
        ic2(4.0, 10.0, 0.0, 0.1, 0.0),
        ic2(4.0, 50.0, 0.0, 0.1, 0.0),
        ic2(4.0, 100.0, 0.0, 0.1, 0.0),
    ];
    for setup in &cases {
        assert!(setup.admissibility().is_valid());
        let err = ic2_error(setup, 1e-4);
        assert!(err <= 1e-5, "{:?}: {err:e}", setup.lambda_m);
    }
}

#[test]
fn full_system_matches_two_blocks() {
    let s = |a, b, c| DriveProfile::sinusoid(a, b, c).unwrap();
    let p = ModelParams::from_axes(
        s(0.7, 2.0, 0.1),
        s(-0.3, 1.0, 0.4),
        s(0.5, 3.0, 0.0),
        DriveProfile::constant(1.1),
        s(0.9, 0.5, 1.0),
    );
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let z = C64::default();
    let psi = [C64::from(r), z, C64::from(r), z];
    let times = grid(5.0, 51);
    let cfg = rk4(1e-3);
    let full = integrate_full(&p, psi, &times, &cfg).unwrap();
    let one = C64::from(1.0);
    let b1 = integrate_block(&p, Subspace::I, [one, z], &times, &cfg).unwrap();
    let b2 = integrate_block(&p, Subspace::II, [one, z], &times, &cfg).unwrap();
    for i in 0..times.len() {
        let f = full.states[i];
        let expect = [
            b1.states[i][0] * r,
            b1.states[i][1] * r,
            b2.states[i][0] * r,
            b2.states[i][1] * r,
        ];
        for j in 0..4 {
            assert!((f[j] - expect[j]).norm() < 1e-12);
        }
        assert!(((f[0].norm_sqr() + f[1].norm_sqr()) - 0.5).abs() < 1e-9);
        assert!(((f[2].norm_sqr() + f[3].norm_sqr()) - 0.5).abs() < 1e-9);
    }
}

#[test]
fn rwa_tracks_integrator_near_resonance() {
    for mode in [RwaMode::LambdaDrive, RwaMode::FieldDrive] {
        let setup = RwaSetup::new(
            mode,
            10.0,
            Harmonic {
                amplitude: 0.2,
                frequency: 20.1,
                phase: 0.3,
            },
            0.0,
            DriveProfile::zero(),
        )
        .unwrap();
        let p = setup.params().unwrap();
        let times = grid(40.0, 401);
        let tr = integrate_block(&p, Subspace::I, [C64::from(1.0), C64::default()], &times, &rk4(1e-3)).unwrap();
        for (t, s) in times.iter().zip(&tr.states) {
            let a = rwa_evolve(&setup, *t);
            assert!((a.a2.norm_sqr() - s[1].norm_sqr()).abs() < 0.02, "{mode:?} t = {t}");
        }
    }
}
