use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use xyz_dynamics::entangle::{concurrence_ic2, concurrence_pure};
use xyz_dynamics::oracle::{integrate_block, integrate_full, IntegratorConfig, Method};
use xyz_dynamics::symmetry::{
    map_params_global_flip, map_params_i_to_ii, map_state_global_flip, map_state_subspace_swap, mirror_ic2,
};
use xyz_dynamics::{DriveProfile, FourState, Ic2Setup, InitialKind, ModelParams, Subspace};

fn random_profile(rng: &mut ChaCha8Rng) -> DriveProfile {
    if rng.random_bool(0.3) {
        DriveProfile::constant(rng.random_range(-2.0..2.0))
    } else {
        DriveProfile::sinusoid(
            rng.random_range(-2.0..2.0),
            rng.random_range(0.2..6.0),
            rng.random_range(-3.0..3.0),
        )
        .unwrap()
    }
}

fn random_params(rng: &mut ChaCha8Rng) -> ModelParams {
    let mut p = || random_profile(rng);
    ModelParams::from_axes(p(), p(), p(), p(), p())
}

fn random_state(rng: &mut ChaCha8Rng) -> FourState {
    let v: [C64; 4] = std::array::from_fn(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
    let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    FourState::uncoupled(v.map(|z| z / n)).unwrap()
}

fn times() -> Vec<f64> {
    (0..=30).map(|i| 0.1 * i as f64).collect()
}

fn cfg() -> IntegratorConfig {
    IntegratorConfig::new(1e-3, Method::Rk4Fixed, 1e-6).unwrap()
}

fn evolve(p: &ModelParams, s: &FourState) -> Vec<FourState> {
    integrate_full(p, s.amplitudes(), &times(), &cfg())
        .unwrap()
        .states
        .into_iter()
        .map(|a| FourState::new_unchecked(xyz_dynamics::Basis::Uncoupled, a))
        .collect()
}

fn max_diff(a: &[FourState], b: &[FourState]) -> f64 {
    a.iter()
        .zip(b)
        .flat_map(|(x, y)| {
            x.amplitudes()
                .into_iter()
                .zip(y.amplitudes())
                .map(|(u, v)| (u - v).norm())
        })
        .fold(0.0, f64::max)
}

#[test]
fn subspace_swap_commutes_with_evolution() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..100 {
        let p = random_params(&mut rng);
        let s = random_state(&mut rng);
        let lhs: Vec<_> = evolve(&p, &s).iter().map(map_state_subspace_swap).collect();
        let rhs = evolve(&map_params_i_to_ii(&p), &map_state_subspace_swap(&s));
        assert!(max_diff(&lhs, &rhs) <= 1e-8);
    }
}

#[test]
fn block_ii_is_block_i_of_swapped_params() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..100 {
        let p = random_params(&mut rng);
        let q = map_params_i_to_ii(&p);
        let init = [C64::new(0.6, 0.0), C64::new(0.0, 0.8)];
        let a = integrate_block(&p, Subspace::II, init, &times(), &cfg()).unwrap();
        let b = integrate_block(&q, Subspace::I, init, &times(), &cfg()).unwrap();
        assert_eq!(a.states, b.states);
    }
}

#[test]
fn global_flip_commutes_with_evolution() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    for _ in 0..100 {
        let p = random_params(&mut rng);
        let s = random_state(&mut rng);
        let original = evolve(&p, &s);
        let lhs: Vec<_> = original.iter().map(map_state_global_flip).collect();
        let rhs = evolve(&map_params_global_flip(&p), &map_state_global_flip(&s));
        assert!(max_diff(&lhs, &rhs) <= 1e-8);
        for (a, b) in original.iter().zip(&rhs) {
            assert!((concurrence_pure(a) - concurrence_pure(b)).abs() <= 1e-12);
        }
    }
}

#[test]
fn ic2_mirror_rule() {
    let z = DriveProfile::zero;
    let cases = [
        (0.1, 4.0, 10.0, 0.06, std::f64::consts::FRAC_PI_4),
        (0.1, 4.0, 10.0, 0.0, 0.0),
        (0.1, 4.0, 100.0, 0.0, 0.0),
        (-0.05, 2.0, 10.0, 0.1, 0.5),
        (0.2, 1.0, 20.0, -0.3, 1.1),
    ];
    for (kappa, mu, beta, phase, theta10) in cases {
        let lm = DriveProfile::sinusoid(mu, beta, phase).unwrap();
        let s = Ic2Setup::new(kappa, 1.0, theta10, 0.0, lm, z(), z()).unwrap();
        let m = mirror_ic2(&s);
        assert!(s.admissibility().is_valid() && m.admissibility().is_valid());
        assert!((m.theta10 - (FRAC_PI_2 - theta10)).abs() < 1e-15);
        for i in 0..=400 {
            let t = 10.0 * i as f64 / 400.0;
            let mm = concurrence_ic2(InitialKind::Mm, &s, t).unwrap();
            let pp = concurrence_ic2(InitialKind::Pp, &m, t).unwrap();
            assert!((mm - pp).abs() <= 1e-9, "t = {t}: {mm} vs {pp}");
        }
    }
}
