//! Scalar drive profiles: the time dependence of every coupling and field.
//!
//! A profile is an immutable value. `Scaled` and `Sum` own copies of their
//! operands, so a proportional pair such as `lambda_m = k * omega_plus`
//! cannot drift apart after construction.

use std::f64::consts::PI;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DriveError {
    #[error("sinusoid frequency must be non-zero and finite, got {0}")]
    ZeroFrequency(f64),
    #[error("profile parameter `{name}` must be finite, got {value}")]
    NonFinite { name: &'static str, value: f64 },
    #[error("adaptive quadrature did not converge on [{t0}, {t1}]")]
    NonConvergence { t0: f64, t1: f64 },
}

/// Time dependence of one Hamiltonian parameter.
///
/// `Sinusoid` is `amplitude * sin(frequency * t + phase)`; the frequency
/// multiplies `t` directly, with no factor of 2π.
#[derive(Debug, Clone, PartialEq)]
pub enum DriveProfile {
    Constant { value: f64 },
    Sinusoid { amplitude: f64, frequency: f64, phase: f64 },
    Scaled { factor: f64, base: Box<DriveProfile> },
    Sum { terms: Vec<DriveProfile> },
}

/// A single harmonic `amplitude * sin(frequency * t + phase)` with
/// `frequency > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Harmonic {
    pub amplitude: f64,
    pub frequency: f64,
    pub phase: f64,
}

impl Harmonic {
    pub fn evaluate(&self, t: f64) -> f64 {
        self.amplitude * (self.frequency * t + self.phase).sin()
    }

    /// `∫_0^t`, written as a product of sines so that small `t` keeps full
    /// relative precision.
    pub fn integral(&self, t: f64) -> f64 {
        let half = 0.5 * self.frequency * t;
        2.0 * self.amplitude / self.frequency * (half + self.phase).sin() * half.sin()
    }

    /// `∫_0^t |amplitude * sin(frequency * s + phase)| ds`.
    pub fn abs_integral(&self, t: f64) -> f64 {
        let g = |x: f64| abs_sin_antiderivative(x);
        self.amplitude.abs() * (g(self.frequency * t + self.phase) - g(self.phase)) / self.frequency
    }
}

/// Canonical form of a profile: a constant plus harmonics of distinct
/// positive frequencies.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Waveform {
    pub constant: f64,
    pub harmonics: Vec<Harmonic>,
}

impl Waveform {
    fn add_harmonic(&mut self, scale: f64, amplitude: f64, frequency: f64, phase: f64) {
        // μ sin(-βt + φ) = -μ sin(βt - φ)
        let (amplitude, frequency, phase) = if frequency < 0.0 {
            (-scale * amplitude, -frequency, -phase)
        } else {
            (scale * amplitude, frequency, phase)
        };
        if let Some(h) = self.harmonics.iter_mut().find(|h| h.frequency == frequency) {
            // phasor addition of equal-frequency terms
            let re = h.amplitude * h.phase.cos() + amplitude * phase.cos();
            let im = h.amplitude * h.phase.sin() + amplitude * phase.sin();
            h.amplitude = re.hypot(im);
            h.phase = im.atan2(re);
        } else {
            self.harmonics.push(Harmonic {
                amplitude,
                frequency,
                phase,
            });
        }
    }

    fn accumulate(&mut self, profile: &DriveProfile, scale: f64) {
        match profile {
            DriveProfile::Constant { value } => self.constant += scale * value,
            DriveProfile::Sinusoid {
                amplitude,
                frequency,
                phase,
            } => self.add_harmonic(scale, *amplitude, *frequency, *phase),
            DriveProfile::Scaled { factor, base } => self.accumulate(base, scale * factor),
            DriveProfile::Sum { terms } => {
                for term in terms {
                    self.accumulate(term, scale);
                }
            }
        }
    }

    /// The harmonics with non-zero amplitude.
    pub fn active(&self) -> impl Iterator<Item = &Harmonic> {
        self.harmonics.iter().filter(|h| h.amplitude != 0.0)
    }

    pub fn is_static(&self) -> bool {
        self.active().next().is_none()
    }

    /// The waveform as a single harmonic, if it is exactly one.
    pub fn single_harmonic(&self) -> Option<Harmonic> {
        let mut active = self.active();
        match (active.next(), active.next()) {
            (Some(h), None) if self.constant == 0.0 => Some(*h),
            _ => None,
        }
    }
}

impl DriveProfile {
    pub fn constant(value: f64) -> Self {
        DriveProfile::Constant { value }
    }

    pub fn zero() -> Self {
        DriveProfile::Constant { value: 0.0 }
    }

    pub fn sinusoid(amplitude: f64, frequency: f64, phase: f64) -> Result<Self, DriveError> {
        if frequency == 0.0 || !frequency.is_finite() {
            return Err(DriveError::ZeroFrequency(frequency));
        }
        finite("amplitude", amplitude)?;
        finite("phase", phase)?;
        Ok(DriveProfile::Sinusoid {
            amplitude,
            frequency,
            phase,
        })
    }

    pub fn scaled(factor: f64, base: DriveProfile) -> Result<Self, DriveError> {
        finite("factor", factor)?;
        Ok(DriveProfile::Scaled {
            factor,
            base: Box::new(base),
        })
    }

    pub fn sum(terms: Vec<DriveProfile>) -> Self {
        DriveProfile::Sum { terms }
    }

    /// `a * p + b * q` as a profile.
    pub fn combine(a: f64, p: &DriveProfile, b: f64, q: &DriveProfile) -> Self {
        DriveProfile::Sum {
            terms: vec![
                DriveProfile::Scaled {
                    factor: a,
                    base: Box::new(p.clone()),
                },
                DriveProfile::Scaled {
                    factor: b,
                    base: Box::new(q.clone()),
                },
            ],
        }
    }

    /// The sign-flipped profile. Negating twice returns a structurally equal
    /// profile, so symmetry maps built on it are exact involutions.
    pub fn negated(&self) -> Self {
        match self {
            DriveProfile::Constant { value } => DriveProfile::Constant { value: -value },
            DriveProfile::Sinusoid {
                amplitude,
                frequency,
                phase,
            } => DriveProfile::Sinusoid {
                amplitude: -amplitude,
                frequency: *frequency,
                phase: *phase,
            },
            DriveProfile::Scaled { factor, base } => DriveProfile::Scaled {
                factor: -factor,
                base: base.clone(),
            },
            DriveProfile::Sum { terms } => DriveProfile::Sum {
                terms: terms.iter().map(DriveProfile::negated).collect(),
            },
        }
    }

    pub fn evaluate(&self, t: f64) -> f64 {
        match self {
            DriveProfile::Constant { value } => *value,
            DriveProfile::Sinusoid {
                amplitude,
                frequency,
                phase,
            } => amplitude * (frequency * t + phase).sin(),
            DriveProfile::Scaled { factor, base } => factor * base.evaluate(t),
            DriveProfile::Sum { terms } => terms.iter().map(|p| p.evaluate(t)).sum(),
        }
    }

    /// Exact `∫_0^t p(s) ds`.
    pub fn integral(&self, t: f64) -> f64 {
        match self {
            DriveProfile::Constant { value } => value * t,
            DriveProfile::Sinusoid {
                amplitude,
                frequency,
                phase,
            } => Harmonic {
                amplitude: *amplitude,
                frequency: *frequency,
                phase: *phase,
            }
            .integral(t),
            DriveProfile::Scaled { factor, base } => factor * base.integral(t),
            DriveProfile::Sum { terms } => terms.iter().map(|p| p.integral(t)).sum(),
        }
    }

    /// `∫_0^t |p(s)| ds`. Closed form when the profile reduces to a constant
    /// or a single harmonic, adaptive quadrature otherwise.
    pub fn abs_integral(&self, t: f64) -> Result<f64, DriveError> {
        let w = self.waveform();
        if w.is_static() {
            return Ok(w.constant.abs() * t);
        }
        if let Some(h) = w.single_harmonic() {
            return Ok(h.abs_integral(t));
        }
        // split at a fraction of the fastest period so that kinks of |p|
        // cannot hide between Simpson nodes
        let fastest = w.active().map(|h| h.frequency).fold(0.0, f64::max);
        let pieces = (t.abs() * fastest / (PI / 4.0)).ceil().max(1.0);
        let tol = 1e-12 * (1.0 + t.abs()) / pieces;
        let n = pieces as usize;
        let mut total = 0.0;
        for i in 0..n {
            let (a, b) = (t * i as f64 / pieces, t * (i + 1) as f64 / pieces);
            total += quadrature(|s| self.evaluate(s).abs(), a, b, tol)?;
        }
        Ok(total)
    }

    pub fn waveform(&self) -> Waveform {
        let mut w = Waveform::default();
        w.accumulate(self, 1.0);
        w
    }

    /// Angular frequencies of the active harmonics.
    pub fn frequencies(&self) -> Vec<f64> {
        self.waveform().active().map(|h| h.frequency).collect()
    }

    pub fn is_static(&self) -> bool {
        self.waveform().is_static()
    }

    /// Upper bound on `|p(t)|` over all `t`.
    pub fn magnitude_bound(&self) -> f64 {
        let w = self.waveform();
        w.constant.abs() + w.active().map(|h| h.amplitude.abs()).sum::<f64>()
    }
}

fn finite(name: &'static str, value: f64) -> Result<(), DriveError> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(DriveError::NonFinite { name, value })
    }
}

/// `G(x) = ∫_0^x |sin y| dy`, odd in `x`.
fn abs_sin_antiderivative(x: f64) -> f64 {
    if x < 0.0 {
        return -abs_sin_antiderivative(-x);
    }
    let lobes = (x / PI).floor();
    let rest = x - lobes * PI;
    2.0 * lobes + (1.0 - rest.cos())
}

const MAX_DEPTH: u32 = 48;

/// Adaptive Simpson quadrature of `f` over `[t0, t1]` with absolute
/// tolerance `tol`.
pub fn quadrature<F>(f: F, t0: f64, t1: f64, tol: f64) -> Result<f64, DriveError>
where
    F: Fn(f64) -> f64,
{
    if t0 == t1 {
        return Ok(0.0);
    }
    let (fa, fb) = (f(t0), f(t1));
    let m = 0.5 * (t0 + t1);
    let fm = f(m);
    let whole = (t1 - t0) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(&f, t0, t1, fa, fm, fb, whole, tol.max(f64::MIN_POSITIVE), MAX_DEPTH)
        .ok_or(DriveError::NonConvergence { t0, t1 })
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Option<f64> {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if delta.abs() <= 15.0 * tol {
        return Some(left + right + delta / 15.0);
    }
    if depth == 0 {
        return None;
    }
    let l = simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)?;
    let r = simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)?;
    Some(l + r)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig1_field() -> DriveProfile {
        DriveProfile::sinusoid(2.0, 50.0, PI / 50.0).unwrap()
    }

    #[test]
    fn evaluate_examples() {
        let p = fig1_field();
        let expected = 2.0 * (PI / 50.0).sin();
        assert!((p.evaluate(0.0) - expected).abs() < 1e-15);
        assert!((p.evaluate(0.0) - 0.12558).abs() < 1e-5);
        let zero_phase = DriveProfile::sinusoid(3.0, 7.0, 0.0).unwrap();
        assert_eq!(zero_phase.evaluate(0.0), 0.0);
        let half = DriveProfile::scaled(0.5, fig1_field()).unwrap();
        assert!((half.evaluate(0.0) - 0.06279).abs() < 1e-5);
    }

    #[test]
    fn integral_examples() {
        assert_eq!(fig1_field().integral(0.0), 0.0);
        assert_eq!(DriveProfile::constant(3.0).integral(2.0), 6.0);
        let s = DriveProfile::sinusoid(1.0, 1.0, 0.0).unwrap();
        assert!((s.integral(PI) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn quadrature_examples() {
        let v = quadrature(f64::sin, 0.0, PI, 1e-10).unwrap();
        assert!((v - 2.0).abs() <= 1e-10);
        let v = quadrature(|_| 1.0, 0.0, 5.0, 1e-10).unwrap();
        assert!((v - 5.0).abs() <= 1e-12);
        let v = quadrature(|t: f64| t.sin().abs(), 0.0, 2.0 * PI, 1e-10).unwrap();
        assert!((v - 4.0).abs() <= 1e-9);
    }

    #[test]
    fn quadrature_reports_non_convergence() {
        // a jump that no Simpson panel can resolve to this tolerance
        let step = |t: f64| if t < 1.0 / 3.0 { 0.0 } else { 1.0 };
        assert!(matches!(
            quadrature(step, 0.0, 1.0, 1e-300),
            Err(DriveError::NonConvergence { .. })
        ));
    }

    #[test]
    fn constructors_reject_bad_input() {
        assert!(matches!(
            DriveProfile::sinusoid(1.0, 0.0, 0.0),
            Err(DriveError::ZeroFrequency(_))
        ));
        assert!(DriveProfile::scaled(f64::NAN, DriveProfile::zero()).is_err());
    }

    #[test]
    fn abs_integral_matches_quadrature() {
        let p = fig1_field();
        for &t in &[0.0, 0.013, 0.5, 1.7, 10.0] {
            let exact = p.abs_integral(t).unwrap();
            let num = quadrature(|s| p.evaluate(s).abs(), 0.0, t, 1e-11).unwrap();
            assert!((exact - num).abs() < 1e-8, "t={t}: {exact} vs {num}");
        }
        let neg = DriveProfile::sinusoid(-1.5, -3.0, 0.4).unwrap();
        let exact = neg.abs_integral(4.0).unwrap();
        let num = quadrature(|s| neg.evaluate(s).abs(), 0.0, 4.0, 1e-11).unwrap();
        assert!((exact - num).abs() < 1e-8);
    }

    #[test]
    fn waveform_merges_equal_frequencies() {
        let base = fig1_field();
        let p = DriveProfile::combine(0.25, &base, -0.75, &base);
        let h = p.waveform().single_harmonic().unwrap();
        assert!((h.amplitude.abs() - 1.0).abs() < 1e-15);
        for &t in &[0.0, 0.3, 1.1] {
            assert!((h.evaluate(t) - p.evaluate(t)).abs() < 1e-14);
        }
        assert!(DriveProfile::combine(1.0, &base, -1.0, &base).is_static());
    }

    #[test]
    fn negation_is_structural_involution() {
        let p = DriveProfile::sum(vec![
            DriveProfile::constant(1.5),
            DriveProfile::scaled(2.0, fig1_field()).unwrap(),
        ]);
        assert_eq!(p.negated().negated(), p);
        assert_eq!(p.negated().evaluate(0.7), -p.evaluate(0.7));
    }
}
