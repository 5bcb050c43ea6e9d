//! Small dense eigen- and singular-value problems.

use nalgebra::{Matrix4, Vector4};
use num_complex::Complex64 as C64;

const MAX_SWEEPS: usize = 50;
const OFF_DIAGONAL_TOL: f64 = 1e-14;

/// Eigen-decomposition of a Hermitian 4×4 matrix by cyclic Jacobi sweeps.
///
/// Returns eigenvalues in ascending order and a unitary whose columns are
/// the matching eigenvectors. Only the Hermitian part of `m` is used.
pub fn hermitian_eigen(m: &Matrix4<C64>) -> (Vector4<f64>, Matrix4<C64>) {
    let mut a = (m + m.adjoint()) * C64::from(0.5);
    let mut v = Matrix4::<C64>::identity();
    let scale = a.norm().max(f64::MIN_POSITIVE);
    for _ in 0..MAX_SWEEPS {
        if off_diagonal(&a) < OFF_DIAGONAL_TOL * scale {
            break;
        }
        for p in 0..3 {
            for q in p + 1..4 {
                let apq = a[(p, q)];
                let r = apq.norm();
                if r == 0.0 {
                    continue;
                }
                // rotate the phase out of a_pq, then a real Jacobi rotation
                let phase = apq / r;
                let theta = 0.5 * (2.0 * r).atan2(a[(q, q)].re - a[(p, p)].re);
                let (s, c) = theta.sin_cos();
                let mut u = Matrix4::<C64>::identity();
                u[(p, p)] = C64::from(c);
                u[(q, q)] = phase.conj() * c;
                u[(p, q)] = C64::from(s);
                u[(q, p)] = -phase.conj() * s;
                a = u.adjoint() * a * u;
                // keep the diagonal exactly real
                for k in 0..4 {
                    a[(k, k)].im = 0.0;
                }
                a[(p, q)] = C64::default();
                a[(q, p)] = C64::default();
                v *= u;
            }
        }
    }
    let mut order = [0usize, 1, 2, 3];
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let values = Vector4::from_fn(|i, _| a[(order[i], order[i])].re);
    let vectors = Matrix4::from_fn(|r, c| v[(r, order[c])]);
    (values, vectors)
}

fn off_diagonal(a: &Matrix4<C64>) -> f64 {
    let mut sum = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            if i != j {
                sum += a[(i, j)].norm_sqr();
            }
        }
    }
    sum.sqrt()
}

/// Principal square root of a Hermitian positive semi-definite matrix.
/// Eigenvalues at or below `floor`, including negative rounding noise, are
/// treated as zero.
pub fn psd_sqrt(m: &Matrix4<C64>, floor: f64) -> Matrix4<C64> {
    let (values, vectors) = hermitian_eigen(m);
    let roots = values.map(|x| if x <= floor { 0.0 } else { x.sqrt() });
    let diag = Matrix4::from_diagonal(&roots.map(C64::from));
    vectors * diag * vectors.adjoint()
}

/// Singular values of a complex 4×4 matrix in decreasing order, by
/// one-sided (Hestenes) Jacobi on the columns. Small singular values keep
/// an absolute error of order `ε ‖a‖` rather than `sqrt(ε) ‖a‖`.
pub fn singular_values(a: &Matrix4<C64>) -> Vector4<f64> {
    let mut a = *a;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..3 {
            for q in p + 1..4 {
                let alpha = a.column(p).norm_squared();
                let beta = a.column(q).norm_squared();
                let gamma = a.column(p).dotc(&a.column(q));
                let g = gamma.norm();
                if g <= OFF_DIAGONAL_TOL * (alpha * beta).sqrt() || g == 0.0 {
                    continue;
                }
                rotated = true;
                let phase = gamma / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for r in 0..4 {
                    let ap = a[(r, p)];
                    let aq = a[(r, q)] * phase.conj();
                    a[(r, p)] = ap * c - aq * s;
                    a[(r, q)] = ap * s + aq * c;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sv = Vector4::from_fn(|i, _| a.column(i).norm());
    sv.as_mut_slice().sort_by(|x, y| y.total_cmp(x));
    sv
}
