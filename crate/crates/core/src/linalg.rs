//! Small dense complex matrix exponentials.
//!
//! The 3x3 generator is exponentiated through its eigendecomposition, which
//! is exact up to rounding and reusable for many times `t`. Near-degenerate
//! or ill-conditioned spectra fall back to scaling-and-squaring with a
//! Pade(13) approximant.

use nalgebra::{DMatrix, Matrix3, SMatrix, Vector3};
use num_complex::Complex64;

type C = Complex64;

/// Relative eigenvalue gap below which the eigendecomposition is abandoned.
pub const DEGENERACY_GAP: f64 = 1e-8;
/// Condition number of the eigenvector matrix above which the
/// eigendecomposition is abandoned.
const MAX_EIGVEC_COND: f64 = 1e8;

const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

fn one_norm<const N: usize>(a: &SMatrix<C, N, N>) -> f64 {
    (0..N).map(|j| (0..N).map(|i| a[(i, j)].norm()).sum::<f64>()).fold(0.0, f64::max)
}

/// `exp(a)` by scaling-and-squaring with a Pade(13) approximant.
pub fn expm_pade<const N: usize>(a: &SMatrix<C, N, N>) -> SMatrix<C, N, N> {
    const THETA13: f64 = 5.371920351148152;
    let norm = one_norm(a);
    let s = if norm > THETA13 { (norm / THETA13).log2().ceil() as i32 } else { 0 };
    let a = a.scale(0.5f64.powi(s));

    let id = SMatrix::<C, N, N>::identity();
    let a2 = a * a;
    let a4 = a2 * a2;
    let a6 = a4 * a2;
    let b = |k: usize| C::new(PADE13[k], 0.0);

    let u_inner = a6 * (a6 * b(13) + a4 * b(11) + a2 * b(9)) + a6 * b(7) + a4 * b(5) + a2 * b(3) + id * b(1);
    let u = a * u_inner;
    let v = a6 * (a6 * b(12) + a4 * b(10) + a2 * b(8)) + a6 * b(6) + a4 * b(4) + a2 * b(2) + id * b(0);

    let p = DMatrix::from_iterator(N, N, (v + u).iter().cloned());
    let q = DMatrix::from_iterator(N, N, (v - u).iter().cloned());
    let sol = q.lu().solve(&p).expect("Pade denominator is nonsingular for scaled input");
    let mut r = SMatrix::<C, N, N>::from_iterator(sol.iter().cloned());
    for _ in 0..s {
        r = r * r;
    }
    r
}

/// Eigendecomposition `m = V diag(mu) V^{-1}` of a 3x3 complex matrix.
#[derive(Debug, Clone)]
pub struct Eigen3 {
    pub values: Vector3<C>,
    pub vectors: Matrix3<C>,
    pub inverse: Matrix3<C>,
}

impl Eigen3 {
    /// Returns `None` when two eigenvalues are closer than
    /// `DEGENERACY_GAP * scale` or the eigenvectors are ill-conditioned.
    pub fn new(m: &Matrix3<C>, scale: f64) -> Option<Self> {
        let values = eigenvalues3(m);
        let mut gap = f64::INFINITY;
        for i in 0..3 {
            for j in (i + 1)..3 {
                gap = gap.min((values[i] - values[j]).norm());
            }
        }
        if !(gap >= DEGENERACY_GAP * scale) {
            return None;
        }
        let mut vectors = Matrix3::zeros();
        for k in 0..3 {
            let v = null_vector(&(m - Matrix3::from_diagonal_element(values[k])))?;
            vectors.set_column(k, &v);
        }
        let inverse = vectors.try_inverse()?;
        if one_norm(&vectors) * one_norm(&inverse) > MAX_EIGVEC_COND {
            return None;
        }
        Some(Self { values, vectors, inverse })
    }

    pub fn exp(&self, t: f64) -> Matrix3<C> {
        let d = Matrix3::from_diagonal(&self.values.map(|mu| (mu * t).exp()));
        self.vectors * d * self.inverse
    }
}

/// Eigenvalues of a 3x3 complex matrix: roots of the characteristic cubic,
/// found by Durand-Kerner iteration and polished with Newton steps.
pub fn eigenvalues3(m: &Matrix3<C>) -> Vector3<C> {
    let tr = m.trace();
    let minors = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)]
        + m[(0, 0)] * m[(2, 2)]
        - m[(0, 2)] * m[(2, 0)]
        + m[(1, 1)] * m[(2, 2)]
        - m[(1, 2)] * m[(2, 1)];
    let det = m.determinant();
    // p(s) = s^3 + a s^2 + b s + c
    let (a, b, c) = (-tr, minors, -det);
    let p = |s: C| ((s + a) * s + b) * s + c;
    let dp = |s: C| (C::new(3.0, 0.0) * s + a * 2.0) * s + b;

    let radius = 1.0 + a.norm().max(b.norm()).max(c.norm());
    let seed = C::new(0.4, 0.9);
    let mut z = [seed * radius, seed * seed * radius, seed * seed * seed * radius];
    for _ in 0..500 {
        let mut delta: f64 = 0.0;
        for i in 0..3 {
            let mut denom = C::new(1.0, 0.0);
            for j in 0..3 {
                if i != j {
                    denom *= z[i] - z[j];
                }
            }
            if denom.norm() == 0.0 {
                denom = C::new(f64::EPSILON, 0.0);
            }
            let step = p(z[i]) / denom;
            z[i] -= step;
            delta = delta.max(step.norm());
        }
        if delta <= 1e-16 * radius {
            break;
        }
    }
    for zi in z.iter_mut() {
        for _ in 0..3 {
            let d = dp(*zi);
            if d.norm() == 0.0 {
                break;
            }
            let step = p(*zi) / d;
            if !step.re.is_finite() || !step.im.is_finite() {
                break;
            }
            *zi -= step;
        }
    }
    Vector3::new(z[0], z[1], z[2])
}

/// A null vector of a rank-2 3x3 matrix from the bilinear cross product of
/// its best-conditioned pair of rows.
fn null_vector(a: &Matrix3<C>) -> Option<Vector3<C>> {
    let rows = [a.row(0).transpose(), a.row(1).transpose(), a.row(2).transpose()];
    let cross = |u: &Vector3<C>, w: &Vector3<C>| {
        Vector3::new(u[1] * w[2] - u[2] * w[1], u[2] * w[0] - u[0] * w[2], u[0] * w[1] - u[1] * w[0])
    };
    let candidates = [cross(&rows[0], &rows[1]), cross(&rows[0], &rows[2]), cross(&rows[1], &rows[2])];
    let best = candidates
        .iter()
        .max_by(|x, y| x.norm().partial_cmp(&y.norm()).unwrap_or(std::cmp::Ordering::Equal))?;
    let n = best.norm();
    if !(n > 0.0) {
        return None;
    }
    Some(best.unscale(n))
}
