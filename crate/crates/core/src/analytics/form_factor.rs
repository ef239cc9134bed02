//! Measurement form factors
//!
//! ```text
//! F_jj(w, T) = int_0^T dt int_0^t dt' e^{i (w_j - w) t'}
//! F_ji(w, T) = int_0^T dt e^{i (w_j - w_i) t} int_0^t dt' e^{i (w_i - w) t'}
//! ```
//!
//! evaluated through the moments `m_n(x) = int_0^T t^n e^{i x t} dt`, which
//! stay accurate through every removable singularity. Frequencies may be
//! complex so that the functions can be continued to the Lorentzian pole.

use num_complex::Complex64;

type C = Complex64;

/// Below this value of `|w_i - w| T` the cross factor is summed as a series.
const CROSS_SERIES_SWITCH: f64 = 0.5;

/// `M_n(z) = int_0^1 u^n e^{z u} du` for `n = 0..=nmax`.
pub fn unit_moments(z: C, nmax: usize) -> Vec<C> {
    let r = z.norm();
    let mut out = vec![C::new(0.0, 0.0); nmax + 1];
    if r <= 1.0 {
        for (n, slot) in out.iter_mut().enumerate() {
            // sum_k z^k / (k! (n + k + 1))
            let mut term = C::new(1.0, 0.0);
            let mut sum = term / (n as f64 + 1.0);
            for k in 1..60 {
                term *= z / k as f64;
                let add = term / (n + k + 1) as f64;
                sum += add;
                if add.norm() < 1e-18 * sum.norm() {
                    break;
                }
            }
            *slot = sum;
        }
        return out;
    }
    let ez = z.exp();
    // Upward recursion M_n = (e^z - n M_{n-1}) / z is stable while n <= |z|.
    let up_to = (r.floor() as usize).min(nmax);
    out[0] = (ez - 1.0) / z;
    for n in 1..=up_to {
        out[n] = (ez - out[n - 1] * n as f64) / z;
    }
    if up_to < nmax {
        // Downward recursion M_{n-1} = (e^z - z M_n) / n from far above.
        let start = nmax + 60 + 2 * r.ceil() as usize;
        let mut m = C::new(0.0, 0.0);
        for n in (up_to + 2..=start).rev() {
            m = (ez - z * m) / n as f64;
            if n - 1 <= nmax {
                out[n - 1] = m;
            }
        }
    }
    out
}

/// `m_n(x, T)` for `n = 0..=nmax`.
pub fn moments(x: C, t: f64, nmax: usize) -> Vec<C> {
    let scale: Vec<f64> = (0..=nmax).map(|n| t.powi(n as i32 + 1)).collect();
    unit_moments(C::new(0.0, 1.0) * x * t, nmax)
        .into_iter()
        .zip(scale)
        .map(|(m, s)| m * s)
        .collect()
}

/// Diagonal form factor at a (possibly complex) frequency `omega`.
pub fn form_factor_diag_c(omega: C, omega_j: f64, t: f64) -> C {
    let v = C::new(omega_j, 0.0) - omega;
    let m = moments(v, t, 1);
    m[0] * t - m[1]
}

/// Cross form factor at a (possibly complex) frequency `omega`.
pub fn form_factor_cross_c(omega: C, omega_j: f64, omega_i: f64, t: f64) -> C {
    let vi = C::new(omega_i, 0.0) - omega;
    let vj = C::new(omega_j, 0.0) - omega;
    let gap = C::new(omega_j - omega_i, 0.0);
    let iv = C::new(0.0, 1.0) * vi;
    if vi.norm() * t >= CROSS_SERIES_SWITCH {
        (moments(vj, t, 0)[0] - moments(gap, t, 0)[0]) / iv
    } else {
        // (e^{i v_i t} - 1) / (i v_i) = sum_{n>=1} (i v_i)^{n-1} t^n / n!
        let nmax = 40;
        let m = moments(gap, t, nmax);
        let mut sum = C::new(0.0, 0.0);
        let mut coef = C::new(1.0, 0.0);
        for (n, mn) in m.iter().enumerate().skip(1) {
            coef /= n as f64;
            let add = coef * mn;
            sum += add;
            if add.norm() < 1e-18 * sum.norm() {
                break;
            }
            coef *= iv;
        }
        sum
    }
}

pub fn form_factor_diag(omega: f64, omega_j: f64, t: f64) -> C {
    form_factor_diag_c(C::new(omega, 0.0), omega_j, t)
}

pub fn form_factor_cross(omega: f64, omega_j: f64, omega_i: f64, t: f64) -> C {
    form_factor_cross_c(C::new(omega, 0.0), omega_j, omega_i, t)
}

/// Both form factors at one frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FormFactorEval {
    pub omega: f64,
    pub omega_j: f64,
    pub omega_i: f64,
    pub t: f64,
    pub diag: C,
    pub cross: C,
}

impl FormFactorEval {
    pub fn new(omega: f64, omega_j: f64, omega_i: f64, t: f64) -> Self {
        Self {
            omega,
            omega_j,
            omega_i,
            t,
            diag: form_factor_diag(omega, omega_j, t),
            cross: form_factor_cross(omega, omega_j, omega_i, t),
        }
    }
}
