//! Direct solver for the memory-kernel equations of the qubit amplitudes.
//!
//! In the frame rotating with each qubit,
//!
//! ```text
//! dc_j/dt = -sum_i r_j r_i R^2 e^{i (delta_j - delta_i) t}
//!           * int_0^t e^{(-lambda + i delta_i)(t - s)} c_i(s) ds
//! ```
//!
//! The memory integral is discretized with the trapezoidal rule over the
//! full history and the ODE with the implicit trapezoidal rule, giving a
//! second-order scheme. No use is made of the exponential form of the
//! kernel beyond tabulating it, so the solver is independent of the
//! pseudomode propagator.

use nalgebra::{Matrix2, Vector2};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{AmplitudeState, PhysicalParams};

type C = Complex64;

/// Maximum growth of `|c1|^2 + |c2|^2` tolerated before aborting.
const GROWTH_LIMIT: f64 = 1e-3;

/// Solution on a uniform grid `t_k = k * dt`. Amplitudes are returned in the
/// cavity frame so they compare directly with the pseudomode propagator; the
/// `b` slot holds `sqrt(1 - |c1|^2 - |c2|^2)`, the magnitude of everything
/// not in the qubits.
#[derive(Debug, Clone)]
pub struct VolterraTrajectory {
    pub dt: f64,
    pub states: Vec<AmplitudeState>,
}

impl VolterraTrajectory {
    pub fn time(&self, k: usize) -> f64 {
        k as f64 * self.dt
    }

    pub fn last(&self) -> &AmplitudeState {
        self.states.last().expect("trajectory holds at least the initial state")
    }

    /// State at the grid point nearest to `t`.
    pub fn at(&self, t: f64) -> &AmplitudeState {
        let k = ((t / self.dt).round().max(0.0) as usize).min(self.states.len() - 1);
        &self.states[k]
    }
}

/// Integrates from `init` (its `b` component must vanish) up to `t_max` with
/// step at most `dt`. The step is shrunk so that `t_max` is a grid point.
pub fn volterra_integrate(
    params: &PhysicalParams,
    init: &AmplitudeState,
    t_max: f64,
    dt: f64,
) -> Result<VolterraTrajectory> {
    let lambda = params.lambda;
    if !(dt > 0.0 && dt <= 1.0 / (100.0 * lambda)) {
        return Err(Error::InvalidParameter(format!(
            "memory solver needs 0 < dt <= 1/(100 lambda) = {}, got {dt}",
            1.0 / (100.0 * lambda)
        )));
    }
    if !(t_max >= 0.0 && t_max.is_finite()) {
        return Err(Error::InvalidParameter(format!("t_max must be >= 0, got {t_max}")));
    }
    if init.b.norm() > 1e-12 {
        return Err(Error::InvalidParameter("memory solver starts with an empty reservoir".into()));
    }

    let n = ((t_max / dt).ceil() as usize).max(1);
    let h = if t_max > 0.0 { t_max / n as f64 } else { dt };
    let n = if t_max > 0.0 { n } else { 0 };

    let delta = [params.delta1, params.delta2];
    let r = [params.r1, params.r2()];
    let rabi_sq = params.rabi_vacuum * params.rabi_vacuum;
    let kappa = |j: usize, i: usize| r[j] * r[i] * rabi_sq;

    // lag[i][k] = exp((-lambda + i delta_i) k h)
    let lag: [Vec<C>; 2] = [0, 1].map(|i| {
        let step = C::new(-lambda * h, delta[i] * h).exp();
        let mut v = Vec::with_capacity(n + 1);
        let mut cur = C::new(1.0, 0.0);
        for k in 0..=n {
            // Recompute periodically to keep the table from drifting.
            if k % 256 == 0 {
                cur = C::new(-lambda * h * k as f64, delta[i] * h * k as f64).exp();
            }
            v.push(cur);
            cur *= step;
        }
        v
    });

    let coupling = |t: f64| -> Matrix2<C> {
        Matrix2::from_fn(|j, i| C::from_polar(kappa(j, i), (delta[j] - delta[i]) * t))
    };

    // History in the qubit frame.
    let mut hist: [Vec<C>; 2] = [Vec::with_capacity(n + 1), Vec::with_capacity(n + 1)];
    hist[0].push(init.c1);
    hist[1].push(init.c2);
    let start = init.c1.norm_sqr() + init.c2.norm_sqr();

    // Trapezoid memory sum without the endpoint term at step m.
    let memory = |hist: &[Vec<C>; 2], m: usize| -> Vector2<C> {
        Vector2::from_fn(|i, _| {
            let l = &lag[i];
            let c = &hist[i];
            let mut acc = l[m] * c[0] * 0.5;
            for k in 1..m {
                acc += l[m - k] * c[k];
            }
            acc * h
        })
    };

    let mut f_prev = Vector2::zeros();
    for m in 0..n {
        let t_next = (m + 1) as f64 * h;
        let k_next = coupling(t_next);
        let a_next = memory(&hist, m + 1);
        let c_now = Vector2::new(hist[0][m], hist[1][m]);
        let lhs = Matrix2::identity() + k_next * C::new(h * h / 4.0, 0.0);
        let half = C::new(h / 2.0, 0.0);
        let rhs = c_now + (f_prev - k_next * a_next) * half;
        let c_next = lhs
            .lu()
            .solve(&rhs)
            .ok_or_else(|| Error::Instability { t: t_next, reason: "singular implicit step".into() })?;
        f_prev = -(k_next * (a_next + c_next * half));

        let norm = c_next.norm_squared();
        if !norm.is_finite() || norm > start + GROWTH_LIMIT {
            return Err(Error::Instability {
                t: t_next,
                reason: format!("qubit population grew from {start:.6} to {norm:.6}"),
            });
        }
        hist[0].push(c_next[0]);
        hist[1].push(c_next[1]);
    }

    let states = (0..=n)
        .map(|k| {
            let t = k as f64 * h;
            let c1 = hist[0][k] * C::new(0.0, -delta[0] * t).exp();
            let c2 = hist[1][k] * C::new(0.0, -delta[1] * t).exp();
            let rest = (1.0 - c1.norm_sqr() - c2.norm_sqr()).max(0.0).sqrt();
            AmplitudeState::new(c1, c2, C::new(rest, 0.0))
        })
        .collect();
    Ok(VolterraTrajectory { dt: h, states })
}
