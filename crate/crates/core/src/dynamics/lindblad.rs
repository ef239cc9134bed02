//! Four-level dissipative channel: two qubit excitations, one pseudomode
//! photon and the common ground state, with photon loss `e3 -> e4` at rate
//! `2 lambda`.
//!
//! The master equation is linear and autonomous, so one classical RK4 step
//! is the degree-4 Taylor polynomial of `h L` applied to `vec(rho)`. The step
//! map is built once as a 16x16 matrix and reused.

use nalgebra::{Matrix4, SMatrix, SVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{FullDensity, PhysicalParams};

type C = Complex64;
pub type Superop = SMatrix<C, 16, 16>;
type VecRho = SVector<C, 16>;

/// Step-size policy. The base step is
/// `min(1/(50 lambda), 1/(50 (Omega_R + lambda)), t/20)`, divided by `refine`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepConfig {
    pub refine: f64,
}

impl Default for StepConfig {
    fn default() -> Self {
        Self { refine: 4.0 }
    }
}

impl StepConfig {
    /// Largest allowed step for an interval of length `t > 0`.
    pub fn max_step(&self, params: &PhysicalParams, t: f64) -> Result<f64> {
        let lambda = params.lambda;
        let base = (1.0 / (50.0 * lambda))
            .min(1.0 / (50.0 * (params.generalized_rabi() + lambda)))
            .min(t / 20.0);
        let dt = base / self.refine;
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "step configuration gives dt = {dt} (refine = {}, t = {t})",
                self.refine
            )));
        }
        Ok(dt)
    }
}

fn vec_of(m: &Matrix4<C>) -> VecRho {
    VecRho::from_iterator(m.iter().cloned())
}

fn mat_of(v: &VecRho) -> Matrix4<C> {
    Matrix4::from_iterator(v.iter().cloned())
}

/// Liouvillian of the channel and cached interval maps.
#[derive(Debug, Clone)]
pub struct LindbladPropagator {
    params: PhysicalParams,
    liouvillian: Superop,
}

impl LindbladPropagator {
    pub fn new(params: &PhysicalParams) -> Self {
        let (p, g, e) = (FullDensity::PHOTON, FullDensity::GROUND, 0);
        let mut h = Matrix4::<C>::zeros();
        h[(0, 0)] = C::new(params.delta1, 0.0);
        h[(1, 1)] = C::new(params.delta2, 0.0);
        let g1 = C::new(params.coupling(crate::model::Qubit::One), 0.0);
        let g2 = C::new(params.coupling(crate::model::Qubit::Two), 0.0);
        h[(e, p)] = g1;
        h[(p, e)] = g1;
        h[(1, p)] = g2;
        h[(p, 1)] = g2;
        let rate = 2.0 * params.lambda;

        let apply = |rho: &Matrix4<C>| -> Matrix4<C> {
            let mut out = (h * rho - rho * h) * C::new(0.0, -1.0);
            // 2 lambda (L rho L^dag - {L^dag L, rho}/2), L = |g><p|
            out[(g, g)] += rho[(p, p)] * rate;
            for k in 0..4 {
                out[(p, k)] -= rho[(p, k)] * (rate / 2.0);
                out[(k, p)] -= rho[(k, p)] * (rate / 2.0);
            }
            out
        };

        let mut liouvillian = Superop::zeros();
        for col in 0..16 {
            let mut basis = VecRho::zeros();
            basis[col] = C::new(1.0, 0.0);
            let image = vec_of(&apply(&mat_of(&basis)));
            liouvillian.set_column(col, &image);
        }
        Self { params: *params, liouvillian }
    }

    pub fn liouvillian(&self) -> &Superop {
        &self.liouvillian
    }

    fn step_map(&self, h: f64) -> Superop {
        let a = self.liouvillian.scale(h);
        let mut term = Superop::identity();
        let mut sum = Superop::identity();
        for k in 1..=4 {
            term = term * a / C::new(k as f64, 0.0);
            sum += term;
        }
        sum
    }

    /// Linear map taking `vec(rho(0))` to `vec(rho(t))` with uniform RK4 steps.
    pub fn interval_map(&self, t: f64, cfg: StepConfig) -> Result<ChannelMap> {
        if !(t >= 0.0 && t.is_finite()) {
            return Err(Error::InvalidParameter(format!("duration must be >= 0, got {t}")));
        }
        if t == 0.0 {
            cfg.max_step(&self.params, 1.0)?;
            return Ok(ChannelMap { map: Superop::identity() });
        }
        let dt = cfg.max_step(&self.params, t)?;
        let n = (t / dt).ceil().max(1.0) as u64;
        let step = self.step_map(t / n as f64);
        // Binary powering; the step count is fixed so the result does not
        // depend on how the interval is later reused.
        let mut acc = Superop::identity();
        let mut base = step;
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                acc = base * acc;
            }
            base = base * base;
            e >>= 1;
        }
        Ok(ChannelMap { map: acc })
    }

    pub fn evolve(&self, rho: &FullDensity, t: f64, cfg: StepConfig) -> Result<FullDensity> {
        Ok(self.interval_map(t, cfg)?.apply(rho))
    }
}

/// A precomputed linear map on density matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelMap {
    map: Superop,
}

impl ChannelMap {
    pub fn apply(&self, rho: &FullDensity) -> FullDensity {
        let out = mat_of(&(self.map * vec_of(rho.matrix())));
        // Restore exact Hermiticity lost to rounding.
        FullDensity((out + out.adjoint()).scale(0.5))
    }
}

/// Evolves `rho` for time `t` with the default step policy.
pub fn lindblad_evolve(params: &PhysicalParams, rho: &FullDensity, t: f64) -> Result<FullDensity> {
    lindblad_evolve_with(params, rho, t, StepConfig::default())
}

pub fn lindblad_evolve_with(
    params: &PhysicalParams,
    rho: &FullDensity,
    t: f64,
    cfg: StepConfig,
) -> Result<FullDensity> {
    rho.validate(crate::model::STATE_TOL)?;
    LindbladPropagator::new(params).evolve(rho, t, cfg)
}
