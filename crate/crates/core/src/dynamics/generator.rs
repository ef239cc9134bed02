//! Pseudomode generator and its exact exponential.

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{expm_pade, Eigen3};
use crate::model::{AmplitudeState, PhysicalParams};

type C = Complex64;

/// Linear generator of `(c1, c2, b)` in the frame rotating at the cavity
/// frequency. Lossy through the `-lambda b` term only.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Generator3 {
    m: Matrix3<C>,
    lambda: f64,
}

impl Generator3 {
    pub fn new(params: &PhysicalParams) -> Self {
        Self::from_raw(params.lambda, params.rabi_vacuum, params.r1, params.delta1, params.delta2)
    }

    /// Builds the generator without validation; `lambda = 0` gives the
    /// lossless Jaynes-Cummings limit.
    pub fn from_raw(lambda: f64, rabi_vacuum: f64, r1: f64, delta1: f64, delta2: f64) -> Self {
        let r2 = (1.0 - r1 * r1).max(0.0).sqrt();
        let mi = C::new(0.0, -1.0);
        let g1 = mi * (r1 * rabi_vacuum);
        let g2 = mi * (r2 * rabi_vacuum);
        let z = C::new(0.0, 0.0);
        let m = Matrix3::new(
            mi * delta1, z, g1,
            z, mi * delta2, g2,
            g1, g2, C::new(-lambda, 0.0),
        );
        Self { m, lambda }
    }

    pub fn matrix(&self) -> &Matrix3<C> {
        &self.m
    }

    pub fn propagator(&self) -> FreePropagator {
        FreePropagator::new(self)
    }
}

/// `t -> exp(M t)` with the eigendecomposition computed once.
#[derive(Debug, Clone)]
pub struct FreePropagator {
    m: Matrix3<C>,
    eigen: Option<Eigen3>,
}

impl FreePropagator {
    pub fn new(g: &Generator3) -> Self {
        let norm = g.m.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let scale = g.lambda.max(norm).max(f64::MIN_POSITIVE);
        let eigen = Eigen3::new(&g.m, scale);
        if eigen.is_none() {
            log::debug!("near-degenerate generator spectrum, using scaling-and-squaring");
        }
        Self { m: g.m, eigen }
    }

    pub fn uses_eigendecomposition(&self) -> bool {
        self.eigen.is_some()
    }

    pub fn exp(&self, t: f64) -> Matrix3<C> {
        match &self.eigen {
            Some(e) => e.exp(t),
            None => expm_pade(&self.m.scale(t)),
        }
    }

    pub fn apply(&self, a: &AmplitudeState, t: f64) -> AmplitudeState {
        let v = self.exp(t) * Vector3::new(a.c1, a.c2, a.b);
        AmplitudeState::new(v[0], v[1], v[2])
    }
}

/// Free evolution of the amplitudes for a duration `t >= 0`.
pub fn propagate_free(params: &PhysicalParams, a: &AmplitudeState, t: f64) -> Result<AmplitudeState> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::InvalidParameter(format!("duration must be >= 0, got {t}")));
    }
    Ok(Generator3::new(params).propagator().apply(a, t))
}

/// Survival amplitude of the superradiant state `r1|10> + r2|01>` over an
/// interval `t`, in the frame rotating with the qubits. Requires equal
/// detunings.
pub fn superradiant_survival(params: &PhysicalParams, t: f64) -> Result<C> {
    if !params.equal_detunings() {
        return Err(Error::WrongRegime(format!(
            "superradiant survival needs delta1 = delta2, got {} and {}",
            params.delta1, params.delta2
        )));
    }
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::InvalidParameter(format!("duration must be >= 0, got {t}")));
    }
    let lambda = params.lambda;
    let delta = params.delta1;
    let rabi_sq = 4.0 * params.rabi_vacuum * params.rabi_vacuum + delta * delta;
    let omega = C::new(lambda * lambda - rabi_sq, -2.0 * delta * lambda).sqrt();
    let a = C::new(lambda, -delta);
    let x = omega * (t / 2.0);
    // sinh(x)/omega written as (t/2) sinh(x)/x so that omega -> 0 is regular.
    let sinhc = if x.norm() < 1e-3 {
        let x2 = x * x;
        C::new(1.0, 0.0) + x2 / 6.0 + x2 * x2 / 120.0
    } else {
        x.sinh() / x
    };
    Ok((-a * (t / 2.0)).exp() * (x.cosh() + a * (t / 2.0) * sinhc))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_initial, InitialState};
    use std::f64::consts::FRAC_1_SQRT_2;

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    fn params(r: f64, r1: f64, d1: f64, d2: f64) -> PhysicalParams {
        PhysicalParams::in_lambda_units(r, r1, d1, d2).unwrap()
    }

    #[test]
    fn decoupled_evolution_is_pure_phase() {
        let p = PhysicalParams::new(1.5, 0.0, 0.3, 0.7, -1.1).unwrap();
        let a = AmplitudeState::new(c(0.5, 0.1), c(-0.2, 0.4), c(0.3, 0.3));
        let t = 2.3;
        let out = propagate_free(&p, &a, t).unwrap();
        assert!((out.c1 - a.c1 * c(0.0, -0.7 * t).exp()).norm() < 1e-13);
        assert!((out.c2 - a.c2 * c(0.0, 1.1 * t).exp()).norm() < 1e-13);
        assert!((out.b - a.b * (-1.5 * t).exp()).norm() < 1e-13);
    }

    #[test]
    fn lossless_vacuum_rabi() {
        let g = Generator3::from_raw(0.0, 0.8, 1.0, 0.0, 0.0);
        let prop = g.propagator();
        let a = AmplitudeState::new(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0));
        for &t in &[0.0, 0.5, 1.7, 4.0] {
            let out = prop.apply(&a, t);
            assert!((out.c1 - c((0.8 * t).cos(), 0.0)).norm() < 1e-12, "t = {t}");
            assert!((out.b - c(0.0, -(0.8 * t).sin())).norm() < 1e-12);
        }
    }

    #[test]
    fn negative_time_rejected() {
        let p = params(0.1, 0.5, 0.0, 0.0);
        let a = build_initial(InitialState::bell(0.0)).unwrap();
        assert!(propagate_free(&p, &a, -1.0).is_err());
    }

    #[test]
    fn subradiant_state_is_stationary_up_to_phase() {
        let p = params(0.3, FRAC_1_SQRT_2, 2.0, 2.0);
        let a = build_initial(InitialState::bell(std::f64::consts::PI)).unwrap();
        for &t in &[0.5, 3.0, 9.0] {
            let out = propagate_free(&p, &a, t).unwrap();
            let ph = c(0.0, -2.0 * t).exp();
            assert!((out.c1 - a.c1 * ph).norm() < 1e-10);
            assert!((out.c2 - a.c2 * ph).norm() < 1e-10);
            assert!(out.b.norm() < 1e-10);
        }
    }

    #[test]
    fn survival_decoupled_and_lossless_limits() {
        let p = params(0.0, 0.6, 0.0, 0.0);
        for &t in &[0.0, 1.0, 7.0] {
            assert!((superradiant_survival(&p, t).unwrap() - c(1.0, 0.0)).norm() < 1e-14);
        }
        // Vanishing width: cos(Omega_R T / 2) with Omega_R = 2 R.
        let p = PhysicalParams::new(1e-12, 0.9, 0.6, 0.0, 0.0).unwrap();
        for &t in &[0.3, 2.0, 5.0] {
            let e = superradiant_survival(&p, t).unwrap();
            assert!((e - c((0.9 * t).cos(), 0.0)).norm() < 1e-9, "t = {t}");
        }
    }

    #[test]
    fn survival_at_critical_damping_is_regular() {
        // lambda^2 = 4 R^2 with delta = 0 makes the square root vanish.
        let p = params(0.5, 0.6, 0.0, 0.0);
        for &t in &[0.0, 0.1, 2.0] {
            let e = superradiant_survival(&p, t).unwrap();
            let expect = (-t / 2.0f64).exp() * (1.0 + t / 2.0);
            assert!((e - c(expect, 0.0)).norm() < 1e-14);
        }
    }

    #[test]
    fn survival_matches_propagator_after_frame_change() {
        for &(r, r1, d) in &[(0.1, FRAC_1_SQRT_2, 2.0), (1.0, 0.3, -5.0), (0.5, 0.9, 0.0)] {
            let p = params(r, r1, d, d);
            let prop = Generator3::new(&p).propagator();
            let s = Vector3::new(c(p.r1, 0.0), c(p.r2(), 0.0), c(0.0, 0.0));
            for k in 0..=40 {
                let t = 0.25 * k as f64;
                let elem = s.dot(&(prop.exp(t) * s));
                let expect = c(0.0, d * t).exp() * elem;
                let got = superradiant_survival(&p, t).unwrap();
                assert!((got - expect).norm() < 1e-10, "r={r} d={d} t={t}");
            }
        }
    }

    #[test]
    fn survival_rejects_unequal_detunings() {
        let p = params(0.1, 0.5, 2.0, -2.0);
        assert!(matches!(superradiant_survival(&p, 1.0), Err(Error::WrongRegime(_))));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn excitation_never_grows(
                r in 0.0f64..2.0, r1 in 0.0f64..=1.0, d1 in -5.0f64..5.0, d2 in -5.0f64..5.0,
                s in -1.0f64..=1.0, phi in 0.0f64..6.0, t1 in 0.0f64..4.0, dt in 0.0f64..4.0,
            ) {
                let p = params(r, r1, d1, d2);
                let prop = Generator3::new(&p).propagator();
                let a = build_initial(InitialState::new(s, phi).unwrap()).unwrap();
                let n1 = prop.apply(&a, t1).norm_sqr();
                let n2 = prop.apply(&a, t1 + dt).norm_sqr();
                prop_assert!(n1 <= 1.0 + 1e-10);
                prop_assert!(n2 <= n1 + 1e-10);
            }

            #[test]
            fn equal_couplings_give_equal_moduli(
                r in 0.01f64..2.0, d in -5.0f64..5.0, sign in prop::bool::ANY, t in 0.0f64..10.0,
            ) {
                let d2 = if sign { d } else { -d };
                let p = params(r, FRAC_1_SQRT_2, d, d2);
                let out = propagate_free(&p, &build_initial(InitialState::bell(0.0)).unwrap(), t).unwrap();
                prop_assert!((out.c1.norm() - out.c2.norm()).abs() < 1e-9);
            }
        }
    }
}
