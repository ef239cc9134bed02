//! Quick oracle cross-checks behind `zenocorr validate`.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64 as C;

use crate::analytics::{overlap_closed, overlap_quadrature, Overlap};
use crate::dynamics::{
    discretized_bath_evolve, lindblad_evolve, propagate_free, superradiant_survival, volterra_integrate,
    DiscretizedBath, Generator3,
};
use crate::error::Result;
use crate::measurement::{coarse_grained_series, EvolutionMatrix};
use crate::model::{build_initial, FullDensity, InitialState, PhysicalParams};

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub value: f64,
    pub tol: f64,
    pub pass: bool,
}

impl Check {
    fn below(name: &'static str, value: f64, tol: f64) -> Self {
        Self { name, value, tol, pass: value < tol }
    }
}

fn preset(d1: f64, d2: f64) -> PhysicalParams {
    PhysicalParams::in_lambda_units(0.1, FRAC_1_SQRT_2, d1, d2).expect("valid preset")
}

fn survival_identity() -> Result<f64> {
    let mut worst: f64 = 0.0;
    for d in [0.0, 2.0, -5.0] {
        let p = preset(d, d);
        let prop = Generator3::new(&p).propagator();
        let s = [p.r1, p.r2(), 0.0];
        for k in 0..=50 {
            let t = 0.2 * k as f64;
            let m = prop.exp(t);
            let mut inner = C::new(0.0, 0.0);
            for i in 0..3 {
                for j in 0..3 {
                    inner += m[(i, j)] * s[i] * s[j];
                }
            }
            worst = worst.max((superradiant_survival(&p, t)? - C::from_polar(1.0, d * t) * inner).norm());
        }
    }
    Ok(worst)
}

fn engines() -> Result<(f64, f64, f64)> {
    let init = build_initial(InitialState::bell(0.0))?;
    let rho = FullDensity::from_amplitudes(&init)?;
    let (mut vol_err, mut lind_err, mut bath_err): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for (d1, d2) in [(2.0, 2.0), (2.0, -2.0)] {
        let p = preset(d1, d2);
        let traj = volterra_integrate(&p, &init, 5.0, 1e-3)?;
        let bath = DiscretizedBath::new(&p.spectrum(), 2000, 40.0)?;
        for t in [1.0, 3.0, 5.0] {
            let free = propagate_free(&p, &init, t)?;
            let v = traj.at(t);
            vol_err = vol_err.max((v.c1 - free.c1).norm()).max((v.c2 - free.c2).norm());
            let out = lindblad_evolve(&p, &rho, t)?;
            let a = free.as_array();
            for i in 0..3 {
                for j in 0..3 {
                    lind_err = lind_err.max((out.matrix()[(i, j)] - a[i] * a[j].conj()).norm());
                }
            }
            let b = discretized_bath_evolve(&p, &bath, &init, t)?;
            bath_err = bath_err.max((b.c1.norm() - free.c1.norm()).abs()).max((b.c2.norm() - free.c2.norm()).abs());
        }
    }
    Ok((vol_err, lind_err, bath_err))
}

fn dual_overlaps() -> Result<f64> {
    let lor = preset(2.0, -2.0).spectrum();
    let mut worst: f64 = 0.0;
    for t in [1e-3, 1e-2, 0.1, 1.0, 10.0, 50.0] {
        for kind in [Overlap::Diag { omega_j: 2.0 }, Overlap::Cross { omega_j: 2.0, omega_i: -2.0 }] {
            let closed = overlap_closed(&lor, kind, t);
            let quad = overlap_quadrature(&lor, kind, t)?;
            worst = worst.max((quad - closed).norm() / closed.norm().max(quad.norm()));
        }
    }
    Ok(worst)
}

fn series_slope() -> Result<f64> {
    let base = EvolutionMatrix::new(C::new(0.95, 0.2), C::new(0.3, -0.1), C::new(-0.2, 0.25), C::new(0.85, -0.3));
    let err = |eps: f64| -> Result<f64> {
        let mut m = base.0;
        m[(0, 1)] *= eps;
        m[(1, 0)] *= eps;
        let e = EvolutionMatrix(m);
        Ok(coarse_grained_series(&e, 12)?.max_abs_diff(&e.power(12)))
    };
    Ok((err(1e-2)? / err(1e-3)?).log10())
}

/// Runs every check; an engine error is reported as an `Err`.
pub fn run_checks() -> Result<Vec<Check>> {
    let (vol, lind, bath) = engines()?;
    let slope = series_slope()?;
    Ok(vec![
        Check::below("superradiant survival vs 3x3 propagator", survival_identity()?, 1e-10),
        Check::below("memory-kernel solver vs propagator", vol, 1e-6),
        Check::below("master equation vs propagator", lind, 1e-6),
        Check::below("discretized bath vs propagator", bath, 1e-3),
        Check::below("overlap quadrature vs residue", dual_overlaps()?, 1e-7),
        Check { name: "series error order", value: slope, tol: 2.7, pass: slope >= 2.7 },
    ])
}
