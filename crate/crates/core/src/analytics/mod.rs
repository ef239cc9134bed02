//! Perturbative description of frequent measurements: overlap integrals of
//! the form factors with the reservoir spectrum, effective decay rates and
//! phases, and the resulting survival and concurrence estimates.

pub mod form_factor;

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measurement::EvolutionMatrix;
use crate::model::{InitialState, LorentzianSpectrum, PhysicalParams, Qubit};
use crate::quadrature::{integrate, QuadConfig};

pub use form_factor::{form_factor_cross, form_factor_diag, FormFactorEval};
use form_factor::{form_factor_cross_c, form_factor_diag_c};

type C = Complex64;

/// Relative tolerance of the adaptive quadrature.
pub const QUAD_REL_TOL: f64 = 1e-8;
/// Relative agreement required between quadrature and the residue formula.
pub const DUAL_REL_TOL: f64 = 1e-7;

/// Which form factor an overlap integral uses.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Overlap {
    /// `F_jj` for a qubit at detuning `omega_j`.
    Diag { omega_j: f64 },
    /// `F_ji` for qubits at detunings `omega_j` and `omega_i`.
    Cross { omega_j: f64, omega_i: f64 },
}

impl Overlap {
    fn eval(&self, omega: C, t: f64) -> C {
        match *self {
            Overlap::Diag { omega_j } => form_factor_diag_c(omega, omega_j, t),
            Overlap::Cross { omega_j, omega_i } => form_factor_cross_c(omega, omega_j, omega_i, t),
        }
    }

    fn centers(&self) -> Vec<f64> {
        match *self {
            Overlap::Diag { omega_j } => vec![omega_j],
            Overlap::Cross { omega_j, omega_i } => vec![omega_j, omega_i],
        }
    }

    fn label(&self) -> &'static str {
        match self {
            Overlap::Diag { .. } => "diagonal overlap",
            Overlap::Cross { .. } => "cross overlap",
        }
    }
}

fn check_interval(t: f64) -> Result<()> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::InvalidParameter(format!("interval must be > 0, got {t}")));
    }
    Ok(())
}

/// `int J(w) F(w) dw` by closing the contour around the lower Lorentzian
/// pole: the form factors are entire and decay in the lower half plane, so
/// the integral is `W^2 F(-i lambda)`.
pub fn overlap_closed(spectrum: &LorentzianSpectrum, kind: Overlap, t: f64) -> C {
    kind.eval(C::new(0.0, -spectrum.lambda), t) * (spectrum.w * spectrum.w)
}

/// `int J(w) F(w) dw` by adaptive quadrature: Gauss-Kronrod on a central
/// window `|w| <= max(50 lambda, 50/T) + max |omega|` with break points at
/// the peaks, and the two tails mapped to finite intervals by
/// `w = lambda tan(theta)`, under which `J dw = W^2/pi d theta`.
pub fn overlap_quadrature(spectrum: &LorentzianSpectrum, kind: Overlap, t: f64) -> Result<C> {
    check_interval(t)?;
    let lambda = spectrum.lambda;
    let w2 = spectrum.w * spectrum.w;
    if w2 == 0.0 {
        return Ok(C::new(0.0, 0.0));
    }
    let centers = kind.centers();
    let reach = centers.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    let half = (50.0 * lambda).max(50.0 / t) + reach;

    let mut points = vec![-half, 0.0, half];
    for &c in &centers {
        for off in [-10.0 / t, -1.0 / t, 0.0, 1.0 / t, 10.0 / t] {
            let p = c + off;
            if p > -half && p < half {
                points.push(p);
            }
        }
    }
    points.sort_by(f64::total_cmp);
    points.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * half);

    let cfg = QuadConfig { rel_tol: QUAD_REL_TOL, ..Default::default() };
    let central = integrate(|w| kind.eval(C::new(w, 0.0), t) * spectrum.density(w), &points, cfg)?;

    let tail_cfg = QuadConfig { rel_tol: QUAD_REL_TOL, abs_tol: 0.1 * QUAD_REL_TOL * central.value.norm(), ..cfg };
    let theta0 = (half / lambda).atan();
    let tail = |sign: f64| {
        integrate(
            |th| kind.eval(C::new(sign * lambda * th.tan(), 0.0), t),
            &[theta0, 0.5 * (theta0 + FRAC_PI_2), FRAC_PI_2],
            tail_cfg,
        )
    };
    let tails = (tail(1.0)?.value + tail(-1.0)?.value) * (w2 / std::f64::consts::PI);
    Ok(central.value + tails)
}

/// Overlap integral evaluated both ways; fails if the two disagree.
pub fn overlap_integral(spectrum: &LorentzianSpectrum, kind: Overlap, t: f64) -> Result<C> {
    let quad = overlap_quadrature(spectrum, kind, t)?;
    let closed = overlap_closed(spectrum, kind, t);
    let scale = closed.norm().max(quad.norm());
    if (quad - closed).norm() > DUAL_REL_TOL * scale {
        return Err(Error::DualMismatch { what: kind.label(), quadrature: quad.re, closed: closed.re });
    }
    Ok(closed)
}

/// Effective decay rate `gamma_jj` and phase rate `phi_jj` under
/// measurements every `T`, including the `r_j^2` weight of the qubit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZenoRates {
    pub gamma: f64,
    pub phi: f64,
}

impl ZenoRates {
    fn from_overlap(weight: f64, overlap: C, t: f64) -> Self {
        let v = overlap * (weight / t);
        Self { gamma: v.re, phi: v.im }
    }
}

fn diag_kind(params: &PhysicalParams, j: Qubit) -> Overlap {
    Overlap::Diag { omega_j: params.detuning(j) }
}

pub fn zeno_rates(spectrum: &LorentzianSpectrum, params: &PhysicalParams, j: Qubit, t: f64) -> Result<ZenoRates> {
    check_interval(t)?;
    let r = params.relative_coupling(j);
    Ok(ZenoRates::from_overlap(r * r, overlap_integral(spectrum, diag_kind(params, j), t)?, t))
}

/// Residue-formula rates only, for dense scans.
pub fn zeno_rates_closed(spectrum: &LorentzianSpectrum, params: &PhysicalParams, j: Qubit, t: f64) -> Result<ZenoRates> {
    check_interval(t)?;
    let r = params.relative_coupling(j);
    Ok(ZenoRates::from_overlap(r * r, overlap_closed(spectrum, diag_kind(params, j), t), t))
}

/// Decay rate without measurements, `pi r_j^2 J(delta_j)`.
pub fn markov_rate(spectrum: &LorentzianSpectrum, params: &PhysicalParams, j: Qubit) -> f64 {
    let r = params.relative_coupling(j);
    std::f64::consts::PI * r * r * spectrum.density(params.detuning(j))
}

/// First-order interval map in the frame rotating with each qubit:
/// `E_jj = exp(-r_j^2 int J F_jj)`, `E_ji = -r_j r_i int J F_ji`.
pub fn perturbative_e(spectrum: &LorentzianSpectrum, params: &PhysicalParams, t: f64) -> Result<EvolutionMatrix> {
    check_interval(t)?;
    if params.lambda * t > 1.0 {
        log::warn!("perturbative interval map used outside lambda T <= 1 (lambda T = {})", params.lambda * t);
    }
    let (r1, r2) = (params.r1, params.r2());
    let (d1, d2) = (params.delta1, params.delta2);
    let diag = |r: f64, d: f64| -> Result<C> {
        if r == 0.0 {
            return Ok(C::new(1.0, 0.0));
        }
        Ok((-overlap_integral(spectrum, Overlap::Diag { omega_j: d }, t)? * (r * r)).exp())
    };
    let cross = |wj: f64, wi: f64| -> Result<C> {
        if r1 * r2 == 0.0 {
            return Ok(C::new(0.0, 0.0));
        }
        Ok(-overlap_integral(spectrum, Overlap::Cross { omega_j: wj, omega_i: wi }, t)? * (r1 * r2))
    };
    Ok(EvolutionMatrix::new(diag(r1, d1)?, cross(d1, d2)?, cross(d2, d1)?, diag(r2, d2)?))
}

/// Transfer kernel accumulated over a time `t` of measurements. For
/// distinct qubit frequencies it is `(e^{x t} - 1)/x` with
/// `x = gamma_j - gamma_i + i (phi_j - phi_i)`; for equal frequencies it is
/// `t / E_jj`.
pub fn epsilon_transfer(rates_j: ZenoRates, rates_i: ZenoRates, e_jj: C, t: f64, equal_freq: bool) -> C {
    if equal_freq {
        return C::new(t, 0.0) / e_jj;
    }
    let x = C::new(rates_j.gamma - rates_i.gamma, rates_j.phi - rates_i.phi);
    let xt = x * t;
    if xt.norm() < 0.5 {
        // t * sum_k (x t)^k / (k + 1)!
        let mut term = C::new(1.0, 0.0);
        let mut sum = term;
        for k in 1..30 {
            term *= xt / (k + 1) as f64;
            sum += term;
            if term.norm() < 1e-18 * sum.norm() {
                break;
            }
        }
        sum * t
    } else {
        (xt.exp() - 1.0) / x
    }
}

/// Whole number of intervals in `t`; a non-integer ratio is rounded.
fn interval_count(t_interval: f64, t: f64) -> Result<u64> {
    check_interval(t_interval)?;
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::InvalidParameter(format!("time must be >= 0, got {t}")));
    }
    let ratio = t / t_interval;
    let n = ratio.round();
    if (ratio - n).abs() > 1e-9 * ratio.max(1.0) {
        log::warn!("t = {t} is not a multiple of T = {t_interval}; using N = {n}");
    }
    Ok(n as u64)
}

/// Everything the approximations need at one measurement interval.
#[derive(Debug, Clone, Copy)]
pub struct ZenoLayer {
    pub e: EvolutionMatrix,
    pub rates: [ZenoRates; 2],
    pub interval: f64,
    pub equal_freq: bool,
}

impl ZenoLayer {
    pub fn new(params: &PhysicalParams, t_interval: f64) -> Result<Self> {
        let spectrum = params.spectrum();
        Ok(Self {
            e: perturbative_e(&spectrum, params, t_interval)?,
            rates: [
                zeno_rates(&spectrum, params, Qubit::One, t_interval)?,
                zeno_rates(&spectrum, params, Qubit::Two, t_interval)?,
            ],
            interval: t_interval,
            equal_freq: params.equal_detunings(),
        })
    }

    /// `(|c1|, |c2|)` after measurements up to time `t`.
    pub fn survival_moduli(&self, init: InitialState, t: f64) -> Result<(f64, f64)> {
        let t = interval_count(self.interval, t)? as f64 * self.interval;
        let c0 = [init.c01(), init.c02()];
        let modulus = |j: Qubit| {
            let (jj, ii) = (j.index(), j.other().index());
            let e_jj = self.e.get(j, j);
            let eps = epsilon_transfer(self.rates[jj], self.rates[ii], e_jj, t, self.equal_freq);
            let inner = c0[jj] + self.e.get(j, j.other()) / self.interval * eps * c0[ii];
            (-self.rates[jj].gamma * t).exp() * inner.norm()
        };
        Ok((modulus(Qubit::One), modulus(Qubit::Two)))
    }

    /// Interference-limited concurrence estimate for equal couplings and
    /// `delta1 = +-delta2`, clamped to `[0, 1]`.
    pub fn concurrence(&self, params: &PhysicalParams, init: InitialState, t: f64) -> Result<f64> {
        check_symmetric_regime(params)?;
        let t = interval_count(self.interval, t)? as f64 * self.interval;
        let (c10, c20) = (init.c01(), init.c02());
        let e12 = self.e.get(Qubit::One, Qubit::Two);
        let theta = (e12 * c20).arg();
        let bracket = c10.norm_sqr() + 2.0 * c10.norm() * c20.norm() * (e12 / self.interval).norm() * t * theta.cos();
        let value = 2.0 * bracket * (-2.0 * self.rates[0].gamma * t).exp();
        Ok(value.clamp(0.0, 1.0))
    }
}

fn check_symmetric_regime(params: &PhysicalParams) -> Result<()> {
    if !(params.equal_couplings() && (params.equal_detunings() || params.opposite_detunings())) {
        return Err(Error::WrongRegime(format!(
            "concurrence estimate needs r1 = r2 and delta1 = +-delta2 (r1 = {}, delta = {}, {})",
            params.r1, params.delta1, params.delta2
        )));
    }
    Ok(())
}

pub fn survival_modulus_approx(params: &PhysicalParams, init: InitialState, t_interval: f64, t: f64) -> Result<(f64, f64)> {
    ZenoLayer::new(params, t_interval)?.survival_moduli(init, t)
}

pub fn concurrence_approx(params: &PhysicalParams, init: InitialState, t_interval: f64, t: f64) -> Result<f64> {
    check_symmetric_regime(params)?;
    ZenoLayer::new(params, t_interval)?.concurrence(params, init, t)
}
