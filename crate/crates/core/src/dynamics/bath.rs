//! Brute-force reservoir: the Lorentzian continuum replaced by a finite set
//! of equally spaced modes, integrated as a unitary Schrodinger problem.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{AmplitudeState, LorentzianSpectrum, PhysicalParams};

type C = Complex64;

pub const MIN_MODES: usize = 100;
pub const MIN_WINDOW: f64 = 10.0;

/// Modes on the midpoints of a uniform grid over `[-window lambda, window lambda]`
/// with couplings `g_k = sqrt(J(omega_k) d omega)`.
#[derive(Debug, Clone)]
pub struct DiscretizedBath {
    pub window: f64,
    pub omega: Vec<f64>,
    pub g: Vec<f64>,
}

impl DiscretizedBath {
    pub fn new(spectrum: &LorentzianSpectrum, n_modes: usize, window: f64) -> Result<Self> {
        if n_modes < MIN_MODES {
            return Err(Error::InvalidParameter(format!("need at least {MIN_MODES} modes, got {n_modes}")));
        }
        if !(window >= MIN_WINDOW) {
            return Err(Error::InvalidParameter(format!("window must be >= {MIN_WINDOW} lambda, got {window}")));
        }
        let half = window * spectrum.lambda;
        let dw = 2.0 * half / n_modes as f64;
        let omega: Vec<f64> = (0..n_modes).map(|k| -half + (k as f64 + 0.5) * dw).collect();
        let g = omega.iter().map(|&w| (spectrum.density(w) * dw).sqrt()).collect();
        Ok(Self { window, omega, g })
    }

    pub fn n_modes(&self) -> usize {
        self.omega.len()
    }

    /// `sum_k g_k^2`, which tends to `W^2` as the grid is refined and widened.
    pub fn total_coupling_sqr(&self) -> f64 {
        self.g.iter().map(|g| g * g).sum()
    }
}

/// Qubit amplitudes and the amplitudes of every bath mode.
#[derive(Debug, Clone)]
pub struct BathState {
    pub t: f64,
    pub c1: C,
    pub c2: C,
    pub modes: Vec<C>,
}

impl BathState {
    pub fn norm_sqr(&self) -> f64 {
        self.c1.norm_sqr() + self.c2.norm_sqr() + self.modes.iter().map(|c| c.norm_sqr()).sum::<f64>()
    }
}

struct Splitter {
    h0: Vec<f64>,
    q: [f64; 2],
    g_hat: Vec<f64>,
    g_norm: f64,
}

impl Splitter {
    fn free(&self, psi: &mut [C], tau: f64) {
        for (x, &e) in psi.iter_mut().zip(&self.h0) {
            *x *= C::new(0.0, -e * tau).exp();
        }
    }

    // The coupling is G (|Q><G| + |G><Q|) with orthonormal Q (qubits) and
    // G (modes); its exponential is a rotation in that plane.
    fn coupling(&self, psi: &mut [C], tau: f64) {
        let (cos, sin) = ((self.g_norm * tau).cos(), (self.g_norm * tau).sin());
        let q = self.q[0] * psi[0] + self.q[1] * psi[1];
        let g: C = self.g_hat.iter().zip(&psi[2..]).map(|(w, x)| x * w).sum();
        let on_q = q * (cos - 1.0) + g * C::new(0.0, -sin);
        let on_g = g * (cos - 1.0) + q * C::new(0.0, -sin);
        psi[0] += on_q * self.q[0];
        psi[1] += on_q * self.q[1];
        for (x, w) in psi[2..].iter_mut().zip(&self.g_hat) {
            *x += on_g * *w;
        }
    }

    fn strang(&self, psi: &mut [C], tau: f64) {
        self.free(psi, tau / 2.0);
        self.coupling(psi, tau);
        self.free(psi, tau / 2.0);
    }

    /// Fourth-order triple-jump composition of the symmetric splitting.
    fn step(&self, psi: &mut [C], tau: f64) {
        let cbrt2 = 2f64.cbrt();
        let w1 = 1.0 / (2.0 - cbrt2);
        let w0 = -cbrt2 / (2.0 - cbrt2);
        self.strang(psi, w1 * tau);
        self.strang(psi, w0 * tau);
        self.strang(psi, w1 * tau);
    }

    fn max_step(&self) -> f64 {
        let w = self.h0.iter().fold(self.g_norm, |m, e| m.max(e.abs()));
        (0.1 / w.max(1e-12)).min(0.01)
    }
}

/// Evolves from `init` (with an empty reservoir) and records the state at
/// each requested time; `times` must be non-decreasing and non-negative.
pub fn discretized_bath_trajectory(
    params: &PhysicalParams,
    bath: &DiscretizedBath,
    init: &AmplitudeState,
    times: &[f64],
) -> Result<Vec<BathState>> {
    if bath.n_modes() < MIN_MODES || bath.window < MIN_WINDOW {
        return Err(Error::InvalidParameter("bath below minimum size".into()));
    }
    if init.b.norm() > 1e-12 {
        return Err(Error::InvalidParameter("bath evolution starts with an empty reservoir".into()));
    }
    let g_norm = bath.total_coupling_sqr().sqrt();
    let splitter = Splitter {
        h0: [params.delta1, params.delta2].into_iter().chain(bath.omega.iter().cloned()).collect(),
        q: [params.r1, params.r2()],
        g_hat: bath.g.iter().map(|g| if g_norm > 0.0 { g / g_norm } else { 0.0 }).collect(),
        g_norm,
    };

    let mut psi = vec![C::new(0.0, 0.0); 2 + bath.n_modes()];
    psi[0] = init.c1;
    psi[1] = init.c2;
    let max_tau = splitter.max_step();
    let mut now = 0.0;
    let mut out = Vec::with_capacity(times.len());
    for &t in times {
        if !(t >= now && t.is_finite()) {
            return Err(Error::InvalidParameter(format!("output times must be non-decreasing, got {t}")));
        }
        let span = t - now;
        if span > 0.0 {
            let n = (span / max_tau).ceil() as usize;
            let tau = span / n as f64;
            for _ in 0..n {
                splitter.step(&mut psi, tau);
            }
        }
        now = t;
        out.push(BathState { t, c1: psi[0], c2: psi[1], modes: psi[2..].to_vec() });
    }
    Ok(out)
}

pub fn discretized_bath_evolve(
    params: &PhysicalParams,
    bath: &DiscretizedBath,
    init: &AmplitudeState,
    t: f64,
) -> Result<BathState> {
    Ok(discretized_bath_trajectory(params, bath, init, &[t])?.remove(0))
}
