//! Domain types shared by every engine.
//!
//! Times are measured in units of `1/lambda` and frequencies in units of
//! `lambda` whenever parameters are built with [`PhysicalParams::in_lambda_units`].
//! All dynamics live in the single-excitation sector: the qubits share one
//! excitation with the cavity reservoir, which is represented by a single
//! damped pseudomode amplitude.

use std::f64::consts::{PI, TAU};

use nalgebra::Matrix4;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance used when checking norms and traces of constructed states.
pub const STATE_TOL: f64 = 1e-9;

/// Parameters of two qubits coupled to a Lorentzian-broadened cavity mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalParams {
    /// Reservoir half-width.
    pub lambda: f64,
    /// Vacuum Rabi frequency `W * alpha_T`.
    pub rabi_vacuum: f64,
    /// Relative coupling of qubit 1; qubit 2 gets `sqrt(1 - r1^2)`.
    pub r1: f64,
    pub delta1: f64,
    pub delta2: f64,
}

impl PhysicalParams {
    pub fn new(lambda: f64, rabi_vacuum: f64, r1: f64, delta1: f64, delta2: f64) -> Result<Self> {
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(Error::InvalidParameter(format!("lambda must be > 0, got {lambda}")));
        }
        if !(rabi_vacuum.is_finite() && rabi_vacuum >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "vacuum Rabi frequency must be >= 0, got {rabi_vacuum}"
            )));
        }
        if !(0.0..=1.0).contains(&r1) {
            return Err(Error::InvalidParameter(format!("r1 must lie in [0, 1], got {r1}")));
        }
        if !(delta1.is_finite() && delta2.is_finite()) {
            return Err(Error::InvalidParameter("detunings must be finite".into()));
        }
        Ok(Self { lambda, rabi_vacuum, r1, delta1, delta2 })
    }

    /// Parameters with `lambda = 1`, so `ratio` is `R = rabi_vacuum / lambda`
    /// and detunings are given in units of `lambda`.
    pub fn in_lambda_units(ratio: f64, r1: f64, delta1: f64, delta2: f64) -> Result<Self> {
        Self::new(1.0, ratio, r1, delta1, delta2)
    }

    pub fn r2(&self) -> f64 {
        (1.0 - self.r1 * self.r1).max(0.0).sqrt()
    }

    /// Relative coupling `r_j` for `j` in {1, 2}.
    pub fn relative_coupling(&self, j: Qubit) -> f64 {
        match j {
            Qubit::One => self.r1,
            Qubit::Two => self.r2(),
        }
    }

    /// `alpha_j * W = r_j * rabi_vacuum`.
    pub fn coupling(&self, j: Qubit) -> f64 {
        self.relative_coupling(j) * self.rabi_vacuum
    }

    pub fn detuning(&self, j: Qubit) -> f64 {
        match j {
            Qubit::One => self.delta1,
            Qubit::Two => self.delta2,
        }
    }

    /// `R = rabi_vacuum / lambda`.
    pub fn ratio(&self) -> f64 {
        self.rabi_vacuum / self.lambda
    }

    pub fn equal_detunings(&self) -> bool {
        (self.delta1 - self.delta2).abs() <= 1e-12 * (1.0 + self.delta1.abs())
    }

    pub fn opposite_detunings(&self) -> bool {
        (self.delta1 + self.delta2).abs() <= 1e-12 * (1.0 + self.delta1.abs())
    }

    pub fn equal_couplings(&self) -> bool {
        (self.r1 - self.r2()).abs() <= 1e-12
    }

    /// Generalized Rabi frequency `sqrt(4 R^2 + delta^2)`; with unequal
    /// detunings the larger one is used, which gives an upper frequency scale.
    pub fn generalized_rabi(&self) -> f64 {
        let d = self.delta1.abs().max(self.delta2.abs());
        (4.0 * self.rabi_vacuum * self.rabi_vacuum + d * d).sqrt()
    }

    pub fn spectrum(&self) -> LorentzianSpectrum {
        LorentzianSpectrum { lambda: self.lambda, w: self.rabi_vacuum }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Qubit {
    One,
    Two,
}

impl Qubit {
    pub fn other(self) -> Self {
        match self {
            Qubit::One => Qubit::Two,
            Qubit::Two => Qubit::One,
        }
    }

    pub fn index(self) -> usize {
        match self {
            Qubit::One => 0,
            Qubit::Two => 1,
        }
    }
}

/// Initial one-excitation qubit state `sqrt((1-s)/2)|10> + sqrt((1+s)/2) e^{i phi}|01>`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InitialState {
    pub s: f64,
    /// Relative phase, reduced to `[0, 2 pi)`.
    pub phi: f64,
}

impl InitialState {
    pub fn new(s: f64, phi: f64) -> Result<Self> {
        if !(-1.0..=1.0).contains(&s) {
            return Err(Error::InvalidParameter(format!("s must lie in [-1, 1], got {s}")));
        }
        if !phi.is_finite() {
            return Err(Error::InvalidParameter("phi must be finite".into()));
        }
        let mut phi = phi.rem_euclid(TAU);
        if phi >= TAU {
            phi = 0.0;
        }
        Ok(Self { s, phi })
    }

    /// The maximally entangled `s = 0` state with the given phase.
    pub fn bell(phi: f64) -> Self {
        Self::new(0.0, phi).expect("s = 0 is always valid")
    }

    pub fn c01(&self) -> Complex64 {
        Complex64::new(((1.0 - self.s) / 2.0).sqrt(), 0.0)
    }

    pub fn c02(&self) -> Complex64 {
        Complex64::from_polar(((1.0 + self.s) / 2.0).sqrt(), self.phi)
    }
}

/// Amplitudes of the single-excitation pure branch: qubit 1, qubit 2 and the
/// pseudomode. The missing norm is population that has leaked out of the
/// pseudomode and left both qubits in the ground state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmplitudeState {
    pub c1: Complex64,
    pub c2: Complex64,
    pub b: Complex64,
}

impl AmplitudeState {
    pub fn new(c1: Complex64, c2: Complex64, b: Complex64) -> Self {
        Self { c1, c2, b }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.c1.norm_sqr() + self.c2.norm_sqr() + self.b.norm_sqr()
    }

    /// Population lost irreversibly from the pseudomode.
    pub fn deficit(&self) -> f64 {
        1.0 - self.norm_sqr()
    }

    pub fn as_array(&self) -> [Complex64; 3] {
        [self.c1, self.c2, self.b]
    }

    pub fn from_array(v: [Complex64; 3]) -> Self {
        Self { c1: v[0], c2: v[1], b: v[2] }
    }
}

pub fn build_initial(init: InitialState) -> Result<AmplitudeState> {
    // Re-validate: the fields are public.
    let init = InitialState::new(init.s, init.phi)?;
    Ok(AmplitudeState::new(init.c01(), init.c02(), Complex64::new(0.0, 0.0)))
}

/// Two-qubit reduced state with populations of |00>, |01>, |10> and the
/// coherence `z = <10|rho|01>`; the |11> population is identically zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct XStateDensity {
    pub p00: f64,
    pub p01: f64,
    pub p10: f64,
    pub z: Complex64,
}

impl XStateDensity {
    pub fn new(p00: f64, p01: f64, p10: f64, z: Complex64) -> Result<Self> {
        let x = Self { p00, p01, p10, z };
        x.validate()?;
        Ok(x)
    }

    pub fn validate(&self) -> Result<()> {
        let sum = self.p00 + self.p01 + self.p10;
        if (sum - 1.0).abs() > STATE_TOL {
            return Err(Error::InconsistentState(format!("populations sum to {sum}")));
        }
        for (name, p) in [("p00", self.p00), ("p01", self.p01), ("p10", self.p10)] {
            if p < -1e-12 || !p.is_finite() {
                return Err(Error::InconsistentState(format!("{name} = {p} is negative")));
            }
        }
        if self.z.norm_sqr() > self.p10 * self.p01 + 1e-12 {
            return Err(Error::InconsistentState(format!(
                "|z|^2 = {} exceeds p10 * p01 = {}",
                self.z.norm_sqr(),
                self.p10 * self.p01
            )));
        }
        Ok(())
    }

    /// True when the excited block has rank one, as for states reached by
    /// pure single-excitation evolution.
    pub fn is_pure_branch(&self, tol: f64) -> bool {
        (self.p10 * self.p01 - self.z.norm_sqr()).abs() <= tol
    }

    /// The dense 4x4 matrix in the ordered basis |00>, |01>, |10>, |11>
    /// (qubit 1 written first).
    pub fn to_matrix(&self) -> Matrix4<Complex64> {
        let mut m = Matrix4::zeros();
        m[(0, 0)] = Complex64::new(self.p00, 0.0);
        m[(1, 1)] = Complex64::new(self.p01, 0.0);
        m[(2, 2)] = Complex64::new(self.p10, 0.0);
        m[(2, 1)] = self.z;
        m[(1, 2)] = self.z.conj();
        m
    }
}

pub fn reduce_to_xstate(a: &AmplitudeState) -> Result<XStateDensity> {
    let norm = a.norm_sqr();
    if norm > 1.0 + STATE_TOL || !norm.is_finite() {
        return Err(Error::InconsistentState(format!("amplitude norm {norm} exceeds 1")));
    }
    let p10 = a.c1.norm_sqr();
    let p01 = a.c2.norm_sqr();
    Ok(XStateDensity { p00: (1.0 - p10 - p01).max(0.0), p01, p10, z: a.c1 * a.c2.conj() })
}

/// Density matrix over `|10;0>`, `|01;0>`, `|00;1>` (pseudomode photon) and
/// `|00;0>`, indexed 0..4 in that order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FullDensity(pub Matrix4<Complex64>);

impl FullDensity {
    pub const QUBIT1: usize = 0;
    pub const QUBIT2: usize = 1;
    pub const PHOTON: usize = 2;
    pub const GROUND: usize = 3;

    pub fn new(m: Matrix4<Complex64>) -> Result<Self> {
        let rho = Self(m);
        rho.validate(STATE_TOL)?;
        Ok(rho)
    }

    /// Pure-branch embedding; the amplitude deficit is placed in `|00;0>`.
    pub fn from_amplitudes(a: &AmplitudeState) -> Result<Self> {
        let deficit = a.deficit();
        if deficit < -STATE_TOL {
            return Err(Error::InconsistentState(format!("amplitude norm exceeds 1 by {}", -deficit)));
        }
        let v = a.as_array();
        let mut m = Matrix4::zeros();
        for i in 0..3 {
            for j in 0..3 {
                m[(i, j)] = v[i] * v[j].conj();
            }
        }
        m[(3, 3)] = Complex64::new(deficit.max(0.0), 0.0);
        Ok(Self(m))
    }

    pub fn matrix(&self) -> &Matrix4<Complex64> {
        &self.0
    }

    pub fn trace(&self) -> f64 {
        (0..4).map(|i| self.0[(i, i)].re).sum()
    }

    pub fn validate(&self, tol: f64) -> Result<()> {
        let asym = (self.0 - self.0.adjoint()).iter().map(|c| c.norm()).fold(0.0, f64::max);
        if asym > tol {
            return Err(Error::NonHermitian(asym));
        }
        let tr = self.trace();
        if (tr - 1.0).abs() > tol {
            return Err(Error::InconsistentState(format!("trace {tr} differs from 1")));
        }
        let herm = (self.0 + self.0.adjoint()).scale(0.5);
        let min_eig = herm.symmetric_eigenvalues().iter().cloned().fold(f64::INFINITY, f64::min);
        if min_eig < -tol {
            return Err(Error::InconsistentState(format!("negative eigenvalue {min_eig}")));
        }
        Ok(())
    }

    /// Reduced two-qubit state; the photon and ground entries both map to |00>.
    pub fn qubit_state(&self) -> XStateDensity {
        let m = &self.0;
        XStateDensity {
            p00: m[(2, 2)].re + m[(3, 3)].re,
            p01: m[(1, 1)].re,
            p10: m[(0, 0)].re,
            z: m[(0, 1)],
        }
    }

    pub fn photon_population(&self) -> f64 {
        self.0[(2, 2)].re
    }
}

/// Lorentzian spectral density centred on the cavity frequency (0 in the
/// rotating frame), normalised so that its integral is `w^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LorentzianSpectrum {
    pub lambda: f64,
    pub w: f64,
}

impl LorentzianSpectrum {
    pub fn density(&self, omega: f64) -> f64 {
        self.w * self.w / PI * self.lambda / (omega * omega + self.lambda * self.lambda)
    }

    /// Reservoir correlation function `w^2 exp(-lambda |t|)`.
    pub fn correlation(&self, t: f64) -> f64 {
        self.w * self.w * (-self.lambda * t.abs()).exp()
    }
}
