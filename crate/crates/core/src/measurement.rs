//! Repeated nonselective measurements of "qubits excited" versus "qubits in
//! the ground state", and the schemes that approximate the resulting
//! interrupted evolution.

use std::fmt;
use std::str::FromStr;

use nalgebra::{Matrix2, Vector2};
use num_complex::Complex64;

use crate::dynamics::{Generator3, LindbladPropagator, StepConfig};
use crate::error::{Error, Result};
use crate::model::{build_initial, FullDensity, InitialState, PhysicalParams, Qubit, XStateDensity};

type C = Complex64;

/// Amplitude map of the qubit subspace over one interval between
/// measurements, `c(T) = E c(0)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolutionMatrix(pub Matrix2<C>);

impl EvolutionMatrix {
    pub fn new(e11: C, e12: C, e21: C, e22: C) -> Self {
        Self(Matrix2::new(e11, e12, e21, e22))
    }

    pub fn get(&self, j: Qubit, i: Qubit) -> C {
        self.0[(j.index(), i.index())]
    }

    pub fn apply(&self, c1: C, c2: C) -> (C, C) {
        let v = self.0 * Vector2::new(c1, c2);
        (v[0], v[1])
    }

    pub fn power(&self, n: u32) -> Self {
        Self(self.0.pow(n))
    }

    pub fn spectral_radius(&self) -> f64 {
        let m = &self.0;
        let half_tr = (m[(0, 0)] + m[(1, 1)]) * 0.5;
        let disc = (half_tr * half_tr - m.determinant()).sqrt();
        (half_tr + disc).norm().max((half_tr - disc).norm())
    }

    /// Converts a cavity-frame interval map to the frame rotating with each
    /// qubit, `diag(e^{i delta_j T}) E`.
    pub fn to_qubit_frame(&self, params: &PhysicalParams, t: f64) -> Self {
        let d = Matrix2::from_diagonal(&Vector2::new(
            C::new(0.0, params.delta1 * t).exp(),
            C::new(0.0, params.delta2 * t).exp(),
        ));
        Self(d * self.0)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (self.0 - other.0).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

/// Measurements every `interval` time units, `count` of them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasurementSchedule {
    pub interval: f64,
    pub count: u32,
}

impl MeasurementSchedule {
    pub fn new(interval: f64, count: u32) -> Result<Self> {
        if !(interval > 0.0 && interval.is_finite()) {
            return Err(Error::InvalidParameter(format!("measurement interval must be > 0, got {interval}")));
        }
        Ok(Self { interval, count })
    }

    pub fn total_time(&self) -> f64 {
        self.count as f64 * self.interval
    }
}

/// Keeps the unread mixture of the two outcomes: all coherences between the
/// qubit-excited block `{e1, e2}` and the ground block `{e3, e4}` vanish.
pub fn nonselective_measure(rho: &FullDensity) -> FullDensity {
    let mut m = *rho.matrix();
    for i in 0..2 {
        for k in 2..4 {
            m[(i, k)] = C::new(0.0, 0.0);
            m[(k, i)] = C::new(0.0, 0.0);
        }
    }
    FullDensity(m)
}

/// Exact channel for one measurement interval, reusable across many
/// intervals and initial states.
#[derive(Debug, Clone)]
pub struct MeasuredChannel {
    map: crate::dynamics::ChannelMap,
}

impl MeasuredChannel {
    pub fn new(params: &PhysicalParams, interval: f64, cfg: StepConfig) -> Result<Self> {
        MeasurementSchedule::new(interval, 0)?;
        let map = LindbladPropagator::new(params).interval_map(interval, cfg)?;
        Ok(Self { map })
    }

    pub fn step(&self, rho: &FullDensity) -> FullDensity {
        nonselective_measure(&self.map.apply(rho))
    }

    /// States right after measurements `0..=n` (index 0 is `rho`).
    pub fn run(&self, rho: &FullDensity, n: u32) -> Vec<FullDensity> {
        let mut out = Vec::with_capacity(n as usize + 1);
        let mut cur = *rho;
        out.push(cur);
        for _ in 0..n {
            cur = self.step(&cur);
            out.push(cur);
        }
        out
    }
}

/// Reduced qubit states at `t = kT`, `k = 0..=N`, from the exact
/// evolve-then-measure channel.
pub fn measured_evolution_exact(
    params: &PhysicalParams,
    init: InitialState,
    sched: MeasurementSchedule,
) -> Result<Vec<XStateDensity>> {
    let sched = MeasurementSchedule::new(sched.interval, sched.count)?;
    let rho = FullDensity::from_amplitudes(&build_initial(init)?)?;
    let channel = MeasuredChannel::new(params, sched.interval, StepConfig::default())?;
    Ok(channel.run(&rho, sched.count).iter().map(FullDensity::qubit_state).collect())
}

/// Qubit block of `exp(M T)` in the cavity frame.
pub fn evolution_matrix(params: &PhysicalParams, t: f64) -> Result<EvolutionMatrix> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::InvalidParameter(format!("interval must be > 0, got {t}")));
    }
    let u = Generator3::new(params).propagator().exp(t);
    Ok(EvolutionMatrix::new(u[(0, 0)], u[(0, 1)], u[(1, 0)], u[(1, 1)]))
}

/// Neumaier-compensated complex accumulator.
#[derive(Default, Clone, Copy)]
struct Compensated {
    sum: C,
    comp: C,
}

impl Compensated {
    fn add_part(sum: &mut f64, comp: &mut f64, x: f64) {
        let t = *sum + x;
        if sum.abs() >= x.abs() {
            *comp += (*sum - t) + x;
        } else {
            *comp += (x - t) + *sum;
        }
        *sum = t;
    }

    fn add(&mut self, x: C) {
        Self::add_part(&mut self.sum.re, &mut self.comp.re, x.re);
        Self::add_part(&mut self.sum.im, &mut self.comp.im, x.im);
    }

    fn value(&self) -> C {
        self.sum + self.comp
    }
}

fn powers(x: C, n: usize) -> Vec<C> {
    let mut v = Vec::with_capacity(n + 1);
    let mut cur = C::new(1.0, 0.0);
    for _ in 0..=n {
        v.push(cur);
        cur *= x;
    }
    v
}

/// Weighted geometric sums `sum_k w(k) a^{m-k} b^k` for `k = 0..=m`, written
/// without forming the ratio `b / a` so vanishing diagonal entries are safe.
/// When `a = b` the plain sum is exactly `(m + 1) a^m`.
fn weighted_sum(pa: &[C], pb: &[C], m: usize, w: impl Fn(usize) -> f64) -> C {
    let mut acc = Compensated::default();
    for k in 0..=m {
        acc.add(pa[m - k] * pb[k] * w(k));
    }
    acc.value()
}

fn heaviside(x: i64) -> bool {
    x > 0
}

fn check_count(n: u32) -> Result<usize> {
    if n == 0 {
        return Err(Error::InvalidParameter("coarse-grained schemes need N >= 1".into()));
    }
    Ok(n as usize)
}

/// Second-order coarse-grained approximation of the `N`-interval map: the
/// diagonal gains one forward-and-back transfer, the off-diagonal one
/// transfer plus a transfer-back-transfer correction, each weighted by the
/// number of orderings along the measurement sequence.
pub fn coarse_grained_series(e: &EvolutionMatrix, n: u32) -> Result<EvolutionMatrix> {
    let nu = check_count(n)?;
    let mut out = Matrix2::zeros();
    for j in 0..2 {
        let i = 1 - j;
        let (ejj, eii, eji, eij) = (e.0[(j, j)], e.0[(i, i)], e.0[(j, i)], e.0[(i, j)]);
        let pj = powers(ejj, nu);
        let pi = powers(eii, nu);
        let nn = nu as i64;

        let mut diag = pj[nu];
        if heaviside(nn - 1) {
            let s = weighted_sum(&pj, &pi, nu - 2, |k| (nu - 1 - k) as f64);
            diag += eji * eij * s;
        }
        let mut cross = eji * weighted_sum(&pj, &pi, nu - 1, |_| 1.0);
        if heaviside(nn - 2) {
            let s = weighted_sum(&pj, &pi, nu - 3, |k| ((k + 1) * (nu - k)) as f64);
            cross += eji * eji * eij * s;
        }
        out[(j, j)] = diag;
        out[(j, i)] = cross;
    }
    Ok(EvolutionMatrix(out))
}

/// Bad-cavity truncation: diagonal powers and a single transfer.
pub fn coarse_grained_badcavity(e: &EvolutionMatrix, n: u32) -> Result<EvolutionMatrix> {
    let nu = check_count(n)?;
    let mut out = Matrix2::zeros();
    for j in 0..2 {
        let i = 1 - j;
        let (ejj, eii, eji) = (e.0[(j, j)], e.0[(i, i)], e.0[(j, i)]);
        let pj = powers(ejj, nu);
        let pi = powers(eii, nu);
        out[(j, j)] = pj[nu];
        out[(j, i)] = if (eii - ejj).norm() <= 1e-12 * ejj.norm() {
            eji * pj[nu - 1] * nu as f64
        } else {
            eji * weighted_sum(&pj, &pi, nu - 1, |_| 1.0)
        };
    }
    Ok(EvolutionMatrix(out))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    /// Evolve-then-measure density-matrix channel.
    Exact,
    /// `E^N` applied to the initial amplitudes.
    Power,
    /// Second-order coarse-grained series.
    Series,
    /// Bad-cavity truncation of the series.
    BadCavity,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Exact, Method::Power, Method::Series, Method::BadCavity];

    pub fn label(self) -> &'static str {
        match self {
            Method::Exact => "exact",
            Method::Power => "power",
            Method::Series => "series",
            Method::BadCavity => "badcavity",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "exact" => Ok(Method::Exact),
            "power" => Ok(Method::Power),
            "series" => Ok(Method::Series),
            "badcavity" | "bad-cavity" => Ok(Method::BadCavity),
            _ => Err(Error::UnknownMethod(s.to_string())),
        }
    }
}

/// Outcome after `N` measurements: amplitude schemes give the two survival
/// amplitudes, the exact channel gives a reduced density matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Survival {
    Amplitudes { c1: C, c2: C },
    State(XStateDensity),
}

impl Survival {
    pub fn xstate(&self) -> Result<XStateDensity> {
        match *self {
            Survival::State(x) => Ok(x),
            Survival::Amplitudes { c1, c2 } => {
                crate::model::reduce_to_xstate(&crate::model::AmplitudeState::new(c1, c2, C::new(0.0, 0.0)))
            }
        }
    }

    /// `(|c1|, |c2|)`, or the square roots of the populations for the
    /// density-matrix outcome.
    pub fn moduli(&self) -> (f64, f64) {
        match *self {
            Survival::Amplitudes { c1, c2 } => (c1.norm(), c2.norm()),
            Survival::State(x) => (x.p10.max(0.0).sqrt(), x.p01.max(0.0).sqrt()),
        }
    }
}

pub fn survival_amplitudes_n(
    params: &PhysicalParams,
    init: InitialState,
    sched: MeasurementSchedule,
    method: Method,
) -> Result<Survival> {
    let sched = MeasurementSchedule::new(sched.interval, sched.count)?;
    let a = build_initial(init)?;
    if method == Method::Exact {
        let states = measured_evolution_exact(params, init, sched)?;
        return Ok(Survival::State(*states.last().expect("at least the initial state")));
    }
    if sched.count == 0 {
        return Ok(Survival::Amplitudes { c1: a.c1, c2: a.c2 });
    }
    let e = evolution_matrix(params, sched.interval)?;
    let en = match method {
        Method::Power => e.power(sched.count),
        Method::Series => coarse_grained_series(&e, sched.count)?,
        Method::BadCavity => coarse_grained_badcavity(&e, sched.count)?,
        Method::Exact => unreachable!(),
    };
    let (c1, c2) = en.apply(a.c1, a.c2);
    Ok(Survival::Amplitudes { c1, c2 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::correlations::concurrence;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    fn preset(delta1: f64, delta2: f64) -> PhysicalParams {
        PhysicalParams::in_lambda_units(0.1, FRAC_1_SQRT_2, delta1, delta2).unwrap()
    }

    #[test]
    fn measurement_kills_cross_blocks_only() {
        let a = crate::model::AmplitudeState::new(c(0.5, 0.0), c(0.0, 0.5), c(0.5, 0.1));
        let rho = FullDensity::from_amplitudes(&a).unwrap();
        let out = nonselective_measure(&rho);
        let m = out.matrix();
        for (i, k) in [(0, 2), (1, 2), (0, 3), (1, 3)] {
            assert_eq!(m[(i, k)], c(0.0, 0.0));
            assert_eq!(m[(k, i)], c(0.0, 0.0));
        }
        assert_eq!(m[(0, 1)], rho.matrix()[(0, 1)]);
        assert_eq!(m[(2, 2)], rho.matrix()[(2, 2)]);
        assert!((out.trace() - rho.trace()).abs() < 1e-15);
        assert_eq!(nonselective_measure(&out), out);

        let pure = FullDensity::from_amplitudes(&build_initial(InitialState::bell(0.3)).unwrap()).unwrap();
        assert_eq!(nonselective_measure(&pure), pure);
    }

    #[test]
    fn zero_measurements_return_initial_state() {
        let p = preset(2.0, 2.0);
        let init = InitialState::new(0.2, 1.0).unwrap();
        let xs = measured_evolution_exact(&p, init, MeasurementSchedule::new(0.1, 0).unwrap()).unwrap();
        let x0 = crate::model::reduce_to_xstate(&build_initial(init).unwrap()).unwrap();
        assert_eq!(xs.len(), 1);
        assert!((xs[0].p10 - x0.p10).abs() < 1e-15 && (xs[0].z - x0.z).norm() < 1e-15);
    }

    #[test]
    fn subradiant_state_unaffected_by_measurements() {
        let p = preset(2.0, 2.0);
        let xs = measured_evolution_exact(&p, InitialState::bell(PI), MeasurementSchedule::new(0.3, 20).unwrap()).unwrap();
        for x in &xs {
            assert!((concurrence(x) - 1.0).abs() < 1e-6);
        }
    }

    #[test]
    fn resonant_measurements_protect_entanglement() {
        let p = PhysicalParams::in_lambda_units(0.1, FRAC_1_SQRT_2, 0.0, 0.0).unwrap();
        let init = InitialState::bell(0.0);
        let xs = measured_evolution_exact(&p, init, MeasurementSchedule::new(0.05, 40).unwrap()).unwrap();
        let free = crate::dynamics::propagate_free(&p, &build_initial(init).unwrap(), 2.0).unwrap();
        let free_x = crate::model::reduce_to_xstate(&free).unwrap();
        assert!(concurrence(xs.last().unwrap()) > concurrence(&free_x));
    }

    #[test]
    fn evolution_matrix_limits() {
        let p = PhysicalParams::in_lambda_units(0.0, 0.3, 1.0, -2.0).unwrap();
        let e = evolution_matrix(&p, 0.7).unwrap();
        let expect = EvolutionMatrix::new(c(0.0, -0.7).exp(), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 1.4).exp());
        assert!(e.max_abs_diff(&expect) < 1e-13);

        let p = preset(2.0, 2.0);
        let t = 1.3;
        let e = evolution_matrix(&p, t).unwrap();
        let (a, b) = e.apply(c(1.0, 0.0), c(-1.0, 0.0));
        let ph = c(0.0, -2.0 * t).exp();
        assert!((a - ph).norm() < 1e-10 && (b + ph).norm() < 1e-10);

        // Superradiant element in the qubit frame equals the closed form.
        let eq = e.to_qubit_frame(&p, t);
        let (s1, s2) = eq.apply(c(FRAC_1_SQRT_2, 0.0), c(FRAC_1_SQRT_2, 0.0));
        let elem = (s1 + s2) * FRAC_1_SQRT_2;
        let closed = crate::dynamics::superradiant_survival(&p, t).unwrap();
        assert!((elem - closed).norm() < 1e-10);
        assert!(e.spectral_radius() <= 1.0 + 1e-9);
    }

    #[test]
    fn series_and_truncation_boundaries() {
        let e = EvolutionMatrix::new(c(0.9, 0.1), c(0.05, -0.02), c(-0.03, 0.04), c(0.8, -0.2));
        assert_eq!(coarse_grained_series(&e, 1).unwrap(), e);
        assert_eq!(coarse_grained_badcavity(&e, 1).unwrap(), e);
        assert!(coarse_grained_series(&e, 0).is_err());

        let d = EvolutionMatrix::new(c(0.9, 0.1), c(0.0, 0.0), c(0.0, 0.0), c(0.8, -0.2));
        let s = coarse_grained_series(&d, 7).unwrap();
        assert!((s.0[(0, 0)] - d.0[(0, 0)].powi(7)).norm() < 1e-15);
        assert!((s.0[(1, 1)] - d.0[(1, 1)].powi(7)).norm() < 1e-15);
        assert_eq!(s.0[(0, 1)], c(0.0, 0.0));

        let eq = EvolutionMatrix::new(c(0.9, 0.1), c(0.05, 0.0), c(0.02, 0.01), c(0.9, 0.1));
        let b = coarse_grained_badcavity(&eq, 6).unwrap();
        let expect = c(0.02, 0.01) * c(0.9, 0.1).powi(5) * 6.0;
        assert!((b.0[(1, 0)] - expect).norm() < 1e-15);
    }

    #[test]
    fn series_error_is_third_order() {
        let base = EvolutionMatrix::new(c(0.95, 0.2), c(0.3, -0.1), c(-0.2, 0.25), c(0.85, -0.3));
        let err = |eps: f64| {
            let mut m = base.0;
            m[(0, 1)] *= eps;
            m[(1, 0)] *= eps;
            let e = EvolutionMatrix(m);
            coarse_grained_series(&e, 12).unwrap().max_abs_diff(&e.power(12))
        };
        let (e1, e2) = (err(1e-2), err(1e-3));
        let slope = (e1 / e2).log10();
        assert!(slope >= 2.7, "slope {slope}");
    }

    #[test]
    fn truncation_close_to_series_in_bad_cavity() {
        let p = PhysicalParams::in_lambda_units(0.1, FRAC_1_SQRT_2, 2.0, -2.0).unwrap();
        let e = evolution_matrix(&p, 0.5).unwrap();
        let s = coarse_grained_series(&e, 10).unwrap();
        let b = coarse_grained_badcavity(&e, 10).unwrap();
        for k in 0..4 {
            let (x, y) = (s.0[k], b.0[k]);
            assert!((x - y).norm() <= 1e-2 * x.norm(), "entry {k}: {x} vs {y}");
        }
    }

    #[test]
    fn method_parsing() {
        assert_eq!("Series".parse::<Method>().unwrap(), Method::Series);
        assert_eq!("badcavity".parse::<Method>().unwrap(), Method::BadCavity);
        assert!(matches!("laplace".parse::<Method>(), Err(Error::UnknownMethod(_))));
        for m in Method::ALL {
            assert_eq!(m.label().parse::<Method>().unwrap(), m);
        }
    }

    #[test]
    fn schemes_agree_where_they_should() {
        let p = PhysicalParams::in_lambda_units(0.1, FRAC_1_SQRT_2, 0.0, 0.0).unwrap();
        let init = InitialState::bell(0.0);
        let zero = MeasurementSchedule::new(0.1, 0).unwrap();
        for m in [Method::Power, Method::Series, Method::BadCavity] {
            let s = survival_amplitudes_n(&p, init, zero, m).unwrap();
            assert_eq!(s.moduli(), (FRAC_1_SQRT_2, FRAC_1_SQRT_2));
        }
        let sched = MeasurementSchedule::new(0.1, 20).unwrap();
        let exact = survival_amplitudes_n(&p, init, sched, Method::Exact).unwrap().xstate().unwrap();
        let power = survival_amplitudes_n(&p, init, sched, Method::Power).unwrap().xstate().unwrap();
        assert!((concurrence(&exact) - concurrence(&power)).abs() < 5e-2);

        let p = PhysicalParams::in_lambda_units(0.1, FRAC_1_SQRT_2, 2.0, -2.0).unwrap();
        let sched = MeasurementSchedule::new(0.5, 10).unwrap();
        let power = survival_amplitudes_n(&p, init, sched, Method::Power).unwrap().xstate().unwrap();
        let series = survival_amplitudes_n(&p, init, sched, Method::Series).unwrap().xstate().unwrap();
        assert!((power.p10 - series.p10).abs() < 1e-3 && (power.p01 - series.p01).abs() < 1e-3);
    }

    #[test]
    fn frequent_measurements_freeze_excitation() {
        let p = PhysicalParams::in_lambda_units(0.1, FRAC_1_SQRT_2, 0.0, 0.0).unwrap();
        let init = InitialState::new(0.4, 0.0).unwrap();
        let loss = |t_int: f64| {
            let n = (1.0 / t_int).round() as u32;
            let xs = measured_evolution_exact(&p, init, MeasurementSchedule::new(t_int, n).unwrap()).unwrap();
            let x = xs.last().unwrap();
            1.0 - x.p10 - x.p01
        };
        let (a, b, c3) = (loss(0.04), loss(0.02), loss(0.01));
        assert!(a > b && b > c3);
        // Linear in T: halving T halves the loss.
        assert!(((a / b) - 2.0).abs() < 0.1 && ((b / c3) - 2.0).abs() < 0.1);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(48))]
            #[test]
            fn measured_states_are_valid_and_contractive(
                r in 0.0f64..1.0, r1 in 0.0f64..=1.0, d1 in -3.0f64..3.0, d2 in -3.0f64..3.0,
                s in -1.0f64..=1.0, phi in 0.0f64..6.0, t in 0.02f64..1.0,
            ) {
                let p = PhysicalParams::in_lambda_units(r, r1, d1, d2).unwrap();
                let init = InitialState::new(s, phi).unwrap();
                let rho = FullDensity::from_amplitudes(&build_initial(init).unwrap()).unwrap();
                let ch = MeasuredChannel::new(&p, t, StepConfig::default()).unwrap();
                let states = ch.run(&rho, 15);
                for w in states.windows(2) {
                    w[1].validate(1e-8).unwrap();
                    let x = w[1].qubit_state();
                    x.validate().unwrap();
                    let (e0, e1) = (w[0].qubit_state(), x);
                    if w[0].photon_population() < 1e-8 {
                        prop_assert!(e1.p10 + e1.p01 <= e0.p10 + e0.p01 + 1e-6);
                    }
                }
            }

            #[test]
            fn evolution_matrix_never_amplifies(
                r in 0.0f64..2.0, r1 in 0.0f64..=1.0, d1 in -5.0f64..5.0, d2 in -5.0f64..5.0, t in 0.01f64..10.0,
            ) {
                let p = PhysicalParams::in_lambda_units(r, r1, d1, d2).unwrap();
                prop_assert!(evolution_matrix(&p, t).unwrap().spectral_radius() <= 1.0 + 1e-9);
            }
        }
    }
}
