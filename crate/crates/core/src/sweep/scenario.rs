//! Figure presets and the sweep driver.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::grid::Grid;
use crate::correlations::CorrelationRecord;
use crate::dynamics::{Generator3, StepConfig};
use crate::error::{Error, Result};
use crate::measurement::{
    coarse_grained_badcavity, coarse_grained_series, evolution_matrix, MeasuredChannel, Method,
};
use crate::model::{build_initial, reduce_to_xstate, FullDensity, InitialState, PhysicalParams, XStateDensity};

/// Comparison of a measured quantity with its free-evolution value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Regime {
    #[serde(rename = "zeno")]
    Zeno,
    #[serde(rename = "anti-zeno")]
    AntiZeno,
    #[serde(rename = "neutral")]
    Neutral,
}

impl Regime {
    pub fn label(self) -> &'static str {
        match self {
            Regime::Zeno => "zeno",
            Regime::AntiZeno => "anti-zeno",
            Regime::Neutral => "neutral",
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

pub const REGIME_TOL: f64 = 1e-6;

pub fn classify_regime(measured: f64, free: f64, tol: f64) -> Regime {
    if measured > free + tol {
        Regime::Zeno
    } else if measured < free - tol {
        Regime::AntiZeno
    } else {
        Regime::Neutral
    }
}

/// What a scenario computes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Surfaces {
    /// Free evolution only, sampled at `t = tau`; rows carry `lambda_T = 0`.
    FreeOnly,
    /// A measured surface and its free reference over the `(tau, lambda T)` grid.
    Measured(#[serde(with = "method_label")] Method),
}

mod method_label {
    use super::Method;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(m: &Method, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(m.label())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Method, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl FromStr for Surfaces {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.trim().eq_ignore_ascii_case("free") {
            Ok(Surfaces::FreeOnly)
        } else {
            Ok(Surfaces::Measured(s.parse()?))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub name: String,
    pub params: PhysicalParams,
    pub inits: Vec<InitialState>,
    pub tau_grid: Grid,
    pub t_grid: Grid,
    pub surfaces: Surfaces,
}

pub const SCENARIO_NAMES: [&str; 5] = ["fig1a", "fig1b", "fig2", "fig3", "fig4"];

pub const DEFAULT_RATIO: f64 = 0.1;
pub const DEFAULT_DETUNING: f64 = 2.0;

pub fn default_tau_grid() -> Grid {
    Grid { start: 0.0, stop: 6.0, count: 60 }
}

pub fn default_t_grid() -> Grid {
    Grid { start: 0.02, stop: 2.0, count: 40 }
}

impl Scenario {
    /// Frozen presets. All use `R = 0.1`, `r1 = 1/sqrt 2` and `s = 0`, with
    /// detunings in units of `lambda`.
    pub fn preset(name: &str) -> Result<Self> {
        let params = |d1: f64, d2: f64| {
            PhysicalParams::in_lambda_units(DEFAULT_RATIO, FRAC_1_SQRT_2, d1, d2).expect("preset parameters are valid")
        };
        let d = DEFAULT_DETUNING;
        let both = vec![InitialState::bell(0.0), InitialState::bell(PI)];
        let (params, inits, surfaces) = match name {
            "fig1a" => (params(d, d), both, Surfaces::FreeOnly),
            "fig1b" => (params(d, -d), both, Surfaces::FreeOnly),
            "fig2" => (params(d, d), vec![InitialState::bell(0.0)], Surfaces::Measured(Method::Exact)),
            "fig3" => (params(d, -d), vec![InitialState::bell(0.0)], Surfaces::Measured(Method::Exact)),
            "fig4" => (params(d, -d), vec![InitialState::bell(PI)], Surfaces::Measured(Method::Exact)),
            other => return Err(Error::UnknownScenario(other.to_string())),
        };
        Ok(Self {
            name: name.to_string(),
            params,
            inits,
            tau_grid: default_tau_grid(),
            t_grid: default_t_grid(),
            surfaces,
        })
    }

    pub fn validate(&self) -> Result<()> {
        self.tau_grid.validate()?;
        self.t_grid.validate()?;
        if self.inits.is_empty() {
            return Err(Error::Config("scenario has no initial state".into()));
        }
        if self.tau_grid.values()[0] < 0.0 {
            return Err(Error::Config("tau grid must be non-negative".into()));
        }
        if matches!(self.surfaces, Surfaces::Measured(_)) && self.t_grid.values()[0] <= 0.0 {
            return Err(Error::Config("measurement intervals must be positive".into()));
        }
        Ok(())
    }
}

/// One output line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub method: String,
    pub s: f64,
    pub phi: f64,
    pub delta1: f64,
    pub delta2: f64,
    pub r1: f64,
    #[serde(rename = "R")]
    pub ratio: f64,
    #[serde(rename = "lambda_T")]
    pub lambda_t: f64,
    pub tau: f64,
    pub c1_abs: f64,
    pub c2_abs: f64,
    pub concurrence: f64,
    pub classical: f64,
    pub discord: f64,
    pub mutual_info: f64,
    pub regime_flag: Regime,
}

pub const CSV_HEADER: &str =
    "method,s,phi,delta1,delta2,r1,R,lambda_T,tau,c1_abs,c2_abs,concurrence,classical,discord,mutual_info,regime_flag";

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
}

/// Number of completed measurements by time `tau` at interval `t`.
pub fn measurements_by(tau: f64, t: f64) -> u32 {
    (tau / t + 1e-9).floor().max(0.0) as u32
}

#[derive(Debug, Clone, Copy)]
struct Sample {
    c1_abs: f64,
    c2_abs: f64,
    record: CorrelationRecord,
}

impl Sample {
    fn from_state(x: &XStateDensity, c1_abs: f64, c2_abs: f64) -> Self {
        Self { c1_abs, c2_abs, record: CorrelationRecord::new(x) }
    }

    fn from_xstate(x: &XStateDensity) -> Self {
        Self::from_state(x, x.p10.max(0.0).sqrt(), x.p01.max(0.0).sqrt())
    }
}

fn free_sample(prop: &crate::dynamics::FreePropagator, init: InitialState, t: f64) -> Result<Sample> {
    let a = prop.apply(&build_initial(init)?, t);
    let x = reduce_to_xstate(&a)?;
    Ok(Sample::from_state(&x, a.c1.norm(), a.c2.norm()))
}

/// Measured and free samples for every `tau` at one interval.
fn interval_block(
    params: &PhysicalParams,
    init: InitialState,
    method: Method,
    t: f64,
    taus: &[f64],
) -> Result<Vec<(Sample, Sample)>> {
    let prop = Generator3::new(params).propagator();
    let counts: Vec<u32> = taus.iter().map(|&tau| measurements_by(tau, t)).collect();
    let n_max = counts.iter().cloned().max().unwrap_or(0);
    let measured: Vec<Sample> = match method {
        Method::Exact => {
            let rho = FullDensity::from_amplitudes(&build_initial(init)?)?;
            let states = MeasuredChannel::new(params, t, StepConfig::default())?.run(&rho, n_max);
            counts.iter().map(|&n| Sample::from_xstate(&states[n as usize].qubit_state())).collect()
        }
        _ => {
            let a = build_initial(init)?;
            let e = evolution_matrix(params, t)?;
            counts
                .iter()
                .map(|&n| {
                    let (c1, c2) = if n == 0 {
                        (a.c1, a.c2)
                    } else {
                        let en = match method {
                            Method::Power => e.power(n),
                            Method::Series => coarse_grained_series(&e, n)?,
                            _ => coarse_grained_badcavity(&e, n)?,
                        };
                        en.apply(a.c1, a.c2)
                    };
                    let amp = crate::model::AmplitudeState::new(c1, c2, num_complex::Complex64::new(0.0, 0.0));
                    Ok(Sample::from_state(&reduce_to_xstate(&amp)?, c1.norm(), c2.norm()))
                })
                .collect::<Result<_>>()?
        }
    };
    counts
        .iter()
        .zip(measured)
        .map(|(&n, m)| Ok((m, free_sample(&prop, init, n as f64 * t)?)))
        .collect()
}

fn row(
    method: &str,
    params: &PhysicalParams,
    init: InitialState,
    lambda_t: f64,
    tau: f64,
    sample: &Sample,
    regime: Regime,
) -> SweepRow {
    SweepRow {
        method: method.to_string(),
        s: init.s,
        phi: init.phi,
        delta1: params.delta1,
        delta2: params.delta2,
        r1: params.r1,
        ratio: params.ratio(),
        lambda_t,
        tau,
        c1_abs: sample.c1_abs,
        c2_abs: sample.c2_abs,
        concurrence: sample.record.concurrence,
        classical: sample.record.classical,
        discord: sample.record.discord,
        mutual_info: sample.record.mutual_info,
        regime_flag: regime,
    }
}

/// Runs a scenario. Rows are ordered by initial state, then surface
/// (measured before free), then `tau`, then `lambda T`. Measured samples are
/// taken right after the last measurement at or before `tau`, i.e. at
/// `t = N T` with `N = floor(tau / T)`, and the free reference at the same
/// `t`. Grid points are computed in parallel; the order and values do not
/// depend on the number of workers.
pub fn run(scenario: &Scenario) -> Result<SweepTable> {
    scenario.validate()?;
    let params = &scenario.params;
    let taus = scenario.tau_grid.values();
    let mut rows = Vec::new();
    match scenario.surfaces {
        Surfaces::FreeOnly => {
            let prop = Generator3::new(params).propagator();
            for &init in &scenario.inits {
                for &tau in &taus {
                    let t = tau / params.lambda;
                    let s = free_sample(&prop, init, t)?;
                    rows.push(row("free", params, init, 0.0, tau, &s, Regime::Neutral));
                }
            }
        }
        Surfaces::Measured(method) => {
            let lts = scenario.t_grid.values();
            let jobs: Vec<(usize, usize)> =
                (0..scenario.inits.len()).flat_map(|i| (0..lts.len()).map(move |k| (i, k))).collect();
            let blocks: Vec<Vec<(Sample, Sample)>> = jobs
                .par_iter()
                .map(|&(i, k)| {
                    let t = lts[k] / params.lambda;
                    let taus_t: Vec<f64> = taus.iter().map(|tau| tau / params.lambda).collect();
                    interval_block(params, scenario.inits[i], method, t, &taus_t)
                })
                .collect::<Result<_>>()?;
            let n_t = lts.len();
            for (i, &init) in scenario.inits.iter().enumerate() {
                for surface in 0..2 {
                    for (q, &tau) in taus.iter().enumerate() {
                        for (k, &lt) in lts.iter().enumerate() {
                            let (m, f) = &blocks[i * n_t + k][q];
                            rows.push(if surface == 0 {
                                let regime = classify_regime(m.record.concurrence, f.record.concurrence, REGIME_TOL);
                                row(method.label(), params, init, lt, tau, m, regime)
                            } else {
                                row("free", params, init, lt, tau, f, Regime::Neutral)
                            });
                        }
                    }
                }
            }
        }
    }
    Ok(SweepTable { rows })
}

pub fn run_scenario(name: &str) -> Result<SweepTable> {
    run(&Scenario::preset(name)?)
}
