//! `key = value` sweep configuration.
//!
//! Blank lines and `#` comments are ignored. A `scenario` key selects a
//! preset; the remaining keys override its fields.

use std::path::PathBuf;

use super::export::Format;
use super::grid::Grid;
use super::scenario::{default_t_grid, default_tau_grid, Scenario, Surfaces};
use crate::error::{Error, Result};
use crate::measurement::Method;
use crate::model::{InitialState, PhysicalParams};

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SweepConfig {
    pub scenario: Option<String>,
    pub ratio: Option<f64>,
    pub r1: Option<f64>,
    pub delta1: Option<f64>,
    pub delta2: Option<f64>,
    pub s: Option<f64>,
    pub phi: Option<f64>,
    pub tau_grid: Option<Grid>,
    pub t_grid: Option<Grid>,
    pub method: Option<Surfaces>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
}

pub const CONFIG_KEYS: [&str; 12] =
    ["scenario", "R", "r1", "delta1", "delta2", "s", "phi", "tau_grid", "T_grid", "method", "out", "format"];

fn number(key: &str, v: &str) -> Result<f64> {
    v.parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .ok_or_else(|| Error::Config(format!("`{key}` expects a number, got `{v}`")))
}

impl SweepConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", lineno + 1)))?;
            cfg.set(key.trim(), value.trim())
                .map_err(|e| Error::Config(format!("line {}: {}", lineno + 1, strip_prefix(e))))?;
        }
        Ok(cfg)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "scenario" => self.scenario = Some(value.to_string()),
            "R" => self.ratio = Some(number(key, value)?),
            "r1" => self.r1 = Some(number(key, value)?),
            "delta1" => self.delta1 = Some(number(key, value)?),
            "delta2" => self.delta2 = Some(number(key, value)?),
            "s" => self.s = Some(number(key, value)?),
            "phi" => self.phi = Some(number(key, value)?),
            "tau_grid" => self.tau_grid = Some(value.parse()?),
            "T_grid" => self.t_grid = Some(value.parse()?),
            "method" => self.method = Some(value.parse()?),
            "out" => self.out = Some(PathBuf::from(value)),
            "format" => self.format = Some(value.parse()?),
            other => {
                return Err(Error::Config(format!("unknown key `{other}` (known: {})", CONFIG_KEYS.join(", "))))
            }
        }
        Ok(())
    }

    /// Fields set in `other` replace those in `self`.
    pub fn merged(mut self, other: &SweepConfig) -> Self {
        macro_rules! take {
            ($($f:ident),*) => { $( if other.$f.is_some() { self.$f = other.$f.clone(); } )* };
        }
        take!(scenario, ratio, r1, delta1, delta2, s, phi, tau_grid, t_grid, method, out, format);
        self
    }

    /// Builds the scenario. Without a preset the defaults are `R = 0.1`,
    /// `r1 = 1/sqrt 2`, resonant qubits, `s = 0`, `phi = 0` and the exact
    /// measured surface. Setting `s` or `phi` replaces the preset's initial
    /// states with a single one.
    pub fn resolve(&self) -> Result<Scenario> {
        let mut sc = match &self.scenario {
            Some(name) => Scenario::preset(name)?,
            None => Scenario {
                name: "custom".into(),
                params: PhysicalParams::in_lambda_units(0.1, std::f64::consts::FRAC_1_SQRT_2, 0.0, 0.0)?,
                inits: vec![InitialState::bell(0.0)],
                tau_grid: default_tau_grid(),
                t_grid: default_t_grid(),
                surfaces: Surfaces::Measured(Method::Exact),
            },
        };
        let p = sc.params;
        sc.params = PhysicalParams::in_lambda_units(
            self.ratio.unwrap_or(p.ratio()),
            self.r1.unwrap_or(p.r1),
            self.delta1.unwrap_or(p.delta1),
            self.delta2.unwrap_or(p.delta2),
        )?;
        if self.s.is_some() || self.phi.is_some() {
            let base = sc.inits[0];
            sc.inits = vec![InitialState::new(self.s.unwrap_or(base.s), self.phi.unwrap_or(base.phi))?];
        }
        if let Some(g) = self.tau_grid {
            sc.tau_grid = g;
        }
        if let Some(g) = self.t_grid {
            sc.t_grid = g;
        }
        if let Some(m) = self.method {
            sc.surfaces = m;
        }
        sc.validate()?;
        Ok(sc)
    }

    pub fn output_format(&self) -> Format {
        self.format
            .or_else(|| self.out.as_deref().and_then(Format::from_path))
            .unwrap_or(Format::Csv)
    }
}

fn strip_prefix(e: Error) -> String {
    match e {
        Error::Config(m) => m,
        other => other.to_string(),
    }
}
