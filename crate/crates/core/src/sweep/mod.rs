//! Parameter sweeps over the measurement interval and elapsed time.

pub mod config;
pub mod export;
pub mod grid;
pub mod scenario;

pub use config::SweepConfig;
pub use export::{format_g12, read_json, write_table, Format};
pub use grid::Grid;
pub use scenario::{
    classify_regime, measurements_by, run, run_scenario, Regime, Scenario, Surfaces, SweepRow, SweepTable,
    CSV_HEADER, REGIME_TOL, SCENARIO_NAMES,
};
