use std::path::PathBuf;

/// Errors produced by the simulation engines and the sweep driver.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("inconsistent state: {0}")]
    InconsistentState(String),

    #[error("wrong regime: {0}")]
    WrongRegime(String),

    #[error("numerical instability at t = {t}: {reason}")]
    Instability { t: f64, reason: String },

    #[error("quadrature did not converge: achieved error {achieved:.3e}, requested {requested:.3e}")]
    Quadrature { achieved: f64, requested: f64 },

    #[error("dual evaluation mismatch in {what}: quadrature {quadrature:.12e} vs closed form {closed:.12e}")]
    DualMismatch {
        what: &'static str,
        quadrature: f64,
        closed: f64,
    },

    #[error("unknown method `{0}` (expected exact, power, series or badcavity)")]
    UnknownMethod(String),

    #[error("unknown scenario `{0}` (expected fig1a, fig1b, fig2, fig3 or fig4)")]
    UnknownScenario(String),

    #[error("matrix is not Hermitian (max asymmetry {0:.3e})")]
    NonHermitian(f64),

    #[error("config: {0}")]
    Config(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{}: {source}", path.display())]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
