//! Free (measurement-free) evolution engines.

pub mod bath;
pub mod generator;
pub mod lindblad;
pub mod volterra;

pub use bath::{discretized_bath_evolve, discretized_bath_trajectory, BathState, DiscretizedBath};
pub use generator::{propagate_free, superradiant_survival, FreePropagator, Generator3};
pub use lindblad::{lindblad_evolve, lindblad_evolve_with, ChannelMap, LindbladPropagator, StepConfig};
pub use volterra::{volterra_integrate, VolterraTrajectory};
