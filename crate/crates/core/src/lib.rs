pub mod diagnostics;
pub mod error;
pub mod io;
pub mod model;
pub mod optim;
pub mod pma;
pub mod sht;
pub mod wigner;

pub use error::{Error, Result};
pub use model::{GradientVariant, Model, ModelParams};
pub use num_complex::Complex64;
pub use optim::{Method, OptimizerConfig, RunOutcome};
pub use sht::{GridField, QuadratureGrid, ShtPlan, SpectralField};
