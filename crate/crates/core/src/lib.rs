//! Split-step Fourier simulation of the semiclassical nonlinear Schrödinger
//! equation `iε∂_t u + (ε²/2)∂_x²u = λ ε^α |u|^{2σ} u` on a periodic grid,
//! together with the WKB/Maslov profiles it is compared against, a numerical
//! scattering operator, and aliasing diagnostics.

pub mod aliasing;
pub mod error;
pub mod experiments;
pub mod observables;
pub mod propagators;
pub mod scattering;
pub mod spectral;
pub mod wkb;

pub use error::{Error, Result};
pub use propagators::{RunConfig, SemiclassicalParams, SplitScheme};
pub use spectral::{GridSpec, SpectrumField, WaveField};
