//! Truncated-Fock-basis state numerics.
//!
//! Quadratures follow x̂_θ = (â e^{−iθ} + â† e^{iθ})/√2, so the vacuum has
//! variance 1/2 in absolute units. Everything reported to the outside world
//! is in shot-noise units (SNL), where the vacuum variance is 1.

pub mod beamsplitter;
pub mod entanglement;
pub mod fidelity;
pub mod gaussian;
pub mod noise;
pub mod quadrature;
pub mod special;
pub mod squeezed;
pub mod state;
pub mod wigner;

pub use beamsplitter::{split_on_beamsplitter, thermal_loss};
pub use entanglement::{entanglement_potential, log_negativity, LogBase};
pub use fidelity::fidelity;
pub use gaussian::GaussianStateOracle;
pub use noise::{add_vacuum_units, add_vacuum_units_to_dim};
pub use quadrature::{min_max_variance, quad_variance, quadrature_pdf, QuadratureMoments, VarianceExtrema};
pub use squeezed::{fit_from_db, fit_squeezed_thermal, make_squeezed_thermal, SqueezedThermalParams};
pub use state::{DensityMatrix, TwoModeDensityMatrix, DEFAULT_DIM};
pub use wigner::wigner;

/// dB below the shot-noise level for an SNL-unit variance.
pub fn db_below_snl(variance_snl: f64) -> f64 {
    -10.0 * variance_snl.log10()
}
