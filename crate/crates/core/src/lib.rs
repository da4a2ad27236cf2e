//! Continuous-variable model of entanglement-assisted long-baseline
//! interferometry.
//!
//! A thermal two-telescope source is mixed with a two-mode squeezed vacuum on
//! two balanced beam splitters, one quadrature per output port is homodyned,
//! and the Fisher information of the outcome distribution with respect to the
//! complex mutual coherence `g = g1 + i g2` is evaluated.
//!
//! Covariance convention: the vacuum covariance matrix is the identity, and
//! quadratures are ordered `x, p` per mode.

pub mod error;
pub mod estimate;
pub mod fisher;
pub mod gaussian;
pub mod interferometer;
pub mod output;
pub mod par;
pub mod schemes;
pub mod states;

pub use error::{Error, Result};
pub use estimate::{EstimateResult, MeasurementRecord};
pub use fisher::{FisherMatrix, Limit};
pub use gaussian::{CovarianceMatrix, QuadLabel, Quadrature, QuadratureOrdering};
pub use interferometer::{InterferometerConfig, ReducedState};
pub use par::Execution;
pub use schemes::{BoundMode, SchemeCurve, SchemeId};
pub use states::{SourceParams, TmsvParams};
