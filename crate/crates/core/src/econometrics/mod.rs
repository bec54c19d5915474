//! Panel regressions and the decompositions built on them.

mod decompose;
mod icc;
mod lags;
mod ols;
mod panel;
mod quintile;
mod trend;
mod winsor;

pub use decompose::{firm_fe_fraction, incremental_r2, IncrementalShare};
pub use icc::icc;
pub use lags::{measurement_error, MeasurementError, DEFAULT_WEAK_INSTRUMENT_F};
pub use ols::{ols_fe, Cluster, FixedEffect, RegressionResult, RegressionSpec};
pub use panel::Panel;
pub use quintile::{quintile_transition, QuintileTransition};
pub use trend::{t_trend, TTrend};
pub use winsor::{winsor_bounds, winsorize, winsorize_column};
