//! Parameter sweeps, limit studies and threshold classification built on
//! [`compute_r0`](crate::r0::compute_r0) and [`simulate`](crate::pde::simulate).

mod limits;
mod stability;
mod sweep;

pub use limits::{limit_targets, verify_limit, LimitKind, LimitReport, LIMIT_GAP_FLAG};
pub use stability::{
    classify_stability, Classification, StabilityVerdict, EXTINCTION_THRESHOLD,
    NEAR_THRESHOLD_BAND, PERSISTENCE_THRESHOLD,
};
pub use sweep::{
    expected_direction, sweep, sweep_L, sweep_dI, MonotoneVerdict, SweepParameter, SweepTable,
    SWEEP_SLACK,
};

use crate::model::ModelConfig;

/// `config` with one swept parameter replaced.
pub(crate) fn with_parameter(
    config: &ModelConfig,
    parameter: SweepParameter,
    value: f64,
) -> ModelConfig {
    let mut c = config.clone();
    match parameter {
        SweepParameter::DiffusionI => c.d_i = value,
        SweepParameter::Length => c.length = value,
    }
    c
}
