use std::fmt;

use crate::error::Result;
use crate::model::ModelConfig;
use crate::pde::{simulate, SimulationOptions};
use crate::r0::compute_r0;

/// `sup I` at the horizon below this counts as extinction.
pub const EXTINCTION_THRESHOLD: f64 = 1e-4;
/// Minimum of `sup I` over the late window above this counts as persistence.
pub const PERSISTENCE_THRESHOLD: f64 = 1e-3;
/// `|R0 − 1|` below this makes no prediction.
pub const NEAR_THRESHOLD_BAND: f64 = 0.02;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    Extinction,
    Persistence,
    Inconclusive,
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Extinction => "extinction",
            Self::Persistence => "persistence",
            Self::Inconclusive => "inconclusive",
        })
    }
}

#[derive(Debug, Clone)]
pub struct StabilityVerdict {
    pub r0: f64,
    pub classification: Classification,
    /// `sup_y I` at the horizon.
    pub decay_metric: f64,
    /// Minimum of `sup_y I` over the last periods.
    pub persistence_floor: f64,
    /// First period whose end-of-period `sup I` fell below the extinction threshold.
    pub extinction_period: Option<usize>,
    pub horizon: usize,
    pub clamps: usize,
}

impl StabilityVerdict {
    pub fn near_threshold(&self) -> bool {
        (self.r0 - 1.0).abs() < NEAR_THRESHOLD_BAND
    }

    /// What `sign(R0 − 1)` predicts, or `None` inside the near-threshold band.
    pub fn predicted(&self) -> Option<Classification> {
        if self.near_threshold() {
            None
        } else if self.r0 < 1.0 {
            Some(Classification::Extinction)
        } else {
            Some(Classification::Persistence)
        }
    }

    /// `Some(false)` flags a numerical disagreement with the prediction.
    pub fn agrees(&self) -> Option<bool> {
        self.predicted().map(|p| p == self.classification)
    }
}

pub fn classify_stability(
    config: &ModelConfig,
    horizon_periods: usize,
) -> Result<StabilityVerdict> {
    let r0 = compute_r0(config)?.value;
    let traj = simulate(config, SimulationOptions::periods(horizon_periods))?;
    let decay_metric = traj.final_sup_i();
    let persistence_floor = traj.late_min_sup_i;
    let classification = if decay_metric < EXTINCTION_THRESHOLD {
        Classification::Extinction
    } else if persistence_floor > PERSISTENCE_THRESHOLD {
        Classification::Persistence
    } else {
        Classification::Inconclusive
    };
    Ok(StabilityVerdict {
        r0,
        classification,
        decay_metric,
        persistence_floor,
        extinction_period: traj
            .periods
            .iter()
            .find(|p| p.sup_i < EXTINCTION_THRESHOLD)
            .map(|p| p.period),
        horizon: horizon_periods,
        clamps: traj.clamps,
    })
}
