//! Model parameters and calibration of the distance weight `ν`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::TspInstance;

/// Parameters of one run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamSet {
    /// Penalty for a city visited at two steps.
    pub lambda: f64,
    /// Penalty for two cities at the same step.
    pub mu: f64,
    /// Weight of the distance cost.
    pub nu: f64,
    /// Half-width of uniform fluctuations.
    pub delta: f64,
    /// Contraction unit.
    pub delta_out: f64,
    /// Constant leak from the hub.
    pub delta_in: f64,
}

impl Default for ParamSet {
    /// The published defaults. `nu` is left at zero and must be calibrated
    /// against a map with [`ParamSet::calibrated`].
    fn default() -> Self {
        Self { lambda: 0.5, mu: 0.5, nu: 0.0, delta: 0.003, delta_out: 0.001, delta_in: 0.001 }
    }
}

impl ParamSet {
    /// Copy of `self` with `nu` set by [`compute_nu`] for `inst`.
    pub fn calibrated(self, inst: &TspInstance) -> Self {
        Self { nu: compute_nu(inst, self.lambda, self.mu), ..self }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [("lambda", self.lambda), ("mu", self.mu), ("nu", self.nu), ("delta_out", self.delta_out)];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParams(format!("{name} must be positive, got {v}")));
            }
        }
        for (name, v) in [("delta", self.delta), ("delta_in", self.delta_in)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::InvalidParams(format!("{name} must be nonnegative, got {v}")));
            }
        }
        Ok(())
    }

    /// Checks `ν · max(d(V1,V2)+d(V2,V3)) ≤ min(λ, μ)` for `inst`.
    pub fn check_calibration(&self, inst: &TspInstance) -> Result<()> {
        self.validate()?;
        let bound = self.lambda.min(self.mu);
        if self.nu * inst.max_two_edge_path() > bound {
            return Err(Error::Uncalibrated { nu: self.nu, bound: bound / inst.max_two_edge_path() });
        }
        Ok(())
    }
}

/// Largest admissible distance weight, rounded down to three significant
/// figures so that the calibration inequality still holds.
pub fn compute_nu(inst: &TspInstance, lambda: f64, mu: f64) -> f64 {
    let bound = lambda.min(mu);
    let longest = inst.max_two_edge_path();
    let exact = bound / longest;
    let scale = 10f64.powi(2 - exact.log10().floor() as i32);
    let mut digits = (exact * scale * (1.0 + 1e-12)).floor();
    loop {
        let nu = digits / scale;
        if nu * longest <= bound || digits <= 1.0 {
            return nu;
        }
        digits -= 1.0;
    }
}
