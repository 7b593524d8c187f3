//! A single solution-search trial.

use serde::{Deserialize, Serialize};

use crate::dynamics::{AmoebaState, StepSummary, Stepper};
use crate::error::Result;
use crate::instance::TspInstance;
use crate::params::ParamSet;
use crate::seed::rng_from;
use crate::tour::{decode_solution, estimated_route_length, route_length, Tour};
use crate::variant::VariantConfig;

/// Iteration budget used throughout the published experiments.
pub const DEFAULT_MAX_ITERS: u64 = 3000;

/// One row of a trial trace.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub t: u64,
    pub l_off: usize,
    pub sum_x: f64,
    pub stock: f64,
    pub total_o: f64,
    /// `ΔΣX - Σξ - Δin` for this step.
    pub residual: f64,
}

impl TraceRow {
    pub const CSV_HEADER: &'static str = "t,L_off,sum_X,S,total_O,residual";

    fn from_summary(s: &StepSummary, delta_in: f64) -> Self {
        Self {
            t: s.t,
            l_off: s.l_off,
            sum_x: s.sum_x,
            stock: s.stock,
            total_o: s.total_o,
            residual: crate::dynamics::conservation_residual(s, delta_in),
        }
    }

    pub fn to_csv(&self) -> String {
        format!("{},{},{},{},{},{}", self.t, self.l_off, self.sum_x, self.stock, self.total_o, self.residual)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialResult {
    pub success: bool,
    /// Step at which a tour was first read out, or the budget.
    pub iterations: u64,
    pub tour: Option<Tour>,
    pub r_calc: Option<f64>,
    /// `r_calc / (100 n)`.
    pub ratio: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub trace: Option<Vec<TraceRow>>,
}

/// Tour read out from `x`, if the thresholded matrix is a permutation.
pub fn check_termination(x: &[f64], n: usize) -> Option<Tour> {
    decode_solution(x, n).tour
}

/// Runs one trial from the empty state.
///
/// Stops after the first step whose state reads out as a tour, or after
/// `max_iters` steps. Refuses a distance weight that breaks the calibration
/// bound for `inst`.
pub fn run_trial(
    inst: &TspInstance,
    params: &ParamSet,
    cfg: &VariantConfig,
    seed: u64,
    max_iters: u64,
    trace: bool,
) -> Result<TrialResult> {
    params.check_calibration(inst)?;
    cfg.validate()?;
    let n = inst.n();
    let mut rng = rng_from(seed);
    let mut state = AmoebaState::new(n);
    let mut stepper = Stepper::new(inst, *params, *cfg);
    let mut rows = trace.then(Vec::new);

    while state.t < max_iters {
        let summary = stepper.advance(&mut state, &mut rng);
        if let Some(rows) = rows.as_mut() {
            rows.push(TraceRow::from_summary(&summary, params.delta_in));
        }
        if let Some(tour) = check_termination(&state.x, n) {
            let r_calc = route_length(&tour, inst);
            return Ok(TrialResult {
                success: true,
                iterations: state.t,
                tour: Some(tour),
                r_calc: Some(r_calc),
                ratio: Some(r_calc / estimated_route_length(n)),
                trace: rows,
            });
        }
    }
    Ok(TrialResult { success: false, iterations: state.t, tour: None, r_calc: None, ratio: None, trace: rows })
}
