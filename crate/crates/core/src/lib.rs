//! Amoeba-inspired solver for the traveling salesman problem.
//!
//! The solver models `n²` lanes (city `V`, visit step `k`) whose branch
//! lengths grow or shrink in response to an illumination pattern computed
//! from a Hopfield–Tank style cost tensor. A lane that is illuminated
//! contracts; a lane that is dark receives an equal share of the contracted
//! mass plus a constant leak from the hub. Every lane also carries a random
//! fluctuation. A solution is read out once exactly one lane per row and per
//! column exceeds `0.99`.
//!
//! The same dynamics cover the original model and every single-element
//! modification of it (see [`variant`]), including the improved preset.
//!
//! Module map:
//!
//! - [`instance`]: random maps, the JSON map format.
//! - [`params`]: parameter set and distance-weight calibration.
//! - [`cost`]: the cost tensor and the quadratic cost function.
//! - [`tour`]: decoding, route metrics and a brute-force oracle.
//! - [`variant`]: switches for elements A/B/C and named presets.
//! - [`dynamics`]: one synchronous update step.
//! - [`solver`]: a single solution-search trial.
//! - [`harness`]: seeded batches, sweeps, scaling fits and output formats.
//! - [`reference`]: published result tables used by the `reproduce` command.

pub mod cost;
pub mod dynamics;
pub mod error;
pub mod harness;
pub mod instance;
pub mod params;
pub mod reference;
pub mod seed;
pub mod solver;
pub mod tour;
pub mod variant;

pub use cost::{cost_function, cost_weight};
pub use dynamics::{step, AmoebaState, SigmoidParams, StepDiagnostics};
pub use error::{Error, Result};
pub use harness::{fit_scaling, run_batch, run_sweep, AggregateStats, BatchSpec, MapPolicy, ScalingFit};
pub use instance::{generate_map, GenMeta, TspInstance};
pub use params::{compute_nu, ParamSet};
pub use solver::{check_termination, run_trial, TrialResult};
pub use tour::{brute_force_optimum, decode_solution, estimated_route_length, route_length, DecodedSolution, Tour};
pub use variant::{preset, ElementA, ElementB, ElementC, VariantConfig};
