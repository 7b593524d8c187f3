//! Seeded batches of trials, sweeps over map size and the log–log fit of
//! iteration counts.
//!
//! Trial `i` of a batch draws its fluctuations from a stream keyed by
//! `(global_seed, i)` and, with [`MapPolicy::FreshPerTrial`], its map from a
//! second stream keyed the same way. Aggregation folds over trial index, so
//! the result is the same for any number of workers.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::{generate_map, TspInstance};
use crate::params::ParamSet;
use crate::seed::{map_seed, trial_seed};
use crate::solver::{run_trial, TrialResult, DEFAULT_MAX_ITERS};
use crate::tour::Tour;
use crate::variant::VariantConfig;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MapPolicy {
    /// A new map for every trial.
    FreshPerTrial,
    /// One map, generated from this seed, shared by all trials.
    Fixed(u64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NuPolicy {
    /// Recalibrate `ν` for every map.
    Calibrate,
    /// Use this value everywhere; trials refuse maps it is not calibrated for.
    Fixed(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct BatchSpec {
    /// Label written to result files.
    pub variant: String,
    pub cfg: VariantConfig,
    pub n: usize,
    pub trials: usize,
    pub params: ParamSet,
    pub nu_policy: NuPolicy,
    pub global_seed: u64,
    pub max_iters: u64,
    pub map_policy: MapPolicy,
    pub map_mean: f64,
    pub map_sd: f64,
    /// Worker threads; 0 uses the global pool.
    pub workers: usize,
    /// Keep a per-trial summary in the result.
    pub keep_trials: bool,
}

impl BatchSpec {
    pub fn new(variant: impl Into<String>, cfg: VariantConfig, n: usize, trials: usize) -> Self {
        Self {
            variant: variant.into(),
            cfg,
            n,
            trials,
            params: ParamSet::default(),
            nu_policy: NuPolicy::Calibrate,
            global_seed: 0,
            max_iters: DEFAULT_MAX_ITERS,
            map_policy: MapPolicy::FreshPerTrial,
            map_mean: 100.0,
            map_sd: 17.0,
            workers: 0,
            keep_trials: false,
        }
    }

    pub fn with_seed(mut self, global_seed: u64) -> Self {
        self.global_seed = global_seed;
        self
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialSummary {
    pub index: usize,
    pub seed: u64,
    pub map_seed: u64,
    pub success: bool,
    pub iterations: u64,
    pub r_calc: Option<f64>,
    pub ratio: Option<f64>,
    pub tour: Option<Tour>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateStats {
    pub variant: String,
    pub n: usize,
    pub trials: usize,
    pub successes: usize,
    pub success_rate: f64,
    /// Over successful trials only; absent when there are none.
    pub avg_iterations: Option<f64>,
    /// Sample standard deviation; absent below two successes.
    pub std_iterations: Option<f64>,
    pub avg_ratio: Option<f64>,
    pub std_ratio: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub per_trial: Option<Vec<TrialSummary>>,
}

pub const RESULTS_CSV_HEADER: &str = "variant,n,trials,success_rate,avg_iterations,std_iterations,avg_ratio,std_ratio";

/// Marker written for an absent average.
pub const ABSENT: &str = "NA";

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| ABSENT.to_string(), |x| x.to_string())
}

impl AggregateStats {
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{}",
            self.variant,
            self.n,
            self.trials,
            self.success_rate,
            opt(self.avg_iterations),
            opt(self.std_iterations),
            opt(self.avg_ratio),
            opt(self.std_ratio)
        )
    }

    /// Aggregates in trial-index order.
    pub fn from_trials(variant: &str, n: usize, trials: Vec<TrialSummary>, keep: bool) -> Self {
        let iters: Vec<f64> = trials.iter().filter(|t| t.success).map(|t| t.iterations as f64).collect();
        let ratios: Vec<f64> = trials.iter().filter_map(|t| t.ratio).collect();
        let total = trials.len();
        let (avg_iterations, std_iterations) = mean_std(&iters);
        let (avg_ratio, std_ratio) = mean_std(&ratios);
        Self {
            variant: variant.to_string(),
            n,
            trials: total,
            successes: iters.len(),
            success_rate: if total == 0 { 0.0 } else { iters.len() as f64 / total as f64 },
            avg_iterations,
            std_iterations,
            avg_ratio,
            std_ratio,
            per_trial: keep.then_some(trials),
        }
    }
}

pub fn results_csv(stats: &[AggregateStats]) -> String {
    let mut out = String::from(RESULTS_CSV_HEADER);
    out.push('\n');
    for s in stats {
        out.push_str(&s.csv_row());
        out.push('\n');
    }
    out
}

fn mean_std(xs: &[f64]) -> (Option<f64>, Option<f64>) {
    if xs.is_empty() {
        return (None, None);
    }
    let mean = xs.iter().sum::<f64>() / xs.len() as f64;
    let std = (xs.len() > 1)
        .then(|| (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (xs.len() - 1) as f64).sqrt());
    (Some(mean), std)
}

fn trial_map(spec: &BatchSpec, index: usize) -> Result<(TspInstance, u64)> {
    let seed = match spec.map_policy {
        MapPolicy::FreshPerTrial => map_seed(spec.global_seed, index as u64),
        MapPolicy::Fixed(seed) => seed,
    };
    Ok((generate_map(spec.n, seed, spec.map_mean, spec.map_sd)?, seed))
}

fn run_one(spec: &BatchSpec, index: usize, fixed: Option<&TspInstance>) -> Result<TrialSummary> {
    let owned;
    let (inst, m_seed) = match (fixed, spec.map_policy) {
        (Some(inst), MapPolicy::Fixed(seed)) => (inst, seed),
        _ => {
            let (inst, seed) = trial_map(spec, index)?;
            owned = inst;
            (&owned, seed)
        }
    };
    let params = match spec.nu_policy {
        NuPolicy::Calibrate => spec.params.calibrated(inst),
        NuPolicy::Fixed(nu) => ParamSet { nu, ..spec.params },
    };
    let seed = trial_seed(spec.global_seed, index as u64);
    let r: TrialResult = run_trial(inst, &params, &spec.cfg, seed, spec.max_iters, false)?;
    Ok(TrialSummary {
        index,
        seed,
        map_seed: m_seed,
        success: r.success,
        iterations: r.iterations,
        r_calc: r.r_calc,
        ratio: r.ratio,
        tour: r.tour,
    })
}

/// Runs `spec.trials` independent trials and aggregates them.
pub fn run_batch(spec: &BatchSpec) -> Result<AggregateStats> {
    if spec.trials == 0 {
        return Err(Error::InvalidParams("a batch needs at least one trial".into()));
    }
    spec.cfg.validate()?;
    let fixed = match spec.map_policy {
        MapPolicy::Fixed(_) => Some(trial_map(spec, 0)?.0),
        MapPolicy::FreshPerTrial => None,
    };
    let work = || -> Result<Vec<TrialSummary>> {
        (0..spec.trials).into_par_iter().map(|i| run_one(spec, i, fixed.as_ref())).collect()
    };
    let trials = if spec.workers > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(spec.workers)
            .build()
            .map_err(|e| Error::InvalidParams(format!("worker pool: {e}")))?
            .install(work)?
    } else {
        work()?
    };
    Ok(AggregateStats::from_trials(&spec.variant, spec.n, trials, spec.keep_trials))
}

/// One batch per `(n, trials)` point, in the given order.
pub fn run_sweep(points: &[(usize, usize)], template: &BatchSpec) -> Result<Vec<AggregateStats>> {
    if points.is_empty() {
        return Err(Error::InvalidParams("sweep needs at least one map size".into()));
    }
    points
        .iter()
        .map(|&(n, trials)| run_batch(&BatchSpec { n, trials, ..template.clone() }))
        .collect()
}

/// Least-squares line through `(ln n, ln iterations)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingFit {
    pub points: Vec<(f64, f64)>,
    pub exponent: f64,
    pub prefactor: f64,
    pub r_squared: f64,
}

impl ScalingFit {
    pub fn predict(&self, n: f64) -> f64 {
        self.prefactor * n.powf(self.exponent)
    }
}

/// Fits `iterations ≈ prefactor · n^exponent` over batches with successes.
pub fn fit_scaling(stats: &[AggregateStats]) -> Result<ScalingFit> {
    let points: Vec<(f64, f64)> =
        stats.iter().filter_map(|s| s.avg_iterations.map(|it| (s.n as f64, it))).collect();
    fit_points(&points)
}

pub fn fit_points(points: &[(f64, f64)]) -> Result<ScalingFit> {
    if points.len() < 3 {
        return Err(Error::TooFewPoints(points.len()));
    }
    if points.iter().any(|&(n, y)| !(n > 0.0 && y > 0.0)) {
        return Err(Error::InvalidParams("log-log fit needs positive coordinates".into()));
    }
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let m = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidParams("log-log fit needs at least two distinct n".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r_squared = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    Ok(ScalingFit { points: points.to_vec(), exponent: slope, prefactor: intercept.exp(), r_squared })
}

/// Prefactor `c` of the best `c·√n` curve in log space.
pub fn sqrt_prefactor(points: &[(f64, f64)]) -> f64 {
    let m = points.len() as f64;
    (points.iter().map(|&(n, y)| y.ln() - 0.5 * n.ln()).sum::<f64>() / m).exp()
}

/// `n,avg_iterations,sqrt_n_fit` rows for batches with successes.
pub fn plot_iterations_csv(stats: &[AggregateStats]) -> String {
    let points: Vec<(f64, f64)> =
        stats.iter().filter_map(|s| s.avg_iterations.map(|it| (s.n as f64, it))).collect();
    let c = if points.is_empty() { f64::NAN } else { sqrt_prefactor(&points) };
    let mut out = String::from("n,avg_iterations,sqrt_n_fit\n");
    for s in stats {
        let fit = c * (s.n as f64).sqrt();
        out.push_str(&format!("{},{},{}\n", s.n, opt(s.avg_iterations), opt(s.avg_iterations.map(|_| fit))));
    }
    out
}

/// `n,avg_ratio,reference_0.9` rows.
pub fn plot_ratio_csv(stats: &[AggregateStats]) -> String {
    let mut out = String::from("n,avg_ratio,reference_0.9\n");
    for s in stats {
        out.push_str(&format!("{},{},0.9\n", s.n, opt(s.avg_ratio)));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::variant::preset;

    fn summary(index: usize, success: bool, iterations: u64, ratio: Option<f64>) -> TrialSummary {
        TrialSummary { index, seed: 0, map_seed: 0, success, iterations, r_calc: None, ratio, tour: None }
    }

    #[test]
    fn aggregates_count_successes_only() {
        let trials = vec![
            summary(0, true, 100, Some(0.9)),
            summary(1, false, 3000, None),
            summary(2, true, 300, Some(1.1)),
            summary(3, true, 200, Some(1.0)),
        ];
        let s = AggregateStats::from_trials("x", 10, trials, false);
        assert_eq!(s.successes, 3);
        assert_eq!(s.success_rate, 0.75);
        assert_eq!(s.avg_iterations, Some(200.0));
        assert_eq!(s.std_iterations, Some(100.0));
        assert!((s.avg_ratio.unwrap() - 1.0).abs() < 1e-12);
        assert!(s.per_trial.is_none());
    }

    #[test]
    fn empty_success_set_is_absent() {
        let s = AggregateStats::from_trials("a1", 20, vec![summary(0, false, 3000, None)], false);
        assert_eq!(s.success_rate, 0.0);
        assert!(s.avg_iterations.is_none() && s.avg_ratio.is_none());
        assert_eq!(s.csv_row(), "a1,20,1,0,NA,NA,NA,NA");
    }

    #[test]
    fn single_noiseless_trial() {
        let spec = BatchSpec::new("a1", preset("a1").unwrap(), 20, 1).with_seed(3);
        let s = run_batch(&spec).unwrap();
        assert_eq!(s.success_rate, 0.0);
        assert!(s.avg_iterations.is_none());
    }

    #[test]
    fn batch_is_deterministic_and_worker_independent() {
        let mut spec = BatchSpec::new("improved", preset("improved").unwrap(), 6, 6).with_seed(11);
        spec.keep_trials = true;
        let a = run_batch(&spec).unwrap();
        let b = run_batch(&spec.clone().with_workers(3)).unwrap();
        let c = run_batch(&spec.clone().with_workers(1)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a, c);
        let seeds: Vec<u64> = a.per_trial.as_ref().unwrap().iter().map(|t| t.map_seed).collect();
        assert_ne!(seeds[0], seeds[1]);
    }

    #[test]
    fn fixed_map_policy_shares_one_map() {
        let mut spec = BatchSpec::new("improved", preset("improved").unwrap(), 5, 3).with_seed(2);
        spec.map_policy = MapPolicy::Fixed(77);
        spec.keep_trials = true;
        spec.max_iters = 50;
        let s = run_batch(&spec).unwrap();
        assert!(s.per_trial.unwrap().iter().all(|t| t.map_seed == 77));
    }

    #[test]
    fn fixed_nu_too_large_is_refused() {
        let mut spec = BatchSpec::new("original", VariantConfig::original(), 5, 2);
        spec.nu_policy = NuPolicy::Fixed(1.0);
        assert!(matches!(run_batch(&spec), Err(Error::Uncalibrated { .. })));
    }

    #[test]
    fn zero_trials_refused() {
        let spec = BatchSpec::new("original", VariantConfig::original(), 5, 0);
        assert!(run_batch(&spec).is_err());
    }

    #[test]
    fn singleton_sweep_equals_batch() {
        let mut spec = BatchSpec::new("improved", preset("improved").unwrap(), 5, 2).with_seed(4);
        spec.max_iters = 400;
        let sweep = run_sweep(&[(5, 2)], &spec).unwrap();
        assert_eq!(sweep, vec![run_batch(&spec).unwrap()]);
        assert!(run_sweep(&[], &spec).is_err());
    }

    #[test]
    fn linear_fixture_fits_exponent_one() {
        let pts: Vec<(f64, f64)> = [10.0, 20.0, 50.0, 100.0].iter().map(|&n| (n, 3.5 * n)).collect();
        let f = fit_points(&pts).unwrap();
        assert!((f.exponent - 1.0).abs() < 1e-12);
        assert!((f.prefactor - 3.5).abs() < 1e-9);
        assert!((f.r_squared - 1.0).abs() < 1e-12);
        assert!((f.predict(40.0) - 140.0).abs() < 1e-9);
    }

    #[test]
    fn too_few_points() {
        assert!(matches!(fit_points(&[(10.0, 1.0), (20.0, 2.0)]), Err(Error::TooFewPoints(2))));
        let s = AggregateStats::from_trials("a1", 20, vec![summary(0, false, 3000, None)], false);
        assert!(fit_scaling(&[s.clone(), s.clone(), s]).is_err());
    }

    #[test]
    fn plot_rows() {
        let mk = |n: usize, it: f64| AggregateStats {
            variant: "improved".into(),
            n,
            trials: 1,
            successes: 1,
            success_rate: 1.0,
            avg_iterations: Some(it),
            std_iterations: None,
            avg_ratio: Some(0.9),
            std_ratio: None,
            per_trial: None,
        };
        let stats = vec![mk(4, 20.0), mk(16, 40.0), mk(64, 80.0)];
        let a = plot_iterations_csv(&stats);
        assert_eq!(a.lines().next(), Some("n,avg_iterations,sqrt_n_fit"));
        let row: Vec<f64> = a.lines().nth(1).unwrap().split(',').map(|v| v.parse().unwrap()).collect();
        assert_eq!(row[..2], [4.0, 20.0]);
        assert!((row[2] - 20.0).abs() < 1e-9);
        let b = plot_ratio_csv(&stats);
        assert_eq!(b.lines().nth(3), Some("64,0.9,0.9"));
        assert!(results_csv(&stats).starts_with(RESULTS_CSV_HEADER));
    }
}
