//! One synchronous update of the lane state.
//!
//! Per step, in order:
//!
//! 1. the illumination `L` of every lane is computed from `X(t)`;
//! 2. lit lanes (`L > 0.5`) contract by `O`;
//! 3. the contracted mass, the hub leak and the stock are shared equally by
//!    the dark lanes (`I`), or stocked when no lane is dark;
//! 4. a fluctuation `ξ` is added to every lane.
//!
//! Everything in a step reads `X(t)` only, so lane order does not matter.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal, Uniform};
use serde::{Deserialize, Serialize};

use crate::instance::TspInstance;
use crate::params::ParamSet;
use crate::variant::{ElementA, ElementB, VariantConfig};

/// Logistic function `1 / (1 + exp(-gamma (x - theta)))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SigmoidParams {
    pub gamma: f64,
    pub theta: f64,
}

/// Outer sigmoid of the illumination.
pub const OUTER_SIGMOID: SigmoidParams = SigmoidParams { gamma: 1000.0, theta: -0.5 };
/// Inner sigmoid applied to every branch length in the illumination.
pub const INNER_SIGMOID: SigmoidParams = SigmoidParams { gamma: 35.0, theta: 0.6 };
/// Length dependence of contraction.
pub const CONTRACTION_SIGMOID: SigmoidParams = SigmoidParams { gamma: 20.0, theta: 0.6 };

/// Lanes with `L` above this are lit.
pub const ILLUMINATION_THRESHOLD: f64 = 0.5;

#[inline]
pub fn sigmoid(p: SigmoidParams, x: f64) -> f64 {
    1.0 / (1.0 + (-p.gamma * (x - p.theta)).exp())
}

/// Heaviside step with `θ(0) = 1`.
#[inline]
pub fn heaviside(x: f64) -> f64 {
    if x >= 0.0 {
        1.0
    } else {
        0.0
    }
}

/// Branch lengths, stock and iteration counter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AmoebaState {
    pub n: usize,
    /// Row-major `x[v * n + k]`: branch length of city `v` at step `k`.
    pub x: Vec<f64>,
    pub stock: f64,
    pub t: u64,
}

impl AmoebaState {
    /// All lanes empty.
    pub fn new(n: usize) -> Self {
        Self { n, x: vec![0.0; n * n], stock: 0.0, t: 0 }
    }

    pub fn sum_x(&self) -> f64 {
        self.x.iter().sum()
    }
}

/// Scalar outcome of one step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepSummary {
    /// Iteration count after the step.
    pub t: u64,
    /// Number of dark lanes.
    pub l_off: usize,
    pub total_o: f64,
    pub total_xi: f64,
    /// Elongation per dark lane before any element-B factor.
    pub i_value: f64,
    pub sum_x: f64,
    pub delta_sum_x: f64,
    /// Stock after the step.
    pub stock: f64,
}

/// Full diagnostics of one step, including the illumination matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct StepDiagnostics {
    pub l: Vec<f64>,
    pub summary: StepSummary,
}

impl StepDiagnostics {
    pub fn l_off(&self) -> usize {
        self.summary.l_off
    }
}

/// `ΣX(t+1) - ΣX(t) - Σξ - Δin`: zero for the original element B whenever
/// some lane is dark and the stock was empty.
pub fn conservation_residual(summary: &StepSummary, delta_in: f64) -> f64 {
    summary.delta_sum_x - summary.total_xi - delta_in
}

/// Argument of the outer sigmoid, `Σ_{U,l} W[(V,k),(U,l)] f(X_Ul)`, where
/// `f` is the inner sigmoid or `θ(x - 0.6)`.
///
/// Uses the structure of the cost tensor: a row term, a column term and a
/// distance term over the two neighboring steps, `O(n³)` in total.
pub fn illumination_input(x: &[f64], params: &ParamSet, inst: &TspInstance, cfg: &VariantConfig) -> Vec<f64> {
    let mut scratch = Scratch::new(inst.n());
    let mut out = vec![0.0; x.len()];
    illumination_input_into(x, params, inst, cfg, &mut scratch, &mut out);
    out
}

/// Illumination `L = 1 - outer(input)` for every lane.
pub fn compute_l(x: &[f64], params: &ParamSet, inst: &TspInstance, cfg: &VariantConfig) -> Vec<f64> {
    illumination_input(x, params, inst, cfg).into_iter().map(|a| 1.0 - outer(cfg, a)).collect()
}

#[inline]
fn inner(cfg: &VariantConfig, x: f64) -> f64 {
    if cfg.element_c.l_inner_step {
        heaviside(x - INNER_SIGMOID.theta)
    } else {
        sigmoid(INNER_SIGMOID, x)
    }
}

#[inline]
pub(crate) fn outer(cfg: &VariantConfig, a: f64) -> f64 {
    if cfg.element_c.l_outer_step {
        // θ(a + 0.5) without rounding a + 0.5.
        if a >= OUTER_SIGMOID.theta {
            1.0
        } else {
            0.0
        }
    } else {
        sigmoid(OUTER_SIGMOID, a)
    }
}

/// Contraction of a lane, given whether it is lit.
#[inline]
pub fn compute_o(x: f64, lit: bool, cfg: &VariantConfig, delta_out: f64) -> f64 {
    match (lit, cfg.element_c.o_const) {
        (false, _) => 0.0,
        (true, true) => 2.0 * delta_out,
        (true, false) => 2.0 * delta_out * sigmoid(CONTRACTION_SIGMOID, x),
    }
}

/// Per-lane elongation of dark lanes and the next stock.
///
/// With dark lanes the leak, the contracted mass and the previous stock are
/// shared and the stock empties; otherwise everything is stocked.
pub fn compute_i_and_s(
    total_o: f64,
    stock_prev: f64,
    l_off: usize,
    n: usize,
    cfg: &VariantConfig,
    delta_in: f64,
) -> (f64, f64) {
    let leak = if cfg.element_b == ElementB::ZeroDeltaIn { 0.0 } else { delta_in };
    if l_off > 0 {
        let denom = if cfg.element_b == ElementB::DenomN { n } else { l_off };
        ((leak + total_o + stock_prev) / denom as f64, 0.0)
    } else {
        (0.0, stock_prev + leak + total_o)
    }
}

/// One fresh fluctuation per lane, row-major.
pub fn sample_fluctuations<R: Rng + ?Sized>(cfg: &VariantConfig, delta: f64, n: usize, rng: &mut R) -> Vec<f64> {
    let mut out = vec![0.0; n * n];
    fill_fluctuations(cfg, delta, rng, &mut out);
    out
}

fn fill_fluctuations<R: Rng + ?Sized>(cfg: &VariantConfig, delta: f64, rng: &mut R, out: &mut [f64]) {
    match cfg.element_a {
        ElementA::Zero => out.fill(0.0),
        ElementA::Uniform if delta == 0.0 => out.fill(0.0),
        ElementA::Uniform => {
            let dist = Uniform::new_inclusive(-delta, delta).expect("delta is finite and nonnegative");
            out.iter_mut().for_each(|v| *v = dist.sample(rng));
        }
        ElementA::Normal => {
            let sd = cfg.normal_sd;
            out.iter_mut().for_each(|v| {
                let z: f64 = StandardNormal.sample(rng);
                *v = sd * z;
            });
        }
    }
}

struct Scratch {
    s: Vec<f64>,
    neighbors: Vec<f64>,
    row_excl: Vec<f64>,
    col_excl: Vec<f64>,
}

impl Scratch {
    fn new(n: usize) -> Self {
        Self { s: vec![0.0; n * n], neighbors: vec![0.0; n * n], row_excl: vec![0.0; n * n], col_excl: vec![0.0; n * n] }
    }
}

fn illumination_input_into(
    x: &[f64],
    params: &ParamSet,
    inst: &TspInstance,
    cfg: &VariantConfig,
    sc: &mut Scratch,
    out: &mut [f64],
) {
    let n = inst.n();
    assert_eq!(x.len(), n * n, "branch matrix must be n x n");
    for (s, &xi) in sc.s.iter_mut().zip(x) {
        *s = inner(cfg, xi);
    }
    let s = &sc.s;

    // Sums over a row or column that leave out the lane itself, from prefix
    // and suffix sums so the result does not depend on that lane's value.
    for v in 0..n {
        let mut acc = 0.0;
        for k in 0..n {
            sc.row_excl[v * n + k] = acc;
            acc += s[v * n + k];
        }
        let mut acc = 0.0;
        for k in (0..n).rev() {
            sc.row_excl[v * n + k] += acc;
            acc += s[v * n + k];
        }
    }
    for k in 0..n {
        let mut acc = 0.0;
        for v in 0..n {
            sc.col_excl[v * n + k] = acc;
            acc += s[v * n + k];
        }
        let mut acc = 0.0;
        for v in (0..n).rev() {
            sc.col_excl[v * n + k] += acc;
            acc += s[v * n + k];
        }
    }

    for u in 0..n {
        let row = &s[u * n..(u + 1) * n];
        for k in 0..n {
            sc.neighbors[u * n + k] = row[(k + n - 1) % n] + row[(k + 1) % n];
        }
    }

    // Distance term. d(v, v) = 0, so the u = v product vanishes.
    let dist = inst.matrix();
    for v in 0..n {
        let acc = &mut out[v * n..(v + 1) * n];
        acc.fill(0.0);
        for u in 0..n {
            let d = dist[v * n + u];
            let nb = &sc.neighbors[u * n..(u + 1) * n];
            for (a, &b) in acc.iter_mut().zip(nb) {
                *a += d * b;
            }
        }
    }

    for i in 0..n * n {
        out[i] = -params.lambda * sc.row_excl[i] - params.mu * sc.col_excl[i] - params.nu * out[i];
    }
}

/// Reusable buffers for stepping one trial.
pub struct Stepper<'a> {
    inst: &'a TspInstance,
    params: ParamSet,
    cfg: VariantConfig,
    scratch: Scratch,
    l: Vec<f64>,
    xi: Vec<f64>,
    next: Vec<f64>,
}

impl<'a> Stepper<'a> {
    pub fn new(inst: &'a TspInstance, params: ParamSet, cfg: VariantConfig) -> Self {
        let n = inst.n();
        Self {
            inst,
            params,
            cfg,
            scratch: Scratch::new(n),
            l: vec![0.0; n * n],
            xi: vec![0.0; n * n],
            next: vec![0.0; n * n],
        }
    }

    /// Illumination computed by the last call to [`Stepper::advance`].
    pub fn illumination(&self) -> &[f64] {
        &self.l
    }

    /// Fluctuations drawn by the last call to [`Stepper::advance`].
    pub fn fluctuations(&self) -> &[f64] {
        &self.xi
    }

    pub fn advance<R: Rng + ?Sized>(&mut self, state: &mut AmoebaState, rng: &mut R) -> StepSummary {
        let n = self.inst.n();
        assert_eq!(state.n, n, "state and map sizes differ");
        let (params, cfg) = (&self.params, &self.cfg);

        illumination_input_into(&state.x, params, self.inst, cfg, &mut self.scratch, &mut self.l);
        let mut l_off = 0;
        let mut total_o = 0.0;
        for i in 0..n * n {
            let l = 1.0 - outer(cfg, self.l[i]);
            self.l[i] = l;
            let lit = l > ILLUMINATION_THRESHOLD;
            let o = compute_o(state.x[i], lit, cfg, params.delta_out);
            // Contraction is kept in `next` until the update below.
            self.next[i] = o;
            total_o += o;
            if !lit {
                l_off += 1;
            }
        }

        let (i_value, stock_next) = compute_i_and_s(total_o, state.stock, l_off, n, cfg, params.delta_in);
        let elongation = match cfg.element_b {
            ElementB::ScaleI(f) => f * i_value,
            _ => i_value,
        };

        fill_fluctuations(cfg, params.delta, rng, &mut self.xi);
        let total_xi: f64 = self.xi.iter().sum();

        let sum_before = state.sum_x();
        for i in 0..n * n {
            let change = if self.l[i] > ILLUMINATION_THRESHOLD { -self.next[i] } else { elongation };
            self.next[i] = state.x[i] + change + self.xi[i];
        }
        std::mem::swap(&mut state.x, &mut self.next);
        let sum_after = state.sum_x();
        state.stock = stock_next;
        state.t += 1;

        StepSummary {
            t: state.t,
            l_off,
            total_o,
            total_xi,
            i_value,
            sum_x: sum_after,
            delta_sum_x: sum_after - sum_before,
            stock: stock_next,
        }
    }
}

/// Advances `state` by one step and returns the new state with diagnostics.
pub fn step<R: Rng + ?Sized>(
    state: &AmoebaState,
    inst: &TspInstance,
    params: &ParamSet,
    cfg: &VariantConfig,
    rng: &mut R,
) -> (AmoebaState, StepDiagnostics) {
    let mut stepper = Stepper::new(inst, *params, *cfg);
    let mut next = state.clone();
    let summary = stepper.advance(&mut next, rng);
    (next, StepDiagnostics { l: stepper.l, summary })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cost::cost_weight;
    use crate::instance::generate_map;
    use crate::seed::rng_from;
    use crate::tour::Tour;
    use crate::variant::{preset, ElementC};
    use proptest::prelude::{prop_assert, prop_assert_eq, proptest};

    fn setup(n: usize, seed: u64) -> (TspInstance, ParamSet) {
        let inst = generate_map(n, seed, 100.0, 17.0).unwrap();
        let params = ParamSet::default().calibrated(&inst);
        (inst, params)
    }

    /// Direct quadruple sum over the cost tensor.
    fn naive_input(x: &[f64], params: &ParamSet, inst: &TspInstance, cfg: &VariantConfig) -> Vec<f64> {
        let n = inst.n();
        let mut out = vec![0.0; n * n];
        for v in 0..n {
            for k in 0..n {
                let mut a = 0.0;
                for u in 0..n {
                    for l in 0..n {
                        a += cost_weight(v, k, u, l, params, inst) * inner(cfg, x[u * n + l]);
                    }
                }
                out[v * n + k] = a;
            }
        }
        out
    }

    fn random_x(n: usize, seed: u64) -> Vec<f64> {
        let mut rng = rng_from(seed);
        (0..n * n).map(|_| rng.random_range(-0.3..1.2)).collect()
    }

    /// Low background with a row collision in row 0 and a column collision
    /// at step 1, so both lit and dark lanes occur.
    fn sparse_x(n: usize, seed: u64) -> Vec<f64> {
        let mut rng = rng_from(seed);
        let mut x: Vec<f64> = (0..n * n).map(|_| rng.random_range(-0.1..0.3)).collect();
        x[0] = 1.0;
        x[1] = 1.0;
        x[n + 1] = 0.95;
        x
    }

    #[test]
    fn sigmoid_values() {
        assert_eq!(sigmoid(SigmoidParams { gamma: 35.0, theta: 0.6 }, 0.6), 0.5);
        let deep = sigmoid(OUTER_SIGMOID, 0.0);
        assert!((deep - 1.0 / (1.0 + (-500f64).exp())).abs() < 1e-12);
        assert!((deep - 1.0).abs() < 1e-12);
        let x = 0.6 + 3f64.ln() / 20.0;
        assert!((sigmoid(CONTRACTION_SIGMOID, x) - 0.75).abs() < 1e-12);
        assert_eq!(sigmoid(OUTER_SIGMOID, -1e6), 0.0);
        assert_eq!(heaviside(0.0), 1.0);
        assert_eq!(heaviside(-1e-300), 0.0);
    }

    #[test]
    fn empty_state_is_dark() {
        let (inst, p) = setup(10, 1);
        let l = compute_l(&vec![0.0; 100], &p, &inst, &VariantConfig::original());
        assert!(l.iter().all(|&v| v.abs() < 1e-6));
        assert!(l.iter().all(|&v| v <= ILLUMINATION_THRESHOLD));
    }

    #[test]
    fn fast_input_matches_quadruple_sum() {
        for (n, seed) in [(3usize, 1u64), (4, 2), (5, 3), (7, 4)] {
            let (inst, p) = setup(n, seed);
            let x = random_x(n, seed + 50);
            for name in ["original", "c2", "c3"] {
                let cfg = preset(name).unwrap();
                let fast = illumination_input(&x, &p, &inst, &cfg);
                let slow = naive_input(&x, &p, &inst, &cfg);
                for (a, b) in fast.iter().zip(&slow) {
                    assert!((a - b).abs() < 1e-12, "n={n} {name}: {a} vs {b}");
                }
            }
        }
    }

    #[test]
    fn outer_step_boundary_is_dark() {
        let (inst, p) = setup(5, 2);
        let cfg = VariantConfig {
            element_c: ElementC { l_outer_step: true, l_inner_step: true, o_const: false },
            ..VariantConfig::original()
        };
        let mut x = vec![0.0; 25];
        x[0] = 1.0; // city 0 at step 0
        let input = illumination_input(&x, &p, &inst, &cfg);
        // Same row, step 2 is not adjacent to step 0: only the row penalty.
        assert_eq!(input[2], -0.5);
        // Same column, city 1.
        assert_eq!(input[5], -0.5);
        let l = compute_l(&x, &p, &inst, &cfg);
        assert_eq!(l[2], 0.0);
        assert_eq!(l[5], 0.0);
    }

    #[test]
    fn tour_lanes_stay_dark() {
        let (inst, p) = setup(4, 7);
        let tour = Tour::new(vec![1, 3, 0, 2]).unwrap();
        let x = tour.to_matrix(1.0);
        let cfg = VariantConfig::original();
        let input = naive_input(&x, &p, &inst, &cfg);
        let l = compute_l(&x, &p, &inst, &cfg);
        for (k, &v) in tour.cities().iter().enumerate() {
            let i = v * 4 + k;
            assert!(input[i] >= -0.5, "tour lane input {}", input[i]);
            assert!(l[i] < ILLUMINATION_THRESHOLD);
        }
        // Off-tour lanes collide with a row and a column and are lit.
        for i in 0..16 {
            if x[i] == 0.0 {
                assert!(l[i] > ILLUMINATION_THRESHOLD);
            }
        }
    }

    #[test]
    fn contraction_cases() {
        let orig = VariantConfig::original();
        let c1 = preset("c1").unwrap();
        assert!((compute_o(0.6, true, &orig, 0.001) - 0.001).abs() < 1e-18);
        assert_eq!(compute_o(-3.0, true, &c1, 0.001), 0.002);
        assert_eq!(compute_o(0.9, false, &orig, 0.001), 0.0);
        assert_eq!(compute_o(0.9, false, &c1, 0.001), 0.0);
    }

    #[test]
    fn elongation_and_stock_cases() {
        let orig = VariantConfig::original();
        let (i, s) = compute_i_and_s(0.0, 0.0, 400, 20, &orig, 0.001);
        assert!((i - 2.5e-6).abs() < 1e-20);
        assert_eq!(s, 0.0);
        let (i, _) = compute_i_and_s(0.0, 0.0, 400, 20, &preset("b4").unwrap(), 0.001);
        assert!((i - 5e-5).abs() < 1e-20);
        let (i, s) = compute_i_and_s(0.004, 0.0, 0, 20, &orig, 0.001);
        assert_eq!(i, 0.0);
        assert!((s - 0.005).abs() < 1e-18);
        let (i, s) = compute_i_and_s(0.004, 0.0, 0, 20, &preset("b3").unwrap(), 0.001);
        assert_eq!(i, 0.0);
        assert_eq!(s, 0.004);
        let (i, s) = compute_i_and_s(0.01, 0.02, 3, 20, &orig, 0.001);
        assert!((i - 0.031 / 3.0).abs() < 1e-15);
        assert_eq!(s, 0.0);
    }

    #[test]
    fn fluctuation_distributions() {
        let mut rng = rng_from(5);
        let zero = sample_fluctuations(&preset("a1").unwrap(), 0.003, 10, &mut rng);
        assert!(zero.iter().all(|&v| v == 0.0));

        let uni = sample_fluctuations(&VariantConfig::original(), 0.003, 1000, &mut rng);
        assert!(uni.iter().all(|v| v.abs() <= 0.003));
        let mean = uni.iter().sum::<f64>() / uni.len() as f64;
        assert!(mean.abs() < 3e-5, "uniform mean {mean}");

        let nrm = sample_fluctuations(&preset("a2").unwrap(), 0.003, 1000, &mut rng);
        let m = nrm.iter().sum::<f64>() / nrm.len() as f64;
        let var = nrm.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (nrm.len() - 1) as f64;
        assert!((var.sqrt() - 0.003).abs() < 0.003 * 0.02, "normal sd {}", var.sqrt());
        // Untruncated.
        assert!(nrm.iter().any(|v| v.abs() > 0.003));
    }

    #[test]
    fn dark_lane_without_noise_gains_exactly_i() {
        let (inst, p) = setup(6, 3);
        let cfg = preset("a1").unwrap();
        let mut state = AmoebaState::new(6);
        state.x = sparse_x(6, 8);
        let (next, diag) = step(&state, &inst, &p, &cfg, &mut rng_from(0));
        assert!(diag.l_off() > 0);
        let mut checked = 0;
        for i in 0..36 {
            if diag.l[i] <= ILLUMINATION_THRESHOLD {
                assert_eq!(next.x[i], state.x[i] + diag.summary.i_value);
                checked += 1;
            }
        }
        assert_eq!(checked, diag.l_off());
        assert_eq!(next.t, 1);
    }

    #[test]
    fn all_lit_stocks_everything() {
        let (inst, p) = setup(5, 4);
        let cfg = preset("a1").unwrap();
        let mut state = AmoebaState::new(5);
        state.x = vec![1.0; 25];
        state.stock = 0.01;
        let (next, diag) = step(&state, &inst, &p, &cfg, &mut rng_from(0));
        assert_eq!(diag.l_off(), 0);
        assert!((diag.summary.delta_sum_x + diag.summary.total_o).abs() < 1e-12);
        assert!((next.stock - (0.01 + p.delta_in + diag.summary.total_o)).abs() < 1e-15);
    }

    #[test]
    fn conservation_probe() {
        let (inst, p) = setup(6, 9);
        let mut state = AmoebaState::new(6);
        state.x = sparse_x(6, 10);
        let run = |name: &str| {
            let cfg = preset(name).unwrap();
            let cfg = VariantConfig { element_a: ElementA::Zero, ..cfg };
            let (_, diag) = step(&state, &inst, &p, &cfg, &mut rng_from(0));
            assert!(diag.l_off() > 0 && diag.l_off() < 36);
            assert!(diag.summary.total_o > 0.0);
            diag.summary
        };
        let orig = run("original");
        assert!(conservation_residual(&orig, p.delta_in).abs() < 1e-12);
        let b3 = run("b3");
        assert!((conservation_residual(&b3, p.delta_in) + p.delta_in).abs() < 1e-12);
        let b2 = run("b2");
        let mass = p.delta_in + b2.total_o;
        assert!((conservation_residual(&b2, p.delta_in) - 0.1 * mass).abs() < 1e-12);
        assert!(conservation_residual(&b2, p.delta_in) > 0.0);
    }

    #[test]
    fn noiseless_trajectory_replays() {
        let (inst, p) = setup(8, 1);
        let cfg = preset("a1").unwrap();
        let run = || {
            let mut st = AmoebaState::new(8);
            let mut stepper = Stepper::new(&inst, p, cfg);
            let mut rng = rng_from(1);
            for _ in 0..300 {
                stepper.advance(&mut st, &mut rng);
            }
            st
        };
        let a = run();
        let b = run();
        assert_eq!(a, b);
        // Without noise all lanes stay identical from the empty start.
        assert!(a.x.iter().all(|&v| v == a.x[0]));
    }

    #[test]
    fn mass_plus_stock_grows_by_leak() {
        let (inst, p) = setup(5, 6);
        let cfg = preset("a1").unwrap();
        let mut st = AmoebaState::new(5);
        st.x = vec![1.0; 25];
        let mut stepper = Stepper::new(&inst, p, cfg);
        let mut rng = rng_from(0);
        let mut saw_all_lit = false;
        let mut saw_release = false;
        for _ in 0..800 {
            let before = st.sum_x() + st.stock;
            let stock_before = st.stock;
            let s = stepper.advance(&mut st, &mut rng);
            saw_all_lit |= s.l_off == 0;
            saw_release |= s.l_off > 0 && stock_before > 0.0;
            let after = st.sum_x() + st.stock;
            assert!((after - before - p.delta_in).abs() < 1e-12);
            assert!(st.stock >= 0.0);
        }
        assert!(saw_all_lit && saw_release);
    }

    #[test]
    fn outer_step_agrees_away_from_boundary() {
        let c2 = preset("c2").unwrap();
        let orig = VariantConfig::original();
        for seed in 0..20 {
            let (inst, p) = setup(6, seed);
            let x = random_x(6, seed + 100);
            let input = illumination_input(&x, &p, &inst, &orig);
            let l_orig = compute_l(&x, &p, &inst, &orig);
            let l_c2 = compute_l(&x, &p, &inst, &c2);
            for i in 0..36 {
                if (input[i] + 0.5).abs() > 0.05 {
                    assert_eq!(l_orig[i] > 0.5, l_c2[i] > 0.5);
                }
            }
        }
    }

    #[test]
    fn relabeling_cities_permutes_the_step() {
        let (inst, p) = setup(6, 12);
        let perm = [3usize, 0, 5, 1, 4, 2];
        let mut d = vec![0.0; 36];
        for v in 0..6 {
            for u in 0..6 {
                d[perm[v] * 6 + perm[u]] = inst.d(v, u);
            }
        }
        let relabeled = TspInstance::from_matrix(6, d).unwrap();
        let x = random_x(6, 13);
        let mut y = vec![0.0; 36];
        for v in 0..6 {
            for k in 0..6 {
                y[perm[v] * 6 + k] = x[v * 6 + k];
            }
        }
        let cfg = preset("a1").unwrap();
        let mut a = AmoebaState::new(6);
        a.x = x;
        let mut b = AmoebaState::new(6);
        b.x = y;
        let (a1, _) = step(&a, &inst, &p, &cfg, &mut rng_from(0));
        let (b1, _) = step(&b, &relabeled, &p, &cfg, &mut rng_from(0));
        for v in 0..6 {
            for k in 0..6 {
                assert!((a1.x[v * 6 + k] - b1.x[perm[v] * 6 + k]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn same_rng_same_step() {
        let (inst, p) = setup(7, 2);
        let mut st = AmoebaState::new(7);
        st.x = random_x(7, 3);
        for name in ["original", "a2", "improved"] {
            let cfg = preset(name).unwrap();
            let (a, da) = step(&st, &inst, &p, &cfg, &mut rng_from(77));
            let (b, db) = step(&st, &inst, &p, &cfg, &mut rng_from(77));
            assert_eq!(a, b);
            assert_eq!(da, db);
        }
    }

    proptest! {
        #[test]
        fn illumination_is_monotone(seed in 0u64..500, lane in 0usize..25, bump in 0.0f64..1.5) {
            let (inst, p) = setup(5, seed % 7);
            let x = random_x(5, seed);
            let mut y = x.clone();
            y[lane] += bump;
            for name in ["original", "c2", "c3"] {
                let cfg = preset(name).unwrap();
                let lx = compute_l(&x, &p, &inst, &cfg);
                let ly = compute_l(&y, &p, &inst, &cfg);
                for i in 0..25 {
                    prop_assert!(ly[i] >= lx[i], "{} lane {} {} -> {}", name, i, lx[i], ly[i]);
                }
                prop_assert_eq!(lx[lane], ly[lane]);
            }
        }
    }
}
