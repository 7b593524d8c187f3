//! The Hopfield–Tank cost tensor over lanes `(city, step)`.

use crate::instance::TspInstance;
use crate::params::ParamSet;

/// Coupling `W[(v,k),(u,l)]` between lane `(v,k)` and lane `(u,l)`.
///
/// Indices are zero-based; steps `n-1` and `0` are adjacent (closing edge).
/// Panics if an index is out of range.
pub fn cost_weight(v: usize, k: usize, u: usize, l: usize, params: &ParamSet, inst: &TspInstance) -> f64 {
    let n = inst.n();
    assert!(v < n && k < n && u < n && l < n, "lane index out of range for n = {n}");
    if v == u {
        return if k != l { -params.lambda } else { 0.0 };
    }
    if k == l {
        return -params.mu;
    }
    let adjacent = k.abs_diff(l) == 1 || (k == n - 1 && l == 0) || (k == 0 && l == n - 1);
    if adjacent {
        -params.nu * inst.d(v, u)
    } else {
        0.0
    }
}

/// `E = -½ Σ W[(v,k),(u,l)] x[v,k] x[u,l]` for a row-major binary matrix.
pub fn cost_function(x_bin: &[bool], params: &ParamSet, inst: &TspInstance) -> f64 {
    let n = inst.n();
    assert_eq!(x_bin.len(), n * n, "binary matrix must be n x n");
    let support: Vec<(usize, usize)> =
        (0..n * n).filter(|&i| x_bin[i]).map(|i| (i / n, i % n)).collect();
    let mut total = 0.0;
    for &(v, k) in &support {
        for &(u, l) in &support {
            total += cost_weight(v, k, u, l, params, inst);
        }
    }
    -0.5 * total
}
