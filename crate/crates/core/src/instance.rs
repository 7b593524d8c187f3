//! TSP instances: symmetric distance matrices and the JSON map format.
//!
//! City indices are zero-based everywhere in this crate.

use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use std::path::Path;

use crate::error::{Error, Result};
use crate::seed::rng_from;

/// Generation record of a random map.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenMeta {
    pub seed: u64,
    pub mean: f64,
    pub sd: f64,
}

/// A symmetric TSP instance.
#[derive(Debug, Clone, PartialEq)]
pub struct TspInstance {
    n: usize,
    dist: Vec<f64>,
    gen: Option<GenMeta>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MapFile {
    n: usize,
    dist: Vec<f64>,
    gen: Option<GenMeta>,
}

impl TspInstance {
    /// Builds an instance from a row-major `n × n` matrix.
    ///
    /// Rejects `n < 3`, asymmetric matrices, a nonzero diagonal and
    /// nonpositive or non-finite off-diagonal entries.
    pub fn from_matrix(n: usize, dist: Vec<f64>) -> Result<Self> {
        Self::build(n, dist, None)
    }

    fn build(n: usize, dist: Vec<f64>, gen: Option<GenMeta>) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidInstance(format!("need at least 3 cities, got {n}")));
        }
        if dist.len() != n * n {
            return Err(Error::InvalidInstance(format!(
                "distance matrix has {} entries, expected {}",
                dist.len(),
                n * n
            )));
        }
        for v in 0..n {
            if dist[v * n + v] != 0.0 {
                return Err(Error::InvalidInstance(format!("d({v},{v}) must be 0")));
            }
            for u in (v + 1)..n {
                let a = dist[v * n + u];
                let b = dist[u * n + v];
                if a != b {
                    return Err(Error::InvalidInstance(format!("d({v},{u}) = {a} but d({u},{v}) = {b}")));
                }
                if !(a.is_finite() && a > 0.0) {
                    return Err(Error::InvalidInstance(format!("d({v},{u}) = {a} must be positive")));
                }
            }
        }
        Ok(Self { n, dist, gen })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn d(&self, v: usize, u: usize) -> f64 {
        self.dist[v * self.n + u]
    }

    /// Row-major distance matrix.
    pub fn matrix(&self) -> &[f64] {
        &self.dist
    }

    pub fn gen_meta(&self) -> Option<GenMeta> {
        self.gen
    }

    /// Largest two-edge path `d(V1,V2) + d(V2,V3)` over pairwise-distinct
    /// cities. For each middle city this is the sum of its two longest edges.
    pub fn max_two_edge_path(&self) -> f64 {
        let n = self.n;
        let mut best = f64::NEG_INFINITY;
        for mid in 0..n {
            let (mut first, mut second) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
            for u in (0..n).filter(|&u| u != mid) {
                let d = self.d(mid, u);
                if d > first {
                    second = first;
                    first = d;
                } else if d > second {
                    second = d;
                }
            }
            best = best.max(first + second);
        }
        best
    }

    pub fn to_json(&self) -> Result<String> {
        let file = MapFile { n: self.n, dist: self.dist.clone(), gen: self.gen };
        Ok(serde_json::to_string(&file)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: MapFile = serde_json::from_str(text)?;
        Self::build(file.n, file.dist, file.gen).map_err(|e| Error::MapFormat(e.to_string()))
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut text = self.to_json()?;
        text.push('\n');
        std::fs::write(path, text)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

/// Draws a random symmetric map with `Normal(mean, sd)` distances.
///
/// The upper triangle is drawn row by row and mirrored. Draws that are not
/// strictly positive are redrawn.
pub fn generate_map(n: usize, seed: u64, mean: f64, sd: f64) -> Result<TspInstance> {
    if n < 3 {
        return Err(Error::InvalidInstance(format!("need at least 3 cities, got {n}")));
    }
    if !(sd >= 0.0 && sd.is_finite() && mean.is_finite()) {
        return Err(Error::InvalidParams(format!("bad distance distribution: mean {mean}, sd {sd}")));
    }
    if sd == 0.0 && mean <= 0.0 {
        return Err(Error::InvalidParams(format!("zero-variance distances need a positive mean, got {mean}")));
    }
    let normal = Normal::new(mean, sd).map_err(|e| Error::InvalidParams(e.to_string()))?;
    let mut rng = rng_from(seed);
    let mut dist = vec![0.0; n * n];
    for v in 0..n {
        for u in (v + 1)..n {
            let d = loop {
                let x = normal.sample(&mut rng);
                if x > 0.0 {
                    break x;
                }
            };
            dist[v * n + u] = d;
            dist[u * n + v] = d;
        }
    }
    TspInstance::build(n, dist, Some(GenMeta { seed, mean, sd }))
}
