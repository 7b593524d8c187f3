//! Reading tours out of branch lengths, route metrics and an exhaustive
//! optimum for small maps.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::TspInstance;

/// Read-out threshold on branch length.
pub const READOUT_THRESHOLD: f64 = 0.99;

/// Largest map accepted by [`brute_force_optimum`].
pub const BRUTE_FORCE_LIMIT: usize = 10;

/// A closed tour: `cities()[k]` is the city visited at step `k`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Tour(Vec<usize>);

impl Tour {
    pub fn new(cities: Vec<usize>) -> Result<Self> {
        let n = cities.len();
        let mut seen = vec![false; n];
        for &c in &cities {
            if c >= n || seen[c] {
                return Err(Error::NotAPermutation { n, detail: format!("{cities:?}") });
            }
            seen[c] = true;
        }
        Ok(Self(cities))
    }

    pub fn identity(n: usize) -> Self {
        Self((0..n).collect())
    }

    pub fn cities(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Row-major `n × n` matrix with `value` at `(city, step)` for each visit.
    pub fn to_matrix(&self, value: f64) -> Vec<f64> {
        let n = self.0.len();
        let mut x = vec![0.0; n * n];
        for (k, &v) in self.0.iter().enumerate() {
            x[v * n + k] = value;
        }
        x
    }
}

impl TryFrom<Vec<usize>> for Tour {
    type Error = Error;
    fn try_from(v: Vec<usize>) -> Result<Self> {
        Tour::new(v)
    }
}

impl From<Tour> for Vec<usize> {
    fn from(t: Tour) -> Self {
        t.0
    }
}

impl std::fmt::Display for Tour {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|c| c.to_string()).collect();
        write!(f, "{}", parts.join("-"))
    }
}

/// Binarized branch lengths and, when they form a permutation matrix, the tour.
#[derive(Debug, Clone, PartialEq)]
pub struct DecodedSolution {
    pub n: usize,
    pub x_bin: Vec<bool>,
    pub tour: Option<Tour>,
}

/// Thresholds `x` at [`READOUT_THRESHOLD`] (inclusive) and checks that every
/// row and every column holds exactly one lane.
pub fn decode_solution(x: &[f64], n: usize) -> DecodedSolution {
    assert_eq!(x.len(), n * n, "branch matrix must be n x n");
    let x_bin: Vec<bool> = x.iter().map(|&v| v >= READOUT_THRESHOLD).collect();
    let mut city_at = vec![usize::MAX; n];
    let mut valid = true;
    'rows: for v in 0..n {
        let mut count = 0;
        for k in 0..n {
            if x_bin[v * n + k] {
                count += 1;
                if city_at[k] != usize::MAX {
                    valid = false;
                    break 'rows;
                }
                city_at[k] = v;
            }
        }
        if count != 1 {
            valid = false;
            break;
        }
    }
    // n rows with one lane each and no column collisions fill every column.
    let tour = if valid { Some(Tour(city_at)) } else { None };
    DecodedSolution { n, x_bin, tour }
}

/// Closed route length including the edge back to the first city.
///
/// Panics if the tour does not cover exactly the cities of `inst`.
pub fn route_length(tour: &Tour, inst: &TspInstance) -> f64 {
    let c = tour.cities();
    assert_eq!(c.len(), inst.n(), "tour length does not match the map");
    let n = c.len();
    (0..n).map(|k| inst.d(c[k], c[(k + 1) % n])).sum()
}

/// Mean route length of a random tour on the default map distribution.
pub fn estimated_route_length(n: usize) -> f64 {
    100.0 * n as f64
}

/// Exhaustive optimum. City 0 is pinned to step 0 and the remaining
/// `(n-1)!` orders are enumerated.
pub fn brute_force_optimum(inst: &TspInstance) -> Result<(Tour, f64)> {
    let n = inst.n();
    if n > BRUTE_FORCE_LIMIT {
        return Err(Error::TooLargeForBruteForce(n));
    }
    let mut rest: Vec<usize> = (1..n).collect();
    let mut best_len = f64::INFINITY;
    let mut best = Vec::new();
    loop {
        let mut len = inst.d(0, rest[0]) + inst.d(rest[n - 2], 0);
        for w in rest.windows(2) {
            len += inst.d(w[0], w[1]);
        }
        if len < best_len {
            best_len = len;
            best = rest.clone();
        }
        if !next_permutation(&mut rest) {
            break;
        }
    }
    let mut cities = vec![0];
    cities.extend(best);
    Ok((Tour(cities), best_len))
}

fn next_permutation(a: &mut [usize]) -> bool {
    let Some(i) = a.windows(2).rposition(|w| w[0] < w[1]) else {
        return false;
    };
    let j = a.iter().rposition(|&x| x > a[i]).unwrap();
    a.swap(i, j);
    a[i + 1..].reverse();
    true
}
