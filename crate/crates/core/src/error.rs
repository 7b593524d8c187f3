use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    /// The distance weight breaks `ν · max(d(V1,V2)+d(V2,V3)) ≤ min(λ, μ)`.
    #[error("distance weight {nu} is not calibrated for this map (bound {bound})")]
    Uncalibrated { nu: f64, bound: f64 },

    #[error("not a permutation of 0..{n}: {detail}")]
    NotAPermutation { n: usize, detail: String },

    #[error("brute-force search refused for n = {0} (limit 10)")]
    TooLargeForBruteForce(usize),

    #[error("unknown preset `{0}`")]
    UnknownPreset(String),

    #[error("scaling fit needs at least 3 points with successes, got {0}")]
    TooFewPoints(usize),

    #[error("map file: {0}")]
    MapFormat(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
