//! TOML run configuration.
//!
//! ```toml
//! preset = "improved"          # or element_a / element_b / element_c
//! n = 20
//! trials = 200
//! max_iters = 3000
//! seed = 1
//! workers = 0
//! map_policy = "fresh"         # or "fixed:SEED"
//!
//! [params]
//! lambda = 0.5
//! mu = 0.5
//! delta = 0.003
//! delta_out = 0.001
//! delta_in = 0.001
//! # nu = 0.00176              # fixed ν; omit to calibrate per map
//!
//! [output]
//! results = "results.csv"
//! ```

use std::path::{Path, PathBuf};

use amoeba_tsp::variant::{preset, ElementA, ElementB, ElementC, VariantConfig, DEFAULT_NORMAL_SD};
use amoeba_tsp::ParamSet;
use anyhow::{bail, Context, Result};
use serde::Deserialize;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfigFile {
    pub preset: Option<String>,
    pub element_a: Option<ElementA>,
    pub element_b: Option<ElementB>,
    pub element_c: Option<ElementC>,
    pub normal_sd: Option<f64>,
    #[serde(default)]
    pub params: ParamsSection,
    pub n: Option<usize>,
    pub ns: Option<Vec<usize>>,
    pub trials: Option<usize>,
    pub max_iters: Option<u64>,
    pub seed: Option<u64>,
    pub workers: Option<usize>,
    pub map_policy: Option<String>,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsSection {
    pub lambda: Option<f64>,
    pub mu: Option<f64>,
    pub nu: Option<f64>,
    pub delta: Option<f64>,
    pub delta_out: Option<f64>,
    pub delta_in: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub results: Option<PathBuf>,
    pub fit: Option<PathBuf>,
    pub plot_dir: Option<PathBuf>,
}

impl RunConfigFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("in {}", path.display()))
    }

    pub fn parse(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text)?;
        let explicit = cfg.element_a.is_some() || cfg.element_b.is_some() || cfg.element_c.is_some();
        if cfg.preset.is_some() && explicit {
            bail!("`preset` and explicit element fields are mutually exclusive");
        }
        Ok(cfg)
    }

    /// Variant named by the file, if it names one.
    pub fn variant(&self) -> Result<Option<(String, VariantConfig)>> {
        if let Some(name) = &self.preset {
            let mut cfg = preset(name)?;
            if let Some(sd) = self.normal_sd {
                cfg.normal_sd = sd;
            }
            return Ok(Some((name.clone(), cfg)));
        }
        if self.element_a.is_none() && self.element_b.is_none() && self.element_c.is_none() {
            return Ok(None);
        }
        let base = VariantConfig::original();
        let cfg = VariantConfig {
            element_a: self.element_a.unwrap_or(base.element_a),
            element_b: self.element_b.unwrap_or(base.element_b),
            element_c: self.element_c.unwrap_or_default(),
            normal_sd: self.normal_sd.unwrap_or(DEFAULT_NORMAL_SD),
        };
        Ok(Some(("custom".to_string(), cfg)))
    }

    /// Base parameters with `ν` left for calibration, plus a fixed `ν` if set.
    pub fn params(&self) -> (ParamSet, Option<f64>) {
        let d = ParamSet::default();
        let p = &self.params;
        let base = ParamSet {
            lambda: p.lambda.unwrap_or(d.lambda),
            mu: p.mu.unwrap_or(d.mu),
            nu: 0.0,
            delta: p.delta.unwrap_or(d.delta),
            delta_out: p.delta_out.unwrap_or(d.delta_out),
            delta_in: p.delta_in.unwrap_or(d.delta_in),
        };
        (base, p.nu)
    }
}
