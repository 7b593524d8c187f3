//! Orthogonal switches for the three model elements and the named presets.
//!
//! - Element A: the fluctuation distribution.
//! - Element B: how dark lanes share the elongation mass.
//! - Element C: which sigmoids are replaced by constants or step functions.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ElementA {
    /// Uniform on `[-δ, δ]`.
    Uniform,
    /// No fluctuations (A-1).
    Zero,
    /// Untruncated `Normal(0, normal_sd)` (A-2).
    Normal,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ElementB {
    Original,
    /// Elongation applied to dark lanes is multiplied by this factor
    /// (B-1 uses 0.9, B-2 uses 1.1). Stock bookkeeping is unchanged.
    ScaleI(f64),
    /// Hub leak removed from elongation and stock (B-3).
    ZeroDeltaIn,
    /// Elongation mass divided by `n` instead of the dark-lane count (B-4).
    DenomN,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ElementC {
    /// Contraction of a lit lane is the constant `2Δout` (C-1).
    pub o_const: bool,
    /// Outer sigmoid of the illumination replaced by `θ(x + 0.5)` (C-2).
    pub l_outer_step: bool,
    /// Inner sigmoid of the illumination replaced by `θ(x - 0.6)` (C-3).
    pub l_inner_step: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VariantConfig {
    pub element_a: ElementA,
    pub element_b: ElementB,
    #[serde(default)]
    pub element_c: ElementC,
    /// Standard deviation of [`ElementA::Normal`] fluctuations.
    #[serde(default = "default_normal_sd")]
    pub normal_sd: f64,
}

pub const DEFAULT_NORMAL_SD: f64 = 0.003;

fn default_normal_sd() -> f64 {
    DEFAULT_NORMAL_SD
}

impl Default for VariantConfig {
    fn default() -> Self {
        Self::original()
    }
}

impl VariantConfig {
    pub fn original() -> Self {
        Self {
            element_a: ElementA::Uniform,
            element_b: ElementB::Original,
            element_c: ElementC::default(),
            normal_sd: DEFAULT_NORMAL_SD,
        }
    }

    /// Normal fluctuations, `n` as the elongation denominator and constant
    /// contraction.
    pub fn improved() -> Self {
        Self {
            element_a: ElementA::Normal,
            element_b: ElementB::DenomN,
            element_c: ElementC { o_const: true, ..ElementC::default() },
            normal_sd: DEFAULT_NORMAL_SD,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let ElementB::ScaleI(f) = self.element_b {
            if !(f.is_finite() && f > 0.0) {
                return Err(Error::InvalidParams(format!("elongation factor must be positive, got {f}")));
            }
        }
        if !(self.normal_sd.is_finite() && self.normal_sd > 0.0) {
            return Err(Error::InvalidParams(format!("normal_sd must be positive, got {}", self.normal_sd)));
        }
        Ok(())
    }
}

pub const PRESET_NAMES: [&str; 11] = ["original", "a1", "a2", "b1", "b2", "b3", "b4", "c1", "c2", "c3", "improved"];

pub fn preset(name: &str) -> Result<VariantConfig> {
    let base = VariantConfig::original();
    let with_c = |c: ElementC| VariantConfig { element_c: c, ..base };
    let cfg = match name.to_ascii_lowercase().as_str() {
        "original" => base,
        "a1" => VariantConfig { element_a: ElementA::Zero, ..base },
        "a2" => VariantConfig { element_a: ElementA::Normal, ..base },
        "b1" => VariantConfig { element_b: ElementB::ScaleI(0.9), ..base },
        "b2" => VariantConfig { element_b: ElementB::ScaleI(1.1), ..base },
        "b3" => VariantConfig { element_b: ElementB::ZeroDeltaIn, ..base },
        "b4" => VariantConfig { element_b: ElementB::DenomN, ..base },
        "c1" => with_c(ElementC { o_const: true, ..ElementC::default() }),
        "c2" => with_c(ElementC { l_outer_step: true, ..ElementC::default() }),
        "c3" => with_c(ElementC { l_inner_step: true, ..ElementC::default() }),
        "improved" => VariantConfig::improved(),
        _ => return Err(Error::UnknownPreset(name.to_string())),
    };
    Ok(cfg)
}
