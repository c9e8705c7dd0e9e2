//! Scenario files: one JSON document per run.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use pslab_core::extremal::{
    family_cone, family_cone_frustrum, family_devils_staircase, family_staircase, ExtremalSpec,
};
use pslab_core::functionals::{young_validate, YoungConfig};
use pslab_core::YoungFunction;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScenarioKind {
    RearrangeGrid,
    VerifyBounds,
    Sweep,
    OracleSuite,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum FamilyConfig {
    Cone,
    ConeFrustrum {
        a: f64,
        rho: f64,
        rho_inner: f64,
        e: Vec<f64>,
    },
    Staircase {
        levels: Vec<(f64, f64)>,
        centers: Vec<Vec<f64>>,
    },
    DevilsStaircase {
        depth: u32,
    },
    /// A spec JSON file, relative to the config file.
    Spec {
        path: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundKind {
    TheoremMain,
    TheoremFinite,
    TheoremMorrey,
    CfBound,
    DensityBound,
    CorollaryYoung,
    CorollaryFinite,
    CoareaBound,
}

impl BoundKind {
    /// Which exponent list the bound runs over.
    pub fn exponent(self) -> Exponent {
        match self {
            BoundKind::TheoremMain | BoundKind::DensityBound | BoundKind::CoareaBound => {
                Exponent::Q
            }
            BoundKind::TheoremFinite | BoundKind::TheoremMorrey | BoundKind::CfBound => Exponent::P,
            BoundKind::CorollaryYoung | BoundKind::CorollaryFinite => Exponent::None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exponent {
    P,
    Q,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OracleKind {
    KnIdentity,
    SymdiffBound,
    LayerCake,
    Psi1,
    Psi2,
    Levelwise,
}

impl OracleKind {
    pub const ALL: [OracleKind; 6] = [
        OracleKind::KnIdentity,
        OracleKind::SymdiffBound,
        OracleKind::LayerCake,
        OracleKind::Psi1,
        OracleKind::Psi2,
        OracleKind::Levelwise,
    ];
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct YoungPair {
    pub phi: YoungConfig,
    pub psi: YoungConfig,
}

impl Default for YoungPair {
    fn default() -> Self {
        Self {
            phi: YoungConfig::Power { power: 2.0 },
            psi: YoungConfig::Power { power: 1.0 },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    #[serde(default = "default_sweep_bounds")]
    pub bounds: Vec<BoundKind>,
    #[serde(default = "default_sweep_a")]
    pub a: Vec<f64>,
    #[serde(default = "default_sweep_rho")]
    pub rho: Vec<f64>,
    /// `rho_inner / rho`.
    #[serde(default = "default_sweep_ratio")]
    pub inner_ratio: Vec<f64>,
    /// Number of offsets `|e|`, evenly spaced on `[0, rho - rho_inner]`.
    #[serde(default = "default_e_steps")]
    pub e_steps: usize,
    /// Direction of the offset; its length sets the dimension.
    #[serde(default = "default_direction")]
    pub direction: Vec<f64>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            bounds: default_sweep_bounds(),
            a: default_sweep_a(),
            rho: default_sweep_rho(),
            inner_ratio: default_sweep_ratio(),
            e_steps: default_e_steps(),
            direction: default_direction(),
        }
    }
}

fn default_sweep_bounds() -> Vec<BoundKind> {
    vec![
        BoundKind::TheoremMain,
        BoundKind::TheoremFinite,
        BoundKind::CfBound,
    ]
}
fn default_sweep_a() -> Vec<f64> {
    vec![0.3, 0.5, 0.7]
}
fn default_sweep_rho() -> Vec<f64> {
    vec![0.5]
}
fn default_sweep_ratio() -> Vec<f64> {
    vec![0.4, 0.6, 0.8]
}
fn default_e_steps() -> usize {
    5
}
fn default_direction() -> Vec<f64> {
    vec![1.0, 0.0]
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub resolution: Option<usize>,
    /// Number of random fields (or field pairs).
    pub count: Option<usize>,
    /// Thresholds for distribution functions.
    pub levels: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub scenario: ScenarioKind,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub family: Option<FamilyConfig>,
    #[serde(default = "default_p")]
    pub p: Vec<f64>,
    #[serde(default = "default_q")]
    pub q: Vec<f64>,
    /// No default: the value of the Morrey constant is the caller's choice.
    #[serde(default)]
    pub morrey_constant: Option<f64>,
    #[serde(default)]
    pub young: YoungPair,
    #[serde(default)]
    pub sweep: SweepConfig,
    #[serde(default)]
    pub grid: GridConfig,
    /// Oracle checks to run; all when absent.
    #[serde(default)]
    pub oracles: Option<Vec<OracleKind>>,
    /// Overrides the declared tolerance of every report or check.
    #[serde(default)]
    pub tolerance: Option<f64>,
    #[serde(default)]
    pub output: Option<PathBuf>,
    /// Directory of the config file, for relative paths.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

fn default_p() -> Vec<f64> {
    vec![2.0]
}
fn default_q() -> Vec<f64> {
    vec![1.0]
}

impl ScenarioConfig {
    pub fn from_str(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let config: Self = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let inner = e.into_inner();
            anyhow::anyhow!("config field `{path}`: {inner}")
        })?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let mut config = Self::from_str(&text).with_context(|| format!("in {}", path.display()))?;
        config.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(config)
    }

    fn validate(&self) -> Result<()> {
        for (name, list) in [("p", &self.p), ("q", &self.q)] {
            if list.is_empty() {
                bail!("config field `{name}`: list must be nonempty");
            }
        }
        if let Some(t) = self.tolerance {
            if !(t >= 0.0 && t.is_finite()) {
                bail!("config field `tolerance`: must be finite and nonnegative, got {t}");
            }
        }
        if let Some(m) = self.morrey_constant {
            if !(m > 0.0 && m.is_finite()) {
                bail!("config field `morrey_constant`: must be positive, got {m}");
            }
        }
        match self.scenario {
            ScenarioKind::VerifyBounds if self.family.is_none() => {
                bail!("config field `family`: required for scenario verify-bounds")
            }
            ScenarioKind::Sweep => {
                let s = &self.sweep;
                for (name, list) in [
                    ("a", &s.a),
                    ("rho", &s.rho),
                    ("inner_ratio", &s.inner_ratio),
                ] {
                    if list.is_empty() {
                        bail!("config field `sweep.{name}`: list must be nonempty");
                    }
                }
                if s.bounds.is_empty() {
                    bail!("config field `sweep.bounds`: list must be nonempty");
                }
                if s.e_steps == 0 {
                    bail!("config field `sweep.e_steps`: must be positive");
                }
                if s.direction.iter().all(|&x| x == 0.0) {
                    bail!("config field `sweep.direction`: must be nonzero");
                }
                if s.bounds.contains(&BoundKind::TheoremMorrey) && self.morrey_constant.is_none() {
                    bail!("config field `morrey_constant`: required when sweeping theorem-morrey");
                }
            }
            _ => {}
        }
        Ok(())
    }

    pub fn young(&self) -> Result<(YoungFunction, YoungFunction)> {
        let phi = young_validate(&self.young.phi).context("config field `young.phi`")?;
        let psi = young_validate(&self.young.psi).context("config field `young.psi`")?;
        Ok((phi, psi))
    }

    pub fn build_family(&self, family: &FamilyConfig) -> Result<ExtremalSpec> {
        let spec = match family {
            FamilyConfig::Cone => family_cone(2)?,
            FamilyConfig::ConeFrustrum {
                a,
                rho,
                rho_inner,
                e,
            } => family_cone_frustrum(e.len(), *a, *rho, *rho_inner, e)?,
            FamilyConfig::Staircase { levels, centers } => {
                let n = centers.first().map_or(2, Vec::len);
                family_staircase(n, levels, centers)?
            }
            FamilyConfig::DevilsStaircase { depth } => family_devils_staircase(2, *depth)?,
            FamilyConfig::Spec { path } => {
                let full = self.base_dir.join(path);
                let text = std::fs::read_to_string(&full)
                    .with_context(|| format!("reading {}", full.display()))?;
                ExtremalSpec::from_json(&text)
                    .with_context(|| format!("spec in {}", full.display()))?
            }
        };
        Ok(spec)
    }
}
