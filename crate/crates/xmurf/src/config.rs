//! Pipeline configuration (TOML) and per-stage seed derivation.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use xmurf_core::ordering::Linkage;
use xmurf_core::sim::{RoadConfig, SimConfig};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimSection {
    pub dt: f64,
    pub duration: f64,
    pub runs: usize,
    pub seed: Option<u64>,
    pub vehicles: Option<usize>,
    /// Mean time between target-speed redraws, s; 0 keeps targets fixed.
    pub retarget_interval: f64,
    pub lane_changes: bool,
    /// Remove collided vehicles from the road after `wreck_clearance` seconds.
    pub clear_wrecks: bool,
    pub wreck_clearance: f64,
}

impl Default for SimSection {
    fn default() -> Self {
        let d = SimConfig::default();
        Self {
            dt: d.dt,
            duration: d.duration,
            runs: 5,
            seed: None,
            vehicles: None,
            retarget_interval: d.retarget_interval.unwrap_or(0.0),
            lane_changes: d.lane_changes,
            clear_wrecks: d.wreck_clearance.is_some(),
            wreck_clearance: d.wreck_clearance.unwrap_or(30.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ForestSection {
    pub trees: usize,
    pub seed: Option<u64>,
}

impl Default for ForestSection {
    fn default() -> Self {
        Self {
            trees: 300,
            seed: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OrderingSection {
    pub linkage: Linkage,
    pub optimal: bool,
    /// Write cluster ranges from a cut of the dendrogram into this many clusters.
    pub suggest: Option<usize>,
    /// Suggested clusters smaller than this are left unlabelled.
    pub min_size: usize,
}

impl Default for OrderingSection {
    fn default() -> Self {
        Self {
            linkage: Linkage::Average,
            optimal: false,
            suggest: None,
            min_size: 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClassifySection {
    pub trees: usize,
    pub ratio: f64,
    pub seed: Option<u64>,
}

impl Default for ClassifySection {
    fn default() -> Self {
        Self {
            trees: 300,
            ratio: 1.0,
            seed: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PathsSection {
    /// Default location of every artifact not given on the command line.
    pub work_dir: PathBuf,
}

impl Default for PathsSection {
    fn default() -> Self {
        Self {
            work_dir: PathBuf::from("."),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    /// Master seed; stages without an explicit seed derive theirs from it.
    pub seed: u64,
    pub road: RoadConfig,
    pub sim: SimSection,
    pub xmurf: ForestSection,
    pub ordering: OrderingSection,
    pub classify: ClassifySection,
    pub paths: PathsSection,
}

/// Stage seed: the first eight bytes (little endian) of
/// `SHA-256(master.to_le_bytes() || label)`.
pub fn stage_seed(master: u64, label: &str) -> u64 {
    let digest = Sha256::new()
        .chain_update(master.to_le_bytes())
        .chain_update(label.as_bytes())
        .finalize();
    u64::from_le_bytes(digest[..8].try_into().expect("32-byte digest"))
}

impl PipelineConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    pub fn validate(&self) -> Result<()> {
        self.road.validate()?;
        for k in 0..self.sim.runs.max(1) {
            self.sim_config(k).validate()?;
        }
        if self.sim.runs == 0 {
            return Err(Error::Config("sim.runs must be at least 1".into()));
        }
        if self.xmurf.trees == 0 || self.classify.trees == 0 {
            return Err(Error::Config("forests need at least one tree".into()));
        }
        if !(self.classify.ratio >= 0.0) {
            return Err(Error::Config("classify.ratio must be non-negative".into()));
        }
        if self.ordering.suggest == Some(0) {
            return Err(Error::Config("ordering.suggest must be at least 1".into()));
        }
        Ok(())
    }

    pub fn sim_seed(&self) -> u64 {
        self.sim.seed.unwrap_or_else(|| stage_seed(self.seed, "sim"))
    }

    pub fn xmurf_seed(&self) -> u64 {
        self.xmurf.seed.unwrap_or_else(|| stage_seed(self.seed, "xmurf"))
    }

    pub fn classify_seed(&self) -> u64 {
        self.classify.seed.unwrap_or_else(|| stage_seed(self.seed, "clf"))
    }

    /// Simulation parameters of run `k`.
    pub fn sim_config(&self, k: usize) -> SimConfig {
        SimConfig {
            dt: self.sim.dt,
            duration: self.sim.duration,
            seed: self.sim_seed().wrapping_add(k as u64),
            vehicles: self.sim.vehicles,
            retarget_interval: (self.sim.retarget_interval > 0.0).then_some(self.sim.retarget_interval),
            lane_changes: self.sim.lane_changes,
            wreck_clearance: self.sim.clear_wrecks.then_some(self.sim.wreck_clearance),
        }
    }

    pub fn work_path(&self, name: &str) -> PathBuf {
        self.paths.work_dir.join(name)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_is_default() {
        assert_eq!(PipelineConfig::from_toml("").unwrap(), PipelineConfig::default());
    }

    #[test]
    fn sections_parse_and_override() {
        let cfg = PipelineConfig::from_toml(
            "seed = 7\n[road]\nlanes = 2\n[sim]\nruns = 2\nretarget_interval = 0\n[ordering]\nlinkage = \"complete\"\n",
        )
        .unwrap();
        assert_eq!(cfg.road.lanes, 2);
        assert_eq!(cfg.road.lane_width, RoadConfig::default().lane_width);
        assert_eq!(cfg.ordering.linkage, Linkage::Complete);
        assert_eq!(cfg.sim_config(1).retarget_interval, None);
        assert_eq!(cfg.sim_config(1).seed, cfg.sim_seed().wrapping_add(1));
    }

    #[test]
    fn invalid_values_are_config_errors() {
        for text in ["[road]\nlanes = 4", "[sim]\ndt = 1.0", "bogus = 1", "[classify]\nratio = -1.0"] {
            let err = PipelineConfig::from_toml(text).unwrap_err();
            assert_eq!(err.exit_code(), 2, "{text}: {err}");
        }
    }

    #[test]
    fn stage_seeds_are_distinct_and_stable() {
        let s = [stage_seed(1, "sim"), stage_seed(1, "xmurf"), stage_seed(1, "clf")];
        assert!(s[0] != s[1] && s[1] != s[2] && s[0] != s[2]);
        assert_eq!(stage_seed(1, "sim"), s[0]);
        assert_ne!(stage_seed(2, "sim"), s[0]);
        let cfg = PipelineConfig {
            xmurf: ForestSection { seed: Some(5), ..ForestSection::default() },
            ..PipelineConfig::default()
        };
        assert_eq!(cfg.xmurf_seed(), 5);
    }
}
