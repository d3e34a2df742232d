//! The self-describing record written next to every run's outputs.

use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use saulyev::harness::InitialCondition;
use saulyev::scheme::{SchemeConfig, SimulationOptions};
use saulyev::{Grid, Potential};
use serde::{Deserialize, Serialize};

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    pub max_stable_tau: f64,
    pub beta: f64,
    pub kappa_required: f64,
    pub enforced: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub dim: usize,
    #[serde(rename = "M")]
    pub points: usize,
    #[serde(rename = "L")]
    pub length: f64,
}

impl GridSpec {
    pub fn grid(&self) -> Result<Grid> {
        Ok(Grid::new(self.dim, self.points, self.length)?)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Outputs {
    pub diagnostics: String,
    pub snapshots: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub grid: GridSpec,
    pub config: SchemeConfig,
    pub potential: Potential,
    pub initial_condition: InitialCondition,
    pub t_end: f64,
    pub steps: usize,
    pub options: SimulationOptions,
    pub thresholds: Thresholds,
    pub outputs: Outputs,
    /// `completed`, or the error that stopped the run.
    pub status: String,
}

impl RunManifest {
    pub fn read(path: &Path) -> Result<Self> {
        let text =
            fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        let path = dir.join(MANIFEST_FILE);
        let text = serde_json::to_string_pretty(self)?;
        fs::write(&path, text + "\n").with_context(|| format!("writing {}", path.display()))
    }
}
