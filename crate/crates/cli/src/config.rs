//! Run configuration, read from TOML.
//!
//! Every key is optional; unknown keys are rejected. Defaults:
//!
//! ```toml
//! genus = 1
//! boundary = 1
//! b = [0.47]            # one value per boundary component; default 0.47 each
//! epsilon = 0.01        # fiber thickening
//! seed = 1
//! chains = 1            # independent walk chains, pooled in chain order
//! out_dir = "surfchar-out"
//! record_runtime = false
//!
//! [walk]                # walk and two-start
//! steps = 100000
//! burn_in = 1000
//! thinning = 10
//! curves = []           # index sets, e.g. [[1], [1, 2]]; empty = all simple non-peripheral curves
//! reference_samples = 10000
//!
//! [two_start]
//! seed2 = 2
//!
//! [sample]
//! count = 1000
//!
//! [verify]              # verify-recipes
//! trials = 100
//!
//! [rank]                # rank-check
//! samples = 100
//! min_fraction = 0.95
//!
//! [invariance]
//! curve = []            # empty = first simple non-peripheral curve
//! samples = 10000
//! threshold = 0.02
//!
//! [orbit]               # orbit-circle
//! curve = []            # empty = first simple non-peripheral curve
//! iterations = 10000
//! # trace = 0.0         # optional: reset rho(A_i) to this trace (single-index curves only)
//! ```
//!
//! Command-line flags override file values.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub genus: u32,
    pub boundary: u32,
    pub b: Option<Vec<f64>>,
    pub epsilon: f64,
    pub seed: u64,
    pub chains: usize,
    pub out_dir: PathBuf,
    pub record_runtime: bool,
    pub walk: WalkSection,
    pub two_start: TwoStartSection,
    pub sample: SampleSection,
    pub verify: VerifySection,
    pub rank: RankSection,
    pub invariance: InvarianceSection,
    pub orbit: OrbitSection,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            genus: 1,
            boundary: 1,
            b: None,
            epsilon: 1e-2,
            seed: 1,
            chains: 1,
            out_dir: PathBuf::from("surfchar-out"),
            record_runtime: false,
            walk: WalkSection::default(),
            two_start: TwoStartSection::default(),
            sample: SampleSection::default(),
            verify: VerifySection::default(),
            rank: RankSection::default(),
            invariance: InvarianceSection::default(),
            orbit: OrbitSection::default(),
        }
    }
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct WalkSection {
    pub steps: u64,
    pub burn_in: u64,
    pub thinning: u64,
    pub curves: Vec<Vec<u32>>,
    pub reference_samples: usize,
}

impl Default for WalkSection {
    fn default() -> Self {
        WalkSection {
            steps: 100_000,
            burn_in: 1_000,
            thinning: 10,
            curves: Vec::new(),
            reference_samples: 10_000,
        }
    }
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct TwoStartSection {
    pub seed2: u64,
}

impl Default for TwoStartSection {
    fn default() -> Self {
        TwoStartSection { seed2: 2 }
    }
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct SampleSection {
    pub count: usize,
}

impl Default for SampleSection {
    fn default() -> Self {
        SampleSection { count: 1_000 }
    }
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct VerifySection {
    pub trials: usize,
}

impl Default for VerifySection {
    fn default() -> Self {
        VerifySection { trials: 100 }
    }
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct RankSection {
    pub samples: usize,
    pub min_fraction: f64,
}

impl Default for RankSection {
    fn default() -> Self {
        RankSection {
            samples: 100,
            min_fraction: 0.95,
        }
    }
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct InvarianceSection {
    pub curve: Vec<u32>,
    pub samples: usize,
    pub threshold: f64,
}

impl Default for InvarianceSection {
    fn default() -> Self {
        InvarianceSection {
            curve: Vec::new(),
            samples: 10_000,
            threshold: surfchar::ergolab::INVARIANCE_THRESHOLD,
        }
    }
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct OrbitSection {
    pub curve: Vec<u32>,
    pub iterations: usize,
    pub trace: Option<f64>,
}

impl Default for OrbitSection {
    fn default() -> Self {
        OrbitSection {
            curve: Vec::new(),
            iterations: 10_000,
            trace: None,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
        Self::parse(&text).map_err(|e| format!("{}: {e}", path.display()))
    }

    pub fn parse(text: &str) -> Result<Self, String> {
        toml::from_str(text).map_err(|e| e.to_string())
    }

    /// Boundary values, defaulting to 0.47 on every component.
    pub fn boundary_values(&self) -> Vec<f64> {
        self.b.clone().unwrap_or_else(|| vec![0.47; self.boundary as usize])
    }

    pub fn walk_config(&self) -> surfchar::ergolab::WalkConfig {
        surfchar::ergolab::WalkConfig {
            genus: self.genus,
            boundary: self.boundary,
            b: self.boundary_values(),
            epsilon: self.epsilon,
            seed: self.seed,
            steps: self.walk.steps,
            burn_in: self.walk.burn_in,
            thinning: self.walk.thinning,
            curves: self.walk.curves.clone(),
            reference_samples: self.walk.reference_samples,
        }
    }
}
