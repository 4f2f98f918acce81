//! Run configurations of the command-line front end.
//!
//! Every command accepts an optional configuration file — JSON or TOML,
//! decided by the file extension — whose schema is the serde shape of one
//! of the types below. Unknown keys are rejected everywhere, so a typo
//! fails fast with a configuration error instead of silently running
//! defaults. Command-line flags override the corresponding file fields.

use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use cfh3::cf::DEFAULT_PART_BUDGET;
use cfh3::rat::rat_int;
use cfh3::schedule::{build_asymmetric, build_infinite, build_mixing};
use cfh3::{
    AsymmetricConfig, Error, InfiniteConfig, MixingConfig, Rat, Result, Schedule, ScheduleKind,
};

/// Reads and schema-validates a configuration file. `.toml` parses as
/// TOML; everything else parses as JSON.
pub fn load_config<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)?;
    let parsed = if path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("toml"))
    {
        toml::from_str(&text).map_err(|e| e.to_string())
    } else {
        serde_json::from_str(&text).map_err(|e| e.to_string())
    };
    parsed.map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

/// Loads the command's configuration file when given, its defaults
/// otherwise.
pub fn load_or_default<T: DeserializeOwned + Default>(path: Option<&Path>) -> Result<T> {
    match path {
        Some(p) => load_config(p),
        None => Ok(T::default()),
    }
}

/// Parameters of one schedule construction: the kind to run plus one
/// parameter section per kind (unused sections may stay at their
/// defaults).
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BuildRun {
    /// Which construction to run.
    pub kind: ScheduleKind,
    /// Parameters of the finite-measure stochastic construction.
    #[serde(default)]
    pub mixing: MixingConfig,
    /// Parameters of the infinite-measure construction.
    #[serde(default)]
    pub infinite: InfiniteConfig,
    /// Parameters of the time-asymmetric construction.
    #[serde(default)]
    pub asymmetric: AsymmetricConfig,
}

impl BuildRun {
    /// Default parameters for one kind.
    pub fn for_kind(kind: ScheduleKind) -> BuildRun {
        BuildRun {
            kind,
            mixing: MixingConfig::default(),
            infinite: InfiniteConfig::default(),
            asymmetric: AsymmetricConfig::default(),
        }
    }

    /// Applies command-line overrides to the active section.
    pub fn apply_overrides(
        &mut self,
        levels: Option<usize>,
        seed: Option<u64>,
        gamma_integer: bool,
    ) {
        if let Some(levels) = levels {
            match self.kind {
                ScheduleKind::Mixing => self.mixing.levels = levels,
                ScheduleKind::Infinite => self.infinite.levels = levels,
                ScheduleKind::Asymmetric => self.asymmetric.levels = levels,
            }
        }
        if let Some(seed) = seed {
            self.mixing.seed = seed;
            self.asymmetric.seed = seed;
        }
        if gamma_integer {
            self.asymmetric.gamma_integer = true;
        }
    }

    /// Runs the construction.
    pub fn build(&self) -> Result<Schedule> {
        match self.kind {
            ScheduleKind::Mixing => build_mixing(&self.mixing),
            ScheduleKind::Infinite => build_infinite(&self.infinite),
            ScheduleKind::Asymmetric => build_asymmetric(&self.asymmetric),
        }
    }
}

/// Where an analysis command gets its schedule: a previously written
/// artifact, an inline construction, or — when both are absent — the
/// command's documented default construction.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScheduleSource {
    /// Path of a schedule artifact to load.
    pub path: Option<PathBuf>,
    /// Construction to run instead of loading.
    pub build: Option<BuildRun>,
}

impl ScheduleSource {
    /// Resolves the schedule. A `--schedule` flag wins over the file
    /// fields; a seed override applies only when a construction runs.
    pub fn resolve(
        &self,
        flag_path: Option<&Path>,
        seed: Option<u64>,
        fallback: BuildRun,
    ) -> Result<Schedule> {
        if flag_path.is_none() && self.path.is_some() && self.build.is_some() {
            return Err(Error::Config(
                "schedule source sets both `path` and `build`; choose one".into(),
            ));
        }
        if let Some(p) = flag_path.or(self.path.as_deref()) {
            let text = std::fs::read_to_string(p)?;
            return Schedule::from_json(&text);
        }
        let mut run = self.build.clone().unwrap_or(fallback);
        run.apply_overrides(None, seed, false);
        run.build()
    }
}

/// Configuration of the `validate` command.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ValidateRun {
    /// Schedule artifact to check.
    pub schedule: Option<PathBuf>,
}

/// Configuration of the `correlate` command.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CorrelateRun {
    /// Schedule to analyze (default: the stochastic finite-measure
    /// construction at its default parameters).
    pub schedule: ScheduleSource,
    /// Subgroup to translate along: `a`, `b`, or `c`.
    pub axis: String,
    /// Subgroup parameters, exact rationals.
    #[serde(with = "cfh3::rat::serde_rat_vec")]
    pub t_values: Vec<Rat>,
    /// Level of the two test cylinders.
    pub level: usize,
    /// Depth of the dyadic cell family the cylinders are drawn from.
    pub depth: u32,
    /// Index of the first set in the family (0 is the full box).
    pub cell_a: usize,
    /// Index of the second set in the family.
    pub cell_b: usize,
    /// Partition budget for refinements.
    pub budget: usize,
}

impl Default for CorrelateRun {
    fn default() -> Self {
        CorrelateRun {
            schedule: ScheduleSource::default(),
            axis: "c".into(),
            t_values: (0..5).map(rat_int).collect(),
            level: 1,
            depth: 1,
            cell_a: 0,
            cell_b: 0,
            budget: DEFAULT_PART_BUDGET,
        }
    }
}

/// Configuration of the `asymmetry` command.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AsymmetryRun {
    /// Schedule to analyze (default: the time-asymmetric construction at
    /// its default parameters).
    pub schedule: ScheduleSource,
    /// Central-orbit tower indices to report on.
    pub ns: Vec<usize>,
    /// Partition budget for refinements.
    pub budget: usize,
}

impl Default for AsymmetryRun {
    fn default() -> Self {
        AsymmetryRun {
            schedule: ScheduleSource::default(),
            ns: vec![3, 6, 9],
            budget: DEFAULT_PART_BUDGET,
        }
    }
}

/// Configuration of the `rigidity` command.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RigidityRun {
    /// Schedule to analyze (default: the time-asymmetric construction,
    /// eight levels).
    pub schedule: ScheduleSource,
    /// Central-orbit tower indices to report on.
    pub ns: Vec<usize>,
    /// Partition budget for refinements.
    pub budget: usize,
}

impl RigidityRun {
    /// The default construction behind the command: deep enough for the
    /// second central-orbit step.
    pub fn default_build() -> BuildRun {
        let mut run = BuildRun::for_kind(ScheduleKind::Asymmetric);
        run.asymmetric.levels = 8;
        run
    }
}

impl Default for RigidityRun {
    fn default() -> Self {
        RigidityRun {
            schedule: ScheduleSource::default(),
            ns: vec![3, 6],
            budget: DEFAULT_PART_BUDGET,
        }
    }
}

fn rat_one() -> Rat {
    rat_int(1)
}

/// Configuration of the `tiling` command.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TilingRun {
    /// Half-width of the tile in the first coordinate.
    #[serde(with = "cfh3::rat::serde_rat")]
    pub alpha: Rat,
    /// Half-width of the tile in the second coordinate.
    #[serde(with = "cfh3::rat::serde_rat")]
    pub beta: Rat,
    /// Half-width of the tile in the third coordinate.
    #[serde(with = "cfh3::rat::serde_rat")]
    pub gamma: Rat,
    /// The window is the tile scaled by this factor.
    pub scale: i64,
    /// Lattice-step rescaling; 1 is the true lattice, other values are
    /// negative controls that force overlaps or gaps.
    #[serde(with = "cfh3::rat::serde_rat")]
    pub spacing: Rat,
}

impl Default for TilingRun {
    fn default() -> Self {
        TilingRun {
            alpha: rat_one(),
            beta: rat_one(),
            gamma: rat_one(),
            scale: 2,
            spacing: rat_one(),
        }
    }
}

/// One test element of the `folner` command, on a one-parameter subgroup.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ElementSpec {
    /// Subgroup: `a`, `b`, or `c`.
    pub axis: String,
    /// Subgroup parameter.
    #[serde(with = "cfh3::rat::serde_rat", default = "rat_one")]
    pub t: Rat,
}

/// Configuration of the `folner` command.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FolnerRun {
    /// Half-width of every box in the first coordinate.
    #[serde(with = "cfh3::rat::serde_rat")]
    pub alpha: Rat,
    /// Half-width of every box in the second coordinate.
    #[serde(with = "cfh3::rat::serde_rat")]
    pub beta: Rat,
    /// Third half-widths of the box family, in order.
    #[serde(with = "cfh3::rat::serde_rat_vec")]
    pub gammas: Vec<Rat>,
    /// Test elements.
    pub elements: Vec<ElementSpec>,
}

impl Default for FolnerRun {
    fn default() -> Self {
        FolnerRun {
            alpha: rat_one(),
            beta: rat_one(),
            gammas: [1, 10, 100, 1000].map(rat_int).to_vec(),
            elements: ["a", "b", "c"]
                .map(|axis| ElementSpec {
                    axis: axis.into(),
                    t: rat_one(),
                })
                .to_vec(),
        }
    }
}

/// Configuration of the `spectral` command.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SpectralRun {
    /// Centre frequency of the grid checks.
    pub gamma: f64,
    /// Half-width of the evaluation window.
    pub half_width: f64,
    /// Grid step.
    pub step: f64,
}

impl Default for SpectralRun {
    fn default() -> Self {
        SpectralRun {
            gamma: 1.25,
            half_width: 8.0,
            step: 0.25,
        }
    }
}
