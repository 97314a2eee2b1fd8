use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generators::Model;

/// Environment variable that overrides `threads`.
pub const THREADS_ENV: &str = "DILAB_THREADS";

pub const DEFAULT_PAIR_BUDGET: u64 = 1_000_000;
pub const DEFAULT_CENSUS_REPS: usize = 100_000;

/// Acceptance tolerances. Defaults match the shipped acceptance suite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// `|mean lscc_frac − ζ|`.
    pub lscc: f64,
    /// Upper bound on `second_frac`, every seed.
    pub second: f64,
    /// `|mean kn_frac − (1 − ζ)|`.
    pub kn: f64,
    /// `|mean alpha1 − (1 − ζ)|`.
    pub alpha1: f64,
    /// Upper bound on `lscc_frac` when `ζ = 0`, strictly subcritical.
    pub subcritical_lscc: f64,
    /// Same, at criticality.
    pub critical_lscc: f64,
    /// Upper bound on `N^k_n / n²` at the largest `k`.
    pub nk_max: f64,
    /// Largest `|v₁(l,m)/n − p(l,m)(1−q⁻^l)(1−q⁺^m)|` over `l, m ≤ 4`.
    pub degree_mass: f64,
    /// Edge density of the giant: `giant_half_degree_frac` against
    /// `giant_edge_density`, `giant_edge_frac` against the induced density.
    pub edge_density: f64,
    /// Upper bound on the census TV distance to the limit.
    pub census_tv: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            lscc: 0.01,
            second: 0.005,
            kn: 0.01,
            alpha1: 0.01,
            subcritical_lscc: 0.01,
            critical_lscc: 0.02,
            nk_max: 0.02,
            degree_mass: 0.01,
            edge_density: 0.03,
            census_tv: 0.05,
        }
    }
}

impl Tolerances {
    fn values(&self) -> [f64; 10] {
        [
            self.lscc,
            self.second,
            self.kn,
            self.alpha1,
            self.subcritical_lscc,
            self.critical_lscc,
            self.nk_max,
            self.degree_mass,
            self.edge_density,
            self.census_tv,
        ]
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    models: Vec<String>,
    n_ladder: Vec<usize>,
    seeds: usize,
    #[serde(default)]
    base_seed: u64,
    #[serde(default)]
    k_list: Vec<usize>,
    #[serde(default)]
    radii: Vec<u32>,
    #[serde(default = "default_pair_budget")]
    pair_budget: u64,
    #[serde(default = "default_census_reps")]
    census_reps: usize,
    #[serde(default)]
    census_sample: Option<usize>,
    #[serde(default)]
    tolerances: Tolerances,
    out_dir: PathBuf,
    #[serde(default)]
    threads: usize,
}

fn default_pair_budget() -> u64 {
    DEFAULT_PAIR_BUDGET
}

fn default_census_reps() -> usize {
    DEFAULT_CENSUS_REPS
}

/// A model as written in the config plus its parsed form.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelEntry {
    pub label: String,
    pub model: Model,
}

/// Validated sweep configuration. Relative paths are resolved against the
/// directory holding the config file.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub models: Vec<ModelEntry>,
    pub n_ladder: Vec<usize>,
    pub seeds: usize,
    pub base_seed: u64,
    pub k_list: Vec<usize>,
    pub radii: Vec<u32>,
    pub pair_budget: u64,
    pub census_reps: usize,
    /// Roots per graph census; all vertices when absent.
    pub census_sample: Option<usize>,
    pub tolerances: Tolerances,
    pub out_dir: PathBuf,
    /// 0 means one thread per core.
    pub threads: usize,
}

impl ExperimentConfig {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::from_toml(&text, base)
    }

    pub fn from_toml(text: &str, base_dir: &Path) -> Result<Self> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        let bad = |msg: String| Err(Error::Config(msg));

        if raw.models.is_empty() {
            return bad("`models` is empty".into());
        }
        let mut models = Vec::with_capacity(raw.models.len());
        for label in &raw.models {
            if models.iter().any(|m: &ModelEntry| &m.label == label) {
                return bad(format!("model `{label}` listed twice"));
            }
            let model = Model::parse(&resolve_law_path(label, base_dir))
                .map_err(|e| Error::Config(format!("model `{label}`: {e}")))?;
            models.push(ModelEntry {
                label: label.clone(),
                model,
            });
        }
        if raw.n_ladder.is_empty() || raw.n_ladder[0] == 0 {
            return bad("`n_ladder` must be nonempty with entries ≥ 1".into());
        }
        if raw.n_ladder.windows(2).any(|w| w[0] >= w[1]) {
            return bad("`n_ladder` must be strictly ascending".into());
        }
        if raw.seeds == 0 {
            return bad("`seeds` must be at least 1".into());
        }
        if raw.k_list.contains(&0) {
            return bad("`k_list` entries must be at least 1".into());
        }
        if raw.radii.contains(&0) {
            return bad("`radii` entries must be at least 1".into());
        }
        if raw.pair_budget == 0 || raw.census_reps == 0 {
            return bad("`pair_budget` and `census_reps` must be at least 1".into());
        }
        if raw.census_sample == Some(0) {
            return bad("`census_sample` must be at least 1".into());
        }
        if raw
            .tolerances
            .values()
            .iter()
            .any(|t| !t.is_finite() || *t < 0.0)
        {
            return bad("tolerances must be finite and nonnegative".into());
        }
        let mut k_list = raw.k_list;
        k_list.sort_unstable();
        k_list.dedup();
        let mut radii = raw.radii;
        radii.sort_unstable();
        radii.dedup();

        Ok(ExperimentConfig {
            models,
            n_ladder: raw.n_ladder,
            seeds: raw.seeds,
            base_seed: raw.base_seed,
            k_list,
            radii,
            pair_budget: raw.pair_budget,
            census_reps: raw.census_reps,
            census_sample: raw.census_sample,
            tolerances: raw.tolerances,
            out_dir: base_dir.join(raw.out_dir),
            threads: raw.threads,
        })
    }

    /// Thread budget after applying [`THREADS_ENV`].
    pub fn effective_threads(&self) -> Result<usize> {
        let requested = match std::env::var(THREADS_ENV) {
            Ok(v) => v
                .trim()
                .parse::<usize>()
                .map_err(|_| Error::Config(format!("{THREADS_ENV}=`{v}` is not a thread count")))?,
            Err(_) => self.threads,
        };
        if requested > 0 {
            return Ok(requested);
        }
        Ok(std::thread::available_parallelism().map_or(1, |p| p.get()))
    }

    pub fn results_path(&self) -> PathBuf {
        self.out_dir.join("results.csv")
    }

    pub fn timings_path(&self) -> PathBuf {
        self.out_dir.join("timings.csv")
    }

    pub fn limits_path(&self) -> PathBuf {
        self.out_dir.join("limits.json")
    }
}

/// Rewrites a relative law file inside a `cm` model string against `base`.
fn resolve_law_path(label: &str, base: &Path) -> String {
    for tag in ["cm:", "cm-simple:"] {
        if let Some(law) = label.strip_prefix(tag) {
            if law.starts_with("poisson:") || law.starts_with("regular:") {
                return label.to_string();
            }
            let file = law.strip_prefix("file:").unwrap_or(law);
            return format!("{tag}file:{}", base.join(file).display());
        }
    }
    label.to_string()
}
