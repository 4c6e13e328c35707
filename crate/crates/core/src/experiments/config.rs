//! Experiment configuration: the TOML document accepted by the CLI and
//! its resolved in-memory form.
//!
//! Decibel quantities are accepted only at this boundary, through keys
//! with a `_db`/`_dbm` suffix; everything past parsing is SI.

use std::path::PathBuf;
use std::str::FromStr;

use serde::Deserialize;

use crate::baselines::BaselineKind;
use crate::bca::BcaConfig;
use crate::error::{Error, Result};
use crate::experiments::grouping::GroupingScheme;
use crate::model::SystemParams;
use crate::srocr::SrocrConfig;

/// One algorithm requested from the runner.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Algorithm {
    Proposed,
    /// Discrete-phase variant taking its bit count from the swept axis;
    /// only valid with a `bits` sweep.
    DiscreteSwept,
    Baseline(BaselineKind),
}

impl Algorithm {
    pub fn label(&self) -> String {
        match self {
            Self::Proposed => "proposed".into(),
            Self::DiscreteSwept => "discrete_phase".into(),
            Self::Baseline(kind) => kind.label(),
        }
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.trim().to_ascii_lowercase();
        Ok(match norm.as_str() {
            "proposed" => Self::Proposed,
            "discrete_phase" => Self::DiscreteSwept,
            "optimized_no_ta" => Self::Baseline(BaselineKind::OptimizedNoTa),
            "random_with_ta" => Self::Baseline(BaselineKind::RandomWithTa),
            "random_no_ta" => Self::Baseline(BaselineKind::RandomNoTa),
            "same_irs_with_ta" => Self::Baseline(BaselineKind::SameIrsWithTa),
            "upper_bound" => Self::Baseline(BaselineKind::UpperBound),
            other => {
                if let Some(bits) = other.strip_prefix("discrete_phase_") {
                    let b: u32 = bits.parse().map_err(|_| {
                        Error::Config(format!("bad discrete phase bit count in '{s}'"))
                    })?;
                    if b == 0 {
                        return Err(Error::Config("discrete phase needs b >= 1".into()));
                    }
                    Self::Baseline(BaselineKind::DiscretePhase(b))
                } else {
                    return Err(Error::Config(format!("unknown algorithm '{s}'")));
                }
            }
        })
    }
}

/// The swept experiment axis with its values.
#[derive(Clone, Debug)]
pub enum Sweep {
    Elements(Vec<usize>),
    UserDistance(Vec<f64>),
    ClusterSetups(Vec<Vec<usize>>),
    Grouping(Vec<GroupingScheme>),
    Bits(Vec<u32>),
}

impl Sweep {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Elements(_) => "elements",
            Self::UserDistance(_) => "user_distance",
            Self::ClusterSetups(_) => "clusters",
            Self::Grouping(_) => "grouping",
            Self::Bits(_) => "bits",
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Self::Elements(v) => v.len(),
            Self::UserDistance(v) => v.len(),
            Self::ClusterSetups(v) => v.len(),
            Self::Grouping(v) => v.len(),
            Self::Bits(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn value_label(&self, index: usize) -> String {
        match self {
            Self::Elements(v) => v[index].to_string(),
            Self::UserDistance(v) => format!("{}", v[index]),
            Self::ClusterSetups(v) => v[index]
                .iter()
                .map(|s| s.to_string())
                .collect::<Vec<_>>()
                .join("+"),
            Self::Grouping(v) => v[index].label().to_string(),
            Self::Bits(v) => v[index].to_string(),
        }
    }
}

/// Solver settings shared by every algorithm invocation.
#[derive(Clone, Debug)]
pub struct SolverSettings {
    pub bca_eps: f64,
    pub bca_max_rounds: usize,
    pub srocr_delta0: f64,
    pub srocr_eps1: f64,
    pub srocr_eps2: f64,
    pub srocr_max_iters: usize,
    pub warm_start: bool,
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self {
            bca_eps: 1e-3,
            bca_max_rounds: 30,
            srocr_delta0: 0.1,
            srocr_eps1: 0.95,
            srocr_eps2: 1e-3,
            srocr_max_iters: 100,
            warm_start: true,
        }
    }
}

impl SolverSettings {
    pub fn bca_config(&self, init_seed: u64) -> BcaConfig {
        BcaConfig {
            eps: self.bca_eps,
            max_rounds: self.bca_max_rounds,
            srocr: SrocrConfig {
                delta0: self.srocr_delta0,
                eps1: self.srocr_eps1,
                eps2: self.srocr_eps2,
                max_iters: self.srocr_max_iters,
            },
            init_seed,
            warm_start: self.warm_start,
        }
    }
}

/// Fully resolved experiment description.
#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub base: SystemParams,
    /// Redraw every user distance uniformly from this range per
    /// realization instead of using the fixed layout.
    pub distance_range: Option<(f64, f64)>,
    pub sweep: Sweep,
    pub realizations: usize,
    pub base_seed: u64,
    pub algorithms: Vec<Algorithm>,
    pub output_dir: PathBuf,
    /// Record measured wall time in the CSV. Off by default because it
    /// breaks byte-level reproducibility; timings always go to the
    /// metadata sidecar.
    pub timing_in_csv: bool,
    /// Worker threads for the realization loop; 0 = all available, 1 =
    /// serial.
    pub threads: usize,
    pub solver: SolverSettings,
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let raw: RawConfig =
            toml::from_str(text).map_err(|e| Error::Config(format!("TOML parse: {e}")))?;
        raw.resolve()
    }

    pub fn from_path(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml_str(&text)
    }

    pub fn validate(&self) -> Result<()> {
        self.base.validate()?;
        if self.realizations < 1 {
            return Err(Error::Config("realizations must be >= 1".into()));
        }
        if self.sweep.is_empty() {
            return Err(Error::Config("sweep values must be nonempty".into()));
        }
        if self.algorithms.is_empty() {
            return Err(Error::Config("algorithms must be nonempty".into()));
        }
        if let Some((lo, hi)) = self.distance_range {
            if !(lo > 0.0 && hi >= lo) {
                return Err(Error::Config(format!(
                    "bad distance range [{lo}, {hi}]"
                )));
            }
            if matches!(self.sweep, Sweep::UserDistance(_)) {
                return Err(Error::Config(
                    "a distance sweep and per-realization distance redraws conflict".into(),
                ));
            }
        }
        if let Sweep::ClusterSetups(setups) = &self.sweep {
            let m = self.base.num_users();
            for s in setups {
                if s.iter().sum::<usize>() != m || s.iter().any(|&x| x == 0) {
                    return Err(Error::Config(format!(
                        "cluster setup {s:?} does not partition {m} users"
                    )));
                }
            }
        }
        if self.algorithms.contains(&Algorithm::DiscreteSwept)
            && !matches!(self.sweep, Sweep::Bits(_))
        {
            return Err(Error::Config(
                "algorithm 'discrete_phase' (swept bits) requires a bits sweep".into(),
            ));
        }
        if let Sweep::Bits(bits) = &self.sweep {
            if bits.iter().any(|&b| !(1..=52).contains(&b)) {
                return Err(Error::Config(format!(
                    "bit counts must be in 1..=52, got {bits:?}"
                )));
            }
        }
        Ok(())
    }
}

fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

fn exactly_one(name: &str, linear: Option<f64>, converted: Option<f64>) -> Result<f64> {
    match (linear, converted) {
        (Some(v), None) => Ok(v),
        (None, Some(v)) => Ok(v),
        (None, None) => Err(Error::Config(format!("missing {name}"))),
        (Some(_), Some(_)) => Err(Error::Config(format!(
            "{name} given in both linear and decibel form"
        ))),
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    system: RawSystem,
    sweep: RawSweep,
    run: RawRun,
    solver: Option<RawSolver>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSystem {
    elements: usize,
    clusters: Vec<usize>,
    p0_watts: Option<f64>,
    p0_dbm: Option<f64>,
    sigma2_watts: Option<f64>,
    sigma2_dbm: Option<f64>,
    eta: f64,
    block_seconds: f64,
    zeta0: Option<f64>,
    zeta0_db: Option<f64>,
    reference_distance_m: f64,
    bs_irs_distance_m: f64,
    bs_irs_exponent: f64,
    user_distance_m: Option<f64>,
    user_distance_range_m: Option<[f64; 2]>,
    user_exponent: f64,
    rician_factor: Option<f64>,
    rician_factor_db: Option<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSweep {
    axis: String,
    elements: Option<Vec<usize>>,
    user_distance_m: Option<Vec<f64>>,
    clusters: Option<Vec<Vec<usize>>>,
    grouping: Option<Vec<String>>,
    bits: Option<Vec<u32>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRun {
    realizations: usize,
    base_seed: u64,
    algorithms: Vec<String>,
    output_dir: String,
    timing_in_csv: Option<bool>,
    parallel: Option<usize>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawSolver {
    bca_eps: Option<f64>,
    bca_max_rounds: Option<usize>,
    srocr_delta0: Option<f64>,
    srocr_eps1: Option<f64>,
    srocr_eps2: Option<f64>,
    srocr_max_iters: Option<usize>,
    warm_start: Option<bool>,
}

impl RawConfig {
    fn resolve(self) -> Result<ExperimentConfig> {
        let sys = self.system;
        let p0 = exactly_one("p0", sys.p0_watts, sys.p0_dbm.map(dbm_to_watts))?;
        let sigma2 = exactly_one(
            "sigma2",
            sys.sigma2_watts,
            sys.sigma2_dbm.map(dbm_to_watts),
        )?;
        let zeta0 = exactly_one("zeta0", sys.zeta0, sys.zeta0_db.map(db_to_linear))?;
        let kappa = match (sys.rician_factor, sys.rician_factor_db) {
            (None, None) => 1.0,
            (a, b) => exactly_one("rician_factor", a, b.map(db_to_linear))?,
        };
        let distance_range = sys.user_distance_range_m.map(|[lo, hi]| (lo, hi));
        let d_user = match (sys.user_distance_m, distance_range) {
            (Some(d), _) => d,
            (None, Some((lo, hi))) => 0.5 * (lo + hi),
            (None, None) => {
                return Err(Error::Config(
                    "need user_distance_m or user_distance_range_m".into(),
                ))
            }
        };
        let base = SystemParams::uniform(
            sys.elements,
            sys.clusters,
            p0,
            sys.eta,
            sigma2,
            sys.block_seconds,
            zeta0,
            sys.reference_distance_m,
            sys.bs_irs_distance_m,
            sys.bs_irs_exponent,
            d_user,
            sys.user_exponent,
            kappa,
        )?;

        let sw = self.sweep;
        let missing = |axis: &str| Error::Config(format!("sweep axis '{axis}' needs values"));
        let sweep = match sw.axis.as_str() {
            "elements" => Sweep::Elements(sw.elements.ok_or_else(|| missing("elements"))?),
            "user_distance" => {
                Sweep::UserDistance(sw.user_distance_m.ok_or_else(|| missing("user_distance"))?)
            }
            "clusters" => Sweep::ClusterSetups(sw.clusters.ok_or_else(|| missing("clusters"))?),
            "grouping" => {
                let names = sw.grouping.ok_or_else(|| missing("grouping"))?;
                let schemes = names
                    .iter()
                    .map(|n| match n.to_ascii_lowercase().as_str() {
                        "lcsd" => Ok(GroupingScheme::Lcsd),
                        "scsd" => Ok(GroupingScheme::Scsd),
                        // the concrete seed is derived per realization
                        "random" => Ok(GroupingScheme::Random(0)),
                        other => Err(Error::Config(format!("unknown grouping '{other}'"))),
                    })
                    .collect::<Result<Vec<_>>>()?;
                Sweep::Grouping(schemes)
            }
            "bits" => Sweep::Bits(sw.bits.ok_or_else(|| missing("bits"))?),
            other => return Err(Error::Config(format!("unknown sweep axis '{other}'"))),
        };

        let run = self.run;
        let algorithms = run
            .algorithms
            .iter()
            .map(|s| s.parse())
            .collect::<Result<Vec<_>>>()?;
        let solver = self.solver.unwrap_or_default();
        let defaults = SolverSettings::default();
        let config = ExperimentConfig {
            base,
            distance_range,
            sweep,
            realizations: run.realizations,
            base_seed: run.base_seed,
            algorithms,
            output_dir: PathBuf::from(run.output_dir),
            timing_in_csv: run.timing_in_csv.unwrap_or(false),
            threads: run.parallel.unwrap_or(0),
            solver: SolverSettings {
                bca_eps: solver.bca_eps.unwrap_or(defaults.bca_eps),
                bca_max_rounds: solver.bca_max_rounds.unwrap_or(defaults.bca_max_rounds),
                srocr_delta0: solver.srocr_delta0.unwrap_or(defaults.srocr_delta0),
                srocr_eps1: solver.srocr_eps1.unwrap_or(defaults.srocr_eps1),
                srocr_eps2: solver.srocr_eps2.unwrap_or(defaults.srocr_eps2),
                srocr_max_iters: solver.srocr_max_iters.unwrap_or(defaults.srocr_max_iters),
                warm_start: solver.warm_start.unwrap_or(defaults.warm_start),
            },
        };
        config.validate()?;
        Ok(config)
    }
}
