//! Seeded Monte-Carlo execution of the requested algorithms over the
//! sweep axis, with paired failure handling and deterministic CSV
//! emission.
//!
//! Determinism contract: the channels, per-realization distances and
//! initial phases are derived from `(base_seed, realization)` alone, so
//! every sweep value sees the same user population and starting point at
//! a given realization index and comparisons along the axis are paired;
//! only the random-grouping stream carries the sweep index. Aggregation
//! sums in realization order over an index-ordered buffer, so serial and
//! parallel schedules produce identical bytes.

use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::baselines::{discrete_phase_from, run_baseline, upper_bound_from, BaselineKind};
use crate::bca::{optimize, StartPoint};
use crate::error::{Error, Result};
use crate::experiments::config::{Algorithm, ExperimentConfig, Sweep};
use crate::experiments::grouping::{group_users, regroup, GroupingScheme};
use crate::experiments::seed::{derive_seed, Stream};
use crate::model::{generate_channels, SystemParams};

/// One CSV row: aggregated result of one algorithm at one sweep value.
#[derive(Clone, Debug, Serialize)]
pub struct ResultRow {
    pub sweep_name: String,
    pub sweep_value: String,
    pub algorithm: String,
    pub mean_bits_per_hz: f64,
    pub stderr: f64,
    pub n_ok: usize,
    pub n_failed: usize,
    pub wall_time_s: f64,
}

/// Full run output: rows plus the details destined for the metadata
/// sidecar.
#[derive(Clone, Debug)]
pub struct MonteCarlo {
    pub rows: Vec<ResultRow>,
    /// Human-readable notes for every excluded realization.
    pub failures: Vec<String>,
    /// Measured wall seconds per row, independent of `timing_in_csv`.
    pub measured_wall_s: Vec<f64>,
    /// Per-row throughput of every aggregated realization, in realization
    /// order; feeds error bars and the seed-prefix contract.
    pub row_values: Vec<Vec<f64>>,
}

/// Runs the configured experiment and returns the result rows.
pub fn run_monte_carlo(config: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    Ok(run_with_details(config)?.rows)
}

/// [`run_monte_carlo`] with failure notes and measured timings.
pub fn run_with_details(config: &ExperimentConfig) -> Result<MonteCarlo> {
    config.validate()?;
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    let mut measured = Vec::new();
    let mut row_values = Vec::new();

    for sweep_idx in 0..config.sweep.len() {
        let outcomes = run_sweep_point(config, sweep_idx);
        let label = config.sweep.value_label(sweep_idx);

        let mut ok_values: Vec<&Vec<(f64, f64)>> = Vec::new();
        let mut n_failed = 0usize;
        for (r, outcome) in outcomes.iter().enumerate() {
            match outcome {
                Ok(values) => ok_values.push(values),
                Err(msg) => {
                    n_failed += 1;
                    failures.push(format!(
                        "sweep {}={} realization {}: {}",
                        config.sweep.name(),
                        label,
                        r,
                        msg
                    ));
                }
            }
        }

        let mut point_rows = Vec::new();
        for (j, algo) in config.algorithms.iter().enumerate() {
            let values: Vec<f64> = ok_values.iter().map(|v| v[j].0).collect();
            let wall: f64 = ok_values.iter().map(|v| v[j].1).sum();
            let n = values.len();
            let mean = if n > 0 {
                values.iter().sum::<f64>() / n as f64
            } else {
                0.0
            };
            let stderr = if n > 1 {
                let var =
                    values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64;
                (var / n as f64).sqrt()
            } else {
                0.0
            };
            point_rows.push((
                ResultRow {
                    sweep_name: config.sweep.name().to_string(),
                    sweep_value: label.clone(),
                    algorithm: algo.label(),
                    mean_bits_per_hz: mean,
                    stderr,
                    n_ok: n,
                    n_failed,
                    wall_time_s: if config.timing_in_csv { wall } else { 0.0 },
                },
                wall,
                values,
            ));
        }
        point_rows.sort_by(|a, b| a.0.algorithm.cmp(&b.0.algorithm));
        for (row, wall, values) in point_rows {
            rows.push(row);
            measured.push(wall);
            row_values.push(values);
        }
    }

    Ok(MonteCarlo {
        rows,
        failures,
        measured_wall_s: measured,
        row_values,
    })
}

type RealizationValues = std::result::Result<Vec<(f64, f64)>, String>;

fn run_sweep_point(config: &ExperimentConfig, sweep_idx: usize) -> Vec<RealizationValues> {
    let count = config.realizations;
    #[cfg(feature = "parallel")]
    {
        if config.threads != 1 {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(config.threads)
                .build();
            if let Ok(pool) = pool {
                return pool.install(|| {
                    (0..count)
                        .into_par_iter()
                        .map(|r| run_realization(config, sweep_idx, r))
                        .collect()
                });
            }
        }
    }
    (0..count).map(|r| run_realization(config, sweep_idx, r)).collect()
}

/// Parameter set for one sweep value, before per-realization distances.
fn params_for_sweep(config: &ExperimentConfig, sweep_idx: usize) -> SystemParams {
    let mut params = config.base.clone();
    match &config.sweep {
        Sweep::Elements(v) => params.n_elements = v[sweep_idx],
        Sweep::UserDistance(v) => {
            let d = v[sweep_idx];
            for row in params.d_user.iter_mut() {
                for entry in row.iter_mut() {
                    *entry = d;
                }
            }
        }
        Sweep::ClusterSetups(v) => rechunk(&mut params, &v[sweep_idx]),
        Sweep::Grouping(_) | Sweep::Bits(_) => {}
    }
    params
}

/// Reshapes the per-user rows into a new cluster layout, preserving flat
/// user order.
fn rechunk(params: &mut SystemParams, sizes: &[usize]) {
    let flat_d: Vec<f64> = params.d_user.iter().flatten().copied().collect();
    let flat_a: Vec<f64> = params.alpha_user.iter().flatten().copied().collect();
    let mut d = Vec::with_capacity(sizes.len());
    let mut a = Vec::with_capacity(sizes.len());
    let mut off = 0usize;
    for &s in sizes {
        d.push(flat_d[off..off + s].to_vec());
        a.push(flat_a[off..off + s].to_vec());
        off += s;
    }
    params.clusters = sizes.to_vec();
    params.d_user = d;
    params.alpha_user = a;
}

fn run_realization(
    config: &ExperimentConfig,
    sweep_idx: usize,
    realization: usize,
) -> RealizationValues {
    run_realization_inner(config, sweep_idx, realization).map_err(|e| e.to_string())
}

fn run_realization_inner(
    config: &ExperimentConfig,
    sweep_idx: usize,
    realization: usize,
) -> Result<Vec<(f64, f64)>> {
    let base_seed = config.base_seed;
    let r = realization as u64;
    let mut params = params_for_sweep(config, sweep_idx);

    // The user population is shared across sweep values (salt 0), so
    // comparisons along the axis are paired.
    if let Some((lo, hi)) = config.distance_range {
        let mut rng =
            ChaCha8Rng::seed_from_u64(derive_seed(base_seed, 0, r, Stream::Distances));
        for row in params.d_user.iter_mut() {
            for entry in row.iter_mut() {
                *entry = lo + (hi - lo) * rng.gen::<f64>();
            }
        }
    }
    let chans = generate_channels(&params, derive_seed(base_seed, 0, r, Stream::Channels));

    // Grouping sweeps re-partition the population per realization.
    let (params, chans) = if let Sweep::Grouping(schemes) = &config.sweep {
        let scheme = match schemes[sweep_idx] {
            GroupingScheme::Random(_) => GroupingScheme::Random(derive_seed(
                base_seed,
                sweep_idx as u64,
                r,
                Stream::Grouping,
            )),
            other => other,
        };
        let sizes = params.clusters.clone();
        let assignment = group_users(&chans, &scheme, &sizes)?;
        regroup(&params, &chans, &assignment)?
    } else {
        (params, chans)
    };

    let init_seed = derive_seed(base_seed, 0, r, Stream::InitPhases);
    let bca_cfg = config.solver.bca_config(init_seed);

    let needs_proposed = config.algorithms.iter().any(|a| {
        matches!(
            a,
            Algorithm::Proposed
                | Algorithm::DiscreteSwept
                | Algorithm::Baseline(BaselineKind::UpperBound)
                | Algorithm::Baseline(BaselineKind::DiscretePhase(_))
        )
    });
    let proposed = if needs_proposed {
        let tick = Instant::now();
        let (solution, _) = optimize(&params, &chans, &bca_cfg)?;
        Some((solution, tick.elapsed().as_secs_f64()))
    } else {
        None
    };

    let mut out = Vec::with_capacity(config.algorithms.len());
    for algo in &config.algorithms {
        let tick = Instant::now();
        let value = match algo {
            Algorithm::Proposed => proposed.as_ref().expect("cached run").0.throughput,
            Algorithm::DiscreteSwept => {
                let bits = match &config.sweep {
                    Sweep::Bits(v) => v[sweep_idx],
                    _ => return Err(Error::Config("discrete_phase needs a bits sweep".into())),
                };
                let base = &proposed.as_ref().expect("cached run").0;
                discrete_phase_from(&params, &chans, bits, base)?.throughput
            }
            Algorithm::Baseline(BaselineKind::UpperBound) => {
                let base = &proposed.as_ref().expect("cached run").0;
                upper_bound_from(&params, &chans, &bca_cfg, &StartPoint::from_solution(base))?
            }
            Algorithm::Baseline(BaselineKind::DiscretePhase(bits)) => {
                let base = &proposed.as_ref().expect("cached run").0;
                discrete_phase_from(&params, &chans, *bits, base)?.throughput
            }
            Algorithm::Baseline(kind) => {
                run_baseline(*kind, &params, &chans, &bca_cfg)?.value()
            }
        };
        let mut secs = tick.elapsed().as_secs_f64();
        if matches!(algo, Algorithm::Proposed) {
            secs = proposed.as_ref().expect("cached run").1;
        }
        out.push((value, secs));
    }
    Ok(out)
}

/// Writes `results.csv` and the `results.meta.json` sidecar into the
/// output directory; returns both paths.
pub fn write_outputs(
    config: &ExperimentConfig,
    run: &MonteCarlo,
    out_dir: &Path,
) -> Result<(PathBuf, PathBuf)> {
    std::fs::create_dir_all(out_dir)?;
    let csv_path = out_dir.join("results.csv");
    let meta_path = out_dir.join("results.meta.json");

    let mut writer = csv::Writer::from_path(&csv_path)?;
    for row in &run.rows {
        writer.serialize(row)?;
    }
    writer.flush()?;

    let meta = metadata_json(config, run);
    std::fs::write(&meta_path, serde_json::to_string_pretty(&meta)? + "\n")
        .map_err(Error::Io)?;
    Ok((csv_path, meta_path))
}

fn metadata_json(config: &ExperimentConfig, run: &MonteCarlo) -> serde_json::Value {
    let base = &config.base;
    serde_json::json!({
        "build": {
            "package": env!("CARGO_PKG_NAME"),
            "version": env!("CARGO_PKG_VERSION"),
            "parallel_feature": cfg!(feature = "parallel"),
        },
        "columns": {
            "sweep_name": "swept axis",
            "sweep_value": "axis value",
            "algorithm": "algorithm label",
            "mean_bits_per_hz": "mean throughput, bits/Hz",
            "stderr": "standard error of the mean, bits/Hz",
            "n_ok": "realizations aggregated",
            "n_failed": "realizations excluded (paired across algorithms)",
            "wall_time_s": "wall seconds (zero unless timing_in_csv)",
        },
        "config": {
            "system": {
                "elements": base.n_elements,
                "clusters": base.clusters,
                "p0_watts": base.p0,
                "eta": base.eta,
                "sigma2_watts": base.sigma2,
                "block_seconds": base.t_block,
                "zeta0": base.zeta0,
                "reference_distance_m": base.d0,
                "bs_irs_distance_m": base.d_bi,
                "bs_irs_exponent": base.alpha_bi,
                "user_distance_m": base.d_user,
                "user_exponent": base.alpha_user,
                "rician_factor": base.kappa,
                "distance_range_m": config.distance_range.map(|(a, b)| vec![a, b]),
            },
            "sweep": {
                "axis": config.sweep.name(),
                "values": (0..config.sweep.len())
                    .map(|i| config.sweep.value_label(i))
                    .collect::<Vec<_>>(),
            },
            "run": {
                "realizations": config.realizations,
                "base_seed": config.base_seed,
                "algorithms": config.algorithms.iter().map(|a| a.label()).collect::<Vec<_>>(),
                "timing_in_csv": config.timing_in_csv,
                "threads": config.threads,
            },
            "solver": {
                "bca_eps": config.solver.bca_eps,
                "bca_max_rounds": config.solver.bca_max_rounds,
                "srocr_delta0": config.solver.srocr_delta0,
                "srocr_eps1": config.solver.srocr_eps1,
                "srocr_eps2": config.solver.srocr_eps2,
                "srocr_max_iters": config.solver.srocr_max_iters,
                "warm_start": config.solver.warm_start,
            },
        },
        "seed_derivation": "splitmix64 hash of (base_seed, sweep_salt, realization, stream); channels, distances and initial phases use sweep_salt 0 so sweep values are paired, random grouping carries the sweep index",
        "wall_time_s": run.measured_wall_s,
        "per_realization_bits_per_hz": run.row_values,
        "failures": run.failures,
    })
}
