//! Command line front end: `run` executes a TOML experiment config,
//! `sweep` builds one from flags with the default parameter set,
//! `validate` runs a quick invariant and oracle self-check.
//!
//! Exit code 0 on success; failures print one machine-readable JSON line
//! to stderr and exit nonzero.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use irs_wpcn::experiments::{
    run_with_details, write_outputs, Algorithm, ExperimentConfig, Sweep,
};

mod selfcheck;

#[derive(Parser)]
#[command(
    name = "irs-wpcn",
    version,
    about = "Throughput experiments for a reflecting-surface assisted wireless powered uplink"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute an experiment described by a TOML config file.
    Run {
        /// Path to the experiment config.
        #[arg(long)]
        config: PathBuf,
        /// Override the base seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Override the realization count.
        #[arg(long)]
        realizations: Option<usize>,
        /// Override the output directory.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override the algorithm list (comma separated).
        #[arg(long)]
        algorithms: Option<String>,
        /// Worker threads (0 = all cores, 1 = serial).
        #[arg(long)]
        parallel: Option<usize>,
    },
    /// Run a one-axis sweep configured entirely from flags.
    Sweep {
        /// Axis: elements | user_distance | clusters | grouping | bits.
        #[arg(long)]
        axis: String,
        /// Axis values, comma separated; cluster setups use `+` inside a
        /// setup, e.g. `1+1+1+1,2+2,4`.
        #[arg(long)]
        values: String,
        /// Cluster layout of the base system, e.g. `2+2+2`.
        #[arg(long, default_value = "2+2+2")]
        clusters: String,
        /// Reflecting elements of the base system.
        #[arg(long, default_value_t = 8)]
        elements: usize,
        #[arg(long, default_value_t = 40.0)]
        p0_dbm: f64,
        #[arg(long, default_value_t = -110.0)]
        sigma2_dbm: f64,
        #[arg(long, default_value_t = 0.8)]
        eta: f64,
        /// Block length in seconds.
        #[arg(long, default_value_t = 0.1)]
        block: f64,
        #[arg(long, default_value_t = -30.0)]
        zeta0_db: f64,
        /// User to surface distance in meters.
        #[arg(long, default_value_t = 5.0)]
        distance: f64,
        /// Redraw distances per realization from `lo:hi` instead.
        #[arg(long)]
        distance_range: Option<String>,
        #[arg(long, default_value_t = 2.5)]
        alpha_user: f64,
        #[arg(long, default_value_t = 2.2)]
        alpha_bi: f64,
        /// Rician factor (linear).
        #[arg(long, default_value_t = 1.0)]
        kappa: f64,
        #[arg(long, default_value_t = 20)]
        realizations: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value = "proposed,upper_bound,random_with_ta")]
        algorithms: String,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[arg(long)]
        parallel: Option<usize>,
    },
    /// Run the built-in invariant and oracle self-checks.
    Validate,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!(
                "{}",
                serde_json::json!({"error": e.to_string(), "tool": "irs-wpcn"})
            );
            ExitCode::FAILURE
        }
    }
}

fn dispatch(cli: Cli) -> irs_wpcn::Result<ExitCode> {
    match cli.command {
        Command::Run {
            config,
            seed,
            realizations,
            out,
            algorithms,
            parallel,
        } => {
            let mut cfg = ExperimentConfig::from_path(&config)?;
            apply_overrides(&mut cfg, seed, realizations, out, algorithms, parallel)?;
            execute(cfg)
        }
        Command::Sweep {
            axis,
            values,
            clusters,
            elements,
            p0_dbm,
            sigma2_dbm,
            eta,
            block,
            zeta0_db,
            distance,
            distance_range,
            alpha_user,
            alpha_bi,
            kappa,
            realizations,
            seed,
            algorithms,
            out,
            parallel,
        } => {
            let cfg = build_sweep_config(SweepArgs {
                axis,
                values,
                clusters,
                elements,
                p0_dbm,
                sigma2_dbm,
                eta,
                block,
                zeta0_db,
                distance,
                distance_range,
                alpha_user,
                alpha_bi,
                kappa,
                realizations,
                seed,
                algorithms,
                out,
                parallel: parallel.unwrap_or(0),
            })?;
            execute(cfg)
        }
        Command::Validate => Ok(selfcheck::run_all()),
    }
}

fn execute(cfg: ExperimentConfig) -> irs_wpcn::Result<ExitCode> {
    let run = run_with_details(&cfg)?;
    let out_dir = cfg.output_dir.clone();
    let (csv_path, meta_path) = write_outputs(&cfg, &run, &out_dir)?;
    println!(
        "wrote {} rows to {} (metadata: {})",
        run.rows.len(),
        csv_path.display(),
        meta_path.display()
    );
    if !run.failures.is_empty() {
        println!("{} realizations excluded; see metadata", run.failures.len());
    }
    Ok(ExitCode::SUCCESS)
}

fn apply_overrides(
    cfg: &mut ExperimentConfig,
    seed: Option<u64>,
    realizations: Option<usize>,
    out: Option<PathBuf>,
    algorithms: Option<String>,
    parallel: Option<usize>,
) -> irs_wpcn::Result<()> {
    if let Some(s) = seed {
        cfg.base_seed = s;
    }
    if let Some(r) = realizations {
        cfg.realizations = r;
    }
    if let Some(o) = out {
        cfg.output_dir = o;
    }
    if let Some(list) = algorithms {
        cfg.algorithms = parse_algorithms(&list)?;
    }
    if let Some(p) = parallel {
        cfg.threads = p;
    }
    cfg.validate()
}

fn parse_algorithms(list: &str) -> irs_wpcn::Result<Vec<Algorithm>> {
    list.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| s.parse())
        .collect()
}

struct SweepArgs {
    axis: String,
    values: String,
    clusters: String,
    elements: usize,
    p0_dbm: f64,
    sigma2_dbm: f64,
    eta: f64,
    block: f64,
    zeta0_db: f64,
    distance: f64,
    distance_range: Option<String>,
    alpha_user: f64,
    alpha_bi: f64,
    kappa: f64,
    realizations: usize,
    seed: u64,
    algorithms: String,
    out: PathBuf,
    parallel: usize,
}

fn parse_sizes(text: &str) -> irs_wpcn::Result<Vec<usize>> {
    text.split('+')
        .map(|s| {
            s.trim()
                .parse::<usize>()
                .map_err(|_| irs_wpcn::Error::Config(format!("bad cluster size '{s}'")))
        })
        .collect()
}

fn build_sweep_config(args: SweepArgs) -> irs_wpcn::Result<ExperimentConfig> {
    use irs_wpcn::experiments::GroupingScheme;

    let bad = |msg: String| irs_wpcn::Error::Config(msg);
    let values: Vec<&str> = args
        .values
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .collect();
    if values.is_empty() {
        return Err(bad("no sweep values given".into()));
    }
    let sweep = match args.axis.as_str() {
        "elements" => Sweep::Elements(
            values
                .iter()
                .map(|v| v.parse().map_err(|_| bad(format!("bad element count '{v}'"))))
                .collect::<irs_wpcn::Result<_>>()?,
        ),
        "user_distance" => Sweep::UserDistance(
            values
                .iter()
                .map(|v| v.parse().map_err(|_| bad(format!("bad distance '{v}'"))))
                .collect::<irs_wpcn::Result<_>>()?,
        ),
        "clusters" => Sweep::ClusterSetups(
            values
                .iter()
                .map(|v| parse_sizes(v))
                .collect::<irs_wpcn::Result<_>>()?,
        ),
        "grouping" => Sweep::Grouping(
            values
                .iter()
                .map(|v| match v.to_ascii_lowercase().as_str() {
                    "lcsd" => Ok(GroupingScheme::Lcsd),
                    "scsd" => Ok(GroupingScheme::Scsd),
                    "random" => Ok(GroupingScheme::Random(0)),
                    other => Err(bad(format!("unknown grouping '{other}'"))),
                })
                .collect::<irs_wpcn::Result<_>>()?,
        ),
        "bits" => Sweep::Bits(
            values
                .iter()
                .map(|v| v.parse().map_err(|_| bad(format!("bad bit count '{v}'"))))
                .collect::<irs_wpcn::Result<_>>()?,
        ),
        other => return Err(bad(format!("unknown sweep axis '{other}'"))),
    };

    let distance_range = match &args.distance_range {
        None => None,
        Some(text) => {
            let parts: Vec<&str> = text.split(':').collect();
            if parts.len() != 2 {
                return Err(bad(format!("distance range '{text}' is not lo:hi")));
            }
            let lo: f64 = parts[0]
                .parse()
                .map_err(|_| bad(format!("bad range bound '{}'", parts[0])))?;
            let hi: f64 = parts[1]
                .parse()
                .map_err(|_| bad(format!("bad range bound '{}'", parts[1])))?;
            Some((lo, hi))
        }
    };
    let d_user = distance_range.map_or(args.distance, |(lo, hi)| 0.5 * (lo + hi));

    let dbm = |x: f64| 10f64.powf((x - 30.0) / 10.0);
    let base = irs_wpcn::SystemParams::uniform(
        args.elements,
        parse_sizes(&args.clusters)?,
        dbm(args.p0_dbm),
        args.eta,
        dbm(args.sigma2_dbm),
        args.block,
        10f64.powf(args.zeta0_db / 10.0),
        1.0,
        1.0,
        args.alpha_bi,
        d_user,
        args.alpha_user,
        args.kappa,
    )?;

    let cfg = ExperimentConfig {
        base,
        distance_range,
        sweep,
        realizations: args.realizations,
        base_seed: args.seed,
        algorithms: parse_algorithms(&args.algorithms)?,
        output_dir: args.out,
        timing_in_csv: false,
        threads: args.parallel,
        solver: Default::default(),
    };
    cfg.validate()?;
    Ok(cfg)
}
