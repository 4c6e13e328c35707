//! Built-in invariant and oracle checks behind `irs-wpcn validate`.
//!
//! Each check prints one PASS/FAIL line; the command exits nonzero when
//! any check fails. The checks are scaled-down versions of the test
//! suite's oracles, meant as a fast installation smoke test.

use std::process::ExitCode;

use nalgebra::DVector;
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use irs_wpcn::bca::{optimize, BcaConfig};
use irs_wpcn::experiments::{run_with_details, write_outputs, ExperimentConfig};
use irs_wpcn::model::{generate_channels, reflect_gain, ReflectVector};
use irs_wpcn::sdp::solve_linear_sdp;
use irs_wpcn::time_alloc::{allocate, solve_root, ClusterGains};
use irs_wpcn::{HermitianMatrix, SystemParams};

pub fn run_all() -> ExitCode {
    let checks: Vec<(&str, fn() -> Result<(), String>)> = vec![
        ("time-allocation analytic root", check_root),
        ("reflect gain bound", check_gain_bound),
        ("linear SDP grid oracle", check_linear_grid),
        ("rank-one tightening contract", check_tightening),
        ("ascent monotonicity", check_monotone),
        ("reproducible experiment output", check_reproducible),
    ];
    let mut ok = true;
    for (name, check) in checks {
        match check() {
            Ok(()) => println!("PASS {name}"),
            Err(msg) => {
                ok = false;
                println!("FAIL {name}: {msg}");
            }
        }
    }
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    }
}

fn check_root() -> Result<(), String> {
    let root = solve_root(1.0).map_err(|e| e.to_string())?;
    let expect = std::f64::consts::E - 1.0;
    if (root.x - expect).abs() > 1e-9 {
        return Err(format!("x = {}, expected e - 1", root.x));
    }
    let times = allocate(&ClusterGains { gamma: vec![1.0] }, 1.0).map_err(|e| e.to_string())?;
    if (times.total() - 1.0).abs() > 1e-9 {
        return Err("budget not tight".into());
    }
    Ok(())
}

fn check_gain_bound() -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..200 {
        let n = 1 + (rng.gen::<u64>() % 6) as usize;
        let v = DVector::from_fn(n, |_, _| {
            Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
        });
        let w = ReflectVector::random(&mut rng, n, 0);
        let bound: f64 = v.iter().map(|z| z.norm()).sum();
        let gain = reflect_gain(&w, &v).map_err(|e| e.to_string())?;
        if gain > bound * bound * (1.0 + 1e-9) {
            return Err(format!("gain {gain} exceeds bound {}", bound * bound));
        }
    }
    Ok(())
}

fn check_linear_grid() -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let raw = nalgebra::DMatrix::from_fn(2, 2, |_, _| {
        Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
    });
    let c = HermitianMatrix::from_matrix(&raw).map_err(|e| e.to_string())?;
    let res = solve_linear_sdp(&c, None).map_err(|e| e.to_string())?;
    if !res.is_optimal() {
        return Err("solver did not reach optimality".into());
    }
    let mut best = f64::NEG_INFINITY;
    for i in 0..400 {
        let rho = i as f64 / 399.0;
        for j in 0..400 {
            let phi = j as f64 * std::f64::consts::TAU / 400.0;
            let off = Complex64::from_polar(rho, phi);
            let w = HermitianMatrix::from_matrix(&nalgebra::DMatrix::from_row_slice(
                2,
                2,
                &[Complex64::new(1.0, 0.0), off, off.conj(), Complex64::new(1.0, 0.0)],
            ))
            .map_err(|e| e.to_string())?;
            best = best.max(c.inner(&w));
        }
    }
    if (res.objective - best).abs() > 2e-3 {
        return Err(format!("solver {} vs grid {best}", res.objective));
    }
    Ok(())
}

fn check_tightening() -> Result<(), String> {
    let params = desk_params(3, vec![1, 1]).map_err(|e| e.to_string())?;
    let chans = generate_channels(&params, 5);
    let cfg = BcaConfig {
        init_seed: 5,
        ..Default::default()
    };
    let (solution, _) = optimize(&params, &chans, &cfg).map_err(|e| e.to_string())?;
    if solution.w0.max_modulus_deviation() > 1e-9 {
        return Err("downlink beam is not unit modulus".into());
    }
    solution.validate(&params, &chans).map_err(|e| e.to_string())
}

fn check_monotone() -> Result<(), String> {
    let params = desk_params(2, vec![1, 1]).map_err(|e| e.to_string())?;
    for seed in [1u64, 2] {
        let chans = generate_channels(&params, seed);
        let cfg = BcaConfig {
            init_seed: seed,
            ..Default::default()
        };
        let (_, report) = optimize(&params, &chans, &cfg).map_err(|e| e.to_string())?;
        for pair in report.objective_trajectory.windows(2) {
            if pair[1] < pair[0] - 1e-8 {
                return Err(format!("objective decreased: {} -> {}", pair[0], pair[1]));
            }
        }
    }
    Ok(())
}

fn check_reproducible() -> Result<(), String> {
    let toml = r#"
[system]
elements = 2
clusters = [1, 1]
p0_dbm = 40.0
sigma2_dbm = -110.0
eta = 0.8
block_seconds = 0.1
zeta0_db = -30.0
reference_distance_m = 1.0
bs_irs_distance_m = 1.0
bs_irs_exponent = 2.2
user_distance_m = 5.0
user_exponent = 2.5

[sweep]
axis = "elements"
elements = [2]

[run]
realizations = 2
base_seed = 42
algorithms = ["proposed", "random_with_ta"]
output_dir = "unused"
"#;
    let cfg = ExperimentConfig::from_toml_str(toml).map_err(|e| e.to_string())?;
    let dir = std::env::temp_dir().join(format!("irs-wpcn-validate-{}", std::process::id()));
    let read = |suffix: &str| -> Result<Vec<u8>, String> {
        let mut c = cfg.clone();
        c.threads = if suffix == "a" { 1 } else { 2 };
        let run = run_with_details(&c).map_err(|e| e.to_string())?;
        let out = dir.join(suffix);
        let (csv_path, _) = write_outputs(&c, &run, &out).map_err(|e| e.to_string())?;
        std::fs::read(csv_path).map_err(|e| e.to_string())
    };
    let a = read("a")?;
    let b = read("b")?;
    let _ = std::fs::remove_dir_all(&dir);
    if a != b {
        return Err("serial and parallel CSV bytes differ".into());
    }
    Ok(())
}

fn desk_params(n: usize, clusters: Vec<usize>) -> irs_wpcn::Result<SystemParams> {
    SystemParams::uniform(
        n, clusters, 10.0, 0.8, 1e-14, 0.1, 1e-3, 1.0, 1.0, 2.2, 5.0, 2.5, 1.0,
    )
}
