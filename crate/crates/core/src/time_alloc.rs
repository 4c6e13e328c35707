//! Optimal split of the block between downlink power transfer and the
//! uplink cluster slots, for fixed beams.
//!
//! With per-cluster gains `gamma_k` the problem is
//! `max sum_k tau_k log2(1 + gamma_k tau_0 / tau_k)` over the simplex
//! `tau_0 + sum tau_k <= T`. It is concave, and its KKT conditions force
//! the per-cluster operating points `x_k = gamma_k tau_0 / tau_k` to share
//! one value `x*` (the marginal-rate function is strictly increasing and
//! equalized across clusters by the shared budget multiplier). That common
//! root solves the scalar equation `(1+x) ln(1+x) - x = sum_k gamma_k`,
//! found here by bisection, and the durations follow in closed form with
//! the budget tight.

use crate::error::{Error, Result};
use crate::model::{
    cascade, reflect_gain, ChannelRealization, ReflectVector, SystemParams, TimeAllocation,
};

/// Effective per-cluster gains `gamma_k = (eta P0 / sigma^2) sum_m b c`.
#[derive(Clone, Debug, PartialEq)]
pub struct ClusterGains {
    pub gamma: Vec<f64>,
}

impl ClusterGains {
    pub fn total(&self) -> f64 {
        self.gamma.iter().sum()
    }
}

/// Computes the gains from the current beams: for every user the product
/// of its downlink energy gain and uplink information gain.
pub fn compute_gains(
    params: &SystemParams,
    chans: &ChannelRealization,
    w0: &ReflectVector,
    wk: &[ReflectVector],
) -> Result<ClusterGains> {
    let k_total = params.num_clusters();
    if wk.len() != k_total {
        return Err(Error::DimensionMismatch(format!(
            "expected {k_total} uplink beams, got {}",
            wk.len()
        )));
    }
    let scale = params.eta * params.p0 / params.sigma2;
    let mut gamma = Vec::with_capacity(k_total);
    for k in 0..k_total {
        let mut sum = 0.0;
        for m in 0..params.clusters[k] {
            let c_gain = reflect_gain(w0, &cascade(&chans.g[k][m], &chans.g_bs)?)?;
            let b_gain = reflect_gain(&wk[k], &cascade(&chans.h_bs, &chans.h[k][m])?)?;
            sum += b_gain * c_gain;
        }
        gamma.push(scale * sum);
    }
    Ok(ClusterGains { gamma })
}

/// Root of the stationarity equation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RootSolution {
    pub x: f64,
    /// Set when the total gain is zero: no energy reaches the users and
    /// the root degenerates to zero.
    pub degenerate: bool,
}

/// Solves `(1+x) ln(1+x) - x = gamma_total` for the unique `x >= 0`.
///
/// The left side is zero at zero and strictly increasing, so bisection on
/// a doubled bracket converges unconditionally; the interval is shrunk to
/// `1e-12 max(1, x)`.
pub fn solve_root(gamma_total: f64) -> Result<RootSolution> {
    if !(gamma_total >= 0.0) {
        return Err(Error::Domain(format!(
            "total gain must be nonnegative, got {gamma_total}"
        )));
    }
    if gamma_total == 0.0 {
        return Ok(RootSolution {
            x: 0.0,
            degenerate: true,
        });
    }
    let f = |x: f64| (1.0 + x) * x.ln_1p() - x;
    let mut hi = 1.0f64;
    let mut doublings = 0;
    while f(hi) < gamma_total {
        hi *= 2.0;
        doublings += 1;
        if doublings > 1100 {
            return Err(Error::NonFinite("root bracket"));
        }
    }
    let mut lo = 0.0f64;
    while hi - lo > 1e-12 * (0.5 * (hi + lo)).max(1.0) {
        let mid = 0.5 * (lo + hi);
        if f(mid) < gamma_total {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(RootSolution {
        x: 0.5 * (lo + hi),
        degenerate: false,
    })
}

/// Closed-form optimal durations for the given gains.
///
/// The budget is tight: `tau_0 + sum tau_k = T`. When every gain is zero
/// any split yields zero throughput; the whole block goes to power
/// transfer, the continuous limit of the closed form.
pub fn allocate(gains: &ClusterGains, t_block: f64) -> Result<TimeAllocation> {
    if !(t_block > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "block length must be positive, got {t_block}"
        )));
    }
    let root = solve_root(gains.total())?;
    if root.degenerate {
        return Ok(TimeAllocation {
            tau0: t_block,
            tau: vec![0.0; gains.gamma.len()],
        });
    }
    let x = root.x;
    let ratio_sum: f64 = gains.gamma.iter().map(|g| g / x).sum();
    let tau0 = t_block / (1.0 + ratio_sum);
    let tau: Vec<f64> = gains.gamma.iter().map(|g| g / x * tau0).collect();
    Ok(TimeAllocation { tau0, tau })
}

/// Objective of the allocation problem: `sum_k tau_k log2(1 + gamma_k
/// tau_0 / tau_k)`, with the zero-duration limit handled.
pub fn objective(gains: &ClusterGains, times: &TimeAllocation) -> f64 {
    gains
        .gamma
        .iter()
        .zip(&times.tau)
        .map(|(&g, &t)| {
            if t <= 0.0 {
                0.0
            } else {
                t * (1.0 + g * times.tau0 / t).log2()
            }
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const E: f64 = std::f64::consts::E;

    #[test]
    fn zero_gain_degenerates() {
        let root = solve_root(0.0).unwrap();
        assert_eq!(root.x, 0.0);
        assert!(root.degenerate);

        let times = allocate(&ClusterGains { gamma: vec![0.0, 0.0] }, 2.0).unwrap();
        assert_eq!(times.tau0, 2.0);
        assert_eq!(times.tau, vec![0.0, 0.0]);
    }

    #[test]
    fn unit_gain_root_is_e_minus_one() {
        let root = solve_root(1.0).unwrap();
        assert!(
            (root.x - (E - 1.0)).abs() <= 1e-9,
            "x = {}, expected e - 1",
            root.x
        );
        assert!(!root.degenerate);
    }

    #[test]
    fn root_satisfies_original_stationarity_form() {
        // Residual of the unrearranged per-cluster condition
        // log2(1+x) - x log2(e)/(1+x) - Gamma log2(e)/(1+x) = 0.
        for gamma in [0.3, 1.0, 10.0, 1e6, 1e15] {
            let x = solve_root(gamma).unwrap().x;
            let log2e = std::f64::consts::LOG2_E;
            let residual = (1.0 + x).log2() - x * log2e / (1.0 + x) - gamma * log2e / (1.0 + x);
            assert!(
                residual.abs() <= 1e-9,
                "gamma {gamma}: residual {residual:e}"
            );
        }
    }

    #[test]
    fn negative_gain_rejected() {
        assert!(solve_root(-1.0).is_err());
    }

    #[test]
    fn single_cluster_analytic_allocation() {
        let gains = ClusterGains { gamma: vec![1.0] };
        let times = allocate(&gains, 1.0).unwrap();
        assert!((times.tau0 - (E - 1.0) / E).abs() < 1e-9);
        assert!((times.tau[0] - 1.0 / E).abs() < 1e-9);
        assert!((times.total() - 1.0).abs() < 1e-12);
        let rate = objective(&gains, &times);
        assert!((rate - std::f64::consts::LOG2_E / E).abs() < 1e-9);
    }

    #[test]
    fn two_cluster_allocation_matches_full_grid() {
        // Exhaustive search over the tight simplex with step 1e-4. The
        // objective increases in tau0 with the others fixed, so optimal
        // points spend the whole budget and the tight simplex suffices.
        let gains = ClusterGains {
            gamma: vec![1.0, 1.0],
        };
        let times = allocate(&gains, 1.0).unwrap();

        let step = 1e-4;
        let steps = 10_000usize;
        let mut best = f64::NEG_INFINITY;
        let mut best_point = (0.0, 0.0, 0.0);
        for i in 0..=steps {
            let tau0 = i as f64 * step;
            for j in 0..=(steps - i) {
                let tau1 = j as f64 * step;
                let tau2 = 1.0 - tau0 - tau1;
                let r1 = if tau1 > 0.0 {
                    tau1 * (1.0 + tau0 / tau1).log2()
                } else {
                    0.0
                };
                let r2 = if tau2 > 0.0 {
                    tau2 * (1.0 + tau0 / tau2).log2()
                } else {
                    0.0
                };
                let val = r1 + r2;
                if val > best {
                    best = val;
                    best_point = (tau0, tau1, tau2);
                }
            }
        }
        assert!((times.tau0 - best_point.0).abs() <= 1e-3);
        assert!((times.tau[0] - best_point.1).abs() <= 1e-3);
        assert!((times.tau[1] - best_point.2).abs() <= 1e-3);
        let ours = objective(&gains, &times);
        assert!(ours >= best - 1e-6 * best.abs());
    }

    #[test]
    fn allocation_scales_with_block_length() {
        let gains = ClusterGains {
            gamma: vec![0.7, 2.3, 0.1],
        };
        let a = allocate(&gains, 1.0).unwrap();
        let b = allocate(&gains, 3.5).unwrap();
        assert!((b.tau0 / a.tau0 - 3.5).abs() < 1e-12);
        for (x, y) in a.tau.iter().zip(&b.tau) {
            assert!((y / x - 3.5).abs() < 1e-12);
        }
        let ra = objective(&gains, &a);
        let rb = objective(&gains, &b);
        assert!((rb / ra - 3.5).abs() < 1e-12);
    }

    #[test]
    fn kkt_stationarity_and_common_ratio() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..20 {
            let k = 1 + (rng.gen::<u64>() % 3) as usize;
            let gamma: Vec<f64> = (0..k).map(|_| rng.gen::<f64>() * 10.0 + 0.01).collect();
            let gains = ClusterGains { gamma };
            let times = allocate(&gains, 1.0).unwrap();
            let x_common = solve_root(gains.total()).unwrap().x;
            let log2e = std::f64::consts::LOG2_E;
            for (g, t) in gains.gamma.iter().zip(&times.tau) {
                let xk = g * times.tau0 / t;
                assert!(
                    (xk - x_common).abs() <= 1e-9 * x_common.max(1.0),
                    "ratio spread: {xk} vs {x_common}"
                );
                let residual = (1.0 + xk).log2()
                    - xk * log2e / (1.0 + xk)
                    - gains.total() * log2e / (1.0 + xk);
                assert!(residual.abs() <= 1e-9);
            }
            assert!((times.total() - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn allocation_dominates_random_feasible_points() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        for _ in 0..5 {
            let k = 1 + (rng.gen::<u64>() % 3) as usize;
            let gamma: Vec<f64> = (0..k).map(|_| rng.gen::<f64>() * 5.0).collect();
            let gains = ClusterGains { gamma };
            let ours = objective(&gains, &allocate(&gains, 1.0).unwrap());
            for _ in 0..10_000 {
                let mut draws: Vec<f64> = (0..=k).map(|_| rng.gen::<f64>()).collect();
                let total: f64 = draws.iter().sum();
                // scale to a random fraction of the budget, covering
                // interior points as well as the tight face
                let budget = rng.gen::<f64>();
                for d in draws.iter_mut() {
                    *d *= budget / total;
                }
                let candidate = TimeAllocation {
                    tau0: draws[0],
                    tau: draws[1..].to_vec(),
                };
                let val = objective(&gains, &candidate);
                assert!(
                    val <= ours + 1e-9 * ours.abs().max(1.0),
                    "random point {val} beats allocation {ours}"
                );
            }
        }
    }
}
