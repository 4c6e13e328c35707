//! Block coordinate ascent over the three variable blocks: the downlink
//! beam, the per-cluster uplink beams, and the time allocation.
//!
//! Each round tightens the downlink beam through the rank-one relaxation
//! of the concave-log SDP, then every cluster beam through the linear
//! SDP, then recomputes the optimal durations in closed form. A block
//! update is only accepted when the recomputed network throughput does
//! not decrease, which keeps the objective trajectory monotone even
//! though the rank-one extraction is lossy. The loop stops when the
//! relative improvement falls below the threshold or the round budget is
//! exhausted.

use std::time::Instant;

use crate::error::{Error, Result};
use crate::hermitian::HermitianMatrix;
use crate::model::{
    cascade, evaluate_throughput, reflect_gain, ChannelRealization, ReflectVector, Solution,
    SystemParams, TimeAllocation, weighted_gram,
};
use crate::sdp::{solve_linear_sdp, solve_log_sdp_from, LogTerm, SdpCut};
use crate::srocr::{
    extract_unit_modulus, srocr_solve, SrocrConfig, SrocrTermination, SubproblemSolve,
};
use crate::time_alloc::{allocate, compute_gains};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Debug)]
pub struct BcaConfig {
    /// Relative-improvement stopping threshold.
    pub eps: f64,
    pub max_rounds: usize,
    pub srocr: SrocrConfig,
    /// Seed for the random initial phases.
    pub init_seed: u64,
    /// Reuse the previous round's lifted downlink solution as the inner
    /// solver's warm start. Affects only the iteration path.
    pub warm_start: bool,
}

impl Default for BcaConfig {
    fn default() -> Self {
        Self {
            eps: 1e-3,
            max_rounds: 30,
            srocr: SrocrConfig::default(),
            init_seed: 0,
            warm_start: true,
        }
    }
}

impl BcaConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.eps > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "eps must be positive, got {}",
                self.eps
            )));
        }
        if self.max_rounds < 1 {
            return Err(Error::InvalidParameter("max_rounds must be >= 1".into()));
        }
        self.srocr.validate()
    }
}

/// Initial operating point of the ascent.
#[derive(Clone, Debug)]
pub struct StartPoint {
    pub w0: ReflectVector,
    pub wk: Vec<ReflectVector>,
    pub times: TimeAllocation,
}

impl StartPoint {
    /// Random phases for every beam, equal time split.
    pub fn random(params: &SystemParams, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = params.n_elements;
        let k = params.num_clusters();
        let w0 = ReflectVector::random(&mut rng, n, 0);
        let wk = (1..=k)
            .map(|tag| ReflectVector::random(&mut rng, n, tag))
            .collect();
        Self {
            w0,
            wk,
            times: TimeAllocation::equal_split(params.t_block, k),
        }
    }

    pub fn from_solution(solution: &Solution) -> Self {
        Self {
            w0: solution.w0.clone(),
            wk: solution.wk.clone(),
            times: solution.times.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BlockUpdate {
    Accepted,
    Kept(KeptReason),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum KeptReason {
    /// Extraction produced a point no better than the current block value.
    NoImprovement,
    /// The tightening loop stalled before reaching rank one.
    Stalled,
    /// The relaxation was infeasible from the start.
    Infeasible,
    /// The cluster has no slot time, so there is nothing to optimize.
    ZeroDuration,
}

#[derive(Clone, Debug)]
pub struct RoundLog {
    pub downlink: BlockUpdate,
    pub clusters: Vec<BlockUpdate>,
    pub times: BlockUpdate,
}

/// Trace of one ascent run. The acceptance guard keeps the objective
/// trajectory nondecreasing up to a 1e-12 relative rounding allowance on
/// the closed-form duration step.
#[derive(Clone, Debug)]
pub struct BcaReport {
    pub rounds: usize,
    pub objective_trajectory: Vec<f64>,
    pub per_round_seconds: Vec<f64>,
    pub round_logs: Vec<RoundLog>,
}

/// Terms of the downlink subproblem: one `(tau_k, lambda_k, G_k)` per
/// cluster with positive slot time, where `lambda_k = eta tau_0 P0 /
/// (tau_k sigma^2)` and `G_k` is the gram of the cascaded downlink
/// channels weighted by the current uplink gains.
pub fn build_subproblem1(
    params: &SystemParams,
    chans: &ChannelRealization,
    wk: &[ReflectVector],
    times: &TimeAllocation,
) -> Result<Vec<LogTerm>> {
    let mut terms = Vec::new();
    for k in 0..params.num_clusters() {
        let tau_k = times.tau[k];
        if tau_k <= 0.0 {
            continue;
        }
        let lambda = params.eta * times.tau0 * params.p0 / (tau_k * params.sigma2);
        let mut vectors = Vec::with_capacity(params.clusters[k]);
        let mut weights = Vec::with_capacity(params.clusters[k]);
        for m in 0..params.clusters[k] {
            vectors.push(cascade(&chans.g[k][m], &chans.g_bs)?);
            weights.push(reflect_gain(&wk[k], &cascade(&chans.h_bs, &chans.h[k][m])?)?);
        }
        terms.push(LogTerm {
            tau: tau_k,
            lambda,
            gram: weighted_gram(&vectors, &weights)?,
        });
    }
    if terms.is_empty() {
        return Err(Error::EmptyObjective);
    }
    Ok(terms)
}

/// Objective matrix of cluster k's uplink subproblem: the gram of the
/// cascaded uplink channels weighted by the current downlink gains.
pub fn build_subproblem2(
    params: &SystemParams,
    chans: &ChannelRealization,
    w0: &ReflectVector,
    k: usize,
) -> Result<HermitianMatrix> {
    if k >= params.num_clusters() {
        return Err(Error::IndexOutOfRange(format!("cluster {k}")));
    }
    let mk = params.clusters[k];
    let mut vectors = Vec::with_capacity(mk);
    let mut weights = Vec::with_capacity(mk);
    for m in 0..mk {
        vectors.push(cascade(&chans.h_bs, &chans.h[k][m])?);
        weights.push(reflect_gain(w0, &cascade(&chans.g[k][m], &chans.g_bs)?)?);
    }
    weighted_gram(&vectors, &weights)
}

/// Runs the ascent from random initial phases derived from the config
/// seed.
pub fn optimize(
    params: &SystemParams,
    chans: &ChannelRealization,
    config: &BcaConfig,
) -> Result<(Solution, BcaReport)> {
    let start = StartPoint::random(params, config.init_seed);
    optimize_from(params, chans, config, start)
}

/// Runs the ascent from an explicit starting point. The monotone guard
/// makes the final throughput at least the starting point's.
pub fn optimize_from(
    params: &SystemParams,
    chans: &ChannelRealization,
    config: &BcaConfig,
    start: StartPoint,
) -> Result<(Solution, BcaReport)> {
    params.validate()?;
    config.validate()?;
    chans.check_dims(params)?;
    let k_total = params.num_clusters();
    if start.wk.len() != k_total || start.times.tau.len() != k_total {
        return Err(Error::DimensionMismatch(
            "start point does not match the cluster layout".into(),
        ));
    }
    start.times.validate(params.t_block)?;

    let mut w0 = start.w0;
    let mut wk = start.wk;
    let mut times = start.times;
    let mut rate = evaluate_throughput(params, chans, &w0, &wk, &times)?;

    let mut trajectory = vec![rate];
    let mut round_logs = Vec::new();
    let mut per_round_seconds = Vec::new();
    // lifted downlink solution kept across rounds as inner warm start
    let mut lifted_w0: Option<HermitianMatrix> = None;
    let mut rounds = 0usize;

    for _round in 0..config.max_rounds {
        rounds += 1;
        let tick = Instant::now();
        let rate_prev = rate;

        // Block 1: downlink beam.
        let downlink_log = match update_downlink(
            params, chans, &wk, &times, config, lifted_w0.as_ref(),
        )? {
            DownlinkOutcome::Candidate { beam, lifted } => {
                lifted_w0 = Some(lifted);
                let candidate = evaluate_throughput(params, chans, &beam, &wk, &times)?;
                if candidate >= rate {
                    w0 = beam;
                    rate = candidate;
                    BlockUpdate::Accepted
                } else {
                    BlockUpdate::Kept(KeptReason::NoImprovement)
                }
            }
            DownlinkOutcome::Skipped(reason) => BlockUpdate::Kept(reason),
        };

        // Block 2: one uplink beam per cluster, in cluster order.
        let mut cluster_logs = Vec::with_capacity(k_total);
        for k in 0..k_total {
            if times.tau[k] <= 0.0 {
                cluster_logs.push(BlockUpdate::Kept(KeptReason::ZeroDuration));
                continue;
            }
            let objective = build_subproblem2(params, chans, &w0, k)?;
            let log = match tighten_linear(&objective, &config.srocr)? {
                TightenOutcome::Converged(w_mat) => {
                    let (beam, _) = extract_unit_modulus(&w_mat, k + 1)?;
                    let mut wk_try = wk.clone();
                    wk_try[k] = beam;
                    let candidate = evaluate_throughput(params, chans, &w0, &wk_try, &times)?;
                    if candidate >= rate {
                        wk = wk_try;
                        rate = candidate;
                        BlockUpdate::Accepted
                    } else {
                        BlockUpdate::Kept(KeptReason::NoImprovement)
                    }
                }
                TightenOutcome::Stalled => BlockUpdate::Kept(KeptReason::Stalled),
                TightenOutcome::Infeasible => BlockUpdate::Kept(KeptReason::Infeasible),
            };
            cluster_logs.push(log);
        }

        // Block 3: time allocation, globally optimal for fixed beams, so
        // it is always adopted; the guard below only tolerates rounding
        // at the fixed point, far inside the monotonicity margin.
        let gains = compute_gains(params, chans, &w0, &wk)?;
        let times_cand = allocate(&gains, params.t_block)?;
        let candidate = evaluate_throughput(params, chans, &w0, &wk, &times_cand)?;
        let times_log = if candidate >= rate - 1e-12 * rate.abs() {
            times = times_cand;
            rate = candidate;
            BlockUpdate::Accepted
        } else {
            BlockUpdate::Kept(KeptReason::NoImprovement)
        };

        trajectory.push(rate);
        per_round_seconds.push(tick.elapsed().as_secs_f64());
        round_logs.push(RoundLog {
            downlink: downlink_log,
            clusters: cluster_logs,
            times: times_log,
        });

        if rate <= 0.0 {
            break;
        }
        let relative = (rate - rate_prev) / rate;
        if relative < config.eps {
            break;
        }
    }

    let solution = Solution {
        w0,
        wk,
        times,
        throughput: rate,
    };
    let report = BcaReport {
        rounds,
        objective_trajectory: trajectory,
        per_round_seconds,
        round_logs,
    };
    Ok((solution, report))
}

enum DownlinkOutcome {
    Candidate {
        beam: ReflectVector,
        lifted: HermitianMatrix,
    },
    Skipped(KeptReason),
}

fn update_downlink(
    params: &SystemParams,
    chans: &ChannelRealization,
    wk: &[ReflectVector],
    times: &TimeAllocation,
    config: &BcaConfig,
    warm: Option<&HermitianMatrix>,
) -> Result<DownlinkOutcome> {
    let terms = match build_subproblem1(params, chans, wk, times) {
        Ok(t) => t,
        Err(Error::EmptyObjective) => {
            return Ok(DownlinkOutcome::Skipped(KeptReason::ZeroDuration))
        }
        Err(e) => return Err(e),
    };
    let warm_init = if config.warm_start { warm } else { None };
    match tighten_log(&terms, &config.srocr, warm_init)? {
        TightenOutcome::Converged(w_mat) => {
            let (beam, _) = extract_unit_modulus(&w_mat, 0)?;
            Ok(DownlinkOutcome::Candidate {
                beam,
                lifted: w_mat,
            })
        }
        TightenOutcome::Stalled => Ok(DownlinkOutcome::Skipped(KeptReason::Stalled)),
        TightenOutcome::Infeasible => Ok(DownlinkOutcome::Skipped(KeptReason::Infeasible)),
    }
}

/// Rank-one tightening of a concave-log objective; shared by the downlink
/// block and the fixed-split baseline.
pub(crate) fn tighten_log(
    terms: &[LogTerm],
    config: &SrocrConfig,
    warm: Option<&HermitianMatrix>,
) -> Result<TightenOutcome> {
    let mut oracle = |level: f64, anchor: Option<&HermitianMatrix>| -> Result<SubproblemSolve> {
        let cut = match anchor {
            Some(a) if level > 0.0 => SdpCut::from_anchor(a, level)?,
            _ => None,
        };
        let res = solve_log_sdp_from(terms, cut.as_ref(), anchor.or(warm))?;
        Ok(SubproblemSolve {
            solvable: res.is_optimal(),
            objective: res.objective,
            w: res.w,
        })
    };
    match srocr_solve(&mut oracle, config) {
        Ok((w_mat, report)) => {
            if report.termination == SrocrTermination::Converged {
                Ok(TightenOutcome::Converged(w_mat))
            } else {
                Ok(TightenOutcome::Stalled)
            }
        }
        Err(Error::InitialInfeasible) => Ok(TightenOutcome::Infeasible),
        Err(e) => Err(e),
    }
}

pub(crate) enum TightenOutcome {
    Converged(HermitianMatrix),
    Stalled,
    Infeasible,
}

/// Rank-one tightening of a linear elliptope objective; shared by the
/// per-cluster block and the single-beam baseline.
pub(crate) fn tighten_linear(
    objective: &HermitianMatrix,
    config: &SrocrConfig,
) -> Result<TightenOutcome> {
    let mut oracle = |level: f64, anchor: Option<&HermitianMatrix>| -> Result<SubproblemSolve> {
        let cut = match anchor {
            Some(a) if level > 0.0 => SdpCut::from_anchor(a, level)?,
            _ => None,
        };
        let res = solve_linear_sdp(objective, cut.as_ref())?;
        Ok(SubproblemSolve {
            solvable: res.is_optimal(),
            objective: res.objective,
            w: res.w,
        })
    };
    match srocr_solve(&mut oracle, config) {
        Ok((w_mat, report)) => {
            if report.termination == SrocrTermination::Converged {
                Ok(TightenOutcome::Converged(w_mat))
            } else {
                Ok(TightenOutcome::Stalled)
            }
        }
        Err(Error::InitialInfeasible) => Ok(TightenOutcome::Infeasible),
        Err(e) => Err(e),
    }
}
