//! Comparison algorithms sharing the system model with the joint
//! optimizer: fixed time split, random beams with and without time
//! allocation, one shared beam for the whole block, the rank-relaxed
//! upper bound, and quantized phases.

use nalgebra::DVector;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::bca::{
    build_subproblem1, build_subproblem2, optimize, tighten_linear, tighten_log, BcaConfig,
    StartPoint, TightenOutcome,
};
use crate::error::{Error, Result};
use crate::hermitian::HermitianMatrix;
use crate::model::{
    cascade, evaluate_throughput, ChannelRealization, ReflectVector, Solution, SystemParams,
    TimeAllocation,
};
use crate::sdp::{solve_linear_sdp, solve_log_sdp_from, LogTerm, SdpCut, SdpStatusKind};
use crate::srocr::{extract_unit_modulus, srocr_solve, SrocrTermination, SubproblemSolve};
use crate::time_alloc::{allocate, compute_gains, ClusterGains};

/// The benchmark algorithms.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BaselineKind {
    /// Beamforming optimized as in the proposed algorithm, durations fixed
    /// to the equal split.
    OptimizedNoTa,
    /// Random phases, durations optimized.
    RandomWithTa,
    /// Random phases, equal split.
    RandomNoTa,
    /// One shared beam for the downlink and every uplink slot, beam and
    /// durations optimized alternately.
    SameIrsWithTa,
    /// Rank-relaxed alternating solves; returns a throughput bound, not a
    /// feasible solution.
    UpperBound,
    /// The proposed algorithm followed by phase quantization to `2^b`
    /// levels and a re-allocation of the durations.
    DiscretePhase(u32),
}

impl BaselineKind {
    pub fn label(&self) -> String {
        match self {
            Self::OptimizedNoTa => "optimized_no_ta".into(),
            Self::RandomWithTa => "random_with_ta".into(),
            Self::RandomNoTa => "random_no_ta".into(),
            Self::SameIrsWithTa => "same_irs_with_ta".into(),
            Self::UpperBound => "upper_bound".into(),
            Self::DiscretePhase(b) => format!("discrete_phase_{b}"),
        }
    }
}

/// A baseline either produces a feasible operating point or, for the
/// rank-relaxed variant, a scalar bound.
#[derive(Clone, Debug)]
pub enum BaselineOutcome {
    Feasible(Solution),
    Bound(f64),
}

impl BaselineOutcome {
    pub fn value(&self) -> f64 {
        match self {
            Self::Feasible(s) => s.throughput,
            Self::Bound(b) => *b,
        }
    }
}

/// Runs one benchmark algorithm. Random phases are drawn from
/// `config.init_seed`, so the two random baselines share identical beams
/// when given the same config. The self-contained upper bound and
/// discrete-phase variants run the proposed algorithm internally; use
/// [`upper_bound_from`] / [`discrete_phase_from`] to reuse an existing
/// run.
pub fn run_baseline(
    kind: BaselineKind,
    params: &SystemParams,
    chans: &ChannelRealization,
    config: &BcaConfig,
) -> Result<BaselineOutcome> {
    match kind {
        BaselineKind::RandomNoTa => {
            let start = StartPoint::random(params, config.init_seed);
            let throughput =
                evaluate_throughput(params, chans, &start.w0, &start.wk, &start.times)?;
            Ok(BaselineOutcome::Feasible(Solution {
                w0: start.w0,
                wk: start.wk,
                times: start.times,
                throughput,
            }))
        }
        BaselineKind::RandomWithTa => {
            let start = StartPoint::random(params, config.init_seed);
            let gains = compute_gains(params, chans, &start.w0, &start.wk)?;
            let times = allocate(&gains, params.t_block)?;
            let throughput = evaluate_throughput(params, chans, &start.w0, &start.wk, &times)?;
            Ok(BaselineOutcome::Feasible(Solution {
                w0: start.w0,
                wk: start.wk,
                times,
                throughput,
            }))
        }
        BaselineKind::OptimizedNoTa => optimized_no_ta(params, chans, config),
        BaselineKind::SameIrsWithTa => same_irs_with_ta(params, chans, config),
        BaselineKind::UpperBound => {
            let (solution, _) = optimize(params, chans, config)?;
            let bound =
                upper_bound_from(params, chans, config, &StartPoint::from_solution(&solution))?;
            Ok(BaselineOutcome::Bound(bound))
        }
        BaselineKind::DiscretePhase(bits) => {
            let (solution, _) = optimize(params, chans, config)?;
            Ok(BaselineOutcome::Feasible(discrete_phase_from(
                params, chans, bits, &solution,
            )?))
        }
    }
}

/// Beamforming rounds only, with the durations pinned to the equal split.
fn optimized_no_ta(
    params: &SystemParams,
    chans: &ChannelRealization,
    config: &BcaConfig,
) -> Result<BaselineOutcome> {
    let start = StartPoint::random(params, config.init_seed);
    let times = start.times.clone();
    let mut w0 = start.w0;
    let mut wk = start.wk;
    let mut rate = evaluate_throughput(params, chans, &w0, &wk, &times)?;
    let mut lifted: Option<HermitianMatrix> = None;

    for _round in 0..config.max_rounds {
        let rate_prev = rate;

        let terms = build_subproblem1(params, chans, &wk, &times)?;
        let warm = if config.warm_start {
            lifted.as_ref()
        } else {
            None
        };
        if let TightenOutcome::Converged(w_mat) = tighten_log(&terms, &config.srocr, warm)? {
            let (beam, _) = extract_unit_modulus(&w_mat, 0)?;
            lifted = Some(w_mat);
            let candidate = evaluate_throughput(params, chans, &beam, &wk, &times)?;
            if candidate >= rate {
                w0 = beam;
                rate = candidate;
            }
        }

        for k in 0..params.num_clusters() {
            if times.tau[k] <= 0.0 {
                continue;
            }
            let objective = build_subproblem2(params, chans, &w0, k)?;
            if let TightenOutcome::Converged(w_mat) = tighten_linear(&objective, &config.srocr)? {
                let (beam, _) = extract_unit_modulus(&w_mat, k + 1)?;
                let mut wk_try = wk.clone();
                wk_try[k] = beam;
                let candidate = evaluate_throughput(params, chans, &w0, &wk_try, &times)?;
                if candidate >= rate {
                    wk = wk_try;
                    rate = candidate;
                }
            }
        }

        if rate <= 0.0 || (rate - rate_prev) / rate < config.eps {
            break;
        }
    }

    Ok(BaselineOutcome::Feasible(Solution {
        w0,
        wk,
        times,
        throughput: rate,
    }))
}

/// Cascaded per-user rank-one operands, used by the shared-beam baseline
/// and the upper bound.
struct CascadedGrams {
    /// Downlink `g_hat g_hat^H` per `[cluster][member]`.
    down: Vec<Vec<HermitianMatrix>>,
    /// Uplink `h_hat h_hat^H` per `[cluster][member]`.
    up: Vec<Vec<HermitianMatrix>>,
}

impl CascadedGrams {
    fn build(params: &SystemParams, chans: &ChannelRealization) -> Result<Self> {
        let mut down = Vec::with_capacity(params.num_clusters());
        let mut up = Vec::with_capacity(params.num_clusters());
        for k in 0..params.num_clusters() {
            let mut dk = Vec::with_capacity(params.clusters[k]);
            let mut uk = Vec::with_capacity(params.clusters[k]);
            for m in 0..params.clusters[k] {
                dk.push(HermitianMatrix::from_rank_one(&cascade(
                    &chans.g[k][m],
                    &chans.g_bs,
                )?));
                uk.push(HermitianMatrix::from_rank_one(&cascade(
                    &chans.h_bs,
                    &chans.h[k][m],
                )?));
            }
            down.push(dk);
            up.push(uk);
        }
        Ok(Self { down, up })
    }

    /// Throughput in the lifted trace form, exact at rank-one points.
    fn lifted_rate(
        &self,
        params: &SystemParams,
        w_down: &HermitianMatrix,
        w_up: &[HermitianMatrix],
        times: &TimeAllocation,
    ) -> f64 {
        let mut rate = 0.0;
        for k in 0..params.num_clusters() {
            let tau_k = times.tau[k];
            if tau_k <= 0.0 {
                continue;
            }
            let lambda = params.eta * times.tau0 * params.p0 / (tau_k * params.sigma2);
            let mut sum = 0.0;
            for m in 0..params.clusters[k] {
                sum += self.down[k][m].inner(w_down) * self.up[k][m].inner(&w_up[k]);
            }
            rate += tau_k * (1.0 + lambda * sum).log2();
        }
        rate
    }

    /// Shared-beam objective: both gain factors evaluated at the same W.
    fn shared_rate(&self, params: &SystemParams, w: &HermitianMatrix, times: &TimeAllocation) -> f64 {
        let per_cluster: Vec<HermitianMatrix> =
            (0..params.num_clusters()).map(|_| w.clone()).collect();
        self.lifted_rate(params, w, &per_cluster, times)
    }
}

/// Shared-beam baseline: one beam serves the downlink and every uplink
/// slot. The beam subproblem couples the two gain factors as a product of
/// traces, which is not concave; the inner solve alternates linearizing
/// one factor at the current iterate (guarded by the true objective)
/// inside the usual rank-one tightening, then the durations are
/// re-allocated, until the total rate stalls.
fn same_irs_with_ta(
    params: &SystemParams,
    chans: &ChannelRealization,
    config: &BcaConfig,
) -> Result<BaselineOutcome> {
    let grams = CascadedGrams::build(params, chans)?;
    let n = params.n_elements;
    let k_total = params.num_clusters();
    let mut rng = ChaCha8Rng::seed_from_u64(config.init_seed);
    let mut beam = ReflectVector::random(&mut rng, n, 0);
    let mut times = TimeAllocation::equal_split(params.t_block, k_total);
    let shared = |b: &ReflectVector, k: usize| -> Result<ReflectVector> {
        ReflectVector::from_unit_entries(b.as_vector().clone(), k)
    };
    let beams_for = |b: &ReflectVector| -> Result<Vec<ReflectVector>> {
        (1..=k_total).map(|k| shared(b, k)).collect()
    };
    let mut rate = evaluate_throughput(params, chans, &beam, &beams_for(&beam)?, &times)?;

    for _round in 0..config.max_rounds {
        let rate_prev = rate;

        // Beam update through rank-one tightening of the shared variable.
        let times_now = times.clone();
        let beam_lift = HermitianMatrix::from_rank_one(beam.as_vector());
        let tightened = {
            let mut oracle =
                |level: f64, anchor: Option<&HermitianMatrix>| -> Result<SubproblemSolve> {
            let cut = match anchor {
                Some(a) if level > 0.0 => SdpCut::from_anchor(a, level)?,
                _ => None,
            };
            let mut current = match anchor {
                Some(a) => a.clone(),
                None => beam_lift.clone(),
            };
            // measure the baseline value at a cut-feasible point, blending
            // towards the cut-aligned vertex when the anchor violates it
            if let Some(cut) = &cut {
                let slack = cut.slack(&current);
                if slack < 0.0 {
                    let vertex = cut.aligned_vertex();
                    let vertex_slack = cut.slack(&vertex);
                    if vertex_slack <= 0.0 {
                        return Ok(SubproblemSolve {
                            w: current,
                            solvable: false,
                            objective: 0.0,
                        });
                    }
                    let beta = ((-slack) / (vertex_slack - slack) + 0.02).min(1.0);
                    current = current.blend(&vertex, beta);
                }
            }
            let mut best = grams.shared_rate(params, &current, &times_now);
            // Alternate linearization of the two factors, keeping the
            // true shared objective monotone.
            for fix_downlink in [true, false, true, false] {
                let mut terms = Vec::new();
                for k in 0..k_total {
                    let tau_k = times_now.tau[k];
                    if tau_k <= 0.0 {
                        continue;
                    }
                    let lambda =
                        params.eta * times_now.tau0 * params.p0 / (tau_k * params.sigma2);
                    let mut gram = HermitianMatrix::zeros(n);
                    for m in 0..params.clusters[k] {
                        let (fixed, free) = if fix_downlink {
                            (&grams.down[k][m], &grams.up[k][m])
                        } else {
                            (&grams.up[k][m], &grams.down[k][m])
                        };
                        gram = gram.add_scaled(free, fixed.inner(&current).max(0.0));
                    }
                    terms.push(LogTerm {
                        tau: tau_k,
                        lambda,
                        gram,
                    });
                }
                let res = solve_log_sdp_from(&terms, cut.as_ref(), Some(&current))?;
                if res.status.kind == SdpStatusKind::Infeasible {
                    return Ok(SubproblemSolve {
                        w: current,
                        solvable: false,
                        objective: best,
                    });
                }
                if !res.is_optimal() {
                    break;
                }
                let candidate = grams.shared_rate(params, &res.w, &times_now);
                if candidate >= best {
                    best = candidate;
                    current = res.w;
                }
            }
            Ok(SubproblemSolve {
                w: current,
                solvable: true,
                objective: best,
            })
            };
            match srocr_solve(&mut oracle, &config.srocr) {
                Ok((w_mat, report)) if report.termination == SrocrTermination::Converged => {
                    Some(w_mat)
                }
                Ok(_) => None,
                Err(Error::InitialInfeasible) => None,
                Err(e) => return Err(e),
            }
        };
        if let Some(w_mat) = tightened {
            let (candidate_beam, _) = extract_unit_modulus(&w_mat, 0)?;
            let candidate = evaluate_throughput(
                params,
                chans,
                &candidate_beam,
                &beams_for(&candidate_beam)?,
                &times,
            )?;
            if candidate >= rate {
                beam = candidate_beam;
                rate = candidate;
            }
        }

        // Duration update.
        let wk = beams_for(&beam)?;
        let gains = compute_gains(params, chans, &beam, &wk)?;
        let times_cand = allocate(&gains, params.t_block)?;
        let candidate = evaluate_throughput(params, chans, &beam, &wk, &times_cand)?;
        if candidate >= rate - 1e-12 * rate.abs() {
            times = times_cand;
            rate = candidate;
        }

        if rate <= 0.0 || (rate - rate_prev) / rate < config.eps {
            break;
        }
    }

    let wk = beams_for(&beam)?;
    Ok(BaselineOutcome::Feasible(Solution {
        w0: beam,
        wk,
        times,
        throughput: rate,
    }))
}

/// Alternating rank-relaxed solves started from a feasible point; every
/// block solve is globally optimal over the relaxed set and guarded, so
/// the returned bound is at least the starting point's throughput.
pub fn upper_bound_from(
    params: &SystemParams,
    chans: &ChannelRealization,
    config: &BcaConfig,
    start: &StartPoint,
) -> Result<f64> {
    let grams = CascadedGrams::build(params, chans)?;
    let k_total = params.num_clusters();
    let mut w_down = HermitianMatrix::from_rank_one(start.w0.as_vector());
    let mut w_up: Vec<HermitianMatrix> = start
        .wk
        .iter()
        .map(|w| HermitianMatrix::from_rank_one(w.as_vector()))
        .collect();
    let mut times = start.times.clone();
    let mut rate = grams.lifted_rate(params, &w_down, &w_up, &times);

    for _round in 0..config.max_rounds {
        let rate_prev = rate;

        // Relaxed downlink solve: weights are the lifted uplink gains.
        let mut terms = Vec::new();
        for k in 0..k_total {
            let tau_k = times.tau[k];
            if tau_k <= 0.0 {
                continue;
            }
            let lambda = params.eta * times.tau0 * params.p0 / (tau_k * params.sigma2);
            let mut gram = HermitianMatrix::zeros(params.n_elements);
            for m in 0..params.clusters[k] {
                gram = gram.add_scaled(
                    &grams.down[k][m],
                    grams.up[k][m].inner(&w_up[k]).max(0.0),
                );
            }
            terms.push(LogTerm {
                tau: tau_k,
                lambda,
                gram,
            });
        }
        if !terms.is_empty() {
            let res = solve_log_sdp_from(&terms, None, Some(&w_down))?;
            if res.is_optimal() {
                let candidate_rate = grams.lifted_rate(params, &res.w, &w_up, &times);
                if candidate_rate >= rate {
                    w_down = res.w;
                    rate = candidate_rate;
                }
            }
        }

        // Relaxed per-cluster solves.
        for k in 0..k_total {
            if times.tau[k] <= 0.0 {
                continue;
            }
            let mut objective = HermitianMatrix::zeros(params.n_elements);
            for m in 0..params.clusters[k] {
                objective = objective.add_scaled(
                    &grams.up[k][m],
                    grams.down[k][m].inner(&w_down).max(0.0),
                );
            }
            let res = solve_linear_sdp(&objective, None)?;
            if res.is_optimal() {
                let mut w_try = w_up.clone();
                w_try[k] = res.w;
                let candidate_rate = grams.lifted_rate(params, &w_down, &w_try, &times);
                if candidate_rate >= rate {
                    w_up = w_try;
                    rate = candidate_rate;
                }
            }
        }

        // Durations via the closed form on the lifted gains.
        let scale = params.eta * params.p0 / params.sigma2;
        let gamma: Vec<f64> = (0..k_total)
            .map(|k| {
                scale
                    * (0..params.clusters[k])
                        .map(|m| {
                            grams.down[k][m].inner(&w_down).max(0.0)
                                * grams.up[k][m].inner(&w_up[k]).max(0.0)
                        })
                        .sum::<f64>()
            })
            .collect();
        let times_cand = allocate(&ClusterGains { gamma }, params.t_block)?;
        let candidate_rate = grams.lifted_rate(params, &w_down, &w_up, &times_cand);
        if candidate_rate >= rate - 1e-12 * rate.abs() {
            times = times_cand;
            rate = candidate_rate;
        }

        if rate <= 0.0 || (rate - rate_prev) / rate < config.eps {
            break;
        }
    }
    Ok(rate)
}

/// Quantizes the solution's phases to `2^bits` levels and re-optimizes
/// the durations for the quantized beams.
pub fn discrete_phase_from(
    params: &SystemParams,
    chans: &ChannelRealization,
    bits: u32,
    solution: &Solution,
) -> Result<Solution> {
    let w0 = quantize_phases(&solution.w0, bits)?;
    let wk: Vec<ReflectVector> = solution
        .wk
        .iter()
        .map(|w| quantize_phases(w, bits))
        .collect::<Result<_>>()?;
    let gains = compute_gains(params, chans, &w0, &wk)?;
    let times = allocate(&gains, params.t_block)?;
    let throughput = evaluate_throughput(params, chans, &w0, &wk, &times)?;
    Ok(Solution {
        w0,
        wk,
        times,
        throughput,
    })
}

/// Maps every phase to the nearest point of the uniform grid
/// `{2 pi i / 2^bits}`, ties resolved towards the lower index.
pub fn quantize_phases(w: &ReflectVector, bits: u32) -> Result<ReflectVector> {
    if bits < 1 {
        return Err(Error::InvalidParameter(
            "quantization needs at least one bit".into(),
        ));
    }
    if bits > 52 {
        return Err(Error::InvalidParameter(format!(
            "quantization with {bits} bits exceeds the representable grid"
        )));
    }
    let levels = (1u64 << bits) as f64;
    let tau = std::f64::consts::TAU;
    let entries: Vec<Complex64> = w
        .as_vector()
        .iter()
        .map(|z| {
            let x = (z.arg() * levels / tau).rem_euclid(levels);
            let lower = x.floor();
            let frac = x - lower;
            let mut idx = if frac > 0.5 { lower + 1.0 } else { lower };
            if idx >= levels {
                idx = 0.0;
            }
            Complex64::from_polar(1.0, idx * tau / levels)
        })
        .collect();
    ReflectVector::from_unit_entries(
        DVector::from_vec(entries),
        w.phase_tag(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::generate_channels;

    fn desk_params(n: usize, clusters: Vec<usize>) -> SystemParams {
        SystemParams::uniform(
            n, clusters, 10.0, 0.8, 1e-14, 0.1, 1e-3, 1.0, 1.0, 2.2, 5.0, 2.5, 1.0,
        )
        .unwrap()
    }

    #[test]
    fn quantization_examples() {
        let w = ReflectVector::from_phases(&[0.1], 0);
        let q = quantize_phases(&w, 1).unwrap();
        assert!((q.as_vector()[0] - Complex64::new(1.0, 0.0)).norm() < 1e-12);

        // exact tie at pi/4 with two bits goes to the lower index
        let w = ReflectVector::from_phases(&[std::f64::consts::FRAC_PI_4], 0);
        let q = quantize_phases(&w, 2).unwrap();
        assert!((q.as_vector()[0] - Complex64::new(1.0, 0.0)).norm() < 1e-12);

        // points already on the grid are unchanged, and the projection is
        // idempotent
        let phases: Vec<f64> = (0..4)
            .map(|i| i as f64 * std::f64::consts::TAU / 8.0)
            .collect();
        let w = ReflectVector::from_phases(&phases, 2);
        let q1 = quantize_phases(&w, 3).unwrap();
        assert_eq!(q1.as_vector(), w.as_vector());
        let q2 = quantize_phases(&q1, 3).unwrap();
        assert_eq!(q2.as_vector(), q1.as_vector());

        assert!(quantize_phases(&w, 0).is_err());
    }

    #[test]
    fn random_baselines_share_phases_and_order() {
        let params = desk_params(4, vec![2, 1]);
        let chans = generate_channels(&params, 33);
        let config = BcaConfig {
            init_seed: 9,
            ..Default::default()
        };
        let no_ta = match run_baseline(BaselineKind::RandomNoTa, &params, &chans, &config).unwrap()
        {
            BaselineOutcome::Feasible(s) => s,
            _ => unreachable!(),
        };
        let with_ta =
            match run_baseline(BaselineKind::RandomWithTa, &params, &chans, &config).unwrap() {
                BaselineOutcome::Feasible(s) => s,
                _ => unreachable!(),
            };
        assert_eq!(no_ta.w0.as_vector(), with_ta.w0.as_vector());
        // the allocation is optimal for these beams, the equal split is not
        assert!(with_ta.throughput >= no_ta.throughput * (1.0 - 1e-9));
        // equal split recomputation
        let direct = evaluate_throughput(&params, &chans, &no_ta.w0, &no_ta.wk, &no_ta.times)
            .unwrap();
        assert_eq!(no_ta.throughput, direct);
        no_ta.validate(&params, &chans).unwrap();
        with_ta.validate(&params, &chans).unwrap();
    }

    #[test]
    fn optimized_no_ta_keeps_equal_split() {
        let params = desk_params(2, vec![1, 1]);
        let chans = generate_channels(&params, 41);
        let config = BcaConfig {
            init_seed: 41,
            ..Default::default()
        };
        let sol = match run_baseline(BaselineKind::OptimizedNoTa, &params, &chans, &config)
            .unwrap()
        {
            BaselineOutcome::Feasible(s) => s,
            _ => unreachable!(),
        };
        let equal = TimeAllocation::equal_split(params.t_block, 2);
        assert_eq!(sol.times, equal);
        sol.validate(&params, &chans).unwrap();
    }

    #[test]
    fn shared_beam_uses_one_beam_everywhere() {
        let params = desk_params(2, vec![1, 1]);
        let chans = generate_channels(&params, 43);
        let config = BcaConfig {
            init_seed: 43,
            ..Default::default()
        };
        let sol = match run_baseline(BaselineKind::SameIrsWithTa, &params, &chans, &config)
            .unwrap()
        {
            BaselineOutcome::Feasible(s) => s,
            _ => unreachable!(),
        };
        for wk in &sol.wk {
            assert_eq!(wk.as_vector(), sol.w0.as_vector());
        }
        sol.validate(&params, &chans).unwrap();
    }

    #[test]
    fn lifted_rate_equals_true_rate_at_rank_one() {
        let params = desk_params(4, vec![2, 1]);
        let chans = generate_channels(&params, 61);
        let grams = CascadedGrams::build(&params, &chans).unwrap();
        let start = StartPoint::random(&params, 6);
        let w_down = HermitianMatrix::from_rank_one(start.w0.as_vector());
        let w_up: Vec<HermitianMatrix> = start
            .wk
            .iter()
            .map(|w| HermitianMatrix::from_rank_one(w.as_vector()))
            .collect();
        let lifted = grams.lifted_rate(&params, &w_down, &w_up, &start.times);
        let direct =
            evaluate_throughput(&params, &chans, &start.w0, &start.wk, &start.times).unwrap();
        assert!(
            (lifted - direct).abs() <= 1e-12 * direct.abs().max(1e-12),
            "lifted {lifted} vs direct {direct}"
        );
    }

    #[test]
    fn upper_bound_dominates_its_start() {
        let params = desk_params(3, vec![1, 1]);
        let chans = generate_channels(&params, 47);
        let config = BcaConfig {
            init_seed: 47,
            ..Default::default()
        };
        let (solution, _) = optimize(&params, &chans, &config).unwrap();
        let bound =
            upper_bound_from(&params, &chans, &config, &StartPoint::from_solution(&solution))
                .unwrap();
        assert!(
            bound >= solution.throughput * (1.0 - 1e-6),
            "bound {bound} below solution {}",
            solution.throughput
        );
    }

    #[test]
    fn fine_quantization_approaches_continuous() {
        let params = desk_params(3, vec![1, 1]);
        let chans = generate_channels(&params, 53);
        let config = BcaConfig {
            init_seed: 53,
            ..Default::default()
        };
        let (solution, _) = optimize(&params, &chans, &config).unwrap();
        let fine = discrete_phase_from(&params, &chans, 16, &solution).unwrap();
        assert!(
            fine.throughput >= solution.throughput * 0.999,
            "16-bit quantization lost more than 0.1%: {} vs {}",
            fine.throughput,
            solution.throughput
        );
        fine.validate(&params, &chans).unwrap();
    }
}
