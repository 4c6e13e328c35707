//! Sequential rank-one constraint relaxation.
//!
//! The lifted beamforming problems carry a `rank(W) = 1` constraint that
//! the convex solves drop. Instead of solving the relaxation once and
//! projecting, the engine tightens the surrogate constraint
//! `u^H W u >= v tr(W)` by driving `v` from 0 towards 1: whenever the
//! relaxed problem stays solvable the level rises by a step; when it
//! becomes infeasible the step is halved and the iterate kept. The loop
//! stops once the level has passed the rank-one threshold and the
//! objective has stalled.
//!
//! The engine is generic over the relaxed problem: the oracle receives
//! the current level and the anchor iterate and returns the new iterate,
//! a solvability flag, and the objective value.

use nalgebra::DVector;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hermitian::HermitianMatrix;
use crate::model::ReflectVector;

/// Tuning knobs of the tightening loop.
#[derive(Clone, Debug)]
pub struct SrocrConfig {
    /// Initial level step; effectively capped by `1 - ratio(W0)`.
    pub delta0: f64,
    /// Rank-one threshold the level must pass before stopping.
    pub eps1: f64,
    /// Objective stall threshold.
    pub eps2: f64,
    pub max_iters: usize,
}

impl Default for SrocrConfig {
    fn default() -> Self {
        Self {
            delta0: 0.1,
            eps1: 0.95,
            eps2: 1e-3,
            max_iters: 100,
        }
    }
}

impl SrocrConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.delta0 > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "delta0 must be positive, got {}",
                self.delta0
            )));
        }
        if !(0.0..=1.0).contains(&self.eps1) {
            return Err(Error::InvalidParameter(format!(
                "eps1 must be in [0, 1], got {}",
                self.eps1
            )));
        }
        if !(self.eps2 > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "eps2 must be positive, got {}",
                self.eps2
            )));
        }
        if self.max_iters < 1 {
            return Err(Error::InvalidParameter("max_iters must be >= 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SrocrTermination {
    Converged,
    /// Iteration or halving budget exhausted before the stop rule fired;
    /// the best iterate is still returned and the caller decides.
    Stalled,
}

/// Trace of one tightening run.
#[derive(Clone, Debug)]
pub struct SrocrReport {
    pub iterations: usize,
    pub v_trajectory: Vec<f64>,
    pub objective_trajectory: Vec<f64>,
    pub halvings: usize,
    pub final_ratio: f64,
    pub termination: SrocrTermination,
}

/// Outcome of one relaxed solve inside the loop.
#[derive(Clone, Debug)]
pub struct SubproblemSolve {
    pub w: HermitianMatrix,
    pub solvable: bool,
    pub objective: f64,
}

const MAX_HALVINGS: usize = 60;
const DELTA_FLOOR: f64 = 1e-6;

/// Runs the tightening loop over a relaxed-problem oracle.
///
/// The oracle is called as `oracle(v, anchor)`; `anchor` is `None` only
/// for the initialization solve at `v = 0`. Fails with
/// [`Error::InitialInfeasible`] when that first solve is not solvable.
pub fn srocr_solve<F>(
    oracle: &mut F,
    config: &SrocrConfig,
) -> Result<(HermitianMatrix, SrocrReport)>
where
    F: FnMut(f64, Option<&HermitianMatrix>) -> Result<SubproblemSolve>,
{
    config.validate()?;

    let init = oracle(0.0, None)?;
    if !init.solvable {
        return Err(Error::InitialInfeasible);
    }
    let mut w = init.w;
    let mut objective_prev = init.objective;
    let ratio0 = w.rank_one_ratio()?;
    let mut delta = config.delta0.min(1.0 - ratio0).max(DELTA_FLOOR);

    // v used by the upcoming solve; the initialization solve ran at 0.
    let mut level = 0.0f64;
    let mut v_trajectory = vec![level];
    let mut objective_trajectory = vec![objective_prev];
    let mut halvings = 0usize;
    let mut termination = SrocrTermination::Stalled;
    let mut iterations = 0usize;

    for _ in 0..config.max_iters {
        iterations += 1;
        let solve = oracle(level, Some(&w))?;
        let objective_curr = if solve.solvable {
            w = solve.w;
            solve.objective
        } else {
            delta *= 0.5;
            halvings += 1;
            objective_prev
        };
        let ratio = w.rank_one_ratio()?;
        let next_level = (ratio + delta).min(1.0);
        objective_trajectory.push(objective_curr);
        v_trajectory.push(next_level);

        let stalled_objective = (objective_curr - objective_prev).abs() <= config.eps2;
        // The level test alone can pass right after a failed solve while
        // the iterate is still far from rank one; require the iterate too.
        let rank_one_reached = config.eps1 == 0.0 || ratio >= config.eps1;
        objective_prev = objective_curr;
        let solved_level = level;
        level = next_level;

        if solved_level >= config.eps1 && stalled_objective && rank_one_reached {
            termination = SrocrTermination::Converged;
            break;
        }
        if halvings > MAX_HALVINGS {
            break;
        }
    }

    let final_ratio = w.rank_one_ratio()?;
    Ok((
        w,
        SrocrReport {
            iterations,
            v_trajectory,
            objective_trajectory,
            halvings,
            final_ratio,
            termination,
        },
    ))
}

/// Rank-one extraction with unit-modulus projection.
///
/// Takes the principal component `sqrt(lambda_max) u_max`, projects every
/// entry to the unit circle, and normalizes the global phase so the first
/// entry is real nonnegative. Entries below magnitude 1e-12 are set to
/// phase zero and flagged.
pub fn extract_unit_modulus(
    w: &HermitianMatrix,
    phase_tag: usize,
) -> Result<(ReflectVector, bool)> {
    let (lam, u) = w.principal_eigenpair()?;
    let scale = lam.max(0.0).sqrt();
    let mut degenerate = false;
    let mut entries: Vec<Complex64> = u
        .iter()
        .map(|&z| {
            let s = z * scale;
            let r = s.norm();
            if r < 1e-12 {
                degenerate = true;
                Complex64::new(1.0, 0.0)
            } else {
                s / r
            }
        })
        .collect();
    let phase_ref = entries[0].conj();
    for e in entries.iter_mut() {
        *e *= phase_ref;
    }
    entries[0] = Complex64::new(1.0, 0.0);
    let vector = ReflectVector::from_unit_entries(
        DVector::from_vec(entries),
        phase_tag,
    )?;
    Ok((vector, degenerate))
}
