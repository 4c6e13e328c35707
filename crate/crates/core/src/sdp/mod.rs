//! Conic solves over the unit-diagonal PSD set ("elliptope"), optionally
//! intersected with one linear inequality.
//!
//! Two problems are supported, both with feasible set
//! `{W >= 0 : W_nn = 1}` plus the optional cut `tr((u u^H - v I) W) >= 0`:
//!
//! * a linear objective `max tr(C W)`, solved by a dual barrier
//!   interior-point method specialized to this constraint structure
//!   ([`solve_linear_sdp`]);
//! * the concave objective `max sum_k tau_k log2(1 + lambda_k tr(G_k W))`,
//!   solved by Frank-Wolfe with exact line search, each inner step being
//!   one linear solve ([`solve_log_sdp`]).
//!
//! Infeasibility of the cut is decided before solving: the maximum of
//! `u^H W u` over the elliptope is `(sum_n |u_n|)^2` (attained by the
//! rank-one matrix of the phases of `u`), so the cut admits a feasible
//! point iff `(sum_n |u_n|)^2 >= v N`.

use nalgebra::DVector;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hermitian::HermitianMatrix;

mod barrier;
mod frank_wolfe;

/// Rank-one tightening cut `tr((u u^H - v I) W) >= 0`.
#[derive(Clone, Debug)]
pub struct SdpCut {
    anchor: DVector<Complex64>,
    level: f64,
}

impl SdpCut {
    /// `anchor` must be unit norm within 1e-9 and `level` in [0, 1].
    pub fn new(anchor: DVector<Complex64>, level: f64) -> Result<Self> {
        let norm = anchor.norm();
        if (norm - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidParameter(format!(
                "cut anchor norm {norm} is not 1"
            )));
        }
        if !(0.0..=1.0).contains(&level) {
            return Err(Error::InvalidParameter(format!(
                "cut level {level} outside [0, 1]"
            )));
        }
        Ok(Self { anchor, level })
    }

    /// Builds the cut used by the tightening loop: anchor is the principal
    /// eigenvector of `w`, level is `v`. Returns `None` at `v = 0`, where
    /// the constraint is vacuous on the PSD cone.
    pub fn from_anchor(w: &HermitianMatrix, level: f64) -> Result<Option<Self>> {
        if level == 0.0 {
            return Ok(None);
        }
        let (_, u) = w.principal_eigenpair()?;
        Ok(Some(Self::new(u, level)?))
    }

    pub fn anchor(&self) -> &DVector<Complex64> {
        &self.anchor
    }

    pub fn level(&self) -> f64 {
        self.level
    }

    /// `u u^H - v I` as a matrix operand.
    pub fn matrix(&self) -> HermitianMatrix {
        let n = self.anchor.len();
        HermitianMatrix::from_rank_one(&self.anchor)
            .add_scaled(&HermitianMatrix::identity(n), -self.level)
    }

    /// Constraint slack `u^H W u - v tr(W)` at a point.
    pub fn slack(&self, w: &HermitianMatrix) -> f64 {
        w.quad_form(&self.anchor) - self.level * w.trace()
    }

    /// Maximum slack over the elliptope: `(sum |u_n|)^2 - v N`.
    pub fn max_slack_over_elliptope(&self) -> f64 {
        let s: f64 = self.anchor.iter().map(|z| z.norm()).sum();
        s * s - self.level * self.anchor.len() as f64
    }

    /// The elliptope point attaining the maximum slack: the rank-one
    /// matrix of the entrywise phases of `u`.
    pub fn aligned_vertex(&self) -> HermitianMatrix {
        let w = DVector::from_iterator(
            self.anchor.len(),
            self.anchor.iter().map(|z| {
                let r = z.norm();
                if r < 1e-12 {
                    Complex64::new(1.0, 0.0)
                } else {
                    z / r
                }
            }),
        );
        HermitianMatrix::from_rank_one(&w)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SdpStatusKind {
    Optimal,
    Infeasible,
    NumericalFailure,
}

/// Solve summary. `kind == Optimal` certifies primal feasibility within
/// 1e-7 and the documented duality-gap tolerance.
#[derive(Clone, Debug)]
pub struct SdpStatus {
    pub kind: SdpStatusKind,
    pub iterations: usize,
    pub residual: f64,
}

/// Solution of one conic solve. `w` is meaningful only when the status is
/// `Optimal`; on `Infeasible` it carries the identity placeholder.
#[derive(Clone, Debug)]
pub struct SdpResult {
    pub w: HermitianMatrix,
    pub objective: f64,
    pub status: SdpStatus,
}

impl SdpResult {
    pub fn is_optimal(&self) -> bool {
        self.status.kind == SdpStatusKind::Optimal
    }

    fn infeasible(n: usize, iterations: usize) -> Self {
        Self {
            w: HermitianMatrix::identity(n),
            objective: 0.0,
            status: SdpStatus {
                kind: SdpStatusKind::Infeasible,
                iterations,
                residual: 0.0,
            },
        }
    }
}

/// One term `tau_k log2(1 + lambda_k tr(G_k W))` of the concave objective.
#[derive(Clone, Debug)]
pub struct LogTerm {
    pub tau: f64,
    pub lambda: f64,
    pub gram: HermitianMatrix,
}

/// Duality-gap target relative to `max(1, |objective|)`.
pub(crate) const GAP_TOL: f64 = 1e-6;
/// Feasibility tolerance certified by an `Optimal` status.
pub(crate) const FEAS_TOL: f64 = 1e-7;
/// Strict-interior margin for the cut feasibility precheck.
const SLATER_TOL: f64 = 1e-9;

fn cut_is_infeasible(cut: &SdpCut) -> bool {
    cut.max_slack_over_elliptope() <= SLATER_TOL
}

/// Maximizes `tr(C W)` over the unit-diagonal PSD set, optionally with a
/// tightening cut.
///
/// An `Optimal` result has unit diagonal exactly (final congruence
/// rescale), minimum eigenvalue above `-1e-7`, cut slack above `-1e-7`,
/// and a certified duality gap below `1e-6 max(1, |objective|)`.
pub fn solve_linear_sdp(c: &HermitianMatrix, cut: Option<&SdpCut>) -> Result<SdpResult> {
    let n = c.dim();
    if let Some(cut) = cut {
        if cut.anchor().len() != n {
            return Err(Error::DimensionMismatch(format!(
                "cut anchor length {} for dimension {n}",
                cut.anchor().len()
            )));
        }
        if cut_is_infeasible(cut) {
            return Ok(SdpResult::infeasible(n, 0));
        }
    }
    barrier::maximize_linear(c, cut)
}

/// Maximizes `sum_k tau_k log2(1 + lambda_k tr(G_k W))` over the same
/// feasible set. The objective is concave, so the returned point is a
/// certified global optimum up to the Frank-Wolfe gap tolerance.
pub fn solve_log_sdp(terms: &[LogTerm], cut: Option<&SdpCut>) -> Result<SdpResult> {
    solve_log_sdp_from(terms, cut, None)
}

/// [`solve_log_sdp`] with an optional warm-start point. The warm start
/// only affects the iteration path, not the certified result.
pub fn solve_log_sdp_from(
    terms: &[LogTerm],
    cut: Option<&SdpCut>,
    warm: Option<&HermitianMatrix>,
) -> Result<SdpResult> {
    frank_wolfe::maximize_log(terms, cut, warm)
}

/// Objective value of the concave problem at a point.
pub fn log_objective(terms: &[LogTerm], w: &HermitianMatrix) -> f64 {
    terms
        .iter()
        .map(|t| t.tau * (1.0 + t.lambda * t.gram.inner(w)).log2())
        .sum()
}
