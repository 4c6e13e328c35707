//! Dual barrier interior-point core for `max tr(C W)` over
//! `{W >= 0, diag(W) = 1}` with at most one extra inequality
//! `tr(A W) >= 0`, `A = u u^H - v I`.
//!
//! The Lagrange dual is `min e^T y` subject to
//! `S = Diag(y) - C - z A >= 0`, `z >= 0`, which is always strictly
//! feasible and has only N (+1) real variables. Newton centering on
//! `e^T y - mu log det S - mu log z` needs one Cholesky of S per step;
//! the primal iterate is recovered as `W = mu S^{-1}`, which satisfies
//! `diag(W) = 1` up to the centering tolerance and is polished to exact
//! unit diagonal by a congruence rescale. The duality gap at the central
//! point is `mu (N + #cuts)`, giving the termination certificate.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hermitian::HermitianMatrix;

use super::{SdpCut, SdpResult, SdpStatus, SdpStatusKind, FEAS_TOL, GAP_TOL};

const MU_SHRINK: f64 = 0.2;
const MAX_STAGES: usize = 220;
const MAX_CENTER_STEPS: usize = 60;
const CENTER_GRAD_TOL: f64 = 1e-10;

/// Gershgorin upper bound on the largest eigenvalue of a Hermitian matrix.
fn gershgorin_max(m: &DMatrix<Complex64>) -> f64 {
    let n = m.nrows();
    (0..n)
        .map(|i| {
            let mut row = m[(i, i)].re;
            for j in 0..n {
                if j != i {
                    row += m[(i, j)].norm();
                }
            }
            row
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Real part of `tr(A B)` for raw complex matrices (exact for Hermitian
/// operands).
fn trace_product(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x * y.conj()).re).sum()
}

struct DualState {
    y: DVector<f64>,
    z: f64,
}

struct Workspace {
    c: DMatrix<Complex64>,
    a: Option<DMatrix<Complex64>>,
}

impl Workspace {
    fn slab(&self, state: &DualState) -> DMatrix<Complex64> {
        let n = self.c.nrows();
        let mut s = -&self.c;
        if let Some(a) = &self.a {
            s.zip_apply(a, |si, ai| *si -= ai * state.z);
        }
        for i in 0..n {
            s[(i, i)] += Complex64::new(state.y[i], 0.0);
        }
        s
    }
}

pub(super) fn maximize_linear(
    c_in: &HermitianMatrix,
    cut: Option<&SdpCut>,
) -> Result<SdpResult> {
    let n = c_in.dim();
    if n == 0 {
        return Err(Error::DimensionMismatch("empty matrix".into()));
    }

    // Normalize the objective for conditioning; the feasible set is
    // unchanged and the duality gap scales back linearly.
    let c_scale = c_in
        .as_matrix()
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
        .max(1e-300);
    let ws = Workspace {
        c: c_in.as_matrix().map(|z| z / c_scale),
        a: cut.map(|cc| cc.matrix().as_matrix().clone()),
    };
    let has_cut = ws.a.is_some();
    let dim = n + has_cut as usize;

    let mut state = DualState {
        y: DVector::zeros(n),
        z: if has_cut { 1.0 } else { 0.0 },
    };
    // Strictly dual-feasible start: dominate C + z A on the diagonal.
    let mut bound = gershgorin_max(&ws.c);
    if let Some(a) = &ws.a {
        bound += state.z * gershgorin_max(a).max(0.0);
    }
    state.y.fill(bound.max(0.0) + 1.0);

    let mut mu = {
        let s = ws.slab(&state);
        ((0..n).map(|i| s[(i, i)].re).sum::<f64>() / n as f64).max(1.0)
    };

    let cut_count = if has_cut { 1.0 } else { 0.0 };
    let mut newton_steps = 0usize;

    for _stage in 0..MAX_STAGES {
        // Newton centering at the current mu. The scaled barrier
        // `phi / mu` is standard self-concordant, so the damped step
        // `1 / (1 + lambda)` needs no function-value line search; only a
        // positive-definiteness backoff guards against rounding.
        for _step in 0..MAX_CENTER_STEPS {
            let s = ws.slab(&state);
            let chol = match s.cholesky() {
                Some(ch) => ch,
                None => return Ok(numerical_failure(n, newton_steps)),
            };
            let p = chol.inverse();

            let mut grad = DVector::zeros(dim);
            for i in 0..n {
                grad[i] = 1.0 - mu * p[(i, i)].re;
            }
            if let Some(a) = &ws.a {
                grad[n] = mu * trace_product(&p, a) - mu / state.z;
            }
            if grad.amax() <= CENTER_GRAD_TOL {
                break;
            }

            // Hessian: elementwise |P|^2 block, bordered by the cut row.
            let mut hess = DMatrix::zeros(dim, dim);
            for i in 0..n {
                for j in 0..n {
                    hess[(i, j)] = mu * p[(i, j)].norm_sqr();
                }
            }
            if let Some(a) = &ws.a {
                let pap = &p * a * &p;
                for i in 0..n {
                    let v = -mu * pap[(i, i)].re;
                    hess[(i, n)] = v;
                    hess[(n, i)] = v;
                }
                hess[(n, n)] = mu * trace_product(&pap, a) + mu / (state.z * state.z);
            }

            let neg_grad = -&grad;
            let step = match hess.clone().cholesky() {
                Some(hc) => hc.solve(&neg_grad),
                None => {
                    // Tiny ridge against rounding on nearly singular Hessians.
                    let ridge = 1e-12 * hess.diagonal().amax().max(1e-300);
                    for i in 0..dim {
                        hess[(i, i)] += ridge;
                    }
                    match hess.cholesky() {
                        Some(hc) => hc.solve(&neg_grad),
                        None => return Ok(numerical_failure(n, newton_steps)),
                    }
                }
            };

            // Decrement of the scaled barrier; invariant to the objective
            // scaling used for the step itself.
            let decrement2 = (-grad.dot(&step)).max(0.0) / mu;
            let lambda = decrement2.sqrt();
            if lambda <= 1e-9 {
                break;
            }
            let mut t = if lambda > 0.25 { 1.0 / (1.0 + lambda) } else { 1.0 };
            let mut moved = false;
            for _ in 0..60 {
                let trial = DualState {
                    y: &state.y + step.rows(0, n) * t,
                    z: if has_cut { state.z + t * step[n] } else { 0.0 },
                };
                let feasible = (!has_cut || trial.z > 0.0)
                    && ws.slab(&trial).cholesky().is_some();
                if feasible {
                    state = trial;
                    moved = true;
                    break;
                }
                t *= 0.5;
            }
            newton_steps += 1;
            if !moved {
                break;
            }
        }

        // Primal recovery and gap certificate at this stage.
        let s = ws.slab(&state);
        let chol = match s.cholesky() {
            Some(ch) => ch,
            None => return Ok(numerical_failure(n, newton_steps)),
        };
        let p = chol.inverse();
        let w_raw = HermitianMatrix::from_matrix(&p.map(|v| v * mu))?;
        let primal = c_scale * trace_product(w_raw.as_matrix(), &ws.c);
        let dual = c_scale * state.y.sum();
        let gap = dual - primal;
        // Gap target relative to the problem's natural scale: tighter than
        // an absolute floor would be for physically tiny objectives.
        let target = GAP_TOL * primal.abs().max(c_scale);

        if gap.abs() <= 0.5 * target
            || mu * (n as f64 + cut_count) * c_scale <= 0.25 * target
        {
            return finalize(c_in, cut, w_raw, dual, c_scale, newton_steps);
        }
        mu *= MU_SHRINK;
    }

    Ok(numerical_failure(n, newton_steps))
}

fn numerical_failure(n: usize, iterations: usize) -> SdpResult {
    SdpResult {
        w: HermitianMatrix::identity(n),
        objective: 0.0,
        status: SdpStatus {
            kind: SdpStatusKind::NumericalFailure,
            iterations,
            residual: f64::INFINITY,
        },
    }
}

fn finalize(
    c: &HermitianMatrix,
    cut: Option<&SdpCut>,
    w_raw: HermitianMatrix,
    dual: f64,
    c_scale: f64,
    iterations: usize,
) -> Result<SdpResult> {
    let diag_dev = w_raw.unit_diagonal_deviation();
    let w = w_raw.with_unit_diagonal()?;
    let objective = c.inner(&w);
    let gap = dual - objective;
    let obj_scale = objective.abs().max(c_scale);

    // Reported residual is primal feasibility only: diagonal deviation
    // before the polish plus any cut violation after it. The returned
    // point is positive definite by construction.
    let mut residual = diag_dev;
    let mut ok = gap <= 2.0 * GAP_TOL * obj_scale && gap >= -1e-7 * obj_scale;
    if let Some(cut) = cut {
        let slack = cut.slack(&w);
        residual = residual.max((-slack).max(0.0));
        ok &= slack >= -FEAS_TOL;
    }
    ok &= diag_dev <= FEAS_TOL;

    let kind = if ok {
        SdpStatusKind::Optimal
    } else {
        SdpStatusKind::NumericalFailure
    };
    Ok(SdpResult {
        w,
        objective,
        status: SdpStatus {
            kind,
            iterations,
            residual,
        },
    })
}
