//! Complex Hermitian matrices and the spectral helpers the lifted
//! beamforming problems are built on.
//!
//! Matrices are Hermitian by construction: every constructor either
//! symmetrizes its input or produces an exactly Hermitian result, so the
//! defect `max |W - W^H|` stays at floating-point zero.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Complex N x N Hermitian matrix.
///
/// Used for the lifted beamforming variables `w w^H`, the weighted Gram
/// matrices entering the SDP objectives, and the solver internals.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMatrix {
    m: DMatrix<Complex64>,
}

impl HermitianMatrix {
    /// Builds from an arbitrary square matrix by taking the Hermitian part
    /// `(A + A^H) / 2`.
    pub fn from_matrix(a: &DMatrix<Complex64>) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "expected square matrix, got {}x{}",
                a.nrows(),
                a.ncols()
            )));
        }
        let herm = (a + a.adjoint()).map(|z| z * 0.5);
        Ok(Self { m: herm })
    }

    /// Rank-one outer product `v v^H`.
    pub fn from_rank_one(v: &DVector<Complex64>) -> Self {
        let n = v.len();
        let m = DMatrix::from_fn(n, n, |i, j| v[i] * v[j].conj());
        Self { m }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            m: DMatrix::identity(n, n),
        }
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            m: DMatrix::zeros(n, n),
        }
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn as_matrix(&self) -> &DMatrix<Complex64> {
        &self.m
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        self.m[(i, j)]
    }

    /// Trace; real for a Hermitian matrix.
    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.m[(i, i)].re).sum()
    }

    /// `v^H W v`, which is real for Hermitian `W`.
    pub fn quad_form(&self, v: &DVector<Complex64>) -> f64 {
        let wv = &self.m * v;
        v.dotc(&wv).re
    }

    /// `tr(A B)` for two Hermitian matrices; always real.
    pub fn inner(&self, other: &Self) -> f64 {
        debug_assert_eq!(self.dim(), other.dim());
        self.m
            .iter()
            .zip(other.m.iter())
            .map(|(a, b)| (a * b.conj()).re)
            .sum()
    }

    /// `self + s * other`; Hermitian is closed under real combinations.
    pub fn add_scaled(&self, other: &Self, s: f64) -> Self {
        let mut m = self.m.clone();
        m.zip_apply(&other.m, |a, b| *a += b * s);
        Self { m }
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            m: self.m.map(|z| z * s),
        }
    }

    /// Convex combination `(1 - s) * self + s * other`.
    pub fn blend(&self, other: &Self, s: f64) -> Self {
        let mut m = self.m.map(|z| z * (1.0 - s));
        m.zip_apply(&other.m, |a, b| *a += b * s);
        Self { m }
    }

    /// Congruence rescaling `D^{-1/2} W D^{-1/2}` that forces the diagonal
    /// to exactly one. Requires all diagonal entries strictly positive.
    pub fn with_unit_diagonal(&self) -> Result<Self> {
        let n = self.dim();
        let mut d = Vec::with_capacity(n);
        for i in 0..n {
            let di = self.m[(i, i)].re;
            if !(di > 0.0) {
                return Err(Error::Domain(format!(
                    "diagonal entry {i} is {di}, cannot rescale to unit diagonal"
                )));
            }
            d.push(di.sqrt());
        }
        let mut m = DMatrix::from_fn(n, n, |i, j| self.m[(i, j)] / (d[i] * d[j]));
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        Ok(Self { m })
    }

    /// Largest deviation of the diagonal from one; feasibility measure for
    /// the unit-diagonal PSD set.
    pub fn unit_diagonal_deviation(&self) -> f64 {
        (0..self.dim())
            .map(|i| (self.m[(i, i)].re - 1.0).abs().max(self.m[(i, i)].im.abs()))
            .fold(0.0, f64::max)
    }

    /// `max |W - W^H|` over entries; zero up to rounding by construction.
    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let d = (self.m[(i, j)] - self.m[(j, i)].conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    fn check_finite(&self) -> Result<()> {
        if self.m.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            Ok(())
        } else {
            Err(Error::NonFinite("hermitian matrix"))
        }
    }

    /// Full spectrum, ascending order not guaranteed.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        self.check_finite()?;
        let se = self.m.clone().symmetric_eigen();
        Ok(se.eigenvalues.iter().copied().collect())
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(self
            .eigenvalues()?
            .into_iter()
            .fold(f64::INFINITY, f64::min))
    }

    /// Algebraically largest eigenvalue and a unit-norm eigenvector for it.
    ///
    /// The residual `||W u - lambda u||` of the returned pair is at the
    /// level of machine precision times `||W||`.
    pub fn principal_eigenpair(&self) -> Result<(f64, DVector<Complex64>)> {
        self.check_finite()?;
        let se = self.m.clone().symmetric_eigen();
        let mut idx = 0;
        let mut lam = f64::NEG_INFINITY;
        for (i, &l) in se.eigenvalues.iter().enumerate() {
            if l > lam {
                lam = l;
                idx = i;
            }
        }
        let mut u = se.eigenvectors.column(idx).into_owned();
        let norm = u.norm();
        if norm > 0.0 {
            u /= Complex64::new(norm, 0.0);
        }
        Ok((lam, u))
    }

    /// `lambda_max(W) / tr(W)`, the progress measure of the rank-one
    /// tightening loop. Equals one exactly when W is rank-one.
    pub fn rank_one_ratio(&self) -> Result<f64> {
        let tr = self.trace();
        if !(tr > 0.0) {
            return Err(Error::Domain(format!(
                "rank-one ratio needs positive trace, got {tr}"
            )));
        }
        let (lam, _) = self.principal_eigenpair()?;
        Ok(lam / tr)
    }
}
