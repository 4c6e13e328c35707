//! System model: network parameters, channel synthesis, and the harvested
//! energy / uplink throughput formulas every optimizer and baseline
//! evaluates.
//!
//! Conventions: all quantities are SI (watts, seconds, meters); dB and dBm
//! conversions belong to the config boundary, not here. The downlink
//! energy gain of user (k, m) is `|w0^H (g_{k,m} o g_BS)|^2` and the uplink
//! information gain is `|wk^H (h_BS o h_{k,m})|^2` where `o` is the
//! elementwise product of the two hops through the reflecting surface.

use nalgebra::DVector;
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::hermitian::HermitianMatrix;

/// Physical constants and problem dimensions for one network instance.
#[derive(Clone, Debug, PartialEq)]
pub struct SystemParams {
    /// BS transmit power (watts).
    pub p0: f64,
    /// Energy harvesting efficiency, in (0, 1].
    pub eta: f64,
    /// Noise power at the BS (watts).
    pub sigma2: f64,
    /// Block duration (seconds).
    pub t_block: f64,
    /// Number of reflecting elements.
    pub n_elements: usize,
    /// Cluster sizes M_1..M_K; users are indexed (k, m) within clusters.
    pub clusters: Vec<usize>,
    /// Reference path loss at distance `d0` (linear).
    pub zeta0: f64,
    /// Reference distance (meters).
    pub d0: f64,
    /// BS-IRS distance (meters).
    pub d_bi: f64,
    /// BS-IRS path loss exponent.
    pub alpha_bi: f64,
    /// Per-user IRS distance (meters), indexed `[cluster][member]`.
    pub d_user: Vec<Vec<f64>>,
    /// Per-user path loss exponent, same indexing.
    pub alpha_user: Vec<Vec<f64>>,
    /// Rician factor (linear).
    pub kappa: f64,
}

impl SystemParams {
    /// Uniform layout: every user at the same distance with the same
    /// path-loss exponent.
    pub fn uniform(
        n_elements: usize,
        clusters: Vec<usize>,
        p0: f64,
        eta: f64,
        sigma2: f64,
        t_block: f64,
        zeta0: f64,
        d0: f64,
        d_bi: f64,
        alpha_bi: f64,
        d_user: f64,
        alpha_user: f64,
        kappa: f64,
    ) -> Result<Self> {
        let d = clusters.iter().map(|&mk| vec![d_user; mk]).collect();
        let a = clusters.iter().map(|&mk| vec![alpha_user; mk]).collect();
        let params = Self {
            p0,
            eta,
            sigma2,
            t_block,
            n_elements,
            clusters,
            zeta0,
            d0,
            d_bi,
            alpha_bi,
            d_user: d,
            alpha_user: a,
            kappa,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn num_clusters(&self) -> usize {
        self.clusters.len()
    }

    pub fn num_users(&self) -> usize {
        self.clusters.iter().sum()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if !(self.p0 > 0.0) {
            return bad(format!("p0 must be positive, got {}", self.p0));
        }
        if !(self.sigma2 > 0.0) {
            return bad(format!("sigma2 must be positive, got {}", self.sigma2));
        }
        if !(self.t_block > 0.0) {
            return bad(format!("t_block must be positive, got {}", self.t_block));
        }
        if !(self.eta > 0.0 && self.eta <= 1.0) {
            return bad(format!("eta must be in (0, 1], got {}", self.eta));
        }
        if self.n_elements < 1 {
            return bad("n_elements must be at least 1".into());
        }
        if self.clusters.is_empty() || self.clusters.iter().any(|&mk| mk < 1) {
            return bad(format!("cluster sizes must all be >= 1: {:?}", self.clusters));
        }
        if !(self.zeta0 > 0.0 && self.d0 > 0.0 && self.d_bi > 0.0) {
            return bad("zeta0, d0 and d_bi must be positive".into());
        }
        if !(self.kappa >= 0.0) {
            return bad(format!("kappa must be nonnegative, got {}", self.kappa));
        }
        let k = self.num_clusters();
        if self.d_user.len() != k || self.alpha_user.len() != k {
            return bad("d_user/alpha_user must have one row per cluster".into());
        }
        for (kk, &mk) in self.clusters.iter().enumerate() {
            if self.d_user[kk].len() != mk || self.alpha_user[kk].len() != mk {
                return bad(format!("cluster {kk} rows do not match size {mk}"));
            }
            if self.d_user[kk].iter().any(|&d| !(d > 0.0)) {
                return bad(format!("cluster {kk} has a nonpositive distance"));
            }
        }
        Ok(())
    }
}

/// One draw of every channel vector in the network.
///
/// Regenerating with the same `(params, seed)` reproduces identical values
/// bit for bit on the same build.
#[derive(Clone, Debug, PartialEq)]
pub struct ChannelRealization {
    /// BS -> IRS (downlink hop).
    pub g_bs: DVector<Complex64>,
    /// IRS -> BS (uplink hop).
    pub h_bs: DVector<Complex64>,
    /// IRS -> user, indexed `[cluster][member]`.
    pub g: Vec<Vec<DVector<Complex64>>>,
    /// user -> IRS, same indexing.
    pub h: Vec<Vec<DVector<Complex64>>>,
    /// Seed the realization was drawn from.
    pub seed: u64,
}

impl ChannelRealization {
    /// Checks that the realization matches the parameter layout.
    pub fn check_dims(&self, params: &SystemParams) -> Result<()> {
        let n = params.n_elements;
        let k = params.num_clusters();
        let ok = self.g_bs.len() == n
            && self.h_bs.len() == n
            && self.g.len() == k
            && self.h.len() == k
            && self
                .g
                .iter()
                .zip(&params.clusters)
                .all(|(row, &mk)| row.len() == mk && row.iter().all(|v| v.len() == n))
            && self
                .h
                .iter()
                .zip(&params.clusters)
                .all(|(row, &mk)| row.len() == mk && row.iter().all(|v| v.len() == n));
        if ok {
            Ok(())
        } else {
            Err(Error::DimensionMismatch(
                "channel realization does not match the parameter layout".into(),
            ))
        }
    }
}

fn draw_vector(rng: &mut ChaCha8Rng, n: usize, amplitude: f64, kappa: f64) -> DVector<Complex64> {
    let los = (kappa / (1.0 + kappa)).sqrt();
    let scatter = (1.0 / (1.0 + kappa)).sqrt();
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    DVector::from_fn(n, |_, _| {
        let x: f64 = rng.sample(StandardNormal);
        let y: f64 = rng.sample(StandardNormal);
        Complex64::new(
            amplitude * (los + scatter * x * inv_sqrt2),
            amplitude * (scatter * y * inv_sqrt2),
        )
    })
}

fn path_amplitude(zeta0: f64, d0: f64, d: f64, alpha: f64) -> f64 {
    (zeta0 * (d0 / d).powf(alpha)).sqrt()
}

/// Draws all channel vectors for one block.
///
/// Large-scale gain is `zeta0 (d0/d)^alpha`; small-scale fading is Rician
/// with a deterministic all-ones line-of-sight component. Draw order is
/// fixed: `g_bs`, `h_bs`, then per cluster and member in index order the
/// downlink and uplink user vectors.
pub fn generate_channels(params: &SystemParams, seed: u64) -> ChannelRealization {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = params.n_elements;
    let amp_bi = path_amplitude(params.zeta0, params.d0, params.d_bi, params.alpha_bi);
    let g_bs = draw_vector(&mut rng, n, amp_bi, params.kappa);
    let h_bs = draw_vector(&mut rng, n, amp_bi, params.kappa);
    let mut g = Vec::with_capacity(params.num_clusters());
    let mut h = Vec::with_capacity(params.num_clusters());
    for (k, &mk) in params.clusters.iter().enumerate() {
        let mut gk = Vec::with_capacity(mk);
        let mut hk = Vec::with_capacity(mk);
        for m in 0..mk {
            let amp = path_amplitude(
                params.zeta0,
                params.d0,
                params.d_user[k][m],
                params.alpha_user[k][m],
            );
            gk.push(draw_vector(&mut rng, n, amp, params.kappa));
            hk.push(draw_vector(&mut rng, n, amp, params.kappa));
        }
        g.push(gk);
        h.push(hk);
    }
    ChannelRealization {
        g_bs,
        h_bs,
        g,
        h,
        seed,
    }
}

/// Unit-modulus reflection coefficients for one phase of the block.
///
/// `phase_tag` is 0 for the downlink power-transfer phase and k for the
/// k-th uplink cluster slot (1-based).
#[derive(Clone, Debug, PartialEq)]
pub struct ReflectVector {
    w: DVector<Complex64>,
    phase_tag: usize,
}

impl ReflectVector {
    /// Builds from phase angles; entries are exactly unit modulus.
    pub fn from_phases(phases: &[f64], phase_tag: usize) -> Self {
        let w = DVector::from_iterator(
            phases.len(),
            phases.iter().map(|&t| Complex64::from_polar(1.0, t)),
        );
        Self { w, phase_tag }
    }

    /// Wraps an existing vector, enforcing the unit-modulus invariant.
    pub fn from_unit_entries(w: DVector<Complex64>, phase_tag: usize) -> Result<Self> {
        let dev = w.iter().map(|z| (z.norm() - 1.0).abs()).fold(0.0, f64::max);
        if dev > 1e-9 {
            return Err(Error::InvalidParameter(format!(
                "reflect vector modulus deviates from one by {dev:e}"
            )));
        }
        Ok(Self { w, phase_tag })
    }

    pub fn all_ones(n: usize, phase_tag: usize) -> Self {
        Self {
            w: DVector::from_element(n, Complex64::new(1.0, 0.0)),
            phase_tag,
        }
    }

    /// i.i.d. phases uniform in [0, 2 pi).
    pub fn random(rng: &mut ChaCha8Rng, n: usize, phase_tag: usize) -> Self {
        let phases: Vec<f64> = (0..n)
            .map(|_| rng.gen::<f64>() * std::f64::consts::TAU)
            .collect();
        Self::from_phases(&phases, phase_tag)
    }

    pub fn len(&self) -> usize {
        self.w.len()
    }

    pub fn is_empty(&self) -> bool {
        self.w.len() == 0
    }

    pub fn phase_tag(&self) -> usize {
        self.phase_tag
    }

    pub fn as_vector(&self) -> &DVector<Complex64> {
        &self.w
    }

    pub fn phases(&self) -> Vec<f64> {
        self.w.iter().map(|z| z.arg()).collect()
    }

    pub fn max_modulus_deviation(&self) -> f64 {
        self.w
            .iter()
            .map(|z| (z.norm() - 1.0).abs())
            .fold(0.0, f64::max)
    }
}

/// Durations of the power-transfer phase and the K uplink slots.
#[derive(Clone, Debug, PartialEq)]
pub struct TimeAllocation {
    pub tau0: f64,
    pub tau: Vec<f64>,
}

impl TimeAllocation {
    pub fn equal_split(t_block: f64, num_clusters: usize) -> Self {
        let share = t_block / (num_clusters as f64 + 1.0);
        Self {
            tau0: share,
            tau: vec![share; num_clusters],
        }
    }

    pub fn total(&self) -> f64 {
        self.tau0 + self.tau.iter().sum::<f64>()
    }

    pub fn validate(&self, t_block: f64) -> Result<()> {
        if self.tau0 < 0.0 || self.tau.iter().any(|&t| t < 0.0) {
            return Err(Error::InvalidParameter(
                "negative slot duration".to_string(),
            ));
        }
        let total = self.total();
        if total > t_block * (1.0 + 1e-9) {
            return Err(Error::InvalidParameter(format!(
                "durations sum to {total}, exceeding the block length {t_block}"
            )));
        }
        Ok(())
    }
}

/// A feasible operating point together with its recomputed objective.
#[derive(Clone, Debug)]
pub struct Solution {
    pub w0: ReflectVector,
    pub wk: Vec<ReflectVector>,
    pub times: TimeAllocation,
    /// Total uplink throughput in bits/Hz.
    pub throughput: f64,
}

impl Solution {
    /// Checks every type invariant, including that the stored throughput
    /// matches a fresh evaluation within 1e-9 relative.
    pub fn validate(&self, params: &SystemParams, chans: &ChannelRealization) -> Result<()> {
        if self.w0.max_modulus_deviation() > 1e-9
            || self.wk.iter().any(|w| w.max_modulus_deviation() > 1e-9)
        {
            return Err(Error::InvalidParameter(
                "solution reflect vector violates unit modulus".into(),
            ));
        }
        self.times.validate(params.t_block)?;
        let fresh = total_throughput(params, chans, self)?;
        let tol = 1e-9 * fresh.abs().max(1e-300);
        if (fresh - self.throughput).abs() > tol {
            return Err(Error::InvalidParameter(format!(
                "stored throughput {} disagrees with recomputed {}",
                self.throughput, fresh
            )));
        }
        Ok(())
    }
}

/// Elementwise product of the two hops through the reflecting surface.
pub fn cascade(a: &DVector<Complex64>, b: &DVector<Complex64>) -> Result<DVector<Complex64>> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch(format!(
            "cascade of lengths {} and {}",
            a.len(),
            b.len()
        )));
    }
    Ok(a.component_mul(b))
}

/// `|w^H v|^2`: power gain of reflect vector `w` on cascaded channel `v`.
pub fn reflect_gain(w: &ReflectVector, v: &DVector<Complex64>) -> Result<f64> {
    if w.len() != v.len() {
        return Err(Error::DimensionMismatch(format!(
            "reflect gain of lengths {} and {}",
            w.len(),
            v.len()
        )));
    }
    Ok(w.as_vector().dotc(v).norm_sqr())
}

/// Energy harvested by user (k, m) during a power-transfer phase of
/// duration `tau0`.
pub fn harvested_energy(
    params: &SystemParams,
    chans: &ChannelRealization,
    w0: &ReflectVector,
    k: usize,
    m: usize,
    tau0: f64,
) -> Result<f64> {
    let g = chans
        .g
        .get(k)
        .and_then(|row| row.get(m))
        .ok_or_else(|| Error::IndexOutOfRange(format!("user ({k}, {m})")))?;
    let gain = reflect_gain(w0, &cascade(g, &chans.g_bs)?)?;
    Ok(params.eta * tau0 * params.p0 * gain)
}

/// Throughput of cluster k in bits/Hz for the given beams and durations.
///
/// Users spend all harvested energy over the slot, so the received power of
/// user (k, m) is `E_{k,m} / tau_k` times its uplink gain. The `tau_k = 0`
/// value is the continuous limit, zero.
pub fn cluster_throughput(
    params: &SystemParams,
    chans: &ChannelRealization,
    w0: &ReflectVector,
    wk: &ReflectVector,
    tau0: f64,
    tauk: f64,
    k: usize,
) -> Result<f64> {
    let mk = *params
        .clusters
        .get(k)
        .ok_or_else(|| Error::IndexOutOfRange(format!("cluster {k}")))? ;
    if tauk <= 0.0 {
        return Ok(0.0);
    }
    let mut received = 0.0;
    for m in 0..mk {
        let energy = harvested_energy(params, chans, w0, k, m, tau0)?;
        let uplink = reflect_gain(wk, &cascade(&chans.h_bs, &chans.h[k][m])?)?;
        received += energy / tauk * uplink;
    }
    Ok(tauk * (1.0 + received / params.sigma2).log2())
}

/// Sum throughput for explicit blocks; shared by the optimizer loop and
/// the stored-solution check.
pub fn evaluate_throughput(
    params: &SystemParams,
    chans: &ChannelRealization,
    w0: &ReflectVector,
    wk: &[ReflectVector],
    times: &TimeAllocation,
) -> Result<f64> {
    let k_total = params.num_clusters();
    if wk.len() != k_total || times.tau.len() != k_total {
        return Err(Error::DimensionMismatch(format!(
            "expected {k_total} clusters, got {} beams and {} durations",
            wk.len(),
            times.tau.len()
        )));
    }
    let mut sum = 0.0;
    for k in 0..k_total {
        sum += cluster_throughput(params, chans, w0, &wk[k], times.tau0, times.tau[k], k)?;
    }
    Ok(sum)
}

/// Total network throughput of a solution, recomputed from its fields.
pub fn total_throughput(
    params: &SystemParams,
    chans: &ChannelRealization,
    solution: &Solution,
) -> Result<f64> {
    evaluate_throughput(params, chans, &solution.w0, &solution.wk, &solution.times)
}

/// `sum_i weights_i v_i v_i^H`; Hermitian PSD by construction.
pub fn weighted_gram(
    vectors: &[DVector<Complex64>],
    weights: &[f64],
) -> Result<HermitianMatrix> {
    if vectors.len() != weights.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} vectors but {} weights",
            vectors.len(),
            weights.len()
        )));
    }
    if weights.iter().any(|&w| w < 0.0) {
        return Err(Error::InvalidParameter("negative gram weight".into()));
    }
    let n = vectors.first().map_or(0, |v| v.len());
    if vectors.iter().any(|v| v.len() != n) {
        return Err(Error::DimensionMismatch(
            "gram vectors of unequal length".into(),
        ));
    }
    let mut acc = HermitianMatrix::zeros(n);
    for (v, &w) in vectors.iter().zip(weights) {
        acc = acc.add_scaled(&HermitianMatrix::from_rank_one(v), w);
    }
    Ok(acc)
}

/// Diagonal selector: `tr(selector(n) W)` extracts `W[n, n]`. Zero-based.
pub fn selector(index: usize, n: usize) -> Result<HermitianMatrix> {
    if index >= n {
        return Err(Error::IndexOutOfRange(format!(
            "selector index {index} for dimension {n}"
        )));
    }
    let mut m = nalgebra::DMatrix::<Complex64>::zeros(n, n);
    m[(index, index)] = Complex64::new(1.0, 0.0);
    HermitianMatrix::from_matrix(&m)
}
