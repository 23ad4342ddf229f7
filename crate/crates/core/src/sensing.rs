//! Measurement simulation y = A x* + noise, decoders that search the
//! model range, and Monte Carlo risk estimation against the hard prior.
//!
//! Everything is deterministic given the config seed: matrices, signals,
//! and noise each live on their own counter-based substream keyed by
//! purpose and trial index, so trials can be evaluated in any order (or
//! concurrently by a caller) with identical results.

use ndarray::{Array1, Array2};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{enumerate_signed_supports, GroupSparseSignal, SignedSupport};
use crate::rng::{PhiloxStream, Purpose, StreamId};

/// Families larger than this are not worth enumerating exhaustively.
pub const DEFAULT_ENUM_CAP: u128 = 1 << 20;

/// How the measurement matrix relates to the trial loop.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MatrixMode {
    /// one Gaussian draw from the seed, shared by every trial (default:
    /// the fixed-matrix statements of the theory)
    Fixed,
    /// fresh Gaussian draw per trial
    GaussianIid,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SensingConfig {
    pub m: usize,
    pub n: usize,
    /// total noise energy: per-coordinate variance is alpha/m
    pub alpha: f64,
    pub matrix_mode: MatrixMode,
    /// rescale the emitted matrix to this exact squared Frobenius norm
    pub normalize_frobenius: Option<f64>,
    pub seed: u64,
}

impl SensingConfig {
    pub fn new(m: usize, n: usize, alpha: f64, seed: u64) -> Result<Self> {
        if m == 0 || n == 0 {
            return Err(Error::invalid("m and n must be positive"));
        }
        if !(alpha >= 0.0) || !alpha.is_finite() {
            return Err(Error::invalid("noise level alpha must be non-negative"));
        }
        Ok(SensingConfig {
            m,
            n,
            alpha,
            matrix_mode: MatrixMode::Fixed,
            normalize_frobenius: None,
            seed,
        })
    }

    pub fn with_mode(mut self, mode: MatrixMode) -> Self {
        self.matrix_mode = mode;
        self
    }

    pub fn with_frobenius(mut self, target: f64) -> Result<Self> {
        if !(target > 0.0) || !target.is_finite() {
            return Err(Error::invalid("Frobenius target must be positive"));
        }
        self.normalize_frobenius = Some(target);
        Ok(self)
    }
}

/// The matrix for a given draw index; index 0 is the shared fixed matrix.
fn sample_matrix_indexed(cfg: &SensingConfig, index: u64) -> Array2<f64> {
    let mut s = PhiloxStream::new(cfg.seed, StreamId::new(Purpose::Matrix, index));
    let sd = (1.0 / cfg.m as f64).sqrt();
    let mut a = Array2::zeros((cfg.m, cfg.n));
    for i in 0..cfg.m {
        for j in 0..cfg.n {
            a[(i, j)] = sd * s.next_gaussian();
        }
    }
    if let Some(target) = cfg.normalize_frobenius {
        let frob2: f64 = a.iter().map(|v| v * v).sum();
        let scale = (target / frob2).sqrt();
        a.mapv_inplace(|v| v * scale);
    }
    a
}

/// i.i.d. N(0, 1/m) measurement matrix, deterministic in the seed;
/// Frobenius renormalization applied last when configured.
pub fn sample_matrix(cfg: &SensingConfig) -> Array2<f64> {
    sample_matrix_indexed(cfg, 0)
}

/// y = A x + noise with i.i.d. N(0, alpha/m) coordinates drawn from `rng`.
pub fn observe(
    a: &Array2<f64>,
    x: &Array1<f64>,
    alpha: f64,
    rng: &mut PhiloxStream,
) -> Result<Array1<f64>> {
    if a.ncols() != x.len() {
        return Err(Error::DimensionMismatch {
            expected: a.ncols(),
            got: x.len(),
            context: "signal length vs matrix columns",
        });
    }
    if !(alpha >= 0.0) || !alpha.is_finite() {
        return Err(Error::invalid("noise level alpha must be non-negative"));
    }
    let sd = (alpha / a.nrows() as f64).sqrt();
    let mut y = a.dot(x);
    for v in y.iter_mut() {
        *v += sd * rng.next_gaussian();
    }
    Ok(y)
}

/// Candidate family the exhaustive decoder scans.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DecoderFamily {
    /// the hard-prior signals: every block active at amplitude +-xi
    SignedSupports { k: usize, xi: f64 },
    /// every support pattern (blocks may be empty), amplitudes fit by
    /// per-support least squares and clamped to [-x_max, x_max]
    SupportsLs { k: usize, x_max: f64 },
}

fn block_split(n: usize, k: usize) -> Result<usize> {
    if k == 0 || n % k != 0 {
        return Err(Error::NotGroupSparse(format!(
            "n = {n} does not split into k = {k} equal blocks"
        )));
    }
    Ok(n / k)
}

/// Residual-minimizing member of the family, scanned exhaustively in
/// enumeration order with strict improvement, so ties return the
/// lexicographically smallest candidate.
pub fn decode_exhaustive(
    y: &Array1<f64>,
    a: &Array2<f64>,
    family: DecoderFamily,
    cap: u128,
) -> Result<GroupSparseSignal> {
    if y.len() != a.nrows() {
        return Err(Error::DimensionMismatch {
            expected: a.nrows(),
            got: y.len(),
            context: "observation length vs matrix rows",
        });
    }
    match family {
        DecoderFamily::SignedSupports { k, xi } => decode_signed(y, a, k, xi, cap),
        DecoderFamily::SupportsLs { k, x_max } => decode_supports_ls(y, a, k, x_max, cap),
    }
}

fn decode_signed(
    y: &Array1<f64>,
    a: &Array2<f64>,
    k: usize,
    xi: f64,
    cap: u128,
) -> Result<GroupSparseSignal> {
    let n = a.ncols();
    let b = block_split(n, k)?;
    let m = a.nrows();
    let mut best: Option<(f64, SignedSupport)> = None;
    let mut coords = vec![0usize; k];
    for v in enumerate_signed_supports(k, b, cap)? {
        for (blk, &(j, _)) in v.entries.iter().enumerate() {
            coords[blk] = blk * b + j;
        }
        let mut res = 0.0;
        for i in 0..m {
            let mut pred = 0.0;
            for (blk, &(_, s)) in v.entries.iter().enumerate() {
                pred += s as f64 * a[(i, coords[blk])];
            }
            let d = y[i] - xi * pred;
            res += d * d;
        }
        if best.as_ref().map_or(true, |(r, _)| res < *r) {
            best = Some((res, v));
        }
    }
    let (_, v) = best.expect("family is never empty");
    Ok(v.materialize(b, xi))
}

/// Solve (G + ridge I) c = rhs in place for a small symmetric system by
/// Gaussian elimination with partial pivoting.
fn solve_small(mut g: Vec<Vec<f64>>, mut rhs: Vec<f64>, ridge: f64) -> Vec<f64> {
    let s = rhs.len();
    for i in 0..s {
        g[i][i] += ridge;
    }
    for col in 0..s {
        let pivot = (col..s)
            .max_by(|&x, &y| g[x][col].abs().total_cmp(&g[y][col].abs()))
            .unwrap();
        g.swap(col, pivot);
        rhs.swap(col, pivot);
        let p = g[col][col];
        for row in col + 1..s {
            let f = g[row][col] / p;
            for c in col..s {
                g[row][c] -= f * g[col][c];
            }
            rhs[row] -= f * rhs[col];
        }
    }
    let mut c = vec![0.0; s];
    for row in (0..s).rev() {
        let mut v = rhs[row];
        for col in row + 1..s {
            v -= g[row][col] * c[col];
        }
        c[row] = v / g[row][row];
    }
    c
}

fn decode_supports_ls(
    y: &Array1<f64>,
    a: &Array2<f64>,
    k: usize,
    x_max: f64,
    cap: u128,
) -> Result<GroupSparseSignal> {
    if !(x_max > 0.0) || !x_max.is_finite() {
        return Err(Error::invalid("amplitude cap x_max must be positive"));
    }
    let n = a.ncols();
    let b = block_split(n, k)?;
    let m = a.nrows();
    let base = b as u128 + 1;
    let total = base.pow(k as u32);
    if total > cap {
        return Err(Error::EnumerationCap { size: total, cap });
    }
    const RIDGE: f64 = 1e-12;
    let mut best: Option<(f64, Vec<(usize, f64)>)> = None;
    for rank in 0..total {
        // digits base (b + 1), block 0 most significant; 0 = empty block,
        // digit j + 1 = position j, so the all-empty pattern comes first
        let mut digits = vec![0u128; k];
        let mut r = rank;
        for i in (0..k).rev() {
            digits[i] = r % base;
            r /= base;
        }
        let coords: Vec<usize> = digits
            .iter()
            .enumerate()
            .filter(|(_, d)| **d > 0)
            .map(|(blk, d)| blk * b + (*d as usize - 1))
            .collect();
        let s = coords.len();
        let fitted: Vec<(usize, f64)> = if s == 0 {
            Vec::new()
        } else {
            let mut gram = vec![vec![0.0; s]; s];
            let mut rhs = vec![0.0; s];
            for (p, &cp) in coords.iter().enumerate() {
                for (q, &cq) in coords.iter().enumerate() {
                    let mut dot = 0.0;
                    for i in 0..m {
                        dot += a[(i, cp)] * a[(i, cq)];
                    }
                    gram[p][q] = dot;
                }
                let mut dot = 0.0;
                for i in 0..m {
                    dot += a[(i, cp)] * y[i];
                }
                rhs[p] = dot;
            }
            let c = solve_small(gram, rhs, RIDGE);
            coords
                .iter()
                .zip(c)
                .map(|(&coord, v)| (coord, v.clamp(-x_max, x_max)))
                .collect()
        };
        // residual recomputed after clamping, so a clamped fit competes on
        // what it actually predicts
        let mut res = 0.0;
        for i in 0..m {
            let mut pred = 0.0;
            for &(coord, v) in &fitted {
                pred += v * a[(i, coord)];
            }
            let d = y[i] - pred;
            res += d * d;
        }
        if best.as_ref().map_or(true, |(r, _)| res < *r) {
            best = Some((res, fitted));
        }
    }
    let (_, fitted) = best.expect("pattern list is never empty");
    let mut values = Array1::zeros(n);
    for (coord, v) in fitted {
        values[coord] = v;
    }
    GroupSparseSignal::new(values, k)
}

/// A generator the latent decoder can search: a cube domain and a pure
/// latent-to-signal map.
pub trait LatentModel {
    fn latent_dim(&self) -> usize;
    /// common (lo, hi) range of every latent coordinate
    fn domain(&self) -> (f64, f64);
    fn decode(&self, z: &[f64]) -> Array1<f64>;
}

impl LatentModel for crate::model::GenModelParams {
    fn latent_dim(&self) -> usize {
        self.k
    }

    fn domain(&self) -> (f64, f64) {
        (-self.r, self.r)
    }

    fn decode(&self, z: &[f64]) -> Array1<f64> {
        self.generate(z)
            .expect("grid points stay inside the model domain")
            .values()
            .clone()
    }
}

/// A network with a declared latent cube, so it can act as the range
/// being searched.
pub struct NetworkModel<'a> {
    net: &'a crate::relu::ReluNetwork,
    lo: f64,
    hi: f64,
}

impl<'a> NetworkModel<'a> {
    pub fn new(net: &'a crate::relu::ReluNetwork, lo: f64, hi: f64) -> Result<Self> {
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::invalid("need a finite non-empty latent range"));
        }
        Ok(NetworkModel { net, lo, hi })
    }
}

impl LatentModel for NetworkModel<'_> {
    fn latent_dim(&self) -> usize {
        self.net.input_dim()
    }

    fn domain(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    fn decode(&self, z: &[f64]) -> Array1<f64> {
        self.net.forward(z).expect("dimension fixed by latent_dim")
    }
}

/// Grid cap for the latent search; beyond this the grid is hopeless.
const GRID_CAP: u128 = 1 << 22;

/// Approximate range minimizer: scan the cell-midpoint grid
/// (`grid_per_dim` cells per latent coordinate), then refine the best
/// point by coordinate descent with halving steps. The result's residual
/// never exceeds the best grid residual.
pub fn decode_latent(
    y: &Array1<f64>,
    a: &Array2<f64>,
    model: &dyn LatentModel,
    grid_per_dim: usize,
    refinement_steps: usize,
) -> Result<Array1<f64>> {
    if grid_per_dim == 0 {
        return Err(Error::invalid("latent grid must have at least one cell"));
    }
    if y.len() != a.nrows() {
        return Err(Error::DimensionMismatch {
            expected: a.nrows(),
            got: y.len(),
            context: "observation length vs matrix rows",
        });
    }
    let k = model.latent_dim();
    let total = (grid_per_dim as u128).pow(k as u32);
    if total > GRID_CAP {
        return Err(Error::EnumerationCap {
            size: total,
            cap: GRID_CAP,
        });
    }
    let (lo, hi) = model.domain();
    let cell = (hi - lo) / grid_per_dim as f64;
    let residual = |z: &[f64]| -> f64 {
        let x = model.decode(z);
        let mut res = 0.0;
        for i in 0..a.nrows() {
            let mut pred = 0.0;
            for j in 0..a.ncols() {
                pred += a[(i, j)] * x[j];
            }
            let d = y[i] - pred;
            res += d * d;
        }
        res
    };
    let mut best_z = vec![lo + cell / 2.0; k];
    let mut best_res = f64::INFINITY;
    for rank in 0..total {
        let mut z = vec![0.0; k];
        let mut r = rank;
        for i in (0..k).rev() {
            z[i] = lo + ((r % grid_per_dim as u128) as f64 + 0.5) * cell;
            r /= grid_per_dim as u128;
        }
        let res = residual(&z);
        if res < best_res {
            best_res = res;
            best_z = z;
        }
    }
    // pattern-search directions: the full {-1, 0, 1}^k compass when small
    // enough (axis-only moves stall on diagonal kinks of the piecewise
    // residual surface), axis moves otherwise
    let dirs: Vec<Vec<f64>> = if k <= 6 {
        (0..3usize.pow(k as u32))
            .filter_map(|code| {
                let mut d = vec![0.0; k];
                let mut c = code;
                let mut any = false;
                for slot in d.iter_mut() {
                    let t = c % 3;
                    c /= 3;
                    *slot = [0.0, 1.0, -1.0][t];
                    any |= t != 0;
                }
                any.then_some(d)
            })
            .collect()
    } else {
        (0..k)
            .flat_map(|i| {
                [1.0, -1.0].map(|s| {
                    let mut d = vec![0.0; k];
                    d[i] = s;
                    d
                })
            })
            .collect()
    };
    let mut step = cell / 2.0;
    for _ in 0..refinement_steps {
        // sweep at this resolution until no direction improves
        for _ in 0..200 {
            let mut improved = false;
            for d in &dirs {
                let z: Vec<f64> = best_z
                    .iter()
                    .zip(d)
                    .map(|(v, dv)| (v + dv * step).clamp(lo, hi))
                    .collect();
                let res = residual(&z);
                if res < best_res {
                    best_res = res;
                    best_z = z;
                    improved = true;
                }
            }
            if !improved {
                break;
            }
        }
        step /= 2.0;
    }
    Ok(model.decode(&best_z))
}

/// The lower-bound prior: blocks of length n/k, every block active at
/// amplitude +-xi, pattern uniform over the signed-support family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HardPrior {
    pub k: usize,
    pub xi: f64,
}

impl HardPrior {
    fn draw(&self, n: usize, rng: &mut PhiloxStream) -> Result<GroupSparseSignal> {
        let b = block_split(n, self.k)?;
        let count = SignedSupport::count(self.k, b);
        if count > u64::MAX as u128 {
            return Err(Error::EnumerationCap {
                size: count,
                cap: u64::MAX as u128,
            });
        }
        let rank = rng.next_below(count as u64);
        Ok(SignedSupport::from_rank(rank as u128, self.k, b).materialize(b, self.xi))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "mode")]
pub enum RiskMode {
    PriorAveraged,
    WorstCaseOverSampledSignals { panel: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RiskEstimate {
    pub mean_sq_error: f64,
    /// sample standard deviation / sqrt(trials); 0 for a single trial
    pub std_error: f64,
    pub trials: usize,
    pub mode: RiskMode,
}

/// Sum with a fixed pairwise reduction tree, so the value is independent
/// of evaluation order and stable enough for byte-exact reproduction.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 32 {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

fn summarize(errors: &[f64], mode: RiskMode) -> RiskEstimate {
    let trials = errors.len();
    let mean = pairwise_sum(errors) / trials as f64;
    let std_error = if trials > 1 {
        let centered: Vec<f64> = errors.iter().map(|e| (e - mean) * (e - mean)).collect();
        (pairwise_sum(&centered) / (trials - 1) as f64).sqrt() / (trials as f64).sqrt()
    } else {
        0.0
    };
    RiskEstimate {
        mean_sq_error: mean,
        std_error,
        trials,
        mode,
    }
}

/// Monte Carlo risk of `decoder` against the hard prior.
///
/// Prior-averaged: a fresh signal, fresh noise, and (per matrix mode) a
/// fixed or fresh matrix each trial. Worst-case: a panel of signals drawn
/// from the prior, each measured over all trials; the reported estimate
/// belongs to the worst panel member. Substreams are keyed by purpose and
/// trial index, so the result is independent of evaluation order.
pub fn estimate_risk(
    prior: &HardPrior,
    decoder: &(dyn Fn(&Array1<f64>, &Array2<f64>) -> Array1<f64> + Sync),
    cfg: &SensingConfig,
    trials: usize,
    mode: RiskMode,
) -> Result<RiskEstimate> {
    estimate_risk_detailed(prior, decoder, cfg, trials, mode).map(|(est, _)| est)
}

/// Same contract as [`estimate_risk`], additionally returning the per-trial
/// squared errors (for the worst-case mode, those of the worst panel member)
/// so callers can stream trial-level rows.
pub fn estimate_risk_detailed(
    prior: &HardPrior,
    decoder: &(dyn Fn(&Array1<f64>, &Array2<f64>) -> Array1<f64> + Sync),
    cfg: &SensingConfig,
    trials: usize,
    mode: RiskMode,
) -> Result<(RiskEstimate, Vec<f64>)> {
    if trials == 0 {
        return Err(Error::invalid("need at least one trial"));
    }
    block_split(cfg.n, prior.k)?;
    let fixed = match cfg.matrix_mode {
        MatrixMode::Fixed => Some(sample_matrix(cfg)),
        MatrixMode::GaussianIid => None,
    };
    let matrix_for = |draw: u64| -> Array2<f64> {
        match &fixed {
            Some(a) => a.clone(),
            // index 0 is reserved for the fixed draw
            None => sample_matrix_indexed(cfg, draw + 1),
        }
    };
    let run_trial = |x: &GroupSparseSignal, noise_index: u64| -> Result<f64> {
        let a = matrix_for(noise_index);
        let mut noise = PhiloxStream::new(cfg.seed, StreamId::new(Purpose::Noise, noise_index));
        let y = observe(&a, x.values(), cfg.alpha, &mut noise)?;
        let xhat = decoder(&y, &a);
        if xhat.len() != cfg.n {
            return Err(Error::DimensionMismatch {
                expected: cfg.n,
                got: xhat.len(),
                context: "decoder output length",
            });
        }
        Ok(x.values()
            .iter()
            .zip(&xhat)
            .map(|(t, h)| (t - h) * (t - h))
            .sum())
    };
    match mode {
        RiskMode::PriorAveraged => {
            let mut errors = Vec::with_capacity(trials);
            for t in 0..trials as u64 {
                let mut sig = PhiloxStream::new(cfg.seed, StreamId::new(Purpose::Signal, t));
                let x = prior.draw(cfg.n, &mut sig)?;
                errors.push(run_trial(&x, t)?);
            }
            let est = summarize(&errors, mode);
            Ok((est, errors))
        }
        RiskMode::WorstCaseOverSampledSignals { panel } => {
            if panel == 0 {
                return Err(Error::invalid("panel must contain at least one signal"));
            }
            let mut worst: Option<(RiskEstimate, Vec<f64>)> = None;
            for p in 0..panel as u64 {
                let mut sig = PhiloxStream::new(cfg.seed, StreamId::new(Purpose::Panel, p));
                let x = prior.draw(cfg.n, &mut sig)?;
                let mut errors = Vec::with_capacity(trials);
                for t in 0..trials as u64 {
                    errors.push(run_trial(&x, p * trials as u64 + t)?);
                }
                let est = summarize(&errors, mode);
                if worst
                    .as_ref()
                    .map_or(true, |(w, _)| est.mean_sq_error > w.mean_sq_error)
                {
                    worst = Some((est, errors));
                }
            }
            Ok(worst.expect("panel is non-empty"))
        }
    }
}
