//! Stochastic cross-checks.
//!
//! Visit counts of the killed chain estimate `g = (I - T)⁻¹`; occupation times
//! of the Poisson-subordinated chain estimate `g / c`; Gaussian samples
//! estimate `E exp(-½ Σ t_i η_i²) = det(I + G Θ)^{-1/2}`.
//!
//! Randomness comes from ChaCha8 streams keyed by `(kind, start state, chunk)`,
//! so results depend only on the seed, never on the thread schedule.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::SimError;
use crate::matrix::{self, cholesky, Matrix, Tolerances};

const CHUNK: u64 = 1 << 15;
const SURVIVAL_CUTOFF: f64 = 1e-12;
const MAX_STEPS: usize = 10_000_000;

const STREAM_VISITS: u64 = 1;
const STREAM_OCCUPATION: u64 = 2;
const STREAM_GAUSSIAN: u64 = 3;
const STREAM_LAPLACE: u64 = 4;

/// Killed Markov chain: from `i`, jump to `j` w.p. `T_ij`, die w.p. `κ_i`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainSpec {
    pub n: usize,
    #[serde(rename = "T")]
    pub t: Matrix,
    pub kappa: Vec<f64>,
    /// Poisson subordination rate.
    pub c: f64,
}

impl ChainSpec {
    pub fn from_transitions(t: Matrix, c: f64) -> Self {
        let kappa = t.row_sums().iter().map(|s| 1.0 - s).collect();
        Self { n: t.n(), t, kappa, c }
    }

    /// Checks `T >= 0`, `T𝟙 + κ = 𝟙`, `κ >= 0` with one `κ_i > 0`, `ρ(T) < 1`.
    /// Returns an upper bound on `ρ(T)`.
    pub fn validate(&self, tol: f64) -> Result<f64, SimError> {
        let bad = |m: String| Err(SimError::InvalidChain(m));
        if self.t.n() != self.n || self.kappa.len() != self.n {
            return bad("dimension mismatch".into());
        }
        if !self.t.is_finite() || self.kappa.iter().any(|k| !k.is_finite()) {
            return bad("non-finite entries".into());
        }
        if let Some(w) = matrix::min_entry(&self.t) {
            if w.value < 0.0 {
                return bad(format!("T[{},{}] = {} < 0", w.i, w.j, w.value));
            }
        }
        for (i, (s, k)) in self.t.row_sums().iter().zip(&self.kappa).enumerate() {
            if (s + k - 1.0).abs() > tol {
                return bad(format!("row {i}: T row sum + kappa = {}", s + k));
            }
            if *k < -tol {
                return bad(format!("kappa[{i}] = {k} < 0"));
            }
        }
        if self.n > 0 && !self.kappa.iter().any(|&k| k > tol) {
            return bad("no killing anywhere".into());
        }
        if !(self.c > 0.0 && self.c.is_finite()) {
            return bad(format!("rate c = {} must be positive", self.c));
        }
        let rho = match matrix::spectral_radius(&self.t, 100_000, 1e-13) {
            Ok(r) => r.upper.min(r.estimate + 1e-9).min(r.gershgorin),
            Err(_) => matrix::spectral_radius(&self.t, 1, 1.0).map_or(1.0, |r| r.gershgorin),
        };
        if !(rho < 1.0) {
            // The Gershgorin bound can reach 1 for transient chains; fall back
            // on the resolvent being nonnegative.
            let inv = matrix::invert(&Matrix::identity(self.n).sub(&self.t), &Tolerances::default())
                .map_err(|e| SimError::InvalidChain(format!("I - T singular: {e}")))?;
            if !matrix::is_nonneg(&inv, tol * inv.max_abs()).0 {
                return bad("spectral radius of T is not below 1".into());
            }
        }
        Ok(rho.min(1.0 - f64::EPSILON))
    }

    /// Path-length cap `ceil(log(1e-12) / log ρ̂)`, at least `n + 1`.
    pub fn step_cap(&self, rho: f64) -> usize {
        let base = if rho <= 0.0 {
            0.0
        } else {
            (SURVIVAL_CUTOFF.ln() / rho.ln()).ceil()
        };
        (base as usize).max(self.n + 1).min(MAX_STEPS)
    }

    /// Exact Green function `(I - T)⁻¹`.
    pub fn green(&self) -> Result<Matrix, SimError> {
        Ok(matrix::invert(
            &Matrix::identity(self.n).sub(&self.t),
            &Tolerances::default(),
        )?)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SimKind {
    VisitCounts,
    OccupationTimes,
    Laplace,
}

/// Monte-Carlo estimate with per-entry standard errors.
///
/// Equality ignores `elapsed`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SimReport<E> {
    pub kind: SimKind,
    pub estimate: E,
    pub stderr: E,
    /// Paths per start state, or Gaussian samples.
    pub n_draws: u64,
    pub seed: u64,
    /// Paths stopped by the length cap before being killed.
    pub overflow: u64,
    pub step_cap: Option<usize>,
    #[serde(skip)]
    pub elapsed: f64,
}

impl<E: PartialEq> PartialEq for SimReport<E> {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
            && self.estimate == other.estimate
            && self.stderr == other.stderr
            && self.n_draws == other.n_draws
            && self.seed == other.seed
            && self.overflow == other.overflow
            && self.step_cap == other.step_cap
    }
}

fn stream(seed: u64, kind: u64, start: usize, chunk: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((kind << 56) | ((start as u64) << 32) | chunk);
    rng
}

fn chunks(total: u64) -> Vec<(u64, u64)> {
    (0..total.div_ceil(CHUNK))
        .map(|k| (k, CHUNK.min(total - k * CHUNK)))
        .collect()
}

fn mean_stderr(sum: f64, sumsq: f64, count: u64) -> (f64, f64) {
    let n = count as f64;
    let mean = sum / n;
    if count < 2 {
        return (mean, 0.0);
    }
    let var = ((sumsq - sum * sum / n) / (n - 1.0)).max(0.0);
    (mean, (var / n).sqrt())
}

#[derive(Clone)]
struct Moments {
    sum: Vec<f64>,
    sumsq: Vec<f64>,
    overflow: u64,
}

impl Moments {
    fn new(n: usize) -> Self {
        Self {
            sum: vec![0.0; n],
            sumsq: vec![0.0; n],
            overflow: 0,
        }
    }

    fn merge(mut self, other: &Moments) -> Self {
        for (a, b) in self.sum.iter_mut().zip(&other.sum) {
            *a += b;
        }
        for (a, b) in self.sumsq.iter_mut().zip(&other.sumsq) {
            *a += b;
        }
        self.overflow += other.overflow;
        self
    }
}

/// Expected visit counts (time 0 included) from every start state.
pub fn simulate_green(chain: &ChainSpec, n_paths: u64, seed: u64) -> Result<SimReport<Matrix>, SimError> {
    simulate_paths(chain, n_paths, seed, false)
}

/// Expected occupation times of the chain run with exponential(c) holding
/// times; estimates `g / c`.
pub fn simulate_ct_green(chain: &ChainSpec, n_paths: u64, seed: u64) -> Result<SimReport<Matrix>, SimError> {
    simulate_paths(chain, n_paths, seed, true)
}

fn simulate_paths(chain: &ChainSpec, n_paths: u64, seed: u64, continuous: bool) -> Result<SimReport<Matrix>, SimError> {
    if n_paths == 0 {
        return Err(SimError::InvalidInput("n_paths must be at least 1".into()));
    }
    let rho = chain.validate(1e-9)?;
    let started = Instant::now();
    let n = chain.n;
    let cap = chain.step_cap(rho);
    let cum: Vec<f64> = chain
        .t
        .rows()
        .flat_map(|r| {
            r.iter().scan(0.0, |acc, &p| {
                *acc += p;
                Some(*acc)
            })
        })
        .collect();
    let rate = chain.c;
    let kind = if continuous { STREAM_OCCUPATION } else { STREAM_VISITS };

    let jobs: Vec<(usize, u64, u64)> = (0..n)
        .flat_map(|s| chunks(n_paths).into_iter().map(move |(k, len)| (s, k, len)))
        .collect();
    let parts: Vec<(usize, Moments)> = jobs
        .par_iter()
        .map(|&(start, k, len)| {
            let mut rng = stream(seed, kind, start, k);
            let mut acc = Moments::new(n);
            let mut tally = vec![0.0f64; n];
            for _ in 0..len {
                let mut state = start;
                let mut steps = 0usize;
                loop {
                    tally[state] += if continuous {
                        rng.sample::<f64, _>(Exp1) / rate
                    } else {
                        1.0
                    };
                    if steps == cap {
                        acc.overflow += 1;
                        break;
                    }
                    let u: f64 = rng.random();
                    let row = &cum[state * n..(state + 1) * n];
                    match row.iter().position(|&c| u < c) {
                        Some(j) => state = j,
                        None => break,
                    }
                    steps += 1;
                }
                for j in 0..n {
                    let v = tally[j];
                    if v != 0.0 {
                        acc.sum[j] += v;
                        acc.sumsq[j] += v * v;
                        tally[j] = 0.0;
                    }
                }
            }
            (start, acc)
        })
        .collect();

    let mut per_start = vec![Moments::new(n); n];
    for (start, m) in &parts {
        per_start[*start] = per_start[*start].clone().merge(m);
    }
    let mut estimate = Matrix::zeros(n);
    let mut stderr = Matrix::zeros(n);
    let mut overflow = 0;
    for (i, m) in per_start.iter().enumerate() {
        overflow += m.overflow;
        for j in 0..n {
            let (mean, se) = mean_stderr(m.sum[j], m.sumsq[j], n_paths);
            estimate[(i, j)] = mean;
            stderr[(i, j)] = se;
        }
    }
    Ok(SimReport {
        kind: if continuous {
            SimKind::OccupationTimes
        } else {
            SimKind::VisitCounts
        },
        estimate,
        stderr,
        n_draws: n_paths,
        seed,
        overflow,
        step_cap: Some(cap),
        elapsed: started.elapsed().as_secs_f64(),
    })
}

/// `n_samples` centered Gaussian vectors with covariance `g` (one per row).
pub fn sample_gaussian(g: &Matrix, n_samples: u64, seed: u64) -> Result<Vec<Vec<f64>>, SimError> {
    let chol = cholesky(g, &Tolerances::default())?;
    let n = g.n();
    let parts: Vec<Vec<Vec<f64>>> = chunks(n_samples)
        .par_iter()
        .map(|&(k, len)| {
            let mut rng = stream(seed, STREAM_GAUSSIAN, 0, k);
            let mut z = vec![0.0; n];
            (0..len)
                .map(|_| {
                    z.iter_mut().for_each(|v| *v = rng.sample(StandardNormal));
                    let mut x = vec![0.0; n];
                    chol.lower_mul(&z, &mut x);
                    x
                })
                .collect()
        })
        .collect();
    Ok(parts.into_iter().flatten().collect())
}

fn check_laplace_args(g: &Matrix, t: &[f64]) -> Result<(), SimError> {
    if t.len() != g.n() {
        return Err(SimError::InvalidInput(format!(
            "t has {} entries, covariance is {}x{}",
            t.len(),
            g.n(),
            g.n()
        )));
    }
    if let Some(i) = t.iter().position(|x| !(x.is_finite() && *x >= 0.0)) {
        return Err(SimError::InvalidInput(format!("t[{i}] = {} must be >= 0", t[i])));
    }
    Ok(())
}

/// `det(I + G Θ)^{-1/2}` with `Θ = diag(t)`, through the Cholesky factor of
/// the congruent matrix `I + Θ^{1/2} G Θ^{1/2}`.
pub fn laplace_exact(g: &Matrix, t: &[f64]) -> Result<f64, SimError> {
    check_laplace_args(g, t)?;
    let r: Vec<f64> = t.iter().map(|x| x.sqrt()).collect();
    let m = Matrix::identity(g.n()).sub(&g.diag_scale(&r, &r).scale(-1.0));
    let chol = cholesky(&m, &Tolerances::default())?;
    Ok((-0.5 * chol.log_det()).exp())
}

/// Monte-Carlo mean of `exp(-½ Σ t_i η_i²)` over Gaussian draws; its
/// expectation is exactly [`laplace_exact`].
pub fn laplace_mc(g: &Matrix, t: &[f64], n_samples: u64, seed: u64) -> Result<SimReport<f64>, SimError> {
    check_laplace_args(g, t)?;
    if n_samples == 0 {
        return Err(SimError::InvalidInput("n_samples must be at least 1".into()));
    }
    let started = Instant::now();
    let chol = cholesky(g, &Tolerances::default())?;
    let n = g.n();
    let parts: Vec<(f64, f64)> = chunks(n_samples)
        .par_iter()
        .map(|&(k, len)| {
            let mut rng = stream(seed, STREAM_LAPLACE, 0, k);
            let mut z = vec![0.0; n];
            let mut x = vec![0.0; n];
            let (mut s, mut ss) = (0.0, 0.0);
            for _ in 0..len {
                z.iter_mut().for_each(|v| *v = rng.sample(StandardNormal));
                chol.lower_mul(&z, &mut x);
                let q: f64 = 0.5 * x.iter().zip(t).map(|(v, w)| w * v * v).sum::<f64>();
                let y = (-q).exp();
                s += y;
                ss += y * y;
            }
            (s, ss)
        })
        .collect();
    let (sum, sumsq) = parts.iter().fold((0.0, 0.0), |(a, b), (s, ss)| (a + s, b + ss));
    let (estimate, stderr) = mean_stderr(sum, sumsq, n_samples);
    Ok(SimReport {
        kind: SimKind::Laplace,
        estimate,
        stderr,
        n_draws: n_samples,
        seed,
        overflow: 0,
        step_cap: None,
        elapsed: started.elapsed().as_secs_f64(),
    })
}
