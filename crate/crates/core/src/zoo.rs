//! Covariance families: fractional Brownian motion, Brownian motion, the
//! Brownian sheet and its four-point counterexample, random Green functions,
//! diagonal rescalings, and the dyadic discretization used to watch
//! `χ_n` converge on a compact interval.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::ZooError;
use crate::matrix::{invert, Matrix, Tolerances};
use crate::oracle::ChainSpec;

/// Largest dyadic level accepted by [`dyadic_discretize`].
pub const DYADIC_MAX_LEVEL: u32 = 12;
const QUAD_REL_TOL: f64 = 1e-8;
const QUAD_MAX_DEPTH: u32 = 40;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec1D {
    points: Vec<f64>,
}

impl GridSpec1D {
    pub fn new(points: Vec<f64>) -> Result<Self, ZooError> {
        if points.iter().any(|x| !x.is_finite()) || points.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(ZooError::InvalidGrid);
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec2D {
    points: Vec<(f64, f64)>,
}

impl GridSpec2D {
    pub fn new(points: Vec<(f64, f64)>) -> Result<Self, ZooError> {
        for (i, &(x, s)) in points.iter().enumerate() {
            if !(x > 0.0 && s > 0.0 && x.is_finite() && s.is_finite()) {
                return Err(ZooError::NonPositivePoint(i));
            }
            if points[..i].contains(&(x, s)) {
                return Err(ZooError::DuplicatePoint(i));
            }
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }
}

/// `|x|^β + |y|^β - |x - y|^β` on grid points, which must be positive.
pub fn fbm_cov(grid: &GridSpec1D, beta: f64) -> Result<Matrix, ZooError> {
    if let Some(i) = grid.points.iter().position(|&x| x <= 0.0) {
        return Err(ZooError::NonPositivePoint(i));
    }
    fbm_cov_allow_zero(grid, beta)
}

/// [`fbm_cov`] accepting the point 0 (its row and column vanish, so the
/// result is singular).
pub fn fbm_cov_allow_zero(grid: &GridSpec1D, beta: f64) -> Result<Matrix, ZooError> {
    if !(beta > 0.0 && beta < 2.0) {
        return Err(ZooError::BetaOutOfRange(beta));
    }
    if let Some(i) = grid.points.iter().position(|&x| x < 0.0) {
        return Err(ZooError::NonPositivePoint(i));
    }
    let p = &grid.points;
    Ok(Matrix::from_fn(p.len(), |i, j| {
        p[i].abs().powf(beta) + p[j].abs().powf(beta) - (p[i] - p[j]).abs().powf(beta)
    }))
}

/// `min(x_i, x_j)`.
pub fn brownian_cov(grid: &GridSpec1D) -> Result<Matrix, ZooError> {
    if let Some(i) = grid.points.iter().position(|&x| x <= 0.0) {
        return Err(ZooError::NonPositivePoint(i));
    }
    let p = &grid.points;
    Ok(Matrix::from_fn(p.len(), |i, j| p[i].min(p[j])))
}

/// `(x ∧ y)(s ∧ t)`.
pub fn sheet_cov(grid: &GridSpec2D) -> Matrix {
    let p = &grid.points;
    Matrix::from_fn(p.len(), |i, j| p[i].0.min(p[j].0) * p[i].1.min(p[j].1))
}

/// Four sheet points with `x₁ < x₃ < x₂ < x₄` and `s₄ < s₁ < s₃ < s₂`, the
/// smallest integer choice: `x = (1, 3, 2, 4)`, `s = (2, 4, 3, 1)`.
pub fn sheet_counterexample() -> (GridSpec2D, Matrix) {
    let grid = GridSpec2D::new(vec![(1.0, 2.0), (3.0, 4.0), (2.0, 3.0), (4.0, 1.0)]).expect("valid points");
    let g = sheet_cov(&grid);
    (grid, g)
}

/// Random transient chain and its Green function `g = (I - T)⁻¹`.
///
/// `B` has uniform(0, 1) entries, each zeroed with probability 0.3;
/// `c = 1.1 · max row sum`, `T = B / c`. With `symmetric`, `B` (hence `g`) is
/// symmetric and `g` is a Green function covariance.
pub fn random_green(n: usize, seed: u64, symmetric: bool) -> Result<(ChainSpec, Matrix), ZooError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut b = Matrix::zeros(n);
    for i in 0..n {
        let lo = if symmetric { i } else { 0 };
        for j in lo..n {
            let v = if rng.random::<f64>() < 0.3 {
                0.0
            } else {
                rng.random::<f64>()
            };
            b[(i, j)] = v;
            if symmetric {
                b[(j, i)] = v;
            }
        }
    }
    let max_row = b.row_sums().into_iter().fold(0.0, f64::max);
    let c = if max_row > 0.0 { 1.1 * max_row } else { 1.0 };
    let chain = ChainSpec::from_transitions(b.scale(1.0 / c), c);
    let g = invert(&Matrix::identity(n).sub(&chain.t), &Tolerances::default())?;
    let g = if symmetric { g.symmetrize() } else { g };
    Ok((chain, g))
}

/// `diag(d) G diag(d)`.
pub fn scale_conjugate(g: &Matrix, d: &[f64]) -> Result<Matrix, ZooError> {
    if d.len() != g.n() {
        return Err(ZooError::Linalg(crate::error::LinalgError::DimensionMismatch {
            expected: g.n(),
            got: d.len(),
        }));
    }
    if let Some(i) = d.iter().position(|&x| !(x > 0.0 && x.is_finite())) {
        return Err(ZooError::NonPositiveScale(i));
    }
    Ok(g.diag_scale(d, d))
}

/// Dyadic nodes `k / 2ⁿ` of `[a, b]` with cell masses of the reference
/// measure `m(dy) = (1 ∧ G(y,y)^{-1/2}) e^{-|y|} dy`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DyadicGrid {
    pub a: f64,
    pub b: f64,
    pub level: u32,
    pub nodes: Vec<f64>,
    /// `m([k/2ⁿ, (k+1)/2ⁿ))` for each node.
    pub weights: Vec<f64>,
}

/// Output of [`dyadic_discretize`]: grid, weighted matrix `G_n` (weights on
/// columns, so not symmetric) and its row sums `χ_n`.
#[derive(Clone, Debug)]
pub struct Discretization {
    pub grid: DyadicGrid,
    pub g_n: Matrix,
    pub chi_n: Vec<f64>,
}

fn density<F: Fn(f64, f64) -> f64>(cov: &F, y: f64) -> f64 {
    let v = cov(y, y);
    let w = if v > 1.0 { 1.0 / v.sqrt() } else { 1.0 };
    w * (-y.abs()).exp()
}

pub fn dyadic_discretize<F>(cov: F, a: f64, b: f64, level: u32) -> Result<Discretization, ZooError>
where
    F: Fn(f64, f64) -> f64,
{
    if level > DYADIC_MAX_LEVEL {
        return Err(ZooError::LevelTooLarge {
            n: level,
            max: DYADIC_MAX_LEVEL,
        });
    }
    if !(a < b && a.is_finite() && b.is_finite()) {
        return Err(ZooError::InvalidGrid);
    }
    let h = (2.0f64).powi(-(level as i32));
    let k0 = (a / h).floor() as i64;
    let k1 = (b / h).floor() as i64;
    let nodes: Vec<f64> = (k0..=k1).map(|k| k as f64 * h).collect();
    let weights = nodes
        .iter()
        .map(|&x| adaptive_simpson(&|y| density(&cov, y), x, x + h, QUAD_REL_TOL))
        .collect::<Result<Vec<f64>, ZooError>>()?;
    let n = nodes.len();
    let g_n = Matrix::from_fn(n, |i, j| cov(nodes[i], nodes[j]) * weights[j]);
    let chi_n = g_n.row_sums();
    Ok(Discretization {
        grid: DyadicGrid {
            a,
            b,
            level,
            nodes,
            weights,
        },
        g_n,
        chi_n,
    })
}

/// `sup_x |χ_{n+1}(d_{n+1}(x)) - χ_n(d_n(x))|` over `[a, b]`, for each
/// level `n` in `levels`.
pub fn chi_sup_changes<F>(cov: F, a: f64, b: f64, levels: std::ops::RangeInclusive<u32>) -> Result<Vec<f64>, ZooError>
where
    F: Fn(f64, f64) -> f64,
{
    let lo = *levels.start();
    let hi = *levels.end();
    let discs = (lo..=hi + 1)
        .map(|n| dyadic_discretize(&cov, a, b, n))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(discs
        .windows(2)
        .map(|w| {
            let (coarse, fine) = (&w[0], &w[1]);
            let k0 = coarse.grid.nodes[0];
            let h = coarse.grid.nodes.get(1).map_or(1.0, |x| x - k0);
            fine.grid
                .nodes
                .iter()
                .zip(&fine.chi_n)
                .map(|(&y, &chi)| {
                    // fine node y lies in coarse cell floor((y - k0) / h)
                    let idx = (((y - k0) / h) + 1e-9).floor() as usize;
                    (chi - coarse.chi_n[idx.min(coarse.chi_n.len() - 1)]).abs()
                })
                .fold(0.0, f64::max)
        })
        .collect())
}

/// Adaptive Simpson quadrature with interval bisection.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, rel_tol: f64) -> Result<f64, ZooError> {
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    let tol = rel_tol * whole.abs().max(f64::MIN_POSITIVE);
    let v = simpson_step(f, a, b, fa, fm, fb, whole, tol, QUAD_MAX_DEPTH);
    if v.is_finite() {
        Ok(v)
    } else {
        Err(ZooError::QuadratureFailure { a, b })
    }
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}
