//! Batch scans over covariance families.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::criteria::{classify_with_stability, is_id_square, triple_sufficient, GreenClass, NotIdWitness};
use crate::error::ZooError;
use crate::matrix::Tolerances;
use crate::zoo::{fbm_cov, sheet_cov, GridSpec1D, GridSpec2D};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub beta: f64,
    pub grid: Vec<f64>,
    /// `green`, `id_not_green`, `not_id` or `indeterminate`.
    pub verdict: String,
    pub witness: Option<NotIdWitness>,
}

impl SweepRow {
    pub fn is_id(&self) -> bool {
        self.verdict == "green" || self.verdict == "id_not_green"
    }
}

/// Classifies the fBm covariance for every `(beta, grid)` pair.
pub fn fbm_sweep(betas: &[f64], grids: &[GridSpec1D], tol: &Tolerances) -> Result<Vec<SweepRow>, ZooError> {
    let jobs: Vec<(f64, &GridSpec1D)> = betas.iter().flat_map(|&b| grids.iter().map(move |g| (b, g))).collect();
    jobs.par_iter()
        .map(|&(beta, grid)| {
            let g = fbm_cov(grid, beta)?;
            let c = classify_with_stability(&g, tol)?;
            let witness = match &c.class {
                GreenClass::NotId { witness } => Some(witness.clone()),
                _ => None,
            };
            let verdict = if c.stable {
                c.class.label().to_string()
            } else {
                "indeterminate".to_string()
            };
            Ok(SweepRow {
                beta,
                grid: grid.points().to_vec(),
                verdict,
                witness,
            })
        })
        .collect()
}

/// Every subset of `{1, ..., hi}` with between 2 and `max_points` elements,
/// ordered by size and then lexicographically.
pub fn integer_grids(max_points: usize, hi: u32) -> Vec<GridSpec1D> {
    let mut out = Vec::new();
    for k in 2..=max_points.min(hi as usize) {
        let mut idx: Vec<u32> = (1..=k as u32).collect();
        loop {
            out.push(GridSpec1D::new(idx.iter().map(|&v| f64::from(v)).collect()).expect("increasing"));
            // next combination
            let mut i = k;
            while i > 0 && idx[i - 1] == hi - (k - i) as u32 {
                i -= 1;
            }
            if i == 0 {
                break;
            }
            idx[i - 1] += 1;
            for j in i..k {
                idx[j] = idx[j - 1] + 1;
            }
        }
    }
    out
}

/// `count` random grids of 2..=`max_points` distinct points in `(lo, hi]`.
pub fn random_grids(count: usize, max_points: usize, lo: f64, hi: f64, seed: u64) -> Vec<GridSpec1D> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| loop {
            let k = rng.random_range(2..=max_points);
            let mut p: Vec<f64> = (0..k).map(|_| hi - rng.random::<f64>() * (hi - lo)).collect();
            p.sort_by(f64::total_cmp);
            if let Ok(g) = GridSpec1D::new(p) {
                break g;
            }
        })
        .collect()
}

/// First grid (in the given order) on which the fBm covariance is not ID.
pub fn find_not_id_grid(beta: f64, grids: &[GridSpec1D], tol: &Tolerances) -> Result<Option<SweepRow>, ZooError> {
    for chunk in grids.chunks(64) {
        let rows = fbm_sweep(&[beta], chunk, tol)?;
        if let Some(r) = rows.into_iter().find(|r| r.verdict == "not_id") {
            return Ok(Some(r));
        }
    }
    Ok(None)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TripleRow {
    pub points: Vec<(f64, f64)>,
    pub sufficient: bool,
    pub id: bool,
}

/// Random three-point restrictions of the Brownian sheet on `(0, 10]²`.
pub fn sheet_triple_scan(count: usize, seed: u64, tol: &Tolerances) -> Result<Vec<TripleRow>, ZooError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut grids = Vec::with_capacity(count);
    while grids.len() < count {
        let pts: Vec<(f64, f64)> = (0..3)
            .map(|_| (10.0 - 10.0 * rng.random::<f64>(), 10.0 - 10.0 * rng.random::<f64>()))
            .collect();
        if let Ok(g) = GridSpec2D::new(pts) {
            grids.push(g);
        }
    }
    grids
        .par_iter()
        .map(|grid| {
            let g = sheet_cov(grid);
            Ok(TripleRow {
                points: grid.points().to_vec(),
                sufficient: triple_sufficient(&g, tol),
                id: is_id_square(&g, tol)?.is_id(),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integer_grid_count() {
        // Σ_{k=2}^{6} C(10, k)
        assert_eq!(integer_grids(6, 10).len(), 45 + 120 + 210 + 252 + 210);
        assert_eq!(
            integer_grids(2, 3)
                .iter()
                .map(|g| g.points().to_vec())
                .collect::<Vec<_>>(),
            vec![vec![1., 2.], vec![1., 3.], vec![2., 3.]]
        );
    }

    #[test]
    fn random_grids_in_range() {
        for g in random_grids(50, 6, 0.0, 10.0, 1) {
            assert!((2..=6).contains(&g.len()));
            assert!(g.points().iter().all(|&x| x > 0.0 && x <= 10.0));
        }
    }

    #[test]
    fn beta_one_point_five_not_id_on_small_grid() {
        let row = find_not_id_grid(1.5, &integer_grids(6, 10), &Tolerances::default())
            .unwrap()
            .unwrap();
        assert_eq!(row.grid, vec![1., 2., 3.]);
        assert!(row.witness.is_some());
    }

    #[test]
    fn brownian_beta_is_green() {
        let rows = fbm_sweep(&[1.0], &integer_grids(4, 5), &Tolerances::default()).unwrap();
        assert!(rows.iter().all(|r| r.verdict == "green"));
    }
}
