//! Explicit transient Markov chain behind an infinitely divisible covariance.
//!
//! With `Gp = S G S` and `A = Gp⁻¹ = c I - B`, the row-sum vector `u = Gp 𝟙`
//! satisfies `A u = 𝟙`, so `T = diag(1/u) (B/c) diag(u)` is substochastic
//! with killing probabilities `κ_i = 1 / (c u_i)`. Its Green function
//! `g = (I - T)⁻¹` equals `c · diag(1/u) · Gp · diag(u)`.

use serde::{Deserialize, Serialize};

use crate::criteria::{classify_green, is_id_square, GreenClass, IdVerdict, Signature};
use crate::error::DecomposeError;
use crate::matrix::{invert, Matrix, Sign, Tolerances};
use crate::oracle::ChainSpec;

/// Relative slack for the post-construction identities.
const IDENTITY_TOL: f64 = 1e-8;

/// How the diagonal similarity `D = diag(1/u)` is chosen.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scaling {
    /// `u = S G S 𝟙`; works for every ID covariance.
    #[default]
    RowSums,
    /// `u = 𝟙` (`D = I`, `T = B/c`); only valid for Green functions.
    Unit,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct DecomposeOptions {
    /// Added to `max_i A_ii` when choosing the rate `c`.
    pub c_margin: f64,
    pub scaling: Scaling,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GreenDecomposition {
    pub signature: Signature,
    pub u: Vec<f64>,
    pub c: f64,
    #[serde(rename = "T")]
    pub t: Matrix,
    pub kappa: Vec<f64>,
    pub g: Matrix,
    pub g_sym: Matrix,
    pub mu_weights: Vec<f64>,
    pub scaling: Scaling,
    pub reconstruction_error: f64,
}

impl GreenDecomposition {
    pub fn n(&self) -> usize {
        self.u.len()
    }

    pub fn chain(&self) -> ChainSpec {
        ChainSpec {
            n: self.n(),
            t: self.t.clone(),
            kappa: self.kappa.clone(),
            c: self.c,
        }
    }

    pub fn row_sums(&self) -> Vec<f64> {
        self.t.row_sums()
    }
}

/// `u = Gp 𝟙`, required to be strictly positive.
pub fn row_sum_scaling(gp: &Matrix, tol: &Tolerances) -> Result<Vec<f64>, DecomposeError> {
    let eps = tol.zero_threshold(gp);
    let u = gp.row_sums();
    if let Some(i) = u.iter().position(|&x| !(x > eps)) {
        return Err(DecomposeError::NonPositiveScaling(i));
    }
    Ok(u)
}

pub fn decompose(g: &Matrix, tol: &Tolerances) -> Result<GreenDecomposition, DecomposeError> {
    decompose_with(g, tol, DecomposeOptions::default())
}

pub fn decompose_with(
    g: &Matrix,
    tol: &Tolerances,
    opts: DecomposeOptions,
) -> Result<GreenDecomposition, DecomposeError> {
    let n = g.n();
    let signature = match is_id_square(g, tol)? {
        IdVerdict::Id { signature, .. } => signature,
        IdVerdict::NotId { witness } => return Err(DecomposeError::NotId(witness.to_string())),
    };
    if opts.scaling == Scaling::Unit {
        if let GreenClass::IdNotGreen { reason, .. } = classify_green(g, tol)? {
            return Err(DecomposeError::NumericalFailure(format!(
                "unit scaling needs a Green function ({reason:?})"
            )));
        }
    }

    let gp = signature.conjugate(g);
    let eps_g = tol.zero_threshold(&gp);
    // Flips of single components leave Gp unchanged only if nothing couples them.
    for (a, ca) in signature.components.iter().enumerate() {
        for cb in &signature.components[a + 1..] {
            for &i in ca {
                for &j in cb {
                    if gp[(i, j)].abs() > eps_g {
                        return Err(DecomposeError::NumericalFailure(format!(
                            "covariance couples components at ({i}, {j})"
                        )));
                    }
                }
            }
        }
    }

    let a = invert(&gp, tol)?;
    let eps_a = tol.zero_threshold(&a);
    let c = a.diag().into_iter().fold(f64::NEG_INFINITY, f64::max) + opts.c_margin;
    // Entries of B classified as zero are exactly zero.
    let b = Matrix::from_fn(n, |i, j| {
        let v = if i == j { c - a[(i, i)] } else { -a[(i, j)] };
        if Sign::classify(v, eps_a) == Sign::Zero && i != j {
            0.0
        } else {
            v
        }
    });
    if let Some(k) = b.as_slice().iter().position(|&v| v < 0.0) {
        return Err(DecomposeError::NumericalFailure(format!(
            "B has a negative entry at ({}, {})",
            k / n,
            k % n
        )));
    }

    let u = match opts.scaling {
        Scaling::RowSums => row_sum_scaling(&gp, tol)?,
        Scaling::Unit => vec![1.0; n],
    };
    let inv_u: Vec<f64> = u.iter().map(|x| 1.0 / x).collect();
    let t = b.diag_scale(&inv_u, &u).scale(1.0 / c);
    let mut kappa: Vec<f64> = t.row_sums().iter().map(|s| 1.0 - s).collect();

    match opts.scaling {
        Scaling::RowSums => {
            if let Some(i) = kappa.iter().position(|&k| !(k > tol.eps_zero)) {
                return Err(DecomposeError::NumericalFailure(format!(
                    "row {i} of T is not strictly substochastic (kappa = {:e})",
                    kappa[i]
                )));
            }
        }
        Scaling::Unit => {
            for k in &mut kappa {
                if k.abs() <= tol.eps_zero {
                    *k = k.max(0.0);
                }
            }
            if kappa.iter().any(|&k| k < 0.0) || !kappa.iter().any(|&k| k > tol.eps_zero) {
                return Err(DecomposeError::NumericalFailure(
                    "unit scaling does not give a transient chain".into(),
                ));
            }
        }
    }

    let i_minus_t = Matrix::identity(n).sub(&t);
    let green = invert(&i_minus_t, tol)?;

    let resid = i_minus_t.mul(&green).max_diff(&Matrix::identity(n));
    if resid > IDENTITY_TOL {
        return Err(DecomposeError::NumericalFailure(format!(
            "(I - T) g differs from I by {resid:e}"
        )));
    }
    let predicted = gp.diag_scale(&inv_u, &u).scale(c);
    let scale = green.max_abs().max(1.0);
    let gap = predicted.max_diff(&green);
    if gap > IDENTITY_TOL * scale {
        return Err(DecomposeError::NumericalFailure(format!(
            "c D G D⁻¹ differs from g by {gap:e}"
        )));
    }

    let mut dec = GreenDecomposition {
        signature,
        u,
        c,
        t,
        kappa,
        g: green,
        g_sym: Matrix::zeros(n),
        mu_weights: Vec::new(),
        scaling: opts.scaling,
        reconstruction_error: 0.0,
    };
    let (g_sym, mu) = symmetric_green(&dec, tol)?;
    dec.g_sym = g_sym;
    dec.mu_weights = mu;
    dec.reconstruction_error = reconstruct(&dec).max_diff(g) / g.max_abs().max(f64::MIN_POSITIVE);
    Ok(dec)
}

/// `S · diag(u) · g · diag(1/u) · S / c`.
pub fn reconstruct(dec: &GreenDecomposition) -> Matrix {
    let inv_u: Vec<f64> = dec.u.iter().map(|x| 1.0 / x).collect();
    let inner = dec.g.diag_scale(&dec.u, &inv_u).scale(1.0 / dec.c);
    dec.signature.conjugate(&inner)
}

/// Symmetric Green density `g_ij / μ_j` with weights `μ_i = u_i²`.
///
/// Checks detailed balance `g_ij μ_i = g_ji μ_j`.
pub fn symmetric_green(dec: &GreenDecomposition, tol: &Tolerances) -> Result<(Matrix, Vec<f64>), DecomposeError> {
    let n = dec.n();
    let mu: Vec<f64> = dec.u.iter().map(|x| x * x).collect();
    let scaled = Matrix::from_fn(n, |i, j| dec.g[(i, j)] * mu[i]);
    let scale = scaled.max_abs().max(f64::MIN_POSITIVE);
    for i in 0..n {
        for j in (i + 1)..n {
            if (scaled[(i, j)] - scaled[(j, i)]).abs() > tol.sym_tol.max(IDENTITY_TOL) * scale {
                return Err(DecomposeError::SymmetryViolation { i, j });
            }
        }
    }
    let dens = Matrix::from_fn(n, |i, j| dec.g[(i, j)] / mu[j]);
    Ok((dens.symmetrize(), mu))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn m(rows: &[&[f64]]) -> Matrix {
        Matrix::from_rows(rows).unwrap()
    }

    fn min_kernel() -> Matrix {
        m(&[&[1., 1., 1.], &[1., 2., 2.], &[1., 2., 3.]])
    }

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn row_sum_scaling_examples() {
        assert_eq!(row_sum_scaling(&min_kernel(), &tol()).unwrap(), vec![3., 5., 6.]);
        assert_eq!(row_sum_scaling(&Matrix::identity(3), &tol()).unwrap(), vec![1.; 3]);
        assert_eq!(row_sum_scaling(&m(&[&[2.]]), &tol()).unwrap(), vec![2.]);
        let bad = m(&[&[1., -1.], &[-1., 2.]]);
        assert_eq!(
            row_sum_scaling(&bad, &tol()),
            Err(DecomposeError::NonPositiveScaling(0))
        );
    }

    #[test]
    fn min_kernel_decomposition() {
        let dec = decompose(&min_kernel(), &tol()).unwrap();
        assert_eq!(dec.c, 2.0);
        assert_eq!(dec.u, vec![3., 5., 6.]);
        let sums = dec.row_sums();
        for (s, e) in sums.iter().zip([5. / 6., 9. / 10., 11. / 12.]) {
            assert_abs_diff_eq!(*s, e, epsilon = 1e-14);
        }
        // (I - T)⁻¹ computed in exact rationals.
        let expected = m(&[&[2., 10. / 3., 4.], &[6. / 5., 4., 24. / 5.], &[1., 10. / 3., 6.]]);
        assert!(dec.g.max_diff(&expected) < 1e-12);
        assert!(dec.reconstruction_error < 1e-12);
        for (k, u) in dec.kappa.iter().zip(&dec.u) {
            assert_abs_diff_eq!(*k, 1.0 / (2.0 * u), epsilon = 1e-14);
        }
    }

    #[test]
    fn identity_decomposition() {
        let dec = decompose(&Matrix::identity(3), &tol()).unwrap();
        assert_eq!(dec.c, 1.0);
        assert_eq!(dec.t, Matrix::zeros(3));
        assert_eq!(dec.kappa, vec![1.0; 3]);
        assert_eq!(dec.g, Matrix::identity(3));
        assert_eq!(reconstruct(&dec), Matrix::identity(3));
        assert_eq!(dec.g_sym, Matrix::identity(3));
        assert_eq!(dec.mu_weights, vec![1.0; 3]);
    }

    #[test]
    fn scalar_decomposition() {
        let dec = decompose(&m(&[&[2.]]), &tol()).unwrap();
        assert_eq!(dec.c, 0.5);
        assert_abs_diff_eq!(dec.g[(0, 0)], 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(reconstruct(&dec)[(0, 0)], 2.0, epsilon = 1e-15);
    }

    #[test]
    fn scaled_min_kernel_round_trips() {
        let d = [2.0, 1.0, 1.0];
        let g = min_kernel().diag_scale(&d, &d);
        let dec = decompose(&g, &tol()).unwrap();
        assert!(reconstruct(&dec).max_diff(&g) <= 1e-10);
    }

    #[test]
    fn signed_input_round_trips() {
        let s = Signature::from_signs(vec![-1, 1, -1]);
        let g = s.conjugate(&min_kernel());
        let dec = decompose(&g, &tol()).unwrap();
        assert!(!dec.signature.is_trivial());
        assert!(reconstruct(&dec).max_diff(&g) <= 1e-12);
    }

    #[test]
    fn detailed_balance_min_kernel() {
        let dec = decompose(&min_kernel(), &tol()).unwrap();
        assert_eq!(dec.mu_weights, vec![9., 25., 36.]);
        let lhs = dec.g[(0, 1)] * dec.mu_weights[0];
        let rhs = dec.g[(1, 0)] * dec.mu_weights[1];
        assert_abs_diff_eq!(lhs, rhs, epsilon = 1e-12);
        // g_sym = c Gp_ij / (u_i u_j)
        assert_abs_diff_eq!(dec.g_sym[(0, 1)], 2.0 / 15.0, epsilon = 1e-14);
    }

    #[test]
    fn unit_scaling_for_green_function() {
        let dec = decompose_with(
            &min_kernel(),
            &tol(),
            DecomposeOptions {
                scaling: Scaling::Unit,
                ..Default::default()
            },
        )
        .unwrap();
        let sums = dec.row_sums();
        assert!(sums.iter().all(|&s| s <= 1.0 + 1e-15));
        assert!(sums.iter().any(|&s| s < 1.0 - 1e-12));
        assert!(dec.g.max_diff(&min_kernel().scale(2.0)) < 1e-12);
    }

    #[test]
    fn unit_scaling_rejects_non_green() {
        let d = [1.0, 10.0, 1.0];
        let g = min_kernel().diag_scale(&d, &d);
        let opts = DecomposeOptions {
            scaling: Scaling::Unit,
            ..Default::default()
        };
        assert!(decompose_with(&g, &tol(), opts).is_err());
        assert!(decompose(&g, &tol()).is_ok());
    }

    #[test]
    fn not_id_is_reported() {
        let g = m(&[
            &[2., 2., 2., 1.],
            &[2., 12., 6., 3.],
            &[2., 6., 6., 2.],
            &[1., 3., 2., 4.],
        ]);
        assert!(matches!(decompose(&g, &tol()), Err(DecomposeError::NotId(_))));
    }

    #[test]
    fn c_margin_increases_killing() {
        let opts = DecomposeOptions {
            c_margin: 1.0,
            ..Default::default()
        };
        let dec = decompose_with(&min_kernel(), &tol(), opts).unwrap();
        assert_eq!(dec.c, 3.0);
        assert!(dec.reconstruction_error < 1e-12);
        assert_abs_diff_eq!(dec.kappa[0], 1.0 / 9.0, epsilon = 1e-14);
    }

    #[test]
    fn block_diagonal_components() {
        let g = m(&[&[1., 1., 0.], &[1., 2., 0.], &[0., 0., 3.]]);
        let dec = decompose(&g, &tol()).unwrap();
        assert_eq!(dec.signature.components.len(), 2);
        assert!(dec.reconstruction_error < 1e-12);
    }
}
