//! Dense square matrices and the handful of kernels the criteria need:
//! Cholesky certification, pivoted LU inversion, determinants, a bracketed
//! Perron-root estimate and entrywise sign tests.
//!
//! Every sign decision goes through an explicit threshold. Entries inside
//! `[-eps, eps]` are classified as zero.

use std::fmt;
use std::ops::{Index, IndexMut};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::LinalgError;

/// Numerical tolerances shared by every decision procedure.
///
/// `eps_zero` and `eps_psd` are relative: they are multiplied by the max-norm
/// (resp. the largest diagonal entry) of the matrix under test.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub eps_zero: f64,
    pub eps_psd: f64,
    pub sym_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            eps_zero: 1e-10,
            eps_psd: 1e-12,
            sym_tol: 1e-9,
        }
    }
}

impl Tolerances {
    pub fn new(eps_zero: f64, eps_psd: f64, sym_tol: f64) -> Result<Self, LinalgError> {
        let tol = Self {
            eps_zero,
            eps_psd,
            sym_tol,
        };
        tol.validate()?;
        Ok(tol)
    }

    pub fn validate(&self) -> Result<(), LinalgError> {
        let ok = |x: f64| x.is_finite() && x > 0.0;
        if !(ok(self.eps_zero) && ok(self.eps_psd) && ok(self.sym_tol)) || self.eps_zero >= 1.0 {
            return Err(LinalgError::InvalidTolerances);
        }
        Ok(())
    }

    /// Same tolerances with `eps_zero` multiplied by `factor`.
    pub fn scaled_zero(&self, factor: f64) -> Self {
        Self {
            eps_zero: (self.eps_zero * factor).min(0.5),
            ..*self
        }
    }

    /// Absolute zero threshold for entries of `m`.
    pub fn zero_threshold(&self, m: &Matrix) -> f64 {
        self.eps_zero * m.max_abs().max(f64::MIN_POSITIVE)
    }
}

/// Three-valued sign under a zero threshold.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

impl Sign {
    pub fn classify(x: f64, eps: f64) -> Self {
        if x > eps {
            Sign::Positive
        } else if x < -eps {
            Sign::Negative
        } else {
            Sign::Zero
        }
    }
}

/// Dense square matrix, row-major.
#[derive(Clone, Default, PartialEq)]
pub struct Matrix {
    n: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_diag(d: &[f64]) -> Self {
        let mut m = Self::zeros(d.len());
        for (i, &x) in d.iter().enumerate() {
            m[(i, i)] = x;
        }
        m
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Self { n, data }
    }

    /// Builds a matrix from rows; fails unless the rows form a square of
    /// finite values.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self, LinalgError> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != n {
                return Err(LinalgError::NotSquare {
                    row: i,
                    len: row.len(),
                    expected: n,
                });
            }
            if let Some(j) = row.iter().position(|x| !x.is_finite()) {
                return Err(LinalgError::NonFinite { i, j });
            }
            data.extend_from_slice(row);
        }
        Ok(Self { n, data })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks(self.n.max(1)).take(self.n)
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.rows().map(<[f64]>::to_vec).collect()
    }

    pub fn diag(&self) -> Vec<f64> {
        (0..self.n).map(|i| self[(i, i)]).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n, |i, j| self[(j, i)])
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    pub fn is_symmetric(&self, sym_tol: f64) -> bool {
        self.symmetry_violation(sym_tol).is_none()
    }

    /// First pair `(i, j)` breaking `|a_ij - a_ji| <= sym_tol * max(1, |a_ij|)`.
    pub fn symmetry_violation(&self, sym_tol: f64) -> Option<(usize, usize)> {
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                let (a, b) = (self[(i, j)], self[(j, i)]);
                if (a - b).abs() > sym_tol * a.abs().max(1.0) {
                    return Some((i, j));
                }
            }
        }
        None
    }

    pub fn row_sums(&self) -> Vec<f64> {
        self.rows().map(|r| r.iter().sum()).collect()
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.n, other.n, "dimension mismatch");
        let n = self.n;
        let mut out = Matrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                let orow = other.row(k);
                let dst = &mut out.data[i * n..(i + 1) * n];
                for (d, &b) in dst.iter_mut().zip(orow) {
                    *d += a * b;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(self.n, x.len(), "dimension mismatch");
        self.rows().map(|r| r.iter().zip(x).map(|(a, b)| a * b).sum()).collect()
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.n, other.n, "dimension mismatch");
        Matrix {
            n: self.n,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn scale(&self, s: f64) -> Matrix {
        self.map(|x| x * s)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Matrix {
        Matrix {
            n: self.n,
            data: self.data.iter().map(|&x| f(x)).collect(),
        }
    }

    /// `diag(left) * self * diag(right)`.
    pub fn diag_scale(&self, left: &[f64], right: &[f64]) -> Matrix {
        Matrix::from_fn(self.n, |i, j| left[i] * self[(i, j)] * right[j])
    }

    /// Max-norm of `self - other`.
    pub fn max_diff(&self, other: &Matrix) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    pub fn symmetrize(&self) -> Matrix {
        Matrix::from_fn(self.n, |i, j| 0.5 * (self[(i, j)] + self[(j, i)]))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.n + j]
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.n, self.n)?;
        for r in self.rows() {
            writeln!(f, "  {r:?}")?;
        }
        write!(f, "]")
    }
}

#[derive(Serialize, Deserialize)]
struct MatrixRepr {
    n: usize,
    entries: Vec<Vec<f64>>,
}

impl Serialize for Matrix {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        MatrixRepr {
            n: self.n,
            entries: self.to_rows(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Matrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let repr = MatrixRepr::deserialize(d)?;
        if repr.entries.len() != repr.n {
            return Err(serde::de::Error::custom(format!(
                "declared n = {} but {} rows given",
                repr.n,
                repr.entries.len()
            )));
        }
        Matrix::from_rows(&repr.entries).map_err(serde::de::Error::custom)
    }
}

/// Lower-triangular Cholesky factor `L` with `L Lᵀ = G`.
#[derive(Clone, Debug)]
pub struct Cholesky {
    l: Matrix,
}

impl Cholesky {
    pub fn factor(&self) -> &Matrix {
        &self.l
    }

    /// `L x` for a vector `x`, skipping the zero upper triangle.
    pub fn lower_mul(&self, x: &[f64], out: &mut [f64]) {
        let n = self.l.n;
        for i in 0..n {
            let row = &self.l.data[i * n..i * n + i + 1];
            out[i] = row.iter().zip(x).map(|(a, b)| a * b).sum();
        }
    }

    pub fn log_det(&self) -> f64 {
        2.0 * self.l.diag().iter().map(|d| d.ln()).sum::<f64>()
    }
}

/// Cholesky factorization; success certifies positive definiteness.
///
/// A pivot at or below `eps_psd * max_i G_ii` is reported as
/// `NotPositiveDefinite`.
pub fn cholesky(g: &Matrix, tol: &Tolerances) -> Result<Cholesky, LinalgError> {
    if let Some((i, j)) = g.symmetry_violation(tol.sym_tol) {
        return Err(LinalgError::NotSymmetric { i, j });
    }
    let n = g.n;
    let scale = g.diag().iter().fold(0.0f64, |m, &d| m.max(d.abs()));
    let floor = tol.eps_psd * scale.max(f64::MIN_POSITIVE);
    let mut l = Matrix::zeros(n);
    for j in 0..n {
        let mut d = g[(j, j)];
        for k in 0..j {
            d -= l[(j, k)] * l[(j, k)];
        }
        if !(d > floor) {
            return Err(LinalgError::NotPositiveDefinite { pivot: j });
        }
        let d = d.sqrt();
        l[(j, j)] = d;
        for i in (j + 1)..n {
            let mut s = g[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = s / d;
        }
    }
    Ok(Cholesky { l })
}

/// LU factorization with partial pivoting, `P A = L U` packed in one matrix.
#[derive(Clone, Debug)]
pub struct Lu {
    lu: Matrix,
    perm: Vec<usize>,
    sign: f64,
}

impl Lu {
    pub fn det(&self) -> f64 {
        self.sign * self.lu.diag().iter().product::<f64>()
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.lu.n;
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let mut s = x[i];
            for k in 0..i {
                s -= self.lu[(i, k)] * x[k];
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for k in (i + 1)..n {
                s -= self.lu[(i, k)] * x[k];
            }
            x[i] = s / self.lu[(i, i)];
        }
        x
    }

    pub fn inverse(&self) -> Matrix {
        let n = self.lu.n;
        let mut inv = Matrix::zeros(n);
        let mut e = vec![0.0; n];
        for j in 0..n {
            e.iter_mut().for_each(|x| *x = 0.0);
            e[j] = 1.0;
            let col = self.solve(&e);
            for i in 0..n {
                inv[(i, j)] = col[i];
            }
        }
        inv
    }
}

/// Partially pivoted LU. A pivot with `|p| <= eps_psd * ‖A‖_max` is singular.
pub fn lu(a: &Matrix, eps_psd: f64) -> Result<Lu, LinalgError> {
    let n = a.n;
    let floor = eps_psd * a.max_abs().max(f64::MIN_POSITIVE);
    let mut lu = a.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut sign = 1.0;
    for k in 0..n {
        let (p, pmax) = (k..n)
            .map(|i| (i, lu[(i, k)].abs()))
            .fold((k, -1.0), |best, c| if c.1 > best.1 { c } else { best });
        if !(pmax > floor) {
            return Err(LinalgError::Singular { index: k });
        }
        if p != k {
            for j in 0..n {
                lu.data.swap(k * n + j, p * n + j);
            }
            perm.swap(k, p);
            sign = -sign;
        }
        let pivot = lu[(k, k)];
        for i in (k + 1)..n {
            let f = lu[(i, k)] / pivot;
            lu[(i, k)] = f;
            if f != 0.0 {
                for j in (k + 1)..n {
                    lu.data[i * n + j] -= f * lu.data[k * n + j];
                }
            }
        }
    }
    Ok(Lu { lu, perm, sign })
}

/// Default bound for `‖A M - I‖_max`: `1e-10 * max(1, κ₁(A))`.
pub fn default_inverse_tolerance(a: &Matrix, inv: &Matrix) -> f64 {
    1e-10 * (norm_1(a) * norm_1(inv)).max(1.0)
}

fn norm_1(a: &Matrix) -> f64 {
    (0..a.n)
        .map(|j| (0..a.n).map(|i| a[(i, j)].abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Inverse via pivoted LU, with a residual check against
/// [`default_inverse_tolerance`].
pub fn invert(a: &Matrix, tol: &Tolerances) -> Result<Matrix, LinalgError> {
    let inv = lu(a, tol.eps_psd)?.inverse();
    if !inv.is_finite() {
        return Err(LinalgError::Singular {
            index: a.n.saturating_sub(1),
        });
    }
    let residual = a.mul(&inv).max_diff(&Matrix::identity(a.n));
    let bound = default_inverse_tolerance(a, &inv);
    if residual > bound {
        return Err(LinalgError::InaccurateInverse { residual, bound });
    }
    Ok(inv)
}

/// Determinant via LU; returns 0 for numerically singular input.
pub fn det(a: &Matrix) -> f64 {
    if a.n == 0 {
        return 1.0;
    }
    match lu(a, f64::MIN_POSITIVE) {
        Ok(f) => f.det(),
        Err(_) => 0.0,
    }
}

/// Bracketed estimate of the spectral radius of `|B|`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralRadius {
    pub estimate: f64,
    /// Collatz–Wielandt lower bound.
    pub lower: f64,
    /// min(Collatz–Wielandt upper bound, Gershgorin bound).
    pub upper: f64,
    /// Max row sum of `|B|`.
    pub gershgorin: f64,
    pub iterations: usize,
}

/// Power iteration on `|B| + I`, reading off Collatz–Wielandt ratios of `|B|`.
///
/// The shift keeps the iterate strictly positive and removes the oscillation
/// of bipartite patterns; stopping happens when the Rayleigh increment or the
/// bracket width falls below `tol`.
pub fn spectral_radius(b: &Matrix, iters: usize, tol: f64) -> Result<SpectralRadius, LinalgError> {
    if !b.is_finite() {
        return Err(LinalgError::NonFinite { i: 0, j: 0 });
    }
    let n = b.n;
    let abs = b.map(f64::abs);
    let gershgorin = abs.row_sums().into_iter().fold(0.0, f64::max);
    if n == 0 || gershgorin == 0.0 {
        return Ok(SpectralRadius {
            estimate: 0.0,
            lower: 0.0,
            upper: 0.0,
            gershgorin,
            iterations: 0,
        });
    }

    let mut x = vec![1.0 / (n as f64).sqrt(); n];
    let mut lower = 0.0f64;
    let mut upper = gershgorin;
    let mut prev = f64::NAN;
    for it in 1..=iters {
        let bx = abs.mul_vec(&x);
        let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
        for (y, xi) in bx.iter().zip(&x) {
            let r = y / xi;
            lo = lo.min(r);
            hi = hi.max(r);
        }
        lower = lower.max(lo);
        upper = upper.min(hi);
        let rayleigh: f64 = bx.iter().zip(&x).map(|(a, b)| a * b).sum::<f64>() / x.iter().map(|v| v * v).sum::<f64>();

        let scale = rayleigh.abs().max(1.0);
        if upper - lower <= tol * scale || (rayleigh - prev).abs() <= tol * scale {
            return Ok(SpectralRadius {
                estimate: rayleigh.clamp(lower, upper),
                lower,
                upper,
                gershgorin,
                iterations: it,
            });
        }
        prev = rayleigh;

        let mut next: Vec<f64> = bx.iter().zip(&x).map(|(y, xi)| y + xi).collect();
        let norm = next.iter().map(|v| v * v).sum::<f64>().sqrt();
        next.iter_mut().for_each(|v| *v /= norm);
        x = next;
    }
    Err(LinalgError::NoConvergence { iters, gershgorin })
}

/// Smallest entry of a matrix and where it sits.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WorstEntry {
    pub i: usize,
    pub j: usize,
    pub value: f64,
}

/// True iff every entry is `>= -eps_zero` (absolute threshold).
pub fn is_nonneg(a: &Matrix, eps_zero: f64) -> (bool, Option<WorstEntry>) {
    let worst = min_entry(a);
    let ok = worst.is_none_or(|w| w.value >= -eps_zero);
    (ok, worst)
}

pub fn min_entry(a: &Matrix) -> Option<WorstEntry> {
    let mut worst: Option<WorstEntry> = None;
    for i in 0..a.n {
        for j in 0..a.n {
            let v = a[(i, j)];
            if worst.is_none_or(|w| v < w.value) {
                worst = Some(WorstEntry { i, j, value: v });
            }
        }
    }
    worst
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

    #[test]
    fn cholesky_identity_is_identity() {
        let c = cholesky(&Matrix::identity(3), &Tolerances::default()).unwrap();
        assert_eq!(c.factor(), &Matrix::identity(3));
    }

    #[test]
    fn cholesky_reconstructs_min_kernel() {
        let g = min_kernel();
        let c = cholesky(&g, &Tolerances::default()).unwrap();
        let l = c.factor();
        assert!(l.mul(&l.transpose()).max_diff(&g) <= 1e-12);
    }

    #[test]
    fn cholesky_rejects_singular() {
        let g = m(&[&[1., 0.5, -0.5], &[0.5, 1., 0.5], &[-0.5, 0.5, 1.]]);
        assert!(matches!(
            cholesky(&g, &Tolerances::default()),
            Err(LinalgError::NotPositiveDefinite { pivot: 2 })
        ));
    }

    #[test]
    fn cholesky_rejects_asymmetric() {
        let g = m(&[&[1., 0.5], &[0.2, 1.]]);
        assert!(matches!(
            cholesky(&g, &Tolerances::default()),
            Err(LinalgError::NotSymmetric { .. })
        ));
    }

    #[test]
    fn invert_examples() {
        let tol = Tolerances::default();
        assert_eq!(invert(&Matrix::identity(3), &tol).unwrap(), Matrix::identity(3));
        let inv = invert(&min_kernel(), &tol).unwrap();
        let expected = m(&[&[2., -1., 0.], &[-1., 2., -1.], &[0., -1., 1.]]);
        assert!(inv.max_diff(&expected) < 1e-12);
        let inv = invert(&m(&[&[2.]]), &tol).unwrap();
        assert_eq!(inv[(0, 0)], 0.5);
    }

    #[test]
    fn invert_reports_singular() {
        let a = m(&[&[1., 2.], &[2., 4.]]);
        assert!(matches!(
            invert(&a, &Tolerances::default()),
            Err(LinalgError::Singular { .. })
        ));
    }

    #[test]
    fn spectral_radius_examples() {
        let z = spectral_radius(&Matrix::zeros(3), 100, 1e-12).unwrap();
        assert_eq!(z.estimate, 0.0);

        // Largest root of λ³ − λ² − 2λ + 1 (sympy nroots).
        let b = m(&[&[0., 1., 0.], &[1., 0., 1.], &[0., 1., 1.]]);
        let r = spectral_radius(&b, 10_000, 1e-13).unwrap();
        assert_abs_diff_eq!(r.estimate, 1.8019377358048383, epsilon = 1e-9);
        assert!(r.lower <= 1.8019377358048383 + 1e-12);
        assert!(r.upper >= 1.8019377358048383 - 1e-12);
        assert!(r.upper <= r.gershgorin);

        let b = m(&[&[0., 0.5], &[0.5, 0.]]);
        let r = spectral_radius(&b, 1000, 1e-13).unwrap();
        assert_abs_diff_eq!(r.estimate, 0.5, epsilon = 1e-12);
    }

    #[test]
    fn spectral_radius_reducible_diagonal() {
        let b = Matrix::from_diag(&[0.5, 0.1]);
        let r = spectral_radius(&b, 10_000, 1e-14).unwrap();
        assert_abs_diff_eq!(r.estimate, 0.5, epsilon = 1e-8);
        assert!(r.upper >= 0.5);
    }

    #[test]
    fn spectral_radius_no_convergence_reports_gershgorin() {
        let b = m(&[&[0., 1., 0.], &[1., 0., 1.], &[0., 1., 1.]]);
        match spectral_radius(&b, 2, 1e-16) {
            Err(LinalgError::NoConvergence { gershgorin, .. }) => assert_eq!(gershgorin, 2.0),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn nonneg_examples() {
        assert!(is_nonneg(&Matrix::identity(2), 1e-12).0);
        let (ok, w) = is_nonneg(&m(&[&[2., -1.], &[-1., 2.]]), 1e-12);
        assert!(!ok);
        let w = w.unwrap();
        assert_eq!((w.i, w.j, w.value), (0, 1, -1.0));
        assert!(is_nonneg(&m(&[&[-1e-14, 1.], &[1., 1.]]), 1e-12).0);
    }

    #[test]
    fn sign_is_three_valued() {
        assert_eq!(Sign::classify(1e-13, 1e-12), Sign::Zero);
        assert_eq!(Sign::classify(-1e-13, 1e-12), Sign::Zero);
        assert_eq!(Sign::classify(2e-12, 1e-12), Sign::Positive);
        assert_eq!(Sign::classify(-2e-12, 1e-12), Sign::Negative);
    }

    #[test]
    fn tolerances_validate() {
        assert!(Tolerances::new(1e-10, 1e-12, 1e-9).is_ok());
        assert!(Tolerances::new(0.0, 1e-12, 1e-9).is_err());
        assert!(Tolerances::new(1.5, 1e-12, 1e-9).is_err());
    }

    #[test]
    fn json_shape() {
        let s = serde_json::to_string(&m(&[&[1., 2.], &[3., 4.]])).unwrap();
        assert_eq!(s, r#"{"n":2,"entries":[[1.0,2.0],[3.0,4.0]]}"#);
        assert!(serde_json::from_str::<Matrix>(r#"{"n":2,"entries":[[1.0,2.0]]}"#).is_err());
        assert!(serde_json::from_str::<Matrix>(r#"{"n":2,"entries":[[1.0,2.0],[3.0]]}"#).is_err());
    }

    #[test]
    fn det_of_3x3() {
        let g = m(&[&[1., 0.4, -0.4], &[0.4, 1., 0.4], &[-0.4, 0.4, 1.]]);
        assert_abs_diff_eq!(det(&g), 0.392, epsilon = 1e-14);
    }
}
