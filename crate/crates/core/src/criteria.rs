//! Infinite-divisibility criteria for squared centered Gaussian vectors.
//!
//! A positive definite covariance `G` has an infinitely divisible square iff
//! some signature `S` makes `S G⁻¹ S` an M-matrix. It is the Green function
//! of a transient chain iff `G⁻¹` itself is an M-matrix whose row sums are all
//! nonnegative.
//!
//! Signatures are found by propagating signs along nonzero covariances:
//! whenever `S G⁻¹ S` is an M-matrix, its inverse `S G S` is entrywise
//! nonnegative, so `s_i s_j = sign(G_ij)` on every nonzero entry. That fixes
//! `S` on each connected component up to a global flip, and what is left is
//! a plain M-matrix test.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::LinalgError;
use crate::matrix::{self, cholesky, invert, Matrix, Sign, SpectralRadius, Tolerances};

const POWER_ITERS: usize = 10_000;
const POWER_TOL: f64 = 1e-12;

/// Diagonal of a signature matrix, together with the connected components
/// (through nonzero covariances) on which a global flip is free.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Signature {
    pub signs: Vec<i8>,
    pub components: Vec<Vec<usize>>,
}

impl Signature {
    pub fn trivial(n: usize) -> Self {
        Self {
            signs: vec![1; n],
            components: (0..n).map(|i| vec![i]).collect(),
        }
    }

    pub fn from_signs(signs: Vec<i8>) -> Self {
        assert!(signs.iter().all(|&s| s == 1 || s == -1), "signs must be ±1");
        let n = signs.len();
        Self {
            signs,
            components: vec![(0..n).collect()],
        }
    }

    pub fn len(&self) -> usize {
        self.signs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.signs.is_empty()
    }

    pub fn is_trivial(&self) -> bool {
        self.signs.iter().all(|&s| s == 1)
    }

    /// `S M S`.
    pub fn conjugate(&self, m: &Matrix) -> Matrix {
        let s: Vec<f64> = self.signs.iter().map(|&x| f64::from(x)).collect();
        m.diag_scale(&s, &s)
    }

    /// Same signature with every sign in component `k` flipped.
    pub fn flip_component(&self, k: usize) -> Self {
        let mut out = self.clone();
        for &i in &self.components[k] {
            out.signs[i] = -out.signs[i];
        }
        out
    }
}

/// Why a matrix failed the M-matrix test.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MMatrixFailure {
    OffDiagonalPositive { i: usize, j: usize, value: f64 },
    Singular { detail: String },
    InverseNegative { i: usize, j: usize, value: f64 },
    SpectralRadius { upper: f64, c: f64 },
}

/// Certificate that `A = c I - B` is a nonsingular M-matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MMatrixCert {
    pub c: f64,
    pub b: Matrix,
    pub rho_b: SpectralRadius,
    /// Minimum entry of `A⁻¹`.
    pub inv_nonneg_witness: f64,
    /// Largest off-diagonal entry of `A`.
    pub max_offdiag: f64,
    #[serde(skip)]
    pub inverse: Matrix,
}

/// Certifies that `a` is a nonsingular M-matrix, with `c = max_i A_ii`.
pub fn is_m_matrix(a: &Matrix, tol: &Tolerances) -> Result<MMatrixCert, MMatrixFailure> {
    let n = a.n();
    let eps_a = tol.zero_threshold(a);

    let mut max_offdiag = f64::NEG_INFINITY;
    let mut worst = None;
    for i in 0..n {
        for j in 0..n {
            if i != j && a[(i, j)] > max_offdiag {
                max_offdiag = a[(i, j)];
                worst = Some((i, j));
            }
        }
    }
    if let Some((i, j)) = worst {
        if Sign::classify(max_offdiag, eps_a) == Sign::Positive {
            return Err(MMatrixFailure::OffDiagonalPositive {
                i,
                j,
                value: max_offdiag,
            });
        }
    }

    let inverse = invert(a, tol).map_err(|e| MMatrixFailure::Singular { detail: e.to_string() })?;
    let eps_inv = tol.zero_threshold(&inverse);
    let min = matrix::min_entry(&inverse);
    if let Some(w) = min {
        if Sign::classify(w.value, eps_inv) == Sign::Negative {
            return Err(MMatrixFailure::InverseNegative {
                i: w.i,
                j: w.j,
                value: w.value,
            });
        }
    }

    let c = a.diag().into_iter().fold(f64::NEG_INFINITY, f64::max);
    let b = Matrix::identity(n).scale(c).sub(a);
    let mut rho_b = match matrix::spectral_radius(&b, POWER_ITERS, POWER_TOL) {
        Ok(r) => r,
        Err(LinalgError::NoConvergence { iters, gershgorin }) => SpectralRadius {
            estimate: gershgorin,
            lower: 0.0,
            upper: gershgorin,
            gershgorin,
            iterations: iters,
        },
        Err(e) => return Err(MMatrixFailure::Singular { detail: e.to_string() }),
    };
    // Collatz–Wielandt with x = A⁻¹𝟙 > 0: (Bx)_i / x_i = c - 1/x_i.
    let x = inverse.row_sums();
    if x.iter().all(|&v| v > 0.0) {
        let xmax = x.iter().copied().fold(0.0, f64::max);
        rho_b.upper = rho_b.upper.min(c - 1.0 / xmax);
        rho_b.estimate = rho_b.estimate.min(rho_b.upper);
        rho_b.lower = rho_b.lower.min(rho_b.upper);
    }
    if n > 0 && !(rho_b.upper < c) {
        return Err(MMatrixFailure::SpectralRadius { upper: rho_b.upper, c });
    }

    Ok(MMatrixCert {
        c: if n == 0 { 0.0 } else { c },
        b,
        rho_b,
        inv_nonneg_witness: min.map_or(0.0, |w| w.value),
        max_offdiag: if n > 1 { max_offdiag } else { 0.0 },
        inverse,
    })
}

/// Why no signature can turn `G⁻¹` into an M-matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SignatureWitness {
    /// Closed walk through nonzero covariances whose sign product is
    /// negative: `S G S >= 0` is impossible.
    CycleContradiction { path: Vec<usize> },
    /// Off-diagonal of `S G⁻¹ S` that stays positive for every admissible `S`.
    EntryWitness { i: usize, j: usize, value: f64 },
}

/// Finds `S` with `S G⁻¹ S` off-diagonals `<= eps` and `S G S >= -eps`, or a
/// witness that none exists.
pub fn find_signature(g: &Matrix, tol: &Tolerances) -> Result<Signature, SignatureSearch> {
    let a = invert(g, tol).map_err(SignatureSearch::Linalg)?;
    find_signature_with_inverse(g, &a, tol).map_err(SignatureSearch::NoSignature)
}

#[derive(Clone, Debug, PartialEq)]
pub enum SignatureSearch {
    NoSignature(SignatureWitness),
    Linalg(LinalgError),
}

/// Same as [`find_signature`] with a precomputed `a = G⁻¹`.
pub fn find_signature_with_inverse(g: &Matrix, a: &Matrix, tol: &Tolerances) -> Result<Signature, SignatureWitness> {
    let n = g.n();
    let eps_g = tol.zero_threshold(g);
    let eps_a = tol.zero_threshold(a);
    let g_sign = |i: usize, j: usize| Sign::classify(g[(i, j)], eps_g);

    let mut signs = vec![0i8; n];
    let mut comp = vec![usize::MAX; n];
    let mut parent = vec![usize::MAX; n];
    let mut components: Vec<Vec<usize>> = Vec::new();

    for root in 0..n {
        if comp[root] != usize::MAX {
            continue;
        }
        let id = components.len();
        let mut members = vec![root];
        signs[root] = 1;
        comp[root] = id;
        let mut queue = VecDeque::from([root]);
        while let Some(i) = queue.pop_front() {
            for j in 0..n {
                if j == i || comp[j] != usize::MAX {
                    continue;
                }
                let s = match g_sign(i, j) {
                    Sign::Zero => continue,
                    Sign::Positive => 1,
                    Sign::Negative => -1,
                };
                signs[j] = signs[i] * s;
                comp[j] = id;
                parent[j] = i;
                members.push(j);
                queue.push_back(j);
            }
        }
        members.sort_unstable();
        components.push(members);
    }

    // Every nonzero covariance must agree with the propagated signs.
    for i in 0..n {
        for j in (i + 1)..n {
            let s = match g_sign(i, j) {
                Sign::Zero => continue,
                Sign::Positive => 1,
                Sign::Negative => -1,
            };
            if signs[i] * signs[j] != s {
                return Err(SignatureWitness::CycleContradiction {
                    path: tree_cycle(&parent, i, j),
                });
            }
        }
    }

    // Nonzero entries of G⁻¹ across components (possible only at the edge of
    // the tolerance) fix the relative flip of those components.
    let mut uf = ParityUnionFind::new(components.len());
    for i in 0..n {
        for j in (i + 1)..n {
            if comp[i] == comp[j] {
                continue;
            }
            let need = match Sign::classify(a[(i, j)], eps_a) {
                Sign::Zero => continue,
                // S A S off-diagonal must be <= 0: s_i s_j = -sign(A_ij).
                Sign::Positive => -1,
                Sign::Negative => 1,
            };
            let rel = need * signs[i] * signs[j];
            if !uf.union(comp[i], comp[j], rel) {
                return Err(SignatureWitness::EntryWitness {
                    i,
                    j,
                    value: a[(i, j)] * f64::from(need),
                });
            }
        }
    }
    for i in 0..n {
        signs[i] *= uf.parity(comp[i]);
    }

    // Merge linked components and normalise so the smallest index is +1.
    let mut merged: Vec<Vec<usize>> = Vec::new();
    let mut root_slot = vec![usize::MAX; components.len()];
    for (k, members) in components.iter().enumerate() {
        let r = uf.find(k).0;
        if root_slot[r] == usize::MAX {
            root_slot[r] = merged.len();
            merged.push(Vec::new());
        }
        merged[root_slot[r]].extend_from_slice(members);
    }
    for members in &mut merged {
        members.sort_unstable();
        if signs[members[0]] == -1 {
            members.iter().for_each(|&i| signs[i] = -signs[i]);
        }
    }
    merged.sort_by_key(|m| m[0]);

    let sig = Signature {
        signs,
        components: merged,
    };

    let sas = sig.conjugate(a);
    let mut worst: Option<(usize, usize, f64)> = None;
    for i in 0..n {
        for j in 0..n {
            if i != j && Sign::classify(sas[(i, j)], eps_a) == Sign::Positive && worst.is_none_or(|w| sas[(i, j)] > w.2)
            {
                worst = Some((i, j, sas[(i, j)]));
            }
        }
    }
    if let Some((i, j, value)) = worst {
        let (i, j) = (i.min(j), i.max(j));
        return Err(SignatureWitness::EntryWitness { i, j, value });
    }
    Ok(sig)
}

/// Cycle closing tree edge path `i -> ... -> lca -> ... -> j` with edge `(j, i)`.
fn tree_cycle(parent: &[usize], i: usize, j: usize) -> Vec<usize> {
    let ancestors = |mut v: usize| {
        let mut out = vec![v];
        while parent[v] != usize::MAX {
            v = parent[v];
            out.push(v);
        }
        out
    };
    let up_i = ancestors(i);
    let up_j = ancestors(j);
    let lca = *up_i.iter().find(|v| up_j.contains(v)).expect("same component");
    let mut path: Vec<usize> = up_i.iter().copied().take_while(|&v| v != lca).collect();
    path.push(lca);
    let back: Vec<usize> = up_j.iter().copied().take_while(|&v| v != lca).collect();
    path.extend(back.into_iter().rev());
    path
}

struct ParityUnionFind {
    parent: Vec<usize>,
    // parity relative to parent: +1 same flip, -1 opposite
    rel: Vec<i8>,
}

impl ParityUnionFind {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            rel: vec![1; n],
        }
    }

    fn find(&mut self, x: usize) -> (usize, i8) {
        if self.parent[x] == x {
            return (x, 1);
        }
        let (root, p) = self.find(self.parent[x]);
        self.parent[x] = root;
        self.rel[x] *= p;
        (root, self.rel[x])
    }

    fn parity(&mut self, x: usize) -> i8 {
        self.find(x).1
    }

    /// Requires flip(x) * flip(y) == rel; false on contradiction.
    fn union(&mut self, x: usize, y: usize, rel: i8) -> bool {
        let (rx, px) = self.find(x);
        let (ry, py) = self.find(y);
        if rx == ry {
            return px * py == rel;
        }
        self.parent[ry] = rx;
        self.rel[ry] = px * py * rel;
        true
    }
}

/// Outcome of the infinite-divisibility test.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum IdVerdict {
    Id { signature: Signature, cert: MMatrixCert },
    NotId { witness: NotIdWitness },
}

impl IdVerdict {
    pub fn is_id(&self) -> bool {
        matches!(self, IdVerdict::Id { .. })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case")]
pub enum NotIdWitness {
    Signature { witness: SignatureWitness },
    MMatrix { failure: MMatrixFailure },
}

impl std::fmt::Display for NotIdWitness {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            NotIdWitness::Signature {
                witness: SignatureWitness::CycleContradiction { path },
            } => write!(f, "covariance sign cycle {path:?} has negative product"),
            NotIdWitness::Signature {
                witness: SignatureWitness::EntryWitness { i, j, value },
            } => write!(f, "(S G⁻¹ S)[{i},{j}] = {value:e} > 0 for every admissible S"),
            NotIdWitness::MMatrix { failure } => write!(f, "M-matrix test failed: {failure:?}"),
        }
    }
}

/// Decides whether the square of a centered Gaussian vector with covariance
/// `g` is infinitely divisible.
pub fn is_id_square(g: &Matrix, tol: &Tolerances) -> Result<IdVerdict, LinalgError> {
    cholesky(g, tol)?;
    let a = invert(g, tol)?;
    let signature = match find_signature_with_inverse(g, &a, tol) {
        Ok(s) => s,
        Err(witness) => {
            return Ok(IdVerdict::NotId {
                witness: NotIdWitness::Signature { witness },
            })
        }
    };
    match is_m_matrix(&signature.conjugate(&a), tol) {
        Ok(cert) => Ok(IdVerdict::Id { signature, cert }),
        Err(failure) => Ok(IdVerdict::NotId {
            witness: NotIdWitness::MMatrix { failure },
        }),
    }
}

/// Necessary condition for 3×3 covariances: `G₁₂ G₂₃ G₃₁ >= 0`.
pub fn triple_necessary(g: &Matrix, tol: &Tolerances) -> bool {
    assert_eq!(g.n(), 3, "triple test needs a 3x3 matrix");
    let scale = g.max_abs();
    g[(0, 1)] * g[(1, 2)] * g[(2, 0)] >= -tol.eps_zero * scale * scale * scale
}

/// Sufficient condition for nonnegative 3×3 covariances:
/// `g(i,j) g(k,k) >= g(i,k) g(j,k)` for all distinct `i, j, k`.
pub fn triple_sufficient(g: &Matrix, tol: &Tolerances) -> bool {
    assert_eq!(g.n(), 3, "triple test needs a 3x3 matrix");
    let eps = tol.zero_threshold(g);
    if !matrix::is_nonneg(g, eps).0 {
        return false;
    }
    let slack = eps * g.max_abs();
    for i in 0..3 {
        for j in 0..3 {
            for k in 0..3 {
                if i == j || j == k || i == k {
                    continue;
                }
                if g[(i, j)] * g[(k, k)] < g[(i, k)] * g[(j, k)] - slack {
                    return false;
                }
            }
        }
    }
    true
}

/// Row sums of `a` and whether all are `>= -eps_zero` (absolute).
pub fn is_diag_dominant(a: &Matrix, eps_zero: f64) -> (bool, Vec<f64>) {
    let sums = a.row_sums();
    (sums.iter().all(|&s| s >= -eps_zero), sums)
}

/// Green-function classification of a positive definite covariance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "class", rename_all = "snake_case")]
pub enum GreenClass {
    GreenFunction {
        cert: MMatrixCert,
        row_sums: Vec<f64>,
    },
    IdNotGreen {
        signature: Signature,
        cert: MMatrixCert,
        row_sums: Vec<f64>,
        reason: IdNotGreenReason,
    },
    NotId {
        witness: NotIdWitness,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IdNotGreenReason {
    NontrivialSignature,
    NotDiagonallyDominant,
}

impl GreenClass {
    pub fn label(&self) -> &'static str {
        match self {
            GreenClass::GreenFunction { .. } => "green",
            GreenClass::IdNotGreen { .. } => "id_not_green",
            GreenClass::NotId { .. } => "not_id",
        }
    }

    pub fn is_id(&self) -> bool {
        !matches!(self, GreenClass::NotId { .. })
    }
}

/// Green function iff `G⁻¹` is an M-matrix (trivial signature) with
/// nonnegative row sums.
pub fn classify_green(g: &Matrix, tol: &Tolerances) -> Result<GreenClass, LinalgError> {
    match is_id_square(g, tol)? {
        IdVerdict::NotId { witness } => Ok(GreenClass::NotId { witness }),
        IdVerdict::Id { signature, cert } => {
            let sas = Matrix::identity(g.n()).scale(cert.c).sub(&cert.b);
            if !signature.is_trivial() {
                let row_sums = sas.row_sums();
                return Ok(GreenClass::IdNotGreen {
                    signature,
                    cert,
                    row_sums,
                    reason: IdNotGreenReason::NontrivialSignature,
                });
            }
            let (dominant, row_sums) = is_diag_dominant(&sas, tol.zero_threshold(&sas));
            if dominant {
                Ok(GreenClass::GreenFunction { cert, row_sums })
            } else {
                Ok(GreenClass::IdNotGreen {
                    signature,
                    cert,
                    row_sums,
                    reason: IdNotGreenReason::NotDiagonallyDominant,
                })
            }
        }
    }
}

/// Classification plus a stability flag: `stable` is false when the label
/// changes with `eps_zero` scaled by 0.1 or 10.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub class: GreenClass,
    pub stable: bool,
    pub margins: Margins,
}

/// How far the deciding quantities sit from the zero threshold, relative to
/// the scale of the matrix they come from.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Margins {
    /// Largest off-diagonal of `S G⁻¹ S` over `‖G⁻¹‖_max` (nonpositive means Z-pattern).
    pub max_offdiag_rel: Option<f64>,
    /// Smallest entry of `S G S` over `‖G‖_max`.
    pub min_inverse_rel: Option<f64>,
    /// Smallest row sum of `G⁻¹` over `‖G⁻¹‖_max`.
    pub min_row_sum_rel: Option<f64>,
}

pub fn classify_with_stability(g: &Matrix, tol: &Tolerances) -> Result<Classification, LinalgError> {
    let class = classify_green(g, tol)?;
    let label = class.label();
    let stable = [0.1, 10.0].iter().all(|&f| {
        classify_green(g, &tol.scaled_zero(f))
            .map(|c| c.label() == label)
            .unwrap_or(false)
    });
    let margins = match &class {
        GreenClass::GreenFunction { cert, row_sums } | GreenClass::IdNotGreen { cert, row_sums, .. } => {
            let inv_scale = cert.inverse.max_abs().max(f64::MIN_POSITIVE);
            let sas_scale = cert.b.max_abs().max(cert.c.abs()).max(f64::MIN_POSITIVE);
            Margins {
                max_offdiag_rel: Some(cert.max_offdiag / sas_scale),
                min_inverse_rel: Some(cert.inv_nonneg_witness / inv_scale),
                min_row_sum_rel: Some(row_sums.iter().copied().fold(f64::INFINITY, f64::min) / sas_scale),
            }
        }
        GreenClass::NotId { .. } => Margins {
            max_offdiag_rel: None,
            min_inverse_rel: None,
            min_row_sum_rel: None,
        },
    };
    Ok(Classification { class, stable, margins })
}

#[cfg(test)]
mod tests {
    use super::*;

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
    fn m_matrix_tridiagonal() {
        let a = m(&[&[2., -1., 0.], &[-1., 2., -1.], &[0., -1., 1.]]);
        let cert = is_m_matrix(&a, &tol()).unwrap();
        assert_eq!(cert.c, 2.0);
        assert_eq!(cert.b, m(&[&[0., 1., 0.], &[1., 0., 1.], &[0., 1., 1.]]));
        assert!((cert.rho_b.estimate - 1.8019377358048383).abs() < 1e-9);
        assert!(cert.rho_b.upper < 2.0);
        assert!(cert.inverse.max_diff(&min_kernel()) < 1e-12);
        assert!(cert.inv_nonneg_witness >= 0.0);
    }

    #[test]
    fn m_matrix_identity_and_failure() {
        let cert = is_m_matrix(&Matrix::identity(3), &tol()).unwrap();
        assert_eq!(cert.c, 1.0);
        assert_eq!(cert.b, Matrix::zeros(3));
        let bad = is_m_matrix(&m(&[&[1., 0.5], &[0.5, 1.]]), &tol()).unwrap_err();
        assert!(matches!(bad, MMatrixFailure::OffDiagonalPositive { i: 0, j: 1, .. }));
    }

    #[test]
    fn m_matrix_inverse_negative() {
        // Z-pattern but not inverse-positive: eigenvalue 1 - 2 < 0.
        let a = m(&[&[1., -2.], &[-2., 1.]]);
        assert!(matches!(
            is_m_matrix(&a, &tol()),
            Err(MMatrixFailure::InverseNegative { .. })
        ));
    }

    #[test]
    fn signature_identity_is_free() {
        let s = find_signature(&Matrix::identity(3), &tol()).unwrap();
        assert_eq!(s.signs, vec![1, 1, 1]);
        assert_eq!(s.components.len(), 3);
    }

    #[test]
    fn signature_recovers_conjugation() {
        let s0 = Signature::from_signs(vec![1, -1, 1]);
        let g = s0.conjugate(&min_kernel());
        let s = find_signature(&g, &tol()).unwrap();
        let flipped: Vec<i8> = s0.signs.iter().map(|x| -x).collect();
        assert!(s.signs == s0.signs || s.signs == flipped);
        assert_eq!(s.components, vec![vec![0, 1, 2]]);
        assert!(matrix::is_nonneg(&s.conjugate(&g), 1e-12).0);
    }

    #[test]
    fn sheet_counterexample_entry_witness() {
        let g = m(&[
            &[2., 2., 2., 1.],
            &[2., 12., 6., 3.],
            &[2., 6., 6., 2.],
            &[1., 3., 2., 4.],
        ]);
        match find_signature(&g, &tol()) {
            Err(SignatureSearch::NoSignature(SignatureWitness::EntryWitness { i, j, value })) => {
                assert_eq!((i, j), (0, 1));
                assert!((value - 1.0 / 74.0).abs() < 1e-12);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn negative_triple_is_not_id() {
        let g = m(&[&[1., 0.4, -0.4], &[0.4, 1., 0.4], &[-0.4, 0.4, 1.]]);
        assert!(!triple_necessary(&g, &tol()));
        match is_id_square(&g, &tol()).unwrap() {
            IdVerdict::NotId {
                witness:
                    NotIdWitness::Signature {
                        witness: SignatureWitness::CycleContradiction { path },
                    },
            } => {
                let mut p = path.clone();
                p.sort_unstable();
                assert_eq!(p, vec![0, 1, 2]);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn id_examples() {
        assert!(is_id_square(&min_kernel(), &tol()).unwrap().is_id());
        let pts = [1.0f64, 2.0, 3.0, 4.0];
        let fbm = Matrix::from_fn(4, |i, j| {
            pts[i].powf(0.5) + pts[j].powf(0.5) - (pts[i] - pts[j]).abs().powf(0.5)
        });
        assert!(is_id_square(&fbm, &tol()).unwrap().is_id());
    }

    #[test]
    fn not_pd_propagates() {
        let g = m(&[&[1., 2.], &[2., 1.]]);
        assert!(matches!(
            is_id_square(&g, &tol()),
            Err(LinalgError::NotPositiveDefinite { .. })
        ));
    }

    #[test]
    fn triple_necessary_examples() {
        assert!(triple_necessary(&Matrix::identity(3), &tol()));
        assert!(triple_necessary(&min_kernel(), &tol()));
    }

    #[test]
    fn triple_sufficient_examples() {
        let sheet = m(&[&[1., 1., 1.], &[1., 4., 4.], &[1., 4., 9.]]);
        assert!(triple_sufficient(&sheet, &tol()));
        assert!(triple_sufficient(&Matrix::identity(3), &tol()));
        let g = m(&[&[1., 0.9, 0.1], &[0.9, 1., 0.9], &[0.1, 0.9, 1.]]);
        assert!(!triple_sufficient(&g, &tol()));
        // This example is indefinite, so it is not a covariance at all.
        assert!(cholesky(&g, &tol()).is_err());
    }

    #[test]
    fn diag_dominance_examples() {
        let a = m(&[&[2., -1., 0.], &[-1., 2., -1.], &[0., -1., 1.]]);
        let (ok, sums) = is_diag_dominant(&a, 1e-12);
        assert!(ok);
        assert_eq!(sums, vec![1.0, 0.0, 0.0]);
        assert!(is_diag_dominant(&Matrix::identity(3), 1e-12).0);
        let d = [1.0, 10.0, 1.0];
        let (ok, sums) = is_diag_dominant(&a.diag_scale(&d, &d), 1e-12);
        assert!(!ok);
        assert_eq!(sums[0], -8.0);
    }

    #[test]
    fn classify_examples() {
        assert_eq!(classify_green(&min_kernel(), &tol()).unwrap().label(), "green");
        let d = [1.0, 10.0, 1.0];
        let scaled = min_kernel().diag_scale(&d, &d);
        match classify_green(&scaled, &tol()).unwrap() {
            GreenClass::IdNotGreen { reason, .. } => {
                assert_eq!(reason, IdNotGreenReason::NotDiagonallyDominant)
            }
            other => panic!("unexpected {other:?}"),
        }
        let s = Signature::from_signs(vec![1, -1, 1]);
        match classify_green(&s.conjugate(&min_kernel()), &tol()).unwrap() {
            GreenClass::IdNotGreen { reason, .. } => {
                assert_eq!(reason, IdNotGreenReason::NontrivialSignature)
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn stability_flag() {
        let c = classify_with_stability(&min_kernel(), &tol()).unwrap();
        assert!(c.stable);
        assert!(c.margins.max_offdiag_rel.unwrap() <= 0.0);
    }

    #[test]
    fn component_flip_keeps_verdict() {
        let g = Matrix::from_diag(&[1.0, 2.0, 3.0]);
        let s = find_signature(&g, &tol()).unwrap();
        for k in 0..s.components.len() {
            let f = s.flip_component(k);
            assert!(is_m_matrix(&f.conjugate(&invert(&g, &tol()).unwrap()), &tol()).is_ok());
        }
    }
}
