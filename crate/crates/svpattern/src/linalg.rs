//! Self-contained dense real linear algebra: SVD, symmetric
//! eigendecomposition, rank, nullspaces, singular value multiplicity, and
//! seeded random pattern realizations.
//!
//! Everything here targets desk-scale matrices (tens of rows at most), so the
//! decompositions are Jacobi iterations: a one-sided Jacobi SVD and a cyclic
//! two-sided Jacobi for symmetric matrices. Both deliver high relative
//! accuracy on small well-scaled inputs without any external kernels.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::pattern::Pattern;

#[derive(Debug, Error, PartialEq)]
pub enum LinalgError {
    #[error("input contains a non-finite entry")]
    NonFiniteInput,
    #[error("matrix is not symmetric within tolerance")]
    NotSymmetric,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix parse error: {0}")]
    Parse(String),
}

/// Numerical tolerances shared across the crate.
///
/// `sv_cluster_tol` is absolute after normalizing by the largest singular
/// value; `rank_tol` is relative to the largest singular value; `orth_tol`
/// bounds orthogonality defects.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub sv_cluster_tol: f64,
    pub rank_tol: f64,
    pub orth_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            sv_cluster_tol: 1e-8,
            rank_tol: 1e-10,
            orth_tol: 1e-12,
        }
    }
}

/// A dense row-major matrix of 64-bit reals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DenseMatrix {
    m: usize,
    n: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(m: usize, n: usize) -> Self {
        assert!(m >= 1 && n >= 1, "matrix dimensions must be positive");
        DenseMatrix { m, n, data: vec![0.0; m * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut a = DenseMatrix::zeros(n, n);
        for i in 0..n {
            a[(i, i)] = 1.0;
        }
        a
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, LinalgError> {
        if rows.is_empty() || rows[0].is_empty() {
            return Err(LinalgError::DimensionMismatch("empty matrix".into()));
        }
        let n = rows[0].len();
        let mut data = Vec::with_capacity(rows.len() * n);
        for row in rows {
            if row.len() != n {
                return Err(LinalgError::DimensionMismatch("ragged rows".into()));
            }
            data.extend_from_slice(row);
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(LinalgError::NonFiniteInput);
        }
        Ok(DenseMatrix { m: rows.len(), n, data })
    }

    pub fn from_fn(m: usize, n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut a = DenseMatrix::zeros(m, n);
        for i in 0..m {
            for j in 0..n {
                a[(i, j)] = f(i, j);
            }
        }
        a
    }

    pub fn rows(&self) -> usize {
        self.m
    }

    pub fn cols(&self) -> usize {
        self.n
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn transpose(&self) -> DenseMatrix {
        DenseMatrix::from_fn(self.n, self.m, |i, j| self[(j, i)])
    }

    pub fn matmul(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.n, other.m, "inner dimensions must agree");
        let mut out = DenseMatrix::zeros(self.m, other.n);
        for i in 0..self.m {
            for k in 0..self.n {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.n {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn sub(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!((self.m, self.n), (other.m, other.n));
        DenseMatrix::from_fn(self.m, self.n, |i, j| self[(i, j)] - other[(i, j)])
    }

    pub fn scale(&self, c: f64) -> DenseMatrix {
        DenseMatrix::from_fn(self.m, self.n, |i, j| c * self[(i, j)])
    }

    /// Largest entry magnitude.
    pub fn max_norm(&self) -> f64 {
        self.data.iter().fold(0.0, |acc, v| acc.max(v.abs()))
    }

    pub fn trace_inner(&self, other: &DenseMatrix) -> f64 {
        assert_eq!((self.m, self.n), (other.m, other.n));
        self.data.iter().zip(&other.data).map(|(a, b)| a * b).sum()
    }

    pub fn frob_norm(&self) -> f64 {
        self.trace_inner(self).sqrt()
    }

    pub fn vstack(&self, bottom: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.n, bottom.n);
        let mut data = self.data.clone();
        data.extend_from_slice(&bottom.data);
        DenseMatrix { m: self.m + bottom.m, n: self.n, data }
    }

    pub fn hstack(&self, right: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.m, right.m);
        DenseMatrix::from_fn(self.m, self.n + right.n, |i, j| {
            if j < self.n {
                self[(i, j)]
            } else {
                right[(i, j - self.n)]
            }
        })
    }

    pub fn max_symmetry_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.m {
            for j in 0..self.n.min(self.m) {
                if j < self.m && i < self.n {
                    worst = worst.max((self[(i, j)] - self[(j, i)]).abs());
                }
            }
        }
        worst
    }

    /// The zero-nonzero pattern with entries above `zero_tol` in magnitude.
    pub fn pattern(&self, zero_tol: f64) -> Pattern {
        let mut p = Pattern::zeros(self.m, self.n);
        for i in 0..self.m {
            for j in 0..self.n {
                if self[(i, j)].abs() > zero_tol {
                    p.set(i, j, true);
                }
            }
        }
        p
    }
}

impl std::ops::Index<(usize, usize)> for DenseMatrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.n + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for DenseMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.n + j]
    }
}

/// See [`DenseMatrix::pattern`]; free-function form used across modules.
pub fn pattern_of(a: &DenseMatrix, zero_tol: f64) -> Pattern {
    a.pattern(zero_tol)
}

/// Block-diagonal direct sum of two matrices.
pub fn direct_sum(a: &DenseMatrix, b: &DenseMatrix) -> DenseMatrix {
    let mut out = DenseMatrix::zeros(a.rows() + b.rows(), a.cols() + b.cols());
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            out[(i, j)] = a[(i, j)];
        }
    }
    for i in 0..b.rows() {
        for j in 0..b.cols() {
            out[(a.rows() + i, a.cols() + j)] = b[(i, j)];
        }
    }
    out
}

/// Parses the matrix text format: an `m n` header line followed by `m * n`
/// whitespace-separated decimal reals.
pub fn parse_matrix(text: &str) -> Result<DenseMatrix, LinalgError> {
    let mut tokens = text.split_whitespace();
    let m: usize = tokens
        .next()
        .ok_or_else(|| LinalgError::Parse("missing header".into()))?
        .parse()
        .map_err(|e| LinalgError::Parse(format!("bad row count: {e}")))?;
    let n: usize = tokens
        .next()
        .ok_or_else(|| LinalgError::Parse("missing column count".into()))?
        .parse()
        .map_err(|e| LinalgError::Parse(format!("bad column count: {e}")))?;
    if m == 0 || n == 0 {
        return Err(LinalgError::Parse("dimensions must be positive".into()));
    }
    let mut data = Vec::with_capacity(m * n);
    for _ in 0..m * n {
        let tok = tokens
            .next()
            .ok_or_else(|| LinalgError::Parse(format!("expected {} entries", m * n)))?;
        let v: f64 = tok
            .parse()
            .map_err(|e| LinalgError::Parse(format!("bad entry {tok:?}: {e}")))?;
        if !v.is_finite() {
            return Err(LinalgError::NonFiniteInput);
        }
        data.push(v);
    }
    if tokens.next().is_some() {
        return Err(LinalgError::Parse(format!("more than {} entries", m * n)));
    }
    Ok(DenseMatrix { m, n, data })
}

/// Renders a matrix in the text format with 17 significant digits, enough
/// for bit-exact f64 round-trips.
pub fn render_matrix(a: &DenseMatrix) -> String {
    let mut out = format!("{} {}\n", a.rows(), a.cols());
    for i in 0..a.rows() {
        let row: Vec<String> = a.row(i).iter().map(|v| format!("{v:.16e}")).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

/// Singular value decomposition `A = U diag(sigma) V^T` with square
/// orthogonal factors; `sigma` holds the min(m, n) singular values in
/// descending order.
#[derive(Debug, Clone)]
pub struct SvdResult {
    pub u: DenseMatrix,
    pub sigma: Vec<f64>,
    pub v: DenseMatrix,
}

impl SvdResult {
    /// Rebuilds `U diag(sigma) V^T` for reconstruction checks.
    pub fn reconstruct(&self) -> DenseMatrix {
        let m = self.u.rows();
        let n = self.v.rows();
        let mut s = DenseMatrix::zeros(m, n);
        for (k, &val) in self.sigma.iter().enumerate() {
            s[(k, k)] = val;
        }
        self.u.matmul(&s).matmul(&self.v.transpose())
    }
}

const JACOBI_EPS: f64 = 1e-14;
const MAX_SWEEPS: usize = 64;

/// One-sided Jacobi SVD. Columns of the tall working matrix are rotated
/// until pairwise orthogonal; column norms become the singular values.
pub fn svd(a: &DenseMatrix) -> Result<SvdResult, LinalgError> {
    if !a.is_finite() {
        return Err(LinalgError::NonFiniteInput);
    }
    // Work on the tall orientation, orthogonalizing its columns. Prescaling
    // to unit max-norm keeps pairwise products away from underflow.
    let tall = if a.rows() >= a.cols() { a.clone() } else { a.transpose() };
    let p = tall.rows();
    let q = tall.cols();
    let prescale = tall.max_norm();
    let mut work = if prescale > 0.0 { tall.scale(1.0 / prescale) } else { tall };
    let mut right = DenseMatrix::identity(q);

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for i in 0..q.saturating_sub(1) {
            for j in i + 1..q {
                let mut aa = 0.0;
                let mut bb = 0.0;
                let mut dd = 0.0;
                for r in 0..p {
                    let x = work[(r, i)];
                    let y = work[(r, j)];
                    aa += x * x;
                    bb += y * y;
                    dd += x * y;
                }
                if dd.abs() <= JACOBI_EPS * (aa * bb).sqrt() || aa == 0.0 || bb == 0.0 {
                    continue;
                }
                rotated = true;
                let zeta = (bb - aa) / (2.0 * dd);
                let t = if zeta >= 0.0 {
                    1.0 / (zeta + (1.0 + zeta * zeta).sqrt())
                } else {
                    -1.0 / (-zeta + (1.0 + zeta * zeta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for r in 0..p {
                    let x = work[(r, i)];
                    let y = work[(r, j)];
                    work[(r, i)] = c * x - s * y;
                    work[(r, j)] = s * x + c * y;
                }
                for r in 0..q {
                    let x = right[(r, i)];
                    let y = right[(r, j)];
                    right[(r, i)] = c * x - s * y;
                    right[(r, j)] = s * x + c * y;
                }
            }
        }
        if !rotated {
            break;
        }
    }

    // Column norms, sorted descending with a stable index permutation.
    let mut norms: Vec<f64> = (0..q)
        .map(|j| (0..p).map(|r| work[(r, j)] * work[(r, j)]).sum::<f64>().sqrt())
        .collect();
    let mut order: Vec<usize> = (0..q).collect();
    order.sort_by(|&x, &y| norms[y].partial_cmp(&norms[x]).unwrap().then(x.cmp(&y)));
    norms = order.iter().map(|&k| norms[k]).collect();

    // Left factor: normalized nonzero columns, completed to a full
    // orthonormal basis for zero columns and the p - q remainder. Norms far
    // below the dominant one are cancellation residue: the column direction
    // carries no information, so it is zeroed and completed instead.
    let sigma_max = norms.first().copied().unwrap_or(0.0);
    let zero_cutoff = sigma_max * 1e-30;
    let mut left_cols: Vec<Vec<f64>> = Vec::with_capacity(p);
    for (slot, &k) in order.iter().enumerate() {
        if norms[slot] > zero_cutoff && norms[slot] > 0.0 {
            left_cols.push((0..p).map(|r| work[(r, k)] / norms[slot]).collect());
        } else {
            norms[slot] = 0.0;
            left_cols.push(Vec::new()); // completed below
        }
    }
    while left_cols.len() < p {
        left_cols.push(Vec::new());
    }
    complete_orthonormal(&mut left_cols, p);
    if prescale > 0.0 {
        for s in norms.iter_mut() {
            *s *= prescale;
        }
    }

    let left = DenseMatrix::from_fn(p, p, |i, j| left_cols[j][i]);
    let right_full = DenseMatrix::from_fn(q, q, |i, j| right[(i, order[j])]);

    // tall = left * diag(norms) * right_full^T. Map back to A's orientation.
    let (u, v) = if a.rows() >= a.cols() {
        (left, right_full)
    } else {
        (right_full, left)
    };
    Ok(SvdResult { u, sigma: norms, v })
}

/// Fills empty slots with unit vectors orthogonal to all filled columns.
/// Deterministic: each slot takes the standard basis vector with the largest
/// residual after Gram-Schmidt against the accepted set.
fn complete_orthonormal(cols: &mut [Vec<f64>], dim: usize) {
    for slot in 0..cols.len() {
        if !cols[slot].is_empty() {
            continue;
        }
        let mut best: Option<(f64, Vec<f64>)> = None;
        for cand in 0..dim {
            let mut v = vec![0.0; dim];
            v[cand] = 1.0;
            for pass in 0..2 {
                let _ = pass;
                for other in cols.iter().filter(|c| !c.is_empty()) {
                    let proj: f64 = v.iter().zip(other.iter()).map(|(a, b)| a * b).sum();
                    for (x, o) in v.iter_mut().zip(other.iter()) {
                        *x -= proj * o;
                    }
                }
            }
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if best.as_ref().map_or(true, |(b, _)| norm > *b) {
                best = Some((norm, v));
            }
        }
        let (norm, mut v) = best.expect("dimension is positive");
        assert!(norm > 1e-8, "orthonormal completion degenerated");
        for x in v.iter_mut() {
            *x /= norm;
        }
        cols[slot] = v;
    }
}

/// Counts singular values of `a` within the cluster tolerance of `sigma`.
/// The tolerance is applied after normalizing by the largest singular value.
pub fn multiplicity(a: &DenseMatrix, sigma: f64, tol: &Tolerances) -> usize {
    let svs = svd(a).expect("multiplicity requires finite input").sigma;
    cluster_count(&svs, sigma, tol)
}

pub(crate) fn cluster_count(svs: &[f64], sigma: f64, tol: &Tolerances) -> usize {
    let scale = svs.first().copied().unwrap_or(0.0).max(1.0);
    svs.iter().filter(|&&s| (s - sigma).abs() <= tol.sv_cluster_tol * scale).count()
}

/// Minimum difference between consecutive sorted singular values; infinity
/// when there are fewer than two.
pub fn min_singular_gap(a: &DenseMatrix) -> f64 {
    let svs = svd(a).expect("min_singular_gap requires finite input").sigma;
    if svs.len() < 2 {
        return f64::INFINITY;
    }
    svs.windows(2).map(|w| w[0] - w[1]).fold(f64::INFINITY, f64::min)
}

/// Numerical rank: singular values above `rank_tol` relative to the largest.
pub fn rank(a: &DenseMatrix, tol: &Tolerances) -> usize {
    let svs = svd(a).expect("rank requires finite input").sigma;
    let scale = svs.first().copied().unwrap_or(0.0);
    svs.iter().filter(|&&s| s > tol.rank_tol * scale && s > 0.0).count()
}

/// Orthonormal basis of the (right) nullspace: the right singular vectors
/// whose singular values fall at or below the rank cutoff.
pub fn nullspace_basis(a: &DenseMatrix, tol: &Tolerances) -> Vec<Vec<f64>> {
    let dec = svd(a).expect("nullspace_basis requires finite input");
    let scale = dec.sigma.first().copied().unwrap_or(0.0);
    let r = dec.sigma.iter().filter(|&&s| s > tol.rank_tol * scale && s > 0.0).count();
    let n = a.cols();
    (r..n).map(|j| (0..n).map(|i| dec.v[(i, j)]).collect()).collect()
}

/// Cyclic Jacobi eigendecomposition of a symmetric matrix. Returns the
/// eigenvalues in descending order and the matching orthogonal eigenvectors
/// as columns.
pub fn symmetric_eig(s: &DenseMatrix) -> Result<(Vec<f64>, DenseMatrix), LinalgError> {
    if !s.is_finite() {
        return Err(LinalgError::NonFiniteInput);
    }
    if s.rows() != s.cols() {
        return Err(LinalgError::NotSymmetric);
    }
    let n = s.rows();
    let scale = s.max_norm().max(1.0);
    if s.max_symmetry_defect() > 1e-12 * scale {
        return Err(LinalgError::NotSymmetric);
    }

    // Symmetrize exactly before iterating so rounding asymmetry cannot grow.
    let mut a = DenseMatrix::from_fn(n, n, |i, j| 0.5 * (s[(i, j)] + s[(j, i)]));
    let mut q = DenseMatrix::identity(n);

    for _ in 0..MAX_SWEEPS {
        let mut off: f64 = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                off = off.max(a[(i, j)].abs());
            }
        }
        if off <= JACOBI_EPS * scale {
            break;
        }
        for i in 0..n.saturating_sub(1) {
            for j in i + 1..n {
                let apq = a[(i, j)];
                if apq.abs() <= JACOBI_EPS * scale * 1e-2 {
                    continue;
                }
                let theta = (a[(j, j)] - a[(i, i)]) / (2.0 * apq);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (1.0 + theta * theta).sqrt())
                } else {
                    -1.0 / (-theta + (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let sn = t * c;
                // A <- J^T A J on rows/cols i, j.
                for k in 0..n {
                    let aik = a[(i, k)];
                    let ajk = a[(j, k)];
                    a[(i, k)] = c * aik - sn * ajk;
                    a[(j, k)] = sn * aik + c * ajk;
                }
                for k in 0..n {
                    let aki = a[(k, i)];
                    let akj = a[(k, j)];
                    a[(k, i)] = c * aki - sn * akj;
                    a[(k, j)] = sn * aki + c * akj;
                }
                for k in 0..n {
                    let qki = q[(k, i)];
                    let qkj = q[(k, j)];
                    q[(k, i)] = c * qki - sn * qkj;
                    q[(k, j)] = sn * qki + c * qkj;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| a[(y, y)].partial_cmp(&a[(x, x)]).unwrap().then(x.cmp(&y)));
    let values: Vec<f64> = order.iter().map(|&k| a[(k, k)]).collect();
    let vectors = DenseMatrix::from_fn(n, n, |i, j| q[(i, order[j])]);
    Ok((values, vectors))
}

/// Samples a matrix realizing `p`: entries on true cells have magnitude
/// uniform in [0.5, 2.0] (sign random when `signed`), false cells are exact
/// zeros. Deterministic per seed.
pub fn random_realization(p: &Pattern, seed: u64, signed: bool) -> DenseMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut a = DenseMatrix::zeros(p.rows(), p.cols());
    for i in 0..p.rows() {
        for j in 0..p.cols() {
            if p.get(i, j) {
                let mag = rng.random_range(0.5..2.0);
                let flip = signed && rng.random::<bool>();
                a[(i, j)] = if flip { -mag } else { mag };
            }
        }
    }
    a
}

/// Mixes a salt into a base seed for derived sampling streams.
pub fn derive_seed(seed: u64, salt: u64) -> u64 {
    seed ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pattern::parse_pattern;

    fn orthogonality_defect(q: &DenseMatrix) -> f64 {
        q.transpose().matmul(q).sub(&DenseMatrix::identity(q.cols())).max_norm()
    }

    fn check_svd(a: &DenseMatrix) -> SvdResult {
        let dec = svd(a).unwrap();
        assert!(orthogonality_defect(&dec.u) <= 1e-12, "U not orthogonal");
        assert!(orthogonality_defect(&dec.v) <= 1e-12, "V not orthogonal");
        let err = dec.reconstruct().sub(a).max_norm();
        assert!(err <= 1e-10 * (1.0 + a.max_norm()), "reconstruction error {err}");
        for w in dec.sigma.windows(2) {
            assert!(w[0] >= w[1]);
        }
        assert!(dec.sigma.iter().all(|&s| s >= 0.0));
        dec
    }

    #[test]
    fn svd_identity() {
        let dec = check_svd(&DenseMatrix::identity(3));
        assert_eq!(dec.sigma, vec![1.0, 1.0, 1.0]);
    }

    #[test]
    fn svd_claw_matrix() {
        // [I3 | ones column] has singular values 2, 1, 1.
        let r = DenseMatrix::from_rows(&[
            vec![1.0, 0.0, 0.0, 1.0],
            vec![0.0, 1.0, 0.0, 1.0],
            vec![0.0, 0.0, 1.0, 1.0],
        ])
        .unwrap();
        let dec = check_svd(&r);
        assert!((dec.sigma[0] - 2.0).abs() <= 1e-12);
        assert!((dec.sigma[1] - 1.0).abs() <= 1e-12);
        assert!((dec.sigma[2] - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn svd_hand_case_sqrt2() {
        // [[1,1],[1,-1]] times its transpose is 2I, so both values are sqrt 2.
        let a = DenseMatrix::from_rows(&[vec![1.0, 1.0], vec![1.0, -1.0]]).unwrap();
        let dec = check_svd(&a);
        for s in &dec.sigma {
            assert!((s - 2f64.sqrt()).abs() <= 1e-12);
        }
    }

    #[test]
    fn svd_zero_and_tall() {
        let z = DenseMatrix::zeros(2, 3);
        let dec = check_svd(&z);
        assert_eq!(dec.sigma, vec![0.0, 0.0]);
        let tall = DenseMatrix::from_rows(&[vec![3.0], vec![4.0]]).unwrap();
        let dec = check_svd(&tall);
        assert!((dec.sigma[0] - 5.0).abs() <= 1e-12);
    }

    #[test]
    fn svd_rejects_non_finite() {
        let mut a = DenseMatrix::zeros(2, 2);
        a[(0, 0)] = f64::NAN;
        assert_eq!(svd(&a).unwrap_err(), LinalgError::NonFiniteInput);
    }

    #[test]
    fn multiplicity_examples() {
        let tol = Tolerances::default();
        let r = DenseMatrix::from_rows(&[
            vec![1.0, 0.0, 0.0, 1.0],
            vec![0.0, 1.0, 0.0, 1.0],
            vec![0.0, 0.0, 1.0, 1.0],
        ])
        .unwrap();
        assert_eq!(multiplicity(&r, 1.0, &tol), 2);
        assert_eq!(multiplicity(&DenseMatrix::identity(3), 0.0, &tol), 0);

        let s = 2f64.sqrt();
        let inout = DenseMatrix::from_rows(&[
            vec![1.0, 1.0, 0.0, 0.0],
            vec![0.0, 1.0, 1.0, 1.0],
            vec![0.0, 0.0, s, 0.0],
            vec![0.0, 0.0, 0.0, s],
        ])
        .unwrap();
        assert_eq!(multiplicity(&inout, s, &tol), 2);
    }

    #[test]
    fn multiplicities_partition_spectrum() {
        use rand::{Rng, SeedableRng};
        let tol = Tolerances::default();
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..50 {
            let m = rng.random_range(1..=5);
            let n = rng.random_range(1..=5);
            let a = DenseMatrix::from_fn(m, n, |_, _| rng.random_range(-2.0..2.0));
            let svs = svd(&a).unwrap().sigma;
            let mut total = 0;
            let mut i = 0;
            while i < svs.len() {
                let c = cluster_count(&svs, svs[i], &tol);
                total += c;
                i += c;
            }
            assert_eq!(total, svs.len());
        }
    }

    #[test]
    fn min_gap_examples() {
        assert_eq!(min_singular_gap(&DenseMatrix::identity(2)), 0.0);
        let d = DenseMatrix::from_rows(&[vec![3.0, 0.0], vec![0.0, 1.0]]).unwrap();
        assert!((min_singular_gap(&d) - 2.0).abs() <= 1e-12);
        let r = DenseMatrix::from_rows(&[
            vec![1.0, 0.0, 0.0, 1.0],
            vec![0.0, 1.0, 0.0, 1.0],
            vec![0.0, 0.0, 1.0, 1.0],
        ])
        .unwrap();
        assert!(min_singular_gap(&r).abs() <= 1e-12);
        let wide = DenseMatrix::from_rows(&[vec![1.0, 2.0]]).unwrap();
        assert_eq!(min_singular_gap(&wide), f64::INFINITY);
    }

    #[test]
    fn rank_and_nullspace() {
        let tol = Tolerances::default();
        // P P^T - I for the degree-four pattern matrix has nullity 2.
        let p = DenseMatrix::from_rows(&[
            vec![1.0, 1.0, 1.0, 1.0],
            vec![0.0, 1.0, 0.0, 0.0],
            vec![0.0, 0.0, 1.0, 0.0],
            vec![0.0, 0.0, 0.0, 1.0],
        ])
        .unwrap();
        let g = p.matmul(&p.transpose()).sub(&DenseMatrix::identity(4));
        assert_eq!(rank(&g, &tol), 2);
        assert_eq!(nullspace_basis(&g, &tol).len(), 2);

        assert_eq!(rank(&DenseMatrix::identity(3), &tol), 3);
        assert!(nullspace_basis(&DenseMatrix::identity(3), &tol).is_empty());

        let z = DenseMatrix::zeros(2, 3);
        assert_eq!(rank(&z, &tol), 0);
        assert_eq!(nullspace_basis(&z, &tol).len(), 3);
    }

    #[test]
    fn nullspace_vectors_annihilate() {
        use rand::{Rng, SeedableRng};
        let tol = Tolerances::default();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..30 {
            let m = rng.random_range(1..=5);
            let n = rng.random_range(1..=6);
            let mut a = DenseMatrix::from_fn(m, n, |_, _| rng.random_range(-1.0..1.0));
            if rng.random::<bool>() && n >= 2 {
                // force rank deficiency by duplicating a column
                for i in 0..m {
                    let v = a[(i, 0)];
                    a[(i, n - 1)] = v;
                }
            }
            let norm = a.max_norm().max(1.0);
            for v in nullspace_basis(&a, &tol) {
                for i in 0..m {
                    let dot: f64 = (0..n).map(|j| a[(i, j)] * v[j]).sum();
                    assert!(dot.abs() <= 1e-9 * norm, "nullspace residual {dot}");
                }
            }
        }
    }

    #[test]
    fn symmetric_eig_examples() {
        let d = DenseMatrix::from_rows(&[vec![2.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let (vals, vecs) = symmetric_eig(&d).unwrap();
        assert_eq!(vals, vec![2.0, 1.0]);
        assert!(orthogonality_defect(&vecs) <= 1e-12);

        let ones = DenseMatrix::from_rows(&[vec![1.0, 1.0], vec![1.0, 1.0]]).unwrap();
        let (vals, vecs) = symmetric_eig(&ones).unwrap();
        assert!((vals[0] - 2.0).abs() <= 1e-12);
        assert!(vals[1].abs() <= 1e-12);
        // rotation by pi/4 up to column signs
        for j in 0..2 {
            for i in 0..2 {
                assert!((vecs[(i, j)].abs() - 0.5f64.sqrt()).abs() <= 1e-12);
            }
        }

        let (vals, vecs) = symmetric_eig(&DenseMatrix::identity(3)).unwrap();
        assert_eq!(vals, vec![1.0, 1.0, 1.0]);
        assert!(orthogonality_defect(&vecs) <= 1e-12);
    }

    #[test]
    fn symmetric_eig_rejects_asymmetric() {
        let a = DenseMatrix::from_rows(&[vec![1.0, 2.0], vec![0.0, 1.0]]).unwrap();
        assert_eq!(symmetric_eig(&a).unwrap_err(), LinalgError::NotSymmetric);
    }

    #[test]
    fn symmetric_eig_reconstructs() {
        use rand::{Rng, SeedableRng};
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for _ in 0..30 {
            let n = rng.random_range(1..=6);
            let b = DenseMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
            let s = DenseMatrix::from_fn(n, n, |i, j| b[(i, j)] + b[(j, i)]);
            let (vals, q) = symmetric_eig(&s).unwrap();
            let scale = s.max_norm().max(1.0);
            let mut lam = DenseMatrix::zeros(n, n);
            for (k, &v) in vals.iter().enumerate() {
                lam[(k, k)] = v;
            }
            let rebuilt = q.matmul(&lam).matmul(&q.transpose());
            assert!(rebuilt.sub(&s).max_norm() <= 1e-10 * scale);
            assert!(orthogonality_defect(&q) <= 1e-12);
        }
    }

    #[test]
    fn sigma_squared_matches_gram_eigenvalues() {
        use rand::{Rng, SeedableRng};
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..40 {
            let m = rng.random_range(1..=5);
            let n = rng.random_range(1..=5);
            let a = DenseMatrix::from_fn(m, n, |_, _| rng.random_range(-2.0..2.0));
            let svs = svd(&a).unwrap().sigma;
            let gram = a.matmul(&a.transpose());
            let (vals, _) = symmetric_eig(&gram).unwrap();
            for (k, &s) in svs.iter().enumerate().take(m.min(n)) {
                assert!((s * s - vals[k]).abs() <= 1e-9 * (1.0 + vals[0].abs()));
            }
        }
    }

    #[test]
    fn svd_invariances() {
        use rand::{Rng, SeedableRng};
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..25 {
            let m = rng.random_range(1..=8);
            let n = rng.random_range(1..=12);
            let a = DenseMatrix::from_fn(m, n, |_, _| rng.random_range(-2.0..2.0));
            let s1 = svd(&a).unwrap().sigma;
            let s2 = svd(&a.transpose()).unwrap().sigma;
            for (x, y) in s1.iter().zip(&s2) {
                assert!((x - y).abs() <= 1e-10);
            }
            // permute rows and columns
            let pref = DenseMatrix::from_fn(m, m, |i, j| if j == (i + 1) % m { 1.0 } else { 0.0 });
            let postf = DenseMatrix::from_fn(n, n, |i, j| if j == (i + 2) % n { 1.0 } else { 0.0 });
            let s3 = svd(&pref.matmul(&a).matmul(&postf)).unwrap().sigma;
            for (x, y) in s1.iter().zip(&s3) {
                assert!((x - y).abs() <= 1e-10);
            }
        }
    }

    #[test]
    fn pattern_of_thresholding() {
        let a = DenseMatrix::identity(2);
        assert_eq!(pattern_of(&a, 0.0), Pattern::identity(2));
        let tiny = DenseMatrix::from_fn(2, 2, |_, _| 1e-14);
        assert!(pattern_of(&tiny, 1e-12).is_all_zero());
        let s = 2f64.sqrt();
        let inout = DenseMatrix::from_rows(&[
            vec![1.0, 1.0, 0.0, 0.0],
            vec![0.0, 1.0, 1.0, 1.0],
            vec![0.0, 0.0, s, 0.0],
            vec![0.0, 0.0, 0.0, s],
        ])
        .unwrap();
        assert_eq!(
            pattern_of(&inout, 0.0),
            parse_pattern("1100\n0111\n0010\n0001").unwrap()
        );
    }

    #[test]
    fn random_realization_respects_pattern_and_seed() {
        let p = parse_pattern("101\n010").unwrap();
        let a = random_realization(&p, 42, true);
        let b = random_realization(&p, 42, true);
        assert_eq!(a, b);
        for i in 0..2 {
            for j in 0..3 {
                if p.get(i, j) {
                    let mag = a[(i, j)].abs();
                    assert!((0.5..2.0).contains(&mag));
                } else {
                    assert_eq!(a[(i, j)], 0.0);
                }
            }
        }
        let zero = random_realization(&Pattern::zeros(2, 2), 7, false);
        assert_eq!(zero.max_norm(), 0.0);
        let unsigned = random_realization(&Pattern::ones(3, 3), 9, false);
        assert!(unsigned.row(0).iter().all(|&v| v > 0.0));
    }

    #[test]
    fn matrix_text_round_trip() {
        let a = DenseMatrix::from_rows(&[
            vec![1.0 / 3.0, -2.5e-11],
            vec![std::f64::consts::PI, 4.0],
        ])
        .unwrap();
        let text = render_matrix(&a);
        let back = parse_matrix(&text).unwrap();
        assert_eq!(a, back);
    }

    #[test]
    fn matrix_parse_errors() {
        assert!(matches!(parse_matrix(""), Err(LinalgError::Parse(_))));
        assert!(matches!(parse_matrix("2 2\n1 2 3"), Err(LinalgError::Parse(_))));
        assert!(matches!(parse_matrix("1 1\n1 2"), Err(LinalgError::Parse(_))));
        assert!(matches!(parse_matrix("1 1\nx"), Err(LinalgError::Parse(_))));
        assert!(matches!(parse_matrix("1 1\ninf"), Err(LinalgError::NonFiniteInput)));
    }
}
