//! The Strong Singular Value Property as an explicit finite linear system,
//! plus tangent/normal spaces of the isospectral manifold and the symmetric
//! Sylvester solver.
//!
//! A matrix `A` has the SSVP when `X = O` is the only matrix with `A^T X` and
//! `X A^T` both symmetric and `A o X = O` (entrywise product). The entrywise
//! condition is enforced by restricting the unknowns to the zero cells of
//! `A`; the two symmetry conditions become strict-upper-triangle equations,
//! giving n(n-1)/2 + m(m-1)/2 linear equations. The verdict is the numerical
//! nullity of that system.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{
    self, nullspace_basis, rank, svd, symmetric_eig, DenseMatrix, Tolerances,
};
use crate::pattern::{is_superpattern, Pattern};

#[derive(Debug, Error, PartialEq)]
pub enum SsvpError {
    #[error("input contains a non-finite entry")]
    NonFiniteInput,
    #[error("S is not a superpattern of the pattern of A")]
    NotSuperpattern,
    #[error("matrix is not symmetric within tolerance")]
    NotSymmetric,
}

/// Outcome of an SSVP check.
///
/// When the property fails, `witness` carries a nonzero solution `X`
/// normalized to unit max-norm. `decision_gap` reports the two singular
/// values of the constraint system bracketing the rank decision, so callers
/// can judge how well-separated the verdict is.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SsvpReport {
    pub holds: bool,
    pub nullity: usize,
    pub witness: Option<DenseMatrix>,
    pub decision_gap: Option<(f64, f64)>,
}

/// An orthonormal family of m-by-n matrices under the trace inner product.
#[derive(Debug, Clone)]
pub struct SubspaceBasis {
    pub ambient_dims: (usize, usize),
    pub basis: Vec<DenseMatrix>,
}

impl SubspaceBasis {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }
}

/// Builds the symmetry-condition rows for unknowns at `free` cells of X.
/// Row order: strict upper triangle of A^T X - X^T A (n conditions), then of
/// X A^T - A X^T (m conditions), both scanned row-major.
fn symmetry_system(a: &DenseMatrix, free: &[(usize, usize)]) -> Option<DenseMatrix> {
    let m = a.rows();
    let n = a.cols();
    let eqs = n * (n - 1) / 2 + m * (m - 1) / 2;
    if eqs == 0 || free.is_empty() {
        return None;
    }
    let mut c = DenseMatrix::zeros(eqs, free.len());
    let mut row = 0;
    for i in 0..n {
        for j in i + 1..n {
            for (k, &(p, q)) in free.iter().enumerate() {
                let mut coeff = 0.0;
                if q == j {
                    coeff += a[(p, i)];
                }
                if q == i {
                    coeff -= a[(p, j)];
                }
                c[(row, k)] = coeff;
            }
            row += 1;
        }
    }
    for i in 0..m {
        for j in i + 1..m {
            for (k, &(p, q)) in free.iter().enumerate() {
                let mut coeff = 0.0;
                if p == i {
                    coeff += a[(j, q)];
                }
                if p == j {
                    coeff -= a[(i, q)];
                }
                c[(row, k)] = coeff;
            }
            row += 1;
        }
    }
    Some(c)
}

fn report_from_system(
    a: &DenseMatrix,
    free: &[(usize, usize)],
    tol: &Tolerances,
) -> SsvpReport {
    let (m, n) = (a.rows(), a.cols());
    if free.is_empty() {
        return SsvpReport { holds: true, nullity: 0, witness: None, decision_gap: None };
    }
    let Some(c) = symmetry_system(a, free) else {
        // No equations at all: every free cell is unconstrained.
        let mut x = DenseMatrix::zeros(m, n);
        let (p, q) = free[0];
        x[(p, q)] = 1.0;
        return SsvpReport {
            holds: false,
            nullity: free.len(),
            witness: Some(x),
            decision_gap: None,
        };
    };
    let dec = svd(&c).expect("constraint matrix is finite");
    let scale = dec.sigma.first().copied().unwrap_or(0.0);
    let r = dec.sigma.iter().filter(|&&s| s > tol.rank_tol * scale && s > 0.0).count();
    let nullity = free.len() - r;
    let decision_gap = if r >= 1 {
        let below = dec.sigma.get(r).copied().unwrap_or(0.0);
        Some((dec.sigma[r - 1], below))
    } else {
        None
    };
    let witness = if nullity > 0 {
        // Last right singular vector: the direction most orthogonal to the
        // row space, i.e. a numerical nullspace element.
        let k = c.cols();
        let mut entries: Vec<f64> = (0..k).map(|i| dec.v[(i, k - 1)]).collect();
        let lead = entries
            .iter()
            .cloned()
            .max_by(|x, y| x.abs().partial_cmp(&y.abs()).unwrap())
            .unwrap_or(1.0);
        if lead != 0.0 {
            for e in entries.iter_mut() {
                *e /= lead;
            }
        }
        let mut x = DenseMatrix::zeros(m, n);
        for (&(p, q), &val) in free.iter().zip(&entries) {
            x[(p, q)] = val;
        }
        Some(x)
    } else {
        None
    };
    SsvpReport { holds: nullity == 0, nullity, witness, decision_gap }
}

/// Checks the SSVP of `A`: unknowns are the exactly-zero cells of `A`.
pub fn ssvp_check(a: &DenseMatrix, tol: &Tolerances) -> Result<SsvpReport, SsvpError> {
    if !a.is_finite() {
        return Err(SsvpError::NonFiniteInput);
    }
    let free: Vec<(usize, usize)> = (0..a.rows())
        .flat_map(|i| (0..a.cols()).map(move |j| (i, j)))
        .filter(|&(i, j)| a[(i, j)] == 0.0)
        .collect();
    Ok(report_from_system(a, &free, tol))
}

/// The SSVP with respect to a superpattern `S` of the pattern of `A`:
/// unknowns are restricted to the cells false in `S`.
pub fn ssvp_wrt(a: &DenseMatrix, s: &Pattern, tol: &Tolerances) -> Result<SsvpReport, SsvpError> {
    if !a.is_finite() {
        return Err(SsvpError::NonFiniteInput);
    }
    let pat = linalg::pattern_of(a, 0.0);
    match is_superpattern(s, &pat) {
        Ok(true) => {}
        _ => return Err(SsvpError::NotSuperpattern),
    }
    let free: Vec<(usize, usize)> = (0..a.rows())
        .flat_map(|i| (0..a.cols()).map(move |j| (i, j)))
        .filter(|&(i, j)| !s.get(i, j))
        .collect();
    Ok(report_from_system(a, &free, tol))
}

/// Orthonormal basis of the normal space: all X with `A^T X` and `X A^T`
/// symmetric, found as the nullspace of the symmetry system over all mn
/// unknowns.
pub fn normal_space_basis(a: &DenseMatrix) -> SubspaceBasis {
    let (m, n) = (a.rows(), a.cols());
    let all: Vec<(usize, usize)> = (0..m).flat_map(|i| (0..n).map(move |j| (i, j))).collect();
    let tol = Tolerances::default();
    let basis = match symmetry_system(a, &all) {
        None => {
            // 1x1 ambient space: the normal space is everything.
            vec![DenseMatrix::identity(1)]
        }
        Some(c) => nullspace_basis(&c, &tol)
            .into_iter()
            .map(|v| {
                let mut x = DenseMatrix::zeros(m, n);
                for (&(p, q), &val) in all.iter().zip(&v) {
                    x[(p, q)] = val;
                }
                x
            })
            .collect(),
    };
    SubspaceBasis { ambient_dims: (m, n), basis }
}

/// Orthonormal basis of the tangent space span{KA + AL : K, L skew}, built
/// from the elementary skew generators and orthonormalized by SVD.
pub fn tangent_space_basis(a: &DenseMatrix) -> SubspaceBasis {
    let (m, n) = (a.rows(), a.cols());
    let mut generators: Vec<DenseMatrix> = Vec::new();
    for p in 0..m {
        for q in p + 1..m {
            // (E_pq - E_qp) A: row p gets A's row q, row q gets -A's row p.
            let mut g = DenseMatrix::zeros(m, n);
            for j in 0..n {
                g[(p, j)] = a[(q, j)];
                g[(q, j)] = -a[(p, j)];
            }
            generators.push(g);
        }
    }
    for p in 0..n {
        for q in p + 1..n {
            // A (E_pq - E_qp): column q gets A's column p, column p gets -A's column q.
            let mut g = DenseMatrix::zeros(m, n);
            for i in 0..m {
                g[(i, q)] = a[(i, p)];
                g[(i, p)] = -a[(i, q)];
            }
            generators.push(g);
        }
    }
    if generators.is_empty() {
        return SubspaceBasis { ambient_dims: (m, n), basis: vec![] };
    }
    let rows = generators.len();
    let g = DenseMatrix::from_fn(rows, m * n, |r, k| generators[r][(k / n, k % n)]);
    let dec = svd(&g).expect("generator matrix is finite");
    let tol = Tolerances::default();
    let scale = dec.sigma.first().copied().unwrap_or(0.0);
    let r = dec.sigma.iter().filter(|&&s| s > tol.rank_tol * scale && s > 0.0).count();
    let basis = (0..r)
        .map(|j| DenseMatrix::from_fn(m, n, |i, jj| dec.v[(i * n + jj, j)]))
        .collect();
    SubspaceBasis { ambient_dims: (m, n), basis }
}

/// Basis of the solution space of `A X = X B` for symmetric `A`, `B`: the
/// outer products `u_i v_j^T` over eigenpairs with matching eigenvalues.
pub fn sylvester_symmetric_basis(
    a: &DenseMatrix,
    b: &DenseMatrix,
    tol: &Tolerances,
) -> Result<SubspaceBasis, SsvpError> {
    let (avals, avecs) = symmetric_eig(a).map_err(map_eig_err)?;
    let (bvals, bvecs) = symmetric_eig(b).map_err(map_eig_err)?;
    let scale = avals
        .iter()
        .chain(&bvals)
        .fold(1.0f64, |acc, v| acc.max(v.abs()));
    let mut basis = Vec::new();
    for (i, &lam) in avals.iter().enumerate() {
        for (j, &mu) in bvals.iter().enumerate() {
            if (lam - mu).abs() <= tol.sv_cluster_tol * scale {
                basis.push(DenseMatrix::from_fn(a.rows(), b.rows(), |p, q| {
                    avecs[(p, i)] * bvecs[(q, j)]
                }));
            }
        }
    }
    Ok(SubspaceBasis { ambient_dims: (a.rows(), b.rows()), basis })
}

fn map_eig_err(e: linalg::LinalgError) -> SsvpError {
    match e {
        linalg::LinalgError::NonFiniteInput => SsvpError::NonFiniteInput,
        _ => SsvpError::NotSymmetric,
    }
}

/// Evaluates the four conditions of the direct-sum characterization: block
/// shapes, SSVP of both blocks, disjoint nonzero singular values, and the
/// row-independence/invertibility clause. Under the arrangement
/// `rows(A) + rows(B) <= cols(A) + cols(B)` the conjunction equals
/// `ssvp_check(A (+) B).holds`.
pub fn direct_sum_ssvp_predicate(a: &DenseMatrix, b: &DenseMatrix, tol: &Tolerances) -> bool {
    let shape_ok = a.rows() <= a.cols() && b.rows() <= b.cols();

    let a_holds = ssvp_check(a, tol).expect("finite input").holds;
    let b_holds = ssvp_check(b, tol).expect("finite input").holds;

    let sa = svd(a).expect("finite input").sigma;
    let sb = svd(b).expect("finite input").sigma;
    let a_scale = sa.first().copied().unwrap_or(0.0);
    let b_scale = sb.first().copied().unwrap_or(0.0);
    let cluster = tol.sv_cluster_tol * a_scale.max(b_scale).max(1.0);
    let mut disjoint = true;
    for &x in sa.iter().filter(|&&x| x > tol.rank_tol * a_scale && x > 0.0) {
        for &y in sb.iter().filter(|&&y| y > tol.rank_tol * b_scale && y > 0.0) {
            if (x - y).abs() <= cluster {
                disjoint = false;
            }
        }
    }

    let a_full_rows = rank(a, tol) == a.rows();
    let b_full_rows = rank(b, tol) == b.rows();
    let a_square_invertible = a.rows() == a.cols() && a_full_rows;
    let b_square_invertible = b.rows() == b.cols() && b_full_rows;
    let independence = (a_full_rows && b_full_rows) || a_square_invertible || b_square_invertible;

    shape_ok && a_holds && b_holds && disjoint && independence
}
