//! Constructors that produce explicit matrices with a prescribed pattern and
//! a numerically verified multiple singular value.
//!
//! Fixed small witnesses come straight from hand-checkable matrices. The
//! composite constructions all follow one scheme: build a block-diagonal
//! seed matrix whose spectrum already contains the wanted multiplicity, pick
//! a tangent direction supported on the missing cells, and run a damped
//! Newton continuation that moves the seed onto the full pattern while
//! pinning every singular value. Witnesses are always post-verified; a
//! construction that cannot be verified is reported absent, never returned.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{
    self, derive_seed, multiplicity, pattern_of, random_realization, svd, symmetric_eig,
    DenseMatrix, Tolerances,
};
use crate::pattern::{is_superpattern, Pattern};
use crate::ssvp::{normal_space_basis, ssvp_check, ssvp_wrt};
use crate::structure::{digraph_of, find_weak_cycle};

#[derive(Debug, Error, PartialEq)]
pub enum WitnessError {
    #[error("construction hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("pattern has no nonzero cell")]
    ZeroPattern,
    #[error("digraph has no weak cycle")]
    NoWeakCycle,
    #[error("column {0} does not have support exactly one")]
    NotSingleSupport(usize),
    #[error("columns are supported on different rows")]
    DifferentSupportRows,
    #[error("iteration did not converge")]
    NonConvergence,
    #[error("witness verification failed: {0}")]
    VerificationFailed(String),
}

/// A matrix together with the multiplicity claim it witnesses.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Witness {
    pub matrix: DenseMatrix,
    pub target_sigma: f64,
    pub claimed_multiplicity: usize,
    pub ssvp_claimed: bool,
}

impl Witness {
    /// Builds a witness and verifies every claim: the matrix realizes the
    /// requested pattern, the target singular value has at least the claimed
    /// multiplicity, and the SSVP holds when claimed.
    pub fn verified(
        matrix: DenseMatrix,
        requested: &Pattern,
        target_sigma: f64,
        claimed_multiplicity: usize,
        ssvp_claimed: bool,
        tol: &Tolerances,
    ) -> Result<Witness, WitnessError> {
        let w = Witness { matrix, target_sigma, claimed_multiplicity, ssvp_claimed };
        w.verify(requested, tol)?;
        Ok(w)
    }

    pub fn verify(&self, requested: &Pattern, tol: &Tolerances) -> Result<(), WitnessError> {
        if pattern_of(&self.matrix, 1e-12) != *requested {
            return Err(WitnessError::VerificationFailed(
                "matrix does not realize the requested pattern".into(),
            ));
        }
        if self.claimed_multiplicity < 2 {
            return Err(WitnessError::VerificationFailed(
                "claimed multiplicity below two".into(),
            ));
        }
        let m = multiplicity(&self.matrix, self.target_sigma, tol);
        if m < self.claimed_multiplicity {
            return Err(WitnessError::VerificationFailed(format!(
                "target {} has multiplicity {m}, claimed {}",
                self.target_sigma, self.claimed_multiplicity
            )));
        }
        if self.ssvp_claimed {
            let report = ssvp_check(&self.matrix, tol)
                .map_err(|e| WitnessError::VerificationFailed(e.to_string()))?;
            if !report.holds {
                return Err(WitnessError::VerificationFailed(
                    "SSVP claimed but the check fails".into(),
                ));
            }
        }
        Ok(())
    }
}

/// The 4x4 pattern with one row meeting every column.
pub fn deg4_pattern() -> Pattern {
    Pattern::from_rows(&[&[1, 1, 1, 1], &[0, 1, 0, 0], &[0, 0, 1, 0], &[0, 0, 0, 1]])
}

/// The 4x4 pattern whose digraph has a vertex with one arc in, two out.
pub fn inout_pattern() -> Pattern {
    Pattern::from_rows(&[&[1, 1, 0, 0], &[0, 1, 1, 1], &[0, 0, 1, 0], &[0, 0, 0, 1]])
}

/// The 0/1 matrix of [`deg4_pattern`]: 1 is a singular value of multiplicity
/// two and the SSVP holds.
pub fn deg4_witness() -> Witness {
    let matrix = DenseMatrix::from_rows(&[
        vec![1.0, 1.0, 1.0, 1.0],
        vec![0.0, 1.0, 0.0, 0.0],
        vec![0.0, 0.0, 1.0, 0.0],
        vec![0.0, 0.0, 0.0, 1.0],
    ])
    .expect("finite fixture");
    Witness::verified(matrix, &deg4_pattern(), 1.0, 2, true, &Tolerances::default())
        .expect("fixture verifies")
}

/// The explicit realization of [`inout_pattern`] with two entries sqrt(2):
/// sqrt(2) is a singular value of multiplicity two and the SSVP holds.
pub fn inout_witness() -> Witness {
    let s = 2f64.sqrt();
    let matrix = DenseMatrix::from_rows(&[
        vec![1.0, 1.0, 0.0, 0.0],
        vec![0.0, 1.0, 1.0, 1.0],
        vec![0.0, 0.0, s, 0.0],
        vec![0.0, 0.0, 0.0, s],
    ])
    .expect("finite fixture");
    Witness::verified(matrix, &inout_pattern(), s, 2, true, &Tolerances::default())
        .expect("fixture verifies")
}

/// The 3x4 pattern [I3 | ones column] whose bigraph is the subdivided claw.
pub fn subdivided_claw_pattern() -> Pattern {
    Pattern::from_rows(&[&[1, 0, 0, 1], &[0, 1, 0, 1], &[0, 0, 1, 1]])
}

/// The 0/1 matrix [I3 | ones column]: singular values 2, 1, 1 with the SSVP.
pub fn subdivided_claw_witness() -> Witness {
    let matrix = DenseMatrix::from_rows(&[
        vec![1.0, 0.0, 0.0, 1.0],
        vec![0.0, 1.0, 0.0, 1.0],
        vec![0.0, 0.0, 1.0, 1.0],
    ])
    .expect("finite fixture");
    Witness::verified(matrix, &subdivided_claw_pattern(), 1.0, 2, true, &Tolerances::default())
        .expect("fixture verifies")
}

/// Samples realizations of `p` and `q`, rescales each to unit largest
/// singular value, and returns their direct sum: the shared top value makes
/// 1 a singular value of multiplicity at least two. No SSVP is claimed (the
/// blocks share a singular value by design).
pub fn shared_sigma_direct_sum(
    p: &Pattern,
    q: &Pattern,
    seed: u64,
) -> Result<Witness, WitnessError> {
    if p.is_all_zero() || q.is_all_zero() {
        return Err(WitnessError::ZeroPattern);
    }
    let a = rescaled_realization(p, derive_seed(seed, 1));
    let b = rescaled_realization(q, derive_seed(seed, 2));
    let m = linalg::direct_sum(&a, &b);
    let requested = crate::pattern::direct_sum(p, q);
    Witness::verified(m, &requested, 1.0, 2, false, &Tolerances::default())
}

fn rescaled_realization(p: &Pattern, seed: u64) -> DenseMatrix {
    let a = random_realization(p, seed, true);
    let top = svd(&a).expect("finite sample").sigma[0];
    a.scale(1.0 / top)
}

/// Merges two columns supported on the same single row by an orthogonal
/// rotation and drops the zeroed one; singular values are preserved.
pub fn column_augment_reduce(
    b: &DenseMatrix,
    col_a: usize,
    col_b: usize,
) -> Result<DenseMatrix, WitnessError> {
    let row_a = single_support_row(b, col_a)?;
    let row_b = single_support_row(b, col_b)?;
    if row_a != row_b || col_a == col_b {
        return Err(WitnessError::DifferentSupportRows);
    }
    let c = b[(row_a, col_a)];
    let d = b[(row_a, col_b)];
    let norm = (c * c + d * d).sqrt();
    let mut out = DenseMatrix::zeros(b.rows(), b.cols() - 1);
    for i in 0..b.rows() {
        let mut jj = 0;
        for j in 0..b.cols() {
            if j == col_b {
                continue;
            }
            out[(i, jj)] = if j == col_a {
                if i == row_a {
                    norm
                } else {
                    0.0
                }
            } else {
                b[(i, j)]
            };
            jj += 1;
        }
    }
    Ok(out)
}

fn single_support_row(b: &DenseMatrix, col: usize) -> Result<usize, WitnessError> {
    let mut row = None;
    for i in 0..b.rows() {
        if b[(i, col)] != 0.0 {
            if row.is_some() {
                return Err(WitnessError::NotSingleSupport(col));
            }
            row = Some(i);
        }
    }
    row.ok_or(WitnessError::NotSingleSupport(col))
}

/// Appends a duplicate of a single-support column, splitting its weight by a
/// rotation so both copies are nonzero and singular values are preserved.
pub fn column_duplicate(a: &DenseMatrix, col: usize) -> Result<DenseMatrix, WitnessError> {
    let row = single_support_row(a, col)?;
    let v = a[(row, col)];
    let s = 0.5f64.sqrt();
    let mut out = DenseMatrix::zeros(a.rows(), a.cols() + 1);
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            out[(i, j)] = a[(i, j)];
        }
    }
    out[(row, col)] = v * s;
    out[(row, a.cols())] = -v * s;
    Ok(out)
}

/// An n-by-n orthogonal matrix whose pattern is the full lower Hessenberg
/// pattern: zero above the first superdiagonal, all other entries nonzero.
/// Built as a product of adjacent plane rotations with fixed generic angles
/// (0.6 + 0.1k for the k-th rotation) so fixtures are reproducible and every
/// required entry stays away from zero.
pub fn hessenberg_orthogonal(n: usize) -> DenseMatrix {
    assert!(n >= 1);
    let mut q = DenseMatrix::identity(n);
    for k in 1..n {
        // Left-multiply by the rotation acting on rows k-1 and k.
        let theta = 0.6 + 0.1 * k as f64;
        let (c, s) = (theta.cos(), theta.sin());
        for j in 0..n {
            let upper = q[(k - 1, j)];
            let lower = q[(k, j)];
            q[(k - 1, j)] = c * upper - s * lower;
            q[(k, j)] = s * upper + c * lower;
        }
    }
    q
}

/// The full lower Hessenberg pattern.
pub fn hessenberg_pattern(n: usize) -> Pattern {
    let mut p = Pattern::ones(n, n);
    for i in 0..n {
        for j in i + 2..n {
            p.set(i, j, false);
        }
    }
    p
}

// ---------------------------------------------------------------------------
// Newton continuation onto a superpattern with pinned singular values.
// ---------------------------------------------------------------------------

/// Coefficients (after the leading one) of the characteristic polynomial of
/// the small Gram matrix of `b`. Equality of these coefficients is equality
/// of the singular value multisets, and unlike sorted singular values the
/// map stays smooth at multiple values.
fn gram_char_coeffs(b: &DenseMatrix) -> Vec<f64> {
    let g = if b.rows() <= b.cols() {
        b.matmul(&b.transpose())
    } else {
        b.transpose().matmul(b)
    };
    let (vals, _) = symmetric_eig(&g).expect("Gram matrix is symmetric");
    poly_from_roots(&vals)
}

fn poly_from_roots(roots: &[f64]) -> Vec<f64> {
    let mut coeffs = vec![1.0];
    for &r in roots {
        let mut next = vec![0.0; coeffs.len() + 1];
        for (i, &c) in coeffs.iter().enumerate() {
            next[i] += c;
            next[i + 1] -= c * r;
        }
        coeffs = next;
    }
    coeffs.remove(0);
    coeffs
}

struct NewtonProblem {
    cells: Vec<(usize, usize)>,
    target: Vec<f64>,
    scale: Vec<f64>,
    rows: usize,
    cols: usize,
}

impl NewtonProblem {
    fn residual(&self, b: &DenseMatrix) -> Vec<f64> {
        gram_char_coeffs(b)
            .iter()
            .zip(&self.target)
            .zip(&self.scale)
            .map(|((c, t), s)| (c - t) / s)
            .collect()
    }

    fn assemble(&self, values: &[f64]) -> DenseMatrix {
        let mut b = DenseMatrix::zeros(self.rows, self.cols);
        for (&(i, j), &v) in self.cells.iter().zip(values) {
            b[(i, j)] = v;
        }
        b
    }
}

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Least-norm solution of `J d = -r` through the pseudo-inverse.
fn least_norm_step(j: &DenseMatrix, r: &[f64], tol: &Tolerances) -> Vec<f64> {
    let dec = svd(j).expect("Jacobian is finite");
    let scale = dec.sigma.first().copied().unwrap_or(0.0);
    let k = j.cols();
    let mut step = vec![0.0; k];
    for (idx, &s) in dec.sigma.iter().enumerate() {
        if s <= tol.rank_tol.max(1e-12) * scale || s == 0.0 {
            continue;
        }
        let mut coeff = 0.0;
        for (row, &rv) in r.iter().enumerate() {
            coeff -= dec.u[(row, idx)] * rv;
        }
        coeff /= s;
        for col in 0..k {
            step[col] += dec.v[(col, idx)] * coeff;
        }
    }
    step
}

/// Moves `a` onto the superpattern `s` while preserving all singular values:
/// damped Newton on the Gram characteristic coefficients over the cells of
/// `s`, started from `a + t0 * d` and restarted with halved `t0` on failure.
///
/// Returns `Ok(None)` when no attempt converges. The SSVP of `a` with
/// respect to `s` is the hypothesis under which the continuation is known to
/// reach a solution; it is checked up front. The degenerate call with `d`
/// zero and `s` equal to the pattern of `a` returns `a` unchanged.
pub fn liberation_newton(
    a: &DenseMatrix,
    d: &DenseMatrix,
    s: &Pattern,
    tol: &Tolerances,
    max_iter: usize,
) -> Result<Option<DenseMatrix>, WitnessError> {
    if !a.is_finite() || !d.is_finite() {
        return Err(WitnessError::HypothesisViolated("non-finite input".into()));
    }
    if d.rows() != a.rows() || d.cols() != a.cols() {
        return Err(WitnessError::HypothesisViolated("direction shape mismatch".into()));
    }
    let pat_a = pattern_of(a, 0.0);
    if is_superpattern(s, &pat_a) != Ok(true) {
        return Err(WitnessError::HypothesisViolated(
            "target is not a superpattern of the matrix pattern".into(),
        ));
    }
    if is_superpattern(s, &pattern_of(d, 0.0)) != Ok(true) {
        return Err(WitnessError::HypothesisViolated(
            "direction leaves the target pattern".into(),
        ));
    }
    if d.max_norm() == 0.0 && *s == pat_a {
        return Ok(Some(a.clone()));
    }
    let hypothesis =
        ssvp_wrt(a, s, tol).map_err(|e| WitnessError::HypothesisViolated(e.to_string()))?;
    if !hypothesis.holds {
        return Err(WitnessError::HypothesisViolated(format!(
            "SSVP with respect to the target pattern fails (nullity {})",
            hypothesis.nullity
        )));
    }

    let cells: Vec<(usize, usize)> = s.true_cells().collect();
    let target = gram_char_coeffs(a);
    let scale: Vec<f64> = target.iter().map(|t| t.abs().max(1.0)).collect();
    let problem = NewtonProblem { cells, target, scale, rows: a.rows(), cols: a.cols() };
    let sigma_ref = svd(a).expect("finite input").sigma;

    let mut t0 = 1e-2;
    for _restart in 0..8 {
        if let Some(b) = newton_attempt(a, d, &problem, t0, max_iter, tol) {
            // Direct verification: the pattern is exact and every singular
            // value matches the reference spectrum.
            let sig = svd(&b).expect("finite iterate").sigma;
            let sig_scale = sigma_ref.first().copied().unwrap_or(0.0).max(1.0);
            let spectrum_ok = sig
                .iter()
                .zip(&sigma_ref)
                .all(|(x, y)| (x - y).abs() <= 1e-9 * sig_scale);
            let pattern_ok = problem.cells.iter().all(|&(i, j)| b[(i, j)].abs() > 1e-8);
            if spectrum_ok && pattern_ok {
                return Ok(Some(b));
            }
        }
        t0 *= 0.5;
    }
    Ok(None)
}

fn newton_attempt(
    a: &DenseMatrix,
    d: &DenseMatrix,
    problem: &NewtonProblem,
    t0: f64,
    max_iter: usize,
    tol: &Tolerances,
) -> Option<DenseMatrix> {
    let mut values: Vec<f64> = problem
        .cells
        .iter()
        .map(|&(i, j)| a[(i, j)] + t0 * d[(i, j)])
        .collect();
    let mut residual = problem.residual(&problem.assemble(&values));
    let mut res_norm = norm2(&residual);

    for _ in 0..max_iter {
        if residual.iter().all(|r| r.abs() <= 1e-13) {
            return Some(problem.assemble(&values));
        }
        // Central finite differences on the coefficient map.
        let k = values.len();
        let eqs = residual.len();
        let mut jac = DenseMatrix::zeros(eqs, k);
        for col in 0..k {
            let h = 1e-6 * values[col].abs().max(1.0);
            let mut plus = values.clone();
            plus[col] += h;
            let mut minus = values.clone();
            minus[col] -= h;
            let rp = problem.residual(&problem.assemble(&plus));
            let rm = problem.residual(&problem.assemble(&minus));
            for row in 0..eqs {
                jac[(row, col)] = (rp[row] - rm[row]) / (2.0 * h);
            }
        }
        let step = least_norm_step(&jac, &residual, tol);
        if norm2(&step) == 0.0 {
            return None;
        }
        // Step-halving line search on the residual norm.
        let mut alpha = 1.0;
        let mut accepted = false;
        for _ in 0..25 {
            let trial: Vec<f64> =
                values.iter().zip(&step).map(|(v, s)| v + alpha * s).collect();
            let tr = problem.residual(&problem.assemble(&trial));
            let tn = norm2(&tr);
            if tn < res_norm * (1.0 - 1e-4 * alpha) || tn <= 1e-15 {
                values = trial;
                residual = tr;
                res_norm = tn;
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if !accepted {
            return None;
        }
    }
    if residual.iter().all(|r| r.abs() <= 1e-13) {
        return Some(problem.assemble(&values));
    }
    None
}

/// A tangent direction at `m0` supported on exactly the given cells: a
/// random combination of the nullspace of the normal-space restriction,
/// retried until every cell entry is bounded away from zero.
pub(crate) fn tangent_direction_on_cells(
    m0: &DenseMatrix,
    cells: &[(usize, usize)],
    seed: u64,
) -> Option<DenseMatrix> {
    use rand::{Rng, SeedableRng};
    if cells.is_empty() {
        return Some(DenseMatrix::zeros(m0.rows(), m0.cols()));
    }
    let norm = normal_space_basis(m0);
    let tol = Tolerances::default();
    let combos: Vec<Vec<f64>> = if norm.dim() == 0 {
        (0..cells.len())
            .map(|i| {
                let mut v = vec![0.0; cells.len()];
                v[i] = 1.0;
                v
            })
            .collect()
    } else {
        let g = DenseMatrix::from_fn(norm.dim(), cells.len(), |r, c| {
            let (i, j) = cells[c];
            norm.basis[r][(i, j)]
        });
        linalg::nullspace_basis(&g, &tol)
    };
    if combos.is_empty() {
        return None;
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(derive_seed(seed, 0x7a));
    for _ in 0..64 {
        let weights: Vec<f64> =
            (0..combos.len()).map(|_| rng.random_range(-1.0..1.0)).collect();
        let mut dvec = vec![0.0; cells.len()];
        for (w, basis_vec) in weights.iter().zip(&combos) {
            for (dst, &src) in dvec.iter_mut().zip(basis_vec) {
                *dst += w * src;
            }
        }
        let max = dvec.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
        if max == 0.0 {
            continue;
        }
        let min = dvec.iter().fold(f64::INFINITY, |acc, v| acc.min(v.abs()));
        if min >= 1e-3 * max {
            let mut dir = DenseMatrix::zeros(m0.rows(), m0.cols());
            for (&(i, j), &v) in cells.iter().zip(&dvec) {
                dir[(i, j)] = v / max;
            }
            return Some(dir);
        }
    }
    None
}

/// Liberates a block-diagonal seed onto the full pattern `target`,
/// producing a verified witness for `target_sigma` with multiplicity two
/// and the SSVP.
pub(crate) fn lift_block_seed(
    m0: &DenseMatrix,
    target: &Pattern,
    target_sigma: f64,
    seed: u64,
    tol: &Tolerances,
    max_iter: usize,
) -> Result<Option<Witness>, WitnessError> {
    let pat0 = pattern_of(m0, 0.0);
    let cells: Vec<(usize, usize)> =
        target.true_cells().filter(|&(i, j)| !pat0.get(i, j)).collect();
    let Some(dir) = tangent_direction_on_cells(m0, &cells, seed) else {
        return Ok(None);
    };
    match liberation_newton(m0, &dir, target, tol, max_iter)? {
        Some(matrix) => {
            Ok(Some(Witness::verified(matrix, target, target_sigma, 2, true, tol)?))
        }
        None => Ok(None),
    }
}

/// Distinct diagonal filler values avoiding a forbidden set of magnitudes.
pub(crate) fn filler_values(count: usize, forbidden: &[f64], gap: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(count);
    let mut candidate = 1.25;
    while out.len() < count {
        let clear =
            forbidden.iter().chain(out.iter()).all(|&f| (f - candidate).abs() > gap);
        if clear {
            out.push(candidate);
        }
        candidate += 0.1;
    }
    out
}

/// Witness for the two-block pattern [[P, E], [F, Q]]: samples nonnegative
/// realizations of the diagonal blocks sharing their top singular value,
/// then liberates across the coupling cells of E and F.
pub fn sumplus_witness(
    p: &Pattern,
    q: &Pattern,
    e: &Pattern,
    f: &Pattern,
    seed: u64,
) -> Result<Option<Witness>, WitnessError> {
    let m = p.rows();
    let n = q.rows();
    if p.cols() != m || q.cols() != n {
        return Err(WitnessError::HypothesisViolated(
            "diagonal blocks must be square".into(),
        ));
    }
    if e.rows() != m || e.cols() != n || f.rows() != n || f.cols() != m {
        return Err(WitnessError::HypothesisViolated(
            "coupling block shapes mismatch".into(),
        ));
    }
    if crate::term_rank::term_rank(p) != m || crate::term_rank::term_rank(q) != n {
        return Err(WitnessError::HypothesisViolated(
            "blocks must have full term-rank".into(),
        ));
    }
    if !crate::structure::is_connected(&crate::structure::bigraph_of(p))
        || !crate::structure::is_connected(&crate::structure::bigraph_of(q))
    {
        return Err(WitnessError::HypothesisViolated(
            "block bigraphs must be connected".into(),
        ));
    }
    if e.weight() + f.weight() < 2 {
        // At least two coupling entries are needed in E and F combined;
        // both cells sitting in one block is read as acceptable.
        return Err(WitnessError::HypothesisViolated(
            "fewer than two coupling cells in E and F combined".into(),
        ));
    }

    // Target pattern [[P, E], [F, Q]].
    let mut target = Pattern::zeros(m + n, m + n);
    for (i, j) in p.true_cells() {
        target.set(i, j, true);
    }
    for (i, j) in e.true_cells() {
        target.set(i, m + j, true);
    }
    for (i, j) in f.true_cells() {
        target.set(m + i, j, true);
    }
    for (i, j) in q.true_cells() {
        target.set(m + i, m + j, true);
    }

    let tol = Tolerances::default();
    for attempt in 0..50u64 {
        let s = derive_seed(seed, attempt);
        let a = nonneg_unit_top_realization(p, derive_seed(s, 3));
        let b = nonneg_unit_top_realization(q, derive_seed(s, 4));
        if spectra_collide(&a, &b, &tol) {
            continue;
        }
        let m0 = linalg::direct_sum(&a, &b);
        match lift_block_seed(&m0, &target, 1.0, s, &tol, 60) {
            Ok(Some(w)) => return Ok(Some(w)),
            Ok(None) | Err(WitnessError::VerificationFailed(_)) => continue,
            Err(WitnessError::HypothesisViolated(_)) => continue,
            Err(other) => return Err(other),
        }
    }
    Ok(None)
}

fn nonneg_unit_top_realization(p: &Pattern, seed: u64) -> DenseMatrix {
    let a = random_realization(p, seed, false);
    let top = svd(&a).expect("finite sample").sigma[0];
    a.scale(1.0 / top)
}

/// True when the blocks share any singular value besides the deliberate
/// common top value at 1, or a block's top value is not simple.
fn spectra_collide(a: &DenseMatrix, b: &DenseMatrix, tol: &Tolerances) -> bool {
    let sa = svd(a).expect("finite").sigma;
    let sb = svd(b).expect("finite").sigma;
    let gap = 10.0 * tol.sv_cluster_tol;
    for (i, &x) in sa.iter().enumerate() {
        for (j, &y) in sb.iter().enumerate() {
            if i == 0 && j == 0 {
                continue;
            }
            if (x - y).abs() <= gap {
                return true;
            }
        }
    }
    sa.len() > 1 && (sa[0] - sa[1]).abs() <= gap
        || sb.len() > 1 && (sb[0] - sb[1]).abs() <= gap
}

/// Witness for a square standard-form pattern whose digraph has a weak
/// cycle: the two cycle cells at one cycle vertex are dropped to produce a
/// scalar-plus-path direct sum sharing singular value 1, which is then
/// liberated back onto the full pattern.
pub fn weak_cycle_witness(w: &Pattern, seed: u64) -> Result<Option<Witness>, WitnessError> {
    let digraph =
        digraph_of(w).map_err(|e| WitnessError::HypothesisViolated(e.to_string()))?;
    let Some(cycle) = find_weak_cycle(&digraph) else {
        return Err(WitnessError::NoWeakCycle);
    };
    let n = w.rows();
    let tol = Tolerances::default();

    // Rotate the cycle so the lowest vertex comes first.
    let pivot = cycle
        .iter()
        .enumerate()
        .min_by_key(|&(_, &v)| v)
        .map(|(idx, _)| idx)
        .unwrap();
    let cycle: Vec<usize> =
        (0..cycle.len()).map(|k| cycle[(pivot + k) % cycle.len()]).collect();
    let v = cycle[0];
    let path: Vec<usize> = cycle[1..].to_vec();
    let rest: Vec<usize> = (0..n).filter(|x| !cycle.contains(x)).collect();

    // Path block pattern: diagonal plus the arcs along the cycle remnant.
    let mut path_pattern = Pattern::identity(path.len().max(1));
    let pos_of = |x: usize| path.iter().position(|&y| y == x);
    for pair in path.windows(2) {
        let (x, y) = (pair[0], pair[1]);
        if digraph.arcs.contains(&(x, y)) {
            path_pattern.set(pos_of(x).unwrap(), pos_of(y).unwrap(), true);
        } else {
            path_pattern.set(pos_of(y).unwrap(), pos_of(x).unwrap(), true);
        }
    }

    for attempt in 0..50u64 {
        let s = derive_seed(seed, attempt.wrapping_mul(11));
        let path_block = if path.is_empty() {
            None
        } else {
            Some(nonneg_unit_top_realization(&path_pattern, derive_seed(s, 5)))
        };
        let mut forbidden = vec![1.0];
        if let Some(pb) = &path_block {
            let sig = svd(pb).expect("finite").sigma;
            if sig.len() > 1 && (sig[0] - sig[1]).abs() <= 10.0 * tol.sv_cluster_tol {
                continue; // the shared top value must be simple in the block
            }
            forbidden.extend(sig.iter().copied());
        }
        let fillers = filler_values(rest.len(), &forbidden, 0.02);

        let mut m0 = DenseMatrix::zeros(n, n);
        m0[(v, v)] = 1.0;
        if let Some(pb) = &path_block {
            for (a_idx, &orig_i) in path.iter().enumerate() {
                for (b_idx, &orig_j) in path.iter().enumerate() {
                    m0[(orig_i, orig_j)] = pb[(a_idx, b_idx)];
                }
            }
        }
        for (&orig, &val) in rest.iter().zip(&fillers) {
            m0[(orig, orig)] = val;
        }

        match lift_block_seed(&m0, w, 1.0, s, &tol, 60) {
            Ok(Some(witness)) => return Ok(Some(witness)),
            Ok(None) | Err(WitnessError::VerificationFailed(_)) => continue,
            Err(WitnessError::HypothesisViolated(_)) => continue,
            Err(other) => return Err(other),
        }
    }
    Ok(None)
}

/// Witness for a square standard-form pattern whose digraph has a vertex
/// with in-degree plus out-degree at least three: a fixed 4x4 block with a
/// multiple singular value is planted on the branch vertex and liberated
/// onto the full pattern.
pub fn branch_vertex_witness(
    w: &Pattern,
    seed: u64,
) -> Result<Option<Witness>, WitnessError> {
    let digraph =
        digraph_of(w).map_err(|e| WitnessError::HypothesisViolated(e.to_string()))?;
    let n = w.rows();
    let mut choice: Option<(usize, Vec<usize>, Vec<usize>)> = None;
    for v in 0..n {
        let outs: Vec<usize> = (0..n).filter(|&j| digraph.arcs.contains(&(v, j))).collect();
        let ins: Vec<usize> = (0..n).filter(|&i| digraph.arcs.contains(&(i, v))).collect();
        if outs.len() + ins.len() >= 3 {
            choice = Some((v, outs, ins));
            break;
        }
    }
    let Some((v, outs, ins)) = choice else {
        return Err(WitnessError::HypothesisViolated(
            "no vertex with in-degree plus out-degree at least three".into(),
        ));
    };

    // The 4x4 block, its vertex mapping, and the target value. Out-degree 3
    // plants the all-row block, mixed degrees the in/out block, transposed
    // for the mirrored configurations.
    let (block, locals, target_sigma) = if outs.len() >= 3 {
        (deg4_witness().matrix, vec![v, outs[0], outs[1], outs[2]], 1.0)
    } else if outs.len() == 2 {
        (inout_witness().matrix, vec![ins[0], v, outs[0], outs[1]], 2f64.sqrt())
    } else if outs.len() == 1 {
        (
            inout_witness().matrix.transpose(),
            vec![outs[0], v, ins[0], ins[1]],
            2f64.sqrt(),
        )
    } else {
        (deg4_witness().matrix.transpose(), vec![v, ins[0], ins[1], ins[2]], 1.0)
    };

    let rest: Vec<usize> = (0..n).filter(|x| !locals.contains(x)).collect();
    let block_sigma = svd(&block).expect("finite").sigma;
    let tol = Tolerances::default();

    for attempt in 0..20u64 {
        let s = derive_seed(seed, attempt.wrapping_mul(17).wrapping_add(7));
        let fillers = filler_values(rest.len(), &block_sigma, 0.02);
        let mut m0 = DenseMatrix::zeros(n, n);
        for (a_idx, &orig_i) in locals.iter().enumerate() {
            for (b_idx, &orig_j) in locals.iter().enumerate() {
                m0[(orig_i, orig_j)] = block[(a_idx, b_idx)];
            }
        }
        for (&orig, &val) in rest.iter().zip(&fillers) {
            m0[(orig, orig)] = val;
        }
        match lift_block_seed(&m0, w, target_sigma, s, &tol, 60) {
            Ok(Some(witness)) => return Ok(Some(witness)),
            Ok(None) | Err(WitnessError::VerificationFailed(_)) => continue,
            Err(WitnessError::HypothesisViolated(_)) => continue,
            Err(other) => return Err(other),
        }
    }
    Ok(None)
}

/// Borders an orthogonal-rowed matrix: pads with zero columns, liberates the
/// top block onto the upper part of `s`, then stacks sampled border rows.
/// Interlacing guarantees the row length survives as a singular value of
/// multiplicity at least n - k.
pub fn orthogonal_border(
    q: &DenseMatrix,
    k: usize,
    p: usize,
    s: &Pattern,
    seed: u64,
) -> Result<Witness, WitnessError> {
    let n = q.rows();
    if q.cols() != n {
        return Err(WitnessError::HypothesisViolated("Q must be square".into()));
    }
    let gram = q.matmul(&q.transpose());
    let ell2 = (0..n).map(|i| gram[(i, i)]).sum::<f64>() / n as f64;
    let defect = gram.sub(&DenseMatrix::identity(n).scale(ell2)).max_norm();
    if defect > 1e-10 * ell2.max(1.0) {
        return Err(WitnessError::HypothesisViolated(
            "rows are not mutually orthogonal with equal length".into(),
        ));
    }
    let ell = ell2.sqrt();
    let tol = Tolerances::default();
    if !ssvp_check(q, &tol)
        .map_err(|e| WitnessError::HypothesisViolated(e.to_string()))?
        .holds
    {
        return Err(WitnessError::HypothesisViolated("Q does not have the SSVP".into()));
    }
    if k >= n || p < k {
        return Err(WitnessError::HypothesisViolated("need k < n and p >= k".into()));
    }
    if n - k < 2 {
        return Err(WitnessError::HypothesisViolated(
            "claimed multiplicity n - k would be below two".into(),
        ));
    }
    if s.rows() != n + k || s.cols() != n + p {
        return Err(WitnessError::HypothesisViolated(format!(
            "superpattern must be {}x{}, got {}x{}",
            n + k,
            n + p,
            s.rows(),
            s.cols()
        )));
    }
    let pat_q = pattern_of(q, 0.0);
    for (i, j) in pat_q.true_cells() {
        if !s.get(i, j) {
            return Err(WitnessError::HypothesisViolated(
                "S is not a superpattern of the padded block pattern".into(),
            ));
        }
    }

    // Top block: [Q | O] liberated onto the upper n rows of S.
    let padded = if p == 0 {
        q.clone()
    } else {
        q.hstack(&DenseMatrix::zeros(n, p))
    };
    let s_top = s.submatrix(&(0..n).collect::<Vec<_>>(), &(0..n + p).collect::<Vec<_>>());
    let top = if s_top == pattern_of(&padded, 0.0) {
        padded
    } else {
        let cells: Vec<(usize, usize)> = s_top
            .true_cells()
            .filter(|&(i, j)| padded[(i, j)] == 0.0)
            .collect();
        let dir = tangent_direction_on_cells(&padded, &cells, derive_seed(seed, 21))
            .ok_or(WitnessError::NonConvergence)?;
        liberation_newton(&padded, &dir, &s_top, &tol, 60)?
            .ok_or(WitnessError::NonConvergence)?
    };

    if k == 0 {
        return Witness::verified(top, s, ell, n, false, &tol);
    }
    let bottom_pattern = s.submatrix(
        &(n..n + k).collect::<Vec<_>>(),
        &(0..n + p).collect::<Vec<_>>(),
    );
    let border = random_realization(&bottom_pattern, derive_seed(seed, 22), true);
    let stacked = top.vstack(&border);
    Witness::verified(stacked, s, ell, n - k, false, &tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn deg4_fixture() {
        let w = deg4_witness();
        assert_eq!(w.target_sigma, 1.0);
        assert_eq!(multiplicity(&w.matrix, 1.0, &Tolerances::default()), 2);
        assert_eq!(pattern_of(&w.matrix, 1e-12), deg4_pattern());
    }

    #[test]
    fn inout_fixture() {
        let w = inout_witness();
        let s = 2f64.sqrt();
        assert_eq!(multiplicity(&w.matrix, s, &Tolerances::default()), 2);
        let d = digraph_of(&pattern_of(&w.matrix, 1e-12)).unwrap();
        assert_eq!(
            d.arcs,
            std::collections::BTreeSet::from([(0, 1), (1, 2), (1, 3)])
        );
    }

    #[test]
    fn claw_fixture() {
        let w = subdivided_claw_witness();
        let sig = svd(&w.matrix).unwrap().sigma;
        assert!((sig[0] - 2.0).abs() <= 1e-12);
        assert!((sig[1] - 1.0).abs() <= 1e-12);
        assert!((sig[2] - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn shared_sigma_examples() {
        let one = Pattern::ones(1, 1);
        let w = shared_sigma_direct_sum(&one, &one, 0).unwrap();
        assert_eq!(w.matrix.rows(), 2);
        assert!(!w.ssvp_claimed);

        let row = Pattern::ones(1, 2);
        let w = shared_sigma_direct_sum(&row, &row, 1).unwrap();
        assert_eq!(w.matrix.rows(), 2);
        assert_eq!(w.matrix.cols(), 4);

        let paw =
            Pattern::from_rows(&[&[1, 1, 0, 0], &[0, 1, 0, 0], &[0, 1, 1, 1], &[0, 0, 0, 1]]);
        let w = shared_sigma_direct_sum(&paw, &one, 2).unwrap();
        assert_eq!(w.matrix.rows(), 5);
        assert!(multiplicity(&w.matrix, 1.0, &Tolerances::default()) >= 2);

        assert_eq!(
            shared_sigma_direct_sum(&Pattern::zeros(2, 2), &one, 0).unwrap_err(),
            WitnessError::ZeroPattern
        );
    }

    #[test]
    fn column_ops_examples() {
        let b = DenseMatrix::from_rows(&[vec![3.0, 4.0], vec![0.0, 0.0]]).unwrap();
        let merged = column_augment_reduce(&b, 0, 1).unwrap();
        assert_eq!(merged.cols(), 1);
        assert!((merged[(0, 0)] - 5.0).abs() <= 1e-12);

        let c = DenseMatrix::from_rows(&[vec![1.0, 1.0], vec![0.0, 0.0]]).unwrap();
        let merged = column_augment_reduce(&c, 0, 1).unwrap();
        assert!((merged[(0, 0)] - 2f64.sqrt()).abs() <= 1e-12);

        let diff = DenseMatrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        assert_eq!(
            column_augment_reduce(&diff, 0, 1).unwrap_err(),
            WitnessError::DifferentSupportRows
        );

        let two = DenseMatrix::from_rows(&[vec![2.0]]).unwrap();
        let dup = column_duplicate(&two, 0).unwrap();
        assert!((dup[(0, 0)] - 2f64.sqrt()).abs() <= 1e-12);
        assert!((dup[(0, 1)] + 2f64.sqrt()).abs() <= 1e-12);
        let sig = svd(&dup).unwrap().sigma;
        assert!((sig[0] - 2.0).abs() <= 1e-12);

        let support2 = DenseMatrix::from_rows(&[vec![1.0], vec![1.0]]).unwrap();
        assert_eq!(
            column_duplicate(&support2, 0).unwrap_err(),
            WitnessError::NotSingleSupport(0)
        );
    }

    #[test]
    fn duplicate_then_reduce_round_trip() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(71);
        for _ in 0..100 {
            let m = rng.random_range(1..=5);
            let n = rng.random_range(1..=7);
            let mut a = DenseMatrix::from_fn(m, n, |_, _| {
                if rng.random::<f64>() < 0.5 {
                    0.0
                } else {
                    rng.random_range(0.5..2.0)
                }
            });
            let col = rng.random_range(0..n);
            let row = rng.random_range(0..m);
            for i in 0..m {
                a[(i, col)] = 0.0;
            }
            a[(row, col)] = rng.random_range(0.5..2.0);

            let before = svd(&a).unwrap().sigma;
            let dup = column_duplicate(&a, col).unwrap();
            let back = column_augment_reduce(&dup, col, n).unwrap();
            let after = svd(&back).unwrap().sigma;
            for (x, y) in before.iter().zip(&after) {
                assert!((x - y).abs() <= 1e-12, "spectrum drift {x} vs {y}");
            }
        }
    }

    #[test]
    fn hessenberg_small() {
        assert_eq!(hessenberg_orthogonal(1), DenseMatrix::identity(1));
        let tol = Tolerances::default();
        for n in 2..=6 {
            let q = hessenberg_orthogonal(n);
            let defect =
                q.matmul(&q.transpose()).sub(&DenseMatrix::identity(n)).max_norm();
            assert!(defect <= 1e-12, "orthogonality defect {defect} at n={n}");
            assert_eq!(pattern_of(&q, 1e-12), hessenberg_pattern(n));
            assert!(ssvp_check(&q, &tol).unwrap().holds, "SSVP at n={n}");
        }
    }

    #[test]
    fn liberation_diag_to_full() {
        let tol = Tolerances::default();
        let a = DenseMatrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 2.0]]).unwrap();
        let d = DenseMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let s = Pattern::ones(2, 2);
        let b = liberation_newton(&a, &d, &s, &tol, 60).unwrap().expect("converges");
        assert_eq!(pattern_of(&b, 1e-12), s);
        let sig = svd(&b).unwrap().sigma;
        assert!((sig[0] - 2.0).abs() <= 1e-9);
        assert!((sig[1] - 1.0).abs() <= 1e-9);
    }

    #[test]
    fn liberation_zero_step_fixed_point() {
        let tol = Tolerances::default();
        let a = DenseMatrix::identity(2);
        let d = DenseMatrix::zeros(2, 2);
        let b = liberation_newton(&a, &d, &Pattern::identity(2), &tol, 10)
            .unwrap()
            .expect("fixed point");
        assert_eq!(b, a);
    }

    #[test]
    fn liberation_rejects_bad_inputs() {
        let tol = Tolerances::default();
        let a = DenseMatrix::identity(2);
        let d = DenseMatrix::zeros(2, 2);
        assert!(matches!(
            liberation_newton(&a, &d, &Pattern::zeros(2, 2), &tol, 10),
            Err(WitnessError::HypothesisViolated(_))
        ));
        // The identity lacks the property with respect to a one-cell
        // extension, so the hypothesis gate trips.
        let dir = DenseMatrix::from_rows(&[vec![0.0, 1.0], vec![0.0, 0.0]]).unwrap();
        let mut s = Pattern::identity(2);
        s.set(0, 1, true);
        assert!(matches!(
            liberation_newton(&a, &dir, &s, &tol, 10),
            Err(WitnessError::HypothesisViolated(_))
        ));
    }

    #[test]
    fn sumplus_scalar_blocks() {
        let one = Pattern::ones(1, 1);
        let w = sumplus_witness(&one, &one, &one, &one, 0)
            .unwrap()
            .expect("2x2 full pattern witness");
        assert_eq!(pattern_of(&w.matrix, 1e-12), Pattern::ones(2, 2));
        assert!(multiplicity(&w.matrix, 1.0, &Tolerances::default()) >= 2);
        assert!(w.ssvp_claimed);
    }

    #[test]
    fn sumplus_rejects_single_coupling_cell() {
        let one = Pattern::ones(1, 1);
        let zero = Pattern::zeros(1, 1);
        assert!(matches!(
            sumplus_witness(&one, &one, &zero, &zero, 0),
            Err(WitnessError::HypothesisViolated(_))
        ));
    }

    #[test]
    fn weak_cycle_two_by_two() {
        let w = weak_cycle_witness(&Pattern::ones(2, 2), 0)
            .unwrap()
            .expect("full 2x2 has a weak 2-cycle witness");
        assert_eq!(pattern_of(&w.matrix, 1e-12), Pattern::ones(2, 2));
        assert!(multiplicity(&w.matrix, 1.0, &Tolerances::default()) >= 2);
    }

    #[test]
    fn weak_cycle_triangle() {
        let p = Pattern::from_rows(&[&[1, 1, 0], &[0, 1, 1], &[1, 0, 1]]);
        let w = weak_cycle_witness(&p, 3).unwrap().expect("triangle witness");
        assert_eq!(pattern_of(&w.matrix, 1e-12), p);
        assert!(multiplicity(&w.matrix, 1.0, &Tolerances::default()) >= 2);
    }

    #[test]
    fn weak_cycle_requires_cycle() {
        assert_eq!(
            weak_cycle_witness(&Pattern::identity(3), 0).unwrap_err(),
            WitnessError::NoWeakCycle
        );
    }

    #[test]
    fn branch_vertex_on_deg4_pattern() {
        let w = branch_vertex_witness(&deg4_pattern(), 0).unwrap().expect("deg4 core");
        assert_eq!(pattern_of(&w.matrix, 1e-12), deg4_pattern());
        assert!(multiplicity(&w.matrix, w.target_sigma, &Tolerances::default()) >= 2);
    }

    #[test]
    fn orthogonal_border_no_rows_keeps_multiplicity() {
        let q = hessenberg_orthogonal(4);
        let s = hessenberg_pattern(4);
        let w = orthogonal_border(&q, 0, 0, &s, 0).unwrap();
        assert_eq!(w.claimed_multiplicity, 4);
        assert!(multiplicity(&w.matrix, 1.0, &Tolerances::default()) >= 4);
    }

    #[test]
    fn orthogonal_border_rejects_non_superpattern() {
        let q = hessenberg_orthogonal(4);
        let s = Pattern::zeros(5, 5);
        assert!(matches!(
            orthogonal_border(&q, 1, 1, &s, 0),
            Err(WitnessError::HypothesisViolated(_))
        ));
    }
}
