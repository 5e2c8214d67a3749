//! Zero-nonzero patterns and their structural operations.
//!
//! A [`Pattern`] records which entries of a real matrix are nonzero. Patterns
//! are parsed from a plain text grid of `0`/`1` rows and support the
//! operations used throughout the rest of the crate: direct sums,
//! superpattern tests, and row/column permutations.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PatternError {
    #[error("empty input")]
    EmptyInput,
    #[error("row {0} has a different length than row 0")]
    RaggedRows(usize),
    #[error("invalid character {ch:?} at row {row}, column {col}")]
    InvalidCharacter { row: usize, col: usize, ch: char },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("permutation is not a bijection on its index range")]
    InvalidPermutation,
}

/// An m-by-n grid of booleans; `true` marks a nonzero position.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Pattern {
    m: usize,
    n: usize,
    cells: Vec<bool>,
}

impl Pattern {
    /// Builds a pattern from a row-major cell vector.
    ///
    /// Panics if `cells.len() != m * n` or a dimension is zero; callers
    /// construct patterns from validated data.
    pub fn new(m: usize, n: usize, cells: Vec<bool>) -> Self {
        assert!(m >= 1 && n >= 1, "pattern dimensions must be positive");
        assert_eq!(cells.len(), m * n, "cell vector length must be m*n");
        Pattern { m, n, cells }
    }

    pub fn zeros(m: usize, n: usize) -> Self {
        Pattern::new(m, n, vec![false; m * n])
    }

    pub fn ones(m: usize, n: usize) -> Self {
        Pattern::new(m, n, vec![true; m * n])
    }

    pub fn identity(n: usize) -> Self {
        let mut p = Pattern::zeros(n, n);
        for i in 0..n {
            p.set(i, i, true);
        }
        p
    }

    pub fn from_fn_cells(m: usize, n: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut p = Pattern::zeros(m, n);
        for i in 0..m {
            for j in 0..n {
                p.set(i, j, f(i, j));
            }
        }
        p
    }

    /// Builds a pattern from 0/1 integer rows; handy in tests and fixtures.
    pub fn from_rows(rows: &[&[u8]]) -> Self {
        let m = rows.len();
        let n = rows[0].len();
        let mut cells = Vec::with_capacity(m * n);
        for row in rows {
            assert_eq!(row.len(), n, "all rows must have equal length");
            cells.extend(row.iter().map(|&v| v != 0));
        }
        Pattern::new(m, n, cells)
    }

    pub fn rows(&self) -> usize {
        self.m
    }

    pub fn cols(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.cells[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: bool) {
        self.cells[i * self.n + j] = value;
    }

    /// Number of true cells.
    pub fn weight(&self) -> usize {
        self.cells.iter().filter(|&&c| c).count()
    }

    /// Row-major iterator over the true cells.
    pub fn true_cells(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.n;
        self.cells
            .iter()
            .enumerate()
            .filter(|(_, &c)| c)
            .map(move |(k, _)| (k / n, k % n))
    }

    pub fn transpose(&self) -> Pattern {
        let mut t = Pattern::zeros(self.n, self.m);
        for (i, j) in self.true_cells() {
            t.set(j, i, true);
        }
        t
    }

    pub fn is_all_zero(&self) -> bool {
        self.cells.iter().all(|&c| !c)
    }

    pub fn col_support(&self, j: usize) -> usize {
        (0..self.m).filter(|&i| self.get(i, j)).count()
    }

    pub fn row_support(&self, i: usize) -> usize {
        (0..self.n).filter(|&j| self.get(i, j)).count()
    }

    /// Principal-style submatrix selection by explicit row and column index lists.
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Pattern {
        let mut p = Pattern::zeros(rows.len().max(1), cols.len().max(1));
        if rows.is_empty() || cols.is_empty() {
            // Degenerate selection collapses to a 1x1 zero pattern; callers
            // guard against this where it matters.
            return p;
        }
        for (a, &i) in rows.iter().enumerate() {
            for (b, &j) in cols.iter().enumerate() {
                p.set(a, b, self.get(i, j));
            }
        }
        p
    }

    /// Renders to the text format accepted by [`parse_pattern`].
    pub fn render(&self) -> String {
        let mut out = String::with_capacity(self.m * (self.n + 1));
        for i in 0..self.m {
            for j in 0..self.n {
                out.push(if self.get(i, j) { '1' } else { '0' });
            }
            if i + 1 < self.m {
                out.push('\n');
            }
        }
        out
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// A pair of row/column permutations acting on a pattern.
///
/// `apply` reads entry `(row_perm[i], col_perm[j])` into position `(i, j)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatternPermutation {
    pub row_perm: Vec<usize>,
    pub col_perm: Vec<usize>,
}

impl PatternPermutation {
    pub fn new(row_perm: Vec<usize>, col_perm: Vec<usize>) -> Result<Self, PatternError> {
        if !is_bijection(&row_perm) || !is_bijection(&col_perm) {
            return Err(PatternError::InvalidPermutation);
        }
        Ok(PatternPermutation { row_perm, col_perm })
    }

    pub fn identity(m: usize, n: usize) -> Self {
        PatternPermutation {
            row_perm: (0..m).collect(),
            col_perm: (0..n).collect(),
        }
    }

    pub fn inverse(&self) -> Self {
        PatternPermutation {
            row_perm: invert(&self.row_perm),
            col_perm: invert(&self.col_perm),
        }
    }
}

fn is_bijection(perm: &[usize]) -> bool {
    let mut seen = vec![false; perm.len()];
    for &p in perm {
        if p >= perm.len() || seen[p] {
            return false;
        }
        seen[p] = true;
    }
    true
}

fn invert(perm: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; perm.len()];
    for (i, &p) in perm.iter().enumerate() {
        inv[p] = i;
    }
    inv
}

/// Parses the pattern text format: rows of `0`/`1` characters, optional
/// interior whitespace, and an optional leading `m n` header that is ignored
/// when consistent with the grid that follows.
pub fn parse_pattern(text: &str) -> Result<Pattern, PatternError> {
    let lines: Vec<&str> = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .collect();
    if lines.is_empty() {
        return Err(PatternError::EmptyInput);
    }

    // Header detection: first line is exactly two positive integers that
    // agree with the dimensions of the remaining grid.
    if let Some(body) = strip_consistent_header(&lines) {
        return parse_rows(&body);
    }
    parse_rows(&lines)
}

fn strip_consistent_header<'a>(lines: &[&'a str]) -> Option<Vec<&'a str>> {
    let tokens: Vec<&str> = lines[0].split_whitespace().collect();
    if tokens.len() != 2 {
        return None;
    }
    let m: usize = tokens[0].parse().ok()?;
    let n: usize = tokens[1].parse().ok()?;
    if m == 0 || n == 0 || lines.len() != m + 1 {
        return None;
    }
    let body: Vec<&str> = lines[1..].to_vec();
    for row in &body {
        let width = row.chars().filter(|c| !c.is_whitespace()).count();
        if width != n {
            return None;
        }
    }
    Some(body)
}

fn parse_rows(lines: &[&str]) -> Result<Pattern, PatternError> {
    let mut rows: Vec<Vec<bool>> = Vec::with_capacity(lines.len());
    for (i, line) in lines.iter().enumerate() {
        let mut row = Vec::new();
        for (col, ch) in line.chars().filter(|c| !c.is_whitespace()).enumerate() {
            match ch {
                '0' => row.push(false),
                '1' => row.push(true),
                _ => return Err(PatternError::InvalidCharacter { row: i, col, ch }),
            }
        }
        if i > 0 && row.len() != rows[0].len() {
            return Err(PatternError::RaggedRows(i));
        }
        rows.push(row);
    }
    if rows[0].is_empty() {
        return Err(PatternError::EmptyInput);
    }
    let m = rows.len();
    let n = rows[0].len();
    Ok(Pattern::new(m, n, rows.into_iter().flatten().collect()))
}

/// Block-diagonal direct sum: `P` top-left, `Q` bottom-right.
pub fn direct_sum(p: &Pattern, q: &Pattern) -> Pattern {
    let mut out = Pattern::zeros(p.rows() + q.rows(), p.cols() + q.cols());
    for (i, j) in p.true_cells() {
        out.set(i, j, true);
    }
    for (i, j) in q.true_cells() {
        out.set(p.rows() + i, p.cols() + j, true);
    }
    out
}

/// True iff every true cell of `p` is true in `s`.
pub fn is_superpattern(s: &Pattern, p: &Pattern) -> Result<bool, PatternError> {
    if s.rows() != p.rows() || s.cols() != p.cols() {
        return Err(PatternError::DimensionMismatch(format!(
            "{}x{} vs {}x{}",
            s.rows(),
            s.cols(),
            p.rows(),
            p.cols()
        )));
    }
    Ok(p.true_cells().all(|(i, j)| s.get(i, j)))
}

/// Applies a permutation pair: `result[i, j] = p[row_perm[i], col_perm[j]]`.
pub fn apply_permutation(p: &Pattern, perm: &PatternPermutation) -> Result<Pattern, PatternError> {
    if perm.row_perm.len() != p.rows() || perm.col_perm.len() != p.cols() {
        return Err(PatternError::DimensionMismatch(format!(
            "permutation sized {}x{} applied to {}x{} pattern",
            perm.row_perm.len(),
            perm.col_perm.len(),
            p.rows(),
            p.cols()
        )));
    }
    let mut out = Pattern::zeros(p.rows(), p.cols());
    for i in 0..p.rows() {
        for j in 0..p.cols() {
            out.set(i, j, p.get(perm.row_perm[i], perm.col_perm[j]));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_identity() {
        let p = parse_pattern("10\n01").unwrap();
        assert_eq!(p, Pattern::identity(2));
    }

    #[test]
    fn parse_deg4_pattern() {
        let p = parse_pattern("1111\n0100\n0010\n0001").unwrap();
        assert_eq!(p.rows(), 4);
        assert_eq!(p.weight(), 7);
        assert!(p.get(0, 3));
        assert!(!p.get(1, 0));
    }

    #[test]
    fn parse_ragged_rows() {
        assert_eq!(parse_pattern("10\n0"), Err(PatternError::RaggedRows(1)));
    }

    #[test]
    fn parse_invalid_character() {
        match parse_pattern("10\n0x") {
            Err(PatternError::InvalidCharacter { row: 1, col: 1, ch: 'x' }) => (),
            other => panic!("unexpected result {other:?}"),
        }
    }

    #[test]
    fn parse_empty() {
        assert_eq!(parse_pattern("   \n"), Err(PatternError::EmptyInput));
    }

    #[test]
    fn header_is_stripped_when_consistent() {
        let with = parse_pattern("2 2\n10\n01").unwrap();
        assert_eq!(with, Pattern::identity(2));
        // A bare "1 1" cannot be a header (no grid follows), so it is a row.
        let row = parse_pattern("1 1").unwrap();
        assert_eq!(row, Pattern::ones(1, 2));
    }

    #[test]
    fn render_round_trips() {
        let p = parse_pattern("1111\n0100\n0010\n0001").unwrap();
        assert_eq!(parse_pattern(&p.render()).unwrap(), p);
    }

    #[test]
    fn direct_sum_basic() {
        let one = Pattern::ones(1, 1);
        assert_eq!(direct_sum(&one, &one), Pattern::identity(2));
        let row = Pattern::ones(1, 2);
        assert_eq!(direct_sum(&one, &row), parse_pattern("100\n011").unwrap());
    }

    #[test]
    fn direct_sum_isolated_cell() {
        let deg4 = parse_pattern("1111\n0100\n0010\n0001").unwrap();
        let s = direct_sum(&deg4, &Pattern::ones(1, 1));
        assert_eq!(s.rows(), 5);
        assert_eq!(s.cols(), 5);
        assert!(s.get(4, 4));
        assert_eq!(s.row_support(4), 1);
        assert_eq!(s.col_support(4), 1);
    }

    #[test]
    fn superpattern_checks() {
        let id = Pattern::identity(2);
        let full = Pattern::ones(2, 2);
        assert!(is_superpattern(&id, &id).unwrap());
        assert!(is_superpattern(&full, &id).unwrap());
        assert!(!is_superpattern(&id, &full).unwrap());
        assert!(is_superpattern(&id, &Pattern::identity(3)).is_err());
    }

    #[test]
    fn permutation_roundtrip() {
        let p = parse_pattern("10\n01").unwrap();
        let swap = PatternPermutation::new(vec![1, 0], vec![0, 1]).unwrap();
        let swapped = apply_permutation(&p, &swap).unwrap();
        assert_eq!(swapped, parse_pattern("01\n10").unwrap());
        let back = apply_permutation(&swapped, &swap.inverse()).unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn permutation_maps_subdivided_claw_to_standard_form() {
        // Rows and columns of the 3x4 example rearrange to [I3 | ones column].
        let p = Pattern::from_rows(&[&[1, 0, 0, 1], &[1, 1, 0, 0], &[1, 0, 1, 0]]);
        let perm = PatternPermutation::new(vec![1, 2, 0], vec![1, 2, 3, 0]).unwrap();
        let r = apply_permutation(&p, &perm).unwrap();
        assert_eq!(r, parse_pattern("1001\n0101\n0011").unwrap());
    }

    #[test]
    fn invalid_permutation_rejected() {
        assert!(PatternPermutation::new(vec![0, 0], vec![0, 1]).is_err());
        assert!(PatternPermutation::new(vec![2, 0], vec![0, 1]).is_err());
    }
}
