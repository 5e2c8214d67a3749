//! Maximum bipartite matching, term-rank, minimum line covers, standard
//! form, and alternating-path search on pattern bigraphs.
//!
//! The matching routine is a plain augmenting-path search with deterministic
//! tie-breaking (rows scanned in increasing index, candidate columns in
//! increasing index), so all outputs are reproducible across runs.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::pattern::{Pattern, PatternPermutation};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TermRankError {
    #[error("pattern is not square ({0}x{1})")]
    NotSquare(usize, usize),
    #[error("pattern has term-rank {found}, expected full term-rank {expected}")]
    NotFullTermRank { found: usize, expected: usize },
    #[error("vertex out of range")]
    VertexOutOfRange,
}

/// A set of true cells, no two sharing a row or column.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Matching {
    pub edges: Vec<(usize, usize)>,
}

impl Matching {
    pub fn size(&self) -> usize {
        self.edges.len()
    }

    pub fn row_of_col(&self, j: usize) -> Option<usize> {
        self.edges.iter().find(|&&(_, c)| c == j).map(|&(r, _)| r)
    }

    pub fn col_of_row(&self, i: usize) -> Option<usize> {
        self.edges.iter().find(|&&(r, _)| r == i).map(|&(_, c)| c)
    }

    /// Checks the matching invariants against the pattern it came from.
    pub fn is_valid_for(&self, p: &Pattern) -> bool {
        let mut rows = vec![false; p.rows()];
        let mut cols = vec![false; p.cols()];
        for &(i, j) in &self.edges {
            if i >= p.rows() || j >= p.cols() || !p.get(i, j) || rows[i] || cols[j] {
                return false;
            }
            rows[i] = true;
            cols[j] = true;
        }
        true
    }
}

/// A set of rows and columns containing every true cell.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LineCover {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
}

impl LineCover {
    pub fn size(&self) -> usize {
        self.rows.len() + self.cols.len()
    }

    pub fn covers(&self, p: &Pattern) -> bool {
        p.true_cells()
            .all(|(i, j)| self.rows.contains(&i) || self.cols.contains(&j))
    }
}

/// A vertex of a pattern bigraph: a row vertex or a column vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum BigraphVertex {
    Row(usize),
    Col(usize),
}

impl std::fmt::Display for BigraphVertex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BigraphVertex::Row(i) => write!(f, "{}", i + 1),
            BigraphVertex::Col(j) => write!(f, "{}'", j + 1),
        }
    }
}

/// Maximum matching via augmenting-path search over the true cells.
pub fn max_matching(p: &Pattern) -> Matching {
    let m = p.rows();
    let n = p.cols();
    let mut col_to_row: Vec<Option<usize>> = vec![None; n];
    for row in 0..m {
        let mut seen = vec![false; n];
        try_augment(p, row, &mut seen, &mut col_to_row);
    }
    let mut edges: Vec<(usize, usize)> = col_to_row
        .iter()
        .enumerate()
        .filter_map(|(j, r)| r.map(|i| (i, j)))
        .collect();
    edges.sort_unstable();
    Matching { edges }
}

fn try_augment(p: &Pattern, row: usize, seen: &mut [bool], col_to_row: &mut [Option<usize>]) -> bool {
    for col in 0..p.cols() {
        if p.get(row, col) && !seen[col] {
            seen[col] = true;
            let free = match col_to_row[col] {
                None => true,
                Some(other) => try_augment(p, other, seen, col_to_row),
            };
            if free {
                col_to_row[col] = Some(row);
                return true;
            }
        }
    }
    false
}

/// The size of a maximum matching; equals the minimum line-cover size.
pub fn term_rank(p: &Pattern) -> usize {
    max_matching(p).size()
}

/// Minimum line cover from the Koenig alternating-reachability construction:
/// starting from unmatched rows, walk non-matching edges row-to-column and
/// matching edges column-to-row; the cover is (unvisited rows, visited cols).
pub fn min_line_cover(p: &Pattern) -> LineCover {
    let matching = max_matching(p);
    let m = p.rows();
    let n = p.cols();
    let mut row_matched_col: Vec<Option<usize>> = vec![None; m];
    let mut col_matched_row: Vec<Option<usize>> = vec![None; n];
    for &(i, j) in &matching.edges {
        row_matched_col[i] = Some(j);
        col_matched_row[j] = Some(i);
    }

    let mut row_visited = vec![false; m];
    let mut col_visited = vec![false; n];
    let mut stack: Vec<usize> = (0..m).filter(|&i| row_matched_col[i].is_none()).collect();
    for &i in &stack {
        row_visited[i] = true;
    }
    while let Some(i) = stack.pop() {
        for j in 0..n {
            if p.get(i, j) && !col_visited[j] && row_matched_col[i] != Some(j) {
                col_visited[j] = true;
                if let Some(r) = col_matched_row[j] {
                    if !row_visited[r] {
                        row_visited[r] = true;
                        stack.push(r);
                    }
                }
            }
        }
    }

    let rows: Vec<usize> = (0..m)
        .filter(|&i| !row_visited[i] && row_matched_col[i].is_some())
        .collect();
    let cols: Vec<usize> = (0..n).filter(|&j| col_visited[j]).collect();
    LineCover { rows, cols }
}

/// Permutes the rows of a square full-term-rank pattern so that a perfect
/// matching lands on the diagonal. Returns the permuted pattern and the
/// permutation that produced it (identity on columns).
pub fn standard_form(p: &Pattern) -> Result<(Pattern, PatternPermutation), TermRankError> {
    if p.rows() != p.cols() {
        return Err(TermRankError::NotSquare(p.rows(), p.cols()));
    }
    let n = p.rows();
    let matching = max_matching(p);
    if matching.size() != n {
        return Err(TermRankError::NotFullTermRank {
            found: matching.size(),
            expected: n,
        });
    }
    // Row at output position j is the row matched to column j.
    let mut row_perm = vec![0; n];
    for &(i, j) in &matching.edges {
        row_perm[j] = i;
    }
    let perm = PatternPermutation::new(row_perm, (0..n).collect())
        .expect("matching rows form a bijection");
    let permuted = crate::pattern::apply_permutation(p, &perm).expect("dimensions match");
    Ok((permuted, perm))
}

/// An alternating path starting at the unmatched vertex `v`: edges alternate
/// non-matching / matching, beginning with a non-matching edge. The path ends
/// either at an unmatched vertex on the opposite side (augmenting) or at a
/// matched vertex on `v`'s side reached through a matching edge (exchange).
/// Flipping edge membership along the path yields a matching that covers `v`;
/// in the exchange case the size is unchanged and the terminal is uncovered.
pub fn find_alternating_path(
    p: &Pattern,
    matching: &Matching,
    v: BigraphVertex,
) -> Result<Option<Vec<BigraphVertex>>, TermRankError> {
    let (m, n) = (p.rows(), p.cols());
    match v {
        BigraphVertex::Row(i) if i >= m => return Err(TermRankError::VertexOutOfRange),
        BigraphVertex::Col(j) if j >= n => return Err(TermRankError::VertexOutOfRange),
        _ => {}
    }

    let mut row_matched_col: Vec<Option<usize>> = vec![None; m];
    let mut col_matched_row: Vec<Option<usize>> = vec![None; n];
    for &(i, j) in &matching.edges {
        row_matched_col[i] = Some(j);
        col_matched_row[j] = Some(i);
    }
    match v {
        BigraphVertex::Row(i) if row_matched_col[i].is_some() => {
            return Err(TermRankError::VertexOutOfRange)
        }
        BigraphVertex::Col(j) if col_matched_row[j].is_some() => {
            return Err(TermRankError::VertexOutOfRange)
        }
        _ => {}
    }

    // BFS over the alternating structure. Vertices on v's side expand along
    // non-matching edges; vertices on the opposite side follow their matching
    // edge back to v's side. A terminal is found at insertion time, so the
    // first hit is a shortest alternating path (ties broken by lowest index):
    // an unmatched opposite-side vertex ends an augmenting path, and any
    // v-side vertex entered through a matching edge ends an exchange path.
    let mut parent: std::collections::HashMap<BigraphVertex, BigraphVertex> =
        std::collections::HashMap::new();
    let mut queue = std::collections::VecDeque::new();
    queue.push_back(v);
    let v_is_col = matches!(v, BigraphVertex::Col(_));
    let mut terminal: Option<BigraphVertex> = None;

    'bfs: while let Some(current) = queue.pop_front() {
        let on_v_side = matches!(current, BigraphVertex::Col(_)) == v_is_col;
        if on_v_side {
            let neighbors: Vec<BigraphVertex> = match current {
                BigraphVertex::Col(j) => (0..m)
                    .filter(|&i| p.get(i, j) && col_matched_row[j] != Some(i))
                    .map(BigraphVertex::Row)
                    .collect(),
                BigraphVertex::Row(i) => (0..n)
                    .filter(|&j| p.get(i, j) && row_matched_col[i] != Some(j))
                    .map(BigraphVertex::Col)
                    .collect(),
            };
            for w in neighbors {
                if w == v || parent.contains_key(&w) {
                    continue;
                }
                parent.insert(w, current);
                let unmatched = match w {
                    BigraphVertex::Row(i) => row_matched_col[i].is_none(),
                    BigraphVertex::Col(j) => col_matched_row[j].is_none(),
                };
                if unmatched {
                    terminal = Some(w);
                    break 'bfs;
                }
                queue.push_back(w);
            }
        } else {
            let partner = match current {
                BigraphVertex::Row(i) => row_matched_col[i].map(BigraphVertex::Col),
                BigraphVertex::Col(j) => col_matched_row[j].map(BigraphVertex::Row),
            };
            if let Some(w) = partner {
                if w != v && !parent.contains_key(&w) {
                    parent.insert(w, current);
                    terminal = Some(w);
                    break 'bfs;
                }
            }
        }
    }

    let Some(terminal) = terminal else {
        return Ok(None);
    };
    let mut path = vec![terminal];
    let mut cur = terminal;
    while cur != v {
        cur = parent[&cur];
        path.push(cur);
    }
    path.reverse();
    Ok(Some(path))
}

/// Flips the matching membership of every edge along an alternating path,
/// realizing the exchange: coverage moves from the terminal to the start.
pub fn apply_alternating_exchange(matching: &Matching, path: &[BigraphVertex]) -> Matching {
    use std::collections::BTreeSet;
    let mut edges: BTreeSet<(usize, usize)> = matching.edges.iter().copied().collect();
    for pair in path.windows(2) {
        let cell = match (pair[0], pair[1]) {
            (BigraphVertex::Row(i), BigraphVertex::Col(j))
            | (BigraphVertex::Col(j), BigraphVertex::Row(i)) => (i, j),
            _ => continue,
        };
        if !edges.remove(&cell) {
            edges.insert(cell);
        }
    }
    Matching {
        edges: edges.into_iter().collect(),
    }
}
