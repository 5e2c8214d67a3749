//! Digraph/bigraph extraction and the combinatorial recognizers: weak paths,
//! weak cycles, degree bounds, connectivity, and (rectangular) Fiedler
//! graphs.
//!
//! A Fiedler graph is a path spine with pendant legs hanging off designated
//! spine vertices, subject to parity conditions that force the segments
//! between special positions to have even length; the rectangular version
//! additionally carries pendant column edges attached to rows that carry no
//! leg. These are exactly the bigraphs of full-term-rank patterns forcing
//! all-simple singular values, which is what the classifier relies on.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::pattern::Pattern;
use crate::term_rank::BigraphVertex;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum StructureError {
    #[error("pattern is not square in standard form (diagonal cell ({0},{0}) is zero)")]
    NotStandardForm(usize),
    #[error("pattern is not square ({0}x{1})")]
    NotSquare(usize, usize),
}

/// A loop-free digraph on vertices `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Digraph {
    pub n: usize,
    pub arcs: BTreeSet<(usize, usize)>,
}

impl Digraph {
    pub fn from_arcs(n: usize, arcs: &[(usize, usize)]) -> Self {
        let set: BTreeSet<(usize, usize)> = arcs.iter().copied().collect();
        for &(i, j) in &set {
            assert!(i != j && i < n && j < n, "invalid arc ({i},{j})");
        }
        Digraph { n, arcs: set }
    }

    /// Unordered vertex pairs with their arc multiplicity (1 or 2).
    fn underlying_multiedges(&self) -> BTreeMap<(usize, usize), usize> {
        let mut edges = BTreeMap::new();
        for &(i, j) in &self.arcs {
            let key = (i.min(j), i.max(j));
            *edges.entry(key).or_insert(0) += 1;
        }
        edges
    }
}

/// The bipartite graph of a pattern: row vertices against column vertices,
/// one edge per true cell.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bigraph {
    pub m: usize,
    pub n: usize,
    pub edges: BTreeSet<(usize, usize)>,
}

impl Bigraph {
    pub fn vertex_count(&self) -> usize {
        self.m + self.n
    }

    pub fn degree(&self, v: BigraphVertex) -> usize {
        match v {
            BigraphVertex::Row(i) => self.edges.iter().filter(|&&(r, _)| r == i).count(),
            BigraphVertex::Col(j) => self.edges.iter().filter(|&&(_, c)| c == j).count(),
        }
    }

    pub fn has_edge(&self, a: BigraphVertex, b: BigraphVertex) -> bool {
        match (a, b) {
            (BigraphVertex::Row(i), BigraphVertex::Col(j))
            | (BigraphVertex::Col(j), BigraphVertex::Row(i)) => self.edges.contains(&(i, j)),
            _ => false,
        }
    }
}

/// Arcs of the off-diagonal true cells of a square standard-form pattern.
pub fn digraph_of(p: &Pattern) -> Result<Digraph, StructureError> {
    if p.rows() != p.cols() {
        return Err(StructureError::NotSquare(p.rows(), p.cols()));
    }
    for i in 0..p.rows() {
        if !p.get(i, i) {
            return Err(StructureError::NotStandardForm(i));
        }
    }
    let arcs = p.true_cells().filter(|&(i, j)| i != j).collect();
    Ok(Digraph { n: p.rows(), arcs })
}

/// One edge per true cell, rows against columns.
pub fn bigraph_of(p: &Pattern) -> Bigraph {
    Bigraph {
        m: p.rows(),
        n: p.cols(),
        edges: p.true_cells().collect(),
    }
}

/// True iff the underlying multigraph (opposite arcs count as parallel
/// edges) is a simple path covering all vertices.
pub fn is_weak_path(d: &Digraph) -> bool {
    if d.n == 1 {
        return d.arcs.is_empty();
    }
    let edges = d.underlying_multiedges();
    if edges.values().any(|&mult| mult > 1) {
        return false; // a parallel pair is a weak 2-cycle
    }
    if edges.len() != d.n - 1 {
        return false;
    }
    let mut degree = vec![0usize; d.n];
    let mut adj = vec![Vec::new(); d.n];
    for &(i, j) in edges.keys() {
        degree[i] += 1;
        degree[j] += 1;
        adj[i].push(j);
        adj[j].push(i);
    }
    if degree.iter().any(|&deg| deg > 2) {
        return false;
    }
    // n-1 edges, max degree 2: a path iff connected.
    reachable_count(&adj, 0) == d.n
}

fn reachable_count(adj: &[Vec<usize>], start: usize) -> usize {
    let mut seen = vec![false; adj.len()];
    let mut queue = VecDeque::from([start]);
    seen[start] = true;
    let mut count = 1;
    while let Some(v) = queue.pop_front() {
        for &w in &adj[v] {
            if !seen[w] {
                seen[w] = true;
                count += 1;
                queue.push_back(w);
            }
        }
    }
    count
}

/// True iff some set of distinct arcs forms a cycle once directions are
/// ignored; a pair of opposite arcs counts as a 2-cycle.
pub fn has_weak_cycle(d: &Digraph) -> bool {
    let edges = d.underlying_multiedges();
    if edges.values().any(|&mult| mult > 1) {
        return true;
    }
    // A simple graph is acyclic iff every component is a tree.
    let mut adj = vec![Vec::new(); d.n];
    for &(i, j) in edges.keys() {
        adj[i].push(j);
        adj[j].push(i);
    }
    let mut seen = vec![false; d.n];
    let mut components = 0;
    for start in 0..d.n {
        if seen[start] {
            continue;
        }
        components += 1;
        seen[start] = true;
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
    }
    edges.len() > d.n - components
}

/// Finds a weak cycle as a cyclic vertex sequence, or `None`. A parallel
/// arc pair is returned as a 2-cycle; otherwise a cycle of the simple
/// underlying graph is extracted from a BFS tree, deterministically.
pub fn find_weak_cycle(d: &Digraph) -> Option<Vec<usize>> {
    let edges = d.underlying_multiedges();
    if let Some((&(i, j), _)) = edges.iter().find(|(_, &mult)| mult > 1) {
        return Some(vec![i, j]);
    }
    let mut adj = vec![Vec::new(); d.n];
    for &(i, j) in edges.keys() {
        adj[i].push(j);
        adj[j].push(i);
    }
    for a in adj.iter_mut() {
        a.sort_unstable();
    }
    let mut visited = vec![false; d.n];
    let mut parent = vec![usize::MAX; d.n];
    for start in 0..d.n {
        if visited[start] {
            continue;
        }
        visited[start] = true;
        let mut queue = VecDeque::from([start]);
        while let Some(u) = queue.pop_front() {
            for &w in &adj[u] {
                if !visited[w] {
                    visited[w] = true;
                    parent[w] = u;
                    queue.push_back(w);
                } else if parent[u] != w && parent[w] != u {
                    // Non-tree edge: splice the two root paths at their
                    // lowest common ancestor.
                    let mut up = vec![u];
                    let mut cur = u;
                    while parent[cur] != usize::MAX {
                        cur = parent[cur];
                        up.push(cur);
                    }
                    let mut wp = vec![w];
                    cur = w;
                    while !up.contains(&cur) {
                        cur = parent[cur];
                        wp.push(cur);
                    }
                    let meet = cur;
                    let mut cycle: Vec<usize> =
                        up.iter().copied().take_while(|&x| x != meet).collect();
                    cycle.push(meet);
                    for &x in wp.iter().rev().skip(1) {
                        cycle.push(x);
                    }
                    return Some(cycle);
                }
            }
        }
    }
    None
}

/// Largest in-degree plus out-degree over the vertices.
pub fn max_degree_sum(d: &Digraph) -> usize {
    let mut deg = vec![0usize; d.n];
    for &(i, j) in &d.arcs {
        deg[i] += 1;
        deg[j] += 1;
    }
    deg.into_iter().max().unwrap_or(0)
}

/// Connectivity of the (m+n)-vertex bigraph; isolated vertices disconnect it.
pub fn is_connected(b: &Bigraph) -> bool {
    let total = b.vertex_count();
    let mut adj: BTreeMap<BigraphVertex, Vec<BigraphVertex>> = BTreeMap::new();
    for i in 0..b.m {
        adj.entry(BigraphVertex::Row(i)).or_default();
    }
    for j in 0..b.n {
        adj.entry(BigraphVertex::Col(j)).or_default();
    }
    for &(i, j) in &b.edges {
        adj.get_mut(&BigraphVertex::Row(i)).unwrap().push(BigraphVertex::Col(j));
        adj.get_mut(&BigraphVertex::Col(j)).unwrap().push(BigraphVertex::Row(i));
    }
    let start = BigraphVertex::Row(0);
    let mut seen: BTreeSet<BigraphVertex> = BTreeSet::from([start]);
    let mut queue = VecDeque::from([start]);
    while let Some(v) = queue.pop_front() {
        for &w in &adj[&v] {
            if seen.insert(w) {
                queue.push_back(w);
            }
        }
    }
    seen.len() == total
}

/// The combinatorial witness that a bigraph is an m-by-n Fiedler graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiedlerCertificate {
    /// Spine path, in order.
    pub gamma: Vec<BigraphVertex>,
    /// Designated spine vertices, in spine order.
    pub designated: Vec<BigraphVertex>,
    /// Legs as (off-spine pendant vertex, designated spine vertex).
    pub legs: Vec<(BigraphVertex, BigraphVertex)>,
    /// Extra pendant column edges as (column index, row index).
    pub pendant_columns: Vec<(usize, usize)>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CertificateError {
    #[error("certificate invariant violated: {0}")]
    Invalid(String),
}

impl FiedlerCertificate {
    /// Re-validates every certificate invariant against the bigraph.
    pub fn validate(&self, b: &Bigraph) -> Result<(), CertificateError> {
        let fail = |msg: String| Err(CertificateError::Invalid(msg));

        // The spine is a path of distinct vertices along edges of b.
        let spine_set: BTreeSet<BigraphVertex> = self.gamma.iter().copied().collect();
        if spine_set.len() != self.gamma.len() || self.gamma.is_empty() {
            return fail("spine vertices are not distinct".into());
        }
        for pair in self.gamma.windows(2) {
            if !b.has_edge(pair[0], pair[1]) {
                return fail(format!("spine step {}-{} is not an edge", pair[0], pair[1]));
            }
        }

        // Legs pair off-spine pendant vertices with designated spine vertices.
        let designated_set: BTreeSet<BigraphVertex> = self.designated.iter().copied().collect();
        if designated_set.len() != self.designated.len() {
            return fail("designated vertices are not distinct".into());
        }
        if self.legs.len() != self.designated.len() {
            return fail("legs do not pair one-to-one with designated vertices".into());
        }
        let mut leg_rows: BTreeSet<usize> = BTreeSet::new();
        for &(u, v) in &self.legs {
            if !designated_set.contains(&v) || spine_set.contains(&u) {
                return fail(format!("leg {u}-{v} is not off-spine onto a designated vertex"));
            }
            if !b.has_edge(u, v) {
                return fail(format!("leg {u}-{v} is not an edge"));
            }
            if let BigraphVertex::Row(i) = u {
                leg_rows.insert(i);
            }
            if let BigraphVertex::Row(i) = v {
                leg_rows.insert(i);
            }
        }

        // Pendant columns attach new column vertices to rows without a leg.
        for &(c, r) in &self.pendant_columns {
            if !b.edges.contains(&(r, c)) {
                return fail(format!("pendant column edge {}'-{} is not an edge", c + 1, r + 1));
            }
            if leg_rows.contains(&r) {
                return fail(format!("pendant column attaches to leg-incident row {}", r + 1));
            }
            if spine_set.contains(&BigraphVertex::Col(c))
                || designated_set.contains(&BigraphVertex::Col(c))
            {
                return fail(format!("pendant column {}' is not a new vertex", c + 1));
            }
        }

        // Together the parts account for every edge exactly once.
        let mut counted: BTreeSet<(usize, usize)> = BTreeSet::new();
        let mut add = |a: BigraphVertex, bb: BigraphVertex| -> bool {
            let cell = match (a, bb) {
                (BigraphVertex::Row(i), BigraphVertex::Col(j))
                | (BigraphVertex::Col(j), BigraphVertex::Row(i)) => (i, j),
                _ => return false,
            };
            counted.insert(cell)
        };
        for pair in self.gamma.windows(2) {
            if !add(pair[0], pair[1]) {
                return fail("spine repeats an edge".into());
            }
        }
        for &(u, v) in &self.legs {
            if !add(u, v) {
                return fail("leg repeats an edge".into());
            }
        }
        for &(c, r) in &self.pendant_columns {
            if !counted.insert((r, c)) {
                return fail("pendant column repeats an edge".into());
            }
        }
        if counted != b.edges {
            return fail("spine, legs, and pendant columns do not cover all edges".into());
        }
        // A Fiedler graph is a tree on m + n vertices.
        if b.edges.len() + 1 != b.vertex_count() {
            return fail("edge count is not vertices minus one".into());
        }

        // Spine endpoints are pendant in the core (spine plus legs).
        let core_degree = |v: BigraphVertex| -> usize {
            let mut deg = 0;
            for pair in self.gamma.windows(2) {
                if pair[0] == v || pair[1] == v {
                    deg += 1;
                }
            }
            for &(u, w) in &self.legs {
                if u == v || w == v {
                    deg += 1;
                }
            }
            deg
        };
        let first = *self.gamma.first().unwrap();
        let last = *self.gamma.last().unwrap();
        if self.gamma.len() >= 2 && (core_degree(first) != 1 || core_degree(last) != 1) {
            return fail("spine endpoints are not pendant in the core".into());
        }

        // Parity: the segments before, between, and after special positions
        // all have an even number of vertices.
        let position: BTreeMap<BigraphVertex, usize> = self
            .gamma
            .iter()
            .enumerate()
            .map(|(idx, &v)| (v, idx + 1))
            .collect();
        let mut positions: Vec<usize> = self
            .designated
            .iter()
            .map(|v| *position.get(v).expect("designated vertex lies on spine"))
            .collect();
        positions.sort_unstable();
        let ell = self.gamma.len();
        let mut prev = 0usize;
        for &pos in &positions {
            if pos <= 1 || pos >= ell {
                return fail("designated vertex at a spine endpoint".into());
            }
            if (pos - prev - 1) % 2 != 0 {
                return fail(format!("odd segment before designated position {pos}"));
            }
            prev = pos;
        }
        if (ell - prev) % 2 != 0 {
            return fail("odd segment at the end of the spine".into());
        }
        Ok(())
    }
}

/// Recognizes m-by-n Fiedler graphs (m <= n) and produces a certificate.
///
/// The core decomposition is found by deterministic constructive search:
/// a Fiedler graph is a tree, any stripped pendant column has degree one, so
/// candidate column sets are enumerated in lexicographic order and each
/// candidate square core is checked directly (spine from the leaf-stripped
/// interior path, legs, parity). Ties always break toward lowest indices.
pub fn recognize_fiedler(b: &Bigraph) -> Option<FiedlerCertificate> {
    if b.m > b.n {
        return None;
    }
    // Must be a tree on m + n vertices.
    if b.edges.len() + 1 != b.vertex_count() || !is_connected(b) {
        return None;
    }

    let adjacency = build_adjacency(b);
    if b.m == b.n {
        return recognize_square_core(&adjacency).map(|(gamma, designated, legs)| {
            FiedlerCertificate { gamma, designated, legs, pendant_columns: vec![] }
        });
    }

    let strip = b.n - b.m;
    let deg1_cols: Vec<usize> = (0..b.n)
        .filter(|&j| b.degree(BigraphVertex::Col(j)) == 1)
        .collect();
    if deg1_cols.len() < strip {
        return None;
    }

    let mut chosen = vec![0usize; strip];
    let mut combos = Combinations::new(deg1_cols.len(), strip);
    while combos.next_into(&mut chosen) {
        let stripped: Vec<usize> = chosen.iter().map(|&k| deg1_cols[k]).collect();
        let mut core = adjacency.clone();
        let mut pendant_columns = Vec::with_capacity(strip);
        for &c in &stripped {
            let col = BigraphVertex::Col(c);
            let row = match core[&col].iter().next() {
                Some(&BigraphVertex::Row(r)) => r,
                _ => unreachable!("degree-one column has a row neighbor"),
            };
            remove_vertex(&mut core, col);
            pendant_columns.push((c, row));
        }
        if let Some((gamma, designated, legs)) = recognize_square_core(&core) {
            // Pendant columns may only attach to rows carrying no leg.
            let leg_rows: BTreeSet<usize> = legs
                .iter()
                .flat_map(|&(u, v)| [u, v])
                .filter_map(|v| match v {
                    BigraphVertex::Row(i) => Some(i),
                    _ => None,
                })
                .collect();
            if pendant_columns.iter().all(|&(_, r)| !leg_rows.contains(&r)) {
                return Some(FiedlerCertificate { gamma, designated, legs, pendant_columns });
            }
        }
    }
    None
}

type Adjacency = BTreeMap<BigraphVertex, BTreeSet<BigraphVertex>>;

fn build_adjacency(b: &Bigraph) -> Adjacency {
    let mut adj: Adjacency = BTreeMap::new();
    for i in 0..b.m {
        adj.entry(BigraphVertex::Row(i)).or_default();
    }
    for j in 0..b.n {
        adj.entry(BigraphVertex::Col(j)).or_default();
    }
    for &(i, j) in &b.edges {
        adj.get_mut(&BigraphVertex::Row(i)).unwrap().insert(BigraphVertex::Col(j));
        adj.get_mut(&BigraphVertex::Col(j)).unwrap().insert(BigraphVertex::Row(i));
    }
    adj
}

fn remove_vertex(adj: &mut Adjacency, v: BigraphVertex) {
    if let Some(neighbors) = adj.remove(&v) {
        for w in neighbors {
            adj.get_mut(&w).map(|set| set.remove(&v));
        }
    }
}

type SquareCore = (Vec<BigraphVertex>, Vec<BigraphVertex>, Vec<(BigraphVertex, BigraphVertex)>);

/// Checks whether a tree (given as adjacency) is a square Fiedler graph and
/// extracts (spine, designated vertices, legs).
fn recognize_square_core(adj: &Adjacency) -> Option<SquareCore> {
    let vertex_count = adj.len();
    if vertex_count == 2 {
        // A single edge: a two-vertex spine with no legs.
        let mut it = adj.keys();
        let a = *it.next().unwrap();
        let bb = *it.next().unwrap();
        if adj[&a].contains(&bb) {
            return Some((vec![a, bb], vec![], vec![]));
        }
        return None;
    }

    let leaves: BTreeSet<BigraphVertex> =
        adj.iter().filter(|(_, nb)| nb.len() == 1).map(|(&v, _)| v).collect();
    let interior: Vec<BigraphVertex> =
        adj.keys().copied().filter(|v| !leaves.contains(v)).collect();
    if interior.is_empty() {
        return None; // more than two vertices but no interior: a star or worse
    }

    // The leaf-stripped interior must itself be a path.
    let interior_set: BTreeSet<BigraphVertex> = interior.iter().copied().collect();
    let interior_degree = |v: BigraphVertex| -> usize {
        adj[&v].iter().filter(|w| interior_set.contains(w)).count()
    };
    let ends: Vec<BigraphVertex> = interior
        .iter()
        .copied()
        .filter(|&v| interior_degree(v) <= 1)
        .collect();
    let ordered_interior: Vec<BigraphVertex> = if interior.len() == 1 {
        vec![interior[0]]
    } else {
        if ends.len() != 2 || interior.iter().any(|&v| interior_degree(v) > 2) {
            return None;
        }
        let mut path = vec![ends[0]];
        let mut prev: Option<BigraphVertex> = None;
        while path.len() < interior.len() {
            let cur = *path.last().unwrap();
            let next = adj[&cur]
                .iter()
                .copied()
                .find(|&w| interior_set.contains(&w) && Some(w) != prev)?;
            prev = Some(cur);
            path.push(next);
        }
        if *path.last().unwrap() != ends[1] {
            return None;
        }
        path
    };

    // Extend each interior end by its lowest leaf neighbor to get the spine.
    let first_interior = *ordered_interior.first().unwrap();
    let last_interior = *ordered_interior.last().unwrap();
    let v1 = adj[&first_interior].iter().copied().find(|w| leaves.contains(w))?;
    let vl = adj[&last_interior]
        .iter()
        .copied()
        .find(|&w| leaves.contains(&w) && w != v1)?;
    let mut gamma = Vec::with_capacity(vertex_count);
    gamma.push(v1);
    gamma.extend(ordered_interior.iter().copied());
    gamma.push(vl);
    // Canonical orientation: lowest endpoint first. Reversal swaps v1 and
    // vl symmetrically, so validity is unaffected.
    if gamma.last() < gamma.first() {
        gamma.reverse();
    }

    // Everything off the spine must be a single pendant leg per spine vertex.
    let spine_set: BTreeSet<BigraphVertex> = gamma.iter().copied().collect();
    let spine_pos: BTreeMap<BigraphVertex, usize> =
        gamma.iter().enumerate().map(|(idx, &v)| (v, idx + 1)).collect();
    let ell = gamma.len();
    let mut legs: Vec<(BigraphVertex, BigraphVertex)> = Vec::new();
    let mut designated_positions: Vec<usize> = Vec::new();
    for (&v, neighbors) in adj.iter() {
        if spine_set.contains(&v) {
            continue;
        }
        if neighbors.len() != 1 {
            return None;
        }
        let attach = *neighbors.iter().next().unwrap();
        let pos = *spine_pos.get(&attach)?;
        if pos <= 1 || pos >= ell {
            return None;
        }
        legs.push((v, attach));
        designated_positions.push(pos);
    }
    // One leg per designated vertex.
    let mut sorted_positions = designated_positions.clone();
    sorted_positions.sort_unstable();
    if sorted_positions.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }

    // Parity: all segments cut out by the designated positions are even.
    let mut prev = 0usize;
    for &pos in &sorted_positions {
        if (pos - prev - 1) % 2 != 0 {
            return None;
        }
        prev = pos;
    }
    if (ell - prev) % 2 != 0 {
        return None;
    }

    legs.sort_by_key(|&(_, v)| spine_pos[&v]);
    let designated: Vec<BigraphVertex> = legs.iter().map(|&(_, v)| v).collect();
    Some((gamma, designated, legs))
}

/// Lexicographic k-combinations of 0..n.
pub(crate) struct Combinations {
    n: usize,
    k: usize,
    state: Option<Vec<usize>>,
}

impl Combinations {
    pub(crate) fn new(n: usize, k: usize) -> Self {
        let state = if k <= n { Some((0..k).collect()) } else { None };
        Combinations { n, k, state }
    }

    pub(crate) fn next_into(&mut self, out: &mut [usize]) -> bool {
        let Some(state) = &mut self.state else {
            return false;
        };
        out.copy_from_slice(state);
        // advance
        if self.k == 0 {
            self.state = None;
            return true;
        }
        let mut i = self.k;
        loop {
            if i == 0 {
                self.state = None;
                break;
            }
            i -= 1;
            if state[i] + (self.k - i) < self.n {
                state[i] += 1;
                for j in i + 1..self.k {
                    state[j] = state[j - 1] + 1;
                }
                break;
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pattern::parse_pattern;

    #[test]
    fn digraph_examples() {
        let id = Pattern::identity(3);
        assert!(digraph_of(&id).unwrap().arcs.is_empty());

        // Arcs of the in/out pattern (figure: 1 -> 2, 2 -> 3, 2 -> 4).
        let inout = parse_pattern("1100\n0111\n0010\n0001").unwrap();
        let d = digraph_of(&inout).unwrap();
        assert_eq!(d.arcs, BTreeSet::from([(0, 1), (1, 2), (1, 3)]));

        let paw = parse_pattern("1100\n0100\n0111\n0001").unwrap();
        let d = digraph_of(&paw).unwrap();
        assert_eq!(d.arcs, BTreeSet::from([(0, 1), (2, 1), (2, 3)]));

        assert!(digraph_of(&Pattern::ones(2, 3)).is_err());
        assert!(matches!(
            digraph_of(&parse_pattern("10\n01").map(|p| {
                let mut q = p;
                q.set(0, 0, false);
                q
            }).unwrap()),
            Err(StructureError::NotStandardForm(0))
        ));
    }

    #[test]
    fn bigraph_examples() {
        let b = bigraph_of(&Pattern::identity(2));
        assert_eq!(b.edges, BTreeSet::from([(0, 0), (1, 1)]));
        assert!(bigraph_of(&Pattern::zeros(2, 2)).edges.is_empty());
    }

    #[test]
    fn weak_path_examples() {
        let path = Digraph::from_arcs(3, &[(0, 1), (1, 2)]);
        assert!(is_weak_path(&path));

        let fig1 = Digraph::from_arcs(4, &[(0, 1), (1, 2), (1, 3)]);
        assert!(!is_weak_path(&fig1));
        assert_eq!(max_degree_sum(&fig1), 3);

        let two_cycle = Digraph::from_arcs(2, &[(0, 1), (1, 0)]);
        assert!(!is_weak_path(&two_cycle));
        assert!(has_weak_cycle(&two_cycle));

        let single = Digraph::from_arcs(1, &[]);
        assert!(is_weak_path(&single));

        let zigzag = Digraph::from_arcs(3, &[(0, 1), (2, 1)]);
        assert!(is_weak_path(&zigzag));
    }

    #[test]
    fn weak_cycle_examples() {
        assert!(!has_weak_cycle(&Digraph::from_arcs(3, &[])));
        let triangle = Digraph::from_arcs(3, &[(0, 1), (1, 2), (0, 2)]);
        assert!(has_weak_cycle(&triangle));
        let tree = Digraph::from_arcs(4, &[(0, 1), (0, 2), (0, 3)]);
        assert!(!has_weak_cycle(&tree));
    }

    #[test]
    fn degree_sum_examples() {
        assert_eq!(max_degree_sum(&Digraph::from_arcs(3, &[])), 0);
        let path = Digraph::from_arcs(4, &[(0, 1), (1, 2), (2, 3)]);
        assert_eq!(max_degree_sum(&path), 2);
    }

    #[test]
    fn connectivity_examples() {
        assert!(is_connected(&bigraph_of(&Pattern::identity(1))));
        assert!(!is_connected(&bigraph_of(&Pattern::identity(2))));
        let claw = Pattern::from_rows(&[&[1, 0, 0, 1], &[1, 1, 0, 0], &[1, 0, 1, 0]]);
        assert!(is_connected(&bigraph_of(&claw)));
    }

    #[test]
    fn fiedler_single_edge_and_one_row() {
        let cert = recognize_fiedler(&bigraph_of(&Pattern::ones(1, 1))).unwrap();
        assert_eq!(cert.gamma.len(), 2);
        cert.validate(&bigraph_of(&Pattern::ones(1, 1))).unwrap();

        // A full 1xn row is a star of pendant columns on one row vertex.
        let row = Pattern::ones(1, 4);
        let cert = recognize_fiedler(&bigraph_of(&row)).unwrap();
        assert_eq!(cert.pendant_columns.len(), 3);
        cert.validate(&bigraph_of(&row)).unwrap();
    }

    #[test]
    fn fiedler_paw_recognized() {
        let paw = parse_pattern("1100\n0100\n0111\n0001").unwrap();
        let b = bigraph_of(&paw);
        let cert = recognize_fiedler(&b).expect("paw bigraph is a Fiedler graph");
        cert.validate(&b).unwrap();
        assert_eq!(cert.gamma.len(), 6);
        assert_eq!(cert.legs.len(), 2);
    }

    #[test]
    fn fiedler_figure_example() {
        // The 8x8 figure graph: spine 1-1'-2-2'-3-3'-4-4'-5-5'-6-6' with legs
        // 2-7', 3'-7, 4-8', 5'-8; designated vertices are 2, 3', 4, 5'.
        let mut p = Pattern::zeros(8, 8);
        for &(i, j) in &[
            (1, 1), (2, 1), (2, 2), (3, 2), (3, 3), (4, 3), (4, 4), (5, 4),
            (5, 5), (6, 5), (6, 6), (2, 7), (7, 3), (4, 8), (8, 5),
        ] {
            p.set(i - 1, j - 1, true);
        }
        let b = bigraph_of(&p);
        let cert = recognize_fiedler(&b).expect("figure graph is Fiedler");
        cert.validate(&b).unwrap();
        assert_eq!(
            cert.designated,
            vec![
                BigraphVertex::Row(1),
                BigraphVertex::Col(2),
                BigraphVertex::Row(3),
                BigraphVertex::Col(4),
            ]
        );
        let legs: BTreeSet<(BigraphVertex, BigraphVertex)> = cert.legs.iter().copied().collect();
        assert_eq!(
            legs,
            BTreeSet::from([
                (BigraphVertex::Col(6), BigraphVertex::Row(1)),
                (BigraphVertex::Row(6), BigraphVertex::Col(2)),
                (BigraphVertex::Col(7), BigraphVertex::Row(3)),
                (BigraphVertex::Row(7), BigraphVertex::Col(4)),
            ])
        );
    }

    #[test]
    fn subdivided_claw_not_fiedler() {
        let claw = Pattern::from_rows(&[&[1, 0, 0, 1], &[1, 1, 0, 0], &[1, 0, 1, 0]]);
        assert!(recognize_fiedler(&bigraph_of(&claw)).is_none());
    }

    #[test]
    fn aster_is_fiedler() {
        let aster = Pattern::from_rows(&[&[1, 0, 0, 0], &[1, 1, 0, 0], &[1, 0, 1, 1]]);
        let b = bigraph_of(&aster);
        let cert = recognize_fiedler(&b).expect("aster pattern is Fiedler");
        cert.validate(&b).unwrap();
        assert_eq!(cert.pendant_columns.len(), 1);
    }

    #[test]
    fn rectangular_pendants_may_share_a_row() {
        // Multiple new pendant columns may attach to the same row.
        let p = Pattern::from_rows(&[&[1, 1, 1, 1]]);
        let cert = recognize_fiedler(&bigraph_of(&p)).unwrap();
        assert_eq!(cert.pendant_columns.len(), 3);
    }

    #[test]
    fn weak_path_iff_fiedler_square_exhaustive() {
        // Square full-term-rank standard-form patterns at sizes 3 and 4:
        // the bigraph is Fiedler exactly when the digraph is a weak path.
        for n in [3usize, 4] {
            let off: Vec<(usize, usize)> = (0..n)
                .flat_map(|i| (0..n).map(move |j| (i, j)))
                .filter(|&(i, j)| i != j)
                .collect();
            for mask in 0u32..(1 << off.len()) {
                let mut p = Pattern::identity(n);
                for (bit, &(i, j)) in off.iter().enumerate() {
                    if mask & (1 << bit) != 0 {
                        p.set(i, j, true);
                    }
                }
                let d = digraph_of(&p).unwrap();
                let b = bigraph_of(&p);
                let fiedler = recognize_fiedler(&b);
                assert_eq!(
                    fiedler.is_some(),
                    is_weak_path(&d),
                    "mismatch on pattern\n{p}"
                );
                if let Some(cert) = fiedler {
                    cert.validate(&b).unwrap();
                    assert!(!has_weak_cycle(&d));
                    assert!(max_degree_sum(&d) <= 2);
                }
            }
        }
    }

    #[test]
    fn weak_path_iff_fiedler_square_randomized_5x5() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(29);
        for _ in 0..2000 {
            let mut p = Pattern::identity(5);
            for i in 0..5 {
                for j in 0..5 {
                    if i != j && rng.random::<f64>() < 0.18 {
                        p.set(i, j, true);
                    }
                }
            }
            let d = digraph_of(&p).unwrap();
            let b = bigraph_of(&p);
            let fiedler = recognize_fiedler(&b);
            assert_eq!(fiedler.is_some(), is_weak_path(&d), "mismatch on\n{p}");
            if let Some(cert) = fiedler {
                cert.validate(&b).unwrap();
            }
        }
    }
}
