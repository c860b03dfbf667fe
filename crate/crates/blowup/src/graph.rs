//! Dense bit-vector graph representations and the counting primitives the
//! embedding loops live on. Degrees into sets and codegrees are word-parallel
//! popcounts over `u64` rows.
//!
//! Vertex universes are tagged (pattern side vs host side); mixing sets or
//! graphs from different universes is a programming error and panics.

use crate::error::{Error, Result};
use crate::rat::Rat;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum UniverseKind {
    Pattern,
    Host,
}

/// A named index space. Vertices are plain `usize` indices local to one
/// universe; the tag makes cross-universe mixing detectable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Universe {
    pub kind: UniverseKind,
    pub size: usize,
}

impl Universe {
    pub fn pattern(size: usize) -> Self {
        Universe { kind: UniverseKind::Pattern, size }
    }
    pub fn host(size: usize) -> Self {
        Universe { kind: UniverseKind::Host, size }
    }
    fn words(&self) -> usize {
        self.size.div_ceil(64)
    }
}

#[inline]
fn and_count(a: &[u64], b: &[u64]) -> usize {
    a.iter().zip(b).map(|(x, y)| (x & y).count_ones() as usize).sum()
}

#[inline]
fn and3_count(a: &[u64], b: &[u64], c: &[u64]) -> usize {
    a.iter()
        .zip(b)
        .zip(c)
        .map(|((x, y), z)| (x & y & z).count_ones() as usize)
        .sum()
}

/// A set of vertices over one universe, stored as a bit vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexSet {
    universe: Universe,
    words: Vec<u64>,
}

impl VertexSet {
    pub fn empty(universe: Universe) -> Self {
        VertexSet { universe, words: vec![0; universe.words()] }
    }

    pub fn full(universe: Universe) -> Self {
        let mut s = Self::empty(universe);
        for v in 0..universe.size {
            s.insert(v);
        }
        s
    }

    pub fn from_indices(universe: Universe, indices: impl IntoIterator<Item = usize>) -> Self {
        let mut s = Self::empty(universe);
        for v in indices {
            s.insert(v);
        }
        s
    }

    pub fn universe(&self) -> Universe {
        self.universe
    }

    #[inline]
    pub fn insert(&mut self, v: usize) {
        assert!(v < self.universe.size, "vertex {v} outside universe of size {}", self.universe.size);
        self.words[v / 64] |= 1u64 << (v % 64);
    }

    #[inline]
    pub fn remove(&mut self, v: usize) {
        assert!(v < self.universe.size, "vertex {v} outside universe of size {}", self.universe.size);
        self.words[v / 64] &= !(1u64 << (v % 64));
    }

    #[inline]
    pub fn contains(&self, v: usize) -> bool {
        v < self.universe.size && self.words[v / 64] >> (v % 64) & 1 == 1
    }

    /// Cardinality by popcount.
    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn intersect_with(&mut self, other: &VertexSet) {
        assert_eq!(self.universe, other.universe, "universe mismatch in set intersection");
        for (w, o) in self.words.iter_mut().zip(&other.words) {
            *w &= o;
        }
    }

    pub fn union_with(&mut self, other: &VertexSet) {
        assert_eq!(self.universe, other.universe, "universe mismatch in set union");
        for (w, o) in self.words.iter_mut().zip(&other.words) {
            *w |= o;
        }
    }

    pub fn subtract(&mut self, other: &VertexSet) {
        assert_eq!(self.universe, other.universe, "universe mismatch in set difference");
        for (w, o) in self.words.iter_mut().zip(&other.words) {
            *w &= !o;
        }
    }

    /// Intersects with a raw adjacency row from a graph over the same universe.
    pub fn intersect_with_row(&mut self, row: &[u64]) {
        debug_assert_eq!(self.words.len(), row.len());
        for (w, r) in self.words.iter_mut().zip(row) {
            *w &= r;
        }
    }

    pub fn intersection_count(&self, other: &VertexSet) -> usize {
        assert_eq!(self.universe, other.universe, "universe mismatch in intersection count");
        and_count(&self.words, &other.words)
    }

    pub fn is_subset_of(&self, other: &VertexSet) -> bool {
        assert_eq!(self.universe, other.universe, "universe mismatch in subset test");
        self.words.iter().zip(&other.words).all(|(w, o)| w & !o == 0)
    }

    pub fn is_disjoint_from(&self, other: &VertexSet) -> bool {
        assert_eq!(self.universe, other.universe, "universe mismatch in disjointness test");
        self.words.iter().zip(&other.words).all(|(w, o)| w & o == 0)
    }

    pub fn first(&self) -> Option<usize> {
        self.iter().next()
    }

    pub fn iter(&self) -> SetIter<'_> {
        SetIter { words: &self.words, word_idx: 0, current: self.words.first().copied().unwrap_or(0), size: self.universe.size }
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }

    pub(crate) fn words(&self) -> &[u64] {
        &self.words
    }

    pub(crate) fn from_words(universe: Universe, words: Vec<u64>) -> Self {
        debug_assert_eq!(words.len(), universe.words());
        VertexSet { universe, words }
    }
}

pub struct SetIter<'a> {
    words: &'a [u64],
    word_idx: usize,
    current: u64,
    size: usize,
}

impl Iterator for SetIter<'_> {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        loop {
            if self.current != 0 {
                let bit = self.current.trailing_zeros() as usize;
                self.current &= self.current - 1;
                let v = self.word_idx * 64 + bit;
                if v < self.size {
                    return Some(v);
                }
                continue;
            }
            self.word_idx += 1;
            if self.word_idx >= self.words.len() {
                return None;
            }
            self.current = self.words[self.word_idx];
        }
    }
}

/// Simple undirected graph over one universe, adjacency stored as one bit row
/// per vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    universe: Universe,
    words_per_row: usize,
    rows: Vec<u64>,
    edges: usize,
}

impl Graph {
    pub fn new(universe: Universe) -> Self {
        let words_per_row = universe.words();
        Graph { universe, words_per_row, rows: vec![0; universe.size * words_per_row], edges: 0 }
    }

    pub fn universe(&self) -> Universe {
        self.universe
    }

    pub fn order(&self) -> usize {
        self.universe.size
    }

    pub fn edge_count(&self) -> usize {
        self.edges
    }

    #[inline]
    pub fn row(&self, v: usize) -> &[u64] {
        assert!(v < self.universe.size, "vertex {v} outside universe of size {}", self.universe.size);
        &self.rows[v * self.words_per_row..(v + 1) * self.words_per_row]
    }

    pub fn add_edge(&mut self, u: usize, v: usize) {
        assert!(u != v, "no loops: {u}");
        assert!(u < self.universe.size && v < self.universe.size, "edge ({u},{v}) outside universe");
        if !self.has_edge(u, v) {
            self.rows[u * self.words_per_row + v / 64] |= 1u64 << (v % 64);
            self.rows[v * self.words_per_row + u / 64] |= 1u64 << (u % 64);
            self.edges += 1;
        }
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.universe.size
            && v < self.universe.size
            && self.rows[u * self.words_per_row + v / 64] >> (v % 64) & 1 == 1
    }

    pub fn degree(&self, v: usize) -> usize {
        self.row(v).iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn max_degree(&self) -> usize {
        (0..self.order()).map(|v| self.degree(v)).max().unwrap_or(0)
    }

    /// |N(v) ∩ s|.
    pub fn degree_into(&self, v: usize, s: &VertexSet) -> usize {
        assert_eq!(self.universe, s.universe(), "universe mismatch: set does not belong to this graph");
        and_count(self.row(v), s.words())
    }

    /// |N(u) ∩ N(v) ∩ s|. With `u == v` this is `degree_into(u, s)`.
    pub fn codegree(&self, u: usize, v: usize, s: &VertexSet) -> usize {
        assert_eq!(self.universe, s.universe(), "universe mismatch: set does not belong to this graph");
        and3_count(self.row(u), self.row(v), s.words())
    }

    pub fn neighbors(&self, v: usize) -> VertexSet {
        VertexSet::from_words(self.universe, self.row(v).to_vec())
    }

    pub fn neighbor_list(&self, v: usize) -> Vec<usize> {
        self.neighbors(v).to_vec()
    }

    pub fn edge_list(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.edges);
        for u in 0..self.order() {
            for v in self.neighbors(u).iter() {
                if v > u {
                    out.push((u, v));
                }
            }
        }
        out
    }

    /// Vertices at distance <= radius from v, including v itself.
    pub fn ball(&self, v: usize, radius: usize) -> VertexSet {
        let mut seen = VertexSet::empty(self.universe);
        seen.insert(v);
        let mut frontier = vec![v];
        for _ in 0..radius {
            let mut next = Vec::new();
            for &u in &frontier {
                for w in self.neighbors(u).iter() {
                    if !seen.contains(w) {
                        seen.insert(w);
                        next.push(w);
                    }
                }
            }
            frontier = next;
        }
        seen
    }

    /// BFS distance from u to v, or None if disconnected.
    pub fn distance(&self, u: usize, v: usize) -> Option<usize> {
        if u == v {
            return Some(0);
        }
        let mut seen = VertexSet::empty(self.universe);
        seen.insert(u);
        let mut frontier = vec![u];
        let mut d = 0;
        while !frontier.is_empty() {
            d += 1;
            let mut next = Vec::new();
            for &x in &frontier {
                for w in self.neighbors(x).iter() {
                    if w == v {
                        return Some(d);
                    }
                    if !seen.contains(w) {
                        seen.insert(w);
                        next.push(w);
                    }
                }
            }
            frontier = next;
        }
        None
    }
}

/// A bipartite pair (A, B): adjacency between two local index spaces,
/// kept in both orientations so min-degree scans are popcounts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BipartitePair {
    a_size: usize,
    b_size: usize,
    rows_a: Vec<u64>, // a_size rows over B
    rows_b: Vec<u64>, // b_size rows over A
    words_a: usize,   // words per B-row
    words_b: usize,   // words per A-row
    edges: usize,
}

impl BipartitePair {
    pub fn new(a_size: usize, b_size: usize) -> Self {
        let words_a = b_size.div_ceil(64).max(1);
        let words_b = a_size.div_ceil(64).max(1);
        BipartitePair {
            a_size,
            b_size,
            rows_a: vec![0; a_size * words_a],
            rows_b: vec![0; b_size * words_b],
            words_a,
            words_b,
            edges: 0,
        }
    }

    pub fn complete(a_size: usize, b_size: usize) -> Self {
        let mut p = Self::new(a_size, b_size);
        for i in 0..a_size {
            for j in 0..b_size {
                p.add_edge(i, j);
            }
        }
        p
    }

    pub fn a_size(&self) -> usize {
        self.a_size
    }

    pub fn b_size(&self) -> usize {
        self.b_size
    }

    pub fn edge_count(&self) -> usize {
        self.edges
    }

    pub fn add_edge(&mut self, i: usize, j: usize) {
        assert!(i < self.a_size && j < self.b_size, "pair edge ({i},{j}) out of range");
        if !self.has_edge(i, j) {
            self.rows_a[i * self.words_a + j / 64] |= 1u64 << (j % 64);
            self.rows_b[j * self.words_b + i / 64] |= 1u64 << (i % 64);
            self.edges += 1;
        }
    }

    #[inline]
    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.rows_a[i * self.words_a + j / 64] >> (j % 64) & 1 == 1
    }

    #[inline]
    pub fn row_a(&self, i: usize) -> &[u64] {
        &self.rows_a[i * self.words_a..(i + 1) * self.words_a]
    }

    #[inline]
    pub fn row_b(&self, j: usize) -> &[u64] {
        &self.rows_b[j * self.words_b..(j + 1) * self.words_b]
    }

    pub fn deg_a(&self, i: usize) -> usize {
        self.row_a(i).iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn deg_b(&self, j: usize) -> usize {
        self.row_b(j).iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Number of edges between X (A-side mask) and Y (B-side mask).
    pub fn edges_between(&self, x_mask: &[u64], y_mask: &[u64]) -> usize {
        let mut e = 0;
        for i in 0..self.a_size {
            if x_mask[i / 64] >> (i % 64) & 1 == 1 {
                e += and_count(self.row_a(i), y_mask);
            }
        }
        e
    }

    /// Codegree of two A-side vertices across B.
    pub fn codeg_a(&self, i1: usize, i2: usize) -> usize {
        and_count(self.row_a(i1), self.row_a(i2))
    }

    /// Exact density e / (|A|·|B|).
    pub fn density(&self) -> Result<Rat> {
        if self.a_size == 0 || self.b_size == 0 {
            return Err(Error::EmptySide);
        }
        Ok(Rat::new(self.edges as i128, (self.a_size * self.b_size) as i128))
    }

    /// Transposed copy (sides swapped).
    pub fn transposed(&self) -> BipartitePair {
        let mut t = BipartitePair::new(self.b_size, self.a_size);
        for i in 0..self.a_size {
            for j in 0..self.b_size {
                if self.has_edge(i, j) {
                    t.add_edge(j, i);
                }
            }
        }
        t
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rat;
    use proptest::prelude::*;

    fn complete_graph(n: usize) -> Graph {
        let mut g = Graph::new(Universe::pattern(n));
        for u in 0..n {
            for v in u + 1..n {
                g.add_edge(u, v);
            }
        }
        g
    }

    fn path_graph(n: usize) -> Graph {
        let mut g = Graph::new(Universe::pattern(n));
        for v in 1..n {
            g.add_edge(v - 1, v);
        }
        g
    }

    #[test]
    fn degree_into_complete() {
        let g = complete_graph(4);
        let s = VertexSet::from_indices(g.universe(), [1, 2, 3]);
        assert_eq!(g.degree_into(0, &s), 3);
    }

    #[test]
    fn degree_into_empty_set() {
        let g = complete_graph(4);
        let s = VertexSet::empty(g.universe());
        assert_eq!(g.degree_into(0, &s), 0);
    }

    #[test]
    fn degree_into_path() {
        let g = path_graph(4);
        let s = VertexSet::from_indices(g.universe(), [0, 3]);
        assert_eq!(g.degree_into(1, &s), 1);
    }

    #[test]
    fn codegree_k33_same_side() {
        // K_{3,3} as a plain graph: sides {0,1,2} and {3,4,5}
        let mut g = Graph::new(Universe::host(6));
        for u in 0..3 {
            for v in 3..6 {
                g.add_edge(u, v);
            }
        }
        let other = VertexSet::from_indices(g.universe(), [3, 4, 5]);
        assert_eq!(g.codegree(0, 1, &other), 3);
    }

    #[test]
    fn codegree_self_is_degree_into() {
        let g = path_graph(5);
        let s = VertexSet::from_indices(g.universe(), [0, 2, 4]);
        assert_eq!(g.codegree(1, 1, &s), g.degree_into(1, &s));
    }

    #[test]
    fn codegree_star_center_and_leaf() {
        // star with center 0, leaves 1..=4
        let mut g = Graph::new(Universe::pattern(5));
        for v in 1..5 {
            g.add_edge(0, v);
        }
        let all = VertexSet::full(g.universe());
        assert_eq!(g.codegree(0, 1, &all), 0);
    }

    #[test]
    fn density_examples() {
        assert_eq!(BipartitePair::complete(3, 3).density().unwrap(), rat(1, 1));
        assert_eq!(BipartitePair::new(3, 3).density().unwrap(), rat(0, 1));
        let mut p = BipartitePair::new(4, 4);
        for i in 0..4 {
            p.add_edge(i, i);
            p.add_edge(i, (i + 1) % 4);
        }
        assert_eq!(p.density().unwrap(), rat(1, 2));
        assert!(matches!(BipartitePair::new(0, 3).density(), Err(Error::EmptySide)));
    }

    #[test]
    #[should_panic(expected = "universe mismatch")]
    fn cross_universe_count_panics() {
        let g = path_graph(4);
        let s = VertexSet::full(Universe::host(4));
        g.degree_into(1, &s);
    }

    #[test]
    fn ball_and_distance() {
        let g = path_graph(10);
        assert_eq!(g.distance(0, 4), Some(4));
        assert_eq!(g.ball(5, 2).to_vec(), vec![3, 4, 5, 6, 7]);
    }

    proptest! {
        #[test]
        fn degrees_sum_over_partition(edges in proptest::collection::vec((0usize..12, 0usize..12), 0..40), split in 0usize..12) {
            let mut g = Graph::new(Universe::pattern(12));
            for (u, v) in edges {
                if u != v {
                    g.add_edge(u, v);
                }
            }
            let lo = VertexSet::from_indices(g.universe(), 0..split);
            let hi = VertexSet::from_indices(g.universe(), split..12);
            for v in 0..12 {
                prop_assert_eq!(g.degree_into(v, &lo) + g.degree_into(v, &hi), g.degree(v));
            }
        }

        #[test]
        fn codegree_at_most_min_degree(edges in proptest::collection::vec((0usize..10, 0usize..10), 0..30), u in 0usize..10, v in 0usize..10) {
            let mut g = Graph::new(Universe::pattern(10));
            for (a, b) in edges {
                if a != b {
                    g.add_edge(a, b);
                }
            }
            let s = VertexSet::from_indices(g.universe(), (0..10).filter(|x| x % 2 == 0));
            prop_assert!(g.codegree(u, v, &s) <= g.degree_into(u, &s).min(g.degree_into(v, &s)));
        }

        #[test]
        fn density_symmetric_and_relabel_invariant(edges in proptest::collection::vec((0usize..6, 0usize..6), 0..36)) {
            let mut p = BipartitePair::new(6, 6);
            for (i, j) in &edges {
                p.add_edge(*i, *j);
            }
            prop_assert_eq!(p.density().unwrap(), p.transposed().density().unwrap());
            // relabeling: reverse both sides
            let mut q = BipartitePair::new(6, 6);
            for (i, j) in &edges {
                q.add_edge(5 - *i, 5 - *j);
            }
            prop_assert_eq!(p.density().unwrap(), q.density().unwrap());
        }
    }
}
