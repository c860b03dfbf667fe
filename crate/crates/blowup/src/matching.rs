//! Maximum bipartite matching (Hopcroft-Karp), systems of distinct
//! representatives, and Hall-condition diagnostics for the completion phase.

use crate::graph::VertexSet;
use crate::rat::{count_ge_mul, Rat};
use rand::Rng;
use serde::{Deserialize, Serialize};

/// Bipartite candidacy between left vertices (by external id) and right
/// vertices (by external id), adjacency by local index.
#[derive(Debug, Clone)]
pub struct CandidacyGraph {
    pub left_ids: Vec<usize>,
    pub right_ids: Vec<usize>,
    adj: Vec<Vec<usize>>,
}

impl CandidacyGraph {
    pub fn new(left_ids: Vec<usize>, right_ids: Vec<usize>) -> Self {
        let adj = vec![Vec::new(); left_ids.len()];
        CandidacyGraph { left_ids, right_ids, adj }
    }

    /// Complete candidacy on M + M vertices with identity ids.
    pub fn complete(m: usize) -> Self {
        let mut g = Self::new((0..m).collect(), (0..m).collect());
        for i in 0..m {
            g.adj[i] = (0..m).collect();
        }
        g
    }

    pub fn add_edge(&mut self, left_local: usize, right_local: usize) {
        debug_assert!(right_local < self.right_ids.len());
        self.adj[left_local].push(right_local);
    }

    pub fn left_len(&self) -> usize {
        self.left_ids.len()
    }

    pub fn right_len(&self) -> usize {
        self.right_ids.len()
    }

    pub fn neighbors(&self, left_local: usize) -> &[usize] {
        &self.adj[left_local]
    }

    /// Builds a candidacy from one set per left vertex; the right side is the
    /// sorted union of the sets.
    pub fn from_sets(sets: &[VertexSet]) -> Self {
        let mut union = match sets.first() {
            Some(s) => VertexSet::empty(s.universe()),
            None => return CandidacyGraph::new(vec![], vec![]),
        };
        for s in sets {
            union.union_with(s);
        }
        let right_ids = union.to_vec();
        let index_of: std::collections::BTreeMap<usize, usize> =
            right_ids.iter().enumerate().map(|(k, &v)| (v, k)).collect();
        let mut g = CandidacyGraph::new((0..sets.len()).collect(), right_ids);
        for (x, s) in sets.iter().enumerate() {
            for v in s.iter() {
                g.add_edge(x, index_of[&v]);
            }
        }
        g
    }
}

#[derive(Debug, Clone)]
pub struct MatchingResult {
    /// Matched pairs as (left_local, right_local).
    pub pairs: Vec<(usize, usize)>,
    /// True when every left vertex is matched.
    pub perfect: bool,
    /// Present iff not perfect: left vertices S with |N(S)| < |S|.
    pub hall_witness: Option<Vec<usize>>,
    /// Number of phases (rounds of shortest augmenting paths).
    pub phases: usize,
}

const INF: usize = usize::MAX;

/// Maximum-cardinality matching via repeated shortest augmenting-path phases.
/// Deterministic: vertices are scanned in index order. When the matching is
/// not perfect, a Hall witness is derived from alternating reachability.
pub fn max_matching(g: &CandidacyGraph) -> MatchingResult {
    let n_left = g.left_len();
    let n_right = g.right_len();
    let mut match_left = vec![INF; n_left]; // left -> right
    let mut match_right = vec![INF; n_right]; // right -> left
    let mut dist = vec![INF; n_left];
    let mut phases = 0;

    loop {
        // BFS over free left vertices, layering by alternating distance.
        let mut queue = std::collections::VecDeque::new();
        for u in 0..n_left {
            if match_left[u] == INF {
                dist[u] = 0;
                queue.push_back(u);
            } else {
                dist[u] = INF;
            }
        }
        let mut found_free_right = false;
        while let Some(u) = queue.pop_front() {
            for &v in g.neighbors(u) {
                match match_right[v] {
                    INF => found_free_right = true,
                    w => {
                        if dist[w] == INF {
                            dist[w] = dist[u] + 1;
                            queue.push_back(w);
                        }
                    }
                }
            }
        }
        if !found_free_right {
            break;
        }
        phases += 1;
        let mut augmented = false;
        for u in 0..n_left {
            if match_left[u] == INF
                && augment(g, u, &mut match_left, &mut match_right, &mut dist)
            {
                augmented = true;
            }
        }
        if !augmented {
            break;
        }
    }

    let pairs: Vec<(usize, usize)> = (0..n_left)
        .filter(|&u| match_left[u] != INF)
        .map(|u| (u, match_left[u]))
        .collect();
    let perfect = pairs.len() == n_left;
    let hall_witness = if perfect {
        None
    } else {
        Some(hall_witness(g, &match_left, &match_right))
    };
    MatchingResult { pairs, perfect, hall_witness, phases }
}

fn augment(
    g: &CandidacyGraph,
    u: usize,
    match_left: &mut [usize],
    match_right: &mut [usize],
    dist: &mut [usize],
) -> bool {
    let d = std::mem::replace(&mut dist[u], INF);
    for &v in g.neighbors(u) {
        match match_right[v] {
            INF => {
                match_left[u] = v;
                match_right[v] = u;
                return true;
            }
            w => {
                if dist[w] == d + 1 && augment(g, w, match_left, match_right, dist) {
                    match_left[u] = v;
                    match_right[v] = u;
                    return true;
                }
            }
        }
    }
    false
}

/// König-style witness: left vertices reachable from some unmatched left
/// vertex by alternating paths. Every right neighbor of the witness is
/// matched back into it, so the neighborhood union is strictly smaller.
fn hall_witness(g: &CandidacyGraph, match_left: &[usize], match_right: &[usize]) -> Vec<usize> {
    let mut in_s = vec![false; g.left_len()];
    let mut seen_right = vec![false; g.right_len()];
    let mut stack: Vec<usize> = (0..g.left_len()).filter(|&u| match_left[u] == INF).collect();
    for &u in &stack {
        in_s[u] = true;
    }
    while let Some(u) = stack.pop() {
        for &v in g.neighbors(u) {
            if !seen_right[v] {
                seen_right[v] = true;
                let w = match_right[v];
                if w != INF && !in_s[w] {
                    in_s[w] = true;
                    stack.push(w);
                }
            }
        }
    }
    (0..g.left_len()).filter(|&u| in_s[u]).collect()
}

/// Outcome of a distinct-representatives query.
#[derive(Debug, Clone)]
pub enum SdrOutcome {
    /// One representative per input set, pairwise distinct.
    Representatives(Vec<usize>),
    /// Hall witness: set indices whose union is smaller than the family.
    NoSystem { witness: Vec<usize>, union: Vec<usize> },
}

/// System of distinct representatives of `sets`, or a Hall witness.
pub fn sdr(sets: &[VertexSet]) -> SdrOutcome {
    let g = CandidacyGraph::from_sets(sets);
    let m = max_matching(&g);
    if m.perfect {
        let mut reps = vec![0usize; sets.len()];
        for (l, r) in m.pairs {
            reps[l] = g.right_ids[r];
        }
        SdrOutcome::Representatives(reps)
    } else {
        let witness = m.hall_witness.expect("imperfect matching carries a witness");
        let mut union = match sets.first() {
            Some(s) => VertexSet::empty(s.universe()),
            None => unreachable!("empty family is perfectly matched"),
        };
        for &x in &witness {
            union.union_with(&sets[x]);
        }
        SdrOutcome::NoSystem { witness, union: union.to_vec() }
    }
}

/// Diagnostic report on the three sufficient conditions for an SDR.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HallAuditReport {
    pub m: usize,
    #[serde(with = "crate::rat::rat_serde")]
    pub d3: Rat,
    /// (5): every set strictly larger than d3*M.
    pub cond5_ok: bool,
    pub cond5_min_size: usize,
    /// (6): sampled subsets of size >= d3*M union to >= (1-d3)*M elements.
    pub cond6_ok: bool,
    pub cond6_samples: usize,
    pub cond6_min_union: usize,
    /// (7): every ground vertex lies in at least d3*M sets.
    pub cond7_ok: bool,
    pub cond7_min_membership: usize,
}

/// Checks (5) exactly, (6) on seeded random subsets, and (7) exactly over
/// `ground` (the host vertices still available). Diagnostic only.
pub fn hall_audit(
    sets: &[VertexSet],
    ground: &VertexSet,
    d3: Rat,
    seed: u64,
    samples: usize,
) -> HallAuditReport {
    let m = sets.len();
    let cond5_min_size = sets.iter().map(|s| s.count()).min().unwrap_or(0);
    // strict: |H_x| > d3*M
    let cond5_ok = sets
        .iter()
        .all(|s| (s.count() as i128) * d3.denom() > d3.numer() * (m as i128));

    let mut rng = crate::seeds::rng(seed, "hall", 0);
    let min_subset = crate::rat::ceil_mul(&d3, m).max(1);
    let mut cond6_ok = true;
    let mut cond6_min_union = usize::MAX;
    let mut cond6_samples = 0;
    if m > 0 {
        for _ in 0..samples {
            let size = rng.gen_range(min_subset..=m);
            let mut idx: Vec<usize> = (0..m).collect();
            // partial Fisher-Yates
            for k in 0..size {
                let j = rng.gen_range(k..m);
                idx.swap(k, j);
            }
            let mut union = VertexSet::empty(sets[0].universe());
            for &x in &idx[..size] {
                union.union_with(&sets[x]);
            }
            let u = union.count();
            cond6_min_union = cond6_min_union.min(u);
            // |union| >= (1 - d3) * M
            let one_minus = Rat::new(d3.denom() - d3.numer(), *d3.denom());
            if !count_ge_mul(u, &one_minus, m) {
                cond6_ok = false;
            }
            cond6_samples += 1;
        }
    }
    if cond6_min_union == usize::MAX {
        cond6_min_union = 0;
    }

    let mut cond7_ok = true;
    let mut cond7_min_membership = usize::MAX;
    for v in ground.iter() {
        let cnt = sets.iter().filter(|s| s.contains(v)).count();
        cond7_min_membership = cond7_min_membership.min(cnt);
        if !count_ge_mul(cnt, &d3, m) {
            cond7_ok = false;
        }
    }
    if cond7_min_membership == usize::MAX {
        cond7_min_membership = 0;
    }

    HallAuditReport {
        m,
        d3,
        cond5_ok,
        cond5_min_size,
        cond6_ok,
        cond6_samples,
        cond6_min_union,
        cond7_ok,
        cond7_min_membership,
    }
}

/// Validates that `pairs` is a matching in `g`: edges exist, no endpoint
/// repeats. Used by tests and by callers double-checking results.
pub fn is_valid_matching(g: &CandidacyGraph, pairs: &[(usize, usize)]) -> bool {
    let mut seen_l = vec![false; g.left_len()];
    let mut seen_r = vec![false; g.right_len()];
    for &(l, r) in pairs {
        if l >= g.left_len() || r >= g.right_len() || seen_l[l] || seen_r[r] {
            return false;
        }
        if !g.neighbors(l).contains(&r) {
            return false;
        }
        seen_l[l] = true;
        seen_r[r] = true;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Universe;
    use rand::Rng;

    /// Single-augmenting-path maximum matching, the independent oracle.
    fn kuhn_size(g: &CandidacyGraph) -> usize {
        fn try_augment(
            g: &CandidacyGraph,
            u: usize,
            visited: &mut [bool],
            match_right: &mut [usize],
        ) -> bool {
            for &v in g.neighbors(u) {
                if !visited[v] {
                    visited[v] = true;
                    if match_right[v] == INF
                        || try_augment(g, match_right[v], visited, match_right)
                    {
                        match_right[v] = u;
                        return true;
                    }
                }
            }
            false
        }
        let mut match_right = vec![INF; g.right_len()];
        let mut size = 0;
        for u in 0..g.left_len() {
            let mut visited = vec![false; g.right_len()];
            if try_augment(g, u, &mut visited, &mut match_right) {
                size += 1;
            }
        }
        size
    }

    fn random_candidacy(l: usize, r: usize, p: f64, seed: u64) -> CandidacyGraph {
        let mut rng = crate::seeds::rng(seed, "cand", 0);
        let mut g = CandidacyGraph::new((0..l).collect(), (0..r).collect());
        for i in 0..l {
            for j in 0..r {
                if rng.gen_bool(p) {
                    g.add_edge(i, j);
                }
            }
        }
        g
    }

    #[test]
    fn complete_candidacy_has_perfect_matching() {
        let g = CandidacyGraph::complete(8);
        let m = max_matching(&g);
        assert!(m.perfect);
        assert_eq!(m.pairs.len(), 8);
        assert!(is_valid_matching(&g, &m.pairs));
    }

    #[test]
    fn shared_single_host_yields_witness() {
        let mut g = CandidacyGraph::new(vec![10, 11], vec![42]);
        g.add_edge(0, 0);
        g.add_edge(1, 0);
        let m = max_matching(&g);
        assert!(!m.perfect);
        let w = m.hall_witness.unwrap();
        assert_eq!(w, vec![0, 1]);
        // union of their neighborhoods is the single right vertex
        let union: std::collections::BTreeSet<usize> =
            w.iter().flat_map(|&u| g.neighbors(u).iter().copied()).collect();
        assert!(union.len() < w.len());
    }

    #[test]
    fn agrees_with_single_path_oracle_on_seeded_graphs() {
        for seed in 0..50u64 {
            let g = random_candidacy(50, 50, 0.3, seed);
            let m = max_matching(&g);
            assert!(is_valid_matching(&g, &m.pairs));
            assert_eq!(m.pairs.len(), kuhn_size(&g), "seed {seed}");
        }
    }

    #[test]
    fn witness_recounts_whenever_emitted() {
        for seed in 0..60u64 {
            let g = random_candidacy(30, 30, 0.08, seed);
            let m = max_matching(&g);
            if let Some(w) = &m.hall_witness {
                let union: std::collections::BTreeSet<usize> =
                    w.iter().flat_map(|&u| g.neighbors(u).iter().copied()).collect();
                assert!(union.len() < w.len(), "witness fails to recount on seed {seed}");
            }
        }
    }

    #[test]
    fn determinism_fixed_input_fixed_matching() {
        let g = random_candidacy(40, 40, 0.2, 9);
        let m1 = max_matching(&g);
        let m2 = max_matching(&g);
        assert_eq!(m1.pairs, m2.pairs);
    }

    #[test]
    fn sdr_full_sets_and_singletons() {
        let u = Universe::host(6);
        let full: Vec<VertexSet> = (0..6).map(|_| VertexSet::full(u)).collect();
        match sdr(&full) {
            SdrOutcome::Representatives(reps) => {
                let s: std::collections::BTreeSet<_> = reps.iter().collect();
                assert_eq!(s.len(), 6);
            }
            _ => panic!("full sets admit an SDR"),
        }

        let perm = [3usize, 0, 4, 1, 5, 2];
        let singles: Vec<VertexSet> =
            perm.iter().map(|&v| VertexSet::from_indices(u, [v])).collect();
        match sdr(&singles) {
            SdrOutcome::Representatives(reps) => assert_eq!(reps, perm.to_vec()),
            _ => panic!("a permutation of singletons is its own SDR"),
        }
    }

    #[test]
    fn hall_audit_full_and_singleton_sets() {
        let u = Universe::host(8);
        let ground = VertexSet::full(u);
        let full: Vec<VertexSet> = (0..8).map(|_| VertexSet::full(u)).collect();
        let rep = hall_audit(&full, &ground, crate::rat::rat(1, 10), 1, 50);
        assert!(rep.cond5_ok && rep.cond6_ok && rep.cond7_ok);
        assert_eq!(rep.cond5_min_size, 8);

        // singleton permutation with d3*M > 1 breaks (5)
        let singles: Vec<VertexSet> = (0..8).map(|v| VertexSet::from_indices(u, [v])).collect();
        let rep = hall_audit(&singles, &ground, crate::rat::rat(1, 4), 1, 50);
        assert!(!rep.cond5_ok);
        assert_eq!(rep.cond5_min_size, 1);
    }
}
