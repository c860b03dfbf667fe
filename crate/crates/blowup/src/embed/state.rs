//! Embedding state: the vertex order, partial embedding, candidate and host
//! sets, buffers, and the update rule applied after each placement.

use crate::error::{Error, Result};
use crate::graph::{Graph, VertexSet};
use crate::instance::Instance;
use crate::rat::{ceil_mul, floor_mul, Rat};
use num::Zero;
use std::collections::BTreeSet;

/// Greedy selection of `quota` vertices from `members`, pairwise at distance
/// >= 4 in `h`. Candidates are scanned by ascending degree, then index; each
/// pick forbids its radius-3 ball. Returns the achievable count on failure.
pub fn spread_subset(h: &Graph, members: &[usize], quota: usize) -> std::result::Result<Vec<usize>, usize> {
    let mut scan: Vec<usize> = members.to_vec();
    scan.sort_by_key(|&v| (h.degree(v), v));
    let mut forbidden = VertexSet::empty(h.universe());
    let mut chosen = Vec::new();
    for &v in &scan {
        if chosen.len() == quota {
            break;
        }
        if forbidden.contains(v) {
            continue;
        }
        chosen.push(v);
        forbidden.union_with(&h.ball(v, 3));
    }
    if chosen.len() == quota {
        chosen.sort_unstable();
        Ok(chosen)
    } else {
        Err(chosen.len())
    }
}

/// Round-robin buffer selection across clusters. Within a cluster every pick
/// forbids its radius-3 ball; across clusters it forbids a ball of radius
/// `cross_radius` (3 = fully spread, 1 = non-adjacent, 0 = unconstrained).
fn pick_buffers(
    h: &Graph,
    classes: &[Vec<usize>],
    class_mask: &[VertexSet],
    quotas: &[usize],
    restricted: &VertexSet,
    cross_radius: usize,
) -> std::result::Result<Vec<Vec<usize>>, Vec<usize>> {
    let r = classes.len();
    let mut scan: Vec<Vec<usize>> = classes
        .iter()
        .map(|c| {
            let mut s = c.clone();
            s.sort_by_key(|&v| (h.degree(v), v));
            s
        })
        .collect();
    for s in scan.iter_mut() {
        s.retain(|&v| !restricted.contains(v));
    }
    let mut cursor = vec![0usize; r];
    let mut chosen: Vec<Vec<usize>> = vec![Vec::new(); r];
    let mut forbidden = VertexSet::empty(h.universe());
    loop {
        let mut progress = false;
        let mut all_met = true;
        for i in 0..r {
            if chosen[i].len() >= quotas[i] {
                continue;
            }
            all_met = false;
            while cursor[i] < scan[i].len() && forbidden.contains(scan[i][cursor[i]]) {
                cursor[i] += 1;
            }
            if cursor[i] >= scan[i].len() {
                continue;
            }
            let b = scan[i][cursor[i]];
            cursor[i] += 1;
            chosen[i].push(b);
            progress = true;
            let ball3 = h.ball(b, 3);
            let mut same = ball3.clone();
            same.intersect_with(&class_mask[i]);
            forbidden.union_with(&same);
            let mut cross = h.ball(b, cross_radius);
            cross.subtract(&class_mask[i]);
            forbidden.union_with(&cross);
        }
        if all_met {
            for c in chosen.iter_mut() {
                c.sort_unstable();
            }
            return Ok(chosen);
        }
        if !progress {
            return Err(chosen.iter().map(|c| c.len()).collect());
        }
    }
}

#[derive(Debug, Clone)]
pub struct EmbeddingState {
    /// Number of embedded vertices; `order[..t]` are embedded.
    pub t: usize,
    /// The sequence S; sweeps reorder the unembedded suffix stably.
    pub order: Vec<usize>,
    pos: Vec<usize>,
    pub phi: Vec<Option<usize>>,
    candidate: Vec<Option<VertexSet>>,
    host_set: Vec<Option<VertexSet>>,
    /// |C| at time 0 (N, or the restriction-set size).
    pub initial_size: Vec<usize>,
    /// Running exact lower bound on |C|: initial * prod of (d - eps) over
    /// embedded neighbors.
    pub c_bound: Vec<Rat>,
    /// Number of embedded pattern-neighbors per vertex.
    pub nu: Vec<usize>,
    pub occupied: VertexSet,
    pub buffers: Vec<Vec<usize>>,
    pub is_buffer: Vec<bool>,
    pub pulled: Vec<bool>,
    /// Total buffer count.
    pub m: usize,
    pub t0: usize,
    pub t1: usize,
    /// Host-set size at or below which a vertex is brought forward.
    pub sweep_threshold: usize,
    pub capital_t: Option<usize>,
    pub unembedded_by_cluster: Vec<BTreeSet<usize>>,
    pub non_buffer_left: usize,
    pub pulled_pending: usize,
    /// The host-side sweep runs exactly once per run.
    pub host_sweep_done: bool,
    /// Vertices the greedy phase gave up on; they join the representative
    /// completion with everything else unembedded.
    pub deferred: Vec<bool>,
    pub deferred_count: usize,
    /// Set during completion: shrinkage bookkeeping clamps to the actual set
    /// sizes, since the greedy-phase floor no longer steers placements.
    pub completing: bool,
    /// Thresholds that were clamped up to 1 at this scale.
    pub clamped: Vec<String>,
    /// Which spread mode buffer selection succeeded with.
    pub buffer_mode: String,
}

impl EmbeddingState {
    pub fn is_embedded(&self, x: usize) -> bool {
        self.phi[x].is_some()
    }

    pub fn candidate_set(&self, x: usize) -> &VertexSet {
        self.candidate[x].as_ref().expect("candidate set of an embedded vertex")
    }

    pub fn host_set(&self, x: usize) -> &VertexSet {
        self.host_set[x].as_ref().expect("host set of an embedded vertex")
    }

    /// Applies one placement: intersects neighbor sets with N(v), removes v
    /// from host sets of the same cluster, and advances time.
    pub fn embed(&mut self, inst: &Instance, x: usize, v: usize) {
        assert!(self.phi[x].is_none(), "vertex {x} embedded twice");
        let cx = inst.pattern.cluster_of(x);
        debug_assert_eq!(inst.host.cluster_of(v), cx, "image outside the assigned cluster");
        debug_assert!(self.host_set(x).contains(v), "image outside the host set");
        debug_assert!(!self.occupied.contains(v), "image already occupied");

        // stable move to the front of the unembedded suffix
        let p = self.pos[x];
        debug_assert!(p >= self.t);
        if p != self.t {
            self.order.remove(p);
            self.order.insert(self.t, x);
            for i in self.t..=p {
                self.pos[self.order[i]] = i;
            }
        }
        self.t += 1;

        self.candidate[x] = None;
        self.host_set[x] = None;
        self.phi[x] = Some(v);
        self.occupied.insert(v);
        self.unembedded_by_cluster[cx].remove(&x);
        if !self.is_buffer[x] && !self.deferred[x] {
            self.non_buffer_left -= 1;
        }
        if self.pulled[x] {
            self.pulled_pending -= 1;
        }

        let row = inst.host.graph.row(v).to_vec();
        for y in inst.pattern.graph.neighbor_list(x) {
            if self.phi[y].is_some() {
                continue;
            }
            let cy = inst.pattern.cluster_of(y);
            let d = inst.edge_density(cx, cy);
            let shrink = d - inst.params.eps;
            let factor = if shrink < Rat::zero() { Rat::zero() } else { shrink };
            self.c_bound[y] *= factor;
            self.nu[y] += 1;
            let c = self.candidate[y].as_mut().expect("unembedded neighbor has a candidate set");
            c.intersect_with_row(&row);
            let hs = self.host_set[y].as_mut().expect("unembedded neighbor has a host set");
            hs.intersect_with_row(&row);
            if self.completing {
                let actual = Rat::from_integer(self.candidate[y].as_ref().unwrap().count() as i128);
                if self.c_bound[y] > actual {
                    self.c_bound[y] = actual;
                }
            }
            debug_assert!(self.host_set[y].as_ref().unwrap().is_subset_of(self.candidate[y].as_ref().unwrap()));
        }
        // non-neighbors assigned to v's cluster lose v from their host pool
        let same_cluster: Vec<usize> = self.unembedded_by_cluster[cx].iter().copied().collect();
        for y in same_cluster {
            if let Some(hs) = self.host_set[y].as_mut() {
                hs.remove(v);
            }
        }
    }

    /// Phase 1 ends when only never-pulled buffer vertices (and deferred
    /// vertices) remain.
    pub fn phase1_done(&self) -> bool {
        self.non_buffer_left == 0 && self.pulled_pending == 0
    }

    /// Gives up on x in the greedy phase: moves it behind everything else in
    /// the order and hands it to the representative completion.
    pub fn defer(&mut self, x: usize) {
        assert!(!self.deferred[x] && self.phi[x].is_none());
        self.deferred[x] = true;
        self.deferred_count += 1;
        if !self.is_buffer[x] {
            self.non_buffer_left -= 1;
        }
        if self.pulled[x] {
            self.pulled_pending -= 1;
            self.pulled[x] = false;
        }
        let p = self.pos[x];
        self.order.remove(p);
        self.order.push(x);
        for i in p..self.order.len() {
            self.pos[self.order[i]] = i;
        }
    }

    /// Stable reorder of the unembedded suffix: vertices in `front` (kept in
    /// their current relative order) first, the rest after, relative order
    /// preserved. Buffer vertices moving forward are marked pulled.
    pub fn bring_forward(&mut self, front: &BTreeSet<usize>) {
        if front.is_empty() {
            return;
        }
        let suffix = self.order.split_off(self.t);
        let (mut first, mut rest): (Vec<usize>, Vec<usize>) = (Vec::new(), Vec::new());
        for x in suffix {
            if front.contains(&x) {
                first.push(x);
            } else {
                rest.push(x);
            }
        }
        for &x in &first {
            if self.is_buffer[x] && !self.pulled[x] {
                self.pulled[x] = true;
                self.pulled_pending += 1;
            }
        }
        self.order.extend(first);
        self.order.extend(rest);
        for (i, &x) in self.order.iter().enumerate().skip(self.t) {
            self.pos[x] = i;
        }
    }

    /// Full invariant scan; returns human-readable violations (empty = clean).
    pub fn check_invariants(&self, inst: &Instance) -> Vec<String> {
        let mut out = Vec::new();
        for x in 0..inst.pattern.order() {
            match self.phi[x] {
                Some(v) => {
                    if inst.host.cluster_of(v) != inst.pattern.cluster_of(x) {
                        out.push(format!("phi({x})={v} leaves cluster"));
                    }
                }
                None => {
                    let c = self.candidate[x].as_ref().unwrap();
                    let hs = self.host_set[x].as_ref().unwrap();
                    if !hs.is_subset_of(c) {
                        out.push(format!("host set of {x} escapes its candidate set"));
                    }
                    if !hs.is_disjoint_from(&self.occupied) {
                        out.push(format!("host set of {x} meets occupied vertices"));
                    }
                    let cluster = inst.host.cluster_set(inst.pattern.cluster_of(x));
                    if !c.is_subset_of(&cluster) {
                        out.push(format!("candidate set of {x} leaves its cluster"));
                    }
                    let bound = &self.c_bound[x];
                    if (c.count() as i128) * bound.denom() < *bound.numer() {
                        out.push(format!(
                            "candidate set of {x} has {} elements, below its shrinkage bound {}",
                            c.count(),
                            crate::rat::format_rat(bound)
                        ));
                    }
                }
            }
        }
        let mut seen = std::collections::BTreeSet::new();
        for x in 0..inst.pattern.order() {
            if let Some(v) = self.phi[x] {
                if !seen.insert(v) {
                    out.push(format!("host vertex {v} used twice"));
                }
                for y in inst.pattern.graph.neighbor_list(x) {
                    if let Some(w) = self.phi[y] {
                        if !inst.host.graph.has_edge(v, w) {
                            out.push(format!("edge ({x},{y}) not preserved"));
                        }
                    }
                }
            }
        }
        out
    }
}

/// Builds the initial state: buffers, the order S, candidate and host sets,
/// and the clamped thresholds.
pub fn preprocess(inst: &Instance) -> Result<EmbeddingState> {
    inst.validate()?;
    let n = inst.n();
    let big_n = inst.n_per_cluster();
    let r = inst.r();
    let pattern = &inst.pattern;
    let restriction = inst.restriction_map();

    let quota = ceil_mul(&inst.params.d1, big_n).max(1);
    let quotas = vec![quota; r];
    let classes: Vec<Vec<usize>> = (0..r).map(|i| pattern.class(i)).collect();
    let class_mask: Vec<VertexSet> = classes
        .iter()
        .map(|c| VertexSet::from_indices(pattern.graph.universe(), c.iter().copied()))
        .collect();
    let restricted_mask = VertexSet::from_indices(
        pattern.graph.universe(),
        restriction.keys().copied(),
    );

    // Widest spread first; relax the cross-cluster constraint only as needed.
    let mut picked = None;
    let mut mode = "";
    let mut last_err: Vec<usize> = Vec::new();
    for (cross_radius, name) in [(3usize, "global"), (1, "non-adjacent"), (0, "per-cluster")] {
        match pick_buffers(&pattern.graph, &classes, &class_mask, &quotas, &restricted_mask, cross_radius) {
            Ok(b) => {
                picked = Some(b);
                mode = name;
                break;
            }
            Err(achieved) => last_err = achieved,
        }
    }
    let buffers = picked.ok_or_else(|| {
        Error::Preprocess(format!(
            "cannot find {quota} buffer vertices per cluster at pairwise distance >= 4; achievable counts {last_err:?}"
        ))
    })?;

    let mut is_buffer = vec![false; n];
    for b in buffers.iter().flatten() {
        is_buffer[*b] = true;
    }
    let m: usize = buffers.iter().map(|b| b.len()).sum();

    // Order: buffer neighborhoods, then restricted vertices, then the rest,
    // buffers last. Duplicates keep their first position; buffer vertices
    // never enter the early segments.
    let mut order = Vec::with_capacity(n);
    let mut seen = vec![false; n];
    for cluster in &buffers {
        for &b in cluster {
            for y in pattern.graph.neighbor_list(b) {
                if !is_buffer[y] && !seen[y] {
                    seen[y] = true;
                    order.push(y);
                }
            }
        }
    }
    let t0 = order.len();
    let mut restricted_sorted: Vec<usize> = restriction.keys().copied().collect();
    restricted_sorted.sort_unstable();
    for x in restricted_sorted {
        if !is_buffer[x] && !seen[x] {
            seen[x] = true;
            order.push(x);
        }
    }
    for x in 0..n {
        if !is_buffer[x] && !seen[x] {
            order.push(x);
        }
    }
    let mut buffer_tail: Vec<usize> = buffers.iter().flatten().copied().collect();
    buffer_tail.sort_unstable();
    order.extend(buffer_tail);
    debug_assert_eq!(order.len(), n);
    let mut pos = vec![0usize; n];
    for (i, &x) in order.iter().enumerate() {
        pos[x] = i;
    }

    let mut clamped = Vec::new();
    let mut t1 = floor_mul(&inst.params.d2, n);
    if t1 == 0 {
        t1 = 1;
        clamped.push("t1".to_string());
    }
    let d1sq = inst.params.d1 * inst.params.d1;
    let mut sweep_threshold = floor_mul(&d1sq, n);
    if sweep_threshold == 0 {
        sweep_threshold = 1;
        clamped.push("sweep-threshold".to_string());
    }
    // tuning hook, removed after calibration
    if let Ok(s) = std::env::var("BLOWUP_THR") {
        sweep_threshold = s.parse().unwrap();
    }

    let mut candidate = Vec::with_capacity(n);
    let mut initial_size = Vec::with_capacity(n);
    for x in 0..n {
        let set = match restriction.get(&x) {
            Some(allowed) => (*allowed).clone(),
            None => inst.host.cluster_set(pattern.cluster_of(x)),
        };
        initial_size.push(set.count());
        candidate.push(Some(set));
    }
    let host_set = candidate.clone();
    let c_bound: Vec<Rat> =
        initial_size.iter().map(|&s| Rat::from_integer(s as i128)).collect();

    let mut unembedded_by_cluster = vec![BTreeSet::new(); r];
    for x in 0..n {
        unembedded_by_cluster[pattern.cluster_of(x)].insert(x);
    }

    Ok(EmbeddingState {
        t: 0,
        order,
        pos,
        phi: vec![None; n],
        candidate,
        host_set,
        initial_size,
        c_bound,
        nu: vec![0; n],
        occupied: VertexSet::empty(inst.host.graph.universe()),
        buffers,
        is_buffer,
        pulled: vec![false; n],
        m,
        t0,
        t1,
        sweep_threshold,
        capital_t: None,
        unembedded_by_cluster,
        non_buffer_left: n - m,
        pulled_pending: 0,
        host_sweep_done: false,
        deferred: vec![false; n],
        deferred_count: 0,
        completing: false,
        clamped,
        buffer_mode: mode.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{assemble_instance, gen_hamiltonian_path_pattern, gen_matching_pattern};
    use crate::params::ParameterCascade;
    use crate::rat::rat;
    use crate::regularity::ClusterGraph;

    fn k2() -> ClusterGraph {
        let mut g = ClusterGraph::new(2);
        g.add_edge(0, 1);
        g
    }

    #[test]
    fn cycle9_admits_at_most_two_spread_vertices() {
        let mut g = Graph::new(crate::graph::Universe::pattern(9));
        for v in 0..9 {
            g.add_edge(v, (v + 1) % 9);
        }
        let members: Vec<usize> = (0..9).collect();
        assert_eq!(spread_subset(&g, &members, 3), Err(2));
        let two = spread_subset(&g, &members, 2).unwrap();
        assert_eq!(two.len(), 2);
        assert!(g.distance(two[0], two[1]).unwrap() >= 4);
    }

    #[test]
    fn matching_pattern_t0_equals_buffer_count() {
        let params = ParameterCascade::defaults_for(rat(1, 1), 1, 2).unwrap();
        let inst =
            assemble_instance(&k2(), 16, rat(1, 1), gen_matching_pattern(16), params, vec![], 3).unwrap();
        let st = preprocess(&inst).unwrap();
        // every buffer has exactly one neighbor, and neighborhoods are disjoint
        assert_eq!(st.t0, st.m);
    }

    #[test]
    fn ham_path_buffers_pairwise_far() {
        let params = ParameterCascade::defaults_for(rat(1, 2), 2, 2).unwrap();
        let inst = assemble_instance(
            &k2(),
            200,
            rat(1, 2),
            gen_hamiltonian_path_pattern(200),
            params,
            vec![],
            7,
        )
        .unwrap();
        let st = preprocess(&inst).unwrap();
        assert_eq!(st.buffers[0].len(), 25);
        assert_eq!(st.buffers[1].len(), 25);
        for cluster in &st.buffers {
            for (i, &a) in cluster.iter().enumerate() {
                for &b in cluster.iter().skip(i + 1) {
                    let d = inst.pattern.graph.distance(a, b).unwrap();
                    assert!(d >= 4, "buffers {a},{b} at distance {d}");
                }
            }
        }
        // order: neighborhoods first, buffers last
        for &x in &st.order[..st.t0] {
            assert!(!st.is_buffer[x]);
        }
        for &x in &st.order[st.order.len() - st.m..] {
            assert!(st.is_buffer[x]);
        }
    }

    #[test]
    fn no_embedded_vertex_neighbors_two_buffers_of_one_cluster() {
        let params = ParameterCascade::defaults_for(rat(1, 2), 2, 2).unwrap();
        let inst = assemble_instance(
            &k2(),
            60,
            rat(1, 2),
            gen_hamiltonian_path_pattern(60),
            params,
            vec![],
            13,
        )
        .unwrap();
        let st = preprocess(&inst).unwrap();
        for cluster in &st.buffers {
            let mut seen = std::collections::BTreeSet::new();
            for &b in cluster {
                for y in inst.pattern.graph.neighbor_list(b) {
                    assert!(seen.insert(y), "vertex {y} neighbors two buffers in one cluster");
                }
            }
        }
    }
}
