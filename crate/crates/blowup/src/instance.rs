//! Pattern graphs with cluster assignments, and full instances whose
//! hypotheses hold by construction. Assignments are always produced together
//! with the pattern; the crate never searches for one.

use crate::error::{Error, Result};
use crate::graph::{Graph, Universe, VertexSet};
use crate::params::ParameterCascade;
use crate::rat::{count_ge_mul, count_le_mul, Rat};
use crate::regularity::{generate_super_regular_pair, ClusterGraph, HostGraph};
use rand::seq::SliceRandom;
use rand::Rng;
use std::collections::BTreeMap;

/// A pattern graph H with its degree bound and cluster assignment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatternGraph {
    pub graph: Graph,
    /// Declared degree bound; the graph's actual maximum degree never exceeds it.
    pub max_degree: usize,
    /// Cluster index per pattern vertex.
    pub assignment: Vec<usize>,
    pub r: usize,
}

impl PatternGraph {
    pub fn order(&self) -> usize {
        self.graph.order()
    }

    pub fn cluster_of(&self, x: usize) -> usize {
        self.assignment[x]
    }

    /// Pattern vertices assigned to cluster i, in index order.
    pub fn class(&self, i: usize) -> Vec<usize> {
        (0..self.order()).filter(|&x| self.assignment[x] == i).collect()
    }

    pub fn class_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.r];
        for &c in &self.assignment {
            sizes[c] += 1;
        }
        sizes
    }

    /// Checks the degree bound, exact class sizes, and that the assignment
    /// maps every edge onto a cluster edge.
    pub fn validate(&self, clusters: &ClusterGraph, n_per_cluster: usize) -> Result<()> {
        if self.r != clusters.r {
            return Err(Error::Invariant(format!(
                "pattern expects r={} but cluster graph has r={}",
                self.r, clusters.r
            )));
        }
        if self.assignment.len() != self.order() {
            return Err(Error::Invariant("assignment length differs from pattern order".into()));
        }
        if self.graph.max_degree() > self.max_degree {
            return Err(Error::Invariant(format!(
                "pattern maximum degree {} exceeds bound {}",
                self.graph.max_degree(),
                self.max_degree
            )));
        }
        if let Some(&c) = self.assignment.iter().find(|&&c| c >= self.r) {
            return Err(Error::Invariant(format!("assignment hits cluster {c} >= r")));
        }
        let sizes = self.class_sizes();
        if sizes.iter().any(|&s| s != n_per_cluster) {
            return Err(Error::Invariant(format!(
                "class sizes {sizes:?} differ from N={n_per_cluster}"
            )));
        }
        for (x, y) in self.graph.edge_list() {
            let (cx, cy) = (self.assignment[x], self.assignment[y]);
            if cx == cy {
                return Err(Error::Invariant(format!(
                    "edge ({x},{y}) stays inside cluster {cx}"
                )));
            }
            if !clusters.has_edge(cx, cy) {
                return Err(Error::Invariant(format!(
                    "edge ({x},{y}) maps onto the cluster non-edge ({cx},{cy})"
                )));
            }
        }
        Ok(())
    }
}

/// Perfect matching between two classes: the smallest spanning pattern.
pub fn gen_matching_pattern(n_per_cluster: usize) -> PatternGraph {
    let n = n_per_cluster;
    let mut graph = Graph::new(Universe::pattern(2 * n));
    let mut assignment = vec![0; 2 * n];
    for i in 0..n {
        graph.add_edge(i, n + i);
        assignment[n + i] = 1;
    }
    PatternGraph { graph, max_degree: 1, assignment, r: 2 }
}

/// Hamiltonian path on 2N vertices, assignment alternating between the two
/// clusters.
pub fn gen_hamiltonian_path_pattern(n_per_cluster: usize) -> PatternGraph {
    let total = 2 * n_per_cluster;
    let mut graph = Graph::new(Universe::pattern(total));
    for v in 1..total {
        graph.add_edge(v - 1, v);
    }
    let assignment = (0..total).map(|v| v % 2).collect();
    PatternGraph { graph, max_degree: 2, assignment, r: 2 }
}

/// k-th power of a Hamiltonian cycle on (k+1)·N vertices with the cyclic
/// assignment i mod (k+1). Every chord spans fewer than k+1 positions, so all
/// edges cross clusters and land on cluster edges of the complete reduced
/// graph on k+1 clusters.
pub fn gen_power_ham_cycle_pattern(n_per_cluster: usize, k: usize) -> Result<PatternGraph> {
    if k < 1 {
        return Err(Error::Usage("cycle power k must be at least 1".into()));
    }
    if n_per_cluster < 2 {
        return Err(Error::Degenerate(format!(
            "power-of-cycle pattern needs N >= 2, got {n_per_cluster}"
        )));
    }
    let r = k + 1;
    let total = r * n_per_cluster;
    let mut graph = Graph::new(Universe::pattern(total));
    for v in 0..total {
        for d in 1..=k {
            graph.add_edge(v, (v + d) % total);
        }
    }
    let assignment = (0..total).map(|v| v % r).collect();
    Ok(PatternGraph { graph, max_degree: 2 * k, assignment, r })
}

/// Square of a Hamiltonian cycle on 3N vertices (r = 3).
pub fn gen_square_ham_cycle_pattern(n_per_cluster: usize) -> Result<PatternGraph> {
    gen_power_ham_cycle_pattern(n_per_cluster, 2)
}

const TREE_ATTEMPTS: usize = 10_000;

/// Seeded random tree on 2N vertices with maximum degree at most
/// `max_degree`, whose proper 2-coloring has classes of size exactly N.
/// Built by degree-capped random attachment with rejection on unbalanced
/// colorings.
pub fn gen_bounded_tree_pattern(n_per_cluster: usize, max_degree: usize, seed: u64) -> Result<PatternGraph> {
    if max_degree < 3 {
        return Err(Error::Usage(format!("tree degree bound must be >= 3, got {max_degree}")));
    }
    let total = 2 * n_per_cluster;
    for attempt in 0..TREE_ATTEMPTS {
        let mut rng = crate::seeds::rng(seed, "tree", attempt as u64);
        let mut deg = vec![0usize; total];
        let mut color = vec![0usize; total];
        let mut edges = Vec::with_capacity(total.saturating_sub(1));
        let mut ok = true;
        for v in 1..total {
            let open: Vec<usize> = (0..v).filter(|&u| deg[u] < max_degree).collect();
            if open.is_empty() {
                ok = false;
                break;
            }
            let parent = open[rng.gen_range(0..open.len())];
            edges.push((parent, v));
            deg[parent] += 1;
            deg[v] += 1;
            color[v] = 1 - color[parent];
        }
        if !ok {
            continue;
        }
        if color.iter().filter(|&&c| c == 0).count() != n_per_cluster {
            continue;
        }
        let mut graph = Graph::new(Universe::pattern(total));
        for (u, v) in edges {
            graph.add_edge(u, v);
        }
        return Ok(PatternGraph { graph, max_degree, assignment: color, r: 2 });
    }
    Err(Error::Generation(format!(
        "no balanced 2-coloring in {TREE_ATTEMPTS} tree attempts for N={n_per_cluster}; reseed"
    )))
}

/// An a-priori restriction: the vertex's image must land in `allowed`, a
/// subset of its assigned cluster (global host indices).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Restriction {
    pub vertex: usize,
    pub allowed: VertexSet,
}

/// Records which derived seeds an instance was built from.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct SeedLineage {
    pub root: u64,
    pub derived: BTreeMap<String, u64>,
}

impl SeedLineage {
    pub fn new(root: u64) -> Self {
        SeedLineage { root, derived: BTreeMap::new() }
    }

    pub fn record(&mut self, tag: &str, index: u64) -> u64 {
        let s = crate::seeds::derive(self.root, tag, index);
        self.derived.insert(format!("{tag}:{index}"), s);
        s
    }
}

/// A complete embedding problem: host, pattern, restrictions and parameters.
#[derive(Debug, Clone)]
pub struct Instance {
    pub host: HostGraph,
    pub pattern: PatternGraph,
    pub restrictions: Vec<Restriction>,
    pub params: ParameterCascade,
    pub seeds: SeedLineage,
}

impl Instance {
    pub fn n(&self) -> usize {
        self.host.order()
    }

    pub fn r(&self) -> usize {
        self.host.clusters.r
    }

    pub fn n_per_cluster(&self) -> usize {
        self.host.n_per_cluster
    }

    /// Restriction lookup keyed by pattern vertex.
    pub fn restriction_map(&self) -> BTreeMap<usize, &VertexSet> {
        self.restrictions.iter().map(|r| (r.vertex, &r.allowed)).collect()
    }

    /// Recorded density of the cluster pair an H-edge (x,y) lives on.
    pub fn edge_density(&self, cx: usize, cy: usize) -> Rat {
        self.host
            .pair_density(cx, cy)
            .expect("validated instance has densities on all used cluster edges")
    }

    pub fn validate(&self) -> Result<()> {
        self.host.validate()?;
        self.pattern.validate(&self.host.clusters, self.host.n_per_cluster)?;
        self.params.validate()?;
        if self.pattern.order() != self.n() {
            return Err(Error::Invariant(format!(
                "pattern order {} differs from host order {} (spanning embedding)",
                self.pattern.order(),
                self.n()
            )));
        }
        if self.pattern.max_degree > self.params.max_degree {
            return Err(Error::Invariant(format!(
                "pattern degree bound {} exceeds cascade bound {}",
                self.pattern.max_degree, self.params.max_degree
            )));
        }
        for (cx, cy) in self.pattern.graph.edge_list().iter().map(|&(x, y)| {
            (self.pattern.assignment[x], self.pattern.assignment[y])
        }) {
            if self.host.pair_density(cx, cy).is_none() {
                return Err(Error::Invariant(format!(
                    "cluster edge ({cx},{cy}) used by the pattern has no recorded density"
                )));
            }
        }
        let n = self.n_per_cluster();
        let mut per_cluster = vec![0usize; self.r()];
        let mut seen = std::collections::BTreeSet::new();
        for rst in &self.restrictions {
            if rst.vertex >= self.pattern.order() {
                return Err(Error::Invariant(format!(
                    "restriction on unknown pattern vertex {}",
                    rst.vertex
                )));
            }
            if !seen.insert(rst.vertex) {
                return Err(Error::Invariant(format!(
                    "duplicate restriction on pattern vertex {}",
                    rst.vertex
                )));
            }
            let cluster = self.pattern.cluster_of(rst.vertex);
            per_cluster[cluster] += 1;
            let cluster_set = self.host.cluster_set(cluster);
            if !rst.allowed.is_subset_of(&cluster_set) {
                return Err(Error::Invariant(format!(
                    "restriction set of vertex {} leaves its cluster {cluster}",
                    rst.vertex
                )));
            }
            if !count_ge_mul(rst.allowed.count(), &self.params.c, n) {
                return Err(Error::Invariant(format!(
                    "restriction set of vertex {} has {} elements, below c*N",
                    rst.vertex,
                    rst.allowed.count()
                )));
            }
        }
        for (i, &cnt) in per_cluster.iter().enumerate() {
            if !count_le_mul(cnt, &self.params.alpha, n) {
                return Err(Error::Invariant(format!(
                    "cluster {i} carries {cnt} restrictions, above alpha*N"
                )));
            }
        }
        Ok(())
    }
}

/// Builds a host by generating one super-regular pair per cluster edge,
/// records empirical densities, and validates every instance invariant
/// before returning. No silent repair: a failed invariant is an error naming
/// it.
pub fn assemble_instance(
    clusters: &ClusterGraph,
    n_per_cluster: usize,
    delta: Rat,
    pattern: PatternGraph,
    params: ParameterCascade,
    restrictions: Vec<Restriction>,
    seed: u64,
) -> Result<Instance> {
    pattern.validate(clusters, n_per_cluster)?;
    let mut lineage = SeedLineage::new(seed);
    let mut cg = clusters.clone();
    let mut graph = Graph::new(Universe::host(clusters.r * n_per_cluster));
    for (idx, (i, j)) in clusters.edges().enumerate() {
        let pair_seed = lineage.record("host", idx as u64);
        let pair = generate_super_regular_pair(n_per_cluster, delta, params.eps, pair_seed)?;
        for a in 0..n_per_cluster {
            for b in 0..n_per_cluster {
                if pair.has_edge(a, b) {
                    graph.add_edge(i * n_per_cluster + a, j * n_per_cluster + b);
                }
            }
        }
        cg.set_density(i, j, pair.density()?);
    }
    let host = HostGraph { clusters: cg, n_per_cluster, graph };
    let inst = Instance { host, pattern, restrictions, params, seeds: lineage };
    inst.validate()?;
    Ok(inst)
}

/// Seeded random restrictions: `count_per_cluster` pattern vertices per
/// cluster, each confined to a uniform subset of its cluster of the given
/// size.
pub fn gen_random_restrictions(
    pattern: &PatternGraph,
    host: &HostGraph,
    count_per_cluster: usize,
    set_size: usize,
    seed: u64,
) -> Vec<Restriction> {
    let mut out = Vec::new();
    for cluster in 0..pattern.r {
        let mut rng = crate::seeds::rng(seed, "restrict", cluster as u64);
        let mut members = pattern.class(cluster);
        members.shuffle(&mut rng);
        for &vertex in members.iter().take(count_per_cluster) {
            let mut hosts: Vec<usize> = host.cluster_range(cluster).collect();
            hosts.shuffle(&mut rng);
            hosts.truncate(set_size);
            out.push(Restriction {
                vertex,
                allowed: VertexSet::from_indices(host.graph.universe(), hosts),
            });
        }
    }
    out.sort_by_key(|r| r.vertex);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rat;

    fn k2() -> ClusterGraph {
        let mut g = ClusterGraph::new(2);
        g.add_edge(0, 1);
        g
    }

    #[test]
    fn matching_pattern_shape() {
        let p = gen_matching_pattern(1);
        assert_eq!(p.graph.edge_count(), 1);
        for n in [1usize, 4, 9] {
            let p = gen_matching_pattern(n);
            assert_eq!(p.graph.edge_count(), n);
            assert_eq!(p.max_degree, 1);
            p.validate(&k2(), n).unwrap();
        }
    }

    #[test]
    fn ham_path_shape() {
        let p = gen_hamiltonian_path_pattern(1);
        assert_eq!(p.graph.edge_count(), 1);
        assert_eq!(p.assignment, vec![0, 1]);

        let p = gen_hamiltonian_path_pattern(3);
        assert_eq!(p.order(), 6);
        assert_eq!(p.graph.edge_count(), 5);
        assert_eq!(p.class_sizes(), vec![3, 3]);
        p.validate(&k2(), 3).unwrap();
    }

    #[test]
    fn square_cycle_shape() {
        let p = gen_square_ham_cycle_pattern(2).unwrap();
        assert_eq!(p.order(), 6);
        assert_eq!(p.graph.edge_count(), 12);
        assert_eq!(p.graph.max_degree(), 4);
        p.validate(&ClusterGraph::complete(3), 2).unwrap();

        let p = gen_square_ham_cycle_pattern(50).unwrap();
        assert_eq!(p.class_sizes(), vec![50, 50, 50]);
        p.validate(&ClusterGraph::complete(3), 50).unwrap();

        assert!(matches!(gen_square_ham_cycle_pattern(1), Err(Error::Degenerate(_))));
    }

    #[test]
    fn cycle_power_crosses_clusters() {
        let p = gen_power_ham_cycle_pattern(10, 3).unwrap();
        assert_eq!(p.r, 4);
        assert_eq!(p.max_degree, 6);
        p.validate(&ClusterGraph::complete(4), 10).unwrap();
        for (x, y) in p.graph.edge_list() {
            assert_ne!(p.assignment[x], p.assignment[y]);
        }
    }

    #[test]
    fn tree_pattern_is_a_balanced_tree() {
        let p = gen_bounded_tree_pattern(1, 3, 0).unwrap();
        assert_eq!(p.graph.edge_count(), 1);

        let p = gen_bounded_tree_pattern(20, 3, 11).unwrap();
        assert_eq!(p.order(), 40);
        assert_eq!(p.graph.edge_count(), 39);
        assert!(p.graph.max_degree() <= 3);
        assert_eq!(p.class_sizes(), vec![20, 20]);
        // connectivity: BFS reaches everything
        assert_eq!(p.graph.ball(0, 40).count(), 40);
        p.validate(&k2(), 20).unwrap();

        let q = gen_bounded_tree_pattern(20, 3, 11).unwrap();
        assert_eq!(p, q, "same seed must reproduce the same tree");

        assert!(gen_bounded_tree_pattern(5, 2, 0).is_err());
    }

    #[test]
    fn assemble_complete_blowup_cases() {
        let params = ParameterCascade::defaults_for(rat(1, 1), 2, 2).unwrap();
        let inst = assemble_instance(&k2(), 4, rat(1, 1), gen_matching_pattern(4), params, vec![], 5).unwrap();
        assert_eq!(inst.host.graph.edge_count(), 16);
        inst.validate().unwrap();

        let params = ParameterCascade::defaults_for(rat(1, 1), 4, 3).unwrap();
        let inst = assemble_instance(
            &ClusterGraph::complete(3),
            3,
            rat(1, 1),
            gen_square_ham_cycle_pattern(3).unwrap(),
            params,
            vec![],
            5,
        )
        .unwrap();
        assert_eq!(inst.host.graph.edge_count(), 27);
    }

    #[test]
    fn assemble_seeded_random_instance_validates() {
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
        inst.validate().unwrap();
        let d = inst.host.pair_density(0, 1).unwrap();
        assert!(d >= rat(45, 100) && d <= rat(55, 100));
    }

    #[test]
    fn assemble_rejects_broken_assignment() {
        let params = ParameterCascade::defaults_for(rat(1, 1), 2, 2).unwrap();
        let mut pattern = gen_matching_pattern(3);
        pattern.assignment[0] = 1; // class sizes now 2 and 4
        let err = assemble_instance(&k2(), 3, rat(1, 1), pattern, params, vec![], 5).unwrap_err();
        assert!(matches!(err, Error::Invariant(_)));
        assert!(err.to_string().contains("class sizes"));
    }

    #[test]
    fn restriction_invariants_enforced() {
        let params = ParameterCascade::defaults_for(rat(1, 2), 2, 2).unwrap();
        let pattern = gen_hamiltonian_path_pattern(40);
        let inst = assemble_instance(&k2(), 40, rat(1, 2), pattern.clone(), params.clone(), vec![], 9).unwrap();

        let good = gen_random_restrictions(&pattern, &inst.host, 1, 12, 3);
        let with = Instance { restrictions: good, ..inst.clone() };
        with.validate().unwrap();

        // too small an allowed set: c = 1/4 of 40 is 10
        let bad = vec![Restriction {
            vertex: 0,
            allowed: VertexSet::from_indices(inst.host.graph.universe(), 0..5),
        }];
        let with = Instance { restrictions: bad, ..inst.clone() };
        assert!(with.validate().is_err());

        // leaves its cluster
        let bad = vec![Restriction {
            vertex: 0,
            allowed: VertexSet::from_indices(inst.host.graph.universe(), 30..50),
        }];
        let with = Instance { restrictions: bad, ..inst };
        assert!(with.validate().is_err());
    }
}
