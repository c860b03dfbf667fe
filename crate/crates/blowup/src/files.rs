//! On-disk formats: the versioned instance file (JSON with hex-encoded
//! adjacency rows), embedding arrays, run reports, and state dumps for
//! failure forensics. Everything round-trips bit-exactly and instances are
//! re-validated on load.

use crate::error::{Error, Result};
use crate::graph::{Graph, Universe, VertexSet};
use crate::instance::{Instance, PatternGraph, Restriction, SeedLineage};
use crate::params::ParameterCascade;
use crate::regularity::{ClusterGraph, HostGraph};
use serde::{Deserialize, Serialize};
use std::path::Path;

pub const FORMAT_VERSION: u32 = 1;

/// Lowercase hex of a little-endian bit string: bit j lives in byte j/8 at
/// position j%8.
pub fn bits_to_hex(bits: &[bool]) -> String {
    let mut bytes = vec![0u8; bits.len().div_ceil(8)];
    for (j, &b) in bits.iter().enumerate() {
        if b {
            bytes[j / 8] |= 1 << (j % 8);
        }
    }
    let mut s = String::with_capacity(bytes.len() * 2);
    for b in bytes {
        s.push_str(&format!("{b:02x}"));
    }
    s
}

pub fn hex_to_bits(s: &str, len: usize) -> Result<Vec<bool>> {
    if s.len() != len.div_ceil(8) * 2 {
        return Err(Error::Format(format!(
            "hex row has {} characters, expected {}",
            s.len(),
            len.div_ceil(8) * 2
        )));
    }
    let mut bytes = Vec::with_capacity(s.len() / 2);
    for k in (0..s.len()).step_by(2) {
        let byte = u8::from_str_radix(&s[k..k + 2], 16)
            .map_err(|_| Error::Format(format!("bad hex in row: {s:?}")))?;
        bytes.push(byte);
    }
    let mut bits = vec![false; len];
    for (j, bit) in bits.iter_mut().enumerate() {
        *bit = bytes[j / 8] >> (j % 8) & 1 == 1;
    }
    for j in len..bytes.len() * 8 {
        if bytes[j / 8] >> (j % 8) & 1 == 1 {
            return Err(Error::Format("hex row has bits beyond the row length".into()));
        }
    }
    Ok(bits)
}

fn set_to_hex(set: &VertexSet) -> String {
    let n = set.universe().size;
    let bits: Vec<bool> = (0..n).map(|v| set.contains(v)).collect();
    bits_to_hex(&bits)
}

fn hex_to_set(universe: Universe, s: &str) -> Result<VertexSet> {
    let bits = hex_to_bits(s, universe.size)?;
    Ok(VertexSet::from_indices(
        universe,
        bits.iter().enumerate().filter(|(_, &b)| b).map(|(v, _)| v),
    ))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClusterEdgeFile {
    pub a: usize,
    pub b: usize,
    pub density: String,
    /// N hex rows; row i bit j = edge between local i of cluster a and
    /// local j of cluster b.
    pub rows: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatternFile {
    pub r: usize,
    pub max_degree: usize,
    pub assignment: Vec<usize>,
    pub edges: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RestrictionFile {
    pub vertex: usize,
    /// Sorted local indices within the vertex's cluster.
    pub allowed_local: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceFile {
    pub format_version: u32,
    pub r: usize,
    pub n_per_cluster: usize,
    pub cluster_edges: Vec<ClusterEdgeFile>,
    pub pattern: PatternFile,
    pub restrictions: Vec<RestrictionFile>,
    pub params: ParameterCascade,
    pub seeds: SeedLineage,
}

impl InstanceFile {
    pub fn from_instance(inst: &Instance) -> Self {
        let n = inst.n_per_cluster();
        let mut cluster_edges = Vec::new();
        for (a, b) in inst.host.clusters.edges() {
            let mut rows = Vec::with_capacity(n);
            for i in 0..n {
                let gi = inst.host.global(a, i);
                let bits: Vec<bool> = (0..n)
                    .map(|j| inst.host.graph.has_edge(gi, inst.host.global(b, j)))
                    .collect();
                rows.push(bits_to_hex(&bits));
            }
            cluster_edges.push(ClusterEdgeFile {
                a,
                b,
                density: crate::rat::format_rat(
                    &inst.host.pair_density(a, b).expect("edge density recorded"),
                ),
                rows,
            });
        }
        let restrictions: Vec<RestrictionFile> = inst
            .restrictions
            .iter()
            .map(|r| {
                let cluster = inst.pattern.cluster_of(r.vertex);
                let base = cluster * n;
                RestrictionFile {
                    vertex: r.vertex,
                    allowed_local: r.allowed.iter().map(|v| v - base).collect(),
                }
            })
            .collect();
        InstanceFile {
            format_version: FORMAT_VERSION,
            r: inst.r(),
            n_per_cluster: n,
            cluster_edges,
            pattern: PatternFile {
                r: inst.pattern.r,
                max_degree: inst.pattern.max_degree,
                assignment: inst.pattern.assignment.clone(),
                edges: inst.pattern.graph.edge_list(),
            },
            restrictions,
            params: inst.params.clone(),
            seeds: inst.seeds.clone(),
        }
    }

    /// Reconstructs and re-validates the instance.
    pub fn to_instance(&self) -> Result<Instance> {
        if self.format_version != FORMAT_VERSION {
            return Err(Error::Format(format!(
                "unsupported format version {} (expected {FORMAT_VERSION})",
                self.format_version
            )));
        }
        let n = self.n_per_cluster;
        let mut clusters = ClusterGraph::new(self.r);
        let mut graph = Graph::new(Universe::host(self.r * n));
        for ce in &self.cluster_edges {
            if ce.a >= self.r || ce.b >= self.r || ce.a == ce.b {
                return Err(Error::Format(format!("bad cluster edge ({}, {})", ce.a, ce.b)));
            }
            clusters.add_edge(ce.a, ce.b);
            clusters.set_density(ce.a, ce.b, crate::rat::parse_rat(&ce.density)?);
            if ce.rows.len() != n {
                return Err(Error::Format(format!(
                    "cluster edge ({}, {}) has {} rows, expected {n}",
                    ce.a,
                    ce.b,
                    ce.rows.len()
                )));
            }
            for (i, row) in ce.rows.iter().enumerate() {
                let bits = hex_to_bits(row, n)?;
                for (j, &bit) in bits.iter().enumerate() {
                    if bit {
                        graph.add_edge(ce.a * n + i, ce.b * n + j);
                    }
                }
            }
        }
        let host = HostGraph { clusters, n_per_cluster: n, graph };

        let order = self.pattern.assignment.len();
        let mut pg = Graph::new(Universe::pattern(order));
        for &(x, y) in &self.pattern.edges {
            if x >= order || y >= order || x == y {
                return Err(Error::Format(format!("bad pattern edge ({x},{y})")));
            }
            pg.add_edge(x, y);
        }
        let pattern = PatternGraph {
            graph: pg,
            max_degree: self.pattern.max_degree,
            assignment: self.pattern.assignment.clone(),
            r: self.pattern.r,
        };

        let mut restrictions = Vec::new();
        for rf in &self.restrictions {
            if rf.vertex >= order {
                return Err(Error::Format(format!("restriction on unknown vertex {}", rf.vertex)));
            }
            let cluster = pattern.cluster_of(rf.vertex);
            let base = cluster * n;
            for &l in &rf.allowed_local {
                if l >= n {
                    return Err(Error::Format(format!(
                        "restriction of vertex {} lists local index {l} >= N",
                        rf.vertex
                    )));
                }
            }
            restrictions.push(Restriction {
                vertex: rf.vertex,
                allowed: VertexSet::from_indices(
                    host.graph.universe(),
                    rf.allowed_local.iter().map(|&l| base + l),
                ),
            });
        }

        // recorded densities must recount
        for ce in &self.cluster_edges {
            let recorded = crate::rat::parse_rat(&ce.density)?;
            let pair = crate::regularity::extract_pair(&host, ce.a, ce.b);
            let actual = pair.density()?;
            if recorded != actual {
                return Err(Error::Format(format!(
                    "cluster edge ({}, {}): recorded density {} but rows recount to {}",
                    ce.a,
                    ce.b,
                    ce.density,
                    crate::rat::format_rat(&actual)
                )));
            }
        }

        let inst = Instance {
            host,
            pattern,
            restrictions,
            params: self.params.clone(),
            seeds: self.seeds.clone(),
        };
        inst.validate()?;
        Ok(inst)
    }
}

pub fn save_instance(inst: &Instance, path: &Path) -> Result<()> {
    let file = InstanceFile::from_instance(inst);
    let json = serde_json::to_string_pretty(&file)?;
    std::fs::write(path, json)?;
    Ok(())
}

pub fn load_instance(path: &Path) -> Result<Instance> {
    let text = std::fs::read_to_string(path)?;
    let file: InstanceFile = serde_json::from_str(&text)?;
    file.to_instance()
}

pub fn save_embedding(phi: &[usize], path: &Path) -> Result<()> {
    std::fs::write(path, serde_json::to_string(phi)?)?;
    Ok(())
}

pub fn load_embedding(path: &Path) -> Result<Vec<usize>> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

/// Self-contained snapshot of an embedding state, for audits and failure
/// forensics. Sets serialize as hex bit rows over the host universe.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StateDump {
    pub format_version: u32,
    pub t: usize,
    pub host_order: usize,
    pub order: Vec<usize>,
    pub phi: Vec<Option<usize>>,
    /// Hex candidate/host rows per unembedded vertex (empty string for
    /// embedded vertices).
    pub candidate_rows: Vec<String>,
    pub host_rows: Vec<String>,
    pub occupied: String,
    pub buffers: Vec<Vec<usize>>,
    pub params: ParameterCascade,
}

impl StateDump {
    pub fn from_state(state: &crate::embed::EmbeddingState, inst: &Instance) -> Self {
        let n = inst.pattern.order();
        let mut candidate_rows = Vec::with_capacity(n);
        let mut host_rows = Vec::with_capacity(n);
        for x in 0..n {
            if state.is_embedded(x) {
                candidate_rows.push(String::new());
                host_rows.push(String::new());
            } else {
                candidate_rows.push(set_to_hex(state.candidate_set(x)));
                host_rows.push(set_to_hex(state.host_set(x)));
            }
        }
        StateDump {
            format_version: FORMAT_VERSION,
            t: state.t,
            host_order: inst.n(),
            order: state.order.clone(),
            phi: state.phi.clone(),
            candidate_rows,
            host_rows,
            occupied: set_to_hex(&state.occupied),
            buffers: state.buffers.clone(),
            params: inst.params.clone(),
        }
    }

    /// Decodes the candidate/host sets back out of the dump.
    pub fn sets(&self) -> Result<(Vec<Option<VertexSet>>, Vec<Option<VertexSet>>, VertexSet)> {
        let u = Universe::host(self.host_order);
        let mut cand = Vec::new();
        let mut host = Vec::new();
        for (c, h) in self.candidate_rows.iter().zip(&self.host_rows) {
            if c.is_empty() {
                cand.push(None);
                host.push(None);
            } else {
                cand.push(Some(hex_to_set(u, c)?));
                host.push(Some(hex_to_set(u, h)?));
            }
        }
        Ok((cand, host, hex_to_set(u, &self.occupied)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{assemble_instance, gen_hamiltonian_path_pattern};
    use crate::rat::rat;

    fn sample_instance() -> Instance {
        let mut k2 = ClusterGraph::new(2);
        k2.add_edge(0, 1);
        let params = ParameterCascade::defaults_for(rat(1, 2), 2, 2).unwrap();
        assemble_instance(&k2, 24, rat(1, 2), gen_hamiltonian_path_pattern(24), params, vec![], 11)
            .unwrap()
    }

    #[test]
    fn hex_round_trip() {
        let bits: Vec<bool> = (0..37).map(|i| i % 3 == 0).collect();
        let hex = bits_to_hex(&bits);
        assert_eq!(hex_to_bits(&hex, 37).unwrap(), bits);
        assert!(hex_to_bits("ff", 37).is_err());
        // stray bits beyond the length are rejected
        assert!(hex_to_bits(&"ff".repeat(5), 37).is_err());
    }

    #[test]
    fn instance_file_round_trips_bit_exactly() {
        let inst = sample_instance();
        let f1 = InstanceFile::from_instance(&inst);
        let json1 = serde_json::to_string_pretty(&f1).unwrap();
        let parsed: InstanceFile = serde_json::from_str(&json1).unwrap();
        let inst2 = parsed.to_instance().unwrap();
        let f2 = InstanceFile::from_instance(&inst2);
        let json2 = serde_json::to_string_pretty(&f2).unwrap();
        assert_eq!(json1, json2);
    }

    #[test]
    fn tampered_density_is_rejected_on_load() {
        let inst = sample_instance();
        let mut f = InstanceFile::from_instance(&inst);
        f.cluster_edges[0].density = "1/3".to_string();
        assert!(matches!(f.to_instance(), Err(Error::Format(_))));
    }

    #[test]
    fn corrupted_assignment_is_rejected_on_load() {
        let inst = sample_instance();
        let mut f = InstanceFile::from_instance(&inst);
        f.pattern.assignment[0] = 1;
        let err = f.to_instance().unwrap_err();
        assert!(err.to_string().contains("class sizes"), "{err}");
    }

    #[test]
    fn state_dump_round_trips() {
        let mut k2 = ClusterGraph::new(2);
        k2.add_edge(0, 1);
        let params = ParameterCascade::defaults_for(rat(1, 1), 2, 2).unwrap();
        let inst =
            assemble_instance(&k2, 24, rat(1, 1), gen_hamiltonian_path_pattern(24), params, vec![], 11)
                .unwrap();
        let (st, _) = crate::embed::run_phase1(&inst).unwrap();
        let dump = StateDump::from_state(&st, &inst);
        let json = serde_json::to_string(&dump).unwrap();
        let back: StateDump = serde_json::from_str(&json).unwrap();
        assert_eq!(dump, back);
        let (cand, _, occ) = back.sets().unwrap();
        for x in 0..inst.pattern.order() {
            match &cand[x] {
                Some(s) => assert_eq!(s, st.candidate_set(x)),
                None => assert!(st.is_embedded(x)),
            }
        }
        assert_eq!(occ, st.occupied);
    }
}
