//! Read-only audits of a run in progress: host-set floors, the candidacy
//! profile of each cluster, and sampled intersection checks. Audits report,
//! they never abort.

use crate::embed::state::EmbeddingState;
use crate::instance::Instance;
use crate::rat::{ceil_mul, rat_to_f64, Rat};
use rand::Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClusterProfile {
    pub cluster: usize,
    /// Unembedded vertices assigned here.
    pub s_size: usize,
    /// Density of the candidacy bipartite graph between them and the cluster.
    pub candidacy_density: f64,
    pub min_candidacy_degree: usize,
    /// Host vertices below (1 - eps2) * density * |S| candidacy degree.
    pub exceptional_relative: usize,
    /// Host vertices below the absolute floor (delta^Delta / 2) * |S|.
    pub exceptional_absolute: usize,
    /// Audit ceiling eps2 * N for the exceptional counts.
    pub exceptional_allowance: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IntersectionSample {
    pub cluster: usize,
    pub a_size: usize,
    /// Vertices x with |A ∩ C(x)| < (|A| / 2N) * |C(x)|.
    pub violators: usize,
    pub checked: usize,
    /// Audit ceiling (d3)^2 * N on the violator count.
    pub allowance: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AuditRecord {
    pub t: usize,
    /// Smallest host set over unembedded vertices, with its vertex.
    pub min_host_set: usize,
    pub min_host_set_vertex: Option<usize>,
    /// Expected floor d2 * N on host sets.
    pub host_set_floor: f64,
    pub host_floor_holds: bool,
    pub profiles: Vec<ClusterProfile>,
    pub samples: Vec<IntersectionSample>,
    pub warnings: Vec<String>,
}

/// Computes the audit quantities without mutating the state.
pub fn audit_state(state: &EmbeddingState, inst: &Instance, seed: u64) -> AuditRecord {
    let big_n = inst.n_per_cluster();
    let mut warnings = Vec::new();

    let mut min_host_set = usize::MAX;
    let mut min_vertex = None;
    for cluster in &state.unembedded_by_cluster {
        for &y in cluster {
            let s = state.host_set(y).count();
            if s < min_host_set {
                min_host_set = s;
                min_vertex = Some(y);
            }
        }
    }
    if min_host_set == usize::MAX {
        min_host_set = 0;
    }
    let host_set_floor = rat_to_f64(&inst.params.d2) * big_n as f64;
    let host_floor_holds = min_vertex.is_none()
        || (min_host_set as i128) * inst.params.d2.denom()
            > inst.params.d2.numer() * big_n as i128;
    if !host_floor_holds {
        warnings.push(format!(
            "host-set floor: vertex {} holds {} candidates, at or below d2*N = {:.2}",
            min_vertex.unwrap(),
            min_host_set,
            host_set_floor
        ));
    }

    // delta^Delta / 2 as an exact rational
    let mut abs_floor = Rat::from_integer(1);
    for _ in 0..inst.params.max_degree {
        abs_floor *= inst.params.delta;
    }
    abs_floor /= Rat::from_integer(2);

    let mut profiles = Vec::new();
    for cluster in 0..inst.r() {
        let s: Vec<usize> = state.unembedded_by_cluster[cluster].iter().copied().collect();
        if s.is_empty() {
            continue;
        }
        let mut deg = vec![0usize; big_n];
        let mut total = 0usize;
        for &x in &s {
            for v in state.candidate_set(x).iter() {
                deg[v - cluster * big_n] += 1;
                total += 1;
            }
        }
        let density = total as f64 / (s.len() * big_n) as f64;
        // relative floor: (1 - eps2) * d(U) * |S|, exact in rationals
        let d_ut = Rat::new(total as i128, (s.len() * big_n) as i128);
        let rel = (Rat::from_integer(1) - inst.params.eps2) * d_ut * Rat::from_integer(s.len() as i128);
        let abs = abs_floor * Rat::from_integer(s.len() as i128);
        let mut exceptional_relative = 0;
        let mut exceptional_absolute = 0;
        for &dv in &deg {
            if Rat::from_integer(dv as i128) < rel {
                exceptional_relative += 1;
            }
            if Rat::from_integer(dv as i128) < abs {
                exceptional_absolute += 1;
            }
        }
        let allowance = rat_to_f64(&inst.params.eps2) * big_n as f64;
        if exceptional_relative as f64 > allowance {
            warnings.push(format!(
                "cluster {cluster}: {exceptional_relative} host vertices under the relative candidacy floor (allowance {allowance:.2})"
            ));
        }
        profiles.push(ClusterProfile {
            cluster,
            s_size: s.len(),
            candidacy_density: density,
            min_candidacy_degree: deg.iter().copied().min().unwrap_or(0),
            exceptional_relative,
            exceptional_absolute,
            exceptional_allowance: allowance,
        });
    }

    // sampled intersection checks: random A of size >= d3*N per cluster
    let mut samples = Vec::new();
    let mut rng = crate::seeds::rng(seed, "audit", state.t as u64);
    let a_size = ceil_mul(&inst.params.d3, big_n).max(1);
    for cluster in 0..inst.r() {
        let s: Vec<usize> = state.unembedded_by_cluster[cluster].iter().copied().collect();
        if s.is_empty() {
            continue;
        }
        let mut pool: Vec<usize> = inst.host.cluster_range(cluster).collect();
        for k in 0..a_size.min(pool.len()) {
            let j = rng.gen_range(k..pool.len());
            pool.swap(k, j);
        }
        let a = crate::graph::VertexSet::from_indices(
            inst.host.graph.universe(),
            pool[..a_size.min(pool.len())].iter().copied(),
        );
        let a_count = a.count();
        let mut violators = 0;
        for &x in &s {
            let c = state.candidate_set(x);
            let inter = c.intersection_count(&a);
            // |A ∩ C| >= (|A| / 2N) |C|  <=>  2N*inter >= |A|*|C|
            if 2 * big_n * inter < a_count * c.count() {
                violators += 1;
            }
        }
        let d3sq = inst.params.d3 * inst.params.d3;
        let allowance = rat_to_f64(&d3sq) * big_n as f64;
        if violators as f64 > allowance {
            warnings.push(format!(
                "cluster {cluster}: {violators} of {} candidate sets intersect a random {a_count}-set thinly (allowance {allowance:.2})",
                s.len()
            ));
        }
        samples.push(IntersectionSample {
            cluster,
            a_size: a_count,
            violators,
            checked: s.len(),
            allowance,
        });
    }

    AuditRecord {
        t: state.t,
        min_host_set,
        min_host_set_vertex: min_vertex,
        host_set_floor,
        host_floor_holds,
        profiles,
        samples,
        warnings,
    }
}
