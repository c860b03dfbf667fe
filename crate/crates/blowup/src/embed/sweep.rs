//! The two reordering sweeps of the greedy phase: pattern vertices whose host
//! pool has collapsed are brought forward, and host vertices covered by too
//! few buffer candidate sets get reserved pattern vertices embedded onto them.

use crate::embed::state::EmbeddingState;
use crate::error::Result;
use crate::instance::Instance;
use crate::rat::{count_lt_mul, Rat};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepRecord {
    pub t: usize,
    pub threshold: usize,
    pub exceptional: Vec<usize>,
    pub per_cluster: Vec<usize>,
    /// Set when some cluster exceeded the expected (d3)^2*N exceptional count.
    pub warned: bool,
}

/// Brings forward every unembedded vertex whose host set has at most
/// `sweep_threshold` elements, buffers included. Stable among moved and
/// unmoved vertices.
pub fn sweep_exceptional_pattern(state: &mut EmbeddingState, inst: &Instance) -> SweepRecord {
    let mut exceptional = BTreeSet::new();
    let mut per_cluster = vec![0usize; inst.r()];
    for cluster in 0..inst.r() {
        for &y in &state.unembedded_by_cluster[cluster] {
            if !state.deferred[y] && state.host_set(y).count() <= state.sweep_threshold {
                exceptional.insert(y);
                per_cluster[cluster] += 1;
            }
        }
    }
    let d3sq = inst.params.d3 * inst.params.d3;
    let warned = per_cluster
        .iter()
        .any(|&c| !count_lt_mul(c, &d3sq, inst.n_per_cluster()) && c > 0);
    state.bring_forward(&exceptional);
    SweepRecord {
        t: state.t,
        threshold: state.sweep_threshold,
        exceptional: exceptional.into_iter().collect(),
        per_cluster,
        warned,
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HostSweepRecord {
    pub t: usize,
    /// Exceptional host vertices per cluster (covered by too few buffers).
    pub pools: Vec<Vec<usize>>,
    /// (pattern vertex, exceptional host) placements made by the sweep, in
    /// embedding order.
    pub assigned: Vec<(usize, usize)>,
    /// Exceptional host vertices no untouched vertex could take; left to the
    /// regular flow and counted as warnings.
    pub uncovered: Vec<Vec<usize>>,
    /// Set when some |E_i| reached the eps2*N audit bound.
    pub warned: bool,
}

/// Finds, per cluster, the unoccupied host vertices lying in fewer than
/// d2*|B_i| buffer candidate sets, and embeds one pattern vertex onto each,
/// least-covered hosts first. A taker must not be a buffer, must still hold
/// the host in its pool, and must pass the selection windows against it;
/// takers with no embedded neighbor are preferred. Each taker is embedded on
/// the spot, so later takers are matched against the live state. Hosts no
/// taker fits are left to the regular flow and reported.
pub fn sweep_exceptional_host(state: &mut EmbeddingState, inst: &Instance) -> Result<HostSweepRecord> {
    state.host_sweep_done = true;
    let r = inst.r();
    let big_n = inst.n_per_cluster();
    let mut pools: Vec<Vec<usize>> = Vec::with_capacity(r);
    for cluster in 0..r {
        let live_buffers: Vec<usize> = state.buffers[cluster]
            .iter()
            .copied()
            .filter(|&b| !state.is_embedded(b))
            .collect();
        let mut pool: Vec<(usize, usize)> = Vec::new();
        if !live_buffers.is_empty() {
            for v in inst.host.cluster_range(cluster) {
                if state.occupied.contains(v) {
                    continue;
                }
                let coverage = live_buffers
                    .iter()
                    .filter(|&&b| state.candidate_set(b).contains(v))
                    .count();
                if count_lt_mul(coverage, &inst.params.d2, live_buffers.len()) {
                    pool.push((coverage, v));
                }
            }
        }
        pool.sort_unstable();
        pools.push(pool.into_iter().map(|(_, v)| v).collect());
    }
    let warned = pools
        .iter()
        .any(|p| !count_lt_mul(p.len(), &inst.params.eps2, big_n) && !p.is_empty());

    let mut assigned: Vec<(usize, usize)> = Vec::new();
    let mut uncovered: Vec<Vec<usize>> = vec![Vec::new(); r];
    for cluster in 0..r {
        for k in 0..pools[cluster].len() {
            let v = pools[cluster][k];
            let mut candidates: Vec<usize> = state.unembedded_by_cluster[cluster]
                .iter()
                .copied()
                .filter(|&x| !state.is_buffer[x] && !state.deferred[x] && state.host_set(x).contains(v))
                .collect();
            candidates.sort_by_key(|&x| (state.nu[x], x));
            let taker = candidates
                .into_iter()
                .find(|&x| crate::embed::select::windows_hold(state, inst, x, v, state.t + 1).is_ok());
            match taker {
                Some(x) => {
                    state.embed(inst, x, v);
                    assigned.push((x, v));
                }
                None => uncovered[cluster].push(v),
            }
        }
    }
    Ok(HostSweepRecord { t: state.t, pools, assigned, uncovered, warned })
}

/// Audit bound for a pattern sweep: per-cluster exceptional counts should
/// stay below (d3)^2 * N.
pub fn pattern_sweep_bound(inst: &Instance) -> Rat {
    inst.params.d3 * inst.params.d3 * Rat::from_integer(inst.n_per_cluster() as i128)
}
