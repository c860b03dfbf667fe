//! Round-based batched variant: a maximal independent set on an auxiliary
//! distance graph picks a batch of far-apart vertices, every batch member
//! gets its full set of window-qualifying images, and distinct
//! representatives are chosen per cluster so the whole batch embeds at once.
//! Batch members sit pairwise at distance >= 4, so their neighbor updates
//! touch disjoint vertices and the per-member updates commute.

use crate::embed::state::EmbeddingState;
use crate::embed::{
    audit_state, preprocess, sweep_exceptional_host, sweep_exceptional_pattern, Phase, RunOptions,
    RunReport, SeqEntry,
};
use crate::error::{Error, Result};
use crate::graph::{Graph, VertexSet};
use crate::instance::Instance;
use crate::matching::{max_matching, sdr, CandidacyGraph, SdrOutcome};
use crate::rat::{floor_mul, Rat};
use rand::Rng;
use serde::{Deserialize, Serialize};

/// Auxiliary graph for batch selection: pattern vertices, edges between
/// vertices at distance < 4 in the pattern, plus a clique on everything
/// already embedded.
pub struct MisInstance {
    pub graph: Graph,
}

impl MisInstance {
    pub fn build(pattern: &Graph, embedded: &VertexSet) -> Self {
        let mut g = Graph::new(pattern.universe());
        for v in 0..pattern.order() {
            for u in pattern.ball(v, 3).iter() {
                if u != v {
                    g.add_edge(u, v);
                }
            }
        }
        let members = embedded.to_vec();
        for (i, &u) in members.iter().enumerate() {
            for &v in members.iter().skip(i + 1) {
                g.add_edge(u, v);
            }
        }
        MisInstance { graph: g }
    }
}

#[derive(Debug, Clone)]
pub struct MisResult {
    pub set: VertexSet,
    pub iterations: usize,
}

/// Seeded Luby rounds, executed sequentially: every live vertex marks itself
/// with probability 1/(2 deg); marked neighbors resolve in favor of higher
/// degree (index as tie-break); survivors join the set and leave the graph
/// with their neighborhoods. Returns a maximal independent set.
pub fn luby_mis(g: &Graph, seed: u64) -> MisResult {
    let mut rng = crate::seeds::rng(seed, "luby", 0);
    let mut live = VertexSet::full(g.universe());
    let mut result = VertexSet::empty(g.universe());
    let mut iterations = 0;
    while !live.is_empty() {
        iterations += 1;
        let members: Vec<usize> = live.iter().collect();
        let deg: Vec<usize> = members.iter().map(|&v| g.degree_into(v, &live)).collect();
        let mut marked: Vec<usize> = Vec::new();
        let mut is_marked = VertexSet::empty(g.universe());
        for (i, &v) in members.iter().enumerate() {
            let take = deg[i] == 0 || rng.gen_range(0..2 * deg[i] as u64) == 0;
            if take {
                marked.push(v);
                is_marked.insert(v);
            }
        }
        let deg_of = |v: usize| g.degree_into(v, &live);
        let mut survives = Vec::new();
        for &v in &marked {
            let dv = deg_of(v);
            let mut keep = true;
            for u in g.neighbors(v).iter() {
                if !is_marked.contains(u) || !live.contains(u) {
                    continue;
                }
                let du = deg_of(u);
                // lose against a higher-degree (or equal-degree, higher-index)
                // marked neighbor
                if du > dv || (du == dv && u > v) {
                    keep = false;
                    break;
                }
            }
            if keep {
                survives.push(v);
            }
        }
        for &v in &survives {
            result.insert(v);
            live.remove(v);
            for u in g.neighbors(v).iter() {
                live.remove(u);
            }
        }
        // a fully unlucky round marks nothing; that is fine, the loop retries
    }
    MisResult { set: result, iterations }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RoundRecord {
    pub n_prime: usize,
    pub target: usize,
    pub mis_iterations: usize,
    pub selected: usize,
    pub sdr_retries: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RoundLog {
    pub rounds: Vec<RoundRecord>,
    pub tail_threshold: usize,
    /// Unembedded vertices handed to the sequential tail.
    pub sequential_tail: usize,
}

/// Picks up to floor(alpha * n') unembedded vertices pairwise at distance
/// >= 4, via the MIS on the auxiliary graph. The batch may come back smaller
/// than the target; that is logged, never fatal.
pub fn batch_select(
    state: &EmbeddingState,
    inst: &Instance,
    alpha_batch: Rat,
    seed: u64,
    round: u64,
) -> (Vec<usize>, usize) {
    let n_prime = inst.n() - state.t;
    let target = floor_mul(&alpha_batch, n_prime).max(1);
    let embedded = VertexSet::from_indices(
        inst.pattern.graph.universe(),
        (0..inst.pattern.order()).filter(|&x| state.is_embedded(x)),
    );
    let aux = MisInstance::build(&inst.pattern.graph, &embedded);
    let mis = luby_mis(&aux.graph, crate::seeds::derive(seed, "mis", round));
    let mut picked: Vec<usize> = mis.set.iter().filter(|&x| !state.is_embedded(x)).collect();
    debug_assert!(
        mis.set.iter().filter(|&x| state.is_embedded(x)).count() <= 1,
        "embedded vertices form a clique, so the MIS holds at most one"
    );
    picked.truncate(target);
    (picked, mis.iterations)
}

/// Embeds a whole batch: qualifying image sets against the pre-round state,
/// distinct representatives per cluster, then all updates. On an SDR failure
/// the caller retries with the first half of the batch.
pub fn batch_embed_round(
    state: &mut EmbeddingState,
    inst: &Instance,
    batch: &[usize],
) -> Result<Vec<(usize, usize)>> {
    let assignments = plan_batch(state, inst, batch)?;
    apply_assignments(state, inst, &assignments);
    Ok(assignments)
}

/// Computes the distinct-representative plan for a batch without mutating
/// the state.
pub fn plan_batch(
    state: &EmbeddingState,
    inst: &Instance,
    batch: &[usize],
) -> Result<Vec<(usize, usize)>> {
    let mut by_cluster: Vec<Vec<usize>> = vec![Vec::new(); inst.r()];
    for &x in batch {
        by_cluster[inst.pattern.cluster_of(x)].push(x);
    }
    let mut assignments = Vec::with_capacity(batch.len());
    for (cluster, members) in by_cluster.iter().enumerate() {
        if members.is_empty() {
            continue;
        }
        let mut sets = Vec::with_capacity(members.len());
        for (i, &x) in members.iter().enumerate() {
            let q = qualifying_set(state, inst, x, state.t + i + 1);
            if q.is_empty() {
                return Err(Error::Batch(format!(
                    "no window-qualifying image for batch vertex {x} in cluster {cluster}"
                )));
            }
            sets.push(q);
        }
        match sdr(&sets) {
            SdrOutcome::Representatives(reps) => {
                for (&x, v) in members.iter().zip(reps) {
                    assignments.push((x, v));
                }
            }
            SdrOutcome::NoSystem { witness, .. } => {
                return Err(Error::Batch(format!(
                    "no distinct representatives for {} batch vertices in cluster {cluster} (witness of {})",
                    members.len(),
                    witness.len()
                )));
            }
        }
    }
    assignments.sort_unstable();
    Ok(assignments)
}

/// All images in the host pool of x passing every enforced window.
fn qualifying_set(state: &EmbeddingState, inst: &Instance, x: usize, t: usize) -> VertexSet {
    let mut q = VertexSet::empty(inst.host.graph.universe());
    for v in state.host_set(x).iter() {
        if crate::embed::windows_hold(state, inst, x, v, t).is_ok() {
            q.insert(v);
        }
    }
    q
}

/// Applies planned placements in slice order. For a valid batch the final
/// state is order-independent.
pub fn apply_assignments(state: &mut EmbeddingState, inst: &Instance, assignments: &[(usize, usize)]) {
    for &(x, v) in assignments {
        state.embed(inst, x, v);
    }
}

/// Default tail threshold: ceil((log2 n)^5), capped at n.
pub fn default_tail_threshold(n: usize) -> usize {
    let l = (n.max(2) as f64).log2();
    (l.powi(5).ceil() as usize).min(n)
}

/// Batched run: rounds of MIS-picked batches while more than `tail` vertices
/// remain, then the sequential greedy tail, then representative completion.
/// With `tail >= n` this reduces exactly to the sequential algorithm.
pub fn run_batched(
    inst: &Instance,
    alpha_batch: Rat,
    tail_threshold: Option<usize>,
    seed: u64,
) -> (RoundLog, RunReport, Result<Vec<usize>>) {
    let tail = tail_threshold.unwrap_or_else(|| default_tail_threshold(inst.n()));
    let mut log = RoundLog { rounds: Vec::new(), tail_threshold: tail, sequential_tail: 0 };
    let mut report = RunReport::new(inst);
    let result = run_batched_inner(inst, alpha_batch, tail, seed, &mut log, &mut report);
    match &result {
        Ok(_) => report.outcome = crate::embed::Outcome::Success,
        Err(e) => {
            report.outcome = crate::embed::Outcome::Failure {
                kind: e.to_string(),
                t: report.sequence.len(),
                vertex: None,
            };
        }
    }
    (log, report, result)
}

fn run_batched_inner(
    inst: &Instance,
    alpha_batch: Rat,
    tail: usize,
    seed: u64,
    log: &mut RoundLog,
    report: &mut RunReport,
) -> Result<Vec<usize>> {
    let mut st = preprocess(inst)?;
    report.absorb_state(&st);
    let mut round: u64 = 0;
    if st.t0 == 0 {
        { let rec = sweep_exceptional_host(&mut st, inst)?; crate::embed::record_host_sweep(report, rec); }
    }
    let mut last_sweep_epoch = 0;
    while inst.n() - st.t > tail && !st.phase1_done() {
        let (mut batch, mis_iterations) = batch_select(&st, inst, alpha_batch, seed, round);
        if batch.is_empty() {
            break;
        }
        let n_prime = inst.n() - st.t;
        let target = batch.len();
        let mut retries = 0;
        let assignments = loop {
            match plan_batch(&st, inst, &batch) {
                Ok(a) => break a,
                Err(e) => {
                    if batch.len() <= 1 {
                        if st.deferred_count < st.m {
                            st.defer(batch[0]);
                            report.deferrals.push(crate::embed::DeferralRecord {
                                t: st.t + 1,
                                vertex: batch[0],
                                histogram: Default::default(),
                            });
                            break Vec::new();
                        }
                        return Err(e);
                    }
                    retries += 1;
                    batch.truncate(batch.len().div_ceil(2));
                }
            }
        };
        apply_assignments(&mut st, inst, &assignments);
        for &(x, v) in &assignments {
            report.sequence.push(SeqEntry { x, v, phase: Phase::Greedy });
        }
        log.rounds.push(RoundRecord {
            n_prime,
            target,
            mis_iterations,
            selected: assignments.len(),
            sdr_retries: retries,
        });
        round += 1;

        let epoch = st.t / st.t1;
        if epoch > last_sweep_epoch && !st.phase1_done() {
            last_sweep_epoch = epoch;
            let rec = sweep_exceptional_pattern(&mut st, inst);
            report.sweeps.push(rec);
        }
        if !st.host_sweep_done && st.t >= st.t0 {
            { let rec = sweep_exceptional_host(&mut st, inst)?; crate::embed::record_host_sweep(report, rec); }
        }
    }
    log.sequential_tail = inst.n() - st.t;
    crate::embed::phase1_loop(inst, &mut st, report, RunOptions::default())?;
    report.absorb_state(&st);
    crate::embed::phase2(inst, &mut st, report)?;
    report.audits.push(audit_state(&st, inst, inst.seeds.root));
    crate::embed::finish(inst, &st)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ParallelPhase2Report {
    pub initial_matching: usize,
    pub flipped_paths: usize,
    pub fallback_used: bool,
}

/// Completes a candidacy graph to a perfect matching the round-synchronous
/// way: a seeded greedy maximal matching, then vertex-disjoint alternating
/// paths of length 5 between unmatched pairs, flipped all at once. Falls back
/// to augmenting-path completion when some pair admits no disjoint path.
pub fn parallel_phase2(
    g: &CandidacyGraph,
    seed: u64,
) -> Result<(Vec<(usize, usize)>, ParallelPhase2Report)> {
    let nl = g.left_len();
    let nr = g.right_len();
    let mut order: Vec<usize> = (0..nl).collect();
    let mut rng = crate::seeds::rng(seed, "p2-greedy", 0);
    for k in (1..order.len()).rev() {
        let j = rng.gen_range(0..=k);
        order.swap(k, j);
    }
    let mut match_left = vec![usize::MAX; nl];
    let mut match_right = vec![usize::MAX; nr];
    for &u in &order {
        for &v in g.neighbors(u) {
            if match_right[v] == usize::MAX {
                match_left[u] = v;
                match_right[v] = u;
                break;
            }
        }
    }
    let initial_matching = match_left.iter().filter(|&&v| v != usize::MAX).count();
    let zx: Vec<usize> = (0..nl).filter(|&u| match_left[u] == usize::MAX).collect();
    let zy: Vec<usize> = (0..nr).filter(|&v| match_right[v] == usize::MAX).collect();
    debug_assert_eq!(zx.len() + initial_matching, nl);

    let mut flipped = 0;
    let mut fallback = false;
    if nl == nr {
        let mut used_l = vec![false; nl];
        let mut used_r = vec![false; nr];
        'pairs: for (&x, &v) in zx.iter().zip(&zy) {
            // x - v1 - x1 - v2 - x2 - v with (v1,x1), (v2,x2) matched
            for &v1 in g.neighbors(x) {
                if used_r[v1] || match_right[v1] == usize::MAX {
                    continue;
                }
                let x1 = match_right[v1];
                if used_l[x1] {
                    continue;
                }
                for &v2 in g.neighbors(x1) {
                    if v2 == v1 || used_r[v2] || match_right[v2] == usize::MAX {
                        continue;
                    }
                    let x2 = match_right[v2];
                    if used_l[x2] || !g.neighbors(x2).contains(&v) {
                        continue;
                    }
                    // flip the path
                    match_left[x] = v1;
                    match_right[v1] = x;
                    match_left[x1] = v2;
                    match_right[v2] = x1;
                    match_left[x2] = v;
                    match_right[v] = x2;
                    used_l[x1] = true;
                    used_l[x2] = true;
                    used_r[v1] = true;
                    used_r[v2] = true;
                    flipped += 1;
                    continue 'pairs;
                }
            }
            fallback = true;
            break;
        }
    } else {
        fallback = true;
    }

    if fallback || match_left.iter().any(|&v| v == usize::MAX) {
        let m = max_matching(g);
        if !m.perfect {
            let witness = m.hall_witness.unwrap_or_default();
            return Err(Error::NoSdr {
                cluster: usize::MAX,
                witness_size: witness.len(),
                union_size: witness
                    .iter()
                    .flat_map(|&u| g.neighbors(u).iter().copied())
                    .collect::<std::collections::BTreeSet<_>>()
                    .len(),
                witness,
            });
        }
        let pairs = m.pairs.clone();
        return Ok((
            pairs,
            ParallelPhase2Report { initial_matching, flipped_paths: flipped, fallback_used: true },
        ));
    }

    let pairs: Vec<(usize, usize)> =
        (0..nl).map(|u| (u, match_left[u])).collect();
    debug_assert!(crate::matching::is_valid_matching(g, &pairs));
    Ok((pairs, ParallelPhase2Report { initial_matching, flipped_paths: flipped, fallback_used: false }))
}
