//! The two-phase embedding algorithm.
//!
//! Phase 1 walks the preprocessed order, placing one pattern vertex per step
//! through the selection windows and updating the candidate/host sets of
//! everything unembedded. Two sweeps interleave: every t1 steps, vertices
//! whose host pool collapsed are brought forward; once, right after the
//! buffer neighborhoods are embedded, host vertices covered by too few
//! buffers get reserved pattern vertices. Phase 2 embeds the remaining
//! buffer vertices per cluster through a system of distinct representatives,
//! updating sets between clusters so cross-cluster edges among leftovers stay
//! sound.

pub mod audit;
pub mod replay;
pub mod select;
pub mod state;
pub mod sweep;

pub use audit::{audit_state, AuditRecord};
pub use select::{select_image, windows_hold, FailureHistogram, ScanStats};
pub use state::{preprocess, spread_subset, EmbeddingState};
pub use sweep::{sweep_exceptional_host, sweep_exceptional_pattern, HostSweepRecord, SweepRecord};

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::matching::{hall_audit, max_matching, CandidacyGraph, HallAuditReport};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Phase {
    Greedy,
    Representatives,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SeqEntry {
    pub x: usize,
    pub v: usize,
    pub phase: Phase,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SelectionStats {
    pub steps: usize,
    pub scanned: usize,
    pub qualifying: usize,
    /// Sampling disclosure for the pairwise condition: (sample size,
    /// one-sided 95% Hoeffding margin on the measured proportion).
    pub pairwise_sample_size: usize,
    pub pairwise_sample_margin: f64,
}

impl Default for SelectionStats {
    fn default() -> Self {
        let n = select::PAIRWISE_EXACT_LIMIT as f64;
        SelectionStats {
            steps: 0,
            scanned: 0,
            qualifying: 0,
            pairwise_sample_size: select::PAIRWISE_EXACT_LIMIT,
            pairwise_sample_margin: (f64::ln(20.0) / (2.0 * n)).sqrt(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Phase2ClusterReport {
    pub cluster: usize,
    pub m: usize,
    pub matching_size: usize,
    pub augmenting_phases: usize,
    pub hall: HallAuditReport,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DeferralRecord {
    pub t: usize,
    pub vertex: usize,
    pub histogram: FailureHistogram,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Outcome {
    Success,
    Failure { kind: String, t: usize, vertex: Option<usize> },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunReport {
    pub outcome: Outcome,
    pub n: usize,
    pub r: usize,
    pub n_per_cluster: usize,
    pub t0: usize,
    pub t1: usize,
    pub sweep_threshold: usize,
    pub capital_t: Option<usize>,
    pub buffer_mode: String,
    /// Thresholds clamped up to 1 at this instance size.
    pub clamped: Vec<String>,
    pub buffers: Vec<Vec<usize>>,
    /// Every placement in time order.
    pub sequence: Vec<SeqEntry>,
    pub selection: SelectionStats,
    pub sweeps: Vec<SweepRecord>,
    pub host_sweep: Option<HostSweepRecord>,
    pub deferrals: Vec<DeferralRecord>,
    pub phase2: Vec<Phase2ClusterReport>,
    pub audits: Vec<AuditRecord>,
    pub warnings: Vec<String>,
}

impl RunReport {
    pub(crate) fn new(inst: &Instance) -> Self {
        RunReport {
            outcome: Outcome::Failure { kind: "unstarted".into(), t: 0, vertex: None },
            n: inst.n(),
            r: inst.r(),
            n_per_cluster: inst.n_per_cluster(),
            t0: 0,
            t1: 0,
            sweep_threshold: 0,
            capital_t: None,
            buffer_mode: String::new(),
            clamped: Vec::new(),
            buffers: Vec::new(),
            sequence: Vec::new(),
            selection: SelectionStats::default(),
            sweeps: Vec::new(),
            host_sweep: None,
            deferrals: Vec::new(),
            phase2: Vec::new(),
            audits: Vec::new(),
            warnings: Vec::new(),
        }
    }

    pub(crate) fn absorb_state(&mut self, st: &EmbeddingState) {
        self.t0 = st.t0;
        self.t1 = st.t1;
        self.sweep_threshold = st.sweep_threshold;
        self.capital_t = st.capital_t;
        self.buffer_mode = st.buffer_mode.clone();
        self.clamped = st.clamped.clone();
        self.buffers = st.buffers.clone();
    }

    pub fn warning_count(&self) -> usize {
        self.warnings.len()
            + self.sweeps.iter().filter(|s| s.warned).count()
            + self.host_sweep.as_ref().map_or(0, |s| {
                s.warned as usize + s.uncovered.iter().map(|u| u.len()).sum::<usize>()
            })
            + self.audits.iter().map(|a| a.warnings.len()).sum::<usize>()
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    /// Record audit snapshots at every sweep time and at the phase switch.
    pub audit: bool,
}

/// Runs the greedy phase to completion (only never-pulled buffers left) on a
/// fresh state. Exposed for inspection and tests; `run` drives the same loop.
pub fn run_phase1(inst: &Instance) -> Result<(EmbeddingState, RunReport)> {
    let mut report = RunReport::new(inst);
    let mut st = preprocess(inst)?;
    report.absorb_state(&st);
    phase1_loop(inst, &mut st, &mut report, RunOptions::default())?;
    report.absorb_state(&st);
    Ok((st, report))
}

pub(crate) fn phase1_loop(
    inst: &Instance,
    st: &mut EmbeddingState,
    report: &mut RunReport,
    opts: RunOptions,
) -> Result<()> {
    if st.t0 <= st.t && !st.host_sweep_done {
        let rec = sweep_exceptional_host(st, inst)?;
        record_host_sweep(report, rec);
    }
    while !st.phase1_done() {
        let x = st.order[st.t];
        let t = st.t + 1;
        let pool = st.host_set(x).clone();
        let (v, stats) = match select_image(st, inst, x, &pool, t) {
            Ok(hit) => hit,
            Err(Error::SelectionExhausted { t, vertex, histogram })
                if st.deferred_count < st.m =>
            {
                // The greedy phase is starved here; hand the vertex to the
                // representative completion instead of aborting. Capped at
                // the buffer count so a runaway still surfaces.
                st.defer(x);
                report.deferrals.push(DeferralRecord { t, vertex, histogram });
                continue;
            }
            Err(e) => return Err(e),
        };
        st.embed(inst, x, v);
        report.sequence.push(SeqEntry { x, v, phase: Phase::Greedy });
        report.selection.steps += 1;
        report.selection.scanned += stats.scanned;
        report.selection.qualifying += stats.qualifying;

        if st.t % st.t1 == 0 && !st.phase1_done() {
            let rec = sweep_exceptional_pattern(st, inst);
            if opts.audit {
                report.audits.push(audit_state(st, inst, inst.seeds.root));
            }
            report.sweeps.push(rec);
        }
        if st.t == st.t0 && !st.host_sweep_done {
            let rec = sweep_exceptional_host(st, inst)?;
            record_host_sweep(report, rec);
        }
    }
    st.capital_t = Some(st.t);
    if opts.audit {
        report.audits.push(audit_state(st, inst, inst.seeds.root));
    }
    Ok(())
}

/// The host-side sweep embeds its takers itself; fold those placements into
/// the sequence.
pub(crate) fn record_host_sweep(report: &mut RunReport, rec: HostSweepRecord) {
    for &(x, v) in &rec.assigned {
        report.sequence.push(SeqEntry { x, v, phase: Phase::Greedy });
    }
    report.host_sweep = Some(rec);
}

/// Phase 2: per cluster, a system of distinct representatives of the host
/// sets of the remaining vertices. Clusters are processed in order and sets
/// are updated in between, so edges between leftover vertices of different
/// clusters are preserved too.
pub(crate) fn phase2(inst: &Instance, st: &mut EmbeddingState, report: &mut RunReport) -> Result<()> {
    st.completing = true;
    for cluster in 0..inst.r() {
        let lefts: Vec<usize> = st.unembedded_by_cluster[cluster].iter().copied().collect();
        if lefts.is_empty() {
            continue;
        }
        let unoccupied: Vec<usize> = inst
            .host
            .cluster_range(cluster)
            .filter(|&v| !st.occupied.contains(v))
            .collect();
        if lefts.len() != unoccupied.len() {
            return Err(Error::Invariant(format!(
                "cluster {cluster}: {} unembedded vertices vs {} unoccupied hosts",
                lefts.len(),
                unoccupied.len()
            )));
        }
        let ground = crate::graph::VertexSet::from_indices(
            inst.host.graph.universe(),
            unoccupied.iter().copied(),
        );
        let sets: Vec<crate::graph::VertexSet> =
            lefts.iter().map(|&y| st.host_set(y).clone()).collect();
        let hall = hall_audit(&sets, &ground, inst.params.d3, inst.seeds.root, 200);

        let g = CandidacyGraph::from_sets(&sets);
        let m = max_matching(&g);
        report.phase2.push(Phase2ClusterReport {
            cluster,
            m: lefts.len(),
            matching_size: m.pairs.len(),
            augmenting_phases: m.phases,
            hall,
        });
        if !m.perfect {
            let witness = m.hall_witness.expect("imperfect matching has a witness");
            let mut union = crate::graph::VertexSet::empty(inst.host.graph.universe());
            for &w in &witness {
                union.union_with(&sets[w]);
            }
            return Err(Error::NoSdr {
                cluster,
                witness_size: witness.len(),
                union_size: union.count(),
                witness: witness.iter().map(|&w| lefts[w]).collect(),
            });
        }
        let mut images = vec![0usize; lefts.len()];
        for (l, r) in m.pairs {
            images[l] = g.right_ids[r];
        }
        for (&y, &v) in lefts.iter().zip(&images) {
            st.embed(inst, y, v);
            report.sequence.push(SeqEntry { x: y, v, phase: Phase::Representatives });
        }
    }
    Ok(())
}

/// Full run: preprocessing, the greedy phase, representative completion, and
/// internal verification. The report is returned in both outcomes.
pub fn run(inst: &Instance) -> (RunReport, Result<Vec<usize>>) {
    run_with_options(inst, RunOptions::default())
}

pub fn run_with_options(inst: &Instance, opts: RunOptions) -> (RunReport, Result<Vec<usize>>) {
    let mut report = RunReport::new(inst);
    match run_inner(inst, &mut report, opts) {
        Ok(phi) => {
            report.outcome = Outcome::Success;
            (report, Ok(phi))
        }
        Err(e) => {
            let (t, vertex) = match &e {
                Error::SelectionExhausted { t, vertex, .. } => (*t, Some(*vertex)),
                _ => (report.sequence.len(), None),
            };
            report.outcome = Outcome::Failure { kind: e.to_string(), t, vertex };
            (report, Err(e))
        }
    }
}

fn run_inner(inst: &Instance, report: &mut RunReport, opts: RunOptions) -> Result<Vec<usize>> {
    let mut st = preprocess(inst)?;
    report.absorb_state(&st);
    phase1_loop(inst, &mut st, report, opts)?;
    report.absorb_state(&st);
    phase2(inst, &mut st, report)?;
    finish(inst, &st)
}

/// Extracts the total embedding and verifies it; a returned success is
/// always verifier-clean.
pub(crate) fn finish(inst: &Instance, st: &EmbeddingState) -> Result<Vec<usize>> {
    let phi: Vec<usize> = (0..inst.pattern.order())
        .map(|x| st.phi[x].expect("phase 2 left a vertex unembedded"))
        .collect();
    let check = verify_embedding(inst, &phi);
    if !check.ok {
        return Err(Error::Invariant(format!(
            "internal: produced embedding fails verification: {}",
            check
                .violations
                .iter()
                .map(|v| v.to_string())
                .collect::<Vec<_>>()
                .join("; ")
        )));
    }
    Ok(phi)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Violation {
    LengthMismatch { got: usize, want: usize },
    OutOfRange { x: usize, v: usize },
    NotInjective { x1: usize, x2: usize, v: usize },
    OutsideCluster { x: usize, v: usize },
    EdgeNotPreserved { x: usize, y: usize, vx: usize, vy: usize },
    RestrictionViolated { x: usize, v: usize },
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::LengthMismatch { got, want } => {
                write!(f, "length mismatch: embedding has {got} entries, pattern has {want} vertices")
            }
            Violation::OutOfRange { x, v } => {
                write!(f, "out of range: phi({x}) = {v} is not a host vertex")
            }
            Violation::NotInjective { x1, x2, v } => {
                write!(f, "injectivity: vertices {x1} and {x2} both map to host {v}")
            }
            Violation::OutsideCluster { x, v } => {
                write!(f, "cluster respect: phi({x}) = {v} lies outside the assigned cluster")
            }
            Violation::EdgeNotPreserved { x, y, vx, vy } => {
                write!(f, "edge preservation: ({x},{y}) maps to non-edge ({vx},{vy})")
            }
            Violation::RestrictionViolated { x, v } => {
                write!(f, "restriction: phi({x}) = {v} avoids the allowed set")
            }
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerificationReport {
    pub ok: bool,
    pub violations: Vec<Violation>,
}

/// Checks injectivity, cluster respect, edge preservation and restriction
/// compliance of a total map; lists every violation.
pub fn verify_embedding(inst: &Instance, phi: &[usize]) -> VerificationReport {
    let mut violations = Vec::new();
    let n = inst.pattern.order();
    if phi.len() != n {
        violations.push(Violation::LengthMismatch { got: phi.len(), want: n });
        return VerificationReport { ok: false, violations };
    }
    let host_n = inst.n();
    let mut owner: Vec<Option<usize>> = vec![None; host_n];
    for (x, &v) in phi.iter().enumerate() {
        if v >= host_n {
            violations.push(Violation::OutOfRange { x, v });
            continue;
        }
        match owner[v] {
            Some(x1) => violations.push(Violation::NotInjective { x1, x2: x, v }),
            None => owner[v] = Some(x),
        }
        if inst.host.cluster_of(v) != inst.pattern.cluster_of(x) {
            violations.push(Violation::OutsideCluster { x, v });
        }
    }
    for (x, y) in inst.pattern.graph.edge_list() {
        let (vx, vy) = (phi[x], phi[y]);
        if vx < host_n && vy < host_n && !inst.host.graph.has_edge(vx, vy) {
            violations.push(Violation::EdgeNotPreserved { x, y, vx, vy });
        }
    }
    for r in &inst.restrictions {
        let v = phi[r.vertex];
        if v < host_n && !r.allowed.contains(v) {
            violations.push(Violation::RestrictionViolated { x: r.vertex, v });
        }
    }
    VerificationReport { ok: violations.is_empty(), violations }
}
