//! Post-hoc compliance check: replays a recorded placement sequence from the
//! instance alone, rebuilding every candidate and host set, and re-verifies
//! at each step that the chosen image sat in the host pool, that every
//! enforced selection window held, that sets only ever shrink, and that the
//! exact shrinkage bound |C| >= initial * prod(d - eps) survives.

use crate::embed::select::windows_hold;
use crate::embed::state::preprocess;
use crate::embed::{Phase, SeqEntry};
use crate::instance::Instance;

/// Replays `sequence` and returns every discrepancy found (empty = clean).
pub fn replay_check(inst: &Instance, sequence: &[SeqEntry]) -> Vec<String> {
    let mut problems = Vec::new();
    let mut st = match preprocess(inst) {
        Ok(s) => s,
        Err(e) => return vec![format!("preprocess failed during replay: {e}")],
    };
    let mut sizes_c: Vec<usize> = (0..inst.pattern.order())
        .map(|x| st.candidate_set(x).count())
        .collect();
    let mut sizes_h: Vec<usize> = (0..inst.pattern.order())
        .map(|x| st.host_set(x).count())
        .collect();

    for (i, entry) in sequence.iter().enumerate() {
        let t = i + 1;
        let SeqEntry { x, v, phase } = *entry;
        if st.is_embedded(x) {
            problems.push(format!("step {t}: vertex {x} embedded twice"));
            break;
        }
        if !st.host_set(x).contains(v) {
            problems.push(format!("step {t}: image {v} outside the host set of {x}"));
            break;
        }
        if phase == Phase::Greedy {
            if let Err(why) = windows_hold(&st, inst, x, v, t) {
                problems.push(format!("step {t}: window violated placing {x} at {v}: {why}"));
            }
        } else {
            st.completing = true;
        }
        st.embed(inst, x, v);
        for y in 0..inst.pattern.order() {
            if st.is_embedded(y) {
                continue;
            }
            let (c, h) = (st.candidate_set(y).count(), st.host_set(y).count());
            if c > sizes_c[y] || h > sizes_h[y] {
                problems.push(format!("step {t}: a set of vertex {y} grew"));
            }
            sizes_c[y] = c;
            sizes_h[y] = h;
        }
        for p in st.check_invariants(inst) {
            problems.push(format!("step {t}: {p}"));
        }
        if problems.len() > 20 {
            problems.push("... further problems suppressed".to_string());
            return problems;
        }
    }
    if sequence.len() == inst.pattern.order() {
        for x in 0..inst.pattern.order() {
            if !st.is_embedded(x) {
                problems.push(format!("vertex {x} never embedded"));
            }
        }
    }
    problems
}

/// Re-verifies that recorded buffers sit pairwise at distance >= 4 within
/// each cluster, by BFS on the pattern.
pub fn recheck_buffer_distances(inst: &Instance, buffers: &[Vec<usize>]) -> Vec<String> {
    let mut problems = Vec::new();
    for (cluster, list) in buffers.iter().enumerate() {
        for (i, &a) in list.iter().enumerate() {
            for &b in list.iter().skip(i + 1) {
                match inst.pattern.graph.distance(a, b) {
                    Some(d) if d < 4 => problems.push(format!(
                        "cluster {cluster}: buffers {a} and {b} at distance {d}"
                    )),
                    _ => {}
                }
            }
        }
    }
    problems
}
