//! Image selection. A candidate for x must respect degree windows against
//! the candidate and host sets of every unembedded neighbor y, and a pairwise
//! window against intersections C(y) ∩ C(y') for most same-cluster y'.
//!
//! Windows are relative: deg(v, S) must lie within (d ± eps)|S| where d is
//! the recorded density of the cluster pair involved. Two gates decide what
//! is enforced at a given set size:
//!
//!  - the shrinkage floor is always enforced: placing x at v must leave
//!    every unembedded neighbor y with |C(y)| >= prod(d - eps) * |C_0(y)|,
//!    the product running over y's embedded neighbors. This is the exact
//!    invariant the completion phase relies on; the relative lower window
//!    (d - eps)|C(y)| implies it but over-rejects once C(y) is small, where
//!    the threshold would sit at the mean of the degree distribution;
//!  - the relative windows themselves are enforced only when meaningful for
//!    a set of that size: the set must be larger than eps*N (smaller sets
//!    carry no regularity guarantee) and the window must span the counting
//!    noise, eps^2*|S| >= z^2*d(1-d) with z = 2. On hosts of a few hundred
//!    vertices per cluster this leaves the shrinkage floor in charge; at
//!    larger N the full window set becomes active.
//!
//! Ties are broken by most-constrained-neighbor relief: maximize the minimum
//! over unembedded neighbors of |H(y) ∩ N(v)|. Remaining ties (always, when
//! x has no unembedded neighbors) prefer the scarcest host: the one lying in
//! the fewest host sets of the unembedded vertices of its cluster, so the
//! endgame consumes hosts nobody else is counting on. Final ties take the
//! smallest host index.

use crate::embed::state::EmbeddingState;
use crate::error::{Error, Result};
use crate::graph::VertexSet;
use crate::instance::Instance;
use crate::rat::{count_ge_mul, Rat};
use rand::Rng;
use serde::{Deserialize, Serialize};

/// Window-noise gate: z standard deviations of a Binomial(|S|, d) count must
/// fit inside the eps-window.
const WINDOW_NOISE_Z: i128 = 2;

/// Class size above which the pairwise condition is sampled instead of
/// evaluated exactly; also the sample size.
pub const PAIRWISE_EXACT_LIMIT: usize = 64;

/// True when a two-sided window on a set of `size` elements is enforced.
pub fn window_enforced(size: usize, d: &Rat, eps: &Rat, n_per_cluster: usize) -> bool {
    let s = Rat::from_integer(size as i128);
    let n = Rat::from_integer(n_per_cluster as i128);
    if s <= *eps * n {
        return false;
    }
    let z2 = Rat::from_integer(WINDOW_NOISE_Z * WINDOW_NOISE_Z);
    *eps * *eps * s >= z2 * *d * (Rat::from_integer(1) - *d)
}

#[inline]
pub fn lower_ok(deg: usize, size: usize, d: &Rat, eps: &Rat) -> bool {
    // deg >= (d - eps) * size
    let w = *d - *eps;
    (deg as i128) * w.denom() >= w.numer() * (size as i128)
}

#[inline]
pub fn upper_ok(deg: usize, size: usize, d: &Rat, eps: &Rat) -> bool {
    // deg <= (d + eps) * size
    let w = *d + *eps;
    (deg as i128) * w.denom() <= w.numer() * (size as i128)
}

/// Why candidates were rejected, by first failing condition.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FailureHistogram {
    pub pool: usize,
    pub candidate_lower: usize,
    pub candidate_upper: usize,
    pub host_window: usize,
    pub pairwise: usize,
}

impl std::fmt::Display for FailureHistogram {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "pool={} rejected: candidate-lower={} candidate-upper={} host-window={} pairwise={}",
            self.pool, self.candidate_lower, self.candidate_upper, self.host_window, self.pairwise
        )
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct ScanStats {
    pub scanned: usize,
    pub qualifying: usize,
}

struct PairwiseWindow {
    set: VertexSet,
    size: usize,
}

struct NeighborCtx<'a> {
    y: usize,
    d: Rat,
    /// Exact floor on deg(v, C(y)): (d - eps) * running shrinkage bound.
    floor: Rat,
    c_set: &'a VertexSet,
    c_size: usize,
    hs_set: &'a VertexSet,
    hs_size: usize,
    c_lower_on: bool,
    c_upper_on: bool,
    hs_on: bool,
    windows: Vec<PairwiseWindow>,
    considered: usize,
}

/// Builds the per-neighbor contexts for embedding x at time t, including the
/// pairwise intersection sets whose windows are enforced. The y' population
/// is evaluated exactly for small classes and over a seeded sample of
/// [`PAIRWISE_EXACT_LIMIT`] vertices otherwise.
fn neighbor_contexts<'a>(
    state: &'a EmbeddingState,
    inst: &Instance,
    x: usize,
    t: usize,
) -> Vec<NeighborCtx<'a>> {
    let eps = &inst.params.eps;
    let big_n = inst.n_per_cluster();
    let cx = inst.pattern.cluster_of(x);
    let mut out = Vec::new();
    for y in inst.pattern.graph.neighbor_list(x) {
        if state.is_embedded(y) {
            continue;
        }
        let cy = inst.pattern.cluster_of(y);
        let d = inst.edge_density(cx, cy);
        let c_set = state.candidate_set(y);
        let hs_set = state.host_set(y);
        let c_size = c_set.count();
        let hs_size = hs_set.count();
        let shrink = d - *eps;
        let floor = if shrink < Rat::from_integer(0) {
            Rat::from_integer(0)
        } else {
            state.c_bound[y] * shrink
        };
        let c_lower_on = window_enforced(c_size, &d, eps, big_n);
        let c_upper_on = c_lower_on;
        let hs_on = window_enforced(hs_size, &d, eps, big_n);

        let class: Vec<usize> = state.unembedded_by_cluster[cy]
            .iter()
            .copied()
            .filter(|&z| z != y)
            .collect();
        let mut sampled: Vec<usize> = class;
        if sampled.len() > PAIRWISE_EXACT_LIMIT {
            let mut rng = crate::seeds::rng(inst.seeds.root, "select", t as u64);
            for k in 0..PAIRWISE_EXACT_LIMIT {
                let j = rng.gen_range(k..sampled.len());
                sampled.swap(k, j);
            }
            sampled.truncate(PAIRWISE_EXACT_LIMIT);
        }
        let considered = sampled.len();
        let mut windows = Vec::new();
        for z in sampled {
            let other = state.candidate_set(z);
            let isize = c_set.intersection_count(other);
            if window_enforced(isize, &d, eps, big_n) {
                let mut set = c_set.clone();
                set.intersect_with(other);
                windows.push(PairwiseWindow { set, size: isize });
            }
        }
        out.push(NeighborCtx {
            y,
            d,
            floor,
            c_set,
            c_size,
            hs_set,
            hs_size,
            c_lower_on,
            c_upper_on,
            hs_on,
            windows,
            considered,
        });
    }
    out
}

/// Checks every window condition for placing x at v. On failure names the
/// first violated condition. `t` is the 1-based time of the step, used only
/// to derive the pairwise sample.
pub fn windows_hold(
    state: &EmbeddingState,
    inst: &Instance,
    x: usize,
    v: usize,
    t: usize,
) -> std::result::Result<(), String> {
    let ctxs = neighbor_contexts(state, inst, x, t);
    let eps = &inst.params.eps;
    let eps1 = &inst.params.eps1;
    for ctx in &ctxs {
        let host = &inst.host.graph;
        let c_deg = host.degree_into(v, ctx.c_set);
        if Rat::from_integer(c_deg as i128) < ctx.floor {
            return Err(format!(
                "shrinkage floor vs neighbor {}: deg {} of |C|={}, floor {}",
                ctx.y,
                c_deg,
                ctx.c_size,
                crate::rat::format_rat(&ctx.floor)
            ));
        }
        if ctx.c_lower_on && !lower_ok(c_deg, ctx.c_size, &ctx.d, eps) {
            return Err(format!("candidate lower window vs neighbor {}", ctx.y));
        }
        if ctx.c_upper_on && !upper_ok(c_deg, ctx.c_size, &ctx.d, eps) {
            return Err(format!("candidate upper window vs neighbor {}", ctx.y));
        }
        if ctx.hs_on {
            let hs_deg = host.degree_into(v, ctx.hs_set);
            if !lower_ok(hs_deg, ctx.hs_size, &ctx.d, eps) || !upper_ok(hs_deg, ctx.hs_size, &ctx.d, eps) {
                return Err(format!("host-set window vs neighbor {}", ctx.y));
            }
        }
        if !pairwise_ok(ctx, inst, v, eps, eps1) {
            return Err(format!("pairwise window proportion vs neighbor {}", ctx.y));
        }
    }
    Ok(())
}

fn pairwise_ok(ctx: &NeighborCtx, inst: &Instance, v: usize, eps: &Rat, eps1: &Rat) -> bool {
    if ctx.considered == 0 {
        return true;
    }
    let mut passed = ctx.considered - ctx.windows.len();
    for w in &ctx.windows {
        let deg = inst.host.graph.degree_into(v, &w.set);
        if lower_ok(deg, w.size, &ctx.d, eps) && upper_ok(deg, w.size, &ctx.d, eps) {
            passed += 1;
        }
    }
    // passed >= (1 - eps1) * considered
    let one_minus = Rat::from_integer(1) - *eps1;
    count_ge_mul(passed, &one_minus, ctx.considered)
}

/// Picks the image of x from `pool` so that every enforced window holds for
/// all unembedded neighbors. `t` is the 1-based step time.
pub fn select_image(
    state: &EmbeddingState,
    inst: &Instance,
    x: usize,
    pool: &VertexSet,
    t: usize,
) -> Result<(usize, ScanStats)> {
    let ctxs = neighbor_contexts(state, inst, x, t);
    let eps = &inst.params.eps;
    let eps1 = &inst.params.eps1;
    let host = &inst.host.graph;

    let mut hist = FailureHistogram { pool: pool.count(), ..Default::default() };
    let mut stats = ScanStats::default();
    let mut qualifying: Vec<(usize, usize)> = Vec::new(); // (relief, v)

    'cand: for v in pool.iter() {
        stats.scanned += 1;
        let mut relief = usize::MAX;
        for ctx in &ctxs {
            let c_deg = host.degree_into(v, ctx.c_set);
            if Rat::from_integer(c_deg as i128) < ctx.floor
                || (ctx.c_lower_on && !lower_ok(c_deg, ctx.c_size, &ctx.d, eps))
            {
                hist.candidate_lower += 1;
                continue 'cand;
            }
            if ctx.c_upper_on && !upper_ok(c_deg, ctx.c_size, &ctx.d, eps) {
                hist.candidate_upper += 1;
                continue 'cand;
            }
            let hs_deg = host.degree_into(v, ctx.hs_set);
            if ctx.hs_on && (!lower_ok(hs_deg, ctx.hs_size, &ctx.d, eps) || !upper_ok(hs_deg, ctx.hs_size, &ctx.d, eps)) {
                hist.host_window += 1;
                continue 'cand;
            }
            if !pairwise_ok(ctx, inst, v, eps, eps1) {
                hist.pairwise += 1;
                continue 'cand;
            }
            relief = relief.min(hs_deg);
        }
        qualifying.push((relief, v));
    }
    stats.qualifying = qualifying.len();

    let top = match qualifying.iter().map(|&(m, _)| m).max() {
        Some(m) => m,
        None => return Err(Error::SelectionExhausted { t, vertex: x, histogram: hist }),
    };
    let cx = inst.pattern.cluster_of(x);
    let mut best: Option<(usize, usize)> = None; // (scarcity, v)
    for &(m, v) in &qualifying {
        if m != top {
            continue;
        }
        let scarcity = state.unembedded_by_cluster[cx]
            .iter()
            .filter(|&&z| z != x && state.host_set(z).contains(v))
            .count();
        if best.map_or(true, |(bs, _)| scarcity < bs) {
            best = Some((scarcity, v));
        }
    }
    Ok((best.expect("nonempty tie set").1, stats))
}
