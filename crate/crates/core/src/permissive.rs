//! The "less permissive" preorder.
//!
//! `r ⊑ r'` holds when both pomsets have the same labelled events and `r`
//! carries at least the order of `r'`. On iso-classes this asks for a
//! label-preserving bijection `ψ` from the events of `r'` onto those of `r`
//! with `f <' g  ⇒  ψ(f) < ψ(g)`.

use crate::pomset::Pomset;

/// Instrumentation for the bijection search.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SearchStats {
    /// Search nodes visited.
    pub nodes: u64,
    /// Nodes where more than one candidate survived filtering.
    pub branch_points: u64,
}

impl SearchStats {
    pub fn absorb(&mut self, other: SearchStats) {
        self.nodes += other.nodes;
        self.branch_points += other.branch_points;
    }
}

/// `r ⊑ r'`: `r` is less permissive than `r'`.
pub fn less_permissive(r: &Pomset, r2: &Pomset) -> bool {
    embedding(r, r2, &mut SearchStats::default()).is_some()
}

/// Like [`less_permissive`], recording search statistics.
pub fn less_permissive_counted(r: &Pomset, r2: &Pomset, stats: &mut SearchStats) -> bool {
    embedding(r, r2, stats).is_some()
}

/// Per-event counts used to filter candidates: an image must have at least
/// as many predecessors and successors (overall and with its own label).
#[derive(Clone, Copy)]
struct Profile {
    below: usize,
    above: usize,
    same_below: usize,
    same_above: usize,
}

fn profiles(p: &Pomset) -> Vec<Profile> {
    (0..p.len())
        .map(|i| Profile {
            below: p.below(i).count_ones(..),
            above: p.above(i).count_ones(..),
            same_below: p.below(i).ones().filter(|&j| p.label(j) == p.label(i)).count(),
            same_above: p.above(i).ones().filter(|&j| p.label(j) == p.label(i)).count(),
        })
        .collect()
}

/// Finds `ψ` (indexed by events of `r2`, valued in events of `r`) witnessing
/// `r ⊑ r2`, if any.
pub fn embedding(r: &Pomset, r2: &Pomset, stats: &mut SearchStats) -> Option<Vec<usize>> {
    if r.len() != r2.len() || r.order_size() < r2.order_size() {
        return None;
    }
    if r.label_multiset() != r2.label_multiset() {
        return None;
    }
    let pr = profiles(r);
    let pr2 = profiles(r2);
    let order = r2.topological_order();
    let mut psi = vec![usize::MAX; r2.len()];
    let mut used = vec![false; r.len()];
    if assign(r, r2, &pr, &pr2, &order, 0, &mut psi, &mut used, stats) {
        Some(psi)
    } else {
        None
    }
}

#[allow(clippy::too_many_arguments)]
fn assign(
    r: &Pomset,
    r2: &Pomset,
    pr: &[Profile],
    pr2: &[Profile],
    order: &[usize],
    k: usize,
    psi: &mut [usize],
    used: &mut [bool],
    stats: &mut SearchStats,
) -> bool {
    if k == order.len() {
        return true;
    }
    stats.nodes += 1;
    let f = order[k];
    let want = &pr2[f];
    let candidates: Vec<usize> = (0..r.len())
        .filter(|&e| {
            !used[e]
                && r.label(e) == r2.label(f)
                && pr[e].below >= want.below
                && pr[e].above >= want.above
                && pr[e].same_below >= want.same_below
                && pr[e].same_above >= want.same_above
                // predecessors of f are assigned already (topological order)
                && r2.below(f).ones().all(|g| r.lt(psi[g], e))
        })
        .collect();
    if candidates.len() > 1 {
        stats.branch_points += 1;
    }
    for e in candidates {
        psi[f] = e;
        used[e] = true;
        if assign(r, r2, pr, pr2, order, k + 1, psi, used, stats) {
            return true;
        }
        used[e] = false;
        psi[f] = usize::MAX;
    }
    false
}
