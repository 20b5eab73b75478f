//! Canonical forms for pomsets.
//!
//! Events are coloured by label, the colouring is refined by the colour
//! multisets of strict predecessors and successors until stable, and any
//! remaining ties are broken by individualising one event at a time. The
//! canonical form is the lexicographically least order matrix over all
//! leaves of that search. Cells made of interchangeable events (same label,
//! mutually unordered, same neighbourhood) are branched on once.

use std::collections::BTreeMap;

use crate::label::CommLabel;
use crate::pomset::Pomset;

/// Isomorphism-invariant encoding of a pomset: equal forms iff isomorphic.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct CanonicalForm {
    labels: Vec<CommLabel>,
    matrix: Vec<u64>,
}

impl CanonicalForm {
    pub fn labels(&self) -> &[CommLabel] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

pub(crate) fn compute(p: &Pomset) -> CanonicalForm {
    let n = p.len();
    let mut distinct: Vec<&CommLabel> = p.events().iter().map(|e| &e.label).collect();
    distinct.sort();
    distinct.dedup();
    let colors: Vec<usize> = (0..n)
        .map(|i| distinct.binary_search(&p.label(i)).unwrap())
        .collect();
    let colors = refine(p, colors);
    let mut best: Option<Vec<u64>> = None;
    search(p, colors, &mut best);
    let mut order: Vec<usize> = (0..n).collect();
    // labels are sorted identically at every leaf: refinement keeps label rank major
    order.sort_by(|&a, &b| p.label(a).cmp(p.label(b)));
    CanonicalForm {
        labels: order.iter().map(|&i| p.label(i).clone()).collect(),
        matrix: best.unwrap_or_default(),
    }
}

fn refine(p: &Pomset, mut colors: Vec<usize>) -> Vec<usize> {
    let n = p.len();
    let mut classes = count_classes(&colors);
    loop {
        let sigs: Vec<(usize, Vec<usize>, Vec<usize>)> = (0..n)
            .map(|i| {
                let mut lo: Vec<usize> = p.below(i).ones().map(|j| colors[j]).collect();
                let mut hi: Vec<usize> = p.above(i).ones().map(|j| colors[j]).collect();
                lo.sort_unstable();
                hi.sort_unstable();
                (colors[i], lo, hi)
            })
            .collect();
        let mut ranked: Vec<&(usize, Vec<usize>, Vec<usize>)> = sigs.iter().collect();
        ranked.sort();
        ranked.dedup();
        let next: Vec<usize> = sigs
            .iter()
            .map(|s| ranked.binary_search(&s).unwrap())
            .collect();
        let next_classes = ranked.len();
        colors = next;
        if next_classes == classes {
            return colors;
        }
        classes = next_classes;
    }
}

fn count_classes(colors: &[usize]) -> usize {
    let mut c = colors.to_vec();
    c.sort_unstable();
    c.dedup();
    c.len()
}

fn search(p: &Pomset, colors: Vec<usize>, best: &mut Option<Vec<u64>>) {
    let n = p.len();
    let mut cells: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, &c) in colors.iter().enumerate() {
        cells.entry(c).or_default().push(i);
    }
    let target = cells.values().find(|cell| cell.len() > 1).cloned();
    let Some(cell) = target else {
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&i| colors[i]);
        let enc = encode(p, &order);
        if best.as_ref().is_none_or(|b| enc < *b) {
            *best = Some(enc);
        }
        return;
    };
    let branches: &[usize] = if all_twins(p, &cell) {
        &cell[..1]
    } else {
        &cell
    };
    for &v in branches {
        let split: Vec<usize> = colors
            .iter()
            .enumerate()
            .map(|(i, &c)| {
                if i == v {
                    2 * c
                } else if colors[i] == colors[v] {
                    2 * c + 1
                } else {
                    2 * c
                }
            })
            .collect();
        search(p, refine(p, split), best);
    }
}

/// Every pair in `cell` can be swapped by an automorphism.
fn all_twins(p: &Pomset, cell: &[usize]) -> bool {
    let first = cell[0];
    cell.iter().skip(1).all(|&v| {
        if p.label(v) != p.label(first) || p.comparable(first, v) {
            return false;
        }
        p.below(v) == p.below(first) && p.above(v) == p.above(first)
    }) && cell
        .iter()
        .all(|&u| cell.iter().all(|&v| u == v || !p.comparable(u, v)))
}

fn encode(p: &Pomset, order: &[usize]) -> Vec<u64> {
    let n = order.len();
    let mut words = vec![0u64; (n * n).div_ceil(64)];
    for (a, &i) in order.iter().enumerate() {
        for (b, &j) in order.iter().enumerate() {
            if p.lt(i, j) {
                let k = a * n + b;
                words[k / 64] |= 1u64 << (63 - (k % 64));
            }
        }
    }
    words
}
