//! Deterministic automata over communication labels.
//!
//! Two representations share one interface: a prefix tree built from an
//! explicit language, and the determinised order-ideal automaton of a set
//! of pomsets, whose language is the union of their linearizations.

use std::collections::BTreeMap;
use std::hash::Hash;

use crate::error::BoundExceeded;
use crate::label::CommLabel;
use crate::pomset::Pomset;

use super::{Language, Word};

/// A deterministic automaton in which every state can still reach an
/// accepting state.
pub trait LabelDfa {
    type State: Clone + Eq + Ord + Hash;

    fn initial(&self) -> Self::State;

    fn is_accepting(&self, s: &Self::State) -> bool;

    /// Enabled labels with their successors, sorted by label.
    fn successors(&self, s: &Self::State) -> Vec<(CommLabel, Self::State)>;

    fn step(&self, s: &Self::State, l: &CommLabel) -> Option<Self::State> {
        self.successors(s)
            .into_iter()
            .find(|(m, _)| m == l)
            .map(|(_, t)| t)
    }

    /// Whether the automaton accepts nothing at all.
    fn is_empty(&self) -> bool;
}

/// Prefix tree of a finite language. Node 0 is the empty word.
#[derive(Clone, Debug)]
pub struct Trie {
    children: Vec<BTreeMap<CommLabel, usize>>,
    terminal: Vec<bool>,
}

impl Trie {
    pub fn from_language(l: &Language) -> Self {
        let mut t = Trie {
            children: vec![BTreeMap::new()],
            terminal: vec![false],
        };
        for w in l {
            t.insert(w);
        }
        t
    }

    fn insert(&mut self, w: &Word) {
        let mut node = 0;
        for l in w.iter() {
            node = match self.children[node].get(l) {
                Some(&n) => n,
                None => {
                    let n = self.children.len();
                    self.children.push(BTreeMap::new());
                    self.terminal.push(false);
                    self.children[node].insert(l.clone(), n);
                    n
                }
            };
        }
        self.terminal[node] = true;
    }

    /// Number of nodes, i.e. of distinct prefixes.
    pub fn node_count(&self) -> usize {
        self.children.len()
    }

    pub fn is_terminal(&self, node: usize) -> bool {
        self.terminal[node]
    }
}

impl LabelDfa for Trie {
    type State = usize;

    fn initial(&self) -> usize {
        0
    }

    fn is_accepting(&self, s: &usize) -> bool {
        self.terminal[*s]
    }

    fn successors(&self, s: &usize) -> Vec<(CommLabel, usize)> {
        self.children[*s]
            .iter()
            .map(|(l, &n)| (l.clone(), n))
            .collect()
    }

    fn step(&self, s: &usize, l: &CommLabel) -> Option<usize> {
        self.children[*s].get(l).copied()
    }

    fn is_empty(&self) -> bool {
        !self.terminal.iter().any(|&t| t)
    }
}

/// Subset construction over `(member, order ideal)` pairs. Ideals are bit
/// masks, so members may have at most 64 events.
#[derive(Clone, Debug)]
pub struct IdealDfa {
    labels: Vec<Vec<CommLabel>>,
    preds: Vec<Vec<u64>>,
    full: Vec<u64>,
}

/// A set of `(member, ideal)` pairs, sorted and without duplicates.
pub type IdealSet = Vec<(u32, u64)>;

impl IdealDfa {
    pub const MAX_EVENTS: usize = 64;

    pub fn new<'a>(pomsets: impl IntoIterator<Item = &'a Pomset>) -> Result<Self, BoundExceeded> {
        let mut dfa = IdealDfa {
            labels: Vec::new(),
            preds: Vec::new(),
            full: Vec::new(),
        };
        for r in pomsets {
            if r.len() > Self::MAX_EVENTS {
                return Err(BoundExceeded::new("events per pomset", Self::MAX_EVENTS));
            }
            dfa.labels
                .push((0..r.len()).map(|i| r.label(i).clone()).collect());
            dfa.preds.push(
                (0..r.len())
                    .map(|i| r.below(i).ones().fold(0u64, |m, j| m | 1 << j))
                    .collect(),
            );
            dfa.full.push(if r.len() == 64 {
                u64::MAX
            } else {
                (1u64 << r.len()) - 1
            });
        }
        Ok(dfa)
    }
}

impl LabelDfa for IdealDfa {
    type State = IdealSet;

    fn initial(&self) -> IdealSet {
        (0..self.labels.len() as u32).map(|m| (m, 0)).collect()
    }

    fn is_accepting(&self, s: &IdealSet) -> bool {
        s.iter().any(|&(m, i)| i == self.full[m as usize])
    }

    fn successors(&self, s: &IdealSet) -> Vec<(CommLabel, IdealSet)> {
        let mut by_label: BTreeMap<&CommLabel, IdealSet> = BTreeMap::new();
        for &(m, ideal) in s {
            let m_ = m as usize;
            for (e, &p) in self.preds[m_].iter().enumerate() {
                let bit = 1u64 << e;
                if ideal & bit == 0 && p & !ideal == 0 {
                    by_label
                        .entry(&self.labels[m_][e])
                        .or_default()
                        .push((m, ideal | bit));
                }
            }
        }
        by_label
            .into_iter()
            .map(|(l, mut set)| {
                set.sort_unstable();
                set.dedup();
                (l.clone(), set)
            })
            .collect()
    }

    fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}
