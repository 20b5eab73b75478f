//! Labelled partial orders over communication actions.
//!
//! A [`Pomset`] stores one concrete lposet: events indexed `0..len()`, the
//! user-supplied edges, and the strict transitive closure of those edges.
//! Equality, hashing and set membership go through the canonical form, so
//! two pomsets compare equal exactly when they are label-preserving
//! order-isomorphic.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::{Arc, OnceLock};

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use crate::canon::CanonicalForm;
use crate::error::PomsetError;
use crate::label::{CommLabel, Participant};

/// Opaque event name, unique within one pomset.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EventId(Arc<str>);

impl EventId {
    pub fn new(name: impl AsRef<str>) -> Self {
        EventId(Arc::from(name.as_ref()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for EventId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for EventId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for EventId {
    fn from(s: &str) -> Self {
        EventId::new(s)
    }
}

impl From<String> for EventId {
    fn from(s: String) -> Self {
        EventId::new(s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Event {
    pub id: EventId,
    pub label: CommLabel,
}

/// A finite labelled strict partial order.
#[derive(Clone)]
pub struct Pomset {
    events: Vec<Event>,
    edges: Vec<(usize, usize)>,
    above: Vec<FixedBitSet>,
    below: Vec<FixedBitSet>,
    hasse: OnceLock<Vec<(usize, usize)>>,
    canon: OnceLock<CanonicalForm>,
}

/// Builds a pomset from named events and named order edges, checking id
/// uniqueness, edge endpoints and acyclicity.
pub fn validate_pomset<I, L, E, A, B>(raw_events: I, raw_edges: E) -> Result<Pomset, PomsetError>
where
    I: IntoIterator<Item = (L, CommLabel)>,
    L: Into<EventId>,
    E: IntoIterator<Item = (A, B)>,
    A: Into<EventId>,
    B: Into<EventId>,
{
    let events: Vec<Event> = raw_events
        .into_iter()
        .map(|(id, label)| Event {
            id: id.into(),
            label,
        })
        .collect();
    let mut index = BTreeMap::new();
    for (i, e) in events.iter().enumerate() {
        if index.insert(e.id.clone(), i).is_some() {
            return Err(PomsetError::DuplicateId(e.id.clone()));
        }
    }
    let mut edges = Vec::new();
    for (a, b) in raw_edges {
        let (a, b): (EventId, EventId) = (a.into(), b.into());
        let lookup = |x: &EventId| {
            index.get(x).copied().ok_or_else(|| PomsetError::DanglingEdge {
                from: a.clone(),
                to: b.clone(),
                missing: x.clone(),
            })
        };
        edges.push((lookup(&a)?, lookup(&b)?));
    }
    Pomset::from_indexed(events, edges)
}

impl Pomset {
    /// See [`validate_pomset`].
    pub fn new<I, L, E, A, B>(raw_events: I, raw_edges: E) -> Result<Pomset, PomsetError>
    where
        I: IntoIterator<Item = (L, CommLabel)>,
        L: Into<EventId>,
        E: IntoIterator<Item = (A, B)>,
        A: Into<EventId>,
        B: Into<EventId>,
    {
        validate_pomset(raw_events, raw_edges)
    }

    pub fn empty() -> Pomset {
        Pomset::from_indexed(Vec::new(), Vec::new()).expect("empty pomset is valid")
    }

    /// Builds from events and index-based edges.
    pub fn from_indexed(
        events: Vec<Event>,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Pomset, PomsetError> {
        let n = events.len();
        let mut seen = BTreeSet::new();
        for e in &events {
            if !seen.insert(&e.id) {
                return Err(PomsetError::DuplicateId(e.id.clone()));
            }
        }
        let mut edges: Vec<(usize, usize)> = edges.into_iter().collect();
        edges.sort_unstable();
        edges.dedup();
        for &(a, b) in &edges {
            assert!(a < n && b < n, "edge endpoint out of range");
            if a == b {
                return Err(PomsetError::Cycle(events[a].id.clone()));
            }
        }
        let mut succ = vec![Vec::new(); n];
        let mut indeg = vec![0usize; n];
        for &(a, b) in &edges {
            succ[a].push(b);
            indeg[b] += 1;
        }
        // Kahn: anything left unsorted lies on or behind a cycle.
        let mut topo = Vec::with_capacity(n);
        let mut ready: Vec<usize> = (0..n).filter(|&i| indeg[i] == 0).collect();
        while let Some(i) = ready.pop() {
            topo.push(i);
            for &j in &succ[i] {
                indeg[j] -= 1;
                if indeg[j] == 0 {
                    ready.push(j);
                }
            }
        }
        if topo.len() < n {
            let stuck = (0..n).find(|&i| indeg[i] > 0).unwrap();
            return Err(PomsetError::Cycle(events[stuck].id.clone()));
        }
        let mut above = vec![FixedBitSet::with_capacity(n); n];
        for &i in topo.iter().rev() {
            let mut acc = FixedBitSet::with_capacity(n);
            for &j in &succ[i] {
                acc.insert(j);
                acc.union_with(&above[j]);
            }
            above[i] = acc;
        }
        let mut below = vec![FixedBitSet::with_capacity(n); n];
        for (i, row) in above.iter().enumerate() {
            for j in row.ones() {
                below[j].insert(i);
            }
        }
        Ok(Pomset {
            events,
            edges,
            above,
            below,
            hasse: OnceLock::new(),
            canon: OnceLock::new(),
        })
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn label(&self, i: usize) -> &CommLabel {
        &self.events[i].label
    }

    pub fn id(&self, i: usize) -> &EventId {
        &self.events[i].id
    }

    pub fn index_of(&self, id: &EventId) -> Option<usize> {
        self.events.iter().position(|e| &e.id == id)
    }

    /// The edges as supplied (deduplicated), not necessarily transitively reduced.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Strict order: `i < j`.
    pub fn lt(&self, i: usize, j: usize) -> bool {
        self.above[i].contains(j)
    }

    /// Reflexive order: `i <= j`.
    pub fn le(&self, i: usize, j: usize) -> bool {
        i == j || self.lt(i, j)
    }

    pub fn comparable(&self, i: usize, j: usize) -> bool {
        self.le(i, j) || self.lt(j, i)
    }

    /// Strict successors of `i` in the transitive closure.
    pub fn above(&self, i: usize) -> &FixedBitSet {
        &self.above[i]
    }

    /// Strict predecessors of `i` in the transitive closure.
    pub fn below(&self, i: usize) -> &FixedBitSet {
        &self.below[i]
    }

    /// All pairs `(i, j)` with `i < j`.
    pub fn order_pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (i, row) in self.above.iter().enumerate() {
            out.extend(row.ones().map(|j| (i, j)));
        }
        out
    }

    pub fn order_size(&self) -> usize {
        self.above.iter().map(|r| r.count_ones(..)).sum()
    }

    /// Immediate-predecessor pairs (the Hasse diagram), sorted.
    pub fn hasse(&self) -> &[(usize, usize)] {
        self.hasse.get_or_init(|| {
            let mut out = Vec::new();
            for i in 0..self.len() {
                for j in self.above[i].ones() {
                    // i -> j is immediate iff no k with i < k < j
                    let mut between = self.above[i].clone();
                    between.intersect_with(&self.below[j]);
                    if between.is_clear() {
                        out.push((i, j));
                    }
                }
            }
            out
        })
    }

    pub fn is_immediate(&self, i: usize, j: usize) -> bool {
        self.hasse().binary_search(&(i, j)).is_ok()
    }

    pub fn immediate_successors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        self.hasse()
            .iter()
            .filter(move |&&(a, _)| a == i)
            .map(|&(_, b)| b)
    }

    pub fn immediate_predecessors(&self, j: usize) -> impl Iterator<Item = usize> + '_ {
        self.hasse()
            .iter()
            .filter(move |&&(_, b)| b == j)
            .map(|&(a, _)| a)
    }

    /// Events with no strict predecessor.
    pub fn minimal(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.below[i].is_clear()).collect()
    }

    /// A linear extension (ties broken by index).
    pub fn topological_order(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.sort_by_key(|&i| (self.below[i].count_ones(..), i));
        order
    }

    /// True iff every pair of events is comparable.
    pub fn is_total(&self) -> bool {
        (0..self.len()).all(|i| (i + 1..self.len()).all(|j| self.comparable(i, j)))
    }

    pub fn participants(&self) -> BTreeSet<Participant> {
        self.events
            .iter()
            .flat_map(|e| [e.label.sender.clone(), e.label.receiver.clone()])
            .collect()
    }

    /// Sorted multiset of labels.
    pub fn label_multiset(&self) -> Vec<CommLabel> {
        let mut v: Vec<CommLabel> = self.events.iter().map(|e| e.label.clone()).collect();
        v.sort();
        v
    }

    /// Restriction to `keep`, with the order induced by the transitive closure.
    pub fn restrict(&self, keep: &FixedBitSet) -> Pomset {
        let kept: Vec<usize> = keep.ones().filter(|&i| i < self.len()).collect();
        let mut new_index = vec![usize::MAX; self.len()];
        for (k, &i) in kept.iter().enumerate() {
            new_index[i] = k;
        }
        let events = kept.iter().map(|&i| self.events[i].clone()).collect();
        let mut edges = Vec::new();
        for &i in &kept {
            for j in self.above[i].ones() {
                if new_index[j] != usize::MAX {
                    edges.push((new_index[i], new_index[j]));
                }
            }
        }
        Pomset::from_indexed(events, edges).expect("restriction of a valid pomset")
    }

    /// Restriction to the events whose subject is `a`.
    pub fn project(&self, a: &Participant) -> Pomset {
        self.restrict(&self.events_of(a))
    }

    /// Indices of the events with subject `a`.
    pub fn events_of(&self, a: &Participant) -> FixedBitSet {
        let mut set = FixedBitSet::with_capacity(self.len());
        for (i, e) in self.events.iter().enumerate() {
            if e.label.subject() == a {
                set.insert(i);
            }
        }
        set
    }

    /// Labels carried by at least two mutually unordered events.
    pub fn concurrently_repeats(&self) -> BTreeSet<CommLabel> {
        let mut out = BTreeSet::new();
        for i in 0..self.len() {
            for j in i + 1..self.len() {
                if self.label(i) == self.label(j) && !self.comparable(i, j) {
                    out.insert(self.label(i).clone());
                }
            }
        }
        out
    }

    /// Number of events labelled `label` that are `<= i`.
    pub fn count_below(&self, i: usize, label: &CommLabel) -> usize {
        (0..self.len())
            .filter(|&k| self.le(k, i) && self.label(k) == label)
            .count()
    }

    /// Renames events to `e0, e1, ...`, keeping the order and labels.
    pub fn with_fresh_ids(&self, prefix: &str) -> Pomset {
        let events = self
            .events
            .iter()
            .enumerate()
            .map(|(i, e)| Event {
                id: EventId::new(format!("{prefix}{i}")),
                label: e.label.clone(),
            })
            .collect();
        Pomset::from_indexed(events, self.hasse().to_vec()).expect("renaming keeps validity")
    }

    pub fn canonical_form(&self) -> &CanonicalForm {
        self.canon.get_or_init(|| crate::canon::compute(self))
    }

    pub fn is_isomorphic(&self, other: &Pomset) -> bool {
        self.len() == other.len() && self.canonical_form() == other.canonical_form()
    }
}

impl PartialEq for Pomset {
    fn eq(&self, other: &Self) -> bool {
        self.is_isomorphic(other)
    }
}

impl Eq for Pomset {}

impl Hash for Pomset {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.canonical_form().hash(state);
    }
}

impl PartialOrd for Pomset {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Orders iso-classes by canonical form.
impl Ord for Pomset {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.canonical_form().cmp(other.canonical_form())
    }
}

impl fmt::Display for Pomset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (k, e) in self.events.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}:{}", e.id, e.label)?;
        }
        write!(f, " |")?;
        for (k, &(a, b)) in self.hasse().iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, " {}<{}", self.events[a].id, self.events[b].id)?;
        }
        write!(f, "]")
    }
}

impl fmt::Debug for Pomset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn l(s: &str) -> CommLabel {
        s.parse().unwrap()
    }

    #[test]
    fn single_message() {
        let r = Pomset::new([("e1", l("AB!x")), ("e2", l("AB?x"))], [("e1", "e2")]).unwrap();
        assert_eq!(r.len(), 2);
        assert!(r.lt(0, 1));
        assert!(!r.lt(1, 0));
    }

    #[test]
    fn empty_is_valid() {
        let r = Pomset::new(Vec::<(&str, CommLabel)>::new(), Vec::<(&str, &str)>::new()).unwrap();
        assert!(r.is_empty());
        assert!(r.hasse().is_empty());
    }

    #[test]
    fn cycle_rejected() {
        let err = Pomset::new(
            [("e1", l("AB!x")), ("e2", l("AB?x"))],
            [("e1", "e2"), ("e2", "e1")],
        )
        .unwrap_err();
        assert!(matches!(err, PomsetError::Cycle(_)));
        let selfloop = Pomset::new([("e1", l("AB!x"))], [("e1", "e1")]).unwrap_err();
        assert!(matches!(selfloop, PomsetError::Cycle(_)));
    }

    #[test]
    fn dangling_and_duplicate() {
        let err = Pomset::new([("e1", l("AB!x"))], [("e1", "zz")]).unwrap_err();
        assert_eq!(
            err,
            PomsetError::DanglingEdge {
                from: "e1".into(),
                to: "zz".into(),
                missing: "zz".into()
            }
        );
        let dup = Pomset::new([("e1", l("AB!x")), ("e1", l("AB?x"))], Vec::<(&str, &str)>::new())
            .unwrap_err();
        assert_eq!(dup, PomsetError::DuplicateId("e1".into()));
    }

    #[test]
    fn hasse_drops_transitive_edges() {
        let r = Pomset::new(
            [("a", l("AB!x")), ("b", l("AB!y")), ("c", l("AB!z"))],
            [("a", "b"), ("b", "c"), ("a", "c")],
        )
        .unwrap();
        assert_eq!(r.hasse(), &[(0, 1), (1, 2)]);
        let anti = Pomset::new([("a", l("AB!x")), ("b", l("AB!y"))], Vec::<(&str, &str)>::new())
            .unwrap();
        assert!(anti.hasse().is_empty());
    }

    #[test]
    fn projection_keeps_transitive_order() {
        // A!x < B?x < B!y < A?y : A's two events are ordered only through B
        let r = Pomset::new(
            [
                ("1", l("AB!x")),
                ("2", l("AB?x")),
                ("3", l("BA!y")),
                ("4", l("BA?y")),
            ],
            [("1", "2"), ("2", "3"), ("3", "4")],
        )
        .unwrap();
        let pa = r.project(&Participant::new("A"));
        assert_eq!(pa.len(), 2);
        assert!(pa.is_total());
        assert!(r.project(&Participant::new("Z")).is_empty());
    }

    #[test]
    fn concurrent_repeats() {
        let anti = Pomset::new([("a", l("AB!x")), ("b", l("AB!x"))], Vec::<(&str, &str)>::new())
            .unwrap();
        assert_eq!(
            anti.concurrently_repeats().into_iter().collect::<Vec<_>>(),
            vec![l("AB!x")]
        );
        let chain = Pomset::new([("a", l("AB!x")), ("b", l("AB!x"))], [("a", "b")]).unwrap();
        assert!(chain.concurrently_repeats().is_empty());
    }
}
