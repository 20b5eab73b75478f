//! Inter-participant closure: every well-formed way of gluing one local
//! pomset per participant together with output-to-input match edges.

use std::collections::{BTreeMap, BTreeSet};

use fixedbitset::FixedBitSet;
use thiserror::Error;

use crate::error::{BoundExceeded, Budget};
use crate::label::{CommLabel, Participant};
use crate::pomset::{Event, EventId, Pomset};
use crate::wellformed::is_well_formed;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClosureError {
    #[error(transparent)]
    Bound(#[from] BoundExceeded),
    #[error("local pomset of `{participant}` contains event `{event}` with subject `{subject}`")]
    SubjectMismatch {
        participant: Participant,
        event: EventId,
        subject: Participant,
    },
}

/// One member of a closure together with the match edges that produced it.
#[derive(Clone, Debug)]
pub struct ClosurePomset {
    pub pomset: Pomset,
    /// Added output-to-input edges, by event id of `pomset`.
    pub matches: Vec<(EventId, EventId)>,
}

#[derive(Clone, Debug, Default)]
pub struct ClosureResult {
    /// One entry per isomorphism class, in canonical order.
    pub pomsets: Vec<ClosurePomset>,
    /// Complete match assignments examined.
    pub matchings_tried: usize,
    /// Assignments yielding a well-formed pomset, before deduplication.
    pub matchings_kept: usize,
}

impl ClosureResult {
    pub fn len(&self) -> usize {
        self.pomsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pomsets.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Pomset> {
        self.pomsets.iter().map(|c| &c.pomset)
    }
}

struct Search {
    /// Strict successors in the order built so far.
    above: Vec<FixedBitSet>,
    /// Inputs in assignment order, each with its candidate outputs.
    inputs: Vec<(usize, Vec<usize>)>,
    used: FixedBitSet,
    chosen: Vec<(usize, usize)>,
}

/// The inter-participant closure of `locals`. Event ids are prefixed with
/// the participant name (`A.e1`) to keep them distinct.
pub fn inter_participant_closure(
    locals: &BTreeMap<Participant, Pomset>,
    bound: usize,
) -> Result<ClosureResult, ClosureError> {
    let mut events: Vec<Event> = Vec::new();
    let mut local_edges: Vec<(usize, usize)> = Vec::new();
    for (a, r) in locals {
        let offset = events.len();
        for e in r.events() {
            if e.label.subject() != a {
                return Err(ClosureError::SubjectMismatch {
                    participant: a.clone(),
                    event: e.id.clone(),
                    subject: e.label.subject().clone(),
                });
            }
            events.push(Event {
                id: EventId::new(format!("{a}.{}", e.id)),
                label: e.label.clone(),
            });
        }
        local_edges.extend(r.hasse().iter().map(|&(i, j)| (i + offset, j + offset)));
    }
    let n = events.len();
    let labels: Vec<CommLabel> = events.iter().map(|e| e.label.clone()).collect();

    let base = Pomset::from_indexed(events.clone(), local_edges.iter().copied())
        .expect("local orders are acyclic and on disjoint events");
    let above: Vec<FixedBitSet> = (0..n).map(|i| base.above(i).clone()).collect();

    // group inputs by class so that each class is assigned contiguously
    let mut inputs: Vec<(usize, Vec<usize>)> = (0..n)
        .filter(|&i| labels[i].is_input())
        .map(|i| {
            let want = labels[i].dual();
            (i, (0..n).filter(|&o| labels[o] == want).collect())
        })
        .collect();
    inputs.sort_by(|a, b| labels[a.0].cmp(&labels[b.0]).then(a.0.cmp(&b.0)));

    let mut search = Search {
        above,
        inputs,
        used: FixedBitSet::with_capacity(n),
        chosen: Vec::new(),
    };
    let mut result = ClosureResult::default();
    let mut found: BTreeMap<Pomset, Vec<(usize, usize)>> = BTreeMap::new();
    let mut budget = Budget::new("closure matchings", bound);
    assign(
        &mut search,
        0,
        &events,
        &local_edges,
        &mut found,
        &mut result,
        &mut budget,
    )?;
    result.pomsets = found
        .into_iter()
        .map(|(pomset, pairs)| ClosurePomset {
            matches: pairs
                .iter()
                .map(|&(o, i)| (pomset.id(o).clone(), pomset.id(i).clone()))
                .collect(),
            pomset,
        })
        .collect();
    Ok(result)
}

fn assign(
    s: &mut Search,
    k: usize,
    events: &[Event],
    local_edges: &[(usize, usize)],
    found: &mut BTreeMap<Pomset, Vec<(usize, usize)>>,
    result: &mut ClosureResult,
    budget: &mut Budget,
) -> Result<(), BoundExceeded> {
    if k == s.inputs.len() {
        budget.spend()?;
        result.matchings_tried += 1;
        let edges = local_edges.iter().chain(&s.chosen).copied();
        let candidate = Pomset::from_indexed(events.to_vec(), edges)
            .expect("assignments never close a cycle");
        if s.chosen.iter().all(|&(o, i)| candidate.is_immediate(o, i))
            && is_well_formed(&candidate).holds()
        {
            result.matchings_kept += 1;
            found.entry(candidate).or_insert_with(|| s.chosen.clone());
        }
        return Ok(());
    }
    let (input, candidates) = s.inputs[k].clone();
    for o in candidates {
        // skip used outputs, cycles (input already below output) and edges
        // that are implied already, hence can never be immediate
        if s.used[o] || s.above[input][o] || s.above[o][input] {
            continue;
        }
        let saved = s.above.clone();
        let mut targets = s.above[input].clone();
        targets.insert(input);
        for x in 0..s.above.len() {
            if x == o || s.above[x][o] {
                s.above[x].union_with(&targets);
            }
        }
        s.used.insert(o);
        s.chosen.push((o, input));
        assign(s, k + 1, events, local_edges, found, result, budget)?;
        s.chosen.pop();
        s.used.set(o, false);
        s.above = saved;
    }
    Ok(())
}

/// Labels that occur on two unordered events of some local pomset.
pub fn local_repeats(locals: &BTreeMap<Participant, Pomset>) -> BTreeSet<CommLabel> {
    locals
        .values()
        .flat_map(|r| r.concurrently_repeats())
        .collect()
}
