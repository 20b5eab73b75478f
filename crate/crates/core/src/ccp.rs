//! Pomset-level closure conditions CCP2 and CCP3.
//!
//! Both iterate over tuples with one local pomset per participant, close
//! each tuple, and ask every closure pomset for a more permissive member
//! (CCP2) or member prefix (CCP3). For CCP3 the local pomsets are the
//! restrictions of each member's projection to its order ideals, which are
//! exactly the projections of the member's prefixes.

use std::collections::{BTreeMap, HashMap};

use crate::closure::{inter_participant_closure, ClosureError, ClosurePomset};
use crate::error::{BoundExceeded, Budget};
use crate::family::PomsetFamily;
use crate::ideals::{order_ideals, prefixes};
use crate::label::{CommLabel, Participant};
use crate::permissive::{less_permissive_counted, SearchStats};
use crate::pomset::Pomset;
use crate::verdict::Verdict;

/// The local pomset a participant contributes to a tuple.
#[derive(Clone, Debug)]
pub struct TupleSlot {
    pub participant: Participant,
    /// First member (in family order) the local pomset comes from.
    pub member: String,
    pub local: Pomset,
}

/// A closure pomset without a dominating member (prefix).
#[derive(Clone, Debug)]
pub struct ClosureWitness {
    pub tuple: Vec<TupleSlot>,
    pub closure: ClosurePomset,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CcpStats {
    pub tuples: usize,
    pub closure_pomsets: usize,
    pub matchings_tried: usize,
    /// Largest closure produced by a single tuple.
    pub max_closure_size: usize,
    pub dominance_checks: usize,
    pub search: SearchStats,
}

#[derive(Clone, Debug)]
pub struct CcpReport {
    /// Fails with the violation whose closure pomset is least in canonical order.
    pub verdict: Verdict<ClosureWitness>,
    /// One violation per isomorphism class of closure pomset, in canonical order.
    pub violations: Vec<ClosureWitness>,
    pub stats: CcpStats,
}

impl CcpReport {
    pub fn holds(&self) -> bool {
        self.verdict.holds()
    }
}

fn closure_bound(e: ClosureError) -> BoundExceeded {
    match e {
        ClosureError::Bound(b) => b,
        ClosureError::SubjectMismatch { .. } => unreachable!("locals are projections"),
    }
}

/// Distinct local pomsets per participant, each tagged with the first
/// member it comes from.
type Slots = Vec<(Participant, Vec<(Pomset, String)>)>;

fn dedupe(items: impl IntoIterator<Item = (Pomset, String)>) -> Vec<(Pomset, String)> {
    let mut seen: BTreeMap<Pomset, String> = BTreeMap::new();
    for (p, name) in items {
        seen.entry(p).or_insert(name);
    }
    seen.into_iter().collect()
}

fn run(
    family: &PomsetFamily,
    slots: Slots,
    dominators: Vec<Pomset>,
    bound: usize,
) -> Result<CcpReport, BoundExceeded> {
    let mut stats = CcpStats::default();
    let mut by_labels: HashMap<Vec<CommLabel>, Vec<Pomset>> = HashMap::new();
    for d in dominators {
        by_labels.entry(d.label_multiset()).or_default().push(d);
    }
    let mut dominated: HashMap<Pomset, bool> = HashMap::new();
    let mut violations: BTreeMap<Pomset, ClosureWitness> = BTreeMap::new();
    let mut budget = Budget::new("closure tuples", bound);

    if family.is_empty() {
        return Ok(CcpReport {
            verdict: Verdict::Holds,
            violations: Vec::new(),
            stats,
        });
    }
    let mut choice = vec![0usize; slots.len()];
    loop {
        budget.spend()?;
        stats.tuples += 1;
        let locals: BTreeMap<Participant, Pomset> = slots
            .iter()
            .zip(&choice)
            .map(|((a, opts), &k)| (a.clone(), opts[k].0.clone()))
            .collect();
        let closure = inter_participant_closure(&locals, bound).map_err(closure_bound)?;
        stats.matchings_tried += closure.matchings_tried;
        stats.closure_pomsets += closure.len();
        stats.max_closure_size = stats.max_closure_size.max(closure.len());
        for c in closure.pomsets {
            let ok = *dominated.entry(c.pomset.clone()).or_insert_with(|| {
                by_labels
                    .get(&c.pomset.label_multiset())
                    .is_some_and(|cands| {
                        cands.iter().any(|d| {
                            stats.dominance_checks += 1;
                            less_permissive_counted(&c.pomset, d, &mut stats.search)
                        })
                    })
            });
            if !ok && !violations.contains_key(&c.pomset) {
                let tuple = slots
                    .iter()
                    .zip(&choice)
                    .map(|((a, opts), &k)| TupleSlot {
                        participant: a.clone(),
                        member: opts[k].1.clone(),
                        local: opts[k].0.clone(),
                    })
                    .collect();
                violations.insert(c.pomset.clone(), ClosureWitness { tuple, closure: c });
            }
        }
        // odometer over the tuple space
        let mut i = 0;
        loop {
            if i == choice.len() {
                let violations: Vec<ClosureWitness> = violations.into_values().collect();
                return Ok(CcpReport {
                    verdict: violations.first().cloned().into(),
                    violations,
                    stats,
                });
            }
            choice[i] += 1;
            if choice[i] < slots[i].1.len() {
                break;
            }
            choice[i] = 0;
            i += 1;
        }
    }
}

/// CCP2: every closure pomset of every tuple of member projections is less
/// permissive than some member.
pub fn check_ccp2(family: &PomsetFamily, bound: usize) -> Result<CcpReport, BoundExceeded> {
    let slots = family
        .participants()
        .iter()
        .map(|a| {
            let locals = dedupe(
                family
                    .members()
                    .iter()
                    .map(|m| (m.pomset.project(a), m.name.clone())),
            );
            (a.clone(), locals)
        })
        .collect();
    run(family, slots, family.pomsets().cloned().collect(), bound)
}

/// CCP3: every closure pomset of every tuple of projected member prefixes
/// is less permissive than some prefix of some member.
pub fn check_ccp3(family: &PomsetFamily, bound: usize) -> Result<CcpReport, BoundExceeded> {
    let mut slots = Vec::new();
    for a in family.participants() {
        let mut items = Vec::new();
        for m in family.members() {
            let proj = m.pomset.project(a);
            for ideal in order_ideals(&proj, bound)? {
                items.push((proj.restrict(&ideal), m.name.clone()));
            }
        }
        slots.push((a.clone(), dedupe(items)));
    }
    let mut dominators = Vec::new();
    for r in family.pomsets() {
        dominators.extend(prefixes(r, bound)?);
    }
    dominators.sort();
    dominators.dedup();
    run(family, slots, dominators, bound)
}
