//! Pomset-level termination awareness.
//!
//! Participant `a` is termination-unaware for a family when, for members
//! `r` and `r'`, a label-preserving injection `φ` from `r↾a` into `r'↾a`
//! makes the union of both orders a partial order and leaves an input among
//! the minimal events of `r'↾a` outside the image.
//!
//! Two readings of the side condition on the image are offered:
//!
//! * [`TerminationRule::Prefix`] (default) asks the image to be an order
//!   ideal of `r'↾a`, so `r↾a`'s behaviour is a prefix of `r'↾a`'s.
//! * [`TerminationRule::Literal`] asks instead that the minimal events of
//!   the union order all lie in the image of `r↾a`'s minimal events. This
//!   misses participants with nothing to do in `r` (empty `r↾a`), so it is
//!   not sound with respect to language-level termination.

use std::collections::BTreeSet;

use fixedbitset::FixedBitSet;
use thiserror::Error;

use crate::error::{BoundExceeded, Budget};
use crate::family::PomsetFamily;
use crate::label::{CommLabel, Participant};
use crate::pomset::{EventId, Pomset};
use crate::verdict::Verdict;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum TerminationRule {
    #[default]
    Prefix,
    Literal,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TerminationWitness {
    pub participant: Participant,
    pub r: String,
    pub r_prime: String,
    /// `φ`, from events of `r↾a` to events of `r'↾a`.
    pub injection: Vec<(EventId, EventId)>,
    /// A minimal residual event of `r'↾a` carrying an input.
    pub blocking_event: EventId,
    pub blocking_label: CommLabel,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid termination witness: {0}")]
pub struct InvalidWitness(pub String);

/// The union order on the events of `q`, or `None` if it has a cycle.
fn union_order(p: &Pomset, q: &Pomset, phi: &[usize]) -> Option<Pomset> {
    let edges = q
        .order_pairs()
        .into_iter()
        .chain(p.order_pairs().into_iter().map(|(x, y)| (phi[x], phi[y])));
    Pomset::from_indexed(q.events().to_vec(), edges).ok()
}

/// Minimal events of `set` under `order`.
fn minimal_in(order: &Pomset, set: &FixedBitSet) -> Vec<usize> {
    set.ones()
        .filter(|&x| !order.below(x).ones().any(|y| set[y]))
        .collect()
}

/// Blocking event for `φ` under `rule`, if `φ` is a witness.
fn blocking(p: &Pomset, q: &Pomset, phi: &[usize], rule: TerminationRule) -> Option<usize> {
    let order = union_order(p, q, phi)?;
    let mut image = FixedBitSet::with_capacity(q.len());
    phi.iter().for_each(|&e| image.insert(e));
    match rule {
        TerminationRule::Prefix => {
            if !image.ones().all(|e| q.below(e).is_subset(&image)) {
                return None;
            }
        }
        TerminationRule::Literal => {
            let mut all = FixedBitSet::with_capacity(q.len());
            all.insert_range(..);
            let min_image: BTreeSet<usize> = p.minimal().into_iter().map(|x| phi[x]).collect();
            if !minimal_in(&order, &all)
                .iter()
                .all(|e| min_image.contains(e))
            {
                return None;
            }
        }
    }
    let mut residual = image;
    residual.toggle_range(..);
    minimal_in(&order, &residual)
        .into_iter()
        .find(|&x| q.label(x).is_input())
}

struct Injections<'a> {
    p: &'a Pomset,
    q: &'a Pomset,
    order: Vec<usize>,
    rule: TerminationRule,
    phi: Vec<usize>,
    used: FixedBitSet,
    budget: Budget,
}

impl Injections<'_> {
    fn search(&mut self, k: usize) -> Result<Option<usize>, BoundExceeded> {
        self.budget.spend()?;
        if k == self.order.len() {
            return Ok(blocking(self.p, self.q, &self.phi, self.rule));
        }
        let f = self.order[k];
        for e in 0..self.q.len() {
            if self.used[e] || self.q.label(e) != self.p.label(f) {
                continue;
            }
            // an assigned predecessor of f must not sit above e in q
            if self.p.below(f).ones().any(|g| self.q.lt(e, self.phi[g])) {
                continue;
            }
            if self.rule == TerminationRule::Prefix {
                let mut need = self.q.below(e).clone();
                need.union_with(&self.used);
                need.insert(e);
                if need.count_ones(..) > self.p.len() {
                    continue;
                }
            }
            self.phi[f] = e;
            self.used.insert(e);
            if let Some(b) = self.search(k + 1)? {
                return Ok(Some(b));
            }
            self.used.set(e, false);
        }
        Ok(None)
    }
}

/// Injection and blocking event for one ordered pair of projections.
fn find_injection(
    p: &Pomset,
    q: &Pomset,
    rule: TerminationRule,
    bound: usize,
) -> Result<Option<(Vec<usize>, usize)>, BoundExceeded> {
    if p.len() >= q.len() {
        return Ok(None);
    }
    let mut want = q.label_multiset();
    for l in p.label_multiset() {
        match want.iter().position(|m| *m == l) {
            Some(i) => {
                want.remove(i);
            }
            None => return Ok(None),
        }
    }
    let mut s = Injections {
        p,
        q,
        order: p.topological_order(),
        rule,
        phi: vec![usize::MAX; p.len()],
        used: FixedBitSet::with_capacity(q.len()),
        budget: Budget::new("injection search nodes", bound),
    };
    Ok(s.search(0)?.map(|b| (s.phi, b)))
}

/// A witness that `a` is termination-unaware for `family`, under the
/// default rule.
pub fn termination_unaware(
    family: &PomsetFamily,
    a: &Participant,
    bound: usize,
) -> Result<Option<TerminationWitness>, BoundExceeded> {
    termination_unaware_with(family, a, TerminationRule::default(), bound)
}

pub fn termination_unaware_with(
    family: &PomsetFamily,
    a: &Participant,
    rule: TerminationRule,
    bound: usize,
) -> Result<Option<TerminationWitness>, BoundExceeded> {
    let projections: Vec<Pomset> = family.pomsets().map(|r| r.project(a)).collect();
    for (i, p) in projections.iter().enumerate() {
        for (j, q) in projections.iter().enumerate() {
            if let Some((phi, b)) = find_injection(p, q, rule, bound)? {
                let members = family.members();
                return Ok(Some(TerminationWitness {
                    participant: a.clone(),
                    r: members[i].name.clone(),
                    r_prime: members[j].name.clone(),
                    injection: phi
                        .iter()
                        .enumerate()
                        .map(|(x, &y)| (p.id(x).clone(), q.id(y).clone()))
                        .collect(),
                    blocking_event: q.id(b).clone(),
                    blocking_label: q.label(b).clone(),
                }));
            }
        }
    }
    Ok(None)
}

/// Holds when no participant of `p` is termination-unaware.
pub fn check_pomset_terminating(
    family: &PomsetFamily,
    p: &BTreeSet<Participant>,
    bound: usize,
) -> Result<Verdict<TerminationWitness>, BoundExceeded> {
    check_pomset_terminating_with(family, p, TerminationRule::default(), bound)
}

pub fn check_pomset_terminating_with(
    family: &PomsetFamily,
    p: &BTreeSet<Participant>,
    rule: TerminationRule,
    bound: usize,
) -> Result<Verdict<TerminationWitness>, BoundExceeded> {
    for a in p {
        if let Some(w) = termination_unaware_with(family, a, rule, bound)? {
            return Ok(Verdict::Fails(w));
        }
    }
    Ok(Verdict::Holds)
}

impl TerminationWitness {
    /// Replays the witness against `family`.
    pub fn verify(&self, family: &PomsetFamily, rule: TerminationRule) -> Result<(), InvalidWitness> {
        let bad = |m: &str| Err(InvalidWitness(m.to_string()));
        let (Some(r), Some(r2)) = (family.get(&self.r), family.get(&self.r_prime)) else {
            return bad("unknown member");
        };
        let p = r.project(&self.participant);
        let q = r2.project(&self.participant);
        if self.injection.len() != p.len() {
            return bad("injection is not total");
        }
        let mut phi = vec![usize::MAX; p.len()];
        let mut seen = BTreeSet::new();
        for (x, y) in &self.injection {
            let (Some(i), Some(j)) = (p.index_of(x), q.index_of(y)) else {
                return bad("injection names unknown events");
            };
            if p.label(i) != q.label(j) {
                return bad("injection does not preserve labels");
            }
            if !seen.insert(j) {
                return bad("injection is not injective");
            }
            phi[i] = j;
        }
        if union_order(&p, &q, &phi).is_none() {
            return bad("union of the orders has a cycle");
        }
        let Some(b) = q.index_of(&self.blocking_event) else {
            return bad("unknown blocking event");
        };
        if !q.label(b).is_input() || *q.label(b) != self.blocking_label {
            return bad("blocking event is not the claimed input");
        }
        if seen.contains(&b) {
            return bad("blocking event lies in the image");
        }
        let order = union_order(&p, &q, &phi).expect("checked above");
        let mut residual = FixedBitSet::with_capacity(q.len());
        residual.insert_range(..);
        seen.iter().for_each(|&j| residual.set(j, false));
        if !minimal_in(&order, &residual).contains(&b) {
            return bad("blocking event is not minimal in the residual");
        }
        if blocking(&p, &q, &phi, rule).is_none() {
            return bad("image condition fails");
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn l(s: &str) -> CommLabel {
        s.parse().unwrap()
    }

    fn fig2() -> PomsetFamily {
        let ra = Pomset::new([("a1", l("AB!x")), ("b1", l("AB?x"))], [("a1", "b1")]).unwrap();
        let rb = Pomset::new(
            [
                ("a1", l("AB!x")),
                ("a2", l("AB!y")),
                ("b1", l("AB?x")),
                ("b2", l("AB?y")),
                ("b3", l("BC!z")),
                ("c1", l("BC?z")),
            ],
            [
                ("a1", "a2"),
                ("a1", "b1"),
                ("a2", "b2"),
                ("b1", "b2"),
                ("b2", "b3"),
                ("b3", "c1"),
            ],
        )
        .unwrap();
        PomsetFamily::from_pomsets([ra, rb])
    }

    #[test]
    fn receivers_are_unaware_sender_is_not() {
        let f = fig2();
        assert!(termination_unaware(&f, &"A".into(), 1000).unwrap().is_none());
        let wb = termination_unaware(&f, &"B".into(), 1000).unwrap().unwrap();
        assert_eq!(wb.blocking_label, l("AB?y"));
        wb.verify(&f, TerminationRule::Prefix).unwrap();
        let wc = termination_unaware(&f, &"C".into(), 1000).unwrap().unwrap();
        assert_eq!(wc.blocking_label, l("BC?z"));
        assert!(wc.injection.is_empty());
    }

    #[test]
    fn literal_rule_misses_idle_participants() {
        let f = fig2();
        let c: Participant = "C".into();
        assert!(termination_unaware_with(&f, &c, TerminationRule::Literal, 1000)
            .unwrap()
            .is_none());
        let b: Participant = "B".into();
        let w = termination_unaware_with(&f, &b, TerminationRule::Literal, 1000)
            .unwrap()
            .unwrap();
        w.verify(&f, TerminationRule::Literal).unwrap();
    }

    #[test]
    fn singleton_families_are_terminating() {
        let f = PomsetFamily::from_pomsets([fig2().members()[1].pomset.clone()]);
        let all: BTreeSet<Participant> = ["A", "B", "C"].map(Participant::new).into();
        assert!(check_pomset_terminating(&f, &all, 1000).unwrap().holds());
        assert!(check_pomset_terminating(&fig2(), &BTreeSet::new(), 1000)
            .unwrap()
            .holds());
    }

    #[test]
    fn tampered_witness_is_rejected() {
        let f = fig2();
        let mut w = termination_unaware(&f, &"B".into(), 1000).unwrap().unwrap();
        w.blocking_event = EventId::new("b3");
        assert!(w.verify(&f, TerminationRule::Prefix).is_err());
    }
}
