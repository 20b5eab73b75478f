//! Communicating finite-state machines and their synthesis from languages.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::error::BoundExceeded;
use crate::family::PomsetFamily;
use crate::label::{CommLabel, Participant};
use crate::language::{linearizations, project_language, prefix_closure, Language, Word};

pub type StateId = usize;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CfsmError {
    #[error("machine of `{owner}` has a transition labelled `{label}` with another subject")]
    ForeignLabel { owner: Participant, label: CommLabel },
    #[error("machine of `{owner}` refers to state {state}, but has only {count} states")]
    UnknownState {
        owner: Participant,
        state: StateId,
        count: usize,
    },
    #[error("machine registered for `{key}` belongs to `{owner}`")]
    OwnerMismatch { key: Participant, owner: Participant },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transition {
    pub from: StateId,
    pub label: CommLabel,
    pub to: StateId,
}

/// A finite automaton over the actions of one participant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cfsm {
    owner: Participant,
    states: Vec<String>,
    initial: StateId,
    accepting: BTreeSet<StateId>,
    transitions: Vec<Transition>,
}

impl Cfsm {
    pub fn new(
        owner: Participant,
        states: Vec<String>,
        initial: StateId,
        accepting: BTreeSet<StateId>,
        transitions: Vec<Transition>,
    ) -> Result<Self, CfsmError> {
        let count = states.len();
        let unknown = |state| CfsmError::UnknownState {
            owner: owner.clone(),
            state,
            count,
        };
        if initial >= count {
            return Err(unknown(initial));
        }
        if let Some(&s) = accepting.iter().find(|&&s| s >= count) {
            return Err(unknown(s));
        }
        for t in &transitions {
            if t.from >= count || t.to >= count {
                return Err(unknown(t.from.max(t.to)));
            }
            if *t.label.subject() != owner {
                return Err(CfsmError::ForeignLabel {
                    owner: owner.clone(),
                    label: t.label.clone(),
                });
            }
        }
        Ok(Cfsm {
            owner,
            states,
            initial,
            accepting,
            transitions,
        })
    }

    pub fn owner(&self) -> &Participant {
        &self.owner
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn initial(&self) -> StateId {
        self.initial
    }

    pub fn is_accepting(&self, q: StateId) -> bool {
        self.accepting.contains(&q)
    }

    pub fn accepting(&self) -> &BTreeSet<StateId> {
        &self.accepting
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    pub fn outgoing(&self, q: StateId) -> impl Iterator<Item = &Transition> + '_ {
        self.transitions.iter().filter(move |t| t.from == q)
    }

    /// Whether no cycle is reachable, i.e. the machine is a finite DAG.
    pub fn is_acyclic(&self) -> bool {
        // repeatedly peel states without outgoing transitions
        let n = self.states.len();
        let mut out_deg = vec![0usize; n];
        let mut preds: Vec<Vec<StateId>> = vec![Vec::new(); n];
        for t in &self.transitions {
            out_deg[t.from] += 1;
            preds[t.to].push(t.from);
        }
        let mut stack: Vec<StateId> = (0..n).filter(|&q| out_deg[q] == 0).collect();
        let mut removed = 0;
        while let Some(q) = stack.pop() {
            removed += 1;
            for &p in &preds[q] {
                out_deg[p] -= 1;
                if out_deg[p] == 0 {
                    stack.push(p);
                }
            }
        }
        removed == n
    }
}

/// The prefix-tree machine of `a`: states are the prefixes of the projected
/// words, accepting exactly on projected words.
pub fn synthesize_cfsm(l: &Language, a: &Participant) -> Cfsm {
    let projected = project_language(l, a);
    let mut prefixes: Vec<Word> = prefix_closure(&projected).into_iter().collect();
    if prefixes.is_empty() {
        prefixes.push(Word::empty());
    }
    prefixes.sort_by(|u, v| u.len().cmp(&v.len()).then_with(|| u.cmp(v)));
    let index: BTreeMap<&Word, StateId> = prefixes.iter().enumerate().map(|(i, w)| (w, i)).collect();
    let mut transitions = Vec::new();
    for (to, w) in prefixes.iter().enumerate().skip(1) {
        let parent = w.prefix(w.len() - 1);
        transitions.push(Transition {
            from: index[&parent],
            label: w[w.len() - 1].clone(),
            to,
        });
    }
    transitions.sort_by(|s, t| (s.from, &s.label).cmp(&(t.from, &t.label)));
    let accepting = prefixes
        .iter()
        .enumerate()
        .filter(|(_, w)| projected.contains(*w))
        .map(|(i, _)| i)
        .collect();
    Cfsm::new(
        a.clone(),
        prefixes.iter().map(|w| w.to_string()).collect(),
        0,
        accepting,
        transitions,
    )
    .expect("prefix tree is well-formed")
}

/// A communicating system: one machine per participant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CommSystem {
    machines: BTreeMap<Participant, Cfsm>,
}

impl CommSystem {
    pub fn new(machines: BTreeMap<Participant, Cfsm>) -> Result<Self, CfsmError> {
        for (key, m) in &machines {
            if key != m.owner() {
                return Err(CfsmError::OwnerMismatch {
                    key: key.clone(),
                    owner: m.owner().clone(),
                });
            }
        }
        Ok(CommSystem { machines })
    }

    pub fn machines(&self) -> &BTreeMap<Participant, Cfsm> {
        &self.machines
    }

    pub fn participants(&self) -> impl Iterator<Item = &Participant> {
        self.machines.keys()
    }

    pub fn machine(&self, a: &Participant) -> Option<&Cfsm> {
        self.machines.get(a)
    }

    /// Position of `a` in the state vector of a configuration.
    pub fn position(&self, a: &Participant) -> Option<usize> {
        self.machines.keys().position(|p| p == a)
    }
}

/// `S(L)`: the prefix-tree machine of every participant.
pub fn synthesize_system(l: &Language, participants: &BTreeSet<Participant>) -> CommSystem {
    CommSystem::new(
        participants
            .iter()
            .map(|a| (a.clone(), synthesize_cfsm(l, a)))
            .collect(),
    )
    .expect("owners match by construction")
}

/// `S(L(R))` without listing `L(R)`: each projected language is the union
/// of the linearizations of the members' projections.
pub fn synthesize_family_system(family: &PomsetFamily, bound: usize) -> Result<CommSystem, BoundExceeded> {
    let mut machines = BTreeMap::new();
    for a in family.participants() {
        let mut local = Language::new();
        for r in family.pomsets() {
            local.extend(linearizations(&r.project(a), bound)?);
        }
        machines.insert(a.clone(), synthesize_cfsm(&local, a));
    }
    Ok(CommSystem::new(machines).expect("owners match by construction"))
}
