//! Execution of communicating systems.
//!
//! Channels are unordered: each buffer is a multiset of messages, so an
//! input may consume any pending copy of its message, regardless of the
//! order in which messages were sent.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;

use thiserror::Error;

use crate::cfsm::{CommSystem, StateId};
use crate::error::{BoundExceeded, Budget};
use crate::family::PomsetFamily;
use crate::label::{Channel, CommLabel, Message, Participant};
use crate::language::{dfa_includes, IdealDfa, LabelDfa, Language, Word};
use crate::verdict::Verdict;

/// Local states (in participant order) and channel contents.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Configuration {
    pub states: Vec<StateId>,
    /// Only non-zero counts are stored.
    pub buffers: BTreeMap<Channel, BTreeMap<Message, usize>>,
}

impl Configuration {
    pub fn initial(system: &CommSystem) -> Self {
        Configuration {
            states: system.machines().values().map(|m| m.initial()).collect(),
            buffers: BTreeMap::new(),
        }
    }

    pub fn buffer_count(&self, channel: &Channel, message: &Message) -> usize {
        self.buffers
            .get(channel)
            .and_then(|b| b.get(message))
            .copied()
            .unwrap_or(0)
    }

    pub fn buffers_empty(&self) -> bool {
        self.buffers.is_empty()
    }

    fn max_buffer(&self) -> usize {
        self.buffers
            .values()
            .flat_map(|b| b.values())
            .copied()
            .max()
            .unwrap_or(0)
    }

    /// All buffers empty and every local state accepting.
    pub fn is_accepting(&self, system: &CommSystem) -> bool {
        self.buffers_empty()
            && system
                .machines()
                .values()
                .zip(&self.states)
                .all(|(m, &q)| m.is_accepting(q))
    }

    fn with_label(&self, l: &CommLabel) -> Option<Configuration> {
        let mut next = self.clone();
        let channel = l.channel();
        if l.is_output() {
            *next
                .buffers
                .entry(channel)
                .or_default()
                .entry(l.message.clone())
                .or_default() += 1;
        } else {
            let buf = next.buffers.get_mut(&channel)?;
            let c = buf.get_mut(&l.message)?;
            *c -= 1;
            if *c == 0 {
                buf.remove(&l.message);
                if buf.is_empty() {
                    next.buffers.remove(&channel);
                }
            }
        }
        Some(next)
    }
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<")?;
        for (i, q) in self.states.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{q}")?;
        }
        write!(f, " |")?;
        for (ch, b) in &self.buffers {
            for (m, c) in b {
                write!(f, " {ch}:{m}x{c}")?;
            }
        }
        write!(f, ">")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StepError {
    #[error("no machine for participant `{0}`")]
    UnknownParticipant(Participant),
    #[error("`{participant}` has no `{label}` transition from state {state}")]
    NoTransition {
        participant: Participant,
        label: CommLabel,
        state: StateId,
    },
    #[error("`{participant}` has several `{label}` transitions from state {state}")]
    Nondeterministic {
        participant: Participant,
        label: CommLabel,
        state: StateId,
    },
    #[error("no `{}` message pending on channel {}", .0.message, .0.channel())]
    EmptyBuffer(CommLabel),
}

/// Fires `l` from `s`: outputs enqueue, inputs consume a pending copy.
pub fn step(system: &CommSystem, s: &Configuration, l: &CommLabel) -> Result<Configuration, StepError> {
    let a = l.subject();
    let pos = system
        .position(a)
        .ok_or_else(|| StepError::UnknownParticipant(a.clone()))?;
    let m = &system.machines()[a];
    let q = s.states[pos];
    let targets: Vec<StateId> = m.outgoing(q).filter(|t| t.label == *l).map(|t| t.to).collect();
    let to = match targets.as_slice() {
        [] => {
            return Err(StepError::NoTransition {
                participant: a.clone(),
                label: l.clone(),
                state: q,
            })
        }
        [t] => *t,
        _ => {
            return Err(StepError::Nondeterministic {
                participant: a.clone(),
                label: l.clone(),
                state: q,
            })
        }
    };
    let mut next = s
        .with_label(l)
        .ok_or_else(|| StepError::EmptyBuffer(l.clone()))?;
    next.states[pos] = to;
    Ok(next)
}

/// Every transition enabled in `s`, in participant then transition order.
pub fn successors(system: &CommSystem, s: &Configuration) -> Vec<(CommLabel, Configuration)> {
    let mut out = Vec::new();
    for (pos, m) in system.machines().values().enumerate() {
        for t in m.outgoing(s.states[pos]) {
            if let Some(mut next) = s.with_label(&t.label) {
                next.states[pos] = t.to;
                out.push((t.label.clone(), next));
            }
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExploreLimits {
    pub max_configurations: usize,
    /// Largest count allowed for one message on one channel.
    pub max_buffer: usize,
}

impl Default for ExploreLimits {
    fn default() -> Self {
        ExploreLimits {
            max_configurations: 1_000_000,
            max_buffer: 64,
        }
    }
}

/// The reachable part of a system's configuration space.
#[derive(Clone, Debug)]
pub struct ConfigGraph {
    /// Configurations in breadth-first order; index 0 is initial.
    pub nodes: Vec<Configuration>,
    pub edges: Vec<(usize, CommLabel, usize)>,
    pub accepting: Vec<bool>,
    /// No accepting configuration is reachable from the node.
    pub deadlock: Vec<bool>,
    parent: Vec<Option<(usize, CommLabel)>>,
}

impl ConfigGraph {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn accepting_count(&self) -> usize {
        self.accepting.iter().filter(|&&b| b).count()
    }

    pub fn deadlocks(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.deadlock[i]).collect()
    }

    /// A shortest label sequence from the initial configuration to `node`.
    pub fn trace_to(&self, mut node: usize) -> Word {
        let mut labels = Vec::new();
        while let Some((p, l)) = &self.parent[node] {
            labels.push(l.clone());
            node = *p;
        }
        labels.reverse();
        Word::new(labels)
    }

    fn out_edges(&self) -> Vec<Vec<(CommLabel, usize)>> {
        let mut out = vec![Vec::new(); self.len()];
        for (s, l, t) in &self.edges {
            out[*s].push((l.clone(), *t));
        }
        out
    }
}

/// Breadth-first exploration from the initial configuration.
pub fn reachable(system: &CommSystem, limits: &ExploreLimits) -> Result<ConfigGraph, BoundExceeded> {
    let init = Configuration::initial(system);
    let mut index: HashMap<Configuration, usize> = HashMap::from([(init.clone(), 0)]);
    let mut nodes = vec![init];
    let mut parent = vec![None];
    let mut edges = Vec::new();
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        for (l, next) in successors(system, &nodes[i]) {
            if next.max_buffer() > limits.max_buffer {
                return Err(BoundExceeded::new("messages per buffer", limits.max_buffer));
            }
            let j = match index.get(&next) {
                Some(&j) => j,
                None => {
                    if nodes.len() >= limits.max_configurations {
                        return Err(BoundExceeded::new(
                            "configurations",
                            limits.max_configurations,
                        ));
                    }
                    let j = nodes.len();
                    index.insert(next.clone(), j);
                    nodes.push(next);
                    parent.push(Some((i, l.clone())));
                    queue.push_back(j);
                    j
                }
            };
            edges.push((i, l, j));
        }
    }
    let accepting: Vec<bool> = nodes.iter().map(|c| c.is_accepting(system)).collect();
    // backward reachability from accepting configurations
    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); nodes.len()];
    for (s, _, t) in &edges {
        preds[*t].push(*s);
    }
    let mut live = accepting.clone();
    let mut stack: Vec<usize> = (0..nodes.len()).filter(|&i| accepting[i]).collect();
    while let Some(t) = stack.pop() {
        for &s in &preds[t] {
            if !live[s] {
                live[s] = true;
                stack.push(s);
            }
        }
    }
    Ok(ConfigGraph {
        nodes,
        edges,
        accepting,
        deadlock: live.iter().map(|&b| !b).collect(),
        parent,
    })
}

/// Label sequences leading from the initial to an accepting configuration.
/// The bound caps the number of path steps explored, which also stops
/// enumeration on cyclic systems.
pub fn system_language(
    system: &CommSystem,
    limits: &ExploreLimits,
    bound: usize,
) -> Result<Language, BoundExceeded> {
    let graph = reachable(system, limits)?;
    let out = graph.out_edges();
    let mut lang = Language::new();
    let mut budget = Budget::new("system path steps", bound);
    let mut word = Vec::new();
    paths(&graph, &out, 0, &mut word, &mut lang, &mut budget)?;
    Ok(lang)
}

fn paths(
    graph: &ConfigGraph,
    out: &[Vec<(CommLabel, usize)>],
    node: usize,
    word: &mut Vec<CommLabel>,
    lang: &mut Language,
    budget: &mut Budget,
) -> Result<(), BoundExceeded> {
    budget.spend()?;
    if graph.accepting[node] {
        lang.insert(Word::new(word.clone()));
    }
    for (l, next) in &out[node] {
        if graph.deadlock[*next] {
            continue;
        }
        word.push(l.clone());
        paths(graph, out, *next, word, lang, budget)?;
        word.pop();
    }
    Ok(())
}

/// The configuration graph restricted to nodes that can still terminate.
/// Synthesized systems are deterministic, so this is a deterministic
/// automaton whose states all reach acceptance.
struct LiveGraph<'a> {
    graph: &'a ConfigGraph,
    out: Vec<Vec<(CommLabel, usize)>>,
}

impl<'a> LiveGraph<'a> {
    fn new(graph: &'a ConfigGraph) -> Self {
        let mut out = graph.out_edges();
        for succ in &mut out {
            succ.retain(|(_, t)| !graph.deadlock[*t]);
            succ.sort();
        }
        LiveGraph { graph, out }
    }
}

impl LabelDfa for LiveGraph<'_> {
    type State = usize;

    fn initial(&self) -> usize {
        0
    }

    fn is_accepting(&self, s: &usize) -> bool {
        self.graph.accepting[*s]
    }

    fn successors(&self, s: &usize) -> Vec<(CommLabel, usize)> {
        self.out[*s].clone()
    }

    fn is_empty(&self) -> bool {
        self.graph.deadlock[0]
    }
}

/// Whether the system accepts exactly the language of `family`, compared
/// on automata rather than word lists. Requires a system whose machines
/// are deterministic, such as a synthesized one.
pub fn accepts_family_language(
    system: &CommSystem,
    family: &PomsetFamily,
    limits: &ExploreLimits,
    bound: usize,
) -> Result<bool, BoundExceeded> {
    let graph = reachable(system, limits)?;
    let live = LiveGraph::new(&graph);
    let ideals = IdealDfa::new(family.pomsets())?;
    Ok(dfa_includes(&live, &ideals, bound)? && dfa_includes(&ideals, &live, bound)?)
}

/// A reachable accepting configuration in which `participant` could still
/// take an input.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SystemTerminationWitness {
    pub participant: Participant,
    pub configuration: Configuration,
    pub trace: Word,
    pub pending: CommLabel,
}

/// Holds when no participant of `p` is termination-unaware in `system`.
pub fn check_system_termination_aware(
    system: &CommSystem,
    p: &BTreeSet<Participant>,
    limits: &ExploreLimits,
) -> Result<Verdict<SystemTerminationWitness>, BoundExceeded> {
    let graph = reachable(system, limits)?;
    for a in p {
        let (Some(pos), Some(m)) = (system.position(a), system.machine(a)) else {
            continue;
        };
        for (i, c) in graph.nodes.iter().enumerate() {
            if !graph.accepting[i] {
                continue;
            }
            if let Some(t) = m.outgoing(c.states[pos]).find(|t| t.label.is_input()) {
                return Ok(Verdict::Fails(SystemTerminationWitness {
                    participant: a.clone(),
                    configuration: c.clone(),
                    trace: graph.trace_to(i),
                    pending: t.label.clone(),
                }));
            }
        }
    }
    Ok(Verdict::Holds)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cfsm::synthesize_system;

    fn lang(ws: &[&str]) -> Language {
        ws.iter().map(|s| s.parse().unwrap()).collect()
    }

    fn l(s: &str) -> CommLabel {
        s.parse().unwrap()
    }

    fn ab() -> CommSystem {
        synthesize_system(&lang(&["AB!x·AB?x"]), &["A".into(), "B".into()].into())
    }

    #[test]
    fn stepping() {
        let s = ab();
        let c0 = Configuration::initial(&s);
        let c1 = step(&s, &c0, &l("AB!x")).unwrap();
        let ch = l("AB!x").channel();
        assert_eq!(c1.buffer_count(&ch, &"x".into()), 1);
        let c2 = step(&s, &c1, &l("AB?x")).unwrap();
        assert!(c2.buffers_empty());
        assert!(c2.is_accepting(&s));
        assert_eq!(
            step(&s, &c0, &l("AB?x")).unwrap_err(),
            StepError::EmptyBuffer(l("AB?x"))
        );
        assert!(matches!(
            step(&s, &c0, &l("AB!y")),
            Err(StepError::NoTransition { .. })
        ));
    }

    #[test]
    fn exploration() {
        let g = reachable(&ab(), &ExploreLimits::default()).unwrap();
        assert_eq!(g.len(), 3);
        assert_eq!(g.accepting_count(), 1);
        assert!(g.deadlocks().is_empty());
        assert_eq!(
            system_language(&ab(), &ExploreLimits::default(), 1000).unwrap(),
            lang(&["AB!x·AB?x"])
        );
    }

    #[test]
    fn empty_language_deadlocks() {
        let s = synthesize_system(&Language::new(), &["A".into(), "B".into()].into());
        let g = reachable(&s, &ExploreLimits::default()).unwrap();
        assert_eq!(g.len(), 1);
        assert_eq!(g.accepting_count(), 0);
        assert_eq!(g.deadlocks(), vec![0]);
    }

    #[test]
    fn receiver_left_waiting() {
        let l_ = lang(&["AB!x·AB?x", "AB!x·AB?x·AB!y·AB?y"]);
        let s = synthesize_system(&l_, &["A".into(), "B".into()].into());
        let lim = ExploreLimits::default();
        assert!(check_system_termination_aware(&s, &["A".into()].into(), &lim)
            .unwrap()
            .holds());
        let v = check_system_termination_aware(&s, &["B".into()].into(), &lim).unwrap();
        assert_eq!(v.witness().unwrap().pending, l("AB?y"));
    }

    #[test]
    fn automaton_comparison_agrees_with_word_lists() {
        use crate::cfsm::synthesize_family_system;
        use crate::language::language;
        use crate::random::{seeded_family, RandomConfig};
        let lim = ExploreLimits::default();
        let (mut same, mut differ) = (0, 0);
        for i in 0..80 {
            let f = seeded_family(5, i, &RandomConfig::default());
            let s = synthesize_family_system(&f, 100_000).unwrap();
            let by_words = system_language(&s, &lim, 1_000_000).unwrap() == language(&f, 100_000).unwrap();
            assert_eq!(accepts_family_language(&s, &f, &lim, 1_000_000).unwrap(), by_words);
            if by_words { same += 1 } else { differ += 1 }
        }
        assert!(same > 0 && differ > 0);
    }

    #[test]
    fn buffer_cap() {
        let l_ = lang(&["AB!x·AB!x·AB!x·AB?x·AB?x·AB?x"]);
        let s = synthesize_system(&l_, &["A".into(), "B".into()].into());
        let lim = ExploreLimits {
            max_configurations: 100,
            max_buffer: 2,
        };
        assert!(reachable(&s, &lim).is_err());
    }
}
