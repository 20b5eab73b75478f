//! Feasibility, CC2, CC3 and language-level termination.
//!
//! CC2 and CC3 are decided by exploring the product of one automaton per
//! participant (accepting that participant's projected language) with an
//! automaton for the language itself. Every product path spells a
//! well-formed word whose projections are prefixes of projected words; the
//! conditions fail exactly when such a path reaches a state the language
//! does not account for.
//!
//! Among violating words the reported witness minimises, in order, the
//! total number of in-flight messages summed over all steps and then the
//! label sequence. For CC3 shorter witnesses come first.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::error::{BoundExceeded, Budget};
use crate::family::PomsetFamily;
use crate::label::{Channel, CommLabel, Message, Participant};
use crate::verdict::Verdict;

use super::dfa::{IdealDfa, LabelDfa, Trie};
use super::{project_language, project_word, subjects, Language, Word};

type Buffers = BTreeMap<(Channel, Message), usize>;

/// Applies `l` to the buffers; `None` if `l` consumes a missing message.
fn apply(buffers: &Buffers, l: &CommLabel) -> Option<Buffers> {
    let key = (l.channel(), l.message.clone());
    let mut next = buffers.clone();
    if l.is_output() {
        *next.entry(key).or_default() += 1;
    } else {
        let c = next.get_mut(&key)?;
        *c -= 1;
        if *c == 0 {
            next.remove(&key);
        }
    }
    Some(next)
}

fn in_flight(buffers: &Buffers) -> u64 {
    buffers.values().map(|&c| c as u64).sum()
}

#[derive(Clone, PartialEq, Eq, Hash)]
struct Node<S, T> {
    locals: Vec<S>,
    global: Option<T>,
}

#[derive(Clone)]
struct Path {
    cost: u64,
    word: Vec<CommLabel>,
    buffers: Buffers,
}

impl Path {
    fn key(&self) -> (u64, &[CommLabel]) {
        (self.cost, &self.word)
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Goal {
    /// Complete words accepted by every participant but not by the language.
    Cc2,
    /// Words that leave the prefix closure of the language.
    Cc3,
}

fn keep_best(slot: &mut Option<Path>, cand: Path) {
    if slot.as_ref().is_none_or(|b| cand.key() < b.key()) {
        *slot = Some(cand);
    }
}

fn search<D: LabelDfa, G: LabelDfa>(
    locals: &[D],
    global: &G,
    goal: Goal,
    bound: usize,
) -> Result<Option<Word>, BoundExceeded> {
    if global.is_empty() {
        return Ok(None);
    }
    let mut budget = Budget::new("product states", bound);
    let start = Node {
        locals: locals.iter().map(|d| d.initial()).collect::<Vec<_>>(),
        global: Some(global.initial()),
    };
    let mut layer: HashMap<Node<D::State, G::State>, Path> = HashMap::from([(
        start,
        Path {
            cost: 0,
            word: Vec::new(),
            buffers: Buffers::new(),
        },
    )]);
    let mut best: Option<Path> = None;
    while !layer.is_empty() {
        if goal == Goal::Cc2 {
            for (node, path) in &layer {
                let implied = path.buffers.is_empty()
                    && node
                        .locals
                        .iter()
                        .zip(locals)
                        .all(|(s, d)| d.is_accepting(s));
                let known = node.global.as_ref().is_some_and(|g| global.is_accepting(g));
                if implied && !known {
                    keep_best(&mut best, path.clone());
                }
            }
        }
        let mut next: HashMap<Node<D::State, G::State>, Path> = HashMap::new();
        let mut violation: Option<Path> = None;
        for (node, path) in &layer {
            if goal == Goal::Cc3 && node.global.is_none() {
                continue;
            }
            for (i, d) in locals.iter().enumerate() {
                for (l, s2) in d.successors(&node.locals[i]) {
                    let Some(buffers) = apply(&path.buffers, &l) else {
                        continue;
                    };
                    let mut word = path.word.clone();
                    word.push(l.clone());
                    let cand = Path {
                        cost: path.cost + in_flight(&buffers),
                        word,
                        buffers,
                    };
                    let mut locals2 = node.locals.clone();
                    locals2[i] = s2;
                    let global2 = node.global.as_ref().and_then(|g| global.step(g, &l));
                    if goal == Goal::Cc3 && global2.is_none() {
                        keep_best(&mut violation, cand.clone());
                    }
                    let key = Node {
                        locals: locals2,
                        global: global2,
                    };
                    match next.get_mut(&key) {
                        Some(old) if old.key() <= cand.key() => {}
                        Some(old) => *old = cand,
                        None => {
                            budget.spend()?;
                            next.insert(key, cand);
                        }
                    }
                }
            }
        }
        if violation.is_some() {
            return Ok(violation.map(|p| Word::new(p.word)));
        }
        layer = next;
    }
    Ok(best.map(|p| Word::new(p.word)))
}

fn local_tries(l: &Language) -> Vec<Trie> {
    subjects(l)
        .iter()
        .map(|a| Trie::from_language(&project_language(l, a)))
        .collect()
}

fn local_automata(family: &PomsetFamily) -> Result<Vec<IdealDfa>, BoundExceeded> {
    let actors: BTreeSet<Participant> = family.pomsets().flat_map(|r| r.participants()).collect();
    actors
        .iter()
        .map(|a| {
            let projections: Vec<_> = family.pomsets().map(|r| r.project(a)).collect();
            IdealDfa::new(projections.iter())
        })
        .collect()
}

/// CC2: every well-formed, complete word whose projections all come from
/// words of `l` is in `l`. The witness is an implied word outside `l`.
pub fn check_cc2(l: &Language, bound: usize) -> Result<Verdict<Word>, BoundExceeded> {
    Ok(search(&local_tries(l), &Trie::from_language(l), Goal::Cc2, bound)?.into())
}

/// CC3: every well-formed word whose projections are prefixes of projected
/// words of `l` is a prefix of a word of `l`.
pub fn check_cc3(l: &Language, bound: usize) -> Result<Verdict<Word>, BoundExceeded> {
    Ok(search(&local_tries(l), &Trie::from_language(l), Goal::Cc3, bound)?.into())
}

/// [`check_cc2`] on the family's language, without listing its words.
pub fn check_cc2_family(
    family: &PomsetFamily,
    bound: usize,
) -> Result<Verdict<Word>, BoundExceeded> {
    let global = IdealDfa::new(family.pomsets())?;
    Ok(search(&local_automata(family)?, &global, Goal::Cc2, bound)?.into())
}

/// [`check_cc3`] on the family's language, without listing its words.
pub fn check_cc3_family(
    family: &PomsetFamily,
    bound: usize,
) -> Result<Verdict<Word>, BoundExceeded> {
    let global = IdealDfa::new(family.pomsets())?;
    Ok(search(&local_automata(family)?, &global, Goal::Cc3, bound)?.into())
}

/// All well-formed (and complete, if asked) words whose projection on each
/// participant of `participants`, and on each participant acting in `l`,
/// is the projection of some word of `l`.
pub fn feasible_words(
    l: &Language,
    participants: &BTreeSet<Participant>,
    complete_only: bool,
    bound: usize,
) -> Result<Language, BoundExceeded> {
    let mut out = Language::new();
    if l.is_empty() {
        return Ok(out);
    }
    let all: BTreeSet<Participant> = participants.union(&subjects(l)).cloned().collect();
    let tries: Vec<Trie> = all
        .iter()
        .map(|a| Trie::from_language(&project_language(l, a)))
        .collect();
    let mut budget = Budget::new("feasible words", bound);
    let mut nodes: Vec<usize> = vec![0; tries.len()];
    let mut word = Vec::new();
    feasible_walk(
        &tries,
        &mut nodes,
        &Buffers::new(),
        &mut word,
        complete_only,
        &mut out,
        &mut budget,
    )?;
    Ok(out)
}

fn feasible_walk(
    tries: &[Trie],
    nodes: &mut Vec<usize>,
    buffers: &Buffers,
    word: &mut Vec<CommLabel>,
    complete_only: bool,
    out: &mut Language,
    budget: &mut Budget,
) -> Result<(), BoundExceeded> {
    if nodes.iter().zip(tries).all(|(&n, t)| t.is_terminal(n))
        && (!complete_only || buffers.is_empty())
    {
        budget.spend()?;
        out.insert(Word::new(word.clone()));
    }
    for i in 0..tries.len() {
        let here = nodes[i];
        for (l, n2) in tries[i].successors(&here) {
            let Some(b2) = apply(buffers, &l) else {
                continue;
            };
            nodes[i] = n2;
            word.push(l);
            feasible_walk(tries, nodes, &b2, word, complete_only, out, budget)?;
            word.pop();
            nodes[i] = here;
        }
    }
    Ok(())
}

/// Two words of the language whose projections on `participant` are
/// `shorter` and `longer`, the first a proper prefix of the second, with an
/// input as the next action.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LanguageTerminationWitness {
    pub participant: Participant,
    pub word: Word,
    pub longer_word: Word,
    pub shorter: Word,
    pub longer: Word,
    pub next: CommLabel,
}

/// Whether no participant of `p` is termination-unaware for `l`.
pub fn check_language_terminating(
    l: &Language,
    p: &BTreeSet<Participant>,
) -> Verdict<LanguageTerminationWitness> {
    for a in p {
        let proj = project_language(l, a);
        for u in &proj {
            for v in proj.range(u.clone()..).skip(1) {
                if !u.is_prefix_of(v) {
                    break;
                }
                let next = &v[u.len()];
                if next.is_input() {
                    let find = |target: &Word| {
                        l.iter()
                            .find(|w| &project_word(w, a) == target)
                            .cloned()
                            .expect("projection comes from the language")
                    };
                    return Verdict::Fails(LanguageTerminationWitness {
                        participant: a.clone(),
                        word: find(u),
                        longer_word: find(v),
                        shorter: u.clone(),
                        longer: v.clone(),
                        next: next.clone(),
                    });
                }
            }
        }
    }
    Verdict::Holds
}
