use std::collections::{HashMap, HashSet, VecDeque};

use fixedbitset::FixedBitSet;

use crate::error::{BoundExceeded, Budget};
use crate::family::PomsetFamily;
use crate::label::CommLabel;
use crate::pomset::Pomset;

use super::dfa::{IdealDfa, LabelDfa};
use super::{Language, Word};

/// Words of all linear extensions of `r`. The bound caps the number of
/// extensions visited, so repeated labels still count towards it.
pub fn linearizations(r: &Pomset, bound: usize) -> Result<Language, BoundExceeded> {
    let mut out = Language::new();
    let mut budget = Budget::new("linearizations", bound);
    extend(r, &mut out, &mut budget)?;
    Ok(out)
}

fn extend(r: &Pomset, out: &mut Language, budget: &mut Budget) -> Result<(), BoundExceeded> {
    let mut done = FixedBitSet::with_capacity(r.len());
    let mut word = Vec::with_capacity(r.len());
    walk(r, &mut done, &mut word, out, budget)
}

fn walk(
    r: &Pomset,
    done: &mut FixedBitSet,
    word: &mut Vec<CommLabel>,
    out: &mut Language,
    budget: &mut Budget,
) -> Result<(), BoundExceeded> {
    if word.len() == r.len() {
        budget.spend()?;
        out.insert(Word::new(word.clone()));
        return Ok(());
    }
    for e in 0..r.len() {
        if !done[e] && r.below(e).is_subset(done) {
            done.insert(e);
            word.push(r.label(e).clone());
            walk(r, done, word, out, budget)?;
            word.pop();
            done.set(e, false);
        }
    }
    Ok(())
}

/// The union of the members' linearizations.
pub fn language(family: &PomsetFamily, bound: usize) -> Result<Language, BoundExceeded> {
    let mut out = Language::new();
    let mut budget = Budget::new("linearizations", bound);
    for r in family.pomsets() {
        extend(r, &mut out, &mut budget)?;
    }
    Ok(out)
}

/// Number of linear extensions of `r`, by dynamic programming over order
/// ideals rather than enumeration.
pub fn linear_extension_count(r: &Pomset) -> u128 {
    let mut memo: HashMap<FixedBitSet, u128> = HashMap::new();
    count_from(r, FixedBitSet::with_capacity(r.len()), &mut memo)
}

fn count_from(r: &Pomset, ideal: FixedBitSet, memo: &mut HashMap<FixedBitSet, u128>) -> u128 {
    if ideal.count_ones(..) == r.len() {
        return 1;
    }
    if let Some(&c) = memo.get(&ideal) {
        return c;
    }
    let mut total = 0;
    for e in 0..r.len() {
        if !ideal[e] && r.below(e).is_subset(&ideal) {
            let mut next = ideal.clone();
            next.insert(e);
            total += count_from(r, next, memo);
        }
    }
    memo.insert(ideal, total);
    total
}

/// Number of distinct words in the family's language, without listing
/// them. The bound caps the number of automaton states visited.
pub fn count_words(family: &PomsetFamily, bound: usize) -> Result<u128, BoundExceeded> {
    let dfa = IdealDfa::new(family.pomsets())?;
    if dfa.is_empty() {
        return Ok(0);
    }
    let mut memo = HashMap::new();
    let mut budget = Budget::new("automaton states", bound);
    paths(&dfa, dfa.initial(), &mut memo, &mut budget)
}

fn paths<D: LabelDfa>(
    dfa: &D,
    s: D::State,
    memo: &mut HashMap<D::State, u128>,
    budget: &mut Budget,
) -> Result<u128, BoundExceeded> {
    if let Some(&c) = memo.get(&s) {
        return Ok(c);
    }
    budget.spend()?;
    let mut total = u128::from(dfa.is_accepting(&s));
    for (_, t) in dfa.successors(&s) {
        total += paths(dfa, t, memo, budget)?;
    }
    memo.insert(s, total);
    Ok(total)
}

/// Whether every word accepted by `a` is accepted by `b`.
pub(crate) fn dfa_includes<A: LabelDfa, B: LabelDfa>(
    a: &A,
    b: &B,
    bound: usize,
) -> Result<bool, BoundExceeded> {
    if a.is_empty() {
        return Ok(true);
    }
    if b.is_empty() {
        return Ok(false);
    }
    let mut budget = Budget::new("automaton states", bound);
    let start = (a.initial(), b.initial());
    let mut seen = HashSet::from([start.clone()]);
    let mut queue = VecDeque::from([start]);
    while let Some((s, t)) = queue.pop_front() {
        budget.spend()?;
        if a.is_accepting(&s) && !b.is_accepting(&t) {
            return Ok(false);
        }
        for (l, s2) in a.successors(&s) {
            // every live state of `a` reaches acceptance, so a missing
            // move in `b` is a counterexample
            let Some(t2) = b.step(&t, &l) else {
                return Ok(false);
            };
            if seen.insert((s2.clone(), t2.clone())) {
                queue.push_back((s2, t2));
            }
        }
    }
    Ok(true)
}

/// `L(a) ⊆ L(b)`, decided on the ideal automata.
pub fn language_includes(
    a: &PomsetFamily,
    b: &PomsetFamily,
    bound: usize,
) -> Result<bool, BoundExceeded> {
    dfa_includes(&IdealDfa::new(a.pomsets())?, &IdealDfa::new(b.pomsets())?, bound)
}

/// `L(a) = L(b)`, decided on the ideal automata.
pub fn languages_equal(
    a: &PomsetFamily,
    b: &PomsetFamily,
    bound: usize,
) -> Result<bool, BoundExceeded> {
    Ok(language_includes(a, b, bound)? && language_includes(b, a, bound)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn l(s: &str) -> CommLabel {
        s.parse().unwrap()
    }

    fn chain() -> Pomset {
        Pomset::new([("a", l("AB!x")), ("b", l("AB?x"))], [("a", "b")]).unwrap()
    }

    fn anti() -> Pomset {
        Pomset::new([("a", l("AB!x")), ("b", l("CD!y"))], Vec::<(&str, &str)>::new()).unwrap()
    }

    #[test]
    fn small_counts() {
        assert_eq!(linearizations(&chain(), 10).unwrap().len(), 1);
        assert_eq!(linearizations(&anti(), 10).unwrap().len(), 2);
        assert_eq!(linear_extension_count(&anti()), 2);
        assert_eq!(linear_extension_count(&Pomset::empty()), 1);
        assert_eq!(
            linearizations(&Pomset::empty(), 10).unwrap(),
            [Word::empty()].into_iter().collect()
        );
    }

    #[test]
    fn family_language() {
        let f = PomsetFamily::from_pomsets([chain()]);
        let lang = language(&f, 10).unwrap();
        assert_eq!(lang, ["AB!x·AB?x".parse().unwrap()].into_iter().collect());
        assert!(language(&PomsetFamily::default(), 10).unwrap().is_empty());
        assert_eq!(count_words(&f, 100).unwrap(), 1);
        assert_eq!(count_words(&PomsetFamily::default(), 100).unwrap(), 0);
    }

    #[test]
    fn repeated_labels_collapse_words() {
        let r = Pomset::new([("a", l("AB!x")), ("b", l("AB!x"))], Vec::<(&str, &str)>::new())
            .unwrap();
        assert_eq!(linear_extension_count(&r), 2);
        assert_eq!(linearizations(&r, 10).unwrap().len(), 1);
        assert_eq!(count_words(&PomsetFamily::from_pomsets([r]), 100).unwrap(), 1);
    }

    #[test]
    fn bound_is_enforced() {
        assert!(linearizations(&anti(), 1).is_err());
    }

    #[test]
    fn inclusion_and_equality() {
        let c = PomsetFamily::from_pomsets([Pomset::new(
            [("a", l("AB!x")), ("b", l("CD!y"))],
            [("a", "b")],
        )
        .unwrap()]);
        let c2 = PomsetFamily::from_pomsets([Pomset::new(
            [("a", l("AB!x")), ("b", l("CD!y"))],
            [("b", "a")],
        )
        .unwrap()]);
        let a = PomsetFamily::from_pomsets([anti()]);
        assert!(language_includes(&c, &a, 100).unwrap());
        assert!(!language_includes(&a, &c, 100).unwrap());
        let both = PomsetFamily::from_pomsets(c.pomsets().chain(c2.pomsets()).cloned());
        assert!(languages_equal(&both, &a, 100).unwrap());
    }
}
