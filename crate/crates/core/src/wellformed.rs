//! Matching discipline between outputs and inputs.
//!
//! A pomset is well-formed when
//!
//! 1. every output has at most one immediate successor carrying the dual
//!    input label (its *match*),
//! 2. every input has exactly one immediate predecessor carrying the dual
//!    output label,
//! 3. immediate-predecessor pairs across participants are matches, and
//! 4. ordered outputs with the same label are not matched by inputs in the
//!    opposite order.
//!
//! It is complete when every output is matched, and an MSC when it is
//! well-formed, complete and every participant's projection is a chain.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::pomset::{EventId, Pomset};

/// Output-to-input pairs of one pomset, by event index.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Matching {
    pairs: BTreeMap<usize, usize>,
}

impl Matching {
    pub fn input_of(&self, output: usize) -> Option<usize> {
        self.pairs.get(&output).copied()
    }

    pub fn output_of(&self, input: usize) -> Option<usize> {
        self.pairs
            .iter()
            .find(|&(_, &i)| i == input)
            .map(|(&o, _)| o)
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.pairs.iter().map(|(&o, &i)| (o, i))
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatchError {
    #[error("output `{output}` has several matching immediate successors: {inputs:?}")]
    AmbiguousOutput {
        output: EventId,
        inputs: Vec<EventId>,
    },
    #[error("input `{input}` has {} matching immediate predecessors (expected exactly one): {outputs:?}", outputs.len())]
    AmbiguousInput {
        input: EventId,
        outputs: Vec<EventId>,
    },
}

fn dual_succ(r: &Pomset, o: usize) -> Vec<usize> {
    let want = r.label(o).dual();
    r.immediate_successors(o)
        .filter(|&j| *r.label(j) == want)
        .collect()
}

fn dual_pred(r: &Pomset, i: usize) -> Vec<usize> {
    let want = r.label(i).dual();
    r.immediate_predecessors(i)
        .filter(|&j| *r.label(j) == want)
        .collect()
}

fn ids(r: &Pomset, v: &[usize]) -> Vec<EventId> {
    v.iter().map(|&i| r.id(i).clone()).collect()
}

/// Pairs every output with its unique dual immediate successor.
///
/// Fails when an output has two or more candidates, or when an input does
/// not have exactly one dual immediate predecessor.
pub fn matching_of(r: &Pomset) -> Result<Matching, MatchError> {
    let mut pairs = BTreeMap::new();
    for o in (0..r.len()).filter(|&i| r.label(i).is_output()) {
        let succ = dual_succ(r, o);
        match succ.len() {
            0 => {}
            1 => {
                pairs.insert(o, succ[0]);
            }
            _ => {
                return Err(MatchError::AmbiguousOutput {
                    output: r.id(o).clone(),
                    inputs: ids(r, &succ),
                })
            }
        }
    }
    for i in (0..r.len()).filter(|&i| r.label(i).is_input()) {
        let pred = dual_pred(r, i);
        if pred.len() != 1 {
            return Err(MatchError::AmbiguousInput {
                input: r.id(i).clone(),
                outputs: ids(r, &pred),
            });
        }
    }
    Ok(Matching { pairs })
}

/// One failed well-formedness item with the events that witness it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    /// Item 1: an output with several dual immediate successors.
    SeveralMatches { output: usize, inputs: Vec<usize> },
    /// Item 2: an input without exactly one dual immediate predecessor.
    InputNotMatched { input: usize, outputs: Vec<usize> },
    /// Item 3: an immediate cross-participant pair that is not a match.
    CrossNotMatch { pred: usize, succ: usize },
    /// Item 4: same-label outputs `first <= second` matched by inputs in reverse order.
    Crossing {
        first: usize,
        second: usize,
        first_input: usize,
        second_input: usize,
    },
}

impl Violation {
    /// Number of the violated well-formedness condition (1-4).
    pub fn item(&self) -> u8 {
        match self {
            Violation::SeveralMatches { .. } => 1,
            Violation::InputNotMatched { .. } => 2,
            Violation::CrossNotMatch { .. } => 3,
            Violation::Crossing { .. } => 4,
        }
    }

    pub fn describe(&self, r: &Pomset) -> String {
        let name = |i: usize| format!("{}:{}", r.id(i), r.label(i));
        match self {
            Violation::SeveralMatches { output, inputs } => format!(
                "item 1: output {} has {} matching immediate successors ({})",
                name(*output),
                inputs.len(),
                inputs.iter().map(|&i| name(i)).collect::<Vec<_>>().join(", ")
            ),
            Violation::InputNotMatched { input, outputs } => format!(
                "item 2: input {} has {} matching immediate predecessors",
                name(*input),
                outputs.len()
            ),
            Violation::CrossNotMatch { pred, succ } => format!(
                "item 3: {} immediately precedes {} across participants without matching",
                name(*pred),
                name(*succ)
            ),
            Violation::Crossing {
                first,
                second,
                first_input,
                second_input,
            } => format!(
                "item 4: outputs {} <= {} are received in the opposite order ({} <= {})",
                name(*first),
                name(*second),
                name(*second_input),
                name(*first_input)
            ),
        }
    }
}

/// Outcome of [`is_well_formed`]; empty means well-formed.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct WellFormedness {
    pub violations: Vec<Violation>,
}

impl WellFormedness {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for WellFormedness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.holds() {
            write!(f, "well-formed")
        } else {
            write!(f, "{} violation(s)", self.violations.len())
        }
    }
}

/// Checks all four well-formedness items and reports every violation.
pub fn is_well_formed(r: &Pomset) -> WellFormedness {
    let mut violations = Vec::new();
    let n = r.len();
    let mut matched: Vec<Option<usize>> = vec![None; n];
    for o in (0..n).filter(|&i| r.label(i).is_output()) {
        let succ = dual_succ(r, o);
        if succ.len() > 1 {
            violations.push(Violation::SeveralMatches {
                output: o,
                inputs: succ,
            });
        } else if let Some(&i) = succ.first() {
            matched[o] = Some(i);
        }
    }
    for i in (0..n).filter(|&i| r.label(i).is_input()) {
        let pred = dual_pred(r, i);
        if pred.len() != 1 {
            violations.push(Violation::InputNotMatched {
                input: i,
                outputs: pred,
            });
        }
    }
    for &(a, b) in r.hasse() {
        if r.label(a).subject() != r.label(b).subject() && matched[a] != Some(b) {
            violations.push(Violation::CrossNotMatch { pred: a, succ: b });
        }
    }
    for e in (0..n).filter(|&i| r.label(i).is_output()) {
        for e2 in (0..n).filter(|&j| j != e && r.label(j) == r.label(e) && r.le(e, j)) {
            let want = r.label(e).dual();
            for bar in r.immediate_successors(e).filter(|&k| *r.label(k) == want) {
                for bar2 in r.immediate_successors(e2).filter(|&k| *r.label(k) == want) {
                    if r.le(bar2, bar) {
                        violations.push(Violation::Crossing {
                            first: e,
                            second: e2,
                            first_input: bar,
                            second_input: bar2,
                        });
                    }
                }
            }
        }
    }
    WellFormedness { violations }
}

/// Every output has a matching input. Meaningful on well-formed pomsets;
/// returns `false` when no matching can be computed.
pub fn is_complete(r: &Pomset) -> bool {
    match matching_of(r) {
        Ok(m) => (0..r.len())
            .filter(|&i| r.label(i).is_output())
            .all(|o| m.input_of(o).is_some()),
        Err(_) => false,
    }
}

/// Well-formed, complete, and every projection totally ordered.
pub fn is_msc(r: &Pomset) -> bool {
    is_well_formed(r).holds()
        && is_complete(r)
        && r.participants().iter().all(|a| r.project(a).is_total())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::label::CommLabel;

    fn l(s: &str) -> CommLabel {
        s.parse().unwrap()
    }

    fn single() -> Pomset {
        Pomset::new([("e1", l("AB!x")), ("e2", l("AB?x"))], [("e1", "e2")]).unwrap()
    }

    #[test]
    fn single_message_matches() {
        let r = single();
        let m = matching_of(&r).unwrap();
        assert_eq!(m.input_of(0), Some(1));
        assert_eq!(m.output_of(1), Some(0));
        assert!(is_well_formed(&r).holds());
        assert!(is_complete(&r));
        assert!(is_msc(&r));
    }

    #[test]
    fn lone_output_is_unmatched() {
        let r = Pomset::new([("e1", l("AB!x"))], Vec::<(&str, &str)>::new()).unwrap();
        assert!(matching_of(&r).unwrap().is_empty());
        assert!(is_well_formed(&r).holds());
        assert!(!is_complete(&r));
        assert!(!is_msc(&r));
    }

    #[test]
    fn lone_input_is_ambiguous() {
        let r = Pomset::new([("e1", l("AB?x"))], Vec::<(&str, &str)>::new()).unwrap();
        assert!(matches!(
            matching_of(&r),
            Err(MatchError::AmbiguousInput { .. })
        ));
        let wf = is_well_formed(&r);
        assert_eq!(wf.violations.len(), 1);
        assert_eq!(wf.violations[0].item(), 2);
    }

    #[test]
    fn empty_is_everything() {
        let r = Pomset::empty();
        assert!(is_well_formed(&r).holds());
        assert!(is_complete(&r));
        assert!(is_msc(&r));
    }

    #[test]
    fn crossing_matches_are_rejected() {
        // o1 < o2 (same label), inputs received in reverse: i2 < i1. With
        // o1 < o2 < i2 < i1, o1 is no longer an immediate predecessor of i1,
        // so the crossing surfaces as an unmatched input.
        let r = Pomset::new(
            [
                ("o1", l("AB!x")),
                ("o2", l("AB!x")),
                ("i1", l("AB?x")),
                ("i2", l("AB?x")),
            ],
            [("o1", "o2"), ("o1", "i1"), ("o2", "i2"), ("i2", "i1")],
        )
        .unwrap();
        let wf = is_well_formed(&r);
        assert!(!wf.holds());
        assert_eq!(wf.violations, vec![Violation::InputNotMatched { input: 2, outputs: vec![] }]);
    }

    #[test]
    fn output_with_two_candidate_inputs() {
        let r = Pomset::new(
            [("o", l("AB!x")), ("i1", l("AB?x")), ("i2", l("AB?x"))],
            [("o", "i1"), ("o", "i2")],
        )
        .unwrap();
        assert!(matches!(
            matching_of(&r),
            Err(MatchError::AmbiguousOutput { .. })
        ));
        assert!(is_well_formed(&r).violations.iter().any(|v| v.item() == 1));
    }

    #[test]
    fn unmatched_cross_edge_violates_item_three() {
        let r = Pomset::new(
            [("a", l("AB!x")), ("b", l("AB?x")), ("c", l("CD!y")), ("d", l("CD?y"))],
            [("a", "b"), ("c", "d"), ("a", "c")],
        )
        .unwrap();
        let wf = is_well_formed(&r);
        assert_eq!(wf.violations.len(), 1);
        assert_eq!(wf.violations[0], Violation::CrossNotMatch { pred: 0, succ: 2 });
    }
}
