//! Word- and language-level view of a family: linearizations, feasibility,
//! CC2, CC3 and language-level termination. This is the brute-force oracle
//! the pomset-level checks are validated against.

mod conditions;
mod dfa;
mod enumerate;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::Deref;
use std::str::FromStr;

use crate::label::{Channel, CommLabel, LabelError, Message, Participant};

pub use conditions::{
    check_cc2, check_cc2_family, check_cc3, check_cc3_family, check_language_terminating,
    feasible_words, LanguageTerminationWitness,
};
pub use dfa::{IdealDfa, LabelDfa, Trie};
pub(crate) use enumerate::dfa_includes;
pub use enumerate::{
    count_words, language, language_includes, languages_equal, linear_extension_count,
    linearizations,
};

/// A finite sequence of communication actions.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Word(Vec<CommLabel>);

/// A finite set of words, kept sorted.
pub type Language = BTreeSet<Word>;

impl Word {
    pub fn new(labels: Vec<CommLabel>) -> Self {
        Word(labels)
    }

    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn labels(&self) -> &[CommLabel] {
        &self.0
    }

    pub fn into_labels(self) -> Vec<CommLabel> {
        self.0
    }

    pub fn push(&mut self, l: CommLabel) {
        self.0.push(l);
    }

    pub fn pop(&mut self) -> Option<CommLabel> {
        self.0.pop()
    }

    pub fn is_prefix_of(&self, other: &Word) -> bool {
        other.0.starts_with(&self.0)
    }

    pub fn prefix(&self, len: usize) -> Word {
        Word(self.0[..len].to_vec())
    }
}

impl Deref for Word {
    type Target = [CommLabel];

    fn deref(&self) -> &[CommLabel] {
        &self.0
    }
}

impl From<Vec<CommLabel>> for Word {
    fn from(v: Vec<CommLabel>) -> Self {
        Word(v)
    }
}

impl FromIterator<CommLabel> for Word {
    fn from_iter<T: IntoIterator<Item = CommLabel>>(iter: T) -> Self {
        Word(iter.into_iter().collect())
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("ε");
        }
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("·")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Accepts labels separated by `·`, `;`, `,` or whitespace; `ε` or the
/// empty string is the empty word.
impl FromStr for Word {
    type Err = LabelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.split(|c: char| c == '·' || c == ';' || c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty() && *t != "ε")
            .map(str::parse)
            .collect()
    }
}

/// The subsequence of `w` whose labels have subject `a`.
pub fn project_word(w: &Word, a: &Participant) -> Word {
    w.iter().filter(|l| l.subject() == a).cloned().collect()
}

pub fn project_language(l: &Language, a: &Participant) -> Language {
    l.iter().map(|w| project_word(w, a)).collect()
}

/// Outputs minus inputs per (channel, message); `None` if some prefix
/// consumes a message that was never sent.
pub(crate) fn balance(w: &[CommLabel]) -> Option<BTreeMap<(Channel, Message), usize>> {
    let mut counts: BTreeMap<(Channel, Message), usize> = BTreeMap::new();
    for l in w {
        let key = (l.channel(), l.message.clone());
        if l.is_output() {
            *counts.entry(key).or_default() += 1;
        } else {
            let c = counts.get_mut(&key)?;
            if *c == 0 {
                return None;
            }
            *c -= 1;
        }
    }
    Some(counts)
}

/// No prefix of `w` receives more copies of a message than were sent.
pub fn word_well_formed(w: &Word) -> bool {
    balance(w).is_some()
}

/// Well-formed and every sent message is received.
pub fn word_complete(w: &Word) -> bool {
    balance(w).is_some_and(|c| c.values().all(|&n| n == 0))
}

/// Occurrences of `label` strictly before `position`.
pub fn count_preceding(w: &Word, position: usize, label: &CommLabel) -> usize {
    w[..position.min(w.len())]
        .iter()
        .filter(|l| *l == label)
        .count()
}

/// Every prefix of every word, including the empty word.
pub fn prefix_closure(l: &Language) -> Language {
    let mut out = Language::new();
    for w in l {
        for k in 0..=w.len() {
            out.insert(w.prefix(k));
        }
    }
    out
}

/// Participants acting (as subject) somewhere in `l`.
pub fn subjects(l: &Language) -> BTreeSet<Participant> {
    l.iter()
        .flat_map(|w| w.iter().map(|x| x.subject().clone()))
        .collect()
}
