use std::collections::BTreeSet;

use thiserror::Error;

use crate::label::{Message, Participant};
use crate::pomset::Pomset;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FamilyError {
    #[error("pomset `{pomset}` uses undeclared participant `{participant}`")]
    UndeclaredParticipant {
        pomset: String,
        participant: Participant,
    },
    #[error("pomset `{pomset}` uses undeclared message `{message}`")]
    UndeclaredMessage { pomset: String, message: Message },
    #[error("duplicate pomset name `{0}`")]
    DuplicateName(String),
}

/// A named member of a family.
#[derive(Clone, Debug)]
pub struct Member {
    pub name: String,
    pub pomset: Pomset,
}

/// A global specification: finitely many pomsets over a declared universe
/// of participants and messages.
#[derive(Clone, Debug, Default)]
pub struct PomsetFamily {
    participants: BTreeSet<Participant>,
    messages: BTreeSet<Message>,
    members: Vec<Member>,
}

impl PomsetFamily {
    pub fn new(
        participants: impl IntoIterator<Item = Participant>,
        messages: impl IntoIterator<Item = Message>,
        members: impl IntoIterator<Item = (String, Pomset)>,
    ) -> Result<Self, FamilyError> {
        let participants: BTreeSet<Participant> = participants.into_iter().collect();
        let messages: BTreeSet<Message> = messages.into_iter().collect();
        let mut names = BTreeSet::new();
        let mut out = Vec::new();
        for (name, pomset) in members {
            if !names.insert(name.clone()) {
                return Err(FamilyError::DuplicateName(name));
            }
            for e in pomset.events() {
                for p in [&e.label.sender, &e.label.receiver] {
                    if !participants.contains(p) {
                        return Err(FamilyError::UndeclaredParticipant {
                            pomset: name,
                            participant: p.clone(),
                        });
                    }
                }
                if !messages.contains(&e.label.message) {
                    return Err(FamilyError::UndeclaredMessage {
                        pomset: name,
                        message: e.label.message.clone(),
                    });
                }
            }
            out.push(Member { name, pomset });
        }
        Ok(PomsetFamily {
            participants,
            messages,
            members: out,
        })
    }

    /// Family whose universe is whatever the members mention. Members are
    /// named `r0`, `r1`, ...
    pub fn from_pomsets(pomsets: impl IntoIterator<Item = Pomset>) -> Self {
        let members: Vec<(String, Pomset)> = pomsets
            .into_iter()
            .enumerate()
            .map(|(i, p)| (format!("r{i}"), p))
            .collect();
        let participants: BTreeSet<Participant> =
            members.iter().flat_map(|(_, p)| p.participants()).collect();
        let messages: BTreeSet<Message> = members
            .iter()
            .flat_map(|(_, p)| p.events().iter().map(|e| e.label.message.clone()))
            .collect();
        PomsetFamily::new(participants, messages, members).expect("universe inferred from members")
    }

    pub fn participants(&self) -> &BTreeSet<Participant> {
        &self.participants
    }

    pub fn messages(&self) -> &BTreeSet<Message> {
        &self.messages
    }

    pub fn members(&self) -> &[Member] {
        &self.members
    }

    pub fn pomsets(&self) -> impl Iterator<Item = &Pomset> {
        self.members.iter().map(|m| &m.pomset)
    }

    pub fn get(&self, name: &str) -> Option<&Pomset> {
        self.members
            .iter()
            .find(|m| m.name == name)
            .map(|m| &m.pomset)
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// The sub-family made of the named members, in the given order.
    pub fn select(&self, names: &[&str]) -> Option<PomsetFamily> {
        let members = names
            .iter()
            .map(|n| self.get(n).map(|p| (n.to_string(), p.clone())))
            .collect::<Option<Vec<_>>>()?;
        PomsetFamily::new(
            self.participants.iter().cloned(),
            self.messages.iter().cloned(),
            members,
        )
        .ok()
    }
}
