//! Specification files: JSON documents declaring participants, messages,
//! named pomsets and named check profiles.

use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use pomreal::{
    CommLabel, Direction, FamilyError, LabelError, Message, Participant, Pomset, PomsetError,
    PomsetFamily,
};

use crate::report::CheckProfile;

#[derive(Debug, Error)]
pub enum SpecError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Integrity(#[from] IntegrityError),
}

#[derive(Debug, Error)]
#[error("parse error at line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl From<serde_json::Error> for ParseError {
    fn from(e: serde_json::Error) -> Self {
        ParseError {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        }
    }
}

#[derive(Debug, Error)]
pub enum IntegrityError {
    #[error("pomset `{pomset}`, event `{event}`: undeclared participant `{participant}`")]
    UndeclaredParticipant {
        pomset: String,
        event: String,
        participant: String,
    },
    #[error("pomset `{pomset}`, event `{event}`: undeclared message `{message}`")]
    UndeclaredMessage {
        pomset: String,
        event: String,
        message: String,
    },
    #[error("pomset `{pomset}`, event `{event}`: {source}")]
    Label {
        pomset: String,
        event: String,
        source: LabelError,
    },
    #[error("pomset `{pomset}`: {source}")]
    Pomset { pomset: String, source: PomsetError },
    #[error(transparent)]
    Family(#[from] FamilyError),
    #[error("profile `{profile}` names undeclared participant `{participant}`")]
    ProfileParticipant { profile: String, participant: String },
    #[error("duplicate profile name `{0}`")]
    DuplicateProfile(String),
}

/// On-disk event: `from` sends `msg` to `to`; `dir` says which side acts.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct RawEvent {
    pub id: String,
    pub from: String,
    pub to: String,
    pub dir: Direction,
    pub msg: String,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct RawPomset {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    pub events: Vec<RawEvent>,
    #[serde(default)]
    pub order: Vec<(String, String)>,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct RawDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    pub participants: Vec<String>,
    pub messages: Vec<String>,
    #[serde(default)]
    pub pomsets: Vec<RawPomset>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub profiles: Vec<CheckProfile>,
}

/// A validated specification file.
#[derive(Clone, Debug)]
pub struct SpecDocument {
    pub note: Option<String>,
    pub family: PomsetFamily,
    pub profiles: Vec<CheckProfile>,
}

impl SpecDocument {
    pub fn profile(&self, name: &str) -> Option<&CheckProfile> {
        self.profiles.iter().find(|p| p.name.as_deref() == Some(name))
    }
}

pub fn parse_spec(path: impl AsRef<Path>) -> Result<SpecDocument, SpecError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| SpecError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_spec_str(&text)
}

pub fn parse_spec_str(text: &str) -> Result<SpecDocument, SpecError> {
    let raw: RawDocument = serde_json::from_str(text).map_err(ParseError::from)?;
    Ok(validate(raw)?)
}

pub fn validate(raw: RawDocument) -> Result<SpecDocument, IntegrityError> {
    let participants: BTreeSet<&str> = raw.participants.iter().map(String::as_str).collect();
    let messages: BTreeSet<&str> = raw.messages.iter().map(String::as_str).collect();
    let mut members = Vec::new();
    for p in &raw.pomsets {
        let mut events = Vec::new();
        for e in &p.events {
            for who in [&e.from, &e.to] {
                if !participants.contains(who.as_str()) {
                    return Err(IntegrityError::UndeclaredParticipant {
                        pomset: p.name.clone(),
                        event: e.id.clone(),
                        participant: who.clone(),
                    });
                }
            }
            if !messages.contains(e.msg.as_str()) {
                return Err(IntegrityError::UndeclaredMessage {
                    pomset: p.name.clone(),
                    event: e.id.clone(),
                    message: e.msg.clone(),
                });
            }
            let label = CommLabel::new(e.from.as_str(), e.to.as_str(), e.dir, e.msg.as_str())
                .map_err(|source| IntegrityError::Label {
                    pomset: p.name.clone(),
                    event: e.id.clone(),
                    source,
                })?;
            events.push((e.id.as_str(), label));
        }
        let order = p.order.iter().map(|(a, b)| (a.as_str(), b.as_str()));
        let pomset = Pomset::new(events, order).map_err(|source| IntegrityError::Pomset {
            pomset: p.name.clone(),
            source,
        })?;
        members.push((p.name.clone(), pomset));
    }
    let family = PomsetFamily::new(
        raw.participants.iter().map(Participant::new),
        raw.messages.iter().map(Message::new),
        members,
    )?;
    let mut names = BTreeSet::new();
    for prof in &raw.profiles {
        if let Some(n) = &prof.name {
            if !names.insert(n.clone()) {
                return Err(IntegrityError::DuplicateProfile(n.clone()));
            }
        }
        for a in prof.mentioned_participants() {
            if !participants.contains(a.as_str()) {
                return Err(IntegrityError::ProfileParticipant {
                    profile: prof.name.clone().unwrap_or_default(),
                    participant: a.to_string(),
                });
            }
        }
    }
    Ok(SpecDocument {
        note: raw.note,
        family,
        profiles: raw.profiles,
    })
}

/// The on-disk form of a pomset; order edges are its Hasse diagram.
pub fn raw_pomset(name: &str, r: &Pomset) -> RawPomset {
    RawPomset {
        name: name.to_string(),
        note: None,
        events: r
            .events()
            .iter()
            .map(|e| RawEvent {
                id: e.id.to_string(),
                from: e.label.sender.to_string(),
                to: e.label.receiver.to_string(),
                dir: e.label.direction,
                msg: e.label.message.to_string(),
            })
            .collect(),
        order: r
            .hasse()
            .iter()
            .map(|&(a, b)| (r.id(a).to_string(), r.id(b).to_string()))
            .collect(),
    }
}

pub fn to_raw(doc: &SpecDocument) -> RawDocument {
    RawDocument {
        note: doc.note.clone(),
        participants: doc.family.participants().iter().map(|p| p.to_string()).collect(),
        messages: doc.family.messages().iter().map(|m| m.to_string()).collect(),
        pomsets: doc
            .family
            .members()
            .iter()
            .map(|m| raw_pomset(&m.name, &m.pomset))
            .collect(),
        profiles: doc.profiles.clone(),
    }
}

pub fn serialize(doc: &SpecDocument) -> String {
    serde_json::to_string_pretty(&to_raw(doc)).expect("documents always serialize")
}
