//! Communication actions: participants, messages, channels and labels.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// A process identity taking part in a choreography.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Participant(Arc<str>);

impl Participant {
    pub fn new(name: impl AsRef<str>) -> Self {
        Participant(Arc::from(name.as_ref()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Participant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Participant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<&str> for Participant {
    fn from(s: &str) -> Self {
        Participant::new(s)
    }
}

/// A message type.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Message(Arc<str>);

impl Message {
    pub fn new(name: impl AsRef<str>) -> Self {
        Message(Arc::from(name.as_ref()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Message {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Message {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<&str> for Message {
    fn from(s: &str) -> Self {
        Message::new(s)
    }
}

/// Output (`!`) sorts before input (`?`).
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
pub enum Direction {
    #[serde(rename = "!")]
    Output,
    #[serde(rename = "?")]
    Input,
}

impl Direction {
    pub fn symbol(self) -> char {
        match self {
            Direction::Output => '!',
            Direction::Input => '?',
        }
    }
}

/// An ordered pair of distinct participants.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
pub struct Channel {
    pub sender: Participant,
    pub receiver: Participant,
}

impl fmt::Display for Channel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_pair(f, &self.sender, &self.receiver)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LabelError {
    #[error("self-channel {0}{0} is not allowed")]
    SelfChannel(Participant),
    #[error("cannot parse label `{0}`: expected e.g. `AB!x` or `Alice->Bob?msg`")]
    Malformed(String),
}

/// A single communication action `sender receiver (!|?) message`.
///
/// The derived order (sender, receiver, direction, message) is the label
/// order used wherever results must be reproducible.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CommLabel {
    pub sender: Participant,
    pub receiver: Participant,
    pub direction: Direction,
    pub message: Message,
}

impl CommLabel {
    pub fn new(
        sender: impl Into<Participant>,
        receiver: impl Into<Participant>,
        direction: Direction,
        message: impl Into<Message>,
    ) -> Result<Self, LabelError> {
        let sender = sender.into();
        let receiver = receiver.into();
        if sender == receiver {
            return Err(LabelError::SelfChannel(sender));
        }
        Ok(CommLabel {
            sender,
            receiver,
            direction,
            message: message.into(),
        })
    }

    /// `ab!m`. Panics on a self-channel; use [`CommLabel::new`] for fallible construction.
    pub fn output(sender: &str, receiver: &str, message: &str) -> Self {
        Self::new(sender, receiver, Direction::Output, message).expect("valid output label")
    }

    /// `ab?m`. Panics on a self-channel.
    pub fn input(sender: &str, receiver: &str, message: &str) -> Self {
        Self::new(sender, receiver, Direction::Input, message).expect("valid input label")
    }

    /// The acting participant: the sender of an output, the receiver of an input.
    pub fn subject(&self) -> &Participant {
        match self.direction {
            Direction::Output => &self.sender,
            Direction::Input => &self.receiver,
        }
    }

    pub fn is_output(&self) -> bool {
        self.direction == Direction::Output
    }

    pub fn is_input(&self) -> bool {
        self.direction == Direction::Input
    }

    pub fn channel(&self) -> Channel {
        Channel {
            sender: self.sender.clone(),
            receiver: self.receiver.clone(),
        }
    }

    /// The same action with the opposite direction (`ab!m` <-> `ab?m`).
    pub fn dual(&self) -> CommLabel {
        CommLabel {
            sender: self.sender.clone(),
            receiver: self.receiver.clone(),
            direction: match self.direction {
                Direction::Output => Direction::Input,
                Direction::Input => Direction::Output,
            },
            message: self.message.clone(),
        }
    }

    /// Labels `ab!m` and `ab?m` share a matching class.
    pub fn same_class(&self, other: &CommLabel) -> bool {
        self.sender == other.sender
            && self.receiver == other.receiver
            && self.message == other.message
    }
}

fn write_pair(f: &mut fmt::Formatter<'_>, a: &Participant, b: &Participant) -> fmt::Result {
    if a.as_str().chars().count() == 1 && b.as_str().chars().count() == 1 {
        write!(f, "{a}{b}")
    } else {
        write!(f, "{a}->{b}")
    }
}

impl fmt::Display for CommLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_pair(f, &self.sender, &self.receiver)?;
        write!(f, "{}{}", self.direction.symbol(), self.message)
    }
}

impl fmt::Debug for CommLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for CommLabel {
    type Err = LabelError;

    /// Accepts `AB!x` (single-character participants) or `Alice->Bob!x`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let malformed = || LabelError::Malformed(s.to_string());
        let pos = s.find(['!', '?']).ok_or_else(malformed)?;
        let (chan, rest) = s.split_at(pos);
        let direction = if rest.starts_with('!') {
            Direction::Output
        } else {
            Direction::Input
        };
        let message = &rest[1..];
        if message.is_empty() {
            return Err(malformed());
        }
        let (sender, receiver) = match chan.split_once("->") {
            Some((a, b)) => (a.to_string(), b.to_string()),
            None => {
                let chars: Vec<char> = chan.chars().collect();
                if chars.len() != 2 {
                    return Err(malformed());
                }
                (chars[0].to_string(), chars[1].to_string())
            }
        };
        if sender.is_empty() || receiver.is_empty() {
            return Err(malformed());
        }
        CommLabel::new(sender.as_str(), receiver.as_str(), direction, message)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subject_is_actor() {
        assert_eq!(CommLabel::output("A", "B", "x").subject().as_str(), "A");
        assert_eq!(CommLabel::input("A", "B", "x").subject().as_str(), "B");
    }

    #[test]
    fn self_channel_rejected() {
        assert_eq!(
            CommLabel::new("A", "A", Direction::Output, "x"),
            Err(LabelError::SelfChannel(Participant::new("A")))
        );
    }

    #[test]
    fn parse_and_display() {
        let l: CommLabel = "AB!x".parse().unwrap();
        assert_eq!(l, CommLabel::output("A", "B", "x"));
        assert_eq!(l.to_string(), "AB!x");
        let long: CommLabel = "Alice->Bob?hello".parse().unwrap();
        assert_eq!(long.subject().as_str(), "Bob");
        assert_eq!(long.to_string(), "Alice->Bob?hello");
        assert!("AB#x".parse::<CommLabel>().is_err());
        assert!("ABC!x".parse::<CommLabel>().is_err());
        assert!("AA?x".parse::<CommLabel>().is_err());
    }

    #[test]
    fn outputs_sort_before_inputs() {
        assert!(CommLabel::output("A", "B", "x") < CommLabel::input("A", "B", "x"));
        assert_eq!(CommLabel::output("A", "B", "x").dual(), CommLabel::input("A", "B", "x"));
    }
}
