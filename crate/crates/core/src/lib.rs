//! Realisability and termination-soundness checks for choreographies given
//! as finite families of communication pomsets.
//!
//! The pomset-level conditions (CCP2, CCP3, termination awareness) are
//! decided directly on partial orders. A brute-force word-level oracle
//! ([`language`]) and a communicating-system simulator ([`system`]) are
//! included to cross-check them.

pub mod canon;
pub mod ccp;
pub mod cfsm;
pub mod closure;
pub mod error;
pub mod family;
pub mod ideals;
pub mod label;
pub mod language;
pub mod permissive;
pub mod pomset;
pub mod random;
pub mod system;
pub mod termination;
pub mod verdict;
pub mod wellformed;

pub use error::{BoundExceeded, PomsetError};
pub use family::{FamilyError, Member, PomsetFamily};
pub use ideals::{is_prefix, order_ideals, prefixes};
pub use label::{Channel, CommLabel, Direction, LabelError, Message, Participant};
pub use permissive::{less_permissive, SearchStats};
pub use pomset::{validate_pomset, Event, EventId, Pomset};
pub use verdict::Verdict;
pub use wellformed::{is_complete, is_msc, is_well_formed, matching_of, Matching};

/// Default cap on enumerated objects (ideals, words, matchings, ...).
pub const DEFAULT_BOUND: usize = 1_000_000;
