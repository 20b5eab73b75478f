use thiserror::Error;

use crate::pomset::EventId;

/// Structural problems found while building a [`crate::Pomset`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PomsetError {
    #[error("order edges induce a cycle through event `{0}`")]
    Cycle(EventId),
    #[error("edge ({from}, {to}) names unknown event `{missing}`")]
    DanglingEdge {
        from: EventId,
        to: EventId,
        missing: EventId,
    },
    #[error("duplicate event id `{0}`")]
    DuplicateId(EventId),
}

/// An enumeration hit its configured resource bound. Enumerations never
/// truncate silently.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("resource bound exceeded: more than {limit} {what}")]
pub struct BoundExceeded {
    pub what: &'static str,
    pub limit: usize,
}

impl BoundExceeded {
    pub fn new(what: &'static str, limit: usize) -> Self {
        BoundExceeded { what, limit }
    }
}

/// Guard used by enumerations: call [`Budget::spend`] once per produced item.
#[derive(Debug, Clone)]
pub(crate) struct Budget {
    what: &'static str,
    limit: usize,
    used: usize,
}

impl Budget {
    pub(crate) fn new(what: &'static str, limit: usize) -> Self {
        Budget {
            what,
            limit,
            used: 0,
        }
    }

    pub(crate) fn spend(&mut self) -> Result<(), BoundExceeded> {
        self.used += 1;
        if self.used > self.limit {
            Err(BoundExceeded::new(self.what, self.limit))
        } else {
            Ok(())
        }
    }
}
