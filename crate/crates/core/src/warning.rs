use std::fmt;

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WarningKind {
    UnresolvedTransition,
    UnhostedFragment,
    NestedFragment,
    UnresolvedAdapter,
    Undecompiled,
    EmptyPage,
    UnresolvedAttribute,
    UndefinedComponent,
    MissingAdapterView,
    MissingPage,
    NonActivityTarget,
}

/// A non-fatal finding recorded during analysis.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Warning {
    pub kind: WarningKind,
    /// The class (or class.method) the warning is about.
    pub subject: String,
    pub message: String,
}

impl Warning {
    pub fn new(kind: WarningKind, subject: impl Into<String>, message: impl Into<String>) -> Self {
        Warning {
            kind,
            subject: subject.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.subject, self.message)
    }
}
