use std::fmt;

use serde::{Serialize, Serializer};

/// An exponent that is either a finite real or unbounded.
///
/// Serializes as a JSON number, or the string `"unbounded"`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Bound {
    Finite(f64),
    Unbounded,
}

impl Bound {
    pub fn finite(self) -> Option<f64> {
        match self {
            Bound::Finite(x) => Some(x),
            Bound::Unbounded => None,
        }
    }

    pub fn is_unbounded(self) -> bool {
        matches!(self, Bound::Unbounded)
    }

    /// `true` when `p` lies strictly below the bound.
    pub fn exceeds(self, p: f64) -> bool {
        match self {
            Bound::Finite(x) => p < x,
            Bound::Unbounded => true,
        }
    }
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bound::Finite(x) => write!(f, "{x}"),
            Bound::Unbounded => f.write_str("unbounded"),
        }
    }
}

impl Serialize for Bound {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Bound::Finite(x) => s.serialize_f64(*x),
            Bound::Unbounded => s.serialize_str("unbounded"),
        }
    }
}
