//! The "steps from transparency" measure.
//!
//! A score is either a finite, non-positive number of steps (0 = fully
//! transparent, -n = n steps away) or `Opaque`, the absorbing bottom
//! element standing in for -∞: once any component of a cell is opaque,
//! everything that depends on it is opaque.

use std::fmt;
use std::iter::Sum;
use std::ops::Add;

use serde::{Serialize, Serializer};

/// Transparency measure: zero or a negative step count, or opaque.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Score {
    /// A finite measure; invariant: never positive.
    Finite(i64),
    /// Inaccessible values or labels; absorbs under addition.
    Opaque,
}

impl Score {
    /// The transparent score.
    pub const ZERO: Score = Score::Finite(0);

    /// Builds a finite score from a non-negative step count.
    pub fn steps(n: u32) -> Score {
        Score::Finite(-i64::from(n))
    }

    pub fn is_opaque(self) -> bool {
        matches!(self, Score::Opaque)
    }

    pub fn is_transparent(self) -> bool {
        self == Score::ZERO
    }

    /// Finite value, if any.
    pub fn finite(self) -> Option<i64> {
        match self {
            Score::Finite(v) => Some(v),
            Score::Opaque => None,
        }
    }

    /// Opaque-absorbing addition.
    pub fn add(self, other: Score) -> Score {
        match (self, other) {
            (Score::Finite(a), Score::Finite(b)) => Score::Finite(a + b),
            _ => Score::Opaque,
        }
    }
}

/// Opaque-absorbing addition, as a free function for property tests.
pub fn score_add(a: Score, b: Score) -> Score {
    a.add(b)
}

impl Add for Score {
    type Output = Score;

    fn add(self, rhs: Score) -> Score {
        Score::add(self, rhs)
    }
}

impl Sum for Score {
    fn sum<I: Iterator<Item = Score>>(iter: I) -> Score {
        iter.fold(Score::ZERO, Score::add)
    }
}

impl Default for Score {
    fn default() -> Self {
        Score::ZERO
    }
}

/// Opaque sorts below every finite score; finite scores sort by value.
impl Ord for Score {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        match (self, other) {
            (Score::Opaque, Score::Opaque) => std::cmp::Ordering::Equal,
            (Score::Opaque, Score::Finite(_)) => std::cmp::Ordering::Less,
            (Score::Finite(_), Score::Opaque) => std::cmp::Ordering::Greater,
            (Score::Finite(a), Score::Finite(b)) => a.cmp(b),
        }
    }
}

impl PartialOrd for Score {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Score {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Score::Finite(v) => write!(f, "{v}"),
            Score::Opaque => write!(f, "opaque"),
        }
    }
}

/// Serializes as a JSON number, or the string `"opaque"`.
impl Serialize for Score {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            Score::Finite(v) => serializer.serialize_i64(*v),
            Score::Opaque => serializer.serialize_str("opaque"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finite_addition() {
        assert_eq!(score_add(Score::Finite(-1), Score::Finite(-2)), Score::Finite(-3));
        assert_eq!(score_add(Score::ZERO, Score::ZERO), Score::ZERO);
    }

    #[test]
    fn opaque_absorbs() {
        assert_eq!(score_add(Score::Opaque, Score::ZERO), Score::Opaque);
        assert_eq!(score_add(Score::Finite(-5), Score::Opaque), Score::Opaque);
        assert_eq!(score_add(Score::Opaque, Score::Opaque), Score::Opaque);
    }

    #[test]
    fn ordering_puts_opaque_at_the_bottom() {
        assert!(Score::Opaque < Score::Finite(-1_000_000));
        assert!(Score::Finite(-2) < Score::ZERO);
    }

    #[test]
    fn sum_over_iterator() {
        let total: Score = [Score::Finite(-1), Score::Finite(-3)].into_iter().sum();
        assert_eq!(total, Score::Finite(-4));
        let total: Score = [Score::Finite(-1), Score::Opaque].into_iter().sum();
        assert_eq!(total, Score::Opaque);
    }

    #[test]
    fn display() {
        assert_eq!(Score::Finite(-4).to_string(), "-4");
        assert_eq!(Score::Opaque.to_string(), "opaque");
    }
}
