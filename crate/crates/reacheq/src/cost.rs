//! Step counts extended with `+∞`.
//!
//! Costs in reachability games are either a number of edges until the first
//! visit of a target set, or infinite when the play never gets there. The
//! infinite value is a distinguished variant, not a sentinel integer, and all
//! arithmetic saturates at infinity.

use std::fmt;
use std::str::FromStr;

/// A cost value: a finite number of steps or `+∞`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Cost {
    Finite(u64),
    Infinite,
}

impl Cost {
    pub const ZERO: Cost = Cost::Finite(0);

    pub fn is_finite(self) -> bool {
        matches!(self, Cost::Finite(_))
    }

    /// The finite value, if any.
    pub fn finite(self) -> Option<u64> {
        match self {
            Cost::Finite(n) => Some(n),
            Cost::Infinite => None,
        }
    }

    /// Adds a finite number of steps, saturating at infinity.
    pub fn plus(self, steps: u64) -> Cost {
        match self {
            Cost::Finite(n) => Cost::Finite(n.saturating_add(steps)),
            Cost::Infinite => Cost::Infinite,
        }
    }

    /// The gain a player derives from this cost in the qualitative reading:
    /// 1 when the target was visited at all, 0 otherwise.
    pub fn gain(self) -> u8 {
        if self.is_finite() {
            1
        } else {
            0
        }
    }
}

impl fmt::Display for Cost {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cost::Finite(n) => write!(f, "{n}"),
            Cost::Infinite => write!(f, "inf"),
        }
    }
}

impl FromStr for Cost {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "inf" | "+inf" | "infinity" => Ok(Cost::Infinite),
            _ => s
                .parse::<u64>()
                .map(Cost::Finite)
                .map_err(|_| format!("invalid cost value `{s}` (expected a number or `inf`)")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn infinity_is_greatest() {
        assert!(Cost::Finite(u64::MAX) < Cost::Infinite);
        assert!(Cost::Finite(3) < Cost::Finite(4));
    }

    #[test]
    fn addition_saturates() {
        assert_eq!(Cost::Infinite.plus(5), Cost::Infinite);
        assert_eq!(Cost::Finite(2).plus(3), Cost::Finite(5));
        assert_eq!(Cost::Finite(u64::MAX).plus(1), Cost::Finite(u64::MAX));
    }

    #[test]
    fn parse_round_trips() {
        for s in ["0", "17", "inf"] {
            let c: Cost = s.parse().unwrap();
            assert_eq!(c.to_string(), s);
        }
        assert!("-1".parse::<Cost>().is_err());
    }
}
