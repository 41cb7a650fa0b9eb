//! Jet coordinates: independent variables, the dependent variable and its derivatives.

use std::cmp::Ordering;
use std::fmt;

/// A coordinate on the jet space.
///
/// Derivative multi-indices are kept sorted ascending and nonempty; an empty
/// index collapses to [`Coordinate::U`].
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Coordinate {
    /// Independent variable `x^i`, `i` in `1..=n`.
    X(u8),
    /// Dependent variable `u`.
    U,
    /// Derivative `u_I` for a sorted multi-index `I`.
    D(Vec<u8>),
}

impl Coordinate {
    /// Derivative coordinate for an arbitrary multi-index (sorted here).
    pub fn deriv(idx: &[u8]) -> Self {
        if idx.is_empty() {
            return Coordinate::U;
        }
        let mut v = idx.to_vec();
        v.sort_unstable();
        Coordinate::D(v)
    }

    /// Pure derivative `u_{i^k}`; `k = 0` gives `u`.
    pub fn pure(i: u8, k: usize) -> Self {
        Coordinate::deriv(&vec![i; k])
    }

    /// Multi-index of a fiber coordinate (`u` has the empty index).
    pub fn index(&self) -> Option<&[u8]> {
        match self {
            Coordinate::X(_) => None,
            Coordinate::U => Some(&[]),
            Coordinate::D(v) => Some(v),
        }
    }

    /// Differential order: 0 for `x^i` and `u`.
    pub fn order(&self) -> usize {
        match self {
            Coordinate::D(v) => v.len(),
            _ => 0,
        }
    }

    /// True for `u` and derivatives.
    pub fn is_fiber(&self) -> bool {
        !matches!(self, Coordinate::X(_))
    }

    /// True unless this is a derivative with two distinct indices.
    pub fn is_pure(&self) -> bool {
        match self {
            Coordinate::D(v) => v.iter().all(|&i| i == v[0]),
            _ => true,
        }
    }

    /// Largest index mentioned (0 for `u`).
    pub fn max_index(&self) -> u8 {
        match self {
            Coordinate::X(i) => *i,
            Coordinate::U => 0,
            Coordinate::D(v) => *v.last().unwrap_or(&0),
        }
    }

    fn rank(&self) -> u8 {
        match self {
            Coordinate::X(_) => 0,
            Coordinate::U => 1,
            Coordinate::D(_) => 2,
        }
    }
}

impl Ord for Coordinate {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Coordinate::X(a), Coordinate::X(b)) => a.cmp(b),
            (Coordinate::D(a), Coordinate::D(b)) => a.len().cmp(&b.len()).then_with(|| a.cmp(b)),
            _ => self.rank().cmp(&other.rank()),
        }
    }
}

impl PartialOrd for Coordinate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Coordinate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coordinate::X(i) => write!(f, "x{i}"),
            Coordinate::U => f.write_str("u"),
            Coordinate::D(v) => {
                f.write_str("u")?;
                for i in v {
                    write!(f, "{i}")?;
                }
                Ok(())
            }
        }
    }
}
