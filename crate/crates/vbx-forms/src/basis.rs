use std::fmt;
use vbx_expr::Coordinate;

/// A basis one-form: horizontal `sigma_i` or contact `theta_{i^k}`.
///
/// `Theta { branch: 0, order: 0 }` is `theta` itself. Horizontal forms sort
/// before contact forms; contact forms sort by `(branch, order)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BasisOneForm {
    Sigma(u8),
    Theta { branch: u8, order: u8 },
}

impl BasisOneForm {
    pub const THETA: BasisOneForm = BasisOneForm::Theta {
        branch: 0,
        order: 0,
    };

    /// `theta_{i^k}`; `k = 0` gives `theta`.
    pub fn theta(i: u8, k: u8) -> Self {
        if k == 0 {
            Self::THETA
        } else {
            BasisOneForm::Theta {
                branch: i,
                order: k,
            }
        }
    }

    pub fn is_horizontal(&self) -> bool {
        matches!(self, BasisOneForm::Sigma(_))
    }

    /// Contact form of a pure fiber coordinate.
    pub fn of_coord(c: &Coordinate) -> Option<Self> {
        match c {
            Coordinate::X(_) => None,
            Coordinate::U => Some(Self::THETA),
            Coordinate::D(v) if c.is_pure() => Some(Self::theta(v[0], v.len() as u8)),
            Coordinate::D(_) => None,
        }
    }

    /// Jet coordinate whose differential this contact form is built from.
    pub fn coord(&self) -> Option<Coordinate> {
        match self {
            BasisOneForm::Sigma(_) => None,
            BasisOneForm::Theta { branch, order } => {
                Some(Coordinate::pure(*branch, *order as usize))
            }
        }
    }

    /// Parse `s1`, `th`, `th:1`, `th:1^2`.
    pub fn parse(name: &str) -> Option<Self> {
        if let Some(i) = name.strip_prefix('s') {
            let i: u8 = i.parse().ok()?;
            return (1..=3).contains(&i).then_some(BasisOneForm::Sigma(i));
        }
        if name == "th" {
            return Some(Self::THETA);
        }
        let rest = name.strip_prefix("th:")?;
        let (i, k) = match rest.split_once('^') {
            Some((i, k)) => (i.parse::<u8>().ok()?, k.parse::<u8>().ok()?),
            None => (rest.parse::<u8>().ok()?, 1),
        };
        ((1..=3).contains(&i) && k >= 1).then_some(BasisOneForm::theta(i, k))
    }
}

impl fmt::Display for BasisOneForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BasisOneForm::Sigma(i) => write!(f, "s{i}"),
            BasisOneForm::Theta { order: 0, .. } => f.write_str("th"),
            BasisOneForm::Theta { branch, order: 1 } => write!(f, "th:{branch}"),
            BasisOneForm::Theta { branch, order } => write!(f, "th:{branch}^{order}"),
        }
    }
}
