//! Zero testing: exact on the decidable fragment, sampled elsewhere.

use crate::coord::Coordinate;
use crate::eval::EvalError;
use crate::expr::Expr;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;
use thiserror::Error;

/// Default number of valid sample points.
pub const DEFAULT_POINTS: usize = 20;
/// Default relative tolerance.
pub const DEFAULT_TOL: f64 = 1e-9;
/// Default number of rejected samples tolerated.
pub const DEFAULT_CAP: usize = 100;
/// Default half-width of excluded neighbourhoods.
pub const DEFAULT_RADIUS: f64 = 0.1;

/// A point where an expression was observed to be nonzero.
#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    pub point: BTreeMap<Coordinate, f64>,
    pub value: f64,
}

/// Outcome of a zero test.
#[derive(Debug, Clone, PartialEq)]
pub enum ZeroVerdict {
    Zero,
    NonZero { witness: Option<Witness> },
    ProbablyZero { samples: usize, tol: f64 },
}

/// How far a verdict can be trusted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Certainty {
    Exact,
    Probabilistic,
}

impl Certainty {
    pub fn as_str(self) -> &'static str {
        match self {
            Certainty::Exact => "exact",
            Certainty::Probabilistic => "probabilistic",
        }
    }

    pub fn and(self, o: Certainty) -> Certainty {
        self.max(o)
    }
}

impl ZeroVerdict {
    /// `Zero` or `ProbablyZero`.
    pub fn holds(&self) -> bool {
        !matches!(self, ZeroVerdict::NonZero { .. })
    }

    pub fn is_nonzero(&self) -> bool {
        !self.holds()
    }

    pub fn certainty(&self) -> Certainty {
        match self {
            ZeroVerdict::ProbablyZero { .. } => Certainty::Probabilistic,
            _ => Certainty::Exact,
        }
    }

    /// Verdict for "all of these vanish".
    pub fn and(self, o: ZeroVerdict) -> ZeroVerdict {
        match (self, o) {
            (n @ ZeroVerdict::NonZero { .. }, _) | (_, n @ ZeroVerdict::NonZero { .. }) => n,
            (p @ ZeroVerdict::ProbablyZero { .. }, _)
            | (_, p @ ZeroVerdict::ProbablyZero { .. }) => p,
            _ => ZeroVerdict::Zero,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            ZeroVerdict::Zero => "zero",
            ZeroVerdict::NonZero { .. } => "nonzero",
            ZeroVerdict::ProbablyZero { .. } => "probably-zero",
        }
    }
}

/// Sampling interval `[lo, hi]` with points excluded together with a neighbourhood.
#[derive(Debug, Clone, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
    pub exclude: Vec<f64>,
}

impl Default for Interval {
    fn default() -> Self {
        Interval {
            lo: -1.0,
            hi: 1.0,
            exclude: Vec::new(),
        }
    }
}

/// Per-coordinate sampling intervals.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleBox {
    pub default: Interval,
    pub ranges: BTreeMap<Coordinate, Interval>,
    pub radius: f64,
}

impl Default for SampleBox {
    fn default() -> Self {
        SampleBox {
            default: Interval::default(),
            ranges: BTreeMap::new(),
            radius: DEFAULT_RADIUS,
        }
    }
}

impl SampleBox {
    pub fn interval(&self, c: &Coordinate) -> &Interval {
        self.ranges.get(c).unwrap_or(&self.default)
    }

    /// Draw one value for `c`, avoiding excluded neighbourhoods.
    pub fn sample<R: Rng>(&self, c: &Coordinate, rng: &mut R) -> f64 {
        let iv = self.interval(c);
        let mut v = iv.lo;
        for _ in 0..1000 {
            v = iv.lo + (iv.hi - iv.lo) * rng.gen::<f64>();
            if iv.exclude.iter().all(|e| (v - e).abs() >= self.radius) {
                break;
            }
        }
        v
    }
}

/// Parameters of the sampling oracle.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSpec {
    pub points: usize,
    pub tol: f64,
    pub seed: u64,
    pub cap: usize,
    pub bounds: SampleBox,
}

impl Default for SampleSpec {
    fn default() -> Self {
        SampleSpec {
            points: DEFAULT_POINTS,
            tol: DEFAULT_TOL,
            seed: 0,
            cap: DEFAULT_CAP,
            bounds: SampleBox::default(),
        }
    }
}

impl SampleSpec {
    pub fn with_seed(seed: u64) -> Self {
        SampleSpec {
            seed,
            ..SampleSpec::default()
        }
    }
}

/// Zero-testing policy.
#[derive(Debug, Clone, PartialEq)]
pub enum Policy {
    /// Decide by normalization only; undecidable expressions need a witness.
    Exact,
    /// Fall back to sampling when normalization cannot decide.
    Sampled(SampleSpec),
}

impl Default for Policy {
    fn default() -> Self {
        Policy::Sampled(SampleSpec::default())
    }
}

impl Policy {
    pub fn spec(&self) -> SampleSpec {
        match self {
            Policy::Exact => SampleSpec::default(),
            Policy::Sampled(s) => s.clone(),
        }
    }

    pub fn tol(&self) -> f64 {
        self.spec().tol
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ZeroTestError {
    #[error("zero test indeterminate: no exact decision and no witness found")]
    Indeterminate,
    #[error("sampling gave up after {rejected} rejected points")]
    SampleCapExceeded { rejected: usize },
}

/// Outcome of evaluating an expression at sampled points.
enum Scan {
    Witness(Witness),
    AllSmall(usize),
}

fn scan(e: &Expr, spec: &SampleSpec) -> Result<Scan, ZeroTestError> {
    let coords: Vec<Coordinate> = e.coords().into_iter().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut valid = 0;
    let mut rejected = 0;
    while valid < spec.points {
        let point: BTreeMap<Coordinate, f64> = coords
            .iter()
            .map(|c| (c.clone(), spec.bounds.sample(c, &mut rng)))
            .collect();
        match e.eval_scaled(&|c| point.get(c).copied()) {
            Ok((v, s)) => {
                if v.abs() > spec.tol * (1.0 + s) {
                    return Ok(Scan::Witness(Witness { point, value: v }));
                }
                valid += 1;
            }
            Err(EvalError::Domain(_)) => {
                rejected += 1;
                if rejected > spec.cap {
                    return Err(ZeroTestError::SampleCapExceeded { rejected });
                }
            }
            Err(EvalError::Unassigned(_)) => unreachable!("every coordinate is sampled"),
        }
    }
    Ok(Scan::AllSmall(valid))
}

/// Look for a point where `e` is visibly nonzero.
pub fn find_witness(e: &Expr, spec: &SampleSpec) -> Option<Witness> {
    match scan(e, spec) {
        Ok(Scan::Witness(w)) => Some(w),
        _ => None,
    }
}

/// Decide whether `e` vanishes identically.
pub fn is_zero(e: &Expr, policy: &Policy) -> Result<ZeroVerdict, ZeroTestError> {
    if e.is_zero() {
        return Ok(ZeroVerdict::Zero);
    }
    if e.is_decidable() {
        let witness = match policy {
            Policy::Exact => None,
            Policy::Sampled(spec) => find_witness(e, spec),
        };
        return Ok(ZeroVerdict::NonZero { witness });
    }
    match policy {
        Policy::Exact => match find_witness(e, &SampleSpec::default()) {
            Some(w) => Ok(ZeroVerdict::NonZero { witness: Some(w) }),
            None => Err(ZeroTestError::Indeterminate),
        },
        Policy::Sampled(spec) => match scan(e, spec)? {
            Scan::Witness(w) => Ok(ZeroVerdict::NonZero { witness: Some(w) }),
            Scan::AllSmall(n) => Ok(ZeroVerdict::ProbablyZero {
                samples: n,
                tol: spec.tol,
            }),
        },
    }
}
