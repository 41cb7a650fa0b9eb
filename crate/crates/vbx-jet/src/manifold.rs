//! Reduction of mixed derivatives, total derivatives and sampling on the
//! restricted manifold.

use crate::field::TotalVectorField;
use crate::system::SystemSpec;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::{BTreeMap, HashMap};
use std::sync::Mutex;
use thiserror::Error;
use vbx_expr::{
    find_witness, is_zero, Coordinate, Expr, Policy, SampleSpec, Witness, ZeroTestError,
    ZeroVerdict,
};

/// Default maximum jet order.
pub const DEFAULT_BUDGET: usize = 8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum JetError {
    #[error("order budget {budget} exceeded: order {needed} required")]
    Budget { budget: usize, needed: usize },
    #[error("index {index} outside 1..{n}")]
    BadIndex { index: u8, n: u8 },
    #[error("no valid jet point after {rejected} rejected samples")]
    SampleCapExceeded { rejected: usize },
    #[error(transparent)]
    Zero(#[from] ZeroTestError),
}

/// Numeric values of the restricted coordinates up to a given order.
#[derive(Debug, Clone, PartialEq)]
pub struct JetPoint {
    pub order: usize,
    pub values: BTreeMap<Coordinate, f64>,
    pub seed: u64,
}

/// One integrability identity with its residual and verdict.
#[derive(Debug, Clone, PartialEq)]
pub struct IdentityRow {
    pub name: String,
    pub residual: Expr,
    pub verdict: ZeroVerdict,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InvolutivityReport {
    pub rows: Vec<IdentityRow>,
}

impl InvolutivityReport {
    pub fn pass(&self) -> bool {
        self.rows.iter().all(|r| r.verdict.holds())
    }

    /// First failing row, if any.
    pub fn failure(&self) -> Option<&IdentityRow> {
        self.rows.iter().find(|r| !r.verdict.holds())
    }
}

/// The restricted manifold of a system with memoized reduction.
#[derive(Debug)]
pub struct Manifold {
    spec: SystemSpec,
    budget: usize,
    reduce_memo: Mutex<HashMap<Vec<u8>, Expr>>,
    total_memo: Mutex<HashMap<(Expr, u8), Expr>>,
}

impl Manifold {
    pub fn new(spec: SystemSpec) -> Self {
        Self::with_budget(spec, DEFAULT_BUDGET)
    }

    pub fn with_budget(spec: SystemSpec, budget: usize) -> Self {
        Manifold {
            spec,
            budget,
            reduce_memo: Mutex::new(HashMap::new()),
            total_memo: Mutex::new(HashMap::new()),
        }
    }

    pub fn spec(&self) -> &SystemSpec {
        &self.spec
    }

    pub fn n(&self) -> u8 {
        self.spec.n()
    }

    pub fn budget(&self) -> usize {
        self.budget
    }

    fn check_index(&self, i: u8) -> Result<(), JetError> {
        if (1..=self.n()).contains(&i) {
            Ok(())
        } else {
            Err(JetError::BadIndex {
                index: i,
                n: self.n(),
            })
        }
    }

    fn pure(&self, i: u8, k: usize) -> Result<Expr, JetError> {
        if k > self.budget {
            return Err(JetError::Budget {
                budget: self.budget,
                needed: k,
            });
        }
        Ok(Expr::coord(Coordinate::pure(i, k)))
    }

    /// `u_I` in restricted coordinates. Mixed indices are rewritten through
    /// `f_ij` for the smallest pair of distinct indices `i < j` in `I`, followed
    /// by total derivatives in the remaining indices in ascending order.
    pub fn reduce_index(&self, idx: &[u8]) -> Result<Expr, JetError> {
        for &i in idx {
            self.check_index(i)?;
        }
        let mut idx = idx.to_vec();
        idx.sort_unstable();
        if idx.is_empty() {
            return Ok(Expr::u());
        }
        if idx.iter().all(|&i| i == idx[0]) {
            return self.pure(idx[0], idx.len());
        }
        if let Some(v) = self.reduce_memo.lock().unwrap().get(&idx) {
            return Ok(v.clone());
        }
        let mut distinct = idx.clone();
        distinct.dedup();
        let (i, j) = (distinct[0], distinct[1]);
        let v = self.reduce_route(&idx, i, j, false)?;
        self.reduce_memo.lock().unwrap().insert(idx, v.clone());
        Ok(v)
    }

    fn reduce_route(&self, idx: &[u8], i: u8, j: u8, reverse: bool) -> Result<Expr, JetError> {
        let mut rest = idx.to_vec();
        for k in [i, j] {
            let p = rest.iter().position(|&x| x == k).expect("index present");
            rest.remove(p);
        }
        if reverse {
            rest.reverse();
        }
        let mut e = self.spec.f(i, j).clone();
        for k in rest {
            e = self.total(&e, k)?;
        }
        Ok(e)
    }

    /// Every reduction of a mixed `u_I`: each distinct pair `i < j` in `I`,
    /// with the remaining derivatives taken in ascending and in descending order.
    pub fn reduction_routes(&self, idx: &[u8]) -> Result<Vec<(String, Expr)>, JetError> {
        let mut idx = idx.to_vec();
        idx.sort_unstable();
        let mut distinct = idx.clone();
        distinct.dedup();
        let mut out = Vec::new();
        for a in 0..distinct.len() {
            for b in a + 1..distinct.len() {
                let (i, j) = (distinct[a], distinct[b]);
                for reverse in [false, true] {
                    let name = format!("f{i}{j}{}", if reverse { " desc" } else { " asc" });
                    out.push((name, self.reduce_route(&idx, i, j, reverse)?));
                }
            }
        }
        Ok(out)
    }

    /// Replace every mixed derivative coordinate by its reduction.
    pub fn reduce(&self, e: &Expr) -> Result<Expr, JetError> {
        let mut map = BTreeMap::new();
        for c in e.coords() {
            if !c.is_pure() {
                map.insert(c.clone(), self.reduce_index(c.index().unwrap())?);
            }
        }
        if map.is_empty() {
            return Ok(e.clone());
        }
        Ok(e.subst_map(&map)
            .expect("reduction keeps denominators nonzero"))
    }

    /// Total derivative `D_i` of the coordinate `c`.
    pub fn total_of_coord(&self, c: &Coordinate, i: u8) -> Result<Expr, JetError> {
        self.check_index(i)?;
        match c {
            Coordinate::X(j) => Ok(if *j == i { Expr::one() } else { Expr::zero() }),
            Coordinate::U => self.pure(i, 1),
            Coordinate::D(v) if v.iter().all(|&k| k == i) => self.pure(i, v.len() + 1),
            Coordinate::D(v) => {
                let mut w = v.clone();
                w.push(i);
                self.reduce_index(&w)
            }
        }
    }

    /// Total derivative `D_i e`, reduced to restricted coordinates.
    pub fn total(&self, e: &Expr, i: u8) -> Result<Expr, JetError> {
        self.check_index(i)?;
        if e.as_constant().is_some() {
            return Ok(Expr::zero());
        }
        let key = (e.clone(), i);
        if let Some(v) = self.total_memo.lock().unwrap().get(&key) {
            return Ok(v.clone());
        }
        let v = e.try_derivation(&mut |c| self.total_of_coord(c, i))?;
        self.total_memo.lock().unwrap().insert(key, v.clone());
        Ok(v)
    }

    /// `X(e)` for a combination of total derivatives.
    pub fn apply(&self, x: &TotalVectorField, e: &Expr) -> Result<Expr, JetError> {
        let mut parts = Vec::new();
        for (i, a) in x.coeffs() {
            parts.push(a.mul(&self.total(e, *i)?));
        }
        Ok(Expr::sum(&parts))
    }

    /// Sampling policy using this system's box.
    pub fn sampled(&self, points: usize, tol: f64, seed: u64) -> Policy {
        Policy::Sampled(SampleSpec {
            points,
            tol,
            seed,
            cap: vbx_expr::DEFAULT_CAP,
            bounds: self.spec.bounds().clone(),
        })
    }

    /// Default sampling policy (20 points, tolerance 1e-9) using this system's box.
    pub fn policy(&self, seed: u64) -> Policy {
        self.sampled(vbx_expr::DEFAULT_POINTS, vbx_expr::DEFAULT_TOL, seed)
    }

    /// Restrict a policy to this system's box (exact policies are kept).
    pub fn localize(&self, policy: &Policy) -> Policy {
        match policy {
            Policy::Exact => Policy::Exact,
            Policy::Sampled(s) => Policy::Sampled(SampleSpec {
                bounds: self.spec.bounds().clone(),
                ..s.clone()
            }),
        }
    }

    /// Zero test in this system's box.
    pub fn verdict(&self, e: &Expr, policy: &Policy) -> Result<ZeroVerdict, JetError> {
        Ok(is_zero(e, &self.localize(policy))?)
    }

    /// A point where `e` is nonzero, sampled in this system's box.
    pub fn witness(&self, e: &Expr, seed: u64) -> Option<Witness> {
        find_witness(
            e,
            &SampleSpec {
                seed,
                bounds: self.spec.bounds().clone(),
                ..SampleSpec::default()
            },
        )
    }

    /// The integrability identities `D_k f_ij = D_i f_kj`.
    pub fn check_involutive(&self, policy: &Policy) -> Result<InvolutivityReport, JetError> {
        if self.n() == 2 {
            return Ok(InvolutivityReport { rows: Vec::new() });
        }
        let d3f12 = self.total(self.spec.f(1, 2), 3)?;
        let d2f13 = self.total(self.spec.f(1, 3), 2)?;
        let d1f23 = self.total(self.spec.f(2, 3), 1)?;
        let mut rows = Vec::new();
        for (name, a, b) in [
            ("D3(f12) - D1(f23)", &d3f12, &d1f23),
            ("D3(f12) - D2(f13)", &d3f12, &d2f13),
            ("D2(f13) - D1(f23)", &d2f13, &d1f23),
        ] {
            let residual = a - b;
            let mut verdict = self.verdict(&residual, policy)?;
            if let ZeroVerdict::NonZero { witness: None } = verdict {
                verdict = ZeroVerdict::NonZero {
                    witness: self.witness(&residual, policy.spec().seed),
                };
            }
            rows.push(IdentityRow {
                name: name.into(),
                residual,
                verdict,
            });
        }
        Ok(InvolutivityReport { rows })
    }

    /// Random point on the restricted coordinates up to `order`, avoiding the
    /// box exclusions and points where some `f_ij` is undefined.
    pub fn sample_point(&self, order: usize, seed: u64) -> Result<JetPoint, JetError> {
        let n = self.n();
        let mut coords: Vec<Coordinate> = (1..=n).map(Coordinate::X).collect();
        coords.push(Coordinate::U);
        for k in 1..=order {
            for i in 1..=n {
                coords.push(Coordinate::pure(i, k));
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cap = vbx_expr::DEFAULT_CAP;
        for _ in 0..=cap {
            let values: BTreeMap<Coordinate, f64> = coords
                .iter()
                .map(|c| (c.clone(), self.spec.bounds().sample(c, &mut rng)))
                .collect();
            let ok = self
                .spec
                .pairs()
                .iter()
                .all(|&(i, j)| self.spec.f(i, j).eval(&|c| values.get(c).copied()).is_ok());
            if ok {
                return Ok(JetPoint {
                    order,
                    values,
                    seed,
                });
            }
        }
        Err(JetError::SampleCapExceeded { rejected: cap + 1 })
    }
}
