//! Validated system specifications and their JSON form.

use serde_json::{json, Map, Value};
use std::collections::BTreeMap;
use thiserror::Error;
use vbx_expr::{parse_with, Coordinate, Expr, Interval, ParseError, SampleBox};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpecError {
    #[error("invalid JSON: {0}")]
    Json(String),
    #[error("schema: {0}")]
    Schema(String),
    #[error("{key}: {source}")]
    Parse { key: String, source: ParseError },
    #[error("{key} depends on {coord}, which is not allowed in f_{pair}")]
    Forbidden {
        key: String,
        coord: String,
        pair: String,
    },
}

/// A hyperbolic system `u_ij = f_ij(x, u, u_i, u_j)` with `n` in `{2, 3}`.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemSpec {
    n: u8,
    f: BTreeMap<(u8, u8), Expr>,
    bounds: SampleBox,
}

/// Unordered pairs `i < j <= n`.
pub fn pairs(n: u8) -> Vec<(u8, u8)> {
    let mut v = Vec::new();
    for i in 1..=n {
        for j in i + 1..=n {
            v.push((i, j));
        }
    }
    v
}

fn pair_key(i: u8, j: u8) -> String {
    format!("f{}{}", i.min(j), i.max(j))
}

impl SystemSpec {
    /// Validate right-hand sides: every pair present and each `f_ij` free of
    /// derivatives other than `u_i`, `u_j`.
    pub fn new(n: u8, f: BTreeMap<(u8, u8), Expr>) -> Result<Self, SpecError> {
        if !(2..=3).contains(&n) {
            return Err(SpecError::Schema(format!("n must be 2 or 3, got {n}")));
        }
        let want = pairs(n);
        for (i, j) in f.keys() {
            if !want.contains(&(*i, *j)) {
                return Err(SpecError::Schema(format!(
                    "unexpected right-hand side {}",
                    pair_key(*i, *j)
                )));
            }
        }
        for &(i, j) in &want {
            let key = pair_key(i, j);
            let e = f
                .get(&(i, j))
                .ok_or_else(|| SpecError::Schema(format!("missing {key}")))?;
            for c in e.coords() {
                let ok = match &c {
                    Coordinate::X(k) => *k <= n,
                    Coordinate::U => true,
                    Coordinate::D(v) => v.len() == 1 && (v[0] == i || v[0] == j),
                };
                if !ok {
                    return Err(SpecError::Forbidden {
                        key: key.clone(),
                        coord: c.to_string(),
                        pair: format!("{i}{j}"),
                    });
                }
            }
        }
        Ok(SystemSpec {
            n,
            f,
            bounds: SampleBox::default(),
        })
    }

    pub fn with_bounds(mut self, bounds: SampleBox) -> Self {
        self.bounds = bounds;
        self
    }

    pub fn n(&self) -> u8 {
        self.n
    }

    pub fn bounds(&self) -> &SampleBox {
        &self.bounds
    }

    /// Right-hand side for the unordered pair `{i, j}`.
    pub fn f(&self, i: u8, j: u8) -> &Expr {
        &self.f[&(i.min(j), i.max(j))]
    }

    pub fn pairs(&self) -> Vec<(u8, u8)> {
        pairs(self.n)
    }

    /// Parse from JSON text.
    pub fn from_json(text: &str) -> Result<Self, SpecError> {
        let v: Value = serde_json::from_str(text).map_err(|e| SpecError::Json(e.to_string()))?;
        Self::from_value(&v)
    }

    /// Parse from a JSON value `{"n", "f12", "f13", "f23", "box"}`.
    pub fn from_value(v: &Value) -> Result<Self, SpecError> {
        let obj = v
            .as_object()
            .ok_or_else(|| SpecError::Schema("expected a JSON object".into()))?;
        let n = obj
            .get("n")
            .and_then(Value::as_u64)
            .ok_or_else(|| SpecError::Schema("\"n\" must be 2 or 3".into()))?;
        if !(2..=3).contains(&n) {
            return Err(SpecError::Schema(format!("n must be 2 or 3, got {n}")));
        }
        let n = n as u8;
        let mut f = BTreeMap::new();
        let mut bounds = SampleBox::default();
        for (key, val) in obj {
            match key.as_str() {
                "n" => {}
                "box" => bounds = parse_box(val, n)?,
                k if k.len() == 3 && k.starts_with('f') => {
                    let b = k.as_bytes();
                    let (i, j) = (b[1].wrapping_sub(b'0'), b[2].wrapping_sub(b'0'));
                    if !(1..=n).contains(&i) || !(1..=n).contains(&j) || i >= j {
                        return Err(SpecError::Schema(format!("unexpected key \"{k}\"")));
                    }
                    let text = val.as_str().ok_or_else(|| {
                        SpecError::Schema(format!("\"{k}\" must be an expression string"))
                    })?;
                    let e = parse_with(text, n).map_err(|source| SpecError::Parse {
                        key: k.into(),
                        source,
                    })?;
                    f.insert((i, j), e);
                }
                k => return Err(SpecError::Schema(format!("unexpected key \"{k}\""))),
            }
        }
        Ok(SystemSpec::new(n, f)?.with_bounds(bounds))
    }

    pub fn to_value(&self) -> Value {
        let mut m = Map::new();
        m.insert("n".into(), json!(self.n));
        for ((i, j), e) in &self.f {
            m.insert(pair_key(*i, *j), json!(e.to_string()));
        }
        Value::Object(m)
    }
}

fn parse_box(v: &Value, n: u8) -> Result<SampleBox, SpecError> {
    let obj = v
        .as_object()
        .ok_or_else(|| SpecError::Schema("\"box\" must be an object".into()))?;
    let mut b = SampleBox::default();
    for (name, spec) in obj {
        let bad = |m: &str| SpecError::Schema(format!("box entry \"{name}\": {m}"));
        let coord = parse_with(name, n)
            .ok()
            .and_then(|e| e.as_coord().cloned())
            .ok_or_else(|| bad("not a coordinate"))?;
        let nums: Vec<f64> = spec
            .as_array()
            .ok_or_else(|| bad("expected [lo, hi, excluded...]"))?
            .iter()
            .map(|x| x.as_f64().ok_or_else(|| bad("entries must be numbers")))
            .collect::<Result<_, _>>()?;
        if nums.len() < 2 || nums[0].partial_cmp(&nums[1]) != Some(std::cmp::Ordering::Less) {
            return Err(bad("need lo < hi"));
        }
        b.ranges.insert(
            coord,
            Interval {
                lo: nums[0],
                hi: nums[1],
                exclude: nums[2..].to_vec(),
            },
        );
    }
    Ok(b)
}
