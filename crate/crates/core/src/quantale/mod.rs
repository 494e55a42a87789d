//! Commutative unital quantales with exact arithmetic.
//!
//! Only finite joins and meets are ever evaluated: every carrier enriched over
//! a quantale here is finite, so the completeness of the lattice is never
//! exercised beyond finite lists.

mod finite;
mod grid;
pub mod lax;

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::num::{format_rational, parse_rational, rat, Extended, Rational, Real};
use crate::par;
use crate::report::LawReport;

use finite::FiniteTable;
pub use grid::{Grid, GridDistribution, GridTensor};
pub use lax::{builtin_lax_homs, check_adjunction, check_lax_hom, BuiltinLaxHoms, LaxHom};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum QuantaleError {
    #[error("invalid quantale descriptor: {0}")]
    Descriptor(String),
    #[error("quantale law `{law}` fails at {witness}")]
    Law { law: String, witness: String },
    #[error("invalid element: {0}")]
    Value(String),
    #[error("{0}")]
    Unsupported(String),
}

/// An element of some quantale. Which variant is used depends on the carrier;
/// mixing elements of different quantales is a programming error.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Value {
    /// Position in a finite table.
    Idx(usize),
    /// A point of the rational unit interval.
    Rat(Rational),
    /// A point of `[0, ∞]` (for the reversed-order quantales).
    Ext(Extended),
    /// A grid distribution profile.
    Dist(Arc<[Rational]>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UnitTensor {
    Min,
    Product,
    Lukasiewicz,
}

/// Serializable description of a quantale.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum QuantaleSpec {
    Two,
    Chain {
        n: usize,
    },
    LukasiewiczChain {
        n: usize,
    },
    UnitInterval {
        tensor: UnitTensor,
    },
    Pplus,
    Pmax,
    Table {
        elements: Vec<String>,
        /// `leq[i][j]` iff `elements[i] ≤ elements[j]`.
        leq: Vec<Vec<bool>>,
        /// Entries name elements.
        tensor: Vec<Vec<String>>,
        unit: String,
    },
    DeltaGrid {
        h: String,
        #[serde(rename = "N")]
        n: usize,
        tensor: GridTensor,
    },
}

impl QuantaleSpec {
    pub fn build(&self) -> Result<Arc<Quantale>, QuantaleError> {
        Quantale::new(self.clone()).map(Arc::new)
    }
}

impl fmt::Display for QuantaleSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QuantaleSpec::Two => write!(f, "two"),
            QuantaleSpec::Chain { n } => write!(f, "chain:{n}"),
            QuantaleSpec::LukasiewiczChain { n } => write!(f, "lukasiewicz_chain:{n}"),
            QuantaleSpec::UnitInterval { tensor } => {
                let t = match tensor {
                    UnitTensor::Min => "min",
                    UnitTensor::Product => "product",
                    UnitTensor::Lukasiewicz => "lukasiewicz",
                };
                write!(f, "unit_interval:{t}")
            }
            QuantaleSpec::Pplus => write!(f, "pplus"),
            QuantaleSpec::Pmax => write!(f, "pmax"),
            QuantaleSpec::Table { .. } => {
                write!(
                    f,
                    "{}",
                    serde_json::to_string(self).map_err(|_| fmt::Error)?
                )
            }
            QuantaleSpec::DeltaGrid { h, n, tensor } => {
                let t = match tensor {
                    GridTensor::Min => "min",
                    GridTensor::Conv => "conv",
                };
                write!(f, "delta_grid:{h}:{n}:{t}")
            }
        }
    }
}

impl FromStr for QuantaleSpec {
    type Err = QuantaleError;

    /// Accepts JSON descriptors and the compact forms `chain:3`, `chain(3)`,
    /// `unit_interval:product`, `delta_grid:1/2:4:conv`, …
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        if t.starts_with('{') {
            return serde_json::from_str(t).map_err(|e| QuantaleError::Descriptor(e.to_string()));
        }
        let norm: String = t
            .chars()
            .filter(|c| *c != ')' && !c.is_whitespace())
            .map(|c| if c == '(' || c == ',' { ':' } else { c })
            .collect();
        let parts: Vec<&str> = norm.split(':').collect();
        let bad = || QuantaleError::Descriptor(format!("unknown quantale `{s}`"));
        let size = |p: Option<&&str>| -> Result<usize, QuantaleError> {
            p.and_then(|v| v.parse().ok()).ok_or_else(bad)
        };
        let spec = match parts[0] {
            "two" | "2" if parts.len() == 1 => QuantaleSpec::Two,
            "chain" if parts.len() == 2 => QuantaleSpec::Chain {
                n: size(parts.get(1))?,
            },
            "lukasiewicz_chain" | "luk_chain" if parts.len() == 2 => {
                QuantaleSpec::LukasiewiczChain {
                    n: size(parts.get(1))?,
                }
            }
            "pplus" if parts.len() == 1 => QuantaleSpec::Pplus,
            "pmax" if parts.len() == 1 => QuantaleSpec::Pmax,
            "unit_interval" if parts.len() == 2 => QuantaleSpec::UnitInterval {
                tensor: match parts[1] {
                    "min" => UnitTensor::Min,
                    "product" => UnitTensor::Product,
                    "lukasiewicz" => UnitTensor::Lukasiewicz,
                    _ => return Err(bad()),
                },
            },
            "delta_grid" if parts.len() == 4 => QuantaleSpec::DeltaGrid {
                h: parts[1].to_string(),
                n: size(parts.get(2))?,
                tensor: match parts[3] {
                    "min" => GridTensor::Min,
                    "conv" => GridTensor::Conv,
                    _ => return Err(bad()),
                },
            },
            _ => return Err(bad()),
        };
        Ok(spec)
    }
}

/// Capabilities and structural properties of a quantale.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Flags {
    /// `⊗ = ∧`.
    pub is_frame: bool,
    /// `k = ⊤`.
    pub is_integral: bool,
    /// `u ⊗ v = ⊥` forces `u = ⊥` or `v = ⊥`.
    pub is_optimistic: bool,
    pub has_hom: bool,
    pub is_finite: bool,
    /// The carrier only approximates the intended quantale.
    pub approximate_carrier: bool,
}

#[derive(Debug, Clone)]
enum Carrier {
    Finite(FiniteTable),
    Unit(UnitTensor),
    PPlus,
    PMax,
    Grid(Grid),
}

#[derive(Debug, Clone)]
pub struct Quantale {
    spec: QuantaleSpec,
    carrier: Carrier,
    flags: Flags,
}

pub fn make_quantale(spec: &QuantaleSpec) -> Result<Arc<Quantale>, QuantaleError> {
    spec.build()
}

pub fn two() -> Arc<Quantale> {
    QuantaleSpec::Two.build().expect("two is a quantale")
}

pub fn chain(n: usize) -> Result<Arc<Quantale>, QuantaleError> {
    QuantaleSpec::Chain { n }.build()
}

pub fn lukasiewicz_chain(n: usize) -> Result<Arc<Quantale>, QuantaleError> {
    QuantaleSpec::LukasiewiczChain { n }.build()
}

pub fn pplus() -> Arc<Quantale> {
    QuantaleSpec::Pplus.build().expect("pplus is a quantale")
}

pub fn pmax() -> Arc<Quantale> {
    QuantaleSpec::Pmax.build().expect("pmax is a quantale")
}

pub fn unit_interval(tensor: UnitTensor) -> Arc<Quantale> {
    QuantaleSpec::UnitInterval { tensor }
        .build()
        .expect("unit interval is a quantale")
}

impl Quantale {
    pub fn new(spec: QuantaleSpec) -> Result<Self, QuantaleError> {
        let carrier = match &spec {
            QuantaleSpec::Two => Carrier::Finite(FiniteTable::chain(2, usize::min)?),
            QuantaleSpec::Chain { n } => Carrier::Finite(FiniteTable::chain(*n, usize::min)?),
            QuantaleSpec::LukasiewiczChain { n } => {
                let top = n.saturating_sub(1);
                Carrier::Finite(FiniteTable::chain(*n, |a, b| (a + b).saturating_sub(top))?)
            }
            QuantaleSpec::UnitInterval { tensor } => Carrier::Unit(*tensor),
            QuantaleSpec::Pplus => Carrier::PPlus,
            QuantaleSpec::Pmax => Carrier::PMax,
            QuantaleSpec::Table {
                elements,
                leq,
                tensor,
                unit,
            } => Carrier::Finite(table_from_spec(elements, leq, tensor, unit)?),
            QuantaleSpec::DeltaGrid { h, n, tensor } => {
                let step =
                    parse_rational(h).map_err(|e| QuantaleError::Descriptor(e.to_string()))?;
                Carrier::Grid(Grid::new(step, *n, *tensor)?)
            }
        };
        let flags = match &carrier {
            Carrier::Finite(t) => Flags {
                is_frame: t.is_frame(),
                is_integral: t.unit == t.top,
                is_optimistic: t.is_optimistic(),
                has_hom: true,
                is_finite: true,
                approximate_carrier: false,
            },
            Carrier::Unit(t) => Flags {
                is_frame: *t == UnitTensor::Min,
                is_integral: true,
                is_optimistic: *t != UnitTensor::Lukasiewicz,
                has_hom: true,
                is_finite: false,
                approximate_carrier: false,
            },
            Carrier::PPlus | Carrier::PMax => Flags {
                is_frame: matches!(carrier, Carrier::PMax),
                is_integral: true,
                is_optimistic: true,
                has_hom: true,
                is_finite: false,
                approximate_carrier: false,
            },
            Carrier::Grid(g) => Flags {
                is_frame: g.tensor == GridTensor::Min,
                is_integral: true,
                // A nonzero profile is positive at the saturation point, and
                // both tensors are positive there for positive arguments.
                is_optimistic: true,
                has_hom: false,
                is_finite: false,
                approximate_carrier: g.tensor == GridTensor::Conv,
            },
        };
        Ok(Quantale {
            spec,
            carrier,
            flags,
        })
    }

    pub fn spec(&self) -> &QuantaleSpec {
        &self.spec
    }

    pub fn flags(&self) -> Flags {
        self.flags
    }

    pub fn is_frame(&self) -> bool {
        self.flags.is_frame
    }

    pub fn is_integral(&self) -> bool {
        self.flags.is_integral
    }

    pub fn is_optimistic(&self) -> bool {
        self.flags.is_optimistic
    }

    pub fn is_finite(&self) -> bool {
        self.flags.is_finite
    }

    pub fn has_hom(&self) -> bool {
        self.flags.has_hom
    }

    pub fn name(&self) -> String {
        match &self.spec {
            QuantaleSpec::Table { elements, .. } => format!("table({})", elements.len()),
            s => s.to_string(),
        }
    }

    /// Two quantales are the same when their descriptors agree.
    pub fn same_as(&self, other: &Quantale) -> bool {
        std::ptr::eq(self, other) || self.spec == other.spec
    }

    /// Number of elements of a finite carrier.
    pub fn size(&self) -> Option<usize> {
        match &self.carrier {
            Carrier::Finite(t) => Some(t.size()),
            _ => None,
        }
    }

    /// All elements of a finite carrier, in table order.
    pub fn elements(&self) -> Option<Vec<Value>> {
        self.size().map(|n| (0..n).map(Value::Idx).collect())
    }

    /// Number of elements in a longest chain, for finite carriers.
    pub fn height(&self) -> Option<usize> {
        match &self.carrier {
            Carrier::Finite(t) => Some(t.height),
            _ => None,
        }
    }

    pub fn grid(&self) -> Option<&Grid> {
        match &self.carrier {
            Carrier::Grid(g) => Some(g),
            _ => None,
        }
    }

    pub fn bottom(&self) -> Value {
        match &self.carrier {
            Carrier::Finite(t) => Value::Idx(t.bottom),
            Carrier::Unit(_) => Value::Rat(Rational::zero()),
            Carrier::PPlus | Carrier::PMax => Value::Ext(Extended::Infinite),
            Carrier::Grid(g) => Value::Dist(g.constant(Rational::zero())),
        }
    }

    pub fn top(&self) -> Value {
        match &self.carrier {
            Carrier::Finite(t) => Value::Idx(t.top),
            Carrier::Unit(_) => Value::Rat(Rational::one()),
            Carrier::PPlus | Carrier::PMax => Value::Ext(Extended::zero()),
            Carrier::Grid(g) => Value::Dist(g.constant(Rational::one())),
        }
    }

    pub fn unit(&self) -> Value {
        match &self.carrier {
            Carrier::Finite(t) => Value::Idx(t.unit),
            _ => self.top(),
        }
    }

    fn foreign(&self, v: &Value) -> ! {
        panic!("{v:?} is not an element of {}", self.name())
    }

    pub fn leq(&self, a: &Value, b: &Value) -> bool {
        match (&self.carrier, a, b) {
            (Carrier::Finite(t), Value::Idx(i), Value::Idx(j)) => t.le(*i, *j),
            (Carrier::Unit(_), Value::Rat(x), Value::Rat(y)) => x <= y,
            (Carrier::PPlus | Carrier::PMax, Value::Ext(x), Value::Ext(y)) => x >= y,
            (Carrier::Grid(_), Value::Dist(x), Value::Dist(y)) => {
                x.iter().zip(y.iter()).all(|(p, q)| p <= q)
            }
            (_, Value::Idx(_) | Value::Rat(_) | Value::Ext(_) | Value::Dist(_), _) => {
                self.foreign(if self.contains(a) { b } else { a })
            }
        }
    }

    pub fn tensor(&self, a: &Value, b: &Value) -> Value {
        match (&self.carrier, a, b) {
            (Carrier::Finite(t), Value::Idx(i), Value::Idx(j)) => Value::Idx(t.mul(*i, *j)),
            (Carrier::Unit(m), Value::Rat(x), Value::Rat(y)) => Value::Rat(match m {
                UnitTensor::Min => x.min(y).clone(),
                UnitTensor::Product => x * y,
                UnitTensor::Lukasiewicz => (x + y - Rational::one()).max(Rational::zero()),
            }),
            (Carrier::PPlus, Value::Ext(x), Value::Ext(y)) => Value::Ext(x.sum(y)),
            (Carrier::PMax, Value::Ext(x), Value::Ext(y)) => Value::Ext(x.max(y).clone()),
            (Carrier::Grid(g), Value::Dist(x), Value::Dist(y)) => Value::Dist(g.combine(x, y)),
            _ => self.foreign(if self.contains(a) { b } else { a }),
        }
    }

    pub fn join(&self, a: &Value, b: &Value) -> Value {
        match (&self.carrier, a, b) {
            (Carrier::Finite(t), Value::Idx(i), Value::Idx(j)) => Value::Idx(t.sup(*i, *j)),
            (Carrier::Unit(_), Value::Rat(x), Value::Rat(y)) => Value::Rat(x.max(y).clone()),
            (Carrier::PPlus | Carrier::PMax, Value::Ext(x), Value::Ext(y)) => {
                Value::Ext(x.min(y).clone())
            }
            (Carrier::Grid(_), Value::Dist(x), Value::Dist(y)) => Value::Dist(
                x.iter()
                    .zip(y.iter())
                    .map(|(p, q)| p.max(q).clone())
                    .collect(),
            ),
            _ => self.foreign(if self.contains(a) { b } else { a }),
        }
    }

    pub fn meet(&self, a: &Value, b: &Value) -> Value {
        match (&self.carrier, a, b) {
            (Carrier::Finite(t), Value::Idx(i), Value::Idx(j)) => Value::Idx(t.inf(*i, *j)),
            (Carrier::Unit(_), Value::Rat(x), Value::Rat(y)) => Value::Rat(x.min(y).clone()),
            (Carrier::PPlus | Carrier::PMax, Value::Ext(x), Value::Ext(y)) => {
                Value::Ext(x.max(y).clone())
            }
            (Carrier::Grid(_), Value::Dist(x), Value::Dist(y)) => Value::Dist(
                x.iter()
                    .zip(y.iter())
                    .map(|(p, q)| p.min(q).clone())
                    .collect(),
            ),
            _ => self.foreign(if self.contains(a) { b } else { a }),
        }
    }

    /// Join of a finite list; `⊥` for the empty list.
    pub fn join_all<'a, I: IntoIterator<Item = &'a Value>>(&self, items: I) -> Value {
        items
            .into_iter()
            .fold(self.bottom(), |acc, v| self.join(&acc, v))
    }

    /// Meet of a finite list; `⊤` for the empty list.
    pub fn meet_all<'a, I: IntoIterator<Item = &'a Value>>(&self, items: I) -> Value {
        items
            .into_iter()
            .fold(self.top(), |acc, v| self.meet(&acc, v))
    }

    /// The residual `hom(u, w) = ⋁{v : v ⊗ u ≤ w}`, when available.
    pub fn hom(&self, u: &Value, w: &Value) -> Option<Value> {
        Some(match (&self.carrier, u, w) {
            (Carrier::Finite(t), Value::Idx(i), Value::Idx(j)) => {
                Value::Idx(t.hom[i * t.size() + j])
            }
            (Carrier::Unit(m), Value::Rat(x), Value::Rat(y)) => Value::Rat(match m {
                UnitTensor::Min if x <= y => Rational::one(),
                UnitTensor::Min => y.clone(),
                UnitTensor::Product if x <= y => Rational::one(),
                UnitTensor::Product => y / x,
                UnitTensor::Lukasiewicz => (Rational::one() - x + y).min(Rational::one()),
            }),
            (Carrier::PPlus, Value::Ext(x), Value::Ext(y)) => Value::Ext(y.monus(x)),
            (Carrier::PMax, Value::Ext(x), Value::Ext(y)) => {
                if x >= y {
                    Value::Ext(Extended::zero())
                } else {
                    Value::Ext(y.clone())
                }
            }
            (Carrier::Grid(_), Value::Dist(_), Value::Dist(_)) => return None,
            _ => self.foreign(if self.contains(u) { w } else { u }),
        })
    }

    pub fn contains(&self, v: &Value) -> bool {
        match (&self.carrier, v) {
            (Carrier::Finite(t), Value::Idx(i)) => *i < t.size(),
            (Carrier::Unit(_), Value::Rat(x)) => *x >= Rational::zero() && *x <= Rational::one(),
            (Carrier::PPlus | Carrier::PMax, Value::Ext(x)) => x.is_nonnegative(),
            (Carrier::Grid(g), Value::Dist(x)) => g.check(x).is_ok(),
            _ => false,
        }
    }

    /// Parses an element from its textual form. `⊥`/`bot` and `⊤`/`top` are
    /// accepted everywhere; chain labels may also be given as decimals.
    pub fn parse_value(&self, s: &str) -> Result<Value, QuantaleError> {
        let t = s.trim();
        let bad = |why: String| QuantaleError::Value(format!("`{s}` in {}: {why}", self.name()));
        if let Carrier::Finite(table) = &self.carrier {
            if let Some(i) = table.labels.iter().position(|l| l == t) {
                return Ok(Value::Idx(i));
            }
        }
        match t {
            "⊥" | "bot" | "bottom" => return Ok(self.bottom()),
            "⊤" | "top" => return Ok(self.top()),
            _ => {}
        }
        match &self.carrier {
            Carrier::Finite(table) => {
                let r = parse_rational(t).map_err(|_| bad("no such element".into()))?;
                let label = format_rational(&r);
                table
                    .labels
                    .iter()
                    .position(|l| *l == label)
                    .map(Value::Idx)
                    .ok_or_else(|| bad("no such element".into()))
            }
            Carrier::Unit(_) => {
                let r = parse_rational(t).map_err(|e| bad(e.to_string()))?;
                let v = Value::Rat(r);
                if self.contains(&v) {
                    Ok(v)
                } else {
                    Err(bad("outside [0,1]".into()))
                }
            }
            Carrier::PPlus | Carrier::PMax => {
                let x: Extended = t
                    .parse()
                    .map_err(|e: crate::num::NumError| bad(e.to_string()))?;
                if x.is_nonnegative() {
                    Ok(Value::Ext(x))
                } else {
                    Err(bad("negative distance".into()))
                }
            }
            Carrier::Grid(g) => g.parse(t).map(Value::Dist),
        }
    }

    pub fn format(&self, v: &Value) -> String {
        match (&self.carrier, v) {
            (Carrier::Finite(t), Value::Idx(i)) if *i < t.size() => t.labels[*i].clone(),
            (_, Value::Rat(r)) => format_rational(r),
            (_, Value::Ext(x)) => x.to_string(),
            (_, Value::Dist(d)) => Grid::format(d),
            (_, Value::Idx(i)) => format!("#{i}"),
        }
    }

    pub fn format_all(&self, vs: &[Value]) -> String {
        let parts: Vec<String> = vs.iter().map(|v| self.format(v)).collect();
        format!("({})", parts.join(", "))
    }

    /// Deterministic sample of elements: the whole carrier when finite and
    /// small enough, otherwise `⊥`, `k`, `⊤` plus pseudo-random elements.
    pub fn sample(&self, n: usize, seed: u64) -> Vec<Value> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        if let Some(all) = self.elements() {
            if n >= all.len() {
                return all;
            }
            let mut picked: Vec<usize> = (0..all.len()).collect();
            picked.shuffle(&mut rng);
            picked.truncate(n);
            picked.sort_unstable();
            return picked.into_iter().map(Value::Idx).collect();
        }
        let mut out: Vec<Value> = Vec::new();
        let mut seen = HashSet::new();
        for v in [self.bottom(), self.unit(), self.top()] {
            if out.len() < n && seen.insert(v.clone()) {
                out.push(v);
            }
        }
        let mut attempts = 0;
        while out.len() < n && attempts < 100 * n {
            attempts += 1;
            let v = self.random_element(&mut rng);
            if seen.insert(v.clone()) {
                out.push(v);
            }
        }
        out
    }

    fn random_element(&self, rng: &mut ChaCha8Rng) -> Value {
        let fraction = |rng: &mut ChaCha8Rng| {
            let d = rng.gen_range(1..=32i64);
            rat(rng.gen_range(0..=d), d)
        };
        match &self.carrier {
            Carrier::Finite(t) => Value::Idx(rng.gen_range(0..t.size())),
            Carrier::Unit(_) => Value::Rat(fraction(rng)),
            Carrier::PPlus | Carrier::PMax => {
                if rng.gen_ratio(1, 5) {
                    // -ln(p/q) for some 0 < p < q
                    let q = rng.gen_range(2..=12i64);
                    let p = rng.gen_range(1..q);
                    let l = Real::ln(&rat(q, p)).expect("positive argument");
                    Value::Ext(Extended::Finite(l))
                } else {
                    let d = rng.gen_range(1..=16i64);
                    Value::Ext(Extended::from_rational(rat(rng.gen_range(0..=12 * d), d)))
                }
            }
            Carrier::Grid(g) => {
                let mut vs: Vec<Rational> = (0..g.len()).map(|_| fraction(rng)).collect();
                vs.sort();
                Value::Dist(vs.into())
            }
        }
    }

    /// The rational `i/(n-1)` labelling position `i` of a chain, if this is a
    /// chain quantale.
    pub fn chain_value(&self, v: &Value) -> Option<Rational> {
        match (&self.spec, v) {
            (
                QuantaleSpec::Two
                | QuantaleSpec::Chain { .. }
                | QuantaleSpec::LukasiewiczChain { .. },
                Value::Idx(i),
            ) => {
                let n = self.size()?;
                Some(rat(*i as i64, (n - 1) as i64))
            }
            _ => None,
        }
    }

    /// Element of a finite chain carrying the label `num/den`.
    pub fn chain_element(&self, r: &Rational) -> Option<Value> {
        let n = self.size()?;
        (0..n)
            .map(Value::Idx)
            .find(|v| self.chain_value(v).as_ref() == Some(r))
    }
}

fn table_from_spec(
    elements: &[String],
    leq: &[Vec<bool>],
    tensor: &[Vec<String>],
    unit: &str,
) -> Result<FiniteTable, QuantaleError> {
    let n = elements.len();
    let index = |l: &str| {
        elements
            .iter()
            .position(|e| e == l)
            .ok_or_else(|| QuantaleError::Descriptor(format!("unknown element `{l}` in table")))
    };
    if leq.len() != n || leq.iter().any(|r| r.len() != n) {
        return Err(QuantaleError::Descriptor(format!("`leq` must be {n}x{n}")));
    }
    if tensor.len() != n || tensor.iter().any(|r| r.len() != n) {
        return Err(QuantaleError::Descriptor(format!(
            "`tensor` must be {n}x{n}"
        )));
    }
    let flat_leq = leq.iter().flatten().copied().collect();
    let flat_tensor = tensor
        .iter()
        .flatten()
        .map(|l| index(l))
        .collect::<Result<Vec<_>, _>>()?;
    FiniteTable::build(elements.to_vec(), flat_leq, flat_tensor, index(unit)?)
}

/// Checks the quantale laws on every triple drawn from `samples`.
///
/// Besides the tensor laws this covers the order structure of joins and
/// meets, binary distributivity of the lattice, the residuation law when `hom`
/// exists, and consistency of the declared flags with the samples.
pub fn check_quantale_laws(q: &Quantale, samples: &[Value]) -> LawReport {
    let mut report = LawReport::new(
        "quantale_laws",
        format!(
            "{} is a commutative unital quantale whose lattice is a frame",
            q.name()
        ),
    );
    if let Some(v) = samples.iter().find(|v| !q.contains(v)) {
        report.fail(format!("sample {v:?} is not an element"));
        return report;
    }
    let n = samples.len();
    let outcomes = par::map_range(n * n * n, |idx| {
        let (u, v, w) = (
            &samples[idx / (n * n)],
            &samples[idx / n % n],
            &samples[idx % n],
        );
        check_triple(q, u, v, w).map_err(|law| {
            format!(
                "{law} fails at {}",
                q.format_all(&[u.clone(), v.clone(), w.clone()])
            )
        })
    });
    report.record_all(outcomes);

    let covers = q
        .size()
        .is_some_and(|s| (0..s).all(|i| samples.contains(&Value::Idx(i))));
    if covers {
        let pairs: Vec<(Value, Value)> = samples
            .iter()
            .flat_map(|u| samples.iter().map(move |v| (u.clone(), v.clone())))
            .collect();
        let frame = pairs.iter().all(|(u, v)| q.tensor(u, v) == q.meet(u, v));
        let optimistic = pairs
            .iter()
            .all(|(u, v)| q.tensor(u, v) != q.bottom() || *u == q.bottom() || *v == q.bottom());
        let f = q.flags();
        report.record(
            frame == f.is_frame
                && optimistic == f.is_optimistic
                && (q.unit() == q.top()) == f.is_integral,
            || {
                format!(
                    "declared flags {f:?} disagree with exhaustive checks (frame {frame}, optimistic {optimistic})"
                )
            },
        );
    }
    let f = q.flags();
    report.detail(format!(
        "is_frame = {}, is_integral = {}, is_optimistic = {}",
        f.is_frame, f.is_integral, f.is_optimistic
    ));
    report
}

fn check_triple(q: &Quantale, u: &Value, v: &Value, w: &Value) -> Result<(), &'static str> {
    let t = |a: &Value, b: &Value| q.tensor(a, b);
    let le = |a: &Value, b: &Value| q.leq(a, b);
    if le(u, v) && le(v, u) && u != v {
        return Err("antisymmetry of the order");
    }
    if le(u, v) && le(v, w) && !le(u, w) {
        return Err("transitivity of the order");
    }
    let j = q.join(u, v);
    if !le(u, &j) || !le(v, &j) || (le(u, w) && le(v, w) && !le(&j, w)) {
        return Err("join is the least upper bound");
    }
    let m = q.meet(u, v);
    if !le(&m, u) || !le(&m, v) || (le(w, u) && le(w, v) && !le(w, &m)) {
        return Err("meet is the greatest lower bound");
    }
    if !le(&q.bottom(), u) || !le(u, &q.top()) {
        return Err("bottom and top bound the carrier");
    }
    if t(u, v) != t(v, u) {
        return Err("commutativity");
    }
    if t(&t(u, v), w) != t(u, &t(v, w)) {
        return Err("associativity");
    }
    if t(u, &q.unit()) != *u {
        return Err("unit");
    }
    if t(u, &q.bottom()) != q.bottom() {
        return Err("v ⊗ ⊥ = ⊥");
    }
    if t(u, &q.join(v, w)) != q.join(&t(u, v), &t(u, w)) {
        return Err("distributivity of ⊗ over joins");
    }
    if q.meet(u, &q.join(v, w)) != q.join(&q.meet(u, v), &q.meet(u, w)) {
        return Err("distributivity of joins over finite meets");
    }
    if let Some(h) = q.hom(v, w) {
        if le(&t(u, v), w) != le(u, &h) {
            return Err("residuation v ⊗ u ≤ w iff v ≤ hom(u, w)");
        }
    }
    let f = q.flags();
    if f.is_frame && t(u, v) != q.meet(u, v) {
        return Err("declared frame flag (⊗ = ∧)");
    }
    if f.is_integral && !le(&t(u, v), &q.meet(u, v)) {
        return Err("integrality (u ⊗ v ≤ u ∧ v)");
    }
    if f.is_optimistic && t(u, v) == q.bottom() && *u != q.bottom() && *v != q.bottom() {
        return Err("declared optimistic flag");
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ext(s: &str) -> Value {
        Value::Ext(s.parse().unwrap())
    }

    #[test]
    fn pplus_residual() {
        let q = pplus();
        assert_eq!(q.hom(&ext("3"), &ext("5")), Some(ext("2")));
        assert_eq!(q.hom(&ext("5"), &ext("3")), Some(ext("0")));
        assert_eq!(q.hom(&ext("inf"), &ext("3")), Some(ext("0")));
        assert_eq!(q.hom(&ext("3"), &ext("inf")), Some(ext("inf")));
        assert!(q.leq(&ext("5"), &ext("3")));
        assert_eq!(q.join(&ext("5"), &ext("3")), ext("3"));
        assert_eq!(q.bottom(), ext("inf"));
    }

    #[test]
    fn lukasiewicz_values() {
        let q = unit_interval(UnitTensor::Lukasiewicz);
        let a = q.parse_value("0.7").unwrap();
        let b = q.parse_value("0.6").unwrap();
        assert_eq!(q.tensor(&a, &b), Value::Rat(rat(3, 10)));
        let c = lukasiewicz_chain(3).unwrap();
        let half = c.parse_value("1/2").unwrap();
        assert_eq!(c.format(&c.tensor(&half, &half)), "0");
        assert!(!c.is_frame());
        assert!(c.is_integral());
        assert!(!c.is_optimistic());
        assert!(chain(3).unwrap().is_frame());
    }

    #[test]
    fn specs_parse_in_both_syntaxes() {
        for s in [
            "two",
            "chain:3",
            "lukasiewicz_chain:4",
            "pplus",
            "pmax",
            "unit_interval:product",
            "delta_grid:1/2:4:conv",
        ] {
            let spec: QuantaleSpec = s.parse().unwrap();
            assert_eq!(spec.to_string(), s);
            let json = serde_json::to_string(&spec).unwrap();
            assert_eq!(json.parse::<QuantaleSpec>().unwrap(), spec);
        }
        assert_eq!(
            "chain(3)".parse::<QuantaleSpec>().unwrap(),
            QuantaleSpec::Chain { n: 3 }
        );
        let g: QuantaleSpec = r#"{"kind":"delta_grid","h":"1/2","N":4,"tensor":"min"}"#
            .parse()
            .unwrap();
        assert!(g.build().is_ok());
        assert!("delta_grid:0:4:min"
            .parse::<QuantaleSpec>()
            .unwrap()
            .build()
            .is_err());
        assert!("delta_grid:1:0:min"
            .parse::<QuantaleSpec>()
            .unwrap()
            .build()
            .is_err());
        assert!("chain".parse::<QuantaleSpec>().is_err());
    }

    #[test]
    fn table_rejects_non_associative_tensor() {
        // (a ⊗ b) ⊗ b = a but a ⊗ (b ⊗ b) = a ⊗ a = 0
        let spec = QuantaleSpec::Table {
            elements: vec!["0".into(), "a".into(), "b".into(), "1".into()],
            leq: (0..4).map(|i| (0..4).map(|j| i <= j).collect()).collect(),
            tensor: vec![
                vec!["0", "0", "0", "0"],
                vec!["0", "0", "a", "a"],
                vec!["0", "a", "a", "b"],
                vec!["0", "a", "b", "1"],
            ]
            .into_iter()
            .map(|r| r.into_iter().map(String::from).collect())
            .collect(),
            unit: "1".into(),
        };
        match spec.build() {
            Err(QuantaleError::Law { law, witness }) => {
                assert_eq!(law, "associativity");
                assert!(witness.starts_with('('));
            }
            other => panic!("expected a law violation, got {other:?}"),
        }
    }

    #[test]
    fn grid_convolution_matches_double_loop() {
        let q: Arc<Quantale> = "delta_grid:1:3:conv"
            .parse::<QuantaleSpec>()
            .unwrap()
            .build()
            .unwrap();
        assert!(q.flags().approximate_carrier);
        let a = q.parse_value("[0, 1/2, 1/2, 1, 1]").unwrap();
        let b = q.parse_value("[1/4, 1/4, 1, 1, 1]").unwrap();
        let Value::Dist(c) = q.tensor(&a, &b) else {
            unreachable!()
        };
        assert_eq!(Grid::format(&c), "[0, 1/8, 1/8, 1/2, 1]");
    }

    #[test]
    fn laws_hold_on_builtin_quantales() {
        for s in [
            "two",
            "chain:4",
            "lukasiewicz_chain:4",
            "pplus",
            "pmax",
            "unit_interval:min",
            "unit_interval:product",
            "unit_interval:lukasiewicz",
            "delta_grid:1:2:min",
            "delta_grid:1:2:conv",
        ] {
            let q = s.parse::<QuantaleSpec>().unwrap().build().unwrap();
            let samples = q.sample(6, 7);
            let r = check_quantale_laws(&q, &samples);
            assert!(r.is_pass(), "{s}: {:?}", r.witness);
        }
    }
}
