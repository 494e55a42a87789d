//! Lax homomorphisms between quantales and Galois checks between them.

use std::fmt;
use std::sync::Arc;

use num_traits::{One, Zero};

use crate::num::{Extended, Real};
use crate::report::LawReport;

use super::{pplus, two, unit_interval, Quantale, QuantaleError, UnitTensor, Value};

type MapFn = dyn Fn(&Value) -> Value + Send + Sync;

/// A map between quantale carriers meant to be monotone, tensor-lax and
/// unit-lax. Nothing is assumed: [`check_lax_hom`] decides.
#[derive(Clone)]
pub struct LaxHom {
    pub name: String,
    pub source: Arc<Quantale>,
    pub target: Arc<Quantale>,
    map: Arc<MapFn>,
}

impl fmt::Debug for LaxHom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "LaxHom({}: {} -> {})",
            self.name,
            self.source.name(),
            self.target.name()
        )
    }
}

impl LaxHom {
    pub fn new(
        name: impl Into<String>,
        source: Arc<Quantale>,
        target: Arc<Quantale>,
        map: impl Fn(&Value) -> Value + Send + Sync + 'static,
    ) -> Self {
        LaxHom {
            name: name.into(),
            source,
            target,
            map: Arc::new(map),
        }
    }

    pub fn apply(&self, v: &Value) -> Value {
        (self.map)(v)
    }

    /// `next ∘ self`.
    pub fn then(&self, next: &LaxHom) -> Result<LaxHom, QuantaleError> {
        if !self.target.same_as(&next.source) {
            return Err(QuantaleError::Unsupported(format!(
                "cannot compose {} -> {} with {} -> {}",
                self.source.name(),
                self.target.name(),
                next.source.name(),
                next.target.name()
            )));
        }
        let (f, g) = (self.map.clone(), next.map.clone());
        Ok(LaxHom::new(
            format!("{} then {}", self.name, next.name),
            self.source.clone(),
            next.target.clone(),
            move |v| g(&f(v)),
        ))
    }

    pub fn identity(q: Arc<Quantale>) -> Self {
        LaxHom::new("identity", q.clone(), q, Value::clone)
    }

    pub fn constant(source: Arc<Quantale>, target: Arc<Quantale>, value: Value) -> Self {
        let name = format!("constant {}", target.format(&value));
        LaxHom::new(name, source, target, move |_| value.clone())
    }

    /// `u ↦ -ln u` from `([0,1], ·)` to `([0,∞], ≥, +)`, with `0 ↦ ∞`.
    pub fn neg_log() -> Self {
        LaxHom::new(
            "-ln",
            unit_interval(UnitTensor::Product),
            pplus(),
            |v| match v {
                Value::Rat(u) if u.is_zero() => Value::Ext(Extended::Infinite),
                Value::Rat(u) => Value::Ext(Extended::Finite(
                    &Real::ln(u).expect("argument is positive and small") * &(-crate::num::int(1)),
                )),
                other => panic!("{other:?} is not in the unit interval"),
            },
        )
    }

    /// `u ↦ 1 - u` from `([0,1], ⊕)` (Łukasiewicz) to `([0,∞], ≥, +)`.
    pub fn one_minus() -> Self {
        LaxHom::new(
            "1-u",
            unit_interval(UnitTensor::Lukasiewicz),
            pplus(),
            |v| match v {
                Value::Rat(u) => {
                    Value::Ext(Extended::from_rational(crate::num::Rational::one() - u))
                }
                other => panic!("{other:?} is not in the unit interval"),
            },
        )
    }

    /// The identity on numbers from `([0,∞], ≥, max)` to `([0,∞], ≥, +)`.
    pub fn pmax_to_pplus() -> Self {
        LaxHom::new("max to +", super::pmax(), pplus(), Value::clone)
    }
}

/// The standard lax homomorphisms relating a quantale `V` to `2 = {0 < 1}`.
#[derive(Debug, Clone)]
pub struct BuiltinLaxHoms {
    /// `2 → V`: `0 ↦ ⊥`, `1 ↦ k`.
    pub iota: LaxHom,
    /// `2 → V`: `0 ↦ ⊥`, `1 ↦ ⊤`.
    pub tau: LaxHom,
    /// `V → 2`: `v ↦ 1` iff `k ≤ v`.
    pub pessimist: LaxHom,
    /// `V → 2`: `v ↦ 1` iff `v ≠ ⊥`; only lax when `V` is optimistic.
    pub optimist: Option<LaxHom>,
}

pub fn builtin_lax_homs(v: &Arc<Quantale>) -> Result<BuiltinLaxHoms, QuantaleError> {
    if v.bottom() == v.top() {
        return Err(QuantaleError::Unsupported(format!(
            "{} is degenerate (⊥ = ⊤)",
            v.name()
        )));
    }
    let b = two();
    let (b0, b1) = (b.bottom(), b.top());
    let (bot, unit, top) = (v.bottom(), v.unit(), v.top());
    let choose = |lo: Value, hi: Value| {
        let b1 = b1.clone();
        move |x: &Value| if *x == b1 { hi.clone() } else { lo.clone() }
    };
    let iota = LaxHom::new(
        "iota",
        b.clone(),
        v.clone(),
        choose(bot.clone(), unit.clone()),
    );
    let tau = LaxHom::new("tau", b.clone(), v.clone(), choose(bot.clone(), top));
    let q = v.clone();
    let (lo, hi) = (b0.clone(), b1.clone());
    let pessimist = LaxHom::new("pessimist", v.clone(), b.clone(), move |x| {
        if q.leq(&unit, x) {
            hi.clone()
        } else {
            lo.clone()
        }
    });
    let optimist = v.is_optimistic().then(|| {
        let (lo, hi) = (b0.clone(), b1.clone());
        LaxHom::new("optimist", v.clone(), b.clone(), move |x| {
            if *x == bot {
                lo.clone()
            } else {
                hi.clone()
            }
        })
    });
    Ok(BuiltinLaxHoms {
        iota,
        tau,
        pessimist,
        optimist,
    })
}

impl BuiltinLaxHoms {
    pub fn optimist(&self) -> Result<&LaxHom, QuantaleError> {
        self.optimist.as_ref().ok_or_else(|| {
            QuantaleError::Unsupported(format!(
                "{} is not optimistic, so the optimist map is not lax",
                self.pessimist.source.name()
            ))
        })
    }
}

/// Checks monotonicity, `φ(u) ⊗ φ(v) ≤ φ(u ⊗ v)` and `l ≤ φ(k)`.
pub fn check_lax_hom(f: &LaxHom, samples: &[Value]) -> LawReport {
    let (v, w) = (&f.source, &f.target);
    let mut report = LawReport::new(
        "lax_hom",
        format!(
            "{} is a lax homomorphism {} -> {}",
            f.name,
            v.name(),
            w.name()
        ),
    );
    let unit_ok = w.leq(&w.unit(), &f.apply(&v.unit()));
    report.record(unit_ok, || {
        format!(
            "unit: l = {} is not below φ(k) = {}",
            w.format(&w.unit()),
            w.format(&f.apply(&v.unit()))
        )
    });
    let mut exact = true;
    for a in samples {
        for b in samples {
            let (fa, fb) = (f.apply(a), f.apply(b));
            let monotone = !v.leq(a, b) || w.leq(&fa, &fb);
            let lhs = w.tensor(&fa, &fb);
            let rhs = f.apply(&v.tensor(a, b));
            exact &= lhs == rhs;
            let lax = w.leq(&lhs, &rhs);
            report.record(monotone && lax, || {
                let pair = format!("({}, {})", v.format(a), v.format(b));
                if !monotone {
                    format!("monotonicity fails at {pair}")
                } else {
                    format!(
                        "φ(u) ⊗ φ(v) = {} is not below φ(u ⊗ v) = {} at {pair}",
                        w.format(&lhs),
                        w.format(&rhs)
                    )
                }
            });
        }
    }
    if exact && report.is_pass() {
        report.detail("tensor preserved exactly on all sampled pairs");
    }
    report
}

/// Checks `left(w) ≤ v ⟺ w ≤ right(v)` for `left: W → V`, `right: V → W`.
pub fn check_adjunction(
    left: &LaxHom,
    right: &LaxHom,
    left_samples: &[Value],
    right_samples: &[Value],
) -> LawReport {
    let mut report = LawReport::new(
        "adjunction",
        format!("{} is left adjoint to {}", left.name, right.name),
    );
    if !left.source.same_as(&right.target) || !left.target.same_as(&right.source) {
        report.fail(format!(
            "ill-typed pair: left {} -> {}, right {} -> {}",
            left.source.name(),
            left.target.name(),
            right.source.name(),
            right.target.name()
        ));
        return report;
    }
    let (w, v) = (&left.source, &left.target);
    for a in left_samples {
        for b in right_samples {
            let lhs = v.leq(&left.apply(a), b);
            let rhs = w.leq(a, &right.apply(b));
            report.record(lhs == rhs, || {
                format!(
                    "at (w, v) = ({}, {}): left(w) = {} ≤ v is {lhs}, w ≤ right(v) = {} is {rhs}",
                    w.format(a),
                    v.format(b),
                    v.format(&left.apply(a)),
                    w.format(&right.apply(b))
                )
            });
        }
    }
    report
}
