//! V-relations on finite carriers and V-categories.
//!
//! A V-relation `r: X ⇸ Y` is a `|X| × |Y|` matrix over a quantale. Composition
//! is written in diagrammatic-reversed order as in `s · r` (first `r`, then
//! `s`) and evaluated as `(s·r)(x, z) = ⋁_y r(x, y) ⊗ s(y, z)`.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::par;
use crate::quantale::{check_lax_hom, LaxHom, Quantale, QuantaleError, Value};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum VRelError {
    #[error("carrier mismatch: {0}")]
    CarrierMismatch(String),
    #[error("matrix shape: {0}")]
    Shape(String),
    #[error("not a V-category: {0}")]
    NotVCategory(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("closure did not stabilise within {steps} squarings")]
    NonTermination { steps: usize },
    #[error("search space of {needed} candidates exceeds the bound {bound}")]
    BoundExceeded { needed: u128, bound: u128 },
    #[error(transparent)]
    Quantale(#[from] QuantaleError),
}

/// A matrix `X × Y → V`.
#[derive(Clone)]
pub struct VRel {
    q: Arc<Quantale>,
    src: Vec<String>,
    tgt: Vec<String>,
    m: Vec<Value>,
}

impl PartialEq for VRel {
    fn eq(&self, other: &Self) -> bool {
        self.q.same_as(&other.q)
            && self.src == other.src
            && self.tgt == other.tgt
            && self.m == other.m
    }
}

impl Eq for VRel {}

impl fmt::Debug for VRel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "VRel over {} {:?} -> {:?} ",
            self.q.name(),
            self.src,
            self.tgt
        )?;
        f.write_str(&self.format_matrix())
    }
}

impl VRel {
    pub fn new(
        q: Arc<Quantale>,
        src: Vec<String>,
        tgt: Vec<String>,
        entries: Vec<Value>,
    ) -> Result<Self, VRelError> {
        if entries.len() != src.len() * tgt.len() {
            return Err(VRelError::Shape(format!(
                "{} entries for a {}x{} matrix",
                entries.len(),
                src.len(),
                tgt.len()
            )));
        }
        if let Some(v) = entries.iter().find(|v| !q.contains(v)) {
            return Err(VRelError::Shape(format!(
                "{v:?} is not an element of {}",
                q.name()
            )));
        }
        Ok(VRel {
            q,
            src,
            tgt,
            m: entries,
        })
    }

    pub fn from_fn(
        q: Arc<Quantale>,
        src: Vec<String>,
        tgt: Vec<String>,
        f: impl Fn(usize, usize) -> Value,
    ) -> Self {
        let (n, k) = (src.len(), tgt.len());
        let m = (0..n * k).map(|i| f(i / k, i % k)).collect();
        VRel { q, src, tgt, m }
    }

    /// Parses a square or rectangular matrix of element strings.
    pub fn parse(
        q: Arc<Quantale>,
        src: Vec<String>,
        tgt: Vec<String>,
        rows: &[Vec<String>],
    ) -> Result<Self, VRelError> {
        if rows.len() != src.len() || rows.iter().any(|r| r.len() != tgt.len()) {
            return Err(VRelError::Shape(format!(
                "expected {}x{} entries",
                src.len(),
                tgt.len()
            )));
        }
        let m = rows
            .iter()
            .flatten()
            .map(|s| q.parse_value(s))
            .collect::<Result<Vec<_>, _>>()?;
        VRel::new(q, src, tgt, m)
    }

    pub fn identity(q: Arc<Quantale>, labels: Vec<String>) -> Self {
        let (k, b) = (q.unit(), q.bottom());
        VRel::from_fn(q, labels.clone(), labels, |i, j| {
            if i == j {
                k.clone()
            } else {
                b.clone()
            }
        })
    }

    pub fn constant(q: Arc<Quantale>, src: Vec<String>, tgt: Vec<String>, v: Value) -> Self {
        VRel::from_fn(q, src, tgt, |_, _| v.clone())
    }

    /// The graph of `f`: `k` where `f(x) = y`, `⊥` elsewhere.
    pub fn of_map(q: Arc<Quantale>, src: Vec<String>, tgt: Vec<String>, f: &[usize]) -> Self {
        let (k, b) = (q.unit(), q.bottom());
        VRel::from_fn(
            q,
            src,
            tgt,
            |i, j| if f[i] == j { k.clone() } else { b.clone() },
        )
    }

    pub fn quantale(&self) -> &Arc<Quantale> {
        &self.q
    }

    pub fn source(&self) -> &[String] {
        &self.src
    }

    pub fn target(&self) -> &[String] {
        &self.tgt
    }

    pub fn rows(&self) -> usize {
        self.src.len()
    }

    pub fn cols(&self) -> usize {
        self.tgt.len()
    }

    pub fn entries(&self) -> &[Value] {
        &self.m
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> &Value {
        &self.m[i * self.tgt.len() + j]
    }

    pub fn is_endo(&self) -> bool {
        self.src == self.tgt
    }

    pub fn opposite(&self) -> VRel {
        VRel::from_fn(
            self.q.clone(),
            self.tgt.clone(),
            self.src.clone(),
            |i, j| self.get(j, i).clone(),
        )
    }

    /// First entry where `self ≰ other`.
    pub fn leq_witness(&self, other: &VRel) -> Option<(usize, usize)> {
        let k = self.cols();
        (0..self.m.len())
            .find(|&i| !self.q.leq(&self.m[i], &other.m[i]))
            .map(|i| (i / k, i % k))
    }

    pub fn leq(&self, other: &VRel) -> bool {
        self.leq_witness(other).is_none()
    }

    pub fn zip_with(&self, other: &VRel, f: impl Fn(&Value, &Value) -> Value) -> VRel {
        VRel {
            q: self.q.clone(),
            src: self.src.clone(),
            tgt: self.tgt.clone(),
            m: self.m.iter().zip(&other.m).map(|(a, b)| f(a, b)).collect(),
        }
    }

    pub fn join(&self, other: &VRel) -> VRel {
        self.zip_with(other, |a, b| self.q.join(a, b))
    }

    pub fn meet(&self, other: &VRel) -> VRel {
        self.zip_with(other, |a, b| self.q.meet(a, b))
    }

    pub fn map_entries(&self, q: Arc<Quantale>, f: impl Fn(&Value) -> Value) -> VRel {
        VRel {
            q,
            src: self.src.clone(),
            tgt: self.tgt.clone(),
            m: self.m.iter().map(f).collect(),
        }
    }

    pub fn format_entry(&self, i: usize, j: usize) -> String {
        self.q.format(self.get(i, j))
    }

    pub fn format_matrix(&self) -> String {
        let rows: Vec<String> = (0..self.rows())
            .map(|i| {
                let r: Vec<String> = (0..self.cols()).map(|j| self.format_entry(i, j)).collect();
                format!("[{}]", r.join(", "))
            })
            .collect();
        format!("[{}]", rows.join(", "))
    }

    /// Entries as strings, row by row.
    pub fn to_strings(&self) -> Vec<Vec<String>> {
        (0..self.rows())
            .map(|i| (0..self.cols()).map(|j| self.format_entry(i, j)).collect())
            .collect()
    }
}

/// `s · r`, i.e. first `r: X ⇸ Y`, then `s: Y ⇸ Z`.
pub fn compose(r: &VRel, s: &VRel) -> Result<VRel, VRelError> {
    if !r.q.same_as(&s.q) {
        return Err(VRelError::CarrierMismatch(
            "relations over different quantales".into(),
        ));
    }
    if r.tgt != s.src {
        return Err(VRelError::CarrierMismatch(format!(
            "middle carriers {:?} and {:?} differ",
            r.tgt, s.src
        )));
    }
    let q = &r.q;
    Ok(VRel::from_fn(
        q.clone(),
        r.src.clone(),
        s.tgt.clone(),
        |x, z| {
            (0..r.cols()).fold(q.bottom(), |acc, y| {
                q.join(&acc, &q.tensor(r.get(x, y), s.get(y, z)))
            })
        },
    ))
}

/// Outcome of checking reflexivity and transitivity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CategoryCheck {
    pub reflexive: bool,
    pub transitive: bool,
    /// First `x` with `k ≰ a(x, x)`.
    pub reflexivity_witness: Option<usize>,
    /// First `(x, x', x'')` with `a(x,x') ⊗ a(x',x'') ≰ a(x,x'')`.
    pub transitivity_witness: Option<(usize, usize, usize)>,
}

impl CategoryCheck {
    pub fn is_vcategory(&self) -> bool {
        self.reflexive && self.transitive
    }

    pub fn describe(&self, a: &VRel) -> String {
        let l = |i: usize| a.src[i].clone();
        match (self.reflexivity_witness, self.transitivity_witness) {
            (Some(x), _) => format!(
                "reflexivity fails at {}: k ≰ a({0},{0}) = {}",
                l(x),
                a.format_entry(x, x)
            ),
            (None, Some((x, y, z))) => format!(
                "transitivity fails at ({}, {}, {}): {} ⊗ {} ≰ {}",
                l(x),
                l(y),
                l(z),
                a.format_entry(x, y),
                a.format_entry(y, z),
                a.format_entry(x, z)
            ),
            (None, None) => "V-category".into(),
        }
    }
}

pub fn is_vcategory(a: &VRel) -> CategoryCheck {
    let q = &a.q;
    let n = a.rows();
    let reflexivity_witness = if a.is_endo() {
        (0..n).find(|&x| !q.leq(&q.unit(), a.get(x, x)))
    } else {
        Some(0)
    };
    let transitivity_witness = if a.is_endo() {
        par::find_first(n * n * n, |t| {
            let (x, y, z) = (t / (n * n), t / n % n, t % n);
            (!q.leq(&q.tensor(a.get(x, y), a.get(y, z)), a.get(x, z))).then_some((x, y, z))
        })
    } else {
        None
    };
    CategoryCheck {
        reflexive: reflexivity_witness.is_none(),
        transitive: transitivity_witness.is_none() && a.is_endo(),
        reflexivity_witness,
        transitivity_witness,
    }
}

/// A finite set with a reflexive and transitive V-relation.
#[derive(Clone, PartialEq, Eq)]
pub struct VCategory {
    a: VRel,
}

impl fmt::Debug for VCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "VCategory {:?} {}", self.a.src, self.a.format_matrix())
    }
}

impl VCategory {
    pub fn new(a: VRel) -> Result<Self, VRelError> {
        if !a.is_endo() {
            return Err(VRelError::CarrierMismatch(
                "structure must be an endo-relation".into(),
            ));
        }
        let check = is_vcategory(&a);
        if !check.is_vcategory() {
            return Err(VRelError::NotVCategory(check.describe(&a)));
        }
        Ok(VCategory { a })
    }

    pub(crate) fn new_unchecked(a: VRel) -> Self {
        debug_assert!(is_vcategory(&a).is_vcategory());
        VCategory { a }
    }

    /// `k` on the diagonal, `⊥` elsewhere.
    pub fn discrete(q: Arc<Quantale>, labels: Vec<String>) -> Self {
        VCategory::new_unchecked(VRel::identity(q, labels))
    }

    /// `⊤` everywhere.
    pub fn indiscrete(q: Arc<Quantale>, labels: Vec<String>) -> Self {
        let t = q.top();
        VCategory {
            a: VRel::constant(q, labels.clone(), labels, t),
        }
    }

    /// The one-point category with `κ(*, *) = k`, the unit for `⊗`.
    pub fn unit(q: Arc<Quantale>) -> Self {
        VCategory::discrete(q, vec!["*".into()])
    }

    pub fn rel(&self) -> &VRel {
        &self.a
    }

    pub fn into_rel(self) -> VRel {
        self.a
    }

    pub fn quantale(&self) -> &Arc<Quantale> {
        &self.a.q
    }

    pub fn labels(&self) -> &[String] {
        &self.a.src
    }

    pub fn size(&self) -> usize {
        self.a.src.len()
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> &Value {
        self.a.get(i, j)
    }

    pub fn opposite(&self) -> VCategory {
        VCategory::new_unchecked(self.a.opposite())
    }

    pub fn is_symmetric(&self) -> bool {
        self.a == self.a.opposite()
    }

    /// Same structure on renamed points.
    pub fn relabel(&self, labels: Vec<String>) -> VCategory {
        VCategory {
            a: VRel {
                src: labels.clone(),
                tgt: labels,
                ..self.a.clone()
            },
        }
    }
}

/// First pair `(x, x')` with `a(x,x') ≰ b(f x, f x')`.
pub fn vfunctor_witness(f: &[usize], a: &VCategory, b: &VCategory) -> Option<(usize, usize)> {
    let q = a.quantale();
    let n = a.size();
    (0..n * n)
        .map(|t| (t / n, t % n))
        .find(|&(x, y)| !q.leq(a.get(x, y), b.get(f[x], f[y])))
}

pub fn is_vfunctor(f: &[usize], a: &VCategory, b: &VCategory) -> bool {
    f.len() == a.size() && f.iter().all(|&y| y < b.size()) && vfunctor_witness(f, a, b).is_none()
}

/// A map between V-categories verified to be a V-functor.
#[derive(Debug, Clone)]
pub struct VFunctor {
    pub source: VCategory,
    pub target: VCategory,
    pub map: Vec<usize>,
}

impl VFunctor {
    pub fn new(source: VCategory, target: VCategory, map: Vec<usize>) -> Result<Self, VRelError> {
        if map.len() != source.size() || map.iter().any(|&y| y >= target.size()) {
            return Err(VRelError::Shape("map is not total on the carriers".into()));
        }
        if let Some((x, y)) = vfunctor_witness(&map, &source, &target) {
            return Err(VRelError::Precondition(format!(
                "not a V-functor: a({}, {}) = {} ≰ {}",
                source.labels()[x],
                source.labels()[y],
                source.rel().format_entry(x, y),
                target.rel().format_entry(map[x], map[y])
            )));
        }
        Ok(VFunctor {
            source,
            target,
            map,
        })
    }

    pub fn identity(a: VCategory) -> Self {
        let map = (0..a.size()).collect();
        VFunctor {
            source: a.clone(),
            target: a,
            map,
        }
    }

    /// The same map between the dual categories.
    pub fn dual(&self) -> VFunctor {
        VFunctor {
            source: self.source.opposite(),
            target: self.target.opposite(),
            map: self.map.clone(),
        }
    }
}

/// The three relational forms of the V-functor condition, evaluated through
/// [`compose`] independently of [`vfunctor_witness`]:
/// `a ≤ f°·b·f`, `f·a·f° ≤ b`, `f·a° ≤ b°·f`.
pub fn vfunctor_relational_forms(
    f: &[usize],
    a: &VCategory,
    b: &VCategory,
) -> Result<[bool; 3], VRelError> {
    let q = a.quantale().clone();
    let fr = VRel::of_map(q, a.labels().to_vec(), b.labels().to_vec(), f);
    let fo = fr.opposite();
    let (ar, br) = (a.rel(), b.rel());
    let first = ar.leq(&compose(&compose(&fr, br)?, &fo)?);
    let second = compose(&compose(&fo, ar)?, &fr)?.leq(br);
    let third = compose(&ar.opposite(), &fr)?.leq(&compose(&fr, &br.opposite())?);
    Ok([first, second, third])
}

/// Least V-category structure above a reflexive V-relation, by iterated
/// squaring.
pub fn transitive_closure(g: &VRel) -> Result<VCategory, VRelError> {
    let q = g.q.clone();
    if !g.is_endo() {
        return Err(VRelError::CarrierMismatch(
            "closure needs an endo-relation".into(),
        ));
    }
    let n = g.rows();
    if let Some(x) = (0..n).find(|&x| !q.leq(&q.unit(), g.get(x, x))) {
        return Err(VRelError::Precondition(format!(
            "relation is not reflexive at {}",
            g.src[x]
        )));
    }
    let bound = if q.is_integral() {
        // Paths longer than |X| contain a cycle whose removal cannot lower the
        // value when k = ⊤, so ⌈log₂|X|⌉ squarings reach every simple path.
        ceil_log2(n) + 1
    } else if let (Some(h), true) = (q.height(), q.is_finite()) {
        // Each productive squaring raises some entry along a chain of length h.
        n * n * h.saturating_sub(1) + 1
    } else {
        return Err(VRelError::Precondition(format!(
            "{} is neither integral nor finite, so the closure may not terminate",
            q.name()
        )));
    };
    let mut a = g.clone();
    for _ in 0..=bound {
        let next = compose(&a, &a)?;
        if next == a {
            return Ok(VCategory::new_unchecked(a));
        }
        a = next;
    }
    Err(VRelError::NonTermination { steps: bound })
}

pub(crate) fn ceil_log2(n: usize) -> usize {
    if n <= 1 {
        0
    } else {
        (usize::BITS - (n - 1).leading_zeros()) as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SymmetrizeMode {
    /// Largest symmetric structure below: `a ∧ a°`.
    Coreflect,
    /// Least symmetric V-category above: closure of `a ∨ a°`.
    Reflect,
}

pub fn symmetrize(a: &VCategory, mode: SymmetrizeMode) -> Result<VCategory, VRelError> {
    let (r, o) = (a.rel(), a.rel().opposite());
    match mode {
        SymmetrizeMode::Coreflect => Ok(VCategory::new_unchecked(r.meet(&o))),
        SymmetrizeMode::Reflect => transitive_closure(&r.join(&o)),
    }
}

/// The largest structure on `labels` making every `f_i: X → (Y_i, b_i)` a
/// V-functor: `a(x, x') = ⋀_i b_i(f_i x, f_i x')`.
pub fn initial_structure(
    q: Arc<Quantale>,
    labels: Vec<String>,
    family: &[(&[usize], &VCategory)],
) -> Result<VCategory, VRelError> {
    let n = labels.len();
    for (f, b) in family {
        if !b.quantale().same_as(&q) {
            return Err(VRelError::CarrierMismatch(
                "targets over different quantales".into(),
            ));
        }
        if f.len() != n || f.iter().any(|&y| y >= b.size()) {
            return Err(VRelError::Shape("map is not total on the carriers".into()));
        }
    }
    let a = VRel::from_fn(q.clone(), labels.clone(), labels, |x, y| {
        family
            .iter()
            .fold(q.top(), |acc, (f, b)| q.meet(&acc, b.get(f[x], f[y])))
    });
    Ok(VCategory::new_unchecked(a))
}

/// The fiberwise join `b(y, y') = ⋁_{f x = y, f x' = y'} a(x, x')` along a
/// surjection, with a report on whether it is transitive.
#[derive(Debug, Clone)]
pub struct FinalStructure {
    pub graph: VRel,
    pub check: CategoryCheck,
}

impl FinalStructure {
    pub fn category(&self) -> Option<VCategory> {
        self.check
            .is_vcategory()
            .then(|| VCategory::new_unchecked(self.graph.clone()))
    }
}

pub fn final_structure_surjection(
    f: &[usize],
    target: Vec<String>,
    a: &VCategory,
) -> Result<FinalStructure, VRelError> {
    let m = target.len();
    if f.len() != a.size() || f.iter().any(|&y| y >= m) {
        return Err(VRelError::Shape("map is not total on the carriers".into()));
    }
    if let Some(y) = (0..m).find(|y| !f.contains(y)) {
        return Err(VRelError::Precondition(format!(
            "map is not surjective: nothing hits {}",
            target[y]
        )));
    }
    let q = a.quantale().clone();
    let n = a.size();
    let mut entries = vec![q.bottom(); m * m];
    for x in 0..n {
        for y in 0..n {
            let e = &mut entries[f[x] * m + f[y]];
            *e = q.join(e, a.get(x, y));
        }
    }
    let graph = VRel::new(q, target.clone(), target, entries)?;
    let check = is_vcategory(&graph);
    Ok(FinalStructure { graph, check })
}

fn pair_labels(xs: &[String], ys: &[String]) -> Vec<String> {
    xs.iter()
        .flat_map(|x| ys.iter().map(move |y| format!("({x},{y})")))
        .collect()
}

fn product_with(
    a: &VCategory,
    b: &VCategory,
    op: impl Fn(&Value, &Value) -> Value,
) -> Result<VCategory, VRelError> {
    if !a.quantale().same_as(b.quantale()) {
        return Err(VRelError::CarrierMismatch(
            "categories over different quantales".into(),
        ));
    }
    let m = b.size();
    let r = VRel::from_fn(
        a.quantale().clone(),
        pair_labels(a.labels(), b.labels()),
        pair_labels(a.labels(), b.labels()),
        |i, j| op(a.get(i / m, j / m), b.get(i % m, j % m)),
    );
    Ok(VCategory::new_unchecked(r))
}

/// `(a ⊗ b)((x,y),(x',y')) = a(x,x') ⊗ b(y,y')`; pair `(x, y)` has index
/// `x·|B| + y`.
pub fn tensor_cat(a: &VCategory, b: &VCategory) -> Result<VCategory, VRelError> {
    let q = a.quantale().clone();
    product_with(a, b, |u, v| q.tensor(u, v))
}

/// The categorical product, `a ∧ b` pointwise.
pub fn cartesian_cat(a: &VCategory, b: &VCategory) -> Result<VCategory, VRelError> {
    let q = a.quantale().clone();
    product_with(a, b, |u, v| q.meet(u, v))
}

/// Default cap on `|Y|^|X|` for functor enumeration.
pub const FUNCTOR_SEARCH_BOUND: u128 = 1_000_000;

/// Entries of `a` and `b` coded by position in a shared list of distinct
/// values, with the order precomputed between codes.
struct Coded {
    a: Vec<usize>,
    b: Vec<usize>,
    le: Vec<bool>,
    k: usize,
    n: usize,
    m: usize,
}

impl Coded {
    fn new(a: &VCategory, b: &VCategory) -> Self {
        let q = a.quantale();
        let (n, m) = (a.size(), b.size());
        if let Some(k) = q.size() {
            let idx = |v: &Value| match v {
                Value::Idx(i) => *i,
                _ => unreachable!("finite quantales use table positions"),
            };
            let le = (0..k * k)
                .map(|t| q.leq(&Value::Idx(t / k), &Value::Idx(t % k)))
                .collect();
            return Coded {
                a: a.rel().entries().iter().map(idx).collect(),
                b: b.rel().entries().iter().map(idx).collect(),
                le,
                k,
                n,
                m,
            };
        }
        let mut distinct: Vec<Value> = Vec::new();
        let mut index: HashMap<Value, usize> = HashMap::new();
        let mut code = |v: &Value| {
            *index.entry(v.clone()).or_insert_with(|| {
                distinct.push(v.clone());
                distinct.len() - 1
            })
        };
        let ca: Vec<usize> = a.rel().entries().iter().map(&mut code).collect();
        let cb: Vec<usize> = b.rel().entries().iter().map(&mut code).collect();
        let k = distinct.len();
        let le = (0..k * k)
            .map(|t| q.leq(&distinct[t / k], &distinct[t % k]))
            .collect();
        Coded {
            a: ca,
            b: cb,
            le,
            k,
            n,
            m,
        }
    }

    #[inline]
    fn ok(&self, img: &[usize], x: usize) -> bool {
        let (n, m, k) = (self.n, self.m, self.k);
        let y = img[x];
        (0..=x).all(|x2| {
            let y2 = img[x2];
            self.le[self.a[x * n + x2] * k + self.b[y * m + y2]]
                && self.le[self.a[x2 * n + x] * k + self.b[y2 * m + y]]
        })
    }

    fn walk(&self, img: &mut Vec<usize>, visit: &mut dyn FnMut(&[usize])) {
        let x = img.len();
        if x == self.n {
            visit(img);
            return;
        }
        for y in 0..self.m {
            img.push(y);
            if self.ok(img, x) {
                self.walk(img, visit);
            }
            img.pop();
        }
    }

    /// Visits all V-functors whose first image is `y0`, in lexicographic order.
    fn walk_from(&self, y0: usize, visit: &mut dyn FnMut(&[usize])) {
        let mut img = vec![y0];
        if self.ok(&img, 0) {
            self.walk(&mut img, visit);
        }
    }
}

fn check_functor_bound(n: usize, m: usize, bound: u128) -> Result<(), VRelError> {
    let needed = (m as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if needed > bound {
        return Err(VRelError::BoundExceeded { needed, bound });
    }
    Ok(())
}

/// All V-functors `A → B` as image vectors, in lexicographic order.
pub fn enumerate_vfunctors(
    a: &VCategory,
    b: &VCategory,
    bound: u128,
) -> Result<Vec<Vec<usize>>, VRelError> {
    check_functor_bound(a.size(), b.size(), bound)?;
    if a.size() == 0 {
        return Ok(vec![Vec::new()]);
    }
    let coded = Coded::new(a, b);
    let chunks = par::map_range(b.size(), |y0| {
        let mut out = Vec::new();
        coded.walk_from(y0, &mut |img| out.push(img.to_vec()));
        out
    });
    Ok(chunks.into_iter().flatten().collect())
}

/// Number of V-functors `A → B`.
pub fn count_vfunctors(a: &VCategory, b: &VCategory, bound: u128) -> Result<u64, VRelError> {
    check_functor_bound(a.size(), b.size(), bound)?;
    if a.size() == 0 {
        return Ok(1);
    }
    let coded = Coded::new(a, b);
    Ok(par::map_range(b.size(), |y0| {
        let mut count = 0u64;
        coded.walk_from(y0, &mut |_| count += 1);
        count
    })
    .into_iter()
    .sum())
}

/// The V-category `[A, B]` of V-functors with `[f, g] = ⋀_x b(f x, g x)`.
#[derive(Debug, Clone)]
pub struct InternalHom {
    pub functors: Vec<Vec<usize>>,
    pub category: VCategory,
}

pub fn internal_hom(a: &VCategory, b: &VCategory, bound: u128) -> Result<InternalHom, VRelError> {
    if !a.quantale().same_as(b.quantale()) {
        return Err(VRelError::CarrierMismatch(
            "categories over different quantales".into(),
        ));
    }
    let functors = enumerate_vfunctors(a, b, bound)?;
    let q = b.quantale().clone();
    let labels: Vec<String> = functors
        .iter()
        .map(|f| {
            let parts: Vec<&str> = f.iter().map(|&y| b.labels()[y].as_str()).collect();
            format!("[{}]", parts.join(","))
        })
        .collect();
    let r = VRel::from_fn(q.clone(), labels.clone(), labels, |i, j| {
        let (f, g) = (&functors[i], &functors[j]);
        (0..a.size()).fold(q.top(), |acc, x| q.meet(&acc, b.get(f[x], g[x])))
    });
    let category = VCategory::new(r)?;
    Ok(InternalHom { functors, category })
}

/// Proper: `b(f x, y) ≤ ⋁_{f x' = y} a(x, x')`. Open: `b(y, f x) ≤ ⋁_{f x' = y} a(x', x)`.
/// The reverse inequalities hold for every V-functor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProperOpen {
    pub proper: bool,
    pub open: bool,
    /// First `(x, y)` violating properness.
    pub proper_witness: Option<(usize, usize)>,
    pub open_witness: Option<(usize, usize)>,
}

pub fn proper_open_report(f: &VFunctor) -> ProperOpen {
    let (a, b, map) = (&f.source, &f.target, &f.map);
    let q = a.quantale();
    let (n, m) = (a.size(), b.size());
    let fiber_join = |x: usize, y: usize, forward: bool| {
        (0..n)
            .filter(|&x2| map[x2] == y)
            .fold(q.bottom(), |acc, x2| {
                q.join(&acc, if forward { a.get(x, x2) } else { a.get(x2, x) })
            })
    };
    let pairs = || (0..n).flat_map(move |x| (0..m).map(move |y| (x, y)));
    let proper_witness = pairs().find(|&(x, y)| !q.leq(b.get(map[x], y), &fiber_join(x, y, true)));
    let open_witness = pairs().find(|&(x, y)| !q.leq(b.get(y, map[x]), &fiber_join(x, y, false)));
    ProperOpen {
        proper: proper_witness.is_none(),
        open: open_witness.is_none(),
        proper_witness,
        open_witness,
    }
}

/// The equivalent regularity conditions on a V-category structure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Regularity {
    /// `a = a°`.
    pub symmetric: bool,
    /// `a · a° ≤ a`.
    pub regular: bool,
    /// `a · a° · a ≤ a`.
    pub difunctional: bool,
    /// `a = b° · b` for `b = a` (no other `b` can work for a non-symmetric
    /// `a`, since `b° · b` is always symmetric).
    pub positive: bool,
}

impl Regularity {
    pub fn all_agree(&self) -> bool {
        let v = self.symmetric;
        self.regular == v && self.difunctional == v && self.positive == v
    }
}

pub fn regularity_report(a: &VCategory) -> Regularity {
    let r = a.rel();
    let o = r.opposite();
    let compose = |x: &VRel, y: &VRel| compose(x, y).expect("endo-relations compose");
    let symmetric = *r == o;
    let a_after_ao = compose(&o, r);
    let regular = a_after_ao.leq(r);
    let difunctional = compose(r, &a_after_ao).leq(r);
    let positive = symmetric && compose(r, &o) == *r;
    Regularity {
        symmetric,
        regular,
        difunctional,
        positive,
    }
}

/// `φ ∘ a`, after checking `φ` on the entries of `a` and the unit.
pub fn change_of_base_cat(phi: &LaxHom, a: &VCategory) -> Result<VCategory, VRelError> {
    if !phi.source.same_as(a.quantale()) {
        return Err(VRelError::CarrierMismatch(format!(
            "{} does not start at {}",
            phi.name,
            a.quantale().name()
        )));
    }
    let mut samples: Vec<Value> = phi.source.elements().unwrap_or_default();
    if samples.is_empty() {
        samples.push(phi.source.unit());
        for v in a.rel().entries() {
            if !samples.contains(v) {
                samples.push(v.clone());
            }
        }
    }
    let report = check_lax_hom(phi, &samples);
    if !report.is_pass() {
        return Err(VRelError::Precondition(format!(
            "{} is not a lax homomorphism: {}",
            phi.name,
            report.witness.unwrap_or_default()
        )));
    }
    VCategory::new(a.rel().map_entries(phi.target.clone(), |v| phi.apply(v)))
}

/// All V-category structures on `n` labelled points over a finite quantale.
pub fn enumerate_vcategories(q: &Arc<Quantale>, n: usize) -> Result<Vec<VCategory>, VRelError> {
    let elems = q
        .elements()
        .ok_or_else(|| VRelError::Precondition(format!("{} is not finite", q.name())))?;
    let diag: Vec<Value> = elems
        .iter()
        .filter(|v| q.leq(&q.unit(), v))
        .cloned()
        .collect();
    let off = n * n - n;
    let total = (diag.len() as u128).pow(n as u32) * (elems.len() as u128).pow(off as u32);
    if total > 10_000_000 {
        return Err(VRelError::BoundExceeded {
            needed: total,
            bound: 10_000_000,
        });
    }
    let labels: Vec<String> = (0..n).map(|i| format!("x{i}")).collect();
    let found = par::filter_map_range(total as usize, |mut code| {
        let entries: Vec<Value> = (0..n * n)
            .map(|t| {
                let pool = if t / n == t % n { &diag } else { &elems };
                let v = pool[code % pool.len()].clone();
                code /= pool.len();
                v
            })
            .collect();
        let r = VRel::new(q.clone(), labels.clone(), labels.clone(), entries).ok()?;
        is_vcategory(&r)
            .is_vcategory()
            .then(|| VCategory::new_unchecked(r))
    });
    Ok(found)
}

/// Permutation-invariant key: the lexicographically least entry code vector
/// over all relabellings. Two categories are isomorphic iff keys agree.
pub fn isomorphism_key(a: &VCategory) -> Vec<usize> {
    let q = a.quantale();
    let n = a.size();
    let code = |v: &Value| -> usize {
        match v {
            Value::Idx(i) => *i,
            other => panic!(
                "isomorphism keys need a finite quantale, got {}",
                q.format(other)
            ),
        }
    };
    let mut perm: Vec<usize> = (0..n).collect();
    let mut best: Option<Vec<usize>> = None;
    loop {
        let key: Vec<usize> = (0..n * n)
            .map(|t| code(a.get(perm[t / n], perm[t % n])))
            .collect();
        if best.as_ref().is_none_or(|b| key < *b) {
            best = Some(key);
        }
        if !next_permutation(&mut perm) {
            break;
        }
    }
    best.unwrap_or_default()
}

pub(crate) fn next_permutation(p: &mut [usize]) -> bool {
    if p.len() < 2 {
        return false;
    }
    let mut i = p.len() - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = p.len() - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantale::{builtin_lax_homs, chain, lukasiewicz_chain, pplus, two};

    fn labels(n: usize) -> Vec<String> {
        (0..n).map(|i| i.to_string()).collect()
    }

    fn rel(q: &Arc<Quantale>, n: usize, m: usize, rows: &[&[&str]]) -> VRel {
        let rows: Vec<Vec<String>> = rows
            .iter()
            .map(|r| r.iter().map(|s| s.to_string()).collect())
            .collect();
        VRel::parse(q.clone(), labels(n), labels(m), &rows).unwrap()
    }

    fn pplus_three() -> VRel {
        rel(
            &pplus(),
            3,
            3,
            &[&["0", "1", "5"], &["inf", "0", "1"], &["inf", "inf", "0"]],
        )
    }

    #[test]
    fn composes_over_a_chain() {
        let q = chain(3).unwrap();
        let r = rel(&q, 1, 2, &[&["1/2", "1"]]);
        let s = rel(&q, 2, 1, &[&["1"], &["0"]]);
        assert_eq!(compose(&r, &s).unwrap().format_matrix(), "[[1/2]]");
        let id = VRel::identity(q.clone(), labels(2));
        assert_eq!(compose(&r, &id).unwrap(), r);
        assert!(compose(&s, &s).is_err());
    }

    #[test]
    fn pplus_example_and_closure() {
        let a = pplus_three();
        let check = is_vcategory(&a);
        assert!(check.reflexive);
        assert_eq!(check.transitivity_witness, Some((0, 1, 2)));
        let c = transitive_closure(&a).unwrap();
        assert_eq!(c.rel().format_entry(0, 2), "2");
        // collapsing onto a point is a V-functor
        let p = VCategory::unit(pplus());
        assert!(is_vfunctor(&[0, 0, 0], &c, &p));
    }

    #[test]
    fn chain_cycle_closure() {
        let q = chain(3).unwrap();
        let g = rel(
            &q,
            3,
            3,
            &[&["1", "1/2", "0"], &["0", "1", "1/2"], &["1/2", "0", "1"]],
        );
        let c = transitive_closure(&g).unwrap();
        assert_eq!(
            c.rel().format_matrix(),
            "[[1, 1/2, 1/2], [1/2, 1, 1/2], [1/2, 1/2, 1]]"
        );
    }

    #[test]
    fn symmetrizations() {
        let q = pplus();
        let a = VCategory::new(rel(&q, 2, 2, &[&["0", "1"], &["3", "0"]])).unwrap();
        let co = symmetrize(&a, SymmetrizeMode::Coreflect).unwrap();
        assert_eq!(co.rel().format_matrix(), "[[0, 3], [3, 0]]");
        let re = symmetrize(&a, SymmetrizeMode::Reflect).unwrap();
        assert_eq!(re.rel().format_matrix(), "[[0, 1], [1, 0]]");
        let t = two();
        let p = VCategory::new(rel(&t, 2, 2, &[&["1", "1"], &["0", "1"]])).unwrap();
        let re = symmetrize(&p, SymmetrizeMode::Reflect).unwrap();
        assert_eq!(re, VCategory::indiscrete(t.clone(), labels(2)));
        let co = symmetrize(&p, SymmetrizeMode::Coreflect).unwrap();
        assert_eq!(co, VCategory::discrete(t, labels(2)));
    }

    #[test]
    fn tensor_and_cartesian() {
        let q = lukasiewicz_chain(3).unwrap();
        let a = VCategory::new(rel(&q, 2, 2, &[&["1", "1/2"], &["1/2", "1"]])).unwrap();
        let t = tensor_cat(&a, &a).unwrap();
        let c = cartesian_cat(&a, &a).unwrap();
        assert_eq!(t.rel().format_entry(0, 3), "0");
        assert_eq!(c.rel().format_entry(0, 3), "1/2");
        let u = tensor_cat(&a, &VCategory::unit(q)).unwrap();
        assert_eq!(u.rel().entries(), a.rel().entries());
    }

    #[test]
    fn internal_hom_of_two_points() {
        let q = chain(3).unwrap();
        let a = VCategory::discrete(q.clone(), labels(2));
        let b = VCategory::new(rel(&q, 2, 2, &[&["1", "1/2"], &["0", "1"]])).unwrap();
        let h = internal_hom(&a, &b, FUNCTOR_SEARCH_BOUND).unwrap();
        assert_eq!(h.functors.len(), 4);
        let c0 = h.functors.iter().position(|f| f == &vec![0, 0]).unwrap();
        let c1 = h.functors.iter().position(|f| f == &vec![1, 1]).unwrap();
        assert_eq!(h.category.rel().format_entry(c0, c1), "1/2");
        assert!(internal_hom(&a, &b, 3).is_err());
    }

    #[test]
    fn proper_and_open_of_isolated_point() {
        let q = chain(3).unwrap();
        let a = VCategory::discrete(q.clone(), vec!["p".into()]);
        let b = VCategory::indiscrete(q, labels(2));
        let f = VFunctor::new(a, b, vec![0]).unwrap();
        let r = proper_open_report(&f);
        assert!(!r.proper && !r.open);
        assert_eq!(r.proper_witness, Some((0, 1)));
        let id = VFunctor::identity(f.target.clone());
        let r = proper_open_report(&id);
        assert!(r.proper && r.open);
    }

    #[test]
    fn regularity_of_preorder() {
        let t = two();
        let p = VCategory::new(rel(&t, 2, 2, &[&["1", "1"], &["0", "1"]])).unwrap();
        let r = regularity_report(&p);
        assert_eq!(
            r,
            Regularity {
                symmetric: false,
                regular: false,
                difunctional: false,
                positive: false
            }
        );
        let d = regularity_report(&VCategory::discrete(t, labels(3)));
        assert!(d.symmetric && d.all_agree());
    }

    #[test]
    fn change_of_base_along_pessimist() {
        let q = pplus();
        let c = transitive_closure(&pplus_three()).unwrap();
        let p = builtin_lax_homs(&q).unwrap().pessimist;
        let d = change_of_base_cat(&p, &c).unwrap();
        assert_eq!(d, VCategory::discrete(two(), labels(3)));
    }

    #[test]
    fn final_structure_collapses() {
        let q = chain(3).unwrap();
        let a = VCategory::discrete(q.clone(), labels(3));
        let fs = final_structure_surjection(&[0, 0, 0], vec!["*".into()], &a).unwrap();
        assert_eq!(fs.graph.format_matrix(), "[[1]]");
        assert!(fs.category().is_some());
        assert!(final_structure_surjection(&[0, 0, 0], labels(2), &a).is_err());
    }

    #[test]
    fn counts_small_categories() {
        let q = chain(3).unwrap();
        let counts: Vec<usize> = (1..=3)
            .map(|n| enumerate_vcategories(&q, n).unwrap().len())
            .collect();
        assert_eq!(counts, vec![1, 9, 192]);
        let mut keys: Vec<Vec<usize>> = enumerate_vcategories(&q, 3)
            .unwrap()
            .iter()
            .map(isomorphism_key)
            .collect();
        keys.sort();
        keys.dedup();
        assert_eq!(keys.len(), 44);
    }
}
