//! Groups carrying a compatible V-category structure.
//!
//! A structure `a` on a group is compatible when `+` is a V-functor
//! `(X,a) ⊗ (X,a) → (X,a)`. Such an `a` is determined by its profile
//! `δ(x) = a(0, x)` through `a(x, y) = δ(y - x)`, and the profile is what
//! [`VGroup`] stores. Throughout, the quantale must be integral (`k = ⊤`).

mod objects;
mod split;

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::group::{enumerate_homs, FiniteGroup, GroupError, GroupHom};
use crate::par;
use crate::quantale::{check_lax_hom, LaxHom, Quantale, QuantaleError, Value};
use crate::vrel::{
    ceil_log2, final_structure_surjection, is_vcategory, is_vfunctor, proper_open_report,
    CategoryCheck, VCategory, VFunctor, VRel, VRelError,
};

pub use objects::{
    aut_vgroup, is_jointly_strongly_epi, protomodular_object_check, strongly_unital_check,
    AutVGroup, JointEpi, JointWitness, PointSearch, ProtomodularCheck, StronglyUnital,
    UnitalCounterexample,
};
pub use split::{
    enumerate_split_structures, semidirect_lex, semidirect_tensor, split_extension_witness,
    SplitExtensionStructure, SPLIT_SEARCH_BOUND,
};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum VGroupError {
    #[error("{quantale} is not integral: V-groups here assume k = ⊤")]
    NotIntegral { quantale: String },
    #[error("δ(0) = {found} is not ⊤ = {top} (V-groups here assume k = ⊤, so a(x,x) = ⊤)")]
    TopAtZero { found: String, top: String },
    #[error("superadditivity fails at (u, v) = ({u}, {v}): δ(u) ⊗ δ(v) = {lhs} ≰ δ(u+v) = {rhs}")]
    Superadditivity {
        u: String,
        v: String,
        lhs: String,
        rhs: String,
    },
    #[error(
        "conjugation invariance fails at (g, u) = ({g}, {u}): δ(u) = {lhs} ≠ δ(g+u-g) = {rhs}"
    )]
    Conjugation {
        g: String,
        u: String,
        lhs: String,
        rhs: String,
    },
    #[error("profile shape: {0}")]
    Shape(String),
    #[error("not a compatible structure: {0}")]
    NotCompatible(String),
    #[error(
        "φ_{y} is not a V-functor on the kernel: a(0, {x}) = {lhs} ≰ a(0, φ_{y}({x})) = {rhs}"
    )]
    ActionNotFunctorial {
        y: String,
        x: String,
        lhs: String,
        rhs: String,
    },
    #[error("not a V-homomorphism: {0}")]
    NotHom(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("generated structure did not stabilise within {rounds} rounds")]
    NonTermination { rounds: usize },
    #[error("search space of {needed} candidates exceeds the bound {bound}")]
    BoundExceeded { needed: u128, bound: u128 },
    #[error("internal consistency check failed: {0}")]
    Internal(String),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    VRel(#[from] VRelError),
    #[error(transparent)]
    Quantale(#[from] QuantaleError),
}

/// A finite group with a compatible V-category structure, stored as its
/// profile `δ(x) = a(0, x)`.
#[derive(Clone)]
pub struct VGroup {
    group: Arc<FiniteGroup>,
    q: Arc<Quantale>,
    delta: Vec<Value>,
}

impl PartialEq for VGroup {
    fn eq(&self, other: &Self) -> bool {
        self.group == other.group && self.q.same_as(&other.q) && self.delta == other.delta
    }
}

impl Eq for VGroup {}

impl fmt::Debug for VGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "VGroup({} over {}, δ = {})",
            self.group.name(),
            self.q.name(),
            self.q.format_all(&self.delta)
        )
    }
}

fn require_integral(q: &Quantale) -> Result<(), VGroupError> {
    if q.is_integral() {
        Ok(())
    } else {
        Err(VGroupError::NotIntegral { quantale: q.name() })
    }
}

/// The first violated profile invariant, if any.
pub(crate) fn check_profile(
    g: &FiniteGroup,
    q: &Quantale,
    delta: &[Value],
) -> Result<(), VGroupError> {
    let n = g.order();
    if delta.len() != n {
        return Err(VGroupError::Shape(format!(
            "{} values for a group of order {n}",
            delta.len()
        )));
    }
    if let Some(v) = delta.iter().find(|v| !q.contains(v)) {
        return Err(VGroupError::Shape(format!(
            "{v:?} is not an element of {}",
            q.name()
        )));
    }
    if delta[0] != q.top() {
        return Err(VGroupError::TopAtZero {
            found: q.format(&delta[0]),
            top: q.format(&q.top()),
        });
    }
    for u in 1..n {
        for v in 1..n {
            let (lhs, w) = (q.tensor(&delta[u], &delta[v]), g.add(u, v));
            if !q.leq(&lhs, &delta[w]) {
                return Err(VGroupError::Superadditivity {
                    u: g.label(u).into(),
                    v: g.label(v).into(),
                    lhs: q.format(&lhs),
                    rhs: q.format(&delta[w]),
                });
            }
        }
    }
    for h in 1..n {
        for u in 1..n {
            let c = g.conj(h, u);
            if delta[c] != delta[u] {
                return Err(VGroupError::Conjugation {
                    g: g.label(h).into(),
                    u: g.label(u).into(),
                    lhs: q.format(&delta[u]),
                    rhs: q.format(&delta[c]),
                });
            }
        }
    }
    Ok(())
}

/// Validates a profile and builds the V-group.
pub fn vgroup_from_delta(
    g: Arc<FiniteGroup>,
    q: Arc<Quantale>,
    delta: Vec<Value>,
) -> Result<VGroup, VGroupError> {
    require_integral(&q)?;
    check_profile(&g, &q, &delta)?;
    Ok(VGroup { group: g, q, delta })
}

impl VGroup {
    pub fn new(
        g: Arc<FiniteGroup>,
        q: Arc<Quantale>,
        delta: Vec<Value>,
    ) -> Result<Self, VGroupError> {
        vgroup_from_delta(g, q, delta)
    }

    /// Parses profile entries with the quantale's element syntax.
    pub fn parse(
        g: Arc<FiniteGroup>,
        q: Arc<Quantale>,
        delta: &[&str],
    ) -> Result<Self, VGroupError> {
        let values = delta
            .iter()
            .map(|s| q.parse_value(s))
            .collect::<Result<Vec<_>, _>>()?;
        vgroup_from_delta(g, q, values)
    }

    pub(crate) fn new_unchecked(
        group: Arc<FiniteGroup>,
        q: Arc<Quantale>,
        delta: Vec<Value>,
    ) -> Self {
        VGroup { group, q, delta }
    }

    /// `δ(0) = ⊤`, `δ(x) = ⊥` otherwise.
    pub fn discrete(g: Arc<FiniteGroup>, q: Arc<Quantale>) -> Result<Self, VGroupError> {
        let delta = (0..g.order())
            .map(|x| if x == 0 { q.top() } else { q.bottom() })
            .collect();
        vgroup_from_delta(g, q, delta)
    }

    /// `δ ≡ ⊤`.
    pub fn indiscrete(g: Arc<FiniteGroup>, q: Arc<Quantale>) -> Result<Self, VGroupError> {
        let delta = vec![q.top(); g.order()];
        vgroup_from_delta(g, q, delta)
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn quantale(&self) -> &Arc<Quantale> {
        &self.q
    }

    pub fn delta(&self) -> &[Value] {
        &self.delta
    }

    pub fn delta_at(&self, x: usize) -> &Value {
        &self.delta[x]
    }

    pub fn order(&self) -> usize {
        self.group.order()
    }

    pub fn labels(&self) -> &[String] {
        self.group.labels()
    }

    /// `a(x, y) = δ(y - x)`.
    pub fn entry(&self, x: usize, y: usize) -> &Value {
        &self.delta[self.group.sub(y, x)]
    }

    pub fn matrix(&self) -> VCategory {
        let labels = self.labels().to_vec();
        VCategory::new_unchecked(VRel::from_fn(
            self.q.clone(),
            labels.clone(),
            labels,
            |x, y| self.entry(x, y).clone(),
        ))
    }

    pub fn format_delta(&self) -> Vec<String> {
        self.delta.iter().map(|v| self.q.format(v)).collect()
    }

    /// The same group with the dual structure `a°`, profile `x ↦ δ(-x)`.
    pub fn opposite(&self) -> VGroup {
        let delta = (0..self.order())
            .map(|x| self.delta[self.group.neg(x)].clone())
            .collect();
        VGroup::new_unchecked(self.group.clone(), self.q.clone(), delta)
    }

    /// Whether `δ(x) ≤ δ'(x)` everywhere (same group and quantale).
    pub fn leq(&self, other: &VGroup) -> bool {
        self.delta
            .iter()
            .zip(&other.delta)
            .all(|(u, v)| self.q.leq(u, v))
    }
}

/// Which side a shift acts on: right is `(x', x'') ↦ (x'+x, x''+x)`, left is
/// `(x', x'') ↦ (x+x', x+x'')`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Right,
    Left,
}

/// A triple `(x', x'', x)` at which `a(x', x'')` and its shift by `x` differ.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ShiftWitness {
    pub side: Side,
    pub x1: usize,
    pub x2: usize,
    pub x: usize,
}

/// Outcome of checking a matrix against both characterisations of
/// compatibility.
#[derive(Debug, Clone)]
pub struct MatrixValidation {
    pub valid: bool,
    /// The profile `a(0, ·)` when valid.
    pub delta: Option<Vec<Value>>,
    /// `+` is a V-functor on the reflexive graph `(X, a) ⊗ (X, a)`.
    pub functorial: bool,
    /// First `(x₁, x₂, x₁', x₂')` with
    /// `a(x₁,x₂) ⊗ a(x₁',x₂') ≰ a(x₁+x₁', x₂+x₂')`.
    pub functor_witness: Option<[usize; 4]>,
    /// The shift triple behind the functor failure, when it is one of the
    /// translation instances.
    pub functor_shift_witness: Option<ShiftWitness>,
    pub category: CategoryCheck,
    /// Invariant under right shifts only.
    pub right_shift_invariant: bool,
    /// First triple violating right or left shift invariance.
    pub shift_witness: Option<ShiftWitness>,
}

impl MatrixValidation {
    pub fn describe(&self, g: &FiniteGroup, a: &VRel) -> String {
        let l = |i: usize| g.label(i).to_string();
        if let Some(w) = self.shift_witness {
            let (y1, y2) = match w.side {
                Side::Right => (g.add(w.x1, w.x), g.add(w.x2, w.x)),
                Side::Left => (g.add(w.x, w.x1), g.add(w.x, w.x2)),
            };
            return format!(
                "{} shift invariance fails at (x', x'', x) = ({}, {}, {}): a({}, {}) = {} ≠ a({}, {}) = {}",
                if w.side == Side::Right { "right" } else { "left" },
                l(w.x1),
                l(w.x2),
                l(w.x),
                l(w.x1),
                l(w.x2),
                a.format_entry(w.x1, w.x2),
                l(y1),
                l(y2),
                a.format_entry(y1, y2)
            );
        }
        if !self.category.is_vcategory() {
            return self.category.describe(a);
        }
        if let Some([a1, a2, b1, b2]) = self.functor_witness {
            return format!(
                "+ is not a V-functor at (({}, {}), ({}, {}))",
                l(a1),
                l(a2),
                l(b1),
                l(b2)
            );
        }
        "compatible".into()
    }
}

fn shift_image(g: &FiniteGroup, side: Side, x1: usize, x2: usize, x: usize) -> (usize, usize) {
    match side {
        Side::Right => (g.add(x1, x), g.add(x2, x)),
        Side::Left => (g.add(x, x1), g.add(x, x2)),
    }
}

/// Checks both characterisations of a compatible structure: `+` being a
/// V-functor on the reflexive graph, and `a` being a V-category invariant
/// under shifts on both sides. They must agree; disagreement is reported as
/// [`VGroupError::Internal`].
pub fn vgroup_validate_matrix(g: &FiniteGroup, a: &VRel) -> Result<MatrixValidation, VGroupError> {
    let n = g.order();
    if a.rows() != n || a.cols() != n {
        return Err(VGroupError::Shape(format!(
            "{}x{} matrix for a group of order {n}",
            a.rows(),
            a.cols()
        )));
    }
    let q = a.quantale();
    require_integral(q)?;
    let category = is_vcategory(a);
    let triples = || (0..n * n * n).map(move |t| (t / (n * n), t / n % n, t % n));

    // Condition (i). Translation instances come first so that a failure can
    // be reported as a shift triple.
    let holds = |[a1, a2, b1, b2]: [usize; 4]| {
        q.leq(
            &q.tensor(a.get(a1, a2), a.get(b1, b2)),
            a.get(g.add(a1, b1), g.add(a2, b2)),
        )
    };
    let mut functor_shift_witness = None;
    let mut functor_witness = None;
    'sides: for side in [Side::Right, Side::Left] {
        for (x1, x2, x) in triples() {
            let (y1, y2) = shift_image(g, side, x1, x2, x);
            let minus = g.neg(x);
            let quads = match side {
                Side::Right => [[x1, x2, x, x], [y1, y2, minus, minus]],
                Side::Left => [[x, x, x1, x2], [minus, minus, y1, y2]],
            };
            if let Some(qd) = quads.into_iter().find(|&qd| !holds(qd)) {
                functor_witness = Some(qd);
                functor_shift_witness = Some(ShiftWitness { side, x1, x2, x });
                break 'sides;
            }
        }
    }
    if functor_witness.is_none() {
        functor_witness = par::find_first(n * n * n * n, |t| {
            let qd = [t / (n * n * n), t / (n * n) % n, t / n % n, t % n];
            (!holds(qd)).then_some(qd)
        });
    }
    let functorial = category.reflexive && functor_witness.is_none();

    // Condition (ii).
    let shift_fails = |side: Side| {
        triples().find(|&(x1, x2, x)| {
            let (y1, y2) = shift_image(g, side, x1, x2, x);
            a.get(x1, x2) != a.get(y1, y2)
        })
    };
    let right = shift_fails(Side::Right);
    let shift_witness = right
        .map(|(x1, x2, x)| ShiftWitness {
            side: Side::Right,
            x1,
            x2,
            x,
        })
        .or_else(|| {
            shift_fails(Side::Left).map(|(x1, x2, x)| ShiftWitness {
                side: Side::Left,
                x1,
                x2,
                x,
            })
        });
    let second = category.is_vcategory() && shift_witness.is_none();
    if functorial != second {
        return Err(VGroupError::Internal(format!(
            "compatibility conditions disagree on {a:?}: functorial = {functorial}, shift-invariant category = {second}"
        )));
    }
    Ok(MatrixValidation {
        valid: second,
        delta: second.then(|| (0..n).map(|x| a.get(0, x).clone()).collect()),
        functorial,
        functor_witness,
        functor_shift_witness,
        category,
        right_shift_invariant: right.is_none(),
        shift_witness,
    })
}

/// Builds a V-group from a full matrix, rejecting incompatible ones.
pub fn vgroup_from_matrix(g: Arc<FiniteGroup>, a: &VRel) -> Result<VGroup, VGroupError> {
    let v = vgroup_validate_matrix(&g, a)?;
    match v.delta {
        Some(delta) => {
            let out = vgroup_from_delta(g, a.quantale().clone(), delta)?;
            if out.matrix().rel().entries() != a.entries() {
                return Err(VGroupError::Internal(
                    "profile does not reproduce the matrix".into(),
                ));
            }
            Ok(out)
        }
        None => Err(VGroupError::NotCompatible(v.describe(&g, a))),
    }
}

/// A group homomorphism between V-groups that is also a V-functor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VGroupHom {
    pub source: VGroup,
    pub target: VGroup,
    pub map: Vec<usize>,
}

/// First `x` with `δ_X(x) ≰ δ_Y(f x)`.
pub fn hom_witness(source: &VGroup, target: &VGroup, map: &[usize]) -> Option<usize> {
    let q = &source.q;
    (0..source.order()).find(|&x| !q.leq(&source.delta[x], &target.delta[map[x]]))
}

impl VGroupHom {
    pub fn new(source: VGroup, target: VGroup, map: Vec<usize>) -> Result<Self, VGroupError> {
        if !source.q.same_as(&target.q) {
            return Err(VGroupError::Precondition(
                "V-groups over different quantales".into(),
            ));
        }
        GroupHom::new(source.group.clone(), target.group.clone(), map.clone())?;
        if let Some(x) = hom_witness(&source, &target, &map) {
            return Err(VGroupError::NotHom(format!(
                "δ({}) = {} ≰ δ(f({})) = {}",
                source.group.label(x),
                source.q.format(&source.delta[x]),
                source.group.label(x),
                source.q.format(&target.delta[map[x]])
            )));
        }
        Ok(VGroupHom {
            source,
            target,
            map,
        })
    }

    pub fn identity(x: VGroup) -> Self {
        let map = (0..x.order()).collect();
        VGroupHom {
            source: x.clone(),
            target: x,
            map,
        }
    }

    pub fn zero(source: VGroup, target: VGroup) -> Self {
        let map = vec![0; source.order()];
        VGroupHom {
            source,
            target,
            map,
        }
    }

    pub fn group_hom(&self) -> GroupHom {
        GroupHom {
            source: self.source.group.clone(),
            target: self.target.group.clone(),
            map: self.map.clone(),
        }
    }

    /// The pairwise V-functor condition on the full matrices.
    pub fn is_vfunctor_pairwise(&self) -> bool {
        is_vfunctor(&self.map, &self.source.matrix(), &self.target.matrix())
    }

    pub fn vfunctor(&self) -> VFunctor {
        VFunctor {
            source: self.source.matrix(),
            target: self.target.matrix(),
            map: self.map.clone(),
        }
    }

    /// `next ∘ self`.
    pub fn then(&self, next: &VGroupHom) -> Result<VGroupHom, VGroupError> {
        if self.target != next.source {
            return Err(VGroupError::Precondition(
                "codomain and domain differ".into(),
            ));
        }
        Ok(VGroupHom {
            source: self.source.clone(),
            target: next.target.clone(),
            map: self.map.iter().map(|&y| next.map[y]).collect(),
        })
    }
}

/// All V-homomorphisms `X → Y`.
pub fn enumerate_vgroup_homs(
    x: &VGroup,
    y: &VGroup,
    bound: u128,
) -> Result<Vec<VGroupHom>, VGroupError> {
    Ok(enumerate_homs(&x.group, &y.group, bound)?
        .into_iter()
        .filter(|h| hom_witness(x, y, &h.map).is_none())
        .map(|h| VGroupHom {
            source: x.clone(),
            target: y.clone(),
            map: h.map,
        })
        .collect())
}

/// Whether `a = a°`, decided both on the profile (`δ(x) = δ(-x)`) and as
/// V-functoriality of the inversion.
pub fn is_symmetric_vgroup(x: &VGroup) -> bool {
    let g = &x.group;
    let by_profile = (0..x.order()).all(|u| x.delta[u] == x.delta[g.neg(u)]);
    let inversion: Vec<usize> = (0..x.order()).map(|u| g.neg(u)).collect();
    let m = x.matrix();
    let by_inversion = is_vfunctor(&inversion, &m, &m);
    assert_eq!(
        by_profile, by_inversion,
        "symmetry of {x:?}: profile and inversion criteria disagree"
    );
    by_profile
}

pub use crate::vrel::SymmetrizeMode;

/// Coreflection `δ(x) ∧ δ(-x)` or reflection (least V-group above
/// `δ(x) ∨ δ(-x)`) into symmetric V-groups.
pub fn symmetrize_vgroup(x: &VGroup, mode: SymmetrizeMode) -> Result<VGroup, VGroupError> {
    let (g, q) = (&x.group, &x.q);
    let other = |u: usize| &x.delta[g.neg(u)];
    match mode {
        SymmetrizeMode::Coreflect => {
            let delta = (0..x.order())
                .map(|u| q.meet(&x.delta[u], other(u)))
                .collect();
            vgroup_from_delta(g.clone(), q.clone(), delta)
        }
        SymmetrizeMode::Reflect => {
            let seed: Vec<Value> = (0..x.order())
                .map(|u| q.join(&x.delta[u], other(u)))
                .collect();
            generated_structure(g, q, &seed)
        }
    }
}

/// The least compatible profile above `seed` (with `⊤` forced at `0`),
/// by iterating `δ ← δ ∨ ⋁_u δ(u) ⊗ δ(-u+w) ∨ ⋁_h δ(h+w-h)` to a fixpoint.
pub fn generated_structure(
    g: &Arc<FiniteGroup>,
    q: &Arc<Quantale>,
    seed: &[Value],
) -> Result<VGroup, VGroupError> {
    require_integral(q)?;
    let n = g.order();
    if seed.len() != n {
        return Err(VGroupError::Shape(format!(
            "{} values for a group of order {n}",
            seed.len()
        )));
    }
    // Every entry can rise at most `height - 1` times. Over an infinite
    // integral quantale, products of more than |G| factors contain a
    // zero-sum block that can be dropped, and each round doubles the
    // product length covered.
    let rounds = match q.height() {
        Some(h) => n * h + 1,
        None => 2 * ceil_log2(n.max(2)) + 4,
    };
    let mut d = seed.to_vec();
    d[0] = q.top();
    for _ in 0..=rounds {
        let next: Vec<Value> = (0..n)
            .map(|w| {
                let mut v = d[w].clone();
                for u in 1..n {
                    let rest = g.add(g.neg(u), w);
                    v = q.join(&v, &q.tensor(&d[u], &d[rest]));
                }
                for h in 1..n {
                    v = q.join(&v, &d[g.conj(h, w)]);
                }
                v
            })
            .collect();
        if next == d {
            return vgroup_from_delta(g.clone(), q.clone(), d).map_err(|e| {
                VGroupError::Internal(format!(
                    "fixpoint of the generation step is not compatible: {e}"
                ))
            });
        }
        d = next;
    }
    Err(VGroupError::NonTermination { rounds })
}

/// `X × Y` with `δ(x, y) = δ_X(x) ∧ δ_Y(y)`; pair `(x, y)` has index
/// `y·|X| + x`.
pub fn product_vgroup(x: &VGroup, y: &VGroup) -> Result<VGroup, VGroupError> {
    if !x.q.same_as(&y.q) {
        return Err(VGroupError::Precondition(
            "V-groups over different quantales".into(),
        ));
    }
    let g = Arc::new(FiniteGroup::direct_product(&x.group, &y.group));
    let m = x.order();
    let delta = (0..g.order())
        .map(|i| x.q.meet(&x.delta[i % m], &y.delta[i / m]))
        .collect();
    vgroup_from_delta(g, x.q.clone(), delta)
}

/// The injections `x ↦ (x, 0)` and `y ↦ (0, y)` into a product built by
/// [`product_vgroup`] (or any structure on the same product group).
pub fn product_injections(
    x: &VGroup,
    y: &VGroup,
    product: &VGroup,
) -> Result<(VGroupHom, VGroupHom), VGroupError> {
    let m = x.order();
    let left = VGroupHom::new(x.clone(), product.clone(), (0..m).collect())?;
    let right = VGroupHom::new(
        y.clone(),
        product.clone(),
        (0..y.order()).map(|b| b * m).collect(),
    )?;
    Ok((left, right))
}

/// A subgroup with the restricted (initial) structure and its inclusion.
pub fn restrict(x: &VGroup, subgroup: &[usize]) -> Result<(VGroup, VGroupHom), VGroupError> {
    let (h, elems) = x.group.subgroup(subgroup)?;
    let delta = elems.iter().map(|&e| x.delta[e].clone()).collect();
    let sub = vgroup_from_delta(Arc::new(h), x.q.clone(), delta)?;
    let inc = VGroupHom::new(sub.clone(), x.clone(), elems)?;
    Ok((sub, inc))
}

pub fn kernel_vgroup(f: &VGroupHom) -> Result<(VGroup, VGroupHom), VGroupError> {
    let kernel: Vec<usize> = (0..f.source.order()).filter(|&x| f.map[x] == 0).collect();
    restrict(&f.source, &kernel)
}

pub fn equalizer_vgroup(f: &VGroupHom, g: &VGroupHom) -> Result<(VGroup, VGroupHom), VGroupError> {
    if f.source != g.source || f.target != g.target {
        return Err(VGroupError::Precondition(
            "equalizer of non-parallel maps".into(),
        ));
    }
    let eq: Vec<usize> = (0..f.source.order())
        .filter(|&x| f.map[x] == g.map[x])
        .collect();
    restrict(&f.source, &eq)
}

/// `X/N` with `δ(c) = ⋁_{x ∈ c} δ(x)`, and the projection. The result is
/// cross-checked against the final structure of the projection.
pub fn quotient_vgroup(x: &VGroup, normal: &[usize]) -> Result<(VGroup, VGroupHom), VGroupError> {
    let (qg, proj) = x.group.quotient(normal)?;
    let q = &x.q;
    let mut delta = vec![q.bottom(); qg.order()];
    for (u, &c) in proj.map.iter().enumerate() {
        delta[c] = q.join(&delta[c], &x.delta[u]);
    }
    let fin = final_structure_surjection(&proj.map, qg.labels().to_vec(), &x.matrix())?;
    if !fin.check.is_vcategory() {
        return Err(VGroupError::Internal(format!(
            "final structure along a quotient is not a V-category: {}",
            fin.check.describe(&fin.graph)
        )));
    }
    let out = vgroup_from_delta(qg, q.clone(), delta)?;
    if out.matrix().rel() != &fin.graph {
        return Err(VGroupError::Internal(
            "fiber-join profile differs from the final structure".into(),
        ));
    }
    let hom = VGroupHom::new(x.clone(), out.clone(), proj.map)?;
    Ok((out, hom))
}

/// The quotient of the common codomain by the normal closure of
/// `{f(x) - g(x)}`.
pub fn coequalizer_vgroup(
    f: &VGroupHom,
    g: &VGroupHom,
) -> Result<(VGroup, VGroupHom), VGroupError> {
    if f.source != g.source || f.target != g.target {
        return Err(VGroupError::Precondition(
            "coequalizer of non-parallel maps".into(),
        ));
    }
    let t = &f.target.group;
    let diffs: Vec<usize> = (0..f.source.order())
        .map(|x| t.sub(f.map[x], g.map[x]))
        .collect();
    let n = t.normal_closure(&diffs);
    quotient_vgroup(&f.target, &n)
}

/// Post-composes the profile with a lax homomorphism.
pub fn change_of_base_vgroup(phi: &LaxHom, x: &VGroup) -> Result<VGroup, VGroupError> {
    if !phi.source.same_as(&x.q) {
        return Err(VGroupError::Precondition(format!(
            "{} does not start at {}",
            phi.name,
            x.q.name()
        )));
    }
    let mut samples = phi.source.elements().unwrap_or_default();
    if samples.is_empty() {
        samples.push(phi.source.unit());
        for v in &x.delta {
            if !samples.contains(v) {
                samples.push(v.clone());
            }
        }
    }
    let report = check_lax_hom(phi, &samples);
    if !report.is_pass() {
        return Err(VGroupError::Precondition(format!(
            "{} is not a lax homomorphism: {}",
            phi.name,
            report.witness.unwrap_or_default()
        )));
    }
    let delta = x.delta.iter().map(|v| phi.apply(v)).collect();
    vgroup_from_delta(x.group.clone(), phi.target.clone(), delta)
}

/// Default cap on the number of candidate profiles.
pub const STRUCTURE_SEARCH_BOUND: u128 = 1_000_000;

/// All compatible profiles on `G` over a finite quantale. Values are chosen
/// per conjugacy class and then filtered by superadditivity.
pub fn enumerate_vgroup_structures(
    g: &Arc<FiniteGroup>,
    q: &Arc<Quantale>,
    bound: u128,
) -> Result<Vec<VGroup>, VGroupError> {
    require_integral(q)?;
    let elems = q
        .elements()
        .ok_or_else(|| VGroupError::Precondition(format!("{} is not finite", q.name())))?;
    let classes: Vec<Vec<usize>> = g
        .conjugacy_classes()
        .into_iter()
        .filter(|c| c[0] != 0)
        .collect();
    let needed = (elems.len() as u128)
        .checked_pow(classes.len() as u32)
        .unwrap_or(u128::MAX);
    if needed > bound {
        return Err(VGroupError::BoundExceeded { needed, bound });
    }
    let k = elems.len();
    Ok(par::filter_map_range(needed as usize, |mut code| {
        let mut delta = vec![q.top(); g.order()];
        for class in &classes {
            let v = &elems[code % k];
            code /= k;
            for &u in class {
                delta[u] = v.clone();
            }
        }
        check_profile(g, q, &delta)
            .is_ok()
            .then(|| VGroup::new_unchecked(g.clone(), q.clone(), delta))
    }))
}

/// Mono/epi classification of a V-homomorphism.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EpiMono {
    pub mono: bool,
    pub epi: bool,
    /// Injective and `δ_X = δ_Y ∘ f`.
    pub regular_mono: bool,
    /// Surjective and `δ_Y(c) = ⋁_{f x = c} δ_X(x)`.
    pub regular_epi: bool,
    pub proper: bool,
    pub open: bool,
}

pub fn epi_mono_report(f: &VGroupHom) -> EpiMono {
    let ki = f.group_hom().kernel_image();
    let (x, y) = (&f.source, &f.target);
    let q = &x.q;
    let regular_mono = ki.is_injective && (0..x.order()).all(|u| x.delta[u] == y.delta[f.map[u]]);
    let regular_epi = ki.is_surjective
        && (0..y.order()).all(|c| {
            let fiber = (0..x.order())
                .filter(|&u| f.map[u] == c)
                .map(|u| &x.delta[u]);
            q.join_all(fiber) == y.delta[c]
        });
    let po = proper_open_report(&f.vfunctor());
    EpiMono {
        mono: ki.is_injective,
        epi: ki.is_surjective,
        regular_mono,
        regular_epi,
        proper: po.proper,
        open: po.open,
    }
}
