//! Compatible structures on semidirect products `X ⋊_φ Y` that turn
//! `X → X ⋊ Y ⇄ Y` into a split extension of V-groups.

use std::sync::Arc;

use crate::group::{semidirect_product_group, GroupAction, Semidirect};
use crate::par;
use crate::quantale::{Quantale, Value};
use crate::vrel::VRel;

use super::{check_profile, vgroup_validate_matrix, VGroup, VGroupError};

/// Default cap on the number of candidate profiles for split structures.
pub const SPLIT_SEARCH_BOUND: u128 = 100_000;

/// A candidate structure `c` on `X ⋊_φ Y` together with its verdicts.
#[derive(Debug, Clone)]
pub struct SplitExtensionStructure {
    pub action: GroupAction,
    pub kernel: VGroup,
    pub quotient: VGroup,
    pub semidirect: Semidirect,
    /// `c`, indexed like the semidirect product (`(x, y)` at `y·|X| + x`).
    pub structure: VRel,
    /// Verdict of the criterion that produced this candidate.
    pub valid: bool,
    /// Verdict of checking the split extension directly on `c`.
    pub direct_valid: bool,
    pub witness: Option<String>,
    /// Indices locating the witness (pair of elements, or `(x, y)`).
    pub witness_locus: Option<Vec<usize>>,
    pub is_tensor: bool,
    pub is_lex: bool,
}

impl SplitExtensionStructure {
    /// The profile `c((0,0), ·)`.
    pub fn delta(&self) -> Vec<Value> {
        (0..self.structure.cols())
            .map(|j| self.structure.get(0, j).clone())
            .collect()
    }

    pub fn vgroup(&self) -> Option<VGroup> {
        self.direct_valid.then(|| {
            VGroup::new_unchecked(
                self.semidirect.group.clone(),
                self.structure.quantale().clone(),
                self.delta(),
            )
        })
    }

    pub fn tensor_bound(&self) -> VRel {
        tensor_matrix(&self.semidirect, &self.kernel, &self.quotient)
    }

    pub fn lex_bound(&self) -> VRel {
        lex_matrix(&self.semidirect, &self.kernel, &self.quotient)
    }

    pub fn format_pair(&self, i: usize) -> String {
        self.semidirect.group.label(i).to_string()
    }
}

/// First `(y, x)` such that `φ_y` fails the one-point V-functor criterion on
/// the kernel.
fn action_witness(action: &GroupAction, x: &VGroup) -> Option<(usize, usize)> {
    let q = x.quantale();
    (0..action.acting.order())
        .flat_map(|y| (0..x.order()).map(move |u| (y, u)))
        .find(|&(y, u)| !q.leq(x.delta_at(u), x.delta_at(action.phi[y][u])))
}

fn prepare(action: &GroupAction, x: &VGroup, y: &VGroup) -> Result<Semidirect, VGroupError> {
    if *action.on != **x.group() || *action.acting != **y.group() {
        return Err(VGroupError::Precondition(format!(
            "action of {} on {} does not match V-groups on {} and {}",
            action.acting.name(),
            action.on.name(),
            y.group().name(),
            x.group().name()
        )));
    }
    if !x.quantale().same_as(y.quantale()) {
        return Err(VGroupError::Precondition(
            "V-groups over different quantales".into(),
        ));
    }
    if let Some((yy, u)) = action_witness(action, x) {
        let q = x.quantale();
        return Err(VGroupError::ActionNotFunctorial {
            y: y.group().label(yy).into(),
            x: x.group().label(u).into(),
            lhs: q.format(x.delta_at(u)),
            rhs: q.format(x.delta_at(action.phi[yy][u])),
        });
    }
    Ok(semidirect_product_group(action)?)
}

fn on_pairs(
    sd: &Semidirect,
    q: &Arc<Quantale>,
    f: impl Fn((usize, usize), (usize, usize)) -> Value,
) -> VRel {
    let labels = sd.group.labels().to_vec();
    VRel::from_fn(q.clone(), labels.clone(), labels, |i, j| {
        f(sd.split(i), sd.split(j))
    })
}

/// `(a ⊗ b)((x,y),(x',y')) = a(x,x') ⊗ b(y,y')`.
fn tensor_matrix(sd: &Semidirect, x: &VGroup, y: &VGroup) -> VRel {
    let q = x.quantale();
    on_pairs(sd, q, |(x1, y1), (x2, y2)| {
        q.tensor(x.entry(x1, x2), y.entry(y1, y2))
    })
}

/// `lex((x,y),(x',y')) = a(x,x')` if `y = y'`, else `b(y,y')`.
fn lex_matrix(sd: &Semidirect, x: &VGroup, y: &VGroup) -> VRel {
    on_pairs(sd, x.quantale(), |(x1, y1), (x2, y2)| {
        if y1 == y2 {
            x.entry(x1, x2).clone()
        } else {
            y.entry(y1, y2).clone()
        }
    })
}

/// Why `c` fails to make the diagram a split extension of V-groups, if it
/// does: compatibility of `c`, the kernel carrying the restricted structure,
/// and V-functoriality of the section and the projection.
pub fn split_extension_witness(
    sd: &Semidirect,
    x: &VGroup,
    y: &VGroup,
    c: &VRel,
) -> Result<Option<String>, VGroupError> {
    let v = vgroup_validate_matrix(&sd.group, c)?;
    let Some(delta) = v.delta else {
        return Ok(Some(format!(
            "c is not a V-group structure: {}",
            v.describe(&sd.group, c)
        )));
    };
    let q = x.quantale();
    let label = |i: usize| sd.group.label(i).to_string();
    if let Some(u) = (0..x.order()).find(|&u| delta[sd.pair(u, 0)] != *x.delta_at(u)) {
        return Ok(Some(format!(
            "kernel does not carry the restricted structure at {}: c = {} but a = {}",
            label(sd.pair(u, 0)),
            q.format(&delta[sd.pair(u, 0)]),
            q.format(x.delta_at(u))
        )));
    }
    if let Some(b) = (0..y.order()).find(|&b| !q.leq(y.delta_at(b), &delta[sd.pair(0, b)])) {
        return Ok(Some(format!(
            "section is not a V-functor at {}: b = {} ≰ c = {}",
            y.group().label(b),
            q.format(y.delta_at(b)),
            q.format(&delta[sd.pair(0, b)])
        )));
    }
    if let Some(i) = (0..sd.group.order()).find(|&i| !q.leq(&delta[i], y.delta_at(sd.split(i).1))) {
        return Ok(Some(format!(
            "projection is not a V-functor at {}: c = {} ≰ b = {}",
            label(i),
            q.format(&delta[i]),
            q.format(y.delta_at(sd.split(i).1))
        )));
    }
    Ok(None)
}

fn assemble(
    action: &GroupAction,
    x: &VGroup,
    y: &VGroup,
    sd: Semidirect,
    structure: VRel,
    condition: Option<(String, Vec<usize>)>,
) -> Result<SplitExtensionStructure, VGroupError> {
    let direct = split_extension_witness(&sd, x, y, &structure)?;
    let is_tensor = structure == tensor_matrix(&sd, x, y);
    let is_lex = structure == lex_matrix(&sd, x, y);
    let (witness, witness_locus) = match condition {
        Some((w, locus)) => (Some(w), Some(locus)),
        None => (direct.clone(), None),
    };
    Ok(SplitExtensionStructure {
        action: action.clone(),
        kernel: x.clone(),
        quotient: y.clone(),
        semidirect: sd,
        valid: witness_locus.is_none(),
        direct_valid: direct.is_none(),
        structure,
        witness,
        witness_locus,
        is_tensor,
        is_lex,
    })
}

/// The tensor structure `a ⊗ b` on `X ⋊_φ Y`. `valid` is the criterion that
/// `φ̄(x, y) = (φ_y(x), y)` is a V-functor of `a ⊗ b`; `direct_valid` checks
/// the split extension on the matrix itself.
pub fn semidirect_tensor(
    action: &GroupAction,
    x: &VGroup,
    y: &VGroup,
) -> Result<SplitExtensionStructure, VGroupError> {
    let sd = prepare(action, x, y)?;
    let c = tensor_matrix(&sd, x, y);
    let q = x.quantale();
    let n = sd.group.order();
    let bar = |i: usize| {
        let (u, b) = sd.split(i);
        sd.pair(action.phi[b][u], b)
    };
    let fail = (0..n * n)
        .map(|t| (t / n, t % n))
        .find(|&(i, j)| !q.leq(c.get(i, j), c.get(bar(i), bar(j))));
    let condition = fail.map(|(i, j)| {
        let l = |k: usize| sd.group.label(k).to_string();
        (
            format!(
                "φ̄ is not a V-functor at ({}, {}): (a⊗b)({}, {}) = {} ≰ (a⊗b)({}, {}) = {}",
                l(i),
                l(j),
                l(i),
                l(j),
                c.format_entry(i, j),
                l(bar(i)),
                l(bar(j)),
                c.format_entry(bar(i), bar(j))
            ),
            vec![i, j],
        )
    });
    assemble(action, x, y, sd, c, condition)
}

/// The lexicographic structure on `X ⋊_φ Y`. `valid` is the criterion
/// `b(y,0) ⊗ b(0,y) ≤ a(x,0)` for all `x` and all `y ≠ 0`; `direct_valid`
/// checks the split extension on the matrix itself.
pub fn semidirect_lex(
    action: &GroupAction,
    x: &VGroup,
    y: &VGroup,
) -> Result<SplitExtensionStructure, VGroupError> {
    let sd = prepare(action, x, y)?;
    let c = lex_matrix(&sd, x, y);
    let q = x.quantale();
    let fail = (1..y.order())
        .flat_map(|b| (0..x.order()).map(move |u| (u, b)))
        .find(|&(u, b)| !q.leq(&q.tensor(y.entry(b, 0), y.entry(0, b)), x.entry(u, 0)));
    let condition = fail.map(|(u, b)| {
        let (lx, ly) = (x.group().label(u), y.group().label(b));
        (
            format!(
                "b({ly},0) ⊗ b(0,{ly}) = {} ⊗ {} = {} ≰ a({lx},0) = {}",
                q.format(y.entry(b, 0)),
                q.format(y.entry(0, b)),
                q.format(&q.tensor(y.entry(b, 0), y.entry(0, b))),
                q.format(x.entry(u, 0))
            ),
            vec![u, b],
        )
    });
    assemble(action, x, y, sd, c, condition)
}

/// Every structure `c` on `X ⋊_φ Y` making the diagram a split extension of
/// V-groups, over a finite quantale. `c` is forced on the kernel fiber
/// (`δ_c(x,0) = δ_a(x)`) and on the section fiber (`δ_c(0,y) = δ_b(y)`);
/// the remaining entries range over values below `δ_b(y)`.
pub fn enumerate_split_structures(
    action: &GroupAction,
    x: &VGroup,
    y: &VGroup,
    bound: u128,
) -> Result<Vec<SplitExtensionStructure>, VGroupError> {
    let q = x.quantale().clone();
    let elems = q
        .elements()
        .ok_or_else(|| VGroupError::Precondition(format!("{} is not finite", q.name())))?;
    let sd = prepare(action, x, y)?;
    let n = sd.group.order();
    let mut base = vec![q.bottom(); n];
    let mut free: Vec<(usize, Vec<Value>)> = Vec::new();
    for (i, slot) in base.iter_mut().enumerate() {
        let (u, b) = sd.split(i);
        if b == 0 {
            *slot = x.delta_at(u).clone();
        } else if u == 0 {
            *slot = y.delta_at(b).clone();
        } else {
            let options = elems
                .iter()
                .filter(|v| q.leq(v, y.delta_at(b)))
                .cloned()
                .collect();
            free.push((i, options));
        }
    }
    let needed = free
        .iter()
        .try_fold(1u128, |acc, (_, o)| acc.checked_mul(o.len() as u128))
        .unwrap_or(u128::MAX);
    if needed > bound {
        return Err(VGroupError::BoundExceeded { needed, bound });
    }
    let profiles = par::filter_map_range(needed as usize, |mut code| {
        let mut delta = base.clone();
        for (i, options) in &free {
            delta[*i] = options[code % options.len()].clone();
            code /= options.len();
        }
        check_profile(&sd.group, &q, &delta)
            .is_ok()
            .then_some(delta)
    });
    profiles
        .into_iter()
        .map(|delta| {
            let c = VGroup::new_unchecked(sd.group.clone(), q.clone(), delta)
                .matrix()
                .into_rel();
            let s = assemble(action, x, y, sd.clone(), c, None)?;
            if !s.direct_valid {
                return Err(VGroupError::Internal(format!(
                    "enumerated profile fails the split extension check: {}",
                    s.witness.unwrap_or_default()
                )));
            }
            Ok(s)
        })
        .collect()
}
