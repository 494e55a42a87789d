//! Object-level properties: jointly strongly epimorphic pairs, strongly
//! unital and protomodular objects, and automorphism V-groups.

use std::sync::Arc;

use crate::group::{
    catalog, enumerate_actions, enumerate_automorphisms, enumerate_homs, semidirect_product_group,
    FiniteGroup, GroupHom, HOM_SEARCH_BOUND,
};
use crate::par;
use crate::quantale::Value;
use crate::report::LawReport;

use super::{
    enumerate_split_structures, enumerate_vgroup_structures, generated_structure, hom_witness,
    is_symmetric_vgroup, product_vgroup, restrict, vgroup_from_delta, VGroup, VGroupError,
    VGroupHom,
};

/// An entry where the structure generated by the images falls short.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JointWitness {
    pub entry: usize,
    pub label: String,
    pub generated: Value,
    pub actual: Value,
}

#[derive(Debug, Clone)]
pub struct JointEpi {
    pub holds: bool,
    /// The images generate the common codomain as a group.
    pub generates: bool,
    /// The least compatible structure making both maps V-functors.
    pub generated: Option<VGroup>,
    pub witness: Option<JointWitness>,
}

/// Whether `f: X → Z` and `g: Y → Z` are jointly strongly epimorphic.
///
/// Monomorphisms of V-groups are the injective V-homomorphisms, so the pair
/// fails exactly when the images lie in a proper subgroup, or when the least
/// structure on `Z` making `f` and `g` V-functors is strictly below `δ_Z`
/// (the identity of `Z` is then a non-invertible mono they factor through).
pub fn is_jointly_strongly_epi(f: &VGroupHom, g: &VGroupHom) -> Result<JointEpi, VGroupError> {
    if f.target != g.target {
        return Err(VGroupError::Precondition(
            "maps with different codomains".into(),
        ));
    }
    let z = &f.target;
    let (zg, q) = (z.group(), z.quantale());
    let images: Vec<usize> = f.map.iter().chain(&g.map).copied().collect();
    let generates = zg.subgroup_generated(&images).len() == zg.order();
    if !generates {
        return Ok(JointEpi {
            holds: false,
            generates,
            generated: None,
            witness: None,
        });
    }
    let mut seed = vec![q.bottom(); z.order()];
    for h in [f, g] {
        for (u, &c) in h.map.iter().enumerate() {
            seed[c] = q.join(&seed[c], h.source.delta_at(u));
        }
    }
    let generated = generated_structure(zg, q, &seed)?;
    let witness = (0..z.order())
        .find(|&c| generated.delta_at(c) != z.delta_at(c))
        .map(|c| JointWitness {
            entry: c,
            label: zg.label(c).to_string(),
            generated: generated.delta_at(c).clone(),
            actual: z.delta_at(c).clone(),
        });
    Ok(JointEpi {
        holds: witness.is_none(),
        generates,
        generated: Some(generated),
        witness,
    })
}

/// The point built from a failure of `b(0,x) = b(x,0) ⊗ b(0,x)`: on
/// `Y × ⟨x⟩`, the product structure `d` against the structure `c`
/// generated by `c₀((0,0),(y,z)) = b(z,y) ⊗ b(0,z)`.
#[derive(Debug, Clone)]
pub struct UnitalCounterexample {
    pub x: usize,
    /// `⟨x⟩` as sorted indices of `Y`.
    pub subgroup: Vec<usize>,
    /// `(Y × ⟨x⟩, d)`, pair `(y, z)` at index `pos(z)·|Y| + y`.
    pub product: VGroup,
    /// `(Y × ⟨x⟩, c)`.
    pub generated: VGroup,
    /// Index of `(0, x)`.
    pub entry: usize,
    pub c_value: Value,
    pub d_value: Value,
    /// `b(x,0) ⊗ b(0,x)`.
    pub formula: Value,
    /// `⟨1,0⟩: Y → (Y×⟨x⟩, d)` and `⟨j,1⟩: ⟨x⟩ → (Y×⟨x⟩, d)`.
    pub joint: JointEpi,
}

#[derive(Debug, Clone)]
pub struct StronglyUnital {
    /// `b(0,y) = b(y,0) ⊗ b(0,y)` for every `y`.
    pub necessary_condition: bool,
    /// First `y` where it fails, with `b(0,y)` and `b(y,0) ⊗ b(0,y)`.
    pub failure: Option<(usize, Value, Value)>,
    pub counterexample: Option<UnitalCounterexample>,
}

pub fn strongly_unital_check(y: &VGroup) -> Result<StronglyUnital, VGroupError> {
    let (g, q) = (y.group(), y.quantale());
    let twice = |u: usize| q.tensor(y.entry(u, 0), y.entry(0, u));
    let Some(x) = (0..y.order()).find(|&u| twice(u) != *y.entry(0, u)) else {
        return Ok(StronglyUnital {
            necessary_condition: true,
            failure: None,
            counterexample: None,
        });
    };
    let subgroup = g.subgroup_generated(&[x]);
    let (sub, _) = restrict(y, &subgroup)?;
    let product = product_vgroup(y, &sub)?;
    let n = y.order();
    let seed: Vec<Value> = (0..product.order())
        .map(|i| {
            let (a, z) = (i % n, subgroup[i / n]);
            q.tensor(y.entry(z, a), y.entry(0, z))
        })
        .collect();
    let generated = generated_structure(product.group(), q, &seed)?;
    let pos = subgroup
        .iter()
        .position(|&s| s == x)
        .expect("x generates its subgroup");
    let entry = pos * n;
    let left = VGroupHom::new(y.clone(), product.clone(), (0..n).collect())?;
    let right = VGroupHom::new(
        sub.clone(),
        product.clone(),
        subgroup
            .iter()
            .enumerate()
            .map(|(p, &s)| p * n + s)
            .collect(),
    )?;
    let joint = is_jointly_strongly_epi(&left, &right)?;
    if joint.generated.as_ref() != Some(&generated) {
        return Err(VGroupError::Internal(
            "generated structure differs from the closure of the pushed-forward profiles".into(),
        ));
    }
    Ok(StronglyUnital {
        necessary_condition: false,
        failure: Some((x, y.entry(0, x).clone(), twice(x))),
        counterexample: Some(UnitalCounterexample {
            x,
            subgroup,
            entry,
            c_value: generated.delta_at(entry).clone(),
            d_value: product.delta_at(entry).clone(),
            formula: twice(x),
            product,
            generated,
            joint,
        }),
    })
}

/// Limits for the search over points and their pullbacks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PointSearch {
    pub max_kernel_order: usize,
    pub max_point_order: usize,
    pub max_pullback_order: usize,
    pub bound: u128,
}

impl Default for PointSearch {
    fn default() -> Self {
        PointSearch {
            max_kernel_order: 3,
            max_point_order: 8,
            max_pullback_order: 6,
            bound: 100_000,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ProtomodularCheck {
    pub symmetric: bool,
    pub point_search: LawReport,
}

struct Pullback {
    z: VGroup,
    homs: Vec<GroupHom>,
}

/// Over a frame, decides whether `Y` is a protomodular object by symmetry,
/// and tests the verdict against the points found by search: for symmetric
/// `Y` every enumerated point and every pullback of it must be strong; for
/// non-symmetric `Y` the strongly-unital counterexample must fail.
pub fn protomodular_object_check(
    y: &VGroup,
    search: &PointSearch,
) -> Result<ProtomodularCheck, VGroupError> {
    let q = y.quantale();
    if !q.is_frame() {
        return Err(VGroupError::Precondition(format!(
            "{} is not a frame; only the necessary condition b(0,y) = b(y,0) ⊗ b(0,y) is available",
            q.name()
        )));
    }
    let symmetric = is_symmetric_vgroup(y);
    let mut report = LawReport::new(
        "point_search",
        format!("points over {y:?} are stably strong iff the structure is symmetric ({symmetric})"),
    );
    if !symmetric {
        let su = strongly_unital_check(y)?;
        let ok = su.counterexample.as_ref().is_some_and(|c| !c.joint.holds);
        report.record(ok, || {
            "non-symmetric structure without a non-strong point".into()
        });
        return Ok(ProtomodularCheck {
            symmetric,
            point_search: report,
        });
    }
    let yg = y.group();
    let mut pullbacks: Vec<Pullback> = Vec::new();
    for zg in catalog(search.max_pullback_order) {
        let homs = enumerate_homs(&zg, yg, search.bound)?;
        for z in enumerate_vgroup_structures(&zg, q, search.bound)? {
            let homs: Vec<GroupHom> = homs
                .iter()
                .filter(|h| hom_witness(&z, y, &h.map).is_none())
                .cloned()
                .collect();
            pullbacks.push(Pullback { z, homs });
        }
    }
    let mut points = Vec::new();
    for xg in catalog(search.max_kernel_order) {
        if xg.order() * y.order() > search.max_point_order {
            continue;
        }
        let actions = enumerate_actions(yg, &xg, search.bound)?;
        for a in enumerate_vgroup_structures(&xg, q, search.bound)? {
            for act in &actions {
                match enumerate_split_structures(act, &a, y, search.bound) {
                    Ok(found) => points.extend(found),
                    Err(VGroupError::ActionNotFunctorial { .. }) => {}
                    Err(e) => return Err(e),
                }
            }
        }
    }
    let outcomes = par::map(&points, |p| -> Result<Vec<(bool, String)>, VGroupError> {
        let c = p.vgroup().expect("enumerated points are valid");
        let a = &p.kernel;
        let mut out = Vec::new();
        for pb in &pullbacks {
            for h in &pb.homs {
                let act = p.action.pullback(h);
                let sd = semidirect_product_group(&act)?;
                let delta = (0..sd.group.order())
                    .map(|i| {
                        let (u, w) = sd.split(i);
                        q.meet(pb.z.delta_at(w), c.delta_at(p.semidirect.pair(u, h.map[w])))
                    })
                    .collect();
                let d = vgroup_from_delta(sd.group.clone(), q.clone(), delta)
                    .map_err(|e| VGroupError::Internal(format!("pullback structure: {e}")))?;
                let kernel = VGroupHom::new(a.clone(), d.clone(), sd.kernel_injection.map.clone())?;
                let section = VGroupHom::new(pb.z.clone(), d.clone(), sd.section.map.clone())?;
                let joint = is_jointly_strongly_epi(&kernel, &section)?;
                let describe = || {
                    format!(
                        "point {:?} with c = {} pulled back along {:?} from {:?}: {:?}",
                        p.action,
                        q.format_all(c.delta()),
                        h,
                        pb.z,
                        joint.witness
                    )
                };
                out.push((
                    joint.holds,
                    if joint.holds {
                        String::new()
                    } else {
                        describe()
                    },
                ));
            }
        }
        Ok(out)
    });
    for chunk in outcomes {
        for (ok, w) in chunk? {
            report.record(ok, || w);
        }
    }
    report.detail(format!(
        "{} points, {} pullback targets",
        points.len(),
        pullbacks.len()
    ));
    Ok(ProtomodularCheck {
        symmetric,
        point_search: report,
    })
}

/// The group of automorphisms that are also V-isomorphisms, with
/// `[f, g] = ⋀_x a(f x, g x)`.
#[derive(Debug, Clone)]
pub struct AutVGroup {
    pub vgroup: VGroup,
    /// The automorphism behind each element, identity first.
    pub maps: Vec<Vec<usize>>,
}

pub fn aut_vgroup(x: &VGroup) -> Result<AutVGroup, VGroupError> {
    if !is_symmetric_vgroup(x) {
        return Err(VGroupError::Precondition(format!("{x:?} is not symmetric")));
    }
    let g = x.group();
    let maps: Vec<Vec<usize>> = enumerate_automorphisms(g, HOM_SEARCH_BOUND)?
        .into_iter()
        .map(|f| f.map)
        .filter(|f| (0..x.order()).all(|u| x.delta_at(f[u]) == x.delta_at(u)))
        .collect();
    let labels: Vec<String> = maps
        .iter()
        .enumerate()
        .map(|(i, f)| {
            if i == 0 {
                "id".to_string()
            } else {
                let parts: Vec<&str> = f.iter().map(|&u| g.label(u)).collect();
                format!("[{}]", parts.join(","))
            }
        })
        .collect();
    let index = |f: &[usize]| {
        maps.iter().position(|m| m == f).ok_or_else(|| {
            VGroupError::Internal("V-automorphisms are not closed under composition".into())
        })
    };
    let mut add = Vec::with_capacity(maps.len());
    for s in &maps {
        let row = maps
            .iter()
            .map(|t| index(&t.iter().map(|&u| s[u]).collect::<Vec<_>>()))
            .collect::<Result<Vec<_>, _>>()?;
        add.push(row);
    }
    let aut = Arc::new(FiniteGroup::from_table(
        format!("Aut({})", g.name()),
        labels,
        add,
    )?);
    let q = x.quantale();
    let bracket =
        |f: &[usize], h: &[usize]| q.meet_all((0..x.order()).map(|u| x.entry(f[u], h[u])));
    let delta: Vec<Value> = maps.iter().map(|f| bracket(&maps[0], f)).collect();
    let out = vgroup_from_delta(aut.clone(), q.clone(), delta)?;
    for (i, f) in maps.iter().enumerate() {
        for (j, h) in maps.iter().enumerate() {
            if bracket(f, h) != *out.entry(i, j) {
                return Err(VGroupError::Internal(format!(
                    "[{}, {}] differs from the shift-invariant profile",
                    aut.label(i),
                    aut.label(j)
                )));
            }
        }
    }
    if !is_symmetric_vgroup(&out) {
        return Err(VGroupError::Internal(
            "automorphism V-group is not symmetric".into(),
        ));
    }
    Ok(AutVGroup { vgroup: out, maps })
}
