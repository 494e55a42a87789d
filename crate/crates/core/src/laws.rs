//! Executable checks of structural theorems over families of instances.
//!
//! Each suite pairs a claim with a check procedure and an instance family
//! drawn from a [`LawConfig`]: finite quantales are enumerated exhaustively,
//! infinite ones are sampled deterministically from `seed`.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::group::{
    catalog, enumerate_actions, enumerate_homs, FiniteGroup, GroupAction, GroupError, GroupHom,
};
use crate::par;
use crate::quantale::{
    builtin_lax_homs, check_adjunction, check_lax_hom, two, Quantale, QuantaleError, QuantaleSpec,
    Value,
};
use crate::report::LawReport;
use crate::vgroup::{
    change_of_base_vgroup, enumerate_split_structures, enumerate_vgroup_structures,
    epi_mono_report, generated_structure, hom_witness, is_jointly_strongly_epi,
    is_symmetric_vgroup, product_injections, product_vgroup, protomodular_object_check,
    quotient_vgroup, semidirect_lex, semidirect_tensor, strongly_unital_check, PointSearch, VGroup,
    VGroupError, VGroupHom,
};
use crate::vrel::{
    count_vfunctors, enumerate_vcategories, internal_hom, isomorphism_key, regularity_report,
    tensor_cat, VCategory, VRelError, FUNCTOR_SEARCH_BOUND,
};

#[derive(Debug, Error)]
pub enum LawError {
    #[error("unknown suite `{id}`; registered suites: {}", known.join(", "))]
    UnknownSuite { id: String, known: Vec<String> },
    #[error(transparent)]
    VGroup(#[from] VGroupError),
    #[error(transparent)]
    VRel(#[from] VRelError),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Quantale(#[from] QuantaleError),
}

/// Instance-family parameters shared by all suites.
#[derive(Debug, Clone)]
pub struct LawConfig {
    pub quantale: QuantaleSpec,
    /// Groups carrying the V-group structures under test.
    pub groups: Vec<Arc<FiniteGroup>>,
    /// Largest group order for hom and quotient families.
    pub max_group_order: usize,
    /// Largest `|X ⋊ Y|` for split-extension families.
    pub max_semidirect_order: usize,
    /// Cap on enumerated candidates (structures, split structures, homs).
    pub max_candidates: u128,
    /// Largest carrier for the monoidal-closure and regularity families.
    pub max_carrier: usize,
    /// Cap on monoidal-closure triples; the carrier bound is lowered until
    /// the isomorphism classes fit.
    pub max_closure_triples: usize,
    /// Sampled elements of an infinite quantale.
    pub samples: usize,
    /// Sampled V-group structures per group over an infinite quantale.
    pub sampled_structures: usize,
    pub seed: u64,
    pub point_search: PointSearch,
    /// Suite forced to fail, as a negative control.
    pub force_fail: Option<String>,
}

impl Default for LawConfig {
    fn default() -> Self {
        let g = |f: FiniteGroup| Arc::new(f);
        LawConfig {
            quantale: QuantaleSpec::Chain { n: 3 },
            groups: vec![
                g(FiniteGroup::cyclic(2)),
                g(FiniteGroup::cyclic(3)),
                g(FiniteGroup::cyclic(4)),
                g(FiniteGroup::klein()),
                g(FiniteGroup::symmetric(3)),
            ],
            max_group_order: 6,
            max_semidirect_order: 8,
            max_candidates: 100_000,
            max_carrier: 3,
            max_closure_triples: 1_000_000,
            samples: 100,
            sampled_structures: 8,
            seed: 0,
            point_search: PointSearch::default(),
            force_fail: None,
        }
    }
}

impl LawConfig {
    pub fn with_quantale(mut self, spec: QuantaleSpec) -> Self {
        self.quantale = spec;
        self
    }
}

/// A registered suite.
#[derive(Debug, Clone, Copy)]
pub struct SuiteInfo {
    pub id: &'static str,
    pub claim: &'static str,
}

type SuiteFn = fn(&Ctx, &mut LawReport) -> Result<(), LawError>;

const SUITES: &[(SuiteInfo, SuiteFn)] = &[
    (
        SuiteInfo {
            id: "unital_iff_frame",
            claim: "product injections X → X × Y ← Y are jointly strongly epimorphic for all V-groups exactly when ⊗ = ∧",
        },
        unital_iff_frame,
    ),
    (
        SuiteInfo {
            id: "proto_iff_symmetric",
            claim: "over a frame, a V-group is a protomodular object iff it is symmetric",
        },
        proto_iff_symmetric,
    ),
    (
        SuiteInfo {
            id: "sandwich",
            claim: "every split extension structure c on X ⋊ Y satisfies a ⊗ b ≤ c ≤ lex; over a frame with symmetric Y only a ∧ b occurs",
        },
        sandwich,
    ),
    (
        SuiteInfo {
            id: "tensor_validity",
            claim: "a ⊗ b makes X ⋊ Y a split extension iff (x, y) ↦ (φ_y(x), y) is a V-functor of a ⊗ b",
        },
        tensor_validity,
    ),
    (
        SuiteInfo {
            id: "lex_validity",
            claim: "lex makes X ⋊ Y a split extension iff b(y,0) ⊗ b(0,y) ≤ a(x,0) for all x and all y ≠ 0",
        },
        lex_validity,
    ),
    (
        SuiteInfo {
            id: "finite_frame_symmetric",
            claim: "over a frame, every V-group structure on a finite group is symmetric",
        },
        finite_frame_symmetric,
    ),
    (
        SuiteInfo {
            id: "open_iff_proper",
            claim: "a V-homomorphism between V-groups is open iff it is proper",
        },
        open_iff_proper,
    ),
    (
        SuiteInfo {
            id: "regepi_open_proper",
            claim: "every regular epimorphism of V-groups is both open and proper",
        },
        regepi_open_proper,
    ),
    (
        SuiteInfo {
            id: "monoidal_closure",
            claim: "V-functors A ⊗ B → C correspond bijectively to V-functors A → [B, C]",
        },
        monoidal_closure,
    ),
    (
        SuiteInfo {
            id: "regularity_lemma",
            claim: "a V-category is regular iff symmetric iff positive iff difunctional",
        },
        regularity_lemma,
    ),
    (
        SuiteInfo {
            id: "adjunction_chain",
            claim: "ι ⊣ p, and o ⊣ τ when V is optimistic; change of base along p undoes ι on preordered groups",
        },
        adjunction_chain,
    ),
    (
        SuiteInfo {
            id: "normality",
            claim: "every regular epimorphism of V-groups is the cokernel of its kernel",
        },
        normality,
    ),
    (
        SuiteInfo {
            id: "strongly_unital_necessary",
            claim: "a strongly unital V-group satisfies b(0,y) = b(y,0) ⊗ b(0,y); each failure yields a point that is not strong",
        },
        strongly_unital_necessary,
    ),
];

pub fn registry() -> Vec<SuiteInfo> {
    SUITES.iter().map(|(info, _)| *info).collect()
}

/// Runs one suite. The report is deterministic apart from `duration_ms`.
pub fn run_suite(id: &str, cfg: &LawConfig) -> Result<LawReport, LawError> {
    let (info, check) = SUITES
        .iter()
        .find(|(info, _)| info.id == id)
        .ok_or_else(|| LawError::UnknownSuite {
            id: id.to_string(),
            known: SUITES.iter().map(|(i, _)| i.id.to_string()).collect(),
        })?;
    let start = Instant::now();
    let ctx = Ctx::new(cfg)?;
    let mut report = LawReport::new(info.id, info.claim);
    report.detail(format!("quantale {}", ctx.q.name()));
    check(&ctx, &mut report)?;
    if report.attempted == 0 && !report.is_fail() {
        report.status = crate::report::Status::Skipped;
    }
    if cfg.force_fail.as_deref() == Some(info.id) {
        report.fail("forced failure (negative control)");
    }
    report.duration_ms = start.elapsed().as_millis() as u64;
    Ok(report)
}

/// Runs the suites in `ids` (all when `None`) in parallel, reporting in
/// registry order.
pub fn run_all(cfg: &LawConfig, ids: Option<&[String]>) -> Result<Vec<LawReport>, LawError> {
    if let Some(ids) = ids {
        if let Some(bad) = ids
            .iter()
            .find(|id| !SUITES.iter().any(|(i, _)| i.id == id.as_str()))
        {
            return Err(LawError::UnknownSuite {
                id: bad.clone(),
                known: SUITES.iter().map(|(i, _)| i.id.to_string()).collect(),
            });
        }
    }
    let chosen: Vec<&str> = SUITES
        .iter()
        .map(|(i, _)| i.id)
        .filter(|id| ids.is_none_or(|ids| ids.iter().any(|s| s == id)))
        .collect();
    par::map(&chosen, |id| run_suite(id, cfg))
        .into_iter()
        .collect()
}

struct Ctx<'a> {
    cfg: &'a LawConfig,
    q: Arc<Quantale>,
}

impl<'a> Ctx<'a> {
    fn new(cfg: &'a LawConfig) -> Result<Self, LawError> {
        Ok(Ctx {
            cfg,
            q: cfg.quantale.build()?,
        })
    }

    fn samples(&self) -> Vec<Value> {
        self.q.sample(self.cfg.samples, self.cfg.seed)
    }

    /// All structures on `g` over a finite quantale; otherwise discrete,
    /// indiscrete and structures generated from random seeds.
    fn structures(&self, g: &Arc<FiniteGroup>) -> Result<Vec<VGroup>, LawError> {
        let q = &self.q;
        if q.is_finite() {
            return Ok(enumerate_vgroup_structures(g, q, self.cfg.max_candidates)?);
        }
        let values = self.samples();
        let mut rng = ChaCha8Rng::seed_from_u64(self.cfg.seed ^ (g.order() as u64) << 32);
        let mut out = vec![
            VGroup::discrete(g.clone(), q.clone())?,
            VGroup::indiscrete(g.clone(), q.clone())?,
        ];
        for _ in 0..self.cfg.sampled_structures {
            let seed: Vec<Value> = (0..g.order())
                .map(|_| values[rng.gen_range(0..values.len())].clone())
                .collect();
            let s = generated_structure(g, q, &seed)?;
            if !out.contains(&s) {
                out.push(s);
            }
        }
        Ok(out)
    }

    /// Over an infinite quantale, keeps at most `samples` evenly spaced items.
    fn thin<T>(&self, items: Vec<T>, report: &mut LawReport) -> Vec<T> {
        let (n, max) = (items.len(), self.cfg.samples.max(1));
        if self.q.is_finite() || n <= max {
            return items;
        }
        report.detail(format!("sampled {max} of {n} instances"));
        items
            .into_iter()
            .enumerate()
            .filter(|(i, _)| i * max / n != (i + 1) * max / n)
            .map(|(_, x)| x)
            .collect()
    }

    fn finite_or_skip(&self, report: &mut LawReport) -> bool {
        if !self.q.is_finite() {
            report.detail(format!(
                "{} is infinite; exhaustive enumeration does not apply",
                self.q.name()
            ));
        }
        self.q.is_finite()
    }
}

fn fmt_vgroup(x: &VGroup) -> String {
    format!(
        "{} δ = {}",
        x.group().name(),
        x.quantale().format_all(x.delta())
    )
}

fn unital_iff_frame(ctx: &Ctx, report: &mut LawReport) -> Result<(), LawError> {
    let q = &ctx.q;
    if q.is_frame() {
        let groups: Vec<Arc<FiniteGroup>> = ctx
            .cfg
            .groups
            .iter()
            .filter(|g| g.order() <= 4)
            .cloned()
            .collect();
        let mut all = Vec::new();
        for g in &groups {
            all.extend(ctx.structures(g)?);
        }
        let pairs: Vec<(usize, usize)> = (0..all.len())
            .flat_map(|i| (0..all.len()).map(move |j| (i, j)))
            .collect();
        let pairs = ctx.thin(pairs, report);
        let outcomes = par::map(&pairs, |&(i, j)| -> Result<Result<(), String>, LawError> {
            let p = product_vgroup(&all[i], &all[j])?;
            let (f, g) = product_injections(&all[i], &all[j], &p)?;
            let r = is_jointly_strongly_epi(&f, &g)?;
            Ok(if r.holds {
                Ok(())
            } else {
                Err(format!(
                    "injections into {} × {} are not jointly strongly epimorphic: {:?}",
                    fmt_vgroup(&all[i]),
                    fmt_vgroup(&all[j]),
                    r.witness
                ))
            })
        });
        report.record_all(outcomes.into_iter().collect::<Result<Vec<_>, _>>()?);
        return Ok(());
    }
    let pool = ctx.samples();
    let pair = pool
        .iter()
        .flat_map(|u| pool.iter().map(move |v| (u, v)))
        .find(|(u, v)| q.tensor(u, v) != q.meet(u, v));
    let Some((u, v)) = pair else {
        report.fail(format!(
            "{} is not a frame but no sampled u, v has u ⊗ v < u ∧ v",
            q.name()
        ));
        return Ok(());
    };
    let z2 = Arc::new(FiniteGroup::cyclic(2));
    let a = VGroup::new(z2.clone(), q.clone(), vec![q.top(), u.clone()])?;
    let b = VGroup::new(z2, q.clone(), vec![q.top(), v.clone()])?;
    let p = product_vgroup(&a, &b)?;
    let (f, g) = product_injections(&a, &b, &p)?;
    let r = is_jointly_strongly_epi(&f, &g)?;
    match &r.witness {
        Some(w) if !r.holds => {
            let exact = w.generated == q.tensor(u, v) && w.actual == q.meet(u, v);
            report.record(exact, || {
                format!("witness values differ from u ⊗ v and u ∧ v: {w:?}")
            });
            report.detail(format!(
                "u = {}, v = {}: injections into Z2 × Z2 fail at entry {}: generated {} < product {}",
                q.format(u),
                q.format(v),
                w.label,
                q.format(&w.generated),
                q.format(&w.actual)
            ));
        }
        _ => report.record(false, || {
            format!(
                "u = {}, v = {}: injections are jointly strongly epimorphic",
                q.format(u),
                q.format(v)
            )
        }),
    }
    Ok(())
}

fn proto_iff_symmetric(ctx: &Ctx, report: &mut LawReport) -> Result<(), LawError> {
    if !ctx.q.is_frame() {
        report.detail("not a frame: only the strongly unital necessary condition applies");
        return Ok(());
    }
    if !ctx.finite_or_skip(report) {
        return Ok(());
    }
    let mut points = 0u64;
    for g in ctx
        .cfg
        .groups
        .iter()
        .filter(|g| g.order() <= ctx.cfg.max_group_order)
    {
        for y in ctx.structures(g)? {
            let r = protomodular_object_check(&y, &ctx.cfg.point_search)?;
            points += r.point_search.attempted;
            let ps = r.point_search;
            report.record(ps.is_pass(), || {
                format!(
                    "{}: point search disagrees with symmetric = {}: {}",
                    fmt_vgroup(&y),
                    r.symmetric,
                    ps.witness.clone().unwrap_or_default()
                )
            });
        }
    }
    report.detail(format!("{points} pulled-back points tested"));
    Ok(())
}

struct SplitInstance {
    action: GroupAction,
    kernel: VGroup,
    quotient: VGroup,
}

/// Functorial actions with kernel and quotient structures, `|X|, |Y| ≥ 2`.
fn split_instances(ctx: &Ctx) -> Result<(Vec<SplitInstance>, usize), LawError> {
    let groups = catalog(ctx.cfg.max_semidirect_order / 2);
    let mut structures: HashMap<String, Vec<VGroup>> = HashMap::new();
    for g in &groups {
        if g.order() >= 2 {
            structures.insert(g.name().to_string(), ctx.structures(g)?);
        }
    }
    let mut out = Vec::new();
    let mut skipped = 0;
    for x in groups.iter().filter(|g| g.order() >= 2) {
        for y in groups.iter().filter(|g| g.order() >= 2) {
            if x.order() * y.order() > ctx.cfg.max_semidirect_order {
                continue;
            }
            let actions = enumerate_actions(y, x, ctx.cfg.max_candidates)?;
            for a in &structures[x.name()] {
                for b in &structures[y.name()] {
                    for act in &actions {
                        let functorial = (0..y.order()).all(|w| {
                            (0..x.order())
                                .all(|u| ctx.q.leq(a.delta_at(u), a.delta_at(act.phi[w][u])))
                        });
                        if functorial {
                            out.push(SplitInstance {
                                action: act.clone(),
                                kernel: a.clone(),
                                quotient: b.clone(),
                            });
                        } else {
                            skipped += 1;
                        }
                    }
                }
            }
        }
    }
    Ok((out, skipped))
}

fn describe_instance(s: &SplitInstance) -> String {
    format!(
        "{:?}, kernel {}, quotient {}",
        s.action,
        fmt_vgroup(&s.kernel),
        fmt_vgroup(&s.quotient)
    )
}

fn sandwich(ctx: &Ctx, report: &mut LawReport) -> Result<(), LawError> {
    if !ctx.finite_or_skip(report) {
        return Ok(());
    }
    let (instances, _) = split_instances(ctx)?;
    let instances = ctx.thin(instances, report);
    let frame = ctx.q.is_frame();
    let results = par::map(
        &instances,
        |inst| -> Result<(Vec<Result<(), String>>, usize, bool), LawError> {
            let found = enumerate_split_structures(
                &inst.action,
                &inst.kernel,
                &inst.quotient,
                ctx.cfg.max_candidates,
            )?;
            let mut out = Vec::new();
            for s in &found {
                let ok = s.tensor_bound().leq(&s.structure) && s.structure.leq(&s.lex_bound());
                out.push(if ok {
                    Ok(())
                } else {
                    Err(format!(
                        "{}: structure {} is outside [a⊗b, lex]",
                        describe_instance(inst),
                        ctx.q.format_all(&s.delta())
                    ))
                });
            }
            if frame && is_symmetric_vgroup(&inst.quotient) {
                let ok = found.len() <= 1 && found.iter().all(|s| s.is_tensor);
                out.push(if ok {
                    Ok(())
                } else {
                    Err(format!(
                        "{}: symmetric quotient over a frame admits {} structures",
                        describe_instance(inst),
                        found.len()
                    ))
                });
            }
            let both = found.iter().any(|s| s.is_tensor) && found.iter().any(|s| s.is_lex);
            Ok((out, found.len(), both))
        },
    );
    let (mut total, mut attained) = (0, 0);
    for r in results {
        let (outcomes, n, both) = r?;
        report.record_all(outcomes);
        total += n;
        attained += usize::from(both);
    }
    report.detail(format!(
        "{} instances, {total} split structures, both bounds attained in {attained}",
        instances.len()
    ));
    Ok(())
}

fn validity_agreement(ctx: &Ctx, report: &mut LawReport, lex: bool) -> Result<(), LawError> {
    let (instances, skipped) = split_instances(ctx)?;
    let instances = ctx.thin(instances, report);
    let results = par::map(&instances, |inst| -> Result<(bool, bool), LawError> {
        let s = if lex {
            semidirect_lex(&inst.action, &inst.kernel, &inst.quotient)?
        } else {
            semidirect_tensor(&inst.action, &inst.kernel, &inst.quotient)?
        };
        Ok((s.valid, s.direct_valid))
    });
    let mut valid = 0;
    for (inst, r) in instances.iter().zip(results) {
        let (criterion, direct) = r?;
        valid += usize::from(direct);
        report.record(criterion == direct, || {
            format!(
                "{}: criterion says {criterion}, direct validation says {direct}",
                describe_instance(inst)
            )
        });
    }
    report.detail(format!(
        "{valid} of {} instances valid; {skipped} non-functorial actions excluded",
        instances.len()
    ));
    Ok(())
}

fn tensor_validity(ctx: &Ctx, report: &mut LawReport) -> Result<(), LawError> {
    validity_agreement(ctx, report, false)
}

fn lex_validity(ctx: &Ctx, report: &mut LawReport) -> Result<(), LawError> {
    validity_agreement(ctx, report, true)
}

fn finite_frame_symmetric(ctx: &Ctx, report: &mut LawReport) -> Result<(), LawError> {
    if !ctx.q.is_frame() {
        report.detail("not a frame");
        return Ok(());
    }
    let mut counts = Vec::new();
    for g in &ctx.cfg.groups {
        let all = ctx.structures(g)?;
        counts.push(format!("{}: {}", g.name(), all.len()));
        for x in &all {
            report.record(is_symmetric_vgroup(x), || {
                format!("{} is not symmetric", fmt_vgroup(x))
            });
        }
    }
    report.detail(format!("structures per group: {}", counts.join(", ")));
    Ok(())
}

/// V-groups on the catalog up to `max_group_order` (order ≤ 4 when sampled).
fn hom_family(ctx: &Ctx) -> Result<Vec<VGroup>, LawError> {
    let max = if ctx.q.is_finite() {
        ctx.cfg.max_group_order
    } else {
        ctx.cfg.max_group_order.min(4)
    };
    let mut out = Vec::new();
    for g in catalog(max) {
        out.extend(ctx.structures(&g)?);
    }
    Ok(out)
}

/// All V-homomorphisms between members of the family, in a fixed order.
fn all_homs(ctx: &Ctx, family: &[VGroup]) -> Result<Vec<VGroupHom>, LawError> {
    let mut group_homs: BTreeMap<(String, String), Vec<GroupHom>> = BTreeMap::new();
    let mut out = Vec::new();
    for x in family {
        for y in family {
            let key = (x.group().name().to_string(), y.group().name().to_string());
            if !group_homs.contains_key(&key) {
                group_homs.insert(
                    key.clone(),
                    enumerate_homs(x.group(), y.group(), ctx.cfg.max_candidates)?,
                );
            }
            for h in &group_homs[&key] {
                if hom_witness(x, y, &h.map).is_none() {
                    out.push(VGroupHom {
                        source: x.clone(),
                        target: y.clone(),
                        map: h.map.clone(),
                    });
                }
            }
        }
    }
    Ok(out)
}

fn describe_hom(f: &VGroupHom) -> String {
    format!(
        "{} → {} by {:?}",
        fmt_vgroup(&f.source),
        fmt_vgroup(&f.target),
        f.map
    )
}

fn open_iff_proper(ctx: &Ctx, report: &mut LawReport) -> Result<(), LawError> {
    let family = hom_family(ctx)?;
    let homs = all_homs(ctx, &family)?;
    let outcomes = par::map(&homs, |f| {
        let r = epi_mono_report(f);
        if r.open == r.proper {
            Ok(())
        } else {
            Err(format!(
                "{}: open = {}, proper = {}",
                describe_hom(f),
                r.open,
                r.proper
            ))
        }
    });
    report.record_all(outcomes);
    report.detail(format!(
        "{} V-groups, {} homomorphisms",
        family.len(),
        homs.len()
    ));
    Ok(())
}

fn normal_subgroups(g: &FiniteGroup) -> Vec<Vec<usize>> {
    let n = g.order();
    let mut out: Vec<Vec<usize>> = Vec::new();
    for a in 0..n {
        for b in a..n {
            let h = g.normal_closure(&[a, b]);
            if !out.contains(&h) {
                out.push(h);
            }
        }
    }
    out.sort_by_key(|h| (h.len(), h.clone()));
    out
}

fn regepi_open_proper(ctx: &Ctx, report: &mut LawReport) -> Result<(), LawError> {
    let family = hom_family(ctx)?;
    for x in &family {
        for n in normal_subgroups(x.group()) {
            let (_, p) = quotient_vgroup(x, &n)?;
            let r = epi_mono_report(&p);
            report.record(r.regular_epi && r.proper && r.open, || {
                format!("{} modulo {n:?}: {r:?}", fmt_vgroup(x))
            });
        }
    }
    Ok(())
}

fn normality(ctx: &Ctx, report: &mut LawReport) -> Result<(), LawError> {
    let family = hom_family(ctx)?;
    let homs = all_homs(ctx, &family)?;
    let regular: Vec<&VGroupHom> = homs
        .iter()
        .filter(|f| epi_mono_report(f).regular_epi)
        .collect();
    let outcomes = par::map(&regular, |f| -> Result<Result<(), String>, LawError> {
        let kernel: Vec<usize> = (0..f.source.order()).filter(|&x| f.map[x] == 0).collect();
        let (q, p) = quotient_vgroup(&f.source, &kernel)?;
        // The induced map Q → Y must be an isomorphism of V-groups.
        let mut induced = vec![usize::MAX; q.order()];
        for (x, &c) in p.map.iter().enumerate() {
            if induced[c] != usize::MAX && induced[c] != f.map[x] {
                return Ok(Err(format!("{}: not constant on cosets", describe_hom(f))));
            }
            induced[c] = f.map[x];
        }
        let mut hit = induced.clone();
        hit.sort_unstable();
        hit.dedup();
        let iso = hit.len() == f.target.order()
            && (0..q.order()).all(|c| q.delta_at(c) == f.target.delta_at(induced[c]));
        Ok(if iso {
            Ok(())
        } else {
            Err(format!(
                "{}: quotient by the kernel is not isomorphic to the codomain",
                describe_hom(f)
            ))
        })
    });
    report.record_all(outcomes.into_iter().collect::<Result<Vec<_>, _>>()?);
    report.detail(format!(
        "{} regular epimorphisms among {} homomorphisms",
        regular.len(),
        homs.len()
    ));
    Ok(())
}

/// One V-category per isomorphism class, carriers `1..=max`.
fn category_representatives(q: &Arc<Quantale>, max: usize) -> Result<Vec<VCategory>, LawError> {
    let mut reps = Vec::new();
    for n in 1..=max {
        let mut seen = std::collections::BTreeSet::new();
        for c in enumerate_vcategories(q, n)? {
            if seen.insert(isomorphism_key(&c)) {
                reps.push(c);
            }
        }
    }
    Ok(reps)
}

fn monoidal_closure(ctx: &Ctx, report: &mut LawReport) -> Result<(), LawError> {
    if !ctx.finite_or_skip(report) {
        return Ok(());
    }
    let mut carrier = ctx.cfg.max_carrier;
    let mut reps = category_representatives(&ctx.q, carrier)?;
    while carrier > 1 && reps.len().pow(3) > ctx.cfg.max_closure_triples {
        report.detail(format!(
            "{} classes with at most {carrier} objects exceed {} triples; lowering the carrier bound",
            reps.len(),
            ctx.cfg.max_closure_triples
        ));
        carrier -= 1;
        reps = category_representatives(&ctx.q, carrier)?;
    }
    let k = reps.len();
    let pairs: Vec<(usize, usize)> = (0..k).flat_map(|i| (0..k).map(move |j| (i, j))).collect();
    let tensors = par::map(&pairs, |&(i, j)| tensor_cat(&reps[i], &reps[j]));
    let homs = par::map(&pairs, |&(i, j)| {
        internal_hom(&reps[i], &reps[j], FUNCTOR_SEARCH_BOUND)
    });
    let tensors = tensors.into_iter().collect::<Result<Vec<_>, _>>()?;
    let homs = homs.into_iter().collect::<Result<Vec<_>, _>>()?;
    let outcomes = par::map_range(k * k * k, |t| -> Result<Result<(), String>, LawError> {
        let (a, b, c) = (t / (k * k), t / k % k, t % k);
        let left = count_vfunctors(&tensors[a * k + b], &reps[c], FUNCTOR_SEARCH_BOUND)?;
        let right = count_vfunctors(&reps[a], &homs[b * k + c].category, FUNCTOR_SEARCH_BOUND)?;
        Ok(if left == right {
            Ok(())
        } else {
            Err(format!(
                "|VCat(A ⊗ B, C)| = {left} but |VCat(A, [B, C])| = {right} for A = {:?}, B = {:?}, C = {:?}",
                reps[a], reps[b], reps[c]
            ))
        })
    });
    report.record_all(outcomes.into_iter().collect::<Result<Vec<_>, _>>()?);
    report.detail(format!(
        "{k} isomorphism classes with at most {carrier} objects"
    ));
    Ok(())
}

fn regularity_lemma(ctx: &Ctx, report: &mut LawReport) -> Result<(), LawError> {
    let mut cats = Vec::new();
    if ctx.q.is_finite() {
        for n in 1..=ctx.cfg.max_carrier {
            cats.extend(enumerate_vcategories(&ctx.q, n)?);
        }
    }
    for g in &ctx.cfg.groups {
        cats.extend(ctx.structures(g)?.iter().map(VGroup::matrix));
    }
    let outcomes = par::map(&cats, |c| {
        let r = regularity_report(c);
        if r.all_agree() {
            Ok(())
        } else {
            Err(format!("{c:?}: {r:?}"))
        }
    });
    report.record_all(outcomes);
    Ok(())
}

fn adjunction_chain(ctx: &Ctx, report: &mut LawReport) -> Result<(), LawError> {
    let q = &ctx.q;
    let h = builtin_lax_homs(q)?;
    let vs = q.elements().unwrap_or_else(|| ctx.samples());
    let ws = two().elements().expect("two is finite");
    let lax_samples: Vec<Value> = vs.iter().take(100).cloned().collect();
    let mut homs = vec![(&h.iota, &ws), (&h.tau, &ws), (&h.pessimist, &lax_samples)];
    if let Some(o) = &h.optimist {
        homs.push((o, &lax_samples));
    }
    for (f, s) in homs {
        let r = check_lax_hom(f, s);
        report.record(r.is_pass(), || r.witness.clone().unwrap_or_default());
    }
    let r = check_adjunction(&h.iota, &h.pessimist, &ws, &vs);
    report.record(r.is_pass(), || r.witness.clone().unwrap_or_default());
    match &h.optimist {
        Some(o) => {
            let r = check_adjunction(o, &h.tau, &vs, &ws);
            report.record(r.is_pass(), || r.witness.clone().unwrap_or_default());
        }
        None => report.detail("not optimistic: o ⊣ τ not applicable"),
    }
    let b = two();
    let mut preorders = 0;
    for g in &ctx.cfg.groups {
        for x in enumerate_vgroup_structures(g, &b, ctx.cfg.max_candidates)? {
            let back = change_of_base_vgroup(&h.pessimist, &change_of_base_vgroup(&h.iota, &x)?)?;
            preorders += 1;
            report.record(back == x, || format!("p ∘ ι moves {}", fmt_vgroup(&x)));
        }
    }
    report.detail(format!(
        "{} quantale samples, {preorders} preordered groups",
        vs.len()
    ));
    Ok(())
}

fn strongly_unital_necessary(ctx: &Ctx, report: &mut LawReport) -> Result<(), LawError> {
    let frame = ctx.q.is_frame();
    let mut failures = 0;
    for g in &ctx.cfg.groups {
        for y in ctx.structures(g)? {
            let r = strongly_unital_check(&y)?;
            if frame {
                let sym = is_symmetric_vgroup(&y);
                report.record(r.necessary_condition == sym, || {
                    format!(
                        "{}: condition {} but symmetric {sym}",
                        fmt_vgroup(&y),
                        r.necessary_condition
                    )
                });
            }
            if let Some(c) = &r.counterexample {
                failures += 1;
                let ok = c.c_value == c.formula && c.c_value != c.d_value && !c.joint.holds;
                report.record(ok, || {
                    let q = y.quantale();
                    format!(
                        "{}: counterexample point at x = {} has c = {}, d = {}, b(x,0) ⊗ b(0,x) = {}",
                        fmt_vgroup(&y),
                        y.group().label(c.x),
                        q.format(&c.c_value),
                        q.format(&c.d_value),
                        q.format(&c.formula)
                    )
                });
            } else if !frame {
                report.record(true, String::new);
            }
        }
    }
    report.detail(format!("{failures} structures fail the condition"));
    Ok(())
}
