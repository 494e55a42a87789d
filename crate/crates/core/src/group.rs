//! Finite groups given by Cayley tables.
//!
//! Elements are indices and index `0` is always the identity. The group law
//! is written additively even when the group is not abelian.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::par;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum GroupError {
    #[error("group axiom `{law}` fails at {witness}")]
    Axiom { law: String, witness: String },
    #[error("invalid group description: {0}")]
    Descriptor(String),
    #[error("not a homomorphism: {0}")]
    NotHom(String),
    #[error("not a group action: {0}")]
    NotAction(String),
    #[error("subgroup is not normal: {0}")]
    NotNormal(String),
    #[error("search space of {needed} candidates exceeds the bound {bound}")]
    BoundExceeded { needed: u128, bound: u128 },
}

#[derive(Clone, PartialEq, Eq)]
pub struct FiniteGroup {
    name: String,
    labels: Vec<String>,
    add: Vec<usize>,
    neg: Vec<usize>,
}

impl fmt::Debug for FiniteGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {:?}", self.name, self.labels)
    }
}

impl fmt::Display for FiniteGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

impl FiniteGroup {
    /// Validates a Cayley table whose row/column `0` must be the identity.
    pub fn from_table(
        name: impl Into<String>,
        labels: Vec<String>,
        add: Vec<Vec<usize>>,
    ) -> Result<Self, GroupError> {
        let n = labels.len();
        let axiom = |law: &str, witness: String| GroupError::Axiom {
            law: law.into(),
            witness,
        };
        if n == 0 {
            return Err(GroupError::Descriptor("empty carrier".into()));
        }
        if add.len() != n || add.iter().any(|r| r.len() != n) {
            return Err(GroupError::Descriptor(format!("table must be {n}x{n}")));
        }
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(GroupError::Descriptor(format!("duplicate label `{l}`")));
            }
        }
        let flat: Vec<usize> = add.into_iter().flatten().collect();
        if let Some(&e) = flat.iter().find(|&&e| e >= n) {
            return Err(axiom("closure", format!("entry {e} outside the carrier")));
        }
        let l = |i: usize| labels[i].clone();
        let op = |a: usize, b: usize| flat[a * n + b];
        for a in 0..n {
            if op(0, a) != a || op(a, 0) != a {
                return Err(axiom("identity at index 0", l(a)));
            }
        }
        let mut neg = vec![0; n];
        for a in 0..n {
            neg[a] = (0..n)
                .find(|&b| op(a, b) == 0 && op(b, a) == 0)
                .ok_or_else(|| axiom("inverses", l(a)))?;
        }
        let bad = par::find_first(n * n * n, |t| {
            let (a, b, c) = (t / (n * n), t / n % n, t % n);
            (op(op(a, b), c) != op(a, op(b, c))).then_some((a, b, c))
        });
        if let Some((a, b, c)) = bad {
            return Err(axiom(
                "associativity",
                format!("({}, {}, {})", l(a), l(b), l(c)),
            ));
        }
        Ok(FiniteGroup {
            name: name.into(),
            labels,
            add: flat,
            neg,
        })
    }

    fn from_fn(
        name: impl Into<String>,
        labels: Vec<String>,
        op: impl Fn(usize, usize) -> usize,
    ) -> Self {
        let n = labels.len();
        let add = (0..n).map(|a| (0..n).map(|b| op(a, b)).collect()).collect();
        FiniteGroup::from_table(name, labels, add).expect("built-in group tables are valid")
    }

    pub fn trivial() -> Self {
        FiniteGroup::cyclic(1)
    }

    pub fn cyclic(n: usize) -> Self {
        assert!(n >= 1, "cyclic group needs n >= 1");
        FiniteGroup::from_fn(
            format!("Z{n}"),
            (0..n).map(|i| i.to_string()).collect(),
            |a, b| (a + b) % n,
        )
    }

    pub fn klein() -> Self {
        let mut g = FiniteGroup::direct_product(&FiniteGroup::cyclic(2), &FiniteGroup::cyclic(2));
        g.name = "Klein".into();
        g
    }

    /// Dihedral group of order `2n`: `r^i` for `i < n`, then `s r^i`.
    pub fn dihedral(n: usize) -> Self {
        assert!(n >= 1, "dihedral group needs n >= 1");
        let labels = (0..2 * n)
            .map(|i| match (i / n, i % n) {
                (0, 0) => "e".to_string(),
                (0, r) => format!("r{r}"),
                (_, 0) => "s".to_string(),
                (_, r) => format!("sr{r}"),
            })
            .collect();
        // s^a r^i · s^b r^j = s^(a+b) r^((-1)^b i + j)
        FiniteGroup::from_fn(format!("D{n}"), labels, |x, y| {
            let (a, i, b, j) = (x / n, x % n, y / n, y % n);
            let i = if b == 1 { (n - i) % n } else { i };
            ((a + b) % 2) * n + (i + j) % n
        })
    }

    /// Symmetric group on `n` points, elements labelled in cycle notation.
    pub fn symmetric(n: usize) -> Self {
        assert!(
            (1..=5).contains(&n),
            "symmetric groups are supported up to degree 5"
        );
        if n == 1 {
            return FiniteGroup::from_permutations("S1", 1, &[]).expect("trivial");
        }
        let swap: Vec<usize> = (0..n)
            .map(|i| match i {
                0 => 1,
                1 => 0,
                i => i,
            })
            .collect();
        let cycle: Vec<usize> = (0..n).map(|i| (i + 1) % n).collect();
        FiniteGroup::from_permutations(format!("S{n}"), n, &[swap, cycle])
            .expect("generators are permutations")
    }

    /// Quaternion group `{±1, ±i, ±j, ±k}`.
    pub fn quaternion() -> Self {
        let names = ["1", "-1", "i", "-i", "j", "-j", "k", "-k"];
        // unit u ∈ {1,i,j,k} and sign s ∈ {+,-} packed as 2u + s
        let mul = |x: usize, y: usize| {
            let (u, s, v, t) = (x / 2, x % 2, y / 2, y % 2);
            let (w, sign) = match (u, v) {
                (0, w) | (w, 0) => (w, 0),
                (a, b) if a == b => (0, 1),
                (1, 2) => (3, 0),
                (2, 3) => (1, 0),
                (3, 1) => (2, 0),
                (2, 1) => (3, 1),
                (3, 2) => (1, 1),
                (1, 3) => (2, 1),
                _ => unreachable!(),
            };
            2 * w + (s + t + sign) % 2
        };
        FiniteGroup::from_fn("Q8", names.map(String::from).to_vec(), mul)
    }

    /// The permutation group generated by `gens` on `0..degree`, with
    /// `(p + q)(i) = p(q(i))`.
    pub fn from_permutations(
        name: impl Into<String>,
        degree: usize,
        gens: &[Vec<usize>],
    ) -> Result<Self, GroupError> {
        for g in gens {
            let mut seen = vec![false; degree];
            if g.len() != degree
                || g.iter()
                    .any(|&i| i >= degree || std::mem::replace(&mut seen[i], true))
            {
                return Err(GroupError::Descriptor(format!(
                    "{g:?} is not a permutation of {degree} points"
                )));
            }
        }
        let compose =
            |p: &[usize], q: &[usize]| -> Vec<usize> { q.iter().map(|&i| p[i]).collect() };
        let identity: Vec<usize> = (0..degree).collect();
        let mut elems = vec![identity];
        let mut queue = VecDeque::from([0usize]);
        while let Some(i) = queue.pop_front() {
            for g in gens {
                let next = compose(&elems[i], g);
                if !elems.contains(&next) {
                    elems.push(next);
                    queue.push_back(elems.len() - 1);
                }
            }
        }
        let labels = elems.iter().map(|p| cycle_notation(p)).collect();
        let index = |p: &[usize]| elems.iter().position(|e| e == p).expect("closed");
        let n = elems.len();
        let add = (0..n)
            .map(|a| {
                (0..n)
                    .map(|b| index(&compose(&elems[a], &elems[b])))
                    .collect()
            })
            .collect();
        FiniteGroup::from_table(name, labels, add)
    }

    /// `X × Y` with pair `(x, y)` at index `y·|X| + x`.
    pub fn direct_product(x: &FiniteGroup, y: &FiniteGroup) -> Self {
        let m = x.order();
        let labels = (0..x.order() * y.order())
            .map(|i| format!("({},{})", x.labels[i % m], y.labels[i / m]))
            .collect();
        FiniteGroup::from_fn(format!("{}x{}", x.name, y.name), labels, |a, b| {
            y.add(a / m, b / m) * m + x.add(a % m, b % m)
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn order(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label.trim())
    }

    #[inline]
    pub fn add(&self, a: usize, b: usize) -> usize {
        self.add[a * self.order() + b]
    }

    #[inline]
    pub fn neg(&self, a: usize) -> usize {
        self.neg[a]
    }

    /// `a + (-b)`.
    #[inline]
    pub fn sub(&self, a: usize, b: usize) -> usize {
        self.add(a, self.neg(b))
    }

    /// `g + u - g`.
    #[inline]
    pub fn conj(&self, g: usize, u: usize) -> usize {
        self.add(self.add(g, u), self.neg(g))
    }

    pub fn table(&self) -> Vec<Vec<usize>> {
        self.add.chunks(self.order()).map(|r| r.to_vec()).collect()
    }

    pub fn is_abelian(&self) -> bool {
        let n = self.order();
        (0..n).all(|a| (0..n).all(|b| self.add(a, b) == self.add(b, a)))
    }

    pub fn element_order(&self, a: usize) -> usize {
        let (mut x, mut k) = (a, 1);
        while x != 0 {
            x = self.add(x, a);
            k += 1;
        }
        k
    }

    /// A generating set picked greedily in index order.
    pub fn generators(&self) -> Vec<usize> {
        let mut gens = Vec::new();
        let mut span = vec![0];
        for a in 1..self.order() {
            if !span.contains(&a) {
                gens.push(a);
                span = self.subgroup_generated(&gens);
            }
        }
        gens
    }

    /// The least subgroup containing `s`, as sorted indices.
    pub fn subgroup_generated(&self, s: &[usize]) -> Vec<usize> {
        let mut set: BTreeSet<usize> = BTreeSet::from([0]);
        let mut queue: VecDeque<usize> = VecDeque::from([0]);
        while let Some(a) = queue.pop_front() {
            for &g in s {
                for b in [self.add(a, g), self.add(a, self.neg(g))] {
                    if set.insert(b) {
                        queue.push_back(b);
                    }
                }
            }
        }
        set.into_iter().collect()
    }

    pub fn is_subgroup(&self, h: &[usize]) -> bool {
        h.contains(&0)
            && h.iter().all(|&a| {
                h.contains(&self.neg(a)) && h.iter().all(|&b| h.contains(&self.add(a, b)))
            })
    }

    /// First `(g, h)` with `g + h - g ∉ H`.
    pub fn normality_witness(&self, h: &[usize]) -> Option<(usize, usize)> {
        (0..self.order())
            .flat_map(|g| h.iter().map(move |&x| (g, x)))
            .find(|&(g, x)| !h.contains(&self.conj(g, x)))
    }

    pub fn is_normal(&self, h: &[usize]) -> bool {
        self.is_subgroup(h) && self.normality_witness(h).is_none()
    }

    /// The least normal subgroup containing `s`.
    pub fn normal_closure(&self, s: &[usize]) -> Vec<usize> {
        let conjugates: Vec<usize> = s
            .iter()
            .flat_map(|&x| (0..self.order()).map(move |g| (g, x)))
            .map(|(g, x)| self.conj(g, x))
            .collect();
        let mut h = self.subgroup_generated(&conjugates);
        loop {
            let more: Vec<usize> = h
                .iter()
                .flat_map(|&x| (0..self.order()).map(move |g| (g, x)))
                .map(|(g, x)| self.conj(g, x))
                .collect();
            let next = self.subgroup_generated(&more);
            if next == h {
                return h;
            }
            h = next;
        }
    }

    pub fn conjugacy_classes(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.order()];
        let mut out = Vec::new();
        for a in 0..self.order() {
            if seen[a] {
                continue;
            }
            let class: BTreeSet<usize> = (0..self.order()).map(|g| self.conj(g, a)).collect();
            for &c in &class {
                seen[c] = true;
            }
            out.push(class.into_iter().collect());
        }
        out
    }

    /// The subgroup `h` (sorted, containing 0) as a group in its own right,
    /// with the inclusion map.
    pub fn subgroup(&self, h: &[usize]) -> Result<(FiniteGroup, Vec<usize>), GroupError> {
        if !self.is_subgroup(h) {
            return Err(GroupError::Descriptor(format!(
                "{h:?} is not a subgroup of {}",
                self.name
            )));
        }
        let mut elems = h.to_vec();
        elems.sort_unstable();
        elems.dedup();
        let pos = |a: usize| elems.iter().position(|&e| e == a).expect("closed");
        let labels = elems.iter().map(|&a| self.labels[a].clone()).collect();
        let add = elems
            .iter()
            .map(|&a| elems.iter().map(|&b| pos(self.add(a, b))).collect())
            .collect();
        let g = FiniteGroup::from_table(format!("sub({})", self.name), labels, add)?;
        Ok((g, elems))
    }

    /// `G/N` with cosets labelled `[r]` by their least representative.
    pub fn quotient(
        self: &Arc<Self>,
        normal: &[usize],
    ) -> Result<(Arc<FiniteGroup>, GroupHom), GroupError> {
        if !self.is_subgroup(normal) {
            return Err(GroupError::Descriptor(format!(
                "{normal:?} is not a subgroup"
            )));
        }
        if let Some((g, h)) = self.normality_witness(normal) {
            return Err(GroupError::NotNormal(format!(
                "{} + {} - {} = {} is outside the subgroup",
                self.labels[g],
                self.labels[h],
                self.labels[g],
                self.labels[self.conj(g, h)]
            )));
        }
        let n = self.order();
        let rep_of = |a: usize| {
            normal
                .iter()
                .map(|&h| self.add(a, h))
                .min()
                .expect("nonempty")
        };
        let mut reps: Vec<usize> = (0..n)
            .map(rep_of)
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        reps.sort_unstable();
        let coset = |a: usize| reps.iter().position(|&r| r == rep_of(a)).expect("coset");
        let labels = reps
            .iter()
            .map(|&r| format!("[{}]", self.labels[r]))
            .collect();
        let add = reps
            .iter()
            .map(|&a| reps.iter().map(|&b| coset(self.add(a, b))).collect())
            .collect();
        let q = Arc::new(FiniteGroup::from_table(
            format!("{}/N", self.name),
            labels,
            add,
        )?);
        let map = (0..n).map(coset).collect();
        let hom = GroupHom::new(self.clone(), q.clone(), map)?;
        Ok((q, hom))
    }
}

fn cycle_notation(p: &[usize]) -> String {
    let mut seen = vec![false; p.len()];
    let mut out = String::new();
    for start in 0..p.len() {
        if seen[start] || p[start] == start {
            continue;
        }
        let mut cyc = vec![start];
        seen[start] = true;
        let mut i = p[start];
        while i != start {
            seen[i] = true;
            cyc.push(i);
            i = p[i];
        }
        let parts: Vec<String> = cyc.iter().map(|c| c.to_string()).collect();
        out.push_str(&format!("({})", parts.join(" ")));
    }
    if out.is_empty() {
        "e".into()
    } else {
        out
    }
}

/// A verified group homomorphism.
#[derive(Clone, PartialEq, Eq)]
pub struct GroupHom {
    pub source: Arc<FiniteGroup>,
    pub target: Arc<FiniteGroup>,
    pub map: Vec<usize>,
}

impl fmt::Debug for GroupHom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .map
            .iter()
            .enumerate()
            .map(|(x, &y)| format!("{}->{}", self.source.label(x), self.target.label(y)))
            .collect();
        write!(
            f,
            "{} -> {} [{}]",
            self.source.name,
            self.target.name,
            parts.join(", ")
        )
    }
}

impl GroupHom {
    pub fn new(
        source: Arc<FiniteGroup>,
        target: Arc<FiniteGroup>,
        map: Vec<usize>,
    ) -> Result<Self, GroupError> {
        if map.len() != source.order() || map.iter().any(|&y| y >= target.order()) {
            return Err(GroupError::NotHom(
                "map is not total on the carriers".into(),
            ));
        }
        let n = source.order();
        let bad = (0..n * n)
            .map(|t| (t / n, t % n))
            .find(|&(a, b)| map[source.add(a, b)] != target.add(map[a], map[b]));
        if let Some((a, b)) = bad {
            return Err(GroupError::NotHom(format!(
                "f({} + {}) ≠ f({}) + f({})",
                source.label(a),
                source.label(b),
                source.label(a),
                source.label(b)
            )));
        }
        Ok(GroupHom {
            source,
            target,
            map,
        })
    }

    pub fn identity(g: Arc<FiniteGroup>) -> Self {
        let map = (0..g.order()).collect();
        GroupHom {
            source: g.clone(),
            target: g,
            map,
        }
    }

    pub fn zero(source: Arc<FiniteGroup>, target: Arc<FiniteGroup>) -> Self {
        let map = vec![0; source.order()];
        GroupHom {
            source,
            target,
            map,
        }
    }

    pub fn apply(&self, x: usize) -> usize {
        self.map[x]
    }

    /// `next ∘ self`.
    pub fn then(&self, next: &GroupHom) -> Result<GroupHom, GroupError> {
        if *self.target != *next.source {
            return Err(GroupError::NotHom("codomain and domain differ".into()));
        }
        Ok(GroupHom {
            source: self.source.clone(),
            target: next.target.clone(),
            map: self.map.iter().map(|&y| next.map[y]).collect(),
        })
    }

    pub fn kernel_image(&self) -> KernelImage {
        let kernel: Vec<usize> = (0..self.source.order())
            .filter(|&x| self.map[x] == 0)
            .collect();
        let image: Vec<usize> = self
            .map
            .iter()
            .copied()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        KernelImage {
            is_injective: kernel.len() == 1,
            is_surjective: image.len() == self.target.order(),
            kernel,
            image,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KernelImage {
    pub kernel: Vec<usize>,
    pub image: Vec<usize>,
    pub is_injective: bool,
    pub is_surjective: bool,
}

/// Default cap on the number of generator assignments tried.
pub const HOM_SEARCH_BOUND: u128 = 1_000_000;

/// All homomorphisms `G → H`, ordered lexicographically by the images of the
/// generators of `G`.
pub fn enumerate_homs(
    g: &Arc<FiniteGroup>,
    h: &Arc<FiniteGroup>,
    bound: u128,
) -> Result<Vec<GroupHom>, GroupError> {
    let gens = g.generators();
    let needed = (h.order() as u128)
        .checked_pow(gens.len() as u32)
        .unwrap_or(u128::MAX);
    if needed > bound {
        return Err(GroupError::BoundExceeded { needed, bound });
    }
    // Images of generators must have orders dividing theirs.
    let options: Vec<Vec<usize>> = gens
        .iter()
        .map(|&s| {
            let k = g.element_order(s);
            (0..h.order())
                .filter(|&t| k % h.element_order(t) == 0)
                .collect()
        })
        .collect();
    let total: usize = options.iter().map(Vec::len).product();
    let found = par::filter_map_range(total, |mut code| {
        let imgs: Vec<usize> = options
            .iter()
            .map(|o| {
                let v = o[code % o.len()];
                code /= o.len();
                v
            })
            .collect();
        extend_to_hom(g, h, &gens, &imgs).map(|map| GroupHom {
            source: g.clone(),
            target: h.clone(),
            map,
        })
    });
    let mut found = found;
    found.sort_by_key(|f| gens.iter().map(|&s| f.map[s]).collect::<Vec<_>>());
    Ok(found)
}

fn extend_to_hom(
    g: &FiniteGroup,
    h: &FiniteGroup,
    gens: &[usize],
    imgs: &[usize],
) -> Option<Vec<usize>> {
    let n = g.order();
    let mut map: Vec<Option<usize>> = vec![None; n];
    map[0] = Some(0);
    let mut queue = VecDeque::from([0usize]);
    while let Some(a) = queue.pop_front() {
        let fa = map[a]?;
        for (&s, &t) in gens.iter().zip(imgs) {
            let b = g.add(a, s);
            let fb = h.add(fa, t);
            match map[b] {
                None => {
                    map[b] = Some(fb);
                    queue.push_back(b);
                }
                Some(existing) if existing != fb => return None,
                Some(_) => {}
            }
        }
    }
    let map: Vec<usize> = map.into_iter().collect::<Option<_>>()?;
    let ok = (0..n * n).all(|t| {
        let (a, b) = (t / n, t % n);
        map[g.add(a, b)] == h.add(map[a], map[b])
    });
    ok.then_some(map)
}

/// The automorphisms of `G`, identity first, then in enumeration order.
pub fn enumerate_automorphisms(
    g: &Arc<FiniteGroup>,
    bound: u128,
) -> Result<Vec<GroupHom>, GroupError> {
    let mut auts: Vec<GroupHom> = enumerate_homs(g, g, bound)?
        .into_iter()
        .filter(|f| f.kernel_image().is_injective)
        .collect();
    let id = auts
        .iter()
        .position(|f| f.map.iter().enumerate().all(|(i, &j)| i == j));
    if let Some(i) = id {
        let f = auts.remove(i);
        auts.insert(0, f);
    }
    Ok(auts)
}

/// `Aut(G)` as a group under composition, `(σ + τ)(x) = σ(τ(x))`, together
/// with the automorphism behind each element.
pub fn automorphism_group(
    g: &Arc<FiniteGroup>,
    bound: u128,
) -> Result<(Arc<FiniteGroup>, Vec<Vec<usize>>), GroupError> {
    let auts: Vec<Vec<usize>> = enumerate_automorphisms(g, bound)?
        .into_iter()
        .map(|f| f.map)
        .collect();
    let labels = auts
        .iter()
        .enumerate()
        .map(|(i, f)| {
            if i == 0 {
                "id".to_string()
            } else {
                let parts: Vec<&str> = f.iter().map(|&y| g.label(y)).collect();
                format!("[{}]", parts.join(","))
            }
        })
        .collect();
    let index = |f: &[usize]| {
        auts.iter()
            .position(|a| a == f)
            .expect("automorphisms compose")
    };
    let add = auts
        .iter()
        .map(|s| {
            auts.iter()
                .map(|t| index(&t.iter().map(|&x| s[x]).collect::<Vec<_>>()))
                .collect()
        })
        .collect();
    let aut = FiniteGroup::from_table(format!("Aut({})", g.name), labels, add)?;
    Ok((Arc::new(aut), auts))
}

/// An action `φ: Y → Aut(X)`, stored as `phi[y][x] = φ_y(x)`.
#[derive(Clone, PartialEq, Eq)]
pub struct GroupAction {
    pub acting: Arc<FiniteGroup>,
    pub on: Arc<FiniteGroup>,
    pub phi: Vec<Vec<usize>>,
}

impl fmt::Debug for GroupAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} acting on {} by {:?}",
            self.acting.name, self.on.name, self.phi
        )
    }
}

impl GroupAction {
    pub fn new(
        acting: Arc<FiniteGroup>,
        on: Arc<FiniteGroup>,
        phi: Vec<Vec<usize>>,
    ) -> Result<Self, GroupError> {
        let (ny, nx) = (acting.order(), on.order());
        if phi.len() != ny
            || phi
                .iter()
                .any(|p| p.len() != nx || p.iter().any(|&x| x >= nx))
        {
            return Err(GroupError::NotAction(format!(
                "need {ny} maps on {nx} points"
            )));
        }
        for (y, p) in phi.iter().enumerate() {
            let mut seen = vec![false; nx];
            if p.iter().any(|&x| std::mem::replace(&mut seen[x], true)) {
                return Err(GroupError::NotAction(format!(
                    "φ_{} is not a bijection",
                    acting.label(y)
                )));
            }
            if let Err(e) = GroupHom::new(on.clone(), on.clone(), p.clone()) {
                return Err(GroupError::NotAction(format!("φ_{}: {e}", acting.label(y))));
            }
        }
        if phi[0].iter().enumerate().any(|(i, &j)| i != j) {
            return Err(GroupError::NotAction("φ_0 is not the identity".into()));
        }
        for a in 0..ny {
            for b in 0..ny {
                let ab = acting.add(a, b);
                if (0..nx).any(|x| phi[ab][x] != phi[a][phi[b][x]]) {
                    return Err(GroupError::NotAction(format!(
                        "φ_({} + {}) ≠ φ_{} ∘ φ_{}",
                        acting.label(a),
                        acting.label(b),
                        acting.label(a),
                        acting.label(b)
                    )));
                }
            }
        }
        Ok(GroupAction { acting, on, phi })
    }

    pub fn trivial(acting: Arc<FiniteGroup>, on: Arc<FiniteGroup>) -> Self {
        let phi = vec![(0..on.order()).collect(); acting.order()];
        GroupAction { acting, on, phi }
    }

    pub fn is_trivial(&self) -> bool {
        self.phi
            .iter()
            .all(|p| p.iter().enumerate().all(|(i, &j)| i == j))
    }

    /// `φ ∘ g` for a homomorphism `g: Z → Y`.
    pub fn pullback(&self, g: &GroupHom) -> GroupAction {
        GroupAction {
            acting: g.source.clone(),
            on: self.on.clone(),
            phi: g.map.iter().map(|&y| self.phi[y].clone()).collect(),
        }
    }
}

/// All actions of `Y` on `X`, as homomorphisms `Y → Aut(X)`.
pub fn enumerate_actions(
    y: &Arc<FiniteGroup>,
    x: &Arc<FiniteGroup>,
    bound: u128,
) -> Result<Vec<GroupAction>, GroupError> {
    let (aut, maps) = automorphism_group(x, bound)?;
    Ok(enumerate_homs(y, &aut, bound)?
        .into_iter()
        .map(|h| GroupAction {
            acting: y.clone(),
            on: x.clone(),
            phi: h.map.iter().map(|&a| maps[a].clone()).collect(),
        })
        .collect())
}

/// `X ⋊_φ Y` with its structure maps.
#[derive(Debug, Clone)]
pub struct Semidirect {
    pub group: Arc<FiniteGroup>,
    /// `x ↦ (x, 0)`.
    pub kernel_injection: GroupHom,
    /// `y ↦ (0, y)`.
    pub section: GroupHom,
    /// `(x, y) ↦ y`.
    pub projection: GroupHom,
}

impl Semidirect {
    /// Index of `(x, y)`.
    pub fn pair(&self, x: usize, y: usize) -> usize {
        y * self.kernel_injection.source.order() + x
    }

    /// Components of an index.
    pub fn split(&self, i: usize) -> (usize, usize) {
        let m = self.kernel_injection.source.order();
        (i % m, i / m)
    }
}

/// `(x, y) + (x', y') = (x + φ_y(x'), y + y')`, with `(x, y)` at index
/// `y·|X| + x`.
pub fn semidirect_product_group(action: &GroupAction) -> Result<Semidirect, GroupError> {
    let (x, y) = (&action.on, &action.acting);
    let m = x.order();
    let labels = (0..m * y.order())
        .map(|i| format!("({},{})", x.label(i % m), y.label(i / m)))
        .collect();
    let add = (0..m * y.order())
        .map(|a| {
            (0..m * y.order())
                .map(|b| {
                    let (xa, ya, xb, yb) = (a % m, a / m, b % m, b / m);
                    y.add(ya, yb) * m + x.add(xa, action.phi[ya][xb])
                })
                .collect()
        })
        .collect();
    let name = if action.is_trivial() {
        format!("{}x{}", x.name, y.name)
    } else {
        format!("{}:{}", x.name, y.name)
    };
    let g = Arc::new(FiniteGroup::from_table(name, labels, add)?);
    let kernel_injection = GroupHom::new(x.clone(), g.clone(), (0..m).collect())?;
    let section = GroupHom::new(
        y.clone(),
        g.clone(),
        (0..y.order()).map(|b| b * m).collect(),
    )?;
    let projection = GroupHom::new(
        g.clone(),
        y.clone(),
        (0..g.order()).map(|i| i / m).collect(),
    )?;
    Ok(Semidirect {
        group: g,
        kernel_injection,
        section,
        projection,
    })
}

/// Whether `f: G → H` is a bijective homomorphism.
pub fn is_isomorphism(f: &GroupHom) -> bool {
    let ki = f.kernel_image();
    ki.is_injective && ki.is_surjective
}

/// Some isomorphism `G → H`, if one exists.
pub fn find_isomorphism(g: &Arc<FiniteGroup>, h: &Arc<FiniteGroup>) -> Option<GroupHom> {
    if g.order() != h.order() {
        return None;
    }
    enumerate_homs(g, h, HOM_SEARCH_BOUND)
        .ok()?
        .into_iter()
        .find(is_isomorphism)
}

/// Serializable group description.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GroupSpec {
    Trivial,
    Cyclic {
        n: usize,
    },
    Klein,
    Dihedral {
        n: usize,
    },
    Symmetric {
        n: usize,
    },
    Quaternion,
    Product {
        left: Box<GroupSpec>,
        right: Box<GroupSpec>,
    },
    Table {
        labels: Vec<String>,
        add: Vec<Vec<TableEntry>>,
    },
}

/// A Cayley table entry, by label or by index.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TableEntry {
    Index(usize),
    Label(String),
}

impl GroupSpec {
    pub fn build(&self) -> Result<FiniteGroup, GroupError> {
        let check = |n: usize, max: usize, what: &str| {
            if n == 0 || n > max {
                Err(GroupError::Descriptor(format!(
                    "{what} needs 1 <= n <= {max}, got {n}"
                )))
            } else {
                Ok(())
            }
        };
        Ok(match self {
            GroupSpec::Trivial => FiniteGroup::trivial(),
            GroupSpec::Cyclic { n } => {
                check(*n, 4096, "cyclic group")?;
                FiniteGroup::cyclic(*n)
            }
            GroupSpec::Klein => FiniteGroup::klein(),
            GroupSpec::Dihedral { n } => {
                check(*n, 2048, "dihedral group")?;
                FiniteGroup::dihedral(*n)
            }
            GroupSpec::Symmetric { n } => {
                check(*n, 5, "symmetric group")?;
                FiniteGroup::symmetric(*n)
            }
            GroupSpec::Quaternion => FiniteGroup::quaternion(),
            GroupSpec::Product { left, right } => {
                FiniteGroup::direct_product(&left.build()?, &right.build()?)
            }
            GroupSpec::Table { labels, add } => {
                let resolve = |e: &TableEntry| match e {
                    TableEntry::Index(i) => Ok(*i),
                    TableEntry::Label(l) => labels
                        .iter()
                        .position(|x| x == l)
                        .ok_or_else(|| GroupError::Descriptor(format!("unknown label `{l}`"))),
                };
                let add = add
                    .iter()
                    .map(|r| r.iter().map(resolve).collect::<Result<Vec<_>, _>>())
                    .collect::<Result<Vec<_>, _>>()?;
                FiniteGroup::from_table("G", labels.clone(), add)?
            }
        })
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupSpec::Trivial => write!(f, "Z1"),
            GroupSpec::Cyclic { n } => write!(f, "Z{n}"),
            GroupSpec::Klein => write!(f, "Klein"),
            GroupSpec::Dihedral { n } => write!(f, "D{n}"),
            GroupSpec::Symmetric { n } => write!(f, "S{n}"),
            GroupSpec::Quaternion => write!(f, "Q8"),
            GroupSpec::Product { left, right } => write!(f, "{left}x{right}"),
            GroupSpec::Table { .. } => {
                write!(
                    f,
                    "{}",
                    serde_json::to_string(self).map_err(|_| fmt::Error)?
                )
            }
        }
    }
}

impl FromStr for GroupSpec {
    type Err = GroupError;

    /// JSON, or compact names: `Z4`, `cyclic:4`, `Klein`, `K4`, `D4`, `S3`,
    /// `Q8`, and products such as `Z2xZ3`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        if t.starts_with('{') {
            return serde_json::from_str(t).map_err(|e| GroupError::Descriptor(e.to_string()));
        }
        let bad = || GroupError::Descriptor(format!("unknown group `{s}`"));
        let parts: Vec<&str> = t.split(['x', '×']).collect();
        if parts.len() > 1 {
            return parts
                .iter()
                .map(|p| p.parse::<GroupSpec>())
                .reduce(|a, b| {
                    Ok(GroupSpec::Product {
                        left: Box::new(a?),
                        right: Box::new(b?),
                    })
                })
                .ok_or_else(bad)?;
        }
        let lower = t.to_ascii_lowercase();
        let num = |p: &str| p.parse::<usize>().map_err(|_| bad());
        if let Some(n) = lower.strip_prefix("cyclic:") {
            return Ok(GroupSpec::Cyclic { n: num(n)? });
        }
        match lower.as_str() {
            "trivial" | "z1" | "0" => Ok(GroupSpec::Trivial),
            "klein" | "k4" | "v4" => Ok(GroupSpec::Klein),
            "q8" | "quaternion" => Ok(GroupSpec::Quaternion),
            _ => match (lower.chars().next(), &lower.get(1..)) {
                (Some('z'), Some(n)) => Ok(GroupSpec::Cyclic { n: num(n)? }),
                (Some('d'), Some(n)) => Ok(GroupSpec::Dihedral { n: num(n)? }),
                (Some('s'), Some(n)) => Ok(GroupSpec::Symmetric { n: num(n)? }),
                _ => Err(bad()),
            },
        }
    }
}

/// Groups of order at most `max_order`, one per isomorphism class (complete
/// up to order 8), smallest first.
pub fn catalog(max_order: usize) -> Vec<Arc<FiniteGroup>> {
    let z = FiniteGroup::cyclic;
    let all: Vec<FiniteGroup> = vec![
        z(1),
        z(2),
        z(3),
        z(4),
        FiniteGroup::klein(),
        z(5),
        z(6),
        FiniteGroup::symmetric(3),
        z(7),
        z(8),
        FiniteGroup::direct_product(&z(2), &z(4)),
        FiniteGroup::direct_product(&FiniteGroup::klein(), &z(2)),
        FiniteGroup::dihedral(4),
        FiniteGroup::quaternion(),
    ];
    all.into_iter()
        .filter(|g| g.order() <= max_order)
        .map(Arc::new)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn arc(g: FiniteGroup) -> Arc<FiniteGroup> {
        Arc::new(g)
    }

    #[test]
    fn rejects_invalid_tables() {
        let labels = vec!["0".to_string(), "1".to_string()];
        let err = FiniteGroup::from_table("bad", labels.clone(), vec![vec![0, 1], vec![1, 1]])
            .unwrap_err();
        assert!(matches!(err, GroupError::Axiom { .. }));
        assert!(FiniteGroup::from_table("z2", labels, vec![vec![0, 1], vec![1, 0]]).is_ok());
    }

    #[test]
    fn s3_from_generators() {
        let s3 = FiniteGroup::symmetric(3);
        assert_eq!(s3.order(), 6);
        assert!(!s3.is_abelian());
        assert_eq!(s3.label(0), "e");
        assert_eq!(s3.conjugacy_classes().len(), 3);
    }

    #[test]
    fn kernels_and_images() {
        let z4 = arc(FiniteGroup::cyclic(4));
        let z2 = arc(FiniteGroup::cyclic(2));
        let p = GroupHom::new(z4.clone(), z2.clone(), vec![0, 1, 0, 1]).unwrap();
        let ki = p.kernel_image();
        assert_eq!(ki.kernel, vec![0, 2]);
        assert!(ki.is_surjective && !ki.is_injective);
        assert_eq!(
            GroupHom::identity(z4.clone()).kernel_image().kernel,
            vec![0]
        );
        assert_eq!(
            GroupHom::zero(z4.clone(), z2).kernel_image().kernel.len(),
            4
        );
        assert_eq!(z4.subgroup_generated(&[1]), vec![0, 1, 2, 3]);
        assert_eq!(z4.subgroup_generated(&[2]), vec![0, 2]);
        assert_eq!(z4.subgroup_generated(&[]), vec![0]);
    }

    #[test]
    fn quotients() {
        let z4 = arc(FiniteGroup::cyclic(4));
        let (q, hom) = z4.quotient(&[0, 2]).unwrap();
        assert!(find_isomorphism(&q, &arc(FiniteGroup::cyclic(2))).is_some());
        assert_eq!(hom.map, vec![0, 1, 0, 1]);
        let (q, _) = z4.quotient(&[0, 1, 2, 3]).unwrap();
        assert_eq!(q.order(), 1);
        let s3 = arc(FiniteGroup::symmetric(3));
        let t = (1..6).find(|&a| s3.element_order(a) == 2).unwrap();
        assert!(matches!(
            s3.quotient(&[0, t]),
            Err(GroupError::NotNormal(_))
        ));
    }

    #[test]
    fn semidirect_products() {
        let z2 = arc(FiniteGroup::cyclic(2));
        let z3 = arc(FiniteGroup::cyclic(3));
        let inv =
            GroupAction::new(z2.clone(), z3.clone(), vec![vec![0, 1, 2], vec![0, 2, 1]]).unwrap();
        let sd = semidirect_product_group(&inv).unwrap();
        assert!(find_isomorphism(&sd.group, &arc(FiniteGroup::symmetric(3))).is_some());
        let triv = semidirect_product_group(&GroupAction::trivial(z2.clone(), z2.clone())).unwrap();
        assert_eq!(triv.group.table(), FiniteGroup::klein().table());
        assert_eq!(sd.section.then(&sd.projection).unwrap().map, vec![0, 1]);
        assert!(GroupAction::new(z2, z3, vec![vec![0, 1, 2], vec![1, 2, 0]]).is_err());
    }

    #[test]
    fn hom_counts() {
        let z2 = arc(FiniteGroup::cyclic(2));
        let z3 = arc(FiniteGroup::cyclic(3));
        assert_eq!(enumerate_homs(&z2, &z2, HOM_SEARCH_BOUND).unwrap().len(), 2);
        assert_eq!(enumerate_homs(&z3, &z2, HOM_SEARCH_BOUND).unwrap().len(), 1);
        let auts = enumerate_automorphisms(&z3, HOM_SEARCH_BOUND).unwrap();
        assert_eq!(
            auts.iter().map(|f| f.map.clone()).collect::<Vec<_>>(),
            vec![vec![0, 1, 2], vec![0, 2, 1]]
        );
        let s3 = arc(FiniteGroup::symmetric(3));
        assert_eq!(
            enumerate_automorphisms(&s3, HOM_SEARCH_BOUND)
                .unwrap()
                .len(),
            6
        );
        let klein = arc(FiniteGroup::klein());
        assert_eq!(
            enumerate_actions(&z2, &klein, HOM_SEARCH_BOUND)
                .unwrap()
                .len(),
            4
        );
        assert!(enumerate_homs(&s3, &s3, 10).is_err());
    }

    #[test]
    fn catalog_is_pairwise_non_isomorphic() {
        let c = catalog(8);
        assert_eq!(c.len(), 14);
        for (i, g) in c.iter().enumerate() {
            for h in &c[..i] {
                assert!(find_isomorphism(g, h).is_none(), "{g:?} ≅ {h:?}");
            }
        }
    }

    #[test]
    fn specs_parse() {
        for (s, order) in [
            ("Z4", 4),
            ("Klein", 4),
            ("S3", 6),
            ("D4", 8),
            ("Q8", 8),
            ("Z2xZ3", 6),
            ("cyclic:5", 5),
        ] {
            let g = s.parse::<GroupSpec>().unwrap().build().unwrap();
            assert_eq!(g.order(), order, "{s}");
        }
        let j = r#"{"kind":"table","labels":["a","b"],"add":[["a","b"],["b","a"]]}"#;
        assert_eq!(j.parse::<GroupSpec>().unwrap().build().unwrap().order(), 2);
        assert!("W3".parse::<GroupSpec>().is_err());
    }
}
