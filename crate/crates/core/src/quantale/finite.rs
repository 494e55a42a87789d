//! Quantales on finite carriers, stored as lookup tables over element indices.

use super::QuantaleError;

#[derive(Debug, Clone)]
pub(crate) struct FiniteTable {
    pub labels: Vec<String>,
    pub leq: Vec<bool>,
    pub tensor: Vec<usize>,
    pub join: Vec<usize>,
    pub meet: Vec<usize>,
    pub hom: Vec<usize>,
    pub unit: usize,
    pub bottom: usize,
    pub top: usize,
    pub height: usize,
}

impl FiniteTable {
    pub fn size(&self) -> usize {
        self.labels.len()
    }

    #[inline]
    pub fn le(&self, a: usize, b: usize) -> bool {
        self.leq[a * self.size() + b]
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.tensor[a * self.size() + b]
    }

    #[inline]
    pub fn sup(&self, a: usize, b: usize) -> usize {
        self.join[a * self.size() + b]
    }

    #[inline]
    pub fn inf(&self, a: usize, b: usize) -> usize {
        self.meet[a * self.size() + b]
    }

    /// The `n`-element chain `0 < 1/(n-1) < … < 1` with the given tensor on
    /// positions.
    pub fn chain(n: usize, tensor: impl Fn(usize, usize) -> usize) -> Result<Self, QuantaleError> {
        if n < 2 {
            return Err(QuantaleError::Descriptor(format!(
                "a chain needs at least 2 elements, got {n}"
            )));
        }
        let labels = (0..n)
            .map(|i| crate::num::format_rational(&crate::num::rat(i as i64, (n - 1) as i64)))
            .collect();
        let leq = (0..n * n).map(|k| k / n <= k % n).collect();
        let tensor = (0..n * n).map(|k| tensor(k / n, k % n)).collect();
        Self::build(labels, leq, tensor, n - 1)
    }

    /// Validates an explicit lattice + tensor table and derives joins, meets
    /// and the residual.
    pub fn build(
        labels: Vec<String>,
        leq: Vec<bool>,
        tensor: Vec<usize>,
        unit: usize,
    ) -> Result<Self, QuantaleError> {
        let n = labels.len();
        let law = |law: &str, witness: String| QuantaleError::Law {
            law: law.to_string(),
            witness,
        };
        if n == 0 {
            return Err(QuantaleError::Descriptor("empty carrier".into()));
        }
        if leq.len() != n * n || tensor.len() != n * n {
            return Err(QuantaleError::Descriptor(format!("tables must be {n}x{n}")));
        }
        if unit >= n || tensor.iter().any(|&t| t >= n) {
            return Err(QuantaleError::Descriptor(
                "table entry outside the carrier".into(),
            ));
        }
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(QuantaleError::Descriptor(format!(
                    "duplicate element `{l}`"
                )));
            }
        }
        let le = |a: usize, b: usize| leq[a * n + b];
        let name = |a: usize| labels[a].clone();
        for a in 0..n {
            if !le(a, a) {
                return Err(law("reflexivity of the order", name(a)));
            }
            for b in 0..n {
                if a != b && le(a, b) && le(b, a) {
                    return Err(law(
                        "antisymmetry of the order",
                        format!("({}, {})", name(a), name(b)),
                    ));
                }
                for c in 0..n {
                    if le(a, b) && le(b, c) && !le(a, c) {
                        return Err(law(
                            "transitivity of the order",
                            format!("({}, {}, {})", name(a), name(b), name(c)),
                        ));
                    }
                }
            }
        }
        let bottom = (0..n)
            .find(|&b| (0..n).all(|x| le(b, x)))
            .ok_or_else(|| law("existence of a least element", String::new()))?;
        let mut join = vec![0; n * n];
        let mut meet = vec![0; n * n];
        for a in 0..n {
            for b in 0..n {
                let ub: Vec<usize> = (0..n).filter(|&u| le(a, u) && le(b, u)).collect();
                let least = ub.iter().copied().find(|&u| ub.iter().all(|&v| le(u, v)));
                join[a * n + b] = least.ok_or_else(|| {
                    law(
                        "existence of binary joins",
                        format!("({}, {})", name(a), name(b)),
                    )
                })?;
                let lb: Vec<usize> = (0..n).filter(|&l| le(l, a) && le(l, b)).collect();
                let greatest = lb.iter().copied().find(|&l| lb.iter().all(|&v| le(v, l)));
                meet[a * n + b] = greatest.ok_or_else(|| {
                    law(
                        "existence of binary meets",
                        format!("({}, {})", name(a), name(b)),
                    )
                })?;
            }
        }
        let top = (0..n).fold(bottom, |acc, x| join[acc * n + x]);
        let mul = |a: usize, b: usize| tensor[a * n + b];
        for a in 0..n {
            if mul(a, unit) != a {
                return Err(law("unit", name(a)));
            }
            if mul(a, bottom) != bottom {
                return Err(law("v ⊗ ⊥ = ⊥", name(a)));
            }
            for b in 0..n {
                if mul(a, b) != mul(b, a) {
                    return Err(law("commutativity", format!("({}, {})", name(a), name(b))));
                }
                for c in 0..n {
                    if mul(mul(a, b), c) != mul(a, mul(b, c)) {
                        return Err(law(
                            "associativity",
                            format!("({}, {}, {})", name(a), name(b), name(c)),
                        ));
                    }
                    if mul(a, join[b * n + c]) != join[mul(a, b) * n + mul(a, c)] {
                        return Err(law(
                            "distributivity over joins",
                            format!("({}, {}, {})", name(a), name(b), name(c)),
                        ));
                    }
                }
            }
        }
        let mut hom = vec![0; n * n];
        for u in 0..n {
            for w in 0..n {
                hom[u * n + w] = (0..n)
                    .filter(|&v| le(mul(v, u), w))
                    .fold(bottom, |acc, v| join[acc * n + v]);
            }
        }
        // Longest strictly increasing chain, counted in elements.
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&a| (0..n).filter(|&b| le(b, a)).count());
        let mut depth = vec![1usize; n];
        for (i, &a) in order.iter().enumerate() {
            for &b in &order[..i] {
                if b != a && le(b, a) {
                    depth[a] = depth[a].max(depth[b] + 1);
                }
            }
        }
        let height = depth.into_iter().max().unwrap_or(1);
        Ok(FiniteTable {
            labels,
            leq,
            tensor,
            join,
            meet,
            hom,
            unit,
            bottom,
            top,
            height,
        })
    }

    pub fn is_frame(&self) -> bool {
        let n = self.size();
        (0..n * n).all(|k| self.tensor[k] == self.meet[k])
    }

    pub fn is_optimistic(&self) -> bool {
        let n = self.size();
        (0..n * n).all(|k| {
            let (a, b) = (k / n, k % n);
            self.mul(a, b) != self.bottom || a == self.bottom || b == self.bottom
        })
    }
}
