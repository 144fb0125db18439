//! Exact counts of labelled rooted forests and of rooted spanning forests of
//! a complete graph that contain a prescribed induced subforest.
//!
//! Everything here is arbitrary-precision integer arithmetic. Binomials with
//! negative or out-of-range arguments evaluate to 0, and `0^0 = 1`; both
//! conventions let the displayed sums run over their natural ranges without
//! case splits.

use std::collections::BTreeSet;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

pub fn factorial(n: u64) -> BigUint {
    let mut acc = BigUint::one();
    for i in 2..=n {
        acc *= i;
    }
    acc
}

/// `C(n, k)`, zero when `k > n`.
pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// Signed-argument binomial: zero whenever `n < 0`, `k < 0`, or `k > n`.
pub fn binomial_i(n: i64, k: i64) -> BigUint {
    if n < 0 || k < 0 || k > n {
        return BigUint::zero();
    }
    binomial(n as u64, k as u64)
}

/// Multinomial coefficient over the given parts (the top index is the part
/// sum); zero if any part is negative.
pub fn multinomial(parts: &[i64]) -> BigUint {
    if parts.iter().any(|&p| p < 0) {
        return BigUint::zero();
    }
    let total: i64 = parts.iter().sum();
    let mut acc = factorial(total as u64);
    for &p in parts {
        acc /= factorial(p as u64);
    }
    acc
}

/// `base^exp` with the convention `0^0 = 1`.
pub fn pow0(base: u64, exp: u64) -> BigUint {
    if exp == 0 {
        BigUint::one()
    } else {
        BigUint::from(base).pow(exp as u32)
    }
}

/// Number of labelled rooted forests on `k` vertices with exactly `m` tree
/// components: `C(k-1, m-1) * k^(k-m)`.
pub fn rooted_forest_count(k: u64, m: u64) -> Result<BigUint> {
    if k == 0 || m == 0 || m > k {
        return Err(Error::param(format!(
            "rooted_forest_count requires 1 <= m <= k, got k={k}, m={m}"
        )));
    }
    Ok(binomial(k - 1, m - 1) * pow0(k, k - m))
}

/// Number of labelled trees on `f` vertices: `f^(f-2)`, with `f=1` and `f=2`
/// both counting 1.
pub fn cayley_tree_count(f: u64) -> Result<BigUint> {
    if f == 0 {
        return Err(Error::param("cayley_tree_count requires f >= 1"));
    }
    if f == 1 {
        return Ok(BigUint::one());
    }
    Ok(pow0(f, f - 2))
}

/// Multiset of component sizes of a forest, kept sorted descending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ForestShape {
    parts: Vec<u64>,
}

impl ForestShape {
    pub fn new(parts: impl Into<Vec<u64>>) -> Result<Self> {
        let mut parts = parts.into();
        if parts.is_empty() {
            return Err(Error::param("forest shape needs at least one component"));
        }
        if parts.contains(&0) {
            return Err(Error::param("forest shape components must have size >= 1"));
        }
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Ok(ForestShape { parts })
    }

    /// Component sizes, descending.
    pub fn parts(&self) -> &[u64] {
        &self.parts
    }

    /// Total number of vertices covered by the shape.
    pub fn vertex_count(&self) -> u64 {
        self.parts.iter().sum()
    }

    pub fn component_count(&self) -> u64 {
        self.parts.len() as u64
    }
}

/// Number of rooted spanning forests of the complete graph `K_k` with `h`
/// components that contain a fixed forest with component sizes `shape` as an
/// induced subgraph:
///
/// `f1*...*fm * sum_{k0=0}^{k-l} C(k-l, k0) l^(k-l-k0) C(k0+m-1, h-1) (k-l)^(k0+m-h)`
///
/// where `l` is the shape's vertex count and `m` its component count. The
/// value depends only on the size multiset, not on where the forest sits.
pub fn forest_extension_count(k: u64, h: u64, shape: &ForestShape) -> Result<BigUint> {
    let l = shape.vertex_count();
    let m = shape.component_count();
    check_extension_args(k, h, l, m)?;
    let mut sum = BigUint::zero();
    for k0 in 0..=(k - l) {
        let spread = binomial(k0 + m - 1, h - 1);
        if spread.is_zero() {
            continue; // h > k0 + m: nothing to attach yet at this k0
        }
        sum += binomial(k - l, k0) * pow0(l, k - l - k0) * spread * pow0(k - l, k0 + m - h);
    }
    let root_choices: BigUint = shape.parts.iter().map(|&f| BigUint::from(f)).product();
    Ok(root_choices * sum)
}

/// Independent oracle for [`forest_extension_count`]: plants a canonical
/// forest with the given component sizes on the first `l` vertices of `K_k`
/// and enumerates every acyclic edge subset of `K_k` whose restriction to the
/// first `l` vertices is exactly the planted forest, accumulating the number
/// of rootings of those with `h` components.
pub fn forest_extension_count_bruteforce(k: u64, h: u64, shape: &ForestShape) -> Result<BigUint> {
    if k > 8 {
        return Err(Error::param(format!(
            "brute-force enumeration is limited to k <= 8, got k={k}"
        )));
    }
    let l = shape.vertex_count();
    let m = shape.component_count();
    check_extension_args(k, h, l, m)?;

    let planted = canonical_placement(shape);
    let k = k as usize;
    let l = l as usize;

    #[derive(Clone, Copy, PartialEq)]
    enum Rule {
        Required,  // planted edge: must be present
        Forbidden, // non-edge inside the planted block: must stay absent
        Free,
    }

    let mut edges = Vec::new();
    for v in 1..k {
        for u in 0..v {
            let rule = if u < l && v < l {
                if planted.contains(&(u, v)) {
                    Rule::Required
                } else {
                    Rule::Forbidden
                }
            } else {
                Rule::Free
            };
            edges.push((u, v, rule));
        }
    }

    struct Search {
        edges: Vec<(usize, usize, Rule)>,
        parent: Vec<usize>,
        size: Vec<usize>,
        k: usize,
        h: usize,
        total: BigUint,
    }

    impl Search {
        fn root(&self, mut x: usize) -> usize {
            while self.parent[x] != x {
                x = self.parent[x];
            }
            x
        }

        fn run(&mut self, idx: usize, chosen: usize) {
            if self.k - chosen == self.h
                && self.edges[idx..].iter().all(|&(_, _, r)| r != Rule::Required)
            {
                // Already at the target component count; taking any further
                // edge would overshoot, so the rest must stay absent.
                let mut rootings = BigUint::one();
                for v in 0..self.k {
                    if self.root(v) == v {
                        rootings *= self.size[v];
                    }
                }
                self.total += rootings;
                return;
            }
            if idx == self.edges.len() {
                return;
            }
            let (u, v, rule) = self.edges[idx];
            if rule != Rule::Required {
                self.run(idx + 1, chosen);
            }
            if rule == Rule::Forbidden {
                return;
            }
            let (ru, rv) = (self.root(u), self.root(v));
            if ru == rv {
                return; // would close a cycle
            }
            let (big, small) = if self.size[ru] >= self.size[rv] {
                (ru, rv)
            } else {
                (rv, ru)
            };
            self.parent[small] = big;
            self.size[big] += self.size[small];
            self.run(idx + 1, chosen + 1);
            self.size[big] -= self.size[small];
            self.parent[small] = small;
        }
    }

    let mut search = Search {
        edges,
        parent: (0..k).collect(),
        size: vec![1; k],
        k,
        h: h as usize,
        total: BigUint::zero(),
    };
    search.run(0, 0);
    Ok(search.total)
}

fn check_extension_args(k: u64, h: u64, l: u64, m: u64) -> Result<()> {
    if l > k {
        return Err(Error::param(format!(
            "shape covers {l} vertices but the host has only k={k}"
        )));
    }
    if h == 0 || h > k - l + m {
        return Err(Error::param(format!(
            "component count h={h} out of range [1, {}]",
            k - l + m
        )));
    }
    Ok(())
}

/// Edge set of the canonical placement: component `i` occupies a consecutive
/// block of vertices, connected as a path.
fn canonical_placement(shape: &ForestShape) -> BTreeSet<(usize, usize)> {
    let mut edges = BTreeSet::new();
    let mut start = 0usize;
    for &f in shape.parts() {
        let f = f as usize;
        for i in 0..f.saturating_sub(1) {
            edges.insert((start + i, start + i + 1));
        }
        start += f;
    }
    edges
}

/// All partitions of `total` into positive parts, each passed as a
/// descending slice.
pub(crate) fn for_each_partition(total: u64, f: &mut impl FnMut(&[u64])) {
    fn recurse(remaining: u64, max_part: u64, stack: &mut Vec<u64>, f: &mut impl FnMut(&[u64])) {
        if remaining == 0 {
            f(stack);
            return;
        }
        let mut part = max_part.min(remaining);
        while part >= 1 {
            stack.push(part);
            recurse(remaining - part, part, stack, f);
            stack.pop();
            part -= 1;
        }
    }
    let mut stack = Vec::new();
    recurse(total, total, &mut stack, f);
}
