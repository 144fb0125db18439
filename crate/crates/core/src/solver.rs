//! Exact maximum induced forest via branch and bound, a subset-enumeration
//! oracle, and exact realized counts of induced rooted forests.
//!
//! The search keeps a partial forest `S` and a candidate set `C` of vertices
//! that can individually extend `S` without closing a cycle. It branches on
//! the candidate whose inclusion shrinks `C` the most (lowest index on ties),
//! prunes with `|S| + ub(C)` where `ub` is a degree-peeling bound on the
//! largest forest inside `G[C]`, and tracks components with a union-find that
//! is rolled back on backtrack. All tie-breaking is index-based, so node
//! counts are reproducible for a given graph.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use num_traits::Zero;

use crate::bits;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::rng::Stream;

/// Seed of the deterministic multi-start greedy that provides the initial
/// lower bound. Fixed so that solves are reproducible.
const GREEDY_SEED: u64 = 0x1F0_3E57;
const GREEDY_RESTARTS: usize = 48;

/// Budget exhaustion is only checked every `BUDGET_CHECK_MASK + 1` nodes.
const BUDGET_CHECK_MASK: u64 = (1 << 14) - 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    /// The reported size is the exact maximum.
    Optimal,
    /// The node budget ran out; the reported size is only a lower bound.
    Incomplete,
}

#[derive(Debug, Clone)]
pub struct SolveResult {
    pub size: usize,
    /// Vertex set attaining `size`, sorted ascending.
    pub witness: Vec<usize>,
    pub nodes_explored: u64,
    pub elapsed: Duration,
    pub status: SolveStatus,
}

/// Exact maximum induced forest of `g`. With a node budget the search may
/// stop early and report its best forest as `Incomplete`; it never claims
/// optimality it has not proven.
pub fn max_induced_forest(g: &Graph, budget: Option<u64>) -> SolveResult {
    let start = Instant::now();
    let n = g.vertex_count();
    if n == 0 {
        return SolveResult {
            size: 0,
            witness: Vec::new(),
            nodes_explored: 0,
            elapsed: start.elapsed(),
            status: SolveStatus::Optimal,
        };
    }

    let seed_witness = best_greedy_forest(g);
    let mut search = Search::new(g, budget.unwrap_or(u64::MAX));
    search.best_size = seed_witness.len();
    search.best_witness = seed_witness;

    let root_cand: Vec<u64> = full_mask(n, g.stride());
    search.cand_stack.push(root_cand);
    search.run(0);

    let mut witness = search.best_witness;
    witness.sort_unstable();
    SolveResult {
        size: search.best_size,
        witness,
        nodes_explored: search.nodes,
        elapsed: start.elapsed(),
        status: if search.aborted {
            SolveStatus::Incomplete
        } else {
            SolveStatus::Optimal
        },
    }
}

/// Exact maximum by enumerating all vertex subsets; the solver's oracle.
pub fn max_induced_forest_bruteforce(g: &Graph) -> Result<usize> {
    let n = g.vertex_count();
    if n > 24 {
        return Err(Error::param(format!(
            "subset enumeration is limited to n <= 24, got n={n}"
        )));
    }
    let rows: Vec<u32> = (0..n)
        .map(|v| {
            let mut r = 0u32;
            for u in g.neighbors(v) {
                r |= 1 << u;
            }
            r
        })
        .collect();
    let mut best = 0usize;
    for mask in 0u32..(1u32 << n) {
        let size = mask.count_ones() as usize;
        if size <= best {
            continue;
        }
        if mask_is_forest(&rows, mask) {
            best = size;
        }
    }
    Ok(best)
}

fn mask_is_forest(rows: &[u32], mask: u32) -> bool {
    // forest <=> edges + components == vertices
    let mut edges = 0u32;
    let mut t = mask;
    while t != 0 {
        let v = t.trailing_zeros() as usize;
        t &= t - 1;
        edges += (rows[v] & mask).count_ones();
    }
    let edges = (edges / 2) as usize;
    let vertices = mask.count_ones() as usize;
    if edges >= vertices && vertices > 0 {
        return false;
    }
    let mut components = 0usize;
    let mut unseen = mask;
    while unseen != 0 {
        components += 1;
        let mut frontier = unseen & unseen.wrapping_neg();
        let mut seen = frontier;
        while frontier != 0 {
            let mut next = 0u32;
            let mut f = frontier;
            while f != 0 {
                let v = f.trailing_zeros() as usize;
                f &= f - 1;
                next |= rows[v] & mask & !seen;
            }
            seen |= next;
            frontier = next;
        }
        unseen &= !seen;
    }
    edges + components == vertices
}

/// Exact number of induced rooted forests on `k` vertices: every `k`-subset
/// inducing a forest contributes one rooting per choice of a distinguished
/// vertex in each component. Enumeration-based, intended for small graphs.
pub fn count_induced_rooted_forests(g: &Graph, k: usize) -> Result<BigUint> {
    let n = g.vertex_count();
    if k > n {
        return Err(Error::param(format!("k={k} out of range [0, {n}]")));
    }
    let mut uf = UnionFind::new(n);
    let mut chosen: Vec<usize> = Vec::with_capacity(k);
    let mut total = BigUint::zero();
    let mut hit_roots: Vec<usize> = Vec::new();

    fn go(
        g: &Graph,
        k: usize,
        start: usize,
        uf: &mut UnionFind,
        chosen: &mut Vec<usize>,
        hit_roots: &mut Vec<usize>,
        total: &mut BigUint,
    ) {
        if chosen.len() == k {
            let mut product = 1u128;
            for &v in chosen.iter() {
                let r = uf.find(v);
                if r == v {
                    product *= uf.size[v] as u128;
                }
            }
            *total += BigUint::from(product);
            return;
        }
        let n = g.vertex_count();
        for v in start..n {
            if n - v < k - chosen.len() {
                break;
            }
            hit_roots.clear();
            let mut ok = true;
            for &u in chosen.iter() {
                if g.has_edge(u, v) {
                    let r = uf.find(u);
                    if hit_roots.contains(&r) {
                        ok = false;
                        break;
                    }
                    hit_roots.push(r);
                }
            }
            if !ok {
                continue; // v closes a cycle; so does any superset through here
            }
            let snapshot = uf.trail_len();
            for &r in hit_roots.iter() {
                uf.union(v, r);
            }
            chosen.push(v);
            go(g, k, v + 1, uf, chosen, hit_roots, total);
            chosen.pop();
            uf.rollback(snapshot);
        }
    }

    go(g, k, 0, &mut uf, &mut chosen, &mut hit_roots, &mut total);
    Ok(total)
}

/// A vertex subset together with a choice of parents: one distinguished root
/// per component, parent edges inside the host graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootedForest {
    vertices: Vec<usize>,
    parent: BTreeMap<usize, Option<usize>>,
    roots: Vec<usize>,
}

impl RootedForest {
    /// Builds the canonical rooting of the forest induced by `s`: each
    /// component is rooted at its lowest-index vertex.
    pub fn from_subset(g: &Graph, s: &[usize]) -> Result<Self> {
        if !g.is_induced_forest(s)? {
            return Err(Error::Structure(
                "subset does not induce a forest".into(),
            ));
        }
        let mut vertices = s.to_vec();
        vertices.sort_unstable();
        let inside: std::collections::BTreeSet<usize> = vertices.iter().copied().collect();
        let mut parent = BTreeMap::new();
        let mut roots = Vec::new();
        for &v in &vertices {
            if parent.contains_key(&v) {
                continue;
            }
            roots.push(v);
            parent.insert(v, None);
            let mut queue = std::collections::VecDeque::from([v]);
            while let Some(x) = queue.pop_front() {
                for u in g.neighbors(x) {
                    if inside.contains(&u) && !parent.contains_key(&u) {
                        parent.insert(u, Some(x));
                        queue.push_back(u);
                    }
                }
            }
        }
        Ok(RootedForest { vertices, parent, roots })
    }

    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    pub fn roots(&self) -> &[usize] {
        &self.roots
    }

    pub fn parent_of(&self, v: usize) -> Option<Option<usize>> {
        self.parent.get(&v).copied()
    }

    /// Checks all structural invariants against a host graph.
    pub fn validate(&self, g: &Graph) -> Result<()> {
        let inside: std::collections::BTreeSet<usize> = self.vertices.iter().copied().collect();
        if self.parent.len() != self.vertices.len() {
            return Err(Error::Structure("parent map does not cover the vertices".into()));
        }
        for (&v, &p) in &self.parent {
            if !inside.contains(&v) {
                return Err(Error::Structure(format!("parent entry for outsider {v}")));
            }
            match p {
                None => {
                    if !self.roots.contains(&v) {
                        return Err(Error::Structure(format!("{v} has no parent but is not a root")));
                    }
                }
                Some(p) => {
                    if !inside.contains(&p) {
                        return Err(Error::Structure(format!("parent {p} of {v} is outside")));
                    }
                    if !g.has_edge(v.min(p), v.max(p)) {
                        return Err(Error::Structure(format!("parent edge ({v},{p}) not in graph")));
                    }
                }
            }
        }
        // Walking up from any vertex must terminate at a root (acyclicity),
        // and each component must contain exactly one root.
        let mut root_of = BTreeMap::new();
        for &v in &self.vertices {
            let mut seen = vec![v];
            let mut x = v;
            while let Some(Some(p)) = self.parent.get(&x).copied() {
                if seen.contains(&p) {
                    return Err(Error::Structure("parent relation has a cycle".into()));
                }
                seen.push(p);
                x = p;
            }
            root_of.insert(v, x);
        }
        for &v in &self.vertices {
            for u in g.neighbors(v) {
                if inside.contains(&u) && root_of[&v] != root_of[&u] {
                    return Err(Error::Structure(format!(
                        "vertices {v} and {u} are adjacent but rooted separately"
                    )));
                }
            }
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// search internals
// ---------------------------------------------------------------------------

struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
    trail: Vec<(usize, usize)>, // (absorbed root, absorbing root)
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            size: vec![1; n],
            trail: Vec::new(),
        }
    }

    #[inline]
    fn find(&self, mut x: usize) -> usize {
        // No path compression: unions must be undoable in O(1).
        while self.parent[x] != x {
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        debug_assert_ne!(ra, rb, "union would close a cycle");
        let (big, small) = if self.size[ra] >= self.size[rb] {
            (ra, rb)
        } else {
            (rb, ra)
        };
        self.parent[small] = big;
        self.size[big] += self.size[small];
        self.trail.push((small, big));
    }

    fn trail_len(&self) -> usize {
        self.trail.len()
    }

    fn rollback(&mut self, to: usize) {
        while self.trail.len() > to {
            let (small, big) = self.trail.pop().unwrap();
            self.size[big] -= self.size[small];
            self.parent[small] = small;
        }
    }
}

fn full_mask(n: usize, stride: usize) -> Vec<u64> {
    let mut mask = vec![0u64; stride];
    for v in 0..n {
        bits::set(&mut mask, v);
    }
    mask
}

struct Search<'a> {
    g: &'a Graph,
    stride: usize,
    uf: UnionFind,
    s_mask: Vec<u64>,
    s_members: Vec<usize>,
    best_size: usize,
    best_witness: Vec<usize>,
    nodes: u64,
    node_budget: u64,
    aborted: bool,
    cand_stack: Vec<Vec<u64>>,
    // stamped dense component ids, reused across nodes
    comp_slot: Vec<usize>,
    comp_seen: Vec<u64>,
    stamp: u64,
    // scratch for the peel bound
    degree_buckets: Vec<usize>,
}

impl<'a> Search<'a> {
    fn new(g: &'a Graph, node_budget: u64) -> Self {
        let n = g.vertex_count();
        Search {
            g,
            stride: g.stride(),
            uf: UnionFind::new(n),
            s_mask: vec![0; g.stride()],
            s_members: Vec::new(),
            best_size: 0,
            best_witness: Vec::new(),
            nodes: 0,
            node_budget,
            aborted: false,
            cand_stack: Vec::new(),
            comp_slot: vec![0; n],
            comp_seen: vec![0; n],
            stamp: 0,
            degree_buckets: Vec::new(),
        }
    }

    fn add_vertex(&mut self, v: usize) {
        for x in bits::to_vec(&and_words(self.g.row(v), &self.s_mask)) {
            let r = self.uf.find(x);
            if self.uf.find(v) != r {
                self.uf.union(v, r);
            }
        }
        bits::set(&mut self.s_mask, v);
        self.s_members.push(v);
    }

    fn remove_to(&mut self, members: usize, trail: usize) {
        while self.s_members.len() > members {
            let v = self.s_members.pop().unwrap();
            bits::clear(&mut self.s_mask, v);
        }
        self.uf.rollback(trail);
    }

    fn run(&mut self, depth: usize) {
        self.nodes += 1;
        if self.nodes & BUDGET_CHECK_MASK == 0 && self.nodes > self.node_budget {
            self.aborted = true;
        }
        if self.aborted {
            return;
        }

        let members_snapshot = self.s_members.len();
        let trail_snapshot = self.uf.trail_len();

        // Reduction: a candidate with at most one neighbor among S and the
        // remaining candidates can never close a cycle; include it outright.
        loop {
            let universe: Vec<u64> = or_words(&self.s_mask, &self.cand_stack[depth]);
            let mut forced = None;
            bits::for_each(&self.cand_stack[depth], |u| {
                if forced.is_none()
                    && bits::intersection_count(self.g.row(u), &universe) <= 1
                {
                    forced = Some(u);
                }
            });
            match forced {
                Some(u) => {
                    self.add_vertex(u);
                    bits::clear(&mut self.cand_stack[depth], u);
                }
                None => break,
            }
        }

        if self.s_members.len() > self.best_size {
            self.best_size = self.s_members.len();
            self.best_witness = self.s_members.clone();
        }

        let cand_count = bits::count(&self.cand_stack[depth]);
        if cand_count == 0 {
            self.remove_to(members_snapshot, trail_snapshot);
            return;
        }
        let bound = self.s_members.len() + self.peel_bound(depth).min(cand_count);
        if bound <= self.best_size {
            self.remove_to(members_snapshot, trail_snapshot);
            return;
        }

        let (chosen, child_cand) = self.select_branch_vertex(depth);

        // Include branch first: good solutions surface early.
        if self.cand_stack.len() <= depth + 1 {
            self.cand_stack.push(vec![0; self.stride]);
        }
        self.cand_stack[depth + 1].copy_from_slice(&child_cand);
        let inner_members = self.s_members.len();
        let inner_trail = self.uf.trail_len();
        self.add_vertex(chosen);
        self.run(depth + 1);
        self.remove_to(inner_members, inner_trail);

        if !self.aborted {
            // Exclude branch.
            let mut without = self.cand_stack[depth].clone();
            bits::clear(&mut without, chosen);
            self.cand_stack[depth + 1].copy_from_slice(&without);
            self.run(depth + 1);
        }

        self.remove_to(members_snapshot, trail_snapshot);
    }

    /// Degree-peeling upper bound for the largest induced forest inside the
    /// candidate subgraph: a `t`-subset can be a forest only if the edges of
    /// `G[C]` minus the `|C| - t` largest degrees do not exceed `t - 1`.
    fn peel_bound(&mut self, depth: usize) -> usize {
        let cand = &self.cand_stack[depth];
        let c = bits::count(cand);
        if c <= 2 {
            return c;
        }
        self.degree_buckets.clear();
        self.degree_buckets.resize(c, 0);
        let mut total_degree = 0usize;
        bits::for_each(cand, |w| {
            let d = bits::intersection_count(self.g.row(w), cand);
            total_degree += d;
            self.degree_buckets[d.min(c - 1)] += 1;
        });
        let edges = total_degree / 2;

        // Walk t downward, accumulating the largest degrees as "removed".
        let mut removed_degree = 0usize;
        let mut bucket = c - 1;
        let mut left_in_bucket = self.degree_buckets[bucket];
        for t in (1..=c).rev() {
            if edges < removed_degree + t {
                return t;
            }
            // remove one more vertex: the next largest degree
            while left_in_bucket == 0 && bucket > 0 {
                bucket -= 1;
                left_in_bucket = self.degree_buckets[bucket];
            }
            removed_degree += bucket;
            left_in_bucket = left_in_bucket.saturating_sub(1);
        }
        0
    }

    /// Applies the branching rule: the candidate whose inclusion leaves the
    /// fewest compatible candidates, ties to the lowest index. Returns the
    /// chosen vertex and the child candidate mask for its include branch.
    fn select_branch_vertex(&mut self, depth: usize) -> (usize, Vec<u64>) {
        let cand_list = bits::to_vec(&self.cand_stack[depth]);

        // Dense ids for the components of S.
        self.stamp += 1;
        let mut comp_count = 0usize;
        for i in 0..self.s_members.len() {
            let r = self.uf.find(self.s_members[i]);
            if self.comp_seen[r] != self.stamp {
                self.comp_seen[r] = self.stamp;
                self.comp_slot[r] = comp_count;
                comp_count += 1;
            }
        }

        if comp_count <= 64 {
            // Fast path: component hits as 64-bit masks; a pair conflicts iff
            // adjacency plus shared hit components reaches 2.
            let hit_masks: Vec<u64> = cand_list
                .iter()
                .map(|&w| {
                    let mut mask = 0u64;
                    bits::for_each(&and_words(self.g.row(w), &self.s_mask), |x| {
                        mask |= 1 << self.comp_slot[self.uf.find(x)];
                    });
                    mask
                })
                .collect();
            let mut best_vertex = cand_list[0];
            let mut best_survivors = usize::MAX;
            let mut best_idx = 0;
            for (i, &u) in cand_list.iter().enumerate() {
                let mut survivors = 0usize;
                for (j, &w) in cand_list.iter().enumerate() {
                    if i == j {
                        continue;
                    }
                    if !conflicts(hit_masks[i], hit_masks[j], self.g.has_edge(u.min(w), u.max(w))) {
                        survivors += 1;
                    }
                }
                if survivors < best_survivors {
                    best_survivors = survivors;
                    best_vertex = u;
                    best_idx = i;
                }
            }
            let mut child = vec![0u64; self.stride];
            for (j, &w) in cand_list.iter().enumerate() {
                if j != best_idx
                    && !conflicts(
                        hit_masks[best_idx],
                        hit_masks[j],
                        self.g.has_edge(best_vertex.min(w), best_vertex.max(w)),
                    )
                {
                    bits::set(&mut child, w);
                }
            }
            (best_vertex, child)
        } else {
            // More than 64 components only happens on huge sparse graphs
            // where the bound closes the node immediately; fall back to the
            // lowest-index candidate and a direct feasibility filter.
            let chosen = cand_list[0];
            let members = self.s_members.len();
            let trail = self.uf.trail_len();
            self.add_vertex(chosen);
            let mut child = vec![0u64; self.stride];
            for &w in cand_list.iter().skip(1) {
                if self.is_feasible(w) {
                    bits::set(&mut child, w);
                }
            }
            self.remove_to(members, trail);
            (chosen, child)
        }
    }

    /// True iff `w` touches every current component of S at most once.
    fn is_feasible(&mut self, w: usize) -> bool {
        self.stamp += 1;
        let hits = and_words(self.g.row(w), &self.s_mask);
        let mut ok = true;
        bits::for_each(&hits, |x| {
            let r = self.uf.find(x);
            if self.comp_seen[r] == self.stamp {
                ok = false;
            } else {
                self.comp_seen[r] = self.stamp;
            }
        });
        ok
    }
}

#[inline]
fn conflicts(hits_u: u64, hits_w: u64, adjacent: bool) -> bool {
    let shared = (hits_u & hits_w).count_ones();
    shared >= 2 || (shared >= 1 && adjacent)
}

#[inline]
fn and_words(a: &[u64], b: &[u64]) -> Vec<u64> {
    a.iter().zip(b).map(|(x, y)| x & y).collect()
}

#[inline]
fn or_words(a: &[u64], b: &[u64]) -> Vec<u64> {
    a.iter().zip(b).map(|(x, y)| x | y).collect()
}

/// Deterministic multi-start greedy forest, used as the initial lower bound.
fn best_greedy_forest(g: &Graph) -> Vec<usize> {
    let n = g.vertex_count();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| (g.degree(v), v));
    let mut best = greedy_forest(g, &order);
    let mut stream = Stream::new(GREEDY_SEED);
    for _ in 0..GREEDY_RESTARTS {
        stream.shuffle(&mut order);
        let cand = greedy_forest(g, &order);
        if cand.len() > best.len() {
            best = cand;
        }
    }
    best
}

fn greedy_forest(g: &Graph, order: &[usize]) -> Vec<usize> {
    let n = g.vertex_count();
    let mut uf = UnionFind::new(n);
    let mut in_s = vec![false; n];
    let mut chosen = Vec::new();
    let mut hit_roots: Vec<usize> = Vec::new();
    for &v in order {
        hit_roots.clear();
        let mut ok = true;
        for u in g.neighbors(v) {
            if in_s[u] {
                let r = uf.find(u);
                if hit_roots.contains(&r) {
                    ok = false;
                    break;
                }
                hit_roots.push(r);
            }
        }
        if ok {
            for &r in &hit_roots {
                uf.union(v, r);
            }
            in_s[v] = true;
            chosen.push(v);
        }
    }
    chosen
}
