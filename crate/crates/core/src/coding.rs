//! Prüfer-style codec for labelled trees whose first `m` vertices form an
//! independent set, and the induced count of such trees by degree sequence.
//!
//! Vertices are 0-indexed everywhere: the independent prefix is `{0..m-1}`
//! and the unconstrained labels are `{m..n-1}`. A tree is encoded by two
//! sequences: `a` (length `m-1`, entries in `m..n`) collects the neighbors of
//! pruned prefix leaves, `b` (length `n-m-1`, entries in `0..n`) the
//! neighbors of all other pruned leaves.
//!
//! Leaves are pruned lowest-label-first under the order that ranks every
//! label in `m..n` below every label in `0..m` (natural order within each
//! group). Prefix vertices are therefore pruned only when every current leaf
//! lies in the prefix, which makes exactly one prefix vertex survive to the
//! final edge and pins the two sequence lengths; pruning stops when a single
//! edge remains. The decoder rebuilds degrees from occurrence counts (every
//! vertex appears exactly `deg - 1` times across both sequences) and replays
//! the pruning, drawing the recorded neighbor from `a` or `b` according to
//! where the reconstructed leaf lives.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use num_bigint::BigUint;
use num_traits::Zero;

use crate::counting::multinomial;
use crate::error::{Error, Result};
use crate::graph::Graph;

/// Code of a labelled tree on `n` vertices with `{0..m-1}` independent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrueferCode {
    n: usize,
    m: usize,
    a: Vec<usize>,
    b: Vec<usize>,
}

impl PrueferCode {
    pub fn new(n: usize, m: usize, a: Vec<usize>, b: Vec<usize>) -> Result<Self> {
        if n < 2 {
            return Err(Error::param("codes exist only for trees on n >= 2 vertices"));
        }
        if m < 1 || m > n - 1 {
            return Err(Error::param(format!(
                "independent prefix size m={m} out of range [1, {}]",
                n - 1
            )));
        }
        if a.len() != m - 1 {
            return Err(Error::param(format!(
                "sequence a has length {}, expected m-1 = {}",
                a.len(),
                m - 1
            )));
        }
        if b.len() != n - m - 1 {
            return Err(Error::param(format!(
                "sequence b has length {}, expected n-m-1 = {}",
                b.len(),
                n - m - 1
            )));
        }
        if let Some(&x) = a.iter().find(|&&x| x < m || x >= n) {
            return Err(Error::param(format!(
                "entry {x} of a outside the unconstrained range {m}..{n}"
            )));
        }
        if let Some(&x) = b.iter().find(|&&x| x >= n) {
            return Err(Error::param(format!("entry {x} of b outside 0..{n}")));
        }
        Ok(PrueferCode { n, m, a, b })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Neighbors recorded for pruned prefix leaves (entries in `m..n`).
    pub fn a(&self) -> &[usize] {
        &self.a
    }

    /// Neighbors recorded for pruned non-prefix leaves (entries in `0..n`).
    pub fn b(&self) -> &[usize] {
        &self.b
    }
}

/// Pruning priority: all labels `>= m` come before all labels `< m`.
#[inline]
fn prune_key(v: usize, m: usize) -> (bool, usize) {
    (v < m, v)
}

/// Encodes a tree whose vertices `0..m-1` are pairwise non-adjacent.
pub fn encode_tree_with_independent_set(tree: &Graph, m: usize) -> Result<PrueferCode> {
    let n = tree.vertex_count();
    if n < 2 {
        return Err(Error::Structure("encoding needs a tree on n >= 2 vertices".into()));
    }
    if m < 1 || m > n - 1 {
        return Err(Error::param(format!(
            "independent prefix size m={m} out of range [1, {}]",
            n - 1
        )));
    }
    if tree.edge_count() != n - 1 || !tree.is_induced_forest(&(0..n).collect::<Vec<_>>())? {
        return Err(Error::Structure(format!(
            "input is not a tree: {} vertices, {} edges",
            n,
            tree.edge_count()
        )));
    }
    for v in 1..m {
        for u in 0..v {
            if tree.has_edge(u, v) {
                return Err(Error::Constraint(format!(
                    "prefix vertices {u} and {v} are adjacent"
                )));
            }
        }
    }

    let mut degree: Vec<usize> = (0..n).map(|v| tree.degree(v)).collect();
    let mut alive = vec![true; n];
    let mut heap: BinaryHeap<Reverse<(bool, usize)>> = (0..n)
        .filter(|&v| degree[v] == 1)
        .map(|v| Reverse(prune_key(v, m)))
        .collect();

    let mut a = Vec::with_capacity(m - 1);
    let mut b = Vec::with_capacity(n - m - 1);
    for _ in 0..n - 2 {
        let leaf = loop {
            let Reverse((_, v)) = heap.pop().expect("a tree always has a leaf");
            if alive[v] && degree[v] == 1 {
                break v;
            }
        };
        let neighbor = tree
            .neighbors(leaf)
            .into_iter()
            .find(|&u| alive[u])
            .expect("a live leaf has a live neighbor");
        if leaf < m {
            a.push(neighbor);
        } else {
            b.push(neighbor);
        }
        alive[leaf] = false;
        degree[neighbor] -= 1;
        if degree[neighbor] == 1 {
            heap.push(Reverse(prune_key(neighbor, m)));
        }
    }
    PrueferCode::new(n, m, a, b)
}

/// Decodes a code back to the unique tree with `{0..m-1}` independent.
pub fn decode_tree_with_independent_set(code: &PrueferCode) -> Result<Graph> {
    let (n, m) = (code.n, code.m);
    let mut degree = vec![1usize; n];
    for &x in code.a.iter().chain(&code.b) {
        degree[x] += 1;
    }

    let mut alive = vec![true; n];
    let mut heap: BinaryHeap<Reverse<(bool, usize)>> = (0..n)
        .filter(|&v| degree[v] == 1)
        .map(|v| Reverse(prune_key(v, m)))
        .collect();

    let mut edges = Vec::with_capacity(n - 1);
    let mut next_a = code.a.iter().copied();
    let mut next_b = code.b.iter().copied();
    for _ in 0..n - 2 {
        let leaf = loop {
            let Reverse((_, v)) = heap
                .pop()
                .ok_or_else(|| Error::Structure("code does not describe a tree".into()))?;
            if alive[v] && degree[v] == 1 {
                break v;
            }
        };
        let neighbor = if leaf < m { next_a.next() } else { next_b.next() }
            .ok_or_else(|| Error::Structure("code does not describe a tree".into()))?;
        edges.push((leaf.min(neighbor), leaf.max(neighbor)));
        alive[leaf] = false;
        degree[neighbor] -= 1;
        if degree[neighbor] == 1 {
            heap.push(Reverse(prune_key(neighbor, m)));
        }
    }
    let last: Vec<usize> = (0..n).filter(|&v| alive[v] && degree[v] == 1).collect();
    if last.len() != 2 || next_a.next().is_some() || next_b.next().is_some() {
        return Err(Error::Structure("code does not describe a tree".into()));
    }
    edges.push((last[0].min(last[1]), last[0].max(last[1])));
    Graph::from_edges(n, &edges)
}

/// Degree sequence `d_1..d_n`, every entry at least 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeSequence {
    d: Vec<u64>,
}

impl DegreeSequence {
    pub fn new(d: impl Into<Vec<u64>>) -> Result<Self> {
        let d = d.into();
        if d.contains(&0) {
            return Err(Error::param("tree degrees must be at least 1"));
        }
        Ok(DegreeSequence { d })
    }

    pub fn degrees(&self) -> &[u64] {
        &self.d
    }
}

/// Number of labelled trees on `n` vertices with `{0..m-1}` independent and
/// the given degree sequence:
///
/// `C(n-m-1; d_1-1, ..., d_m-1, n-1-s) * C(n+m-2-s; d_{m+1}-1, ..., d_n-1)`
///
/// with `s = d_1 + ... + d_m`. Returns 0 unless the degrees sum to `2n-2`
/// and `s <= n-1` (the existence condition).
pub fn count_trees_with_independent_set_degseq(
    n: usize,
    m: usize,
    d: &DegreeSequence,
) -> Result<BigUint> {
    if n == 0 || m == 0 || m > n {
        return Err(Error::param(format!(
            "prefix size m={m} out of range [1, n] for n={n}"
        )));
    }
    if d.d.len() != n {
        return Err(Error::param(format!(
            "degree sequence has {} entries, expected n={n}",
            d.d.len()
        )));
    }
    let total: u64 = d.d.iter().sum();
    if total != 2 * n as u64 - 2 {
        return Ok(BigUint::zero());
    }
    let prefix_sum: u64 = d.d[..m].iter().sum();

    let mut parts1: Vec<i64> = d.d[..m].iter().map(|&x| x as i64 - 1).collect();
    parts1.push(n as i64 - 1 - prefix_sum as i64);
    let parts2: Vec<i64> = d.d[m..].iter().map(|&x| x as i64 - 1).collect();
    Ok(multinomial(&parts1) * multinomial(&parts2))
}

/// Calls `f` with every labelled tree on `n` vertices, enumerated through
/// classic (unconstrained) Prüfer sequences. Intended for small `n`; the
/// number of trees is `n^(n-2)`.
pub fn for_each_labelled_tree(n: usize, mut f: impl FnMut(&Graph)) {
    if n == 0 {
        return;
    }
    if n <= 2 {
        let g = if n == 1 {
            Graph::empty(1)
        } else {
            Graph::from_edges(2, &[(0, 1)]).expect("single edge")
        };
        f(&g);
        return;
    }
    let mut seq = vec![0usize; n - 2];
    loop {
        f(&classic_pruefer_to_tree(&seq, n));
        // odometer over [0, n)^(n-2)
        let mut i = 0;
        loop {
            if i == seq.len() {
                return;
            }
            seq[i] += 1;
            if seq[i] < n {
                break;
            }
            seq[i] = 0;
            i += 1;
        }
    }
}

/// Standard Prüfer decoding: smallest-label leaf first, no constraints.
fn classic_pruefer_to_tree(seq: &[usize], n: usize) -> Graph {
    debug_assert_eq!(seq.len(), n - 2);
    let mut degree = vec![1usize; n];
    for &x in seq {
        degree[x] += 1;
    }
    let mut heap: BinaryHeap<Reverse<usize>> = (0..n)
        .filter(|&v| degree[v] == 1)
        .map(Reverse)
        .collect();
    let mut edges = Vec::with_capacity(n - 1);
    for &s in seq {
        let Reverse(leaf) = heap.pop().expect("valid sequence always has a leaf");
        edges.push((leaf.min(s), leaf.max(s)));
        degree[leaf] -= 1;
        degree[s] -= 1;
        if degree[s] == 1 {
            heap.push(Reverse(s));
        }
    }
    let last: Vec<usize> = (0..n).filter(|&v| degree[v] == 1).collect();
    debug_assert_eq!(last.len(), 2);
    let edge = (last[0].min(last[1]), last[0].max(last[1]));
    edges.push(edge);
    Graph::from_edges(n, &edges).expect("Prüfer decoding yields a simple tree")
}

/// True iff `{0..m-1}` is pairwise non-adjacent in `g`.
pub fn prefix_is_independent(g: &Graph, m: usize) -> bool {
    for v in 1..m.min(g.vertex_count()) {
        for u in 0..v {
            if g.has_edge(u, v) {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    #[test]
    fn code_validation() {
        assert!(PrueferCode::new(1, 1, vec![], vec![]).is_err());
        assert!(PrueferCode::new(3, 3, vec![], vec![]).is_err(), "m=n accepted");
        assert!(PrueferCode::new(3, 0, vec![], vec![]).is_err());
        assert!(PrueferCode::new(3, 1, vec![0], vec![0]).is_err(), "wrong a length");
        assert!(PrueferCode::new(3, 2, vec![0], vec![]).is_err(), "a entry in prefix");
        assert!(PrueferCode::new(3, 1, vec![], vec![3]).is_err(), "b entry out of range");
        assert!(PrueferCode::new(3, 2, vec![2], vec![]).is_ok());
    }

    #[test]
    fn encode_path_with_singleton_prefix() {
        // Path 1-0-2: vertex 0 is the prefix; both prunings stay outside it.
        let tree = Graph::from_edges(3, &[(0, 1), (0, 2)]).unwrap();
        let code = encode_tree_with_independent_set(&tree, 1).unwrap();
        assert_eq!(code.a(), &[] as &[usize]);
        assert_eq!(code.b().len(), 1);
    }

    #[test]
    fn encode_star_with_full_prefix() {
        // Star with center n-1 and leaves 0..n-2, prefix = all leaves.
        for n in 3..=7 {
            let edges: Vec<(usize, usize)> = (0..n - 1).map(|v| (v, n - 1)).collect();
            let star = Graph::from_edges(n, &edges).unwrap();
            let code = encode_tree_with_independent_set(&star, n - 1).unwrap();
            assert_eq!(code.a(), vec![n - 1; n - 2].as_slice());
            assert_eq!(code.b(), &[] as &[usize]);
        }
    }

    #[test]
    fn decode_two_vertex_code() {
        let code = PrueferCode::new(2, 1, vec![], vec![]).unwrap();
        let tree = decode_tree_with_independent_set(&code).unwrap();
        assert_eq!(tree.edges(), vec![(0, 1)]);
    }

    #[test]
    fn encode_rejects_bad_inputs() {
        let not_tree = Graph::from_edges(3, &[(0, 1)]).unwrap();
        assert!(matches!(
            encode_tree_with_independent_set(&not_tree, 1),
            Err(Error::Structure(_))
        ));
        let cycle = Graph::cycle(3).unwrap();
        assert!(matches!(
            encode_tree_with_independent_set(&cycle, 1),
            Err(Error::Structure(_))
        ));
        let path = Graph::path(3); // edge (0,1) inside prefix for m=2
        assert!(matches!(
            encode_tree_with_independent_set(&path, 2),
            Err(Error::Constraint(_))
        ));
        let tree = Graph::from_edges(3, &[(0, 1), (0, 2)]).unwrap();
        assert!(encode_tree_with_independent_set(&tree, 3).is_err());
        assert!(encode_tree_with_independent_set(&tree, 0).is_err());
    }

    #[test]
    fn roundtrip_all_trees_up_to_six() {
        // decode(encode(T, m)) = T for every tree and every valid m; the
        // verification suite extends this to n <= 8.
        for n in 2..=6usize {
            let mut trees = 0u64;
            for_each_labelled_tree(n, |tree| {
                trees += 1;
                for m in 1..n {
                    if !prefix_is_independent(tree, m) {
                        continue;
                    }
                    let code = encode_tree_with_independent_set(tree, m).unwrap();
                    assert_eq!(code.a().len(), m - 1);
                    assert_eq!(code.b().len(), n - m - 1);
                    let back = decode_tree_with_independent_set(&code).unwrap();
                    assert_eq!(&back, tree, "n={n}, m={m}");
                }
            });
            assert_eq!(trees, (n as u64).pow(n as u32 - 2), "Cayley count, n={n}");
        }
    }

    #[test]
    fn decode_covers_the_full_code_space() {
        // Every (a, b) in the product space decodes to a distinct tree with
        // an independent prefix, and encodes back to itself.
        for n in 2..=6usize {
            for m in 1..n {
                let mut seen = BTreeSet::new();
                let mut total = 0u64;
                for_each_code(n, m, &mut |code| {
                    total += 1;
                    let tree = decode_tree_with_independent_set(code).unwrap();
                    assert!(prefix_is_independent(&tree, m), "n={n}, m={m}");
                    assert!(seen.insert(tree.edges()), "decode not injective");
                    let back = encode_tree_with_independent_set(&tree, m).unwrap();
                    assert_eq!(&back, code);
                });
                let expected = (n as u64 - m as u64).pow(m as u32 - 1)
                    * (n as u64).pow((n - m - 1) as u32);
                assert_eq!(total, expected, "code space size, n={n}, m={m}");
            }
        }
    }

    fn for_each_code(n: usize, m: usize, f: &mut impl FnMut(&PrueferCode)) {
        let mut a = vec![m; m - 1];
        loop {
            let mut b = vec![0usize; n - m - 1];
            loop {
                let code = PrueferCode::new(n, m, a.clone(), b.clone()).unwrap();
                f(&code);
                if !bump(&mut b, 0, n) {
                    break;
                }
            }
            if !bump(&mut a, m, n) {
                break;
            }
        }
    }

    fn bump(xs: &mut [usize], lo: usize, hi: usize) -> bool {
        for x in xs.iter_mut() {
            *x += 1;
            if *x < hi {
                return true;
            }
            *x = lo;
        }
        false
    }

    #[test]
    fn degseq_count_examples() {
        let d = DegreeSequence::new(vec![2, 1, 1]).unwrap();
        assert_eq!(
            count_trees_with_independent_set_degseq(3, 1, &d).unwrap(),
            BigUint::from(1u32)
        );
        let d = DegreeSequence::new(vec![1, 1, 2]).unwrap();
        assert_eq!(
            count_trees_with_independent_set_degseq(3, 2, &d).unwrap(),
            BigUint::from(1u32)
        );
        // Wrong total degree: no tree.
        let d = DegreeSequence::new(vec![1, 1, 1]).unwrap();
        assert_eq!(
            count_trees_with_independent_set_degseq(3, 1, &d).unwrap(),
            BigUint::zero()
        );
        // Prefix degree sum exceeding n-1: no tree.
        let d = DegreeSequence::new(vec![3, 2, 1, 1, 1]).unwrap();
        assert_eq!(
            count_trees_with_independent_set_degseq(5, 2, &d).unwrap(),
            BigUint::zero()
        );
        assert!(DegreeSequence::new(vec![1, 0, 2]).is_err());
        let d = DegreeSequence::new(vec![1, 1]).unwrap();
        assert!(count_trees_with_independent_set_degseq(3, 1, &d).is_err(), "length mismatch");
        assert!(count_trees_with_independent_set_degseq(2, 3, &d).is_err(), "m > n");
    }

    #[test]
    fn degseq_counts_sum_to_cayley_for_trivial_prefix() {
        // m=1 puts no constraint on the tree, so summing over all degree
        // sequences recovers n^(n-2).
        for n in 2..=7usize {
            let mut total = BigUint::zero();
            for_each_degree_sequence(n, &mut |d| {
                total += count_trees_with_independent_set_degseq(n, 1, d).unwrap();
            });
            assert_eq!(total, BigUint::from(n as u64).pow(n as u32 - 2), "n={n}");
        }
    }

    fn for_each_degree_sequence(n: usize, f: &mut impl FnMut(&DegreeSequence)) {
        fn go(remaining: u64, slots: usize, acc: &mut Vec<u64>, f: &mut impl FnMut(&DegreeSequence)) {
            if slots == 1 {
                if remaining >= 1 {
                    acc.push(remaining);
                    f(&DegreeSequence::new(acc.clone()).unwrap());
                    acc.pop();
                }
                return;
            }
            let max = remaining - (slots as u64 - 1);
            for d in 1..=max {
                acc.push(d);
                go(remaining - d, slots - 1, acc, f);
                acc.pop();
            }
        }
        go(2 * n as u64 - 2, n, &mut Vec::new(), f);
    }

    #[test]
    fn tree_enumeration_matches_cayley() {
        for n in 1..=7usize {
            let mut count = 0u64;
            for_each_labelled_tree(n, |g| {
                count += 1;
                if n >= 2 {
                    assert_eq!(g.edge_count(), n - 1);
                }
            });
            let expected = if n <= 2 { 1 } else { (n as u64).pow(n as u32 - 2) };
            assert_eq!(count, expected, "n={n}");
        }
    }
}
