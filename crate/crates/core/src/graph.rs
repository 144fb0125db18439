//! Simple labelled graphs with bit-row adjacency, seeded G(n,p) sampling,
//! induced-subgraph and acyclicity primitives, and the single-vertex
//! neighborhood replacement used by the Lipschitz experiments.

use std::fmt;
use std::io::{BufRead, Write};

use num_bigint::BigUint;
use num_traits::ToPrimitive;

use crate::bits;
use crate::error::{Error, Result};
use crate::exact::Rational;
use crate::rng::stream_draw;

/// Immutable simple graph on vertices `0..n-1`. The adjacency matrix is
/// stored as `n` rows of `n` bits; it is symmetric with a zero diagonal, and
/// every operation that perturbs a graph returns a new value.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    n: usize,
    stride: usize,
    adj: Vec<u64>,
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        let stride = bits::words_for(n.max(1));
        Graph {
            n,
            stride,
            adj: vec![0; stride * n.max(1)],
        }
    }

    pub fn complete(n: usize) -> Self {
        let mut g = Graph::empty(n);
        for v in 1..n {
            for u in 0..v {
                g.set_edge(u, v);
            }
        }
        g
    }

    /// Path 0-1-...-(n-1).
    pub fn path(n: usize) -> Self {
        let mut g = Graph::empty(n);
        for v in 1..n {
            g.set_edge(v - 1, v);
        }
        g
    }

    /// Cycle on `n >= 3` vertices.
    pub fn cycle(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::param("a cycle needs at least 3 vertices"));
        }
        let mut g = Graph::path(n);
        g.set_edge(0, n - 1);
        Ok(g)
    }

    /// Builds a graph from an explicit edge list; every pair must satisfy
    /// `u < v < n` and appear once.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = Graph::empty(n);
        for &(u, v) in edges {
            if u >= v {
                return Err(Error::param(format!(
                    "edge ({u}, {v}) must be written with u < v"
                )));
            }
            if v >= n {
                return Err(Error::param(format!("edge ({u}, {v}) out of range for n={n}")));
            }
            if g.has_edge(u, v) {
                return Err(Error::param(format!("duplicate edge ({u}, {v})")));
            }
            g.set_edge(u, v);
        }
        Ok(g)
    }

    fn set_edge(&mut self, u: usize, v: usize) {
        debug_assert!(u != v && u < self.n && v < self.n);
        bits::set(&mut self.adj[u * self.stride..(u + 1) * self.stride], v);
        bits::set(&mut self.adj[v * self.stride..(v + 1) * self.stride], u);
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        bits::get(self.row(u), v)
    }

    /// Neighbor bitset of `v` as words.
    #[inline]
    pub fn row(&self, v: usize) -> &[u64] {
        &self.adj[v * self.stride..(v + 1) * self.stride]
    }

    /// Words per adjacency row.
    #[inline]
    pub fn stride(&self) -> usize {
        self.stride
    }

    pub fn degree(&self, v: usize) -> usize {
        bits::count(self.row(v))
    }

    pub fn neighbors(&self, v: usize) -> Vec<usize> {
        bits::to_vec(self.row(v))
    }

    pub fn edge_count(&self) -> usize {
        (0..self.n).map(|v| self.degree(v)).sum::<usize>() / 2
    }

    /// Edges as `(u, v)` with `u < v`, lexicographically sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.edge_count());
        for u in 0..self.n {
            bits::for_each(self.row(u), |v| {
                if u < v {
                    out.push((u, v));
                }
            });
        }
        out
    }

    fn check_vertex_set(&self, s: &[usize]) -> Result<()> {
        let mut seen = vec![false; self.n];
        for &v in s {
            if v >= self.n {
                return Err(Error::param(format!(
                    "vertex {v} out of range for a graph on {} vertices",
                    self.n
                )));
            }
            if seen[v] {
                return Err(Error::param(format!("vertex {v} listed twice")));
            }
            seen[v] = true;
        }
        Ok(())
    }

    /// True iff the subgraph induced by `s` contains no cycle.
    pub fn is_induced_forest(&self, s: &[usize]) -> Result<bool> {
        self.check_vertex_set(s)?;
        // Union-find over the members of s; a repeated root means a cycle.
        let mut index = vec![usize::MAX; self.n];
        for (i, &v) in s.iter().enumerate() {
            index[v] = i;
        }
        let mut parent: Vec<usize> = (0..s.len()).collect();
        fn root(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for (i, &v) in s.iter().enumerate() {
            for &u in &s[..i] {
                if self.has_edge(u, v) {
                    let (ru, rv) = (root(&mut parent, index[u]), root(&mut parent, i));
                    if ru == rv {
                        return Ok(false);
                    }
                    parent[ru] = rv;
                }
            }
        }
        Ok(true)
    }

    /// Relabelled subgraph induced by `s`: the i-th smallest member of `s`
    /// becomes vertex `i`.
    pub fn induced_subgraph(&self, s: &[usize]) -> Result<Graph> {
        self.check_vertex_set(s)?;
        let mut sorted = s.to_vec();
        sorted.sort_unstable();
        let mut g = Graph::empty(sorted.len());
        for (j, &v) in sorted.iter().enumerate() {
            for (i, &u) in sorted[..j].iter().enumerate() {
                if self.has_edge(u, v) {
                    g.set_edge(i, j);
                }
            }
        }
        Ok(g)
    }

    /// New graph identical to `self` except that the neighborhood of `v` is
    /// exactly `nbrs`.
    pub fn replace_vertex_neighborhood(&self, v: usize, nbrs: &[usize]) -> Result<Graph> {
        if v >= self.n {
            return Err(Error::param(format!("vertex {v} out of range")));
        }
        self.check_vertex_set(nbrs)?;
        if nbrs.contains(&v) {
            return Err(Error::param(format!("vertex {v} cannot neighbor itself")));
        }
        let mut g = self.clone();
        for u in 0..self.n {
            if g.has_edge(u, v) {
                bits::clear(&mut g.adj[u * g.stride..(u + 1) * g.stride], v);
                bits::clear(&mut g.adj[v * g.stride..(v + 1) * g.stride], u);
            }
        }
        for &u in nbrs {
            g.set_edge(u.min(v), u.max(v));
        }
        Ok(g)
    }

    /// Writes the text format: `n m` on the first line, then one `u v` line
    /// per edge with `u < v`, lexicographically sorted.
    pub fn write_text(&self, w: &mut impl Write) -> Result<()> {
        let edges = self.edges();
        writeln!(w, "{} {}", self.n, edges.len())?;
        for (u, v) in edges {
            writeln!(w, "{u} {v}")?;
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut buf = Vec::new();
        self.write_text(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("graph text is ASCII")
    }

    /// Parses the text format written by [`Graph::write_text`]. Duplicate or
    /// reversed pairs are rejected.
    pub fn read_text(r: &mut impl BufRead) -> Result<Graph> {
        let mut header = String::new();
        if r.read_line(&mut header)? == 0 {
            return Err(Error::Parse("empty graph file".into()));
        }
        let mut it = header.split_whitespace();
        let n: usize = it
            .next()
            .ok_or_else(|| Error::Parse("missing vertex count".into()))?
            .parse()
            .map_err(|_| Error::Parse("bad vertex count".into()))?;
        let m: usize = it
            .next()
            .ok_or_else(|| Error::Parse("missing edge count".into()))?
            .parse()
            .map_err(|_| Error::Parse("bad edge count".into()))?;
        if it.next().is_some() {
            return Err(Error::Parse("trailing tokens on header line".into()));
        }
        let mut g = Graph::empty(n);
        let mut line = String::new();
        for i in 0..m {
            line.clear();
            if r.read_line(&mut line)? == 0 {
                return Err(Error::Parse(format!("expected {m} edges, found {i}")));
            }
            let mut it = line.split_whitespace();
            let (u, v) = match (it.next(), it.next(), it.next()) {
                (Some(u), Some(v), None) => (u, v),
                _ => return Err(Error::Parse(format!("malformed edge line {:?}", line.trim()))),
            };
            let u: usize = u.parse().map_err(|_| Error::Parse(format!("bad vertex {u:?}")))?;
            let v: usize = v.parse().map_err(|_| Error::Parse(format!("bad vertex {v:?}")))?;
            if u >= v {
                return Err(Error::Parse(format!(
                    "edge ({u}, {v}) must be written with u < v"
                )));
            }
            if v >= n {
                return Err(Error::Parse(format!("edge ({u}, {v}) out of range for n={n}")));
            }
            if g.has_edge(u, v) {
                return Err(Error::Parse(format!("duplicate edge ({u}, {v})")));
            }
            g.set_edge(u, v);
        }
        Ok(g)
    }

    pub fn from_text(s: &str) -> Result<Graph> {
        Graph::read_text(&mut s.as_bytes())
    }
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Graph(n={}, edges={:?})", self.n, self.edges())
    }
}

/// Parameters of a seeded G(n,p) draw. The probability is an exact rational
/// strictly between 0 and 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GnpParams {
    pub n: usize,
    pub p: Rational,
    pub seed: u64,
}

impl GnpParams {
    pub fn new(n: usize, p: Rational, seed: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::param("G(n,p) requires n >= 1"));
        }
        check_probability(&p)?;
        Ok(GnpParams { n, p, seed })
    }
}

pub(crate) fn check_probability(p: &Rational) -> Result<()> {
    use num_traits::{One, Zero};
    if p <= &Rational::zero() || p >= &Rational::one() {
        return Err(Error::param(format!(
            "edge probability must satisfy 0 < p < 1, got {p}"
        )));
    }
    Ok(())
}

/// Canonical index of the unordered pair `{u, v}` with `u < v`.
#[inline]
fn pair_index(u: usize, v: usize) -> u64 {
    debug_assert!(u < v);
    (v as u64) * (v as u64 - 1) / 2 + u as u64
}

/// Draws G(n,p). Each unordered pair `{u, v}` receives the coin
/// `stream_draw(seed, pair_index(u, v))` and the edge is present iff
/// `draw / 2^64 < p`, compared exactly. The coin of a pair depends only on
/// `(seed, pair_index)`, so identical parameters give byte-identical graphs
/// no matter how iteration is ordered.
pub fn sample_gnp(params: &GnpParams) -> Graph {
    let mut g = Graph::empty(params.n);
    let threshold = CoinThreshold::new(&params.p);
    for v in 1..params.n {
        for u in 0..v {
            if threshold.is_heads(stream_draw(params.seed, pair_index(u, v))) {
                g.set_edge(u, v);
            }
        }
    }
    g
}

/// Decides `draw / 2^64 < p` exactly. For small numerator/denominator the
/// comparison runs in u128; otherwise it falls back to big integers.
struct CoinThreshold {
    small: Option<(u128, u128)>, // (numer, denom), both < 2^63
    numer: BigUint,
    denom: BigUint,
}

impl CoinThreshold {
    fn new(p: &Rational) -> Self {
        let numer = p.numer().magnitude().clone();
        let denom = p.denom().magnitude().clone();
        let small = match (numer.to_u64(), denom.to_u64()) {
            (Some(n), Some(d)) if n < (1 << 63) && d < (1 << 63) => {
                Some((n as u128, d as u128))
            }
            _ => None,
        };
        CoinThreshold { small, numer, denom }
    }

    #[inline]
    fn is_heads(&self, draw: u64) -> bool {
        match self.small {
            // draw * denom < numer * 2^64
            Some((n, d)) => (draw as u128).checked_mul(d).map_or_else(
                || BigUint::from(draw) * &self.denom < &self.numer << 64u32,
                |lhs| lhs < n << 64,
            ),
            None => BigUint::from(draw) * &self.denom < &self.numer << 64u32,
        }
    }
}
