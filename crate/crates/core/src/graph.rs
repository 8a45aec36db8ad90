//! Graphs, sign matrices and the dictionary between them.
//!
//! A symmetric sign matrix `ε` with unit diagonal determines a simple graph
//! whose edges are the off-diagonal `+1` entries. Both directions of the
//! dictionary live here, together with the neighbourhood queries every other
//! module is built on.
//!
//! Vertices are 0-based inside the library. The text formats (`Display` /
//! `FromStr`) use 1-based labels.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

const WORD_BITS: usize = 64;

#[inline]
pub(crate) fn words_for(n: usize) -> usize {
    n.div_ceil(WORD_BITS)
}

/// A subset of `0..n`, bit-packed.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct VertexSet {
    n: usize,
    bits: Vec<u64>,
}

impl VertexSet {
    pub fn empty(n: usize) -> Self {
        VertexSet {
            n,
            bits: vec![0; words_for(n)],
        }
    }

    pub fn from_vertices(n: usize, vertices: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut set = Self::empty(n);
        for v in vertices {
            if v >= n {
                return Err(Error::VertexOutOfRange { vertex: v, n });
            }
            set.insert(v);
        }
        Ok(set)
    }

    pub(crate) fn from_words(n: usize, bits: Vec<u64>) -> Self {
        debug_assert_eq!(bits.len(), words_for(n));
        VertexSet { n, bits }
    }

    /// Size of the ambient vertex range.
    pub fn universe(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn contains(&self, v: usize) -> bool {
        v < self.n && self.bits[v / WORD_BITS] >> (v % WORD_BITS) & 1 == 1
    }

    #[inline]
    pub fn insert(&mut self, v: usize) {
        assert!(v < self.n, "vertex {v} out of range 0..{}", self.n);
        self.bits[v / WORD_BITS] |= 1 << (v % WORD_BITS);
    }

    #[inline]
    pub fn remove(&mut self, v: usize) {
        if v < self.n {
            self.bits[v / WORD_BITS] &= !(1 << (v % WORD_BITS));
        }
    }

    pub fn len(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.iter().all(|&w| w == 0)
    }

    /// Members in ascending order.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        iter_bits(&self.bits)
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }

    pub fn as_words(&self) -> &[u64] {
        &self.bits
    }
}

impl fmt::Debug for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

pub(crate) fn iter_bits(words: &[u64]) -> impl Iterator<Item = usize> + '_ {
    words.iter().enumerate().flat_map(|(i, &w)| {
        let mut rest = w;
        std::iter::from_fn(move || {
            if rest == 0 {
                None
            } else {
                let bit = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(i * WORD_BITS + bit)
            }
        })
    })
}

/// Old label -> new label after deleting vertices; `None` for deleted ones.
pub type Relabeling = Vec<Option<usize>>;

/// Simple undirected graph on `0..n` stored as bit-packed adjacency rows.
///
/// Invariants: no loops, symmetric rows, no bits set past `n`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    n: usize,
    words: usize,
    adj: Vec<u64>,
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        let words = words_for(n);
        Graph {
            n,
            words,
            adj: vec![0; n * words],
        }
    }

    pub fn complete(n: usize) -> Self {
        let mut g = Self::empty(n);
        for u in 0..n {
            for v in u + 1..n {
                g.add_edge(u, v);
            }
        }
        g
    }

    /// Builds a graph from 0-based edge pairs.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = Self::empty(n);
        for &(u, v) in edges {
            g.check_vertex(u)?;
            g.check_vertex(v)?;
            if u == v {
                return Err(Error::InvalidEpsilon(format!("loop at vertex {u}")));
            }
            g.add_edge(u, v);
        }
        Ok(g)
    }

    /// Builds a graph from 1-based edge pairs, the labelling used in figures
    /// and in the text formats.
    pub fn from_one_based_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let shifted = edges
            .iter()
            .map(|&(u, v)| {
                if u == 0 || v == 0 {
                    Err(Error::VertexOutOfRange { vertex: 0, n })
                } else {
                    Ok((u - 1, v - 1))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_edges(n, &shifted)
    }

    /// Graph whose edge set is given by `mask`, bit `k` standing for the
    /// `k`-th pair `(u, v)`, `u < v`, in lexicographic order.
    pub fn from_edge_mask(n: usize, mask: u64) -> Self {
        assert!(
            n * n.saturating_sub(1) / 2 <= 64,
            "edge mask only covers n <= 11"
        );
        let mut g = Self::empty(n);
        let mut k = 0;
        for u in 0..n {
            for v in u + 1..n {
                if mask >> k & 1 == 1 {
                    g.add_edge(u, v);
                }
                k += 1;
            }
        }
        g
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn check_vertex(&self, v: usize) -> Result<()> {
        if v < self.n {
            Ok(())
        } else {
            Err(Error::VertexOutOfRange {
                vertex: v,
                n: self.n,
            })
        }
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n && v < self.n && self.row(u)[v / WORD_BITS] >> (v % WORD_BITS) & 1 == 1
    }

    /// Raw adjacency row of `v`.
    #[inline]
    pub fn row(&self, v: usize) -> &[u64] {
        &self.adj[v * self.words..(v + 1) * self.words]
    }

    #[inline]
    fn set_bit(&mut self, u: usize, v: usize, on: bool) {
        let w = &mut self.adj[u * self.words + v / WORD_BITS];
        if on {
            *w |= 1 << (v % WORD_BITS);
        } else {
            *w &= !(1 << (v % WORD_BITS));
        }
    }

    pub(crate) fn add_edge(&mut self, u: usize, v: usize) {
        debug_assert!(u != v);
        self.set_bit(u, v, true);
        self.set_bit(v, u, true);
    }

    pub(crate) fn set_edge(&mut self, u: usize, v: usize, on: bool) {
        debug_assert!(u != v);
        self.set_bit(u, v, on);
        self.set_bit(v, u, on);
    }

    /// Replaces the neighbourhood of `v` by the bits in `row`, keeping the
    /// graph symmetric. The bit for `v` itself is ignored.
    pub(crate) fn set_row(&mut self, v: usize, row: &[u64]) {
        for w in 0..self.n {
            if w != v {
                let on = row[w / WORD_BITS] >> (w % WORD_BITS) & 1 == 1;
                self.set_edge(v, w, on);
            }
        }
    }

    pub fn neighborhood(&self, v: usize) -> Result<VertexSet> {
        self.check_vertex(v)?;
        Ok(VertexSet::from_words(self.n, self.row(v).to_vec()))
    }

    pub fn degree(&self, v: usize) -> usize {
        self.row(v).iter().map(|w| w.count_ones() as usize).sum()
    }

    #[inline]
    pub fn is_isolated(&self, v: usize) -> bool {
        self.row(v).iter().all(|&w| w == 0)
    }

    /// `N(u) = N(v)`.
    #[inline]
    pub fn same_neighborhood(&self, u: usize, v: usize) -> bool {
        self.row(u) == self.row(v)
    }

    /// Edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |u| iter_bits(self.row(u)).filter(move |&v| v > u).map(move |v| (u, v)))
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(|w| w.count_ones() as usize).sum::<usize>() / 2
    }

    /// `Iso(G)`.
    pub fn isolated_vertices(&self) -> VertexSet {
        let mut set = VertexSet::empty(self.n);
        for v in (0..self.n).filter(|&v| self.is_isolated(v)) {
            set.insert(v);
        }
        set
    }

    /// `i(G)`.
    pub fn isolated_count(&self) -> usize {
        (0..self.n).filter(|&v| self.is_isolated(v)).count()
    }

    pub fn is_isolated_edge(&self, v: usize, w: usize) -> bool {
        v != w && self.has_edge(v, w) && self.degree(v) == 1 && self.degree(w) == 1
    }

    /// Edges `vw` with `N(v) = {w}` and `N(w) = {v}`, lexicographic.
    pub fn isolated_edges(&self) -> Vec<(usize, usize)> {
        self.edges()
            .filter(|&(u, v)| self.degree(u) == 1 && self.degree(v) == 1)
            .collect()
    }

    /// Induced subgraph on the complement of `removed`, compacted to
    /// `0..n-|removed|` preserving relative order.
    pub fn remove_vertices(&self, removed: &VertexSet) -> (Graph, Relabeling) {
        let mut map = vec![None; self.n];
        let mut next = 0;
        for (v, slot) in map.iter_mut().enumerate() {
            if !removed.contains(v) {
                *slot = Some(next);
                next += 1;
            }
        }
        let mut sub = Graph::empty(next);
        for (u, v) in self.edges() {
            if let (Some(a), Some(b)) = (map[u], map[v]) {
                sub.add_edge(a, b);
            }
        }
        (sub, map)
    }

    /// Applies a vertex permutation: vertex `v` becomes `perm[v]`.
    pub fn permuted(&self, perm: &[usize]) -> Graph {
        assert_eq!(perm.len(), self.n);
        let mut g = Graph::empty(self.n);
        for (u, v) in self.edges() {
            g.add_edge(perm[u], perm[v]);
        }
        g
    }

    /// Stable 64-bit fingerprint of the adjacency structure.
    pub fn fingerprint(&self) -> u64 {
        let mut h = 0x9e37_79b9_7f4a_7c15u64 ^ self.n as u64;
        for &w in &self.adj {
            h = splitmix64(h ^ w);
        }
        h
    }
}

pub(crate) fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Graph(n={}, edges=[", self.n)?;
        for (i, (u, v)) in self.edges().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}{}", u + 1, v + 1)?;
        }
        write!(f, "])")
    }
}

/// Graph text format: `n <count>` then one `e <i> <j>` line per edge.
impl fmt::Display for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "n {}", self.n)?;
        for (u, v) in self.edges() {
            writeln!(f, "e {} {}", u + 1, v + 1)?;
        }
        Ok(())
    }
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        }
        .trim();
        (!line.is_empty()).then_some((i + 1, line))
    })
}

fn parse_label(token: &str, line: usize, n: usize) -> Result<usize> {
    let v: usize = token
        .parse()
        .map_err(|_| Error::parse(line, format!("expected a vertex label, found `{token}`")))?;
    if v == 0 || v > n {
        return Err(Error::parse(line, format!("vertex {v} outside 1..={n}")));
    }
    Ok(v - 1)
}

impl FromStr for Graph {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut lines = content_lines(text);
        let (line_no, header) = lines
            .next()
            .ok_or_else(|| Error::parse(1, "empty input, expected `n <count>`"))?;
        let mut tokens = header.split_whitespace();
        let n = match (tokens.next(), tokens.next(), tokens.next()) {
            (Some("n"), Some(count), None) => count
                .parse::<usize>()
                .map_err(|_| Error::parse(line_no, format!("bad vertex count `{count}`")))?,
            _ => return Err(Error::parse(line_no, "expected `n <count>`")),
        };
        let mut g = Graph::empty(n);
        for (line_no, line) in lines {
            let tokens: Vec<&str> = line.split_whitespace().collect();
            match tokens.as_slice() {
                ["e", a, b] => {
                    let u = parse_label(a, line_no, n)?;
                    let v = parse_label(b, line_no, n)?;
                    if u >= v {
                        return Err(Error::parse(
                            line_no,
                            format!("edge must satisfy i < j, got {} {}", u + 1, v + 1),
                        ));
                    }
                    g.add_edge(u, v);
                }
                _ => return Err(Error::parse(line_no, format!("expected `e <i> <j>`, found `{line}`"))),
            }
        }
        Ok(g)
    }
}

/// Symmetric `n×n` matrix of signs with unit diagonal.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct EpsilonMatrix {
    n: usize,
    entries: Vec<i8>,
}

impl EpsilonMatrix {
    /// Row-major entries; each must be `+1` or `-1`.
    pub fn new(n: usize, entries: Vec<i8>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidEpsilon("empty matrix".into()));
        }
        if entries.len() != n * n {
            return Err(Error::InvalidEpsilon(format!(
                "expected {} entries, got {}",
                n * n,
                entries.len()
            )));
        }
        for i in 0..n {
            if entries[i * n + i] != 1 {
                return Err(Error::InvalidEpsilon(format!("diagonal entry ({0},{0}) is not +1", i + 1)));
            }
            for j in 0..n {
                let e = entries[i * n + j];
                if e != 1 && e != -1 {
                    return Err(Error::InvalidEpsilon(format!("entry ({},{}) is not ±1", i + 1, j + 1)));
                }
                if e != entries[j * n + i] {
                    return Err(Error::InvalidEpsilon(format!(
                        "entries ({0},{1}) and ({1},{0}) differ",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        Ok(EpsilonMatrix { n, entries })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> i8 {
        self.entries[i * self.n + j]
    }
}

/// `+1`/`-1` tokens, one row per line.
impl fmt::Display for EpsilonMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.n {
            let row: Vec<&str> = (0..self.n)
                .map(|j| if self.get(i, j) == 1 { "+1" } else { "-1" })
                .collect();
            writeln!(f, "{}", row.join(" "))?;
        }
        Ok(())
    }
}

impl FromStr for EpsilonMatrix {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut rows: Vec<(usize, Vec<i8>)> = Vec::new();
        for (line_no, line) in content_lines(text) {
            let row = line
                .split_whitespace()
                .map(|t| match t {
                    "+1" | "1" => Ok(1),
                    "-1" => Ok(-1),
                    other => Err(Error::parse(line_no, format!("expected +1 or -1, found `{other}`"))),
                })
                .collect::<Result<Vec<i8>>>()?;
            rows.push((line_no, row));
        }
        let n = rows.len();
        if n == 0 {
            return Err(Error::parse(1, "empty sign matrix"));
        }
        let mut entries = Vec::with_capacity(n * n);
        for (line_no, row) in rows {
            if row.len() != n {
                return Err(Error::parse(
                    line_no,
                    format!("expected {n} entries, found {}", row.len()),
                ));
            }
            entries.extend(row);
        }
        EpsilonMatrix::new(n, entries)
    }
}

/// `G_ε`: edge `ij` iff `ε_ij = +1`, `i ≠ j`.
pub fn graph_from_epsilon(eps: &EpsilonMatrix) -> Graph {
    let mut g = Graph::empty(eps.n);
    for i in 0..eps.n {
        for j in i + 1..eps.n {
            if eps.get(i, j) == 1 {
                g.add_edge(i, j);
            }
        }
    }
    g
}

pub fn epsilon_from_graph(g: &Graph) -> EpsilonMatrix {
    let n = g.n();
    let mut entries = vec![-1i8; n * n];
    for i in 0..n {
        entries[i * n + i] = 1;
        for j in 0..n {
            if g.has_edge(i, j) {
                entries[i * n + j] = 1;
            }
        }
    }
    EpsilonMatrix { n, entries }
}

/// `G(a, b)`: edges `(0,1), (2,3), …, (2a-2, 2a-1)` followed by `b`
/// isolated vertices.
pub fn canonical_disjoint(a: usize, b: usize) -> Graph {
    let mut g = Graph::empty(2 * a + b);
    for i in 0..a {
        g.add_edge(2 * i, 2 * i + 1);
    }
    g
}

/// Parses either text format. Input whose first token is `n` is a graph,
/// anything else a sign matrix.
pub fn parse_input(text: &str) -> Result<Graph> {
    let first = content_lines(text)
        .next()
        .and_then(|(_, line)| line.split_whitespace().next());
    match first {
        Some("n") => text.parse(),
        Some(_) => text.parse::<EpsilonMatrix>().map(|eps| graph_from_epsilon(&eps)),
        None => Err(Error::parse(1, "empty input")),
    }
}
