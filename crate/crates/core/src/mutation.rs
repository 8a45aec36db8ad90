//! Mutation, relative mutation and the two vertex-deleting reductions, plus
//! the constructive reduction of any graph to the normal form `G(α, β)`.
//!
//! The free functions ([`mutate`], [`relative_mutate`], ...) are the raw
//! graph operations. [`Operation::apply_sound`] is the category-preserving
//! wrapper: it additionally refuses a relative mutation unless some isolated
//! vertex other than the two participants is present. Traces are always
//! replayed through the sound wrapper.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::graph::{canonical_disjoint, Graph, Relabeling, VertexSet};

/// `μ_v`: complements every edge incident to `v`.
pub fn mutate(g: &Graph, v: usize) -> Result<Graph> {
    g.check_vertex(v)?;
    let mut out = g.clone();
    for w in (0..g.n()).filter(|&w| w != v) {
        out.set_edge(v, w, !g.has_edge(v, w));
    }
    Ok(out)
}

/// `μ_{v←u}`: the new neighbourhood of `v` is `(N(u) Δ N(v)) ∖ {v}`.
pub fn relative_mutate(g: &Graph, v: usize, u: usize) -> Result<Graph> {
    g.check_vertex(v)?;
    g.check_vertex(u)?;
    if u == v {
        return Err(Error::EqualVertices(v));
    }
    let row: Vec<u64> = g.row(v).iter().zip(g.row(u)).map(|(a, b)| a ^ b).collect();
    let mut out = g.clone();
    out.set_row(v, &row);
    Ok(out)
}

/// Deletes both endpoints of the isolated edge `vw`.
pub fn knoerrer_reduce(g: &Graph, v: usize, w: usize) -> Result<(Graph, Relabeling)> {
    g.check_vertex(v)?;
    g.check_vertex(w)?;
    if !g.is_isolated_edge(v, w) {
        return Err(Error::NotIsolatedEdge(v, w));
    }
    Ok(g.remove_vertices(&VertexSet::from_vertices(g.n(), [v, w])?))
}

/// Deletes the isolated vertex `v`, given a second isolated vertex `w`.
pub fn two_points_reduce(g: &Graph, v: usize, w: usize) -> Result<(Graph, Relabeling)> {
    g.check_vertex(v)?;
    g.check_vertex(w)?;
    if v == w {
        return Err(Error::EqualVertices(v));
    }
    for x in [v, w] {
        if !g.is_isolated(x) {
            return Err(Error::NotIsolated(x));
        }
    }
    Ok(g.remove_vertices(&VertexSet::from_vertices(g.n(), [v])?))
}

/// Some isolated vertex outside `{v, u}`, if any.
pub fn isolated_witness(g: &Graph, v: usize, u: usize) -> Option<usize> {
    (0..g.n()).find(|&x| x != v && x != u && g.is_isolated(x))
}

/// Relative mutation restricted to the situations where it preserves the
/// stable category: an isolated vertex distinct from `v` and `u` must exist.
pub fn sound_relative_mutate(g: &Graph, v: usize, u: usize) -> Result<Graph> {
    let out = relative_mutate(g, v, u)?;
    if isolated_witness(g, v, u).is_none() {
        return Err(Error::MissingWitness(v, u));
    }
    Ok(out)
}

/// Mutates at every original neighbour of `v`, in ascending order. Each
/// mutation removes exactly one edge at `v`, so `v` ends up isolated.
pub fn isolate_vertex(g: &Graph, v: usize) -> Result<(Graph, Vec<Operation>)> {
    let neighbors = g.neighborhood(v)?;
    let mut cur = g.clone();
    let mut ops = Vec::with_capacity(neighbors.len());
    for u in neighbors.iter() {
        cur = mutate(&cur, u)?;
        ops.push(Operation::Mutate(u));
    }
    debug_assert!(cur.is_isolated(v));
    Ok((cur, ops))
}

/// One step of a reduction. Labels refer to the graph the step is applied
/// to; after a vertex-deleting step the survivors are renumbered compactly.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Operation {
    Mutate(usize),
    RelativeMutate { target: usize, reference: usize },
    Knoerrer(usize, usize),
    TwoPoints { removed: usize, kept: usize },
}

impl Operation {
    /// Factor by which the step multiplies the number of copies of the
    /// remaining category: 2 for a two points reduction, 1 otherwise.
    pub fn multiplier(&self) -> u32 {
        match self {
            Operation::TwoPoints { .. } => 2,
            _ => 1,
        }
    }

    /// Applies the bare graph operation. Relative mutation is not checked
    /// for an isolated witness.
    pub fn apply_raw(&self, g: &Graph) -> Result<Graph> {
        match *self {
            Operation::Mutate(v) => mutate(g, v),
            Operation::RelativeMutate { target, reference } => relative_mutate(g, target, reference),
            Operation::Knoerrer(v, w) => knoerrer_reduce(g, v, w).map(|(h, _)| h),
            Operation::TwoPoints { removed, kept } => two_points_reduce(g, removed, kept).map(|(h, _)| h),
        }
    }

    /// Applies the step only when its category-preserving hypothesis holds.
    pub fn apply_sound(&self, g: &Graph) -> Result<Graph> {
        match *self {
            Operation::RelativeMutate { target, reference } => sound_relative_mutate(g, target, reference),
            _ => self.apply_raw(g),
        }
    }
}

impl fmt::Display for Operation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Operation::Mutate(v) => write!(f, "mu {}", v + 1),
            Operation::RelativeMutate { target, reference } => {
                write!(f, "rmu {} <- {}", target + 1, reference + 1)
            }
            Operation::Knoerrer(v, w) => write!(f, "knoerrer {} {}", v + 1, w + 1),
            Operation::TwoPoints { removed, kept } => write!(f, "twopoints {} {}", removed + 1, kept + 1),
        }
    }
}

fn parse_vertex(token: &str) -> std::result::Result<usize, String> {
    match token.parse::<usize>() {
        Ok(v) if v >= 1 => Ok(v - 1),
        _ => Err(format!("expected a 1-based vertex label, found `{token}`")),
    }
}

impl FromStr for Operation {
    type Err = String;

    fn from_str(line: &str) -> std::result::Result<Self, String> {
        let tokens: Vec<&str> = line.split_whitespace().collect();
        match tokens.as_slice() {
            ["mu", v] => Ok(Operation::Mutate(parse_vertex(v)?)),
            ["rmu", v, "<-", u] => Ok(Operation::RelativeMutate {
                target: parse_vertex(v)?,
                reference: parse_vertex(u)?,
            }),
            ["knoerrer", v, w] => Ok(Operation::Knoerrer(parse_vertex(v)?, parse_vertex(w)?)),
            ["twopoints", v, w] => Ok(Operation::TwoPoints {
                removed: parse_vertex(v)?,
                kept: parse_vertex(w)?,
            }),
            _ => Err(format!("unrecognised step `{line}`")),
        }
    }
}

/// Parses the trace text format, one step per line; blank lines and `#`
/// comments are skipped.
pub fn parse_steps(text: &str) -> Result<Vec<Operation>> {
    let mut steps = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        steps.push(line.parse().map_err(|m: String| Error::parse(i + 1, m))?);
    }
    Ok(steps)
}

pub fn format_steps(steps: &[Operation]) -> String {
    steps.iter().map(|op| format!("{op}\n")).collect()
}

/// Audit trail of a reduction: the starting graph, the applied steps and
/// the graph they produce.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionTrace {
    initial: Graph,
    steps: Vec<Operation>,
    final_graph: Graph,
}

impl ReductionTrace {
    pub fn new(initial: Graph) -> Self {
        ReductionTrace {
            final_graph: initial.clone(),
            initial,
            steps: Vec::new(),
        }
    }

    /// Assembles a trace from parts and checks that the steps replay to
    /// `final_graph`.
    pub fn from_parts(initial: Graph, steps: Vec<Operation>, final_graph: Graph) -> Result<Self> {
        let trace = ReductionTrace {
            initial,
            steps,
            final_graph,
        };
        let replayed = replay(&trace)?;
        if replayed != trace.final_graph {
            return Err(Error::InternalInconsistency(
                "trace does not replay to its final graph".into(),
            ));
        }
        Ok(trace)
    }

    /// Appends a step, applying it through the sound wrapper.
    pub fn push(&mut self, op: Operation) -> Result<()> {
        self.final_graph = op.apply_sound(&self.final_graph).map_err(|e| Error::InapplicableStep {
            index: self.steps.len() + 1,
            step: op.to_string(),
            reason: e.to_string(),
        })?;
        self.steps.push(op);
        Ok(())
    }

    pub fn initial(&self) -> &Graph {
        &self.initial
    }

    pub fn steps(&self) -> &[Operation] {
        &self.steps
    }

    pub fn final_graph(&self) -> &Graph {
        &self.final_graph
    }

    /// Exponent `e` of the accumulated multiplier `2^e`.
    pub fn multiplier_exponent(&self) -> usize {
        self.steps.iter().filter(|op| op.multiplier() == 2).count()
    }

    /// Steps in the trace text format.
    pub fn to_text(&self) -> String {
        format_steps(&self.steps)
    }
}

/// Replays `trace.steps` from `trace.initial`, applying each step soundly.
pub fn replay(trace: &ReductionTrace) -> Result<Graph> {
    replay_steps(&trace.initial, &trace.steps)
}

pub fn replay_steps(initial: &Graph, steps: &[Operation]) -> Result<Graph> {
    let mut cur = initial.clone();
    for (i, op) in steps.iter().enumerate() {
        cur = op.apply_sound(&cur).map_err(|e| Error::InapplicableStep {
            index: i + 1,
            step: op.to_string(),
            reason: e.to_string(),
        })?;
    }
    Ok(cur)
}

/// Result of [`reduce_to_normal_form`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalForm {
    pub alpha: usize,
    pub beta: usize,
    pub trace: ReductionTrace,
    /// `bijection[v]` is the vertex of `canonical_disjoint(alpha, beta)`
    /// that vertex `v` of the trace's final graph corresponds to.
    pub bijection: Vec<usize>,
}

/// Vertex the reduction isolates first: minimum degree, lowest label on
/// ties. An already isolated vertex costs no mutations.
pub fn choose_pivot(g: &Graph) -> usize {
    (0..g.n()).min_by_key(|&v| (g.degree(v), v)).expect("non-empty graph")
}

/// Reduces `g` to `G(α, β)` by mutations followed by relative mutations.
///
/// The pivot is isolated by mutating at its neighbours. The remaining
/// vertices are then absorbed one at a time in ascending order. When `v`
/// is absorbed, the absorbed part is a perfect matching plus isolated
/// vertices, and `v`'s edges into it are cleared as follows:
///
/// 1. `v` sees one end of a matched pair `xy`: mutate `v` relative to the
///    other end.
/// 2. `v` sees both ends `x < y`: mutate `v` relative to `x`, then `y`.
/// 3. `v` sees isolated vertices `z_1 < … < z_r`: mutate each `z_j`,
///    `j ≥ 2`, relative to `z_1`, leaving the single edge `v z_1`.
///
/// The pivot stays isolated throughout, which makes every relative
/// mutation sound.
pub fn reduce_to_normal_form(g: &Graph) -> Result<NormalForm> {
    let n = g.n();
    if n == 0 {
        return Err(Error::EmptyGraph);
    }
    let pivot = choose_pivot(g);
    let (_, isolating) = isolate_vertex(g, pivot)?;
    let mut trace = ReductionTrace::new(g.clone());
    for op in isolating {
        trace.push(op)?;
    }

    let mut partner: Vec<Option<usize>> = vec![None; n];
    let mut absorbed = vec![false; n];
    absorbed[pivot] = true;

    for v in (0..n).filter(|&v| v != pivot) {
        let cur = trace.final_graph().clone();
        let mut one_end = Vec::new();
        let mut both_ends = Vec::new();
        let mut lonely = Vec::new();
        for x in (0..n).filter(|&x| absorbed[x]) {
            match partner[x] {
                None => {
                    if cur.has_edge(v, x) {
                        lonely.push(x);
                    }
                }
                Some(y) if x < y => match (cur.has_edge(v, x), cur.has_edge(v, y)) {
                    (true, false) => one_end.push(y),
                    (false, true) => one_end.push(x),
                    (true, true) => both_ends.extend([x, y]),
                    (false, false) => {}
                },
                Some(_) => {}
            }
        }
        for reference in one_end.into_iter().chain(both_ends) {
            trace.push(Operation::RelativeMutate { target: v, reference })?;
        }
        if let Some((&anchor, rest)) = lonely.split_first() {
            for &z in rest {
                trace.push(Operation::RelativeMutate {
                    target: z,
                    reference: anchor,
                })?;
            }
            partner[v] = Some(anchor);
            partner[anchor] = Some(v);
        }
        absorbed[v] = true;
    }

    let finished = trace.final_graph();
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    let mut singles = Vec::new();
    for (v, &p) in partner.iter().enumerate() {
        match p {
            Some(w) if v < w => pairs.push((v, w)),
            Some(_) => {}
            None => singles.push(v),
        }
    }
    let alpha = pairs.len();
    let beta = singles.len();
    let mut bijection = vec![0; n];
    for (i, &(v, w)) in pairs.iter().enumerate() {
        bijection[v] = 2 * i;
        bijection[w] = 2 * i + 1;
    }
    for (j, &v) in singles.iter().enumerate() {
        bijection[v] = 2 * alpha + j;
    }
    if beta == 0 || finished.permuted(&bijection) != canonical_disjoint(alpha, beta) {
        return Err(Error::InternalInconsistency(format!(
            "reduction of {g:?} ended in {finished:?}, not G({alpha},{beta})"
        )));
    }
    Ok(NormalForm {
        alpha,
        beta,
        trace,
        bijection,
    })
}

/// Continues the normal form down to a single vertex: Knörrer reductions on
/// every isolated edge, then two points reductions keeping the smallest
/// isolated vertex. The trace's multiplier exponent is `β - 1`.
pub fn reduce_to_point(g: &Graph) -> Result<ReductionTrace> {
    let mut trace = reduce_to_normal_form(g)?.trace;
    while let Some(&(v, w)) = trace.final_graph().isolated_edges().first() {
        trace.push(Operation::Knoerrer(v, w))?;
    }
    loop {
        let iso = trace.final_graph().isolated_vertices().to_vec();
        match (iso.first(), iso.last()) {
            (Some(&kept), Some(&removed)) if kept != removed => {
                trace.push(Operation::TwoPoints { removed, kept })?;
            }
            _ => break,
        }
    }
    Ok(trace)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::canonical_disjoint;

    fn g1(n: usize, edges: &[(usize, usize)]) -> Graph {
        Graph::from_one_based_edges(n, edges).unwrap()
    }

    fn square_with_tail() -> Graph {
        g1(5, &[(1, 2), (2, 3), (3, 4), (4, 1), (1, 5)])
    }

    #[test]
    fn mutation_worked_example() {
        let g = g1(5, &[(1, 2), (1, 3), (1, 5), (2, 4), (3, 4), (4, 5)]);
        assert_eq!(mutate(&g, 0).unwrap(), g1(5, &[(1, 4), (2, 4), (3, 4), (4, 5)]));
    }

    #[test]
    fn mutation_is_involution_on_example() {
        let g = square_with_tail();
        assert_eq!(mutate(&mutate(&g, 1).unwrap(), 1).unwrap(), g);
    }

    #[test]
    fn mutation_of_empty_graph_is_star() {
        assert_eq!(mutate(&Graph::empty(4), 2).unwrap(), g1(4, &[(1, 3), (2, 3), (3, 4)]));
        assert!(matches!(mutate(&Graph::empty(4), 4), Err(Error::VertexOutOfRange { .. })));
    }

    #[test]
    fn relative_mutation_worked_examples() {
        let g = g1(6, &[(1, 3), (1, 5), (2, 3), (2, 4), (3, 5), (4, 5)]);
        assert_eq!(
            relative_mutate(&g, 0, 1).unwrap(),
            g1(6, &[(1, 4), (1, 5), (2, 3), (2, 4), (3, 5), (4, 5)])
        );

        let g = g1(6, &[(2, 3), (3, 4), (4, 2), (2, 5), (5, 6), (6, 2)]);
        let mid = relative_mutate(&g, 1, 2).unwrap();
        // N(3) = {2,4}, N(2) = {3,4,5,6}: the new N(2) is {3,5,6} once 2 itself is dropped.
        assert_eq!(mid, g1(6, &[(2, 3), (3, 4), (2, 5), (5, 6), (2, 6)]));
        let end = relative_mutate(&mid, 1, 3).unwrap();
        assert_eq!(end, g1(6, &[(3, 4), (2, 5), (5, 6), (2, 6)]));
    }

    #[test]
    fn relative_mutation_equal_neighborhoods_isolates() {
        let g = g1(5, &[(1, 3), (1, 4), (2, 3), (2, 4)]);
        let h = relative_mutate(&g, 0, 1).unwrap();
        assert!(h.is_isolated(0));
        assert!(matches!(relative_mutate(&g, 2, 2), Err(Error::EqualVertices(2))));
    }

    #[test]
    fn sound_relative_mutation_needs_witness() {
        let path = g1(3, &[(1, 2), (2, 3)]);
        assert!(matches!(sound_relative_mutate(&path, 0, 2), Err(Error::MissingWitness(0, 2))));
        let with_iso = g1(4, &[(1, 2), (2, 3)]);
        assert!(sound_relative_mutate(&with_iso, 0, 2).unwrap().is_isolated(0));
    }

    #[test]
    fn knoerrer_examples() {
        let (g, map) = knoerrer_reduce(&canonical_disjoint(1, 3), 0, 1).unwrap();
        assert_eq!(g, canonical_disjoint(0, 3));
        assert_eq!(map, vec![None, None, Some(0), Some(1), Some(2)]);
        let (g, _) = knoerrer_reduce(&canonical_disjoint(2, 0), 2, 3).unwrap();
        assert_eq!(g, canonical_disjoint(1, 0));
        let path = g1(3, &[(1, 2), (2, 3)]);
        assert!(matches!(knoerrer_reduce(&path, 0, 1), Err(Error::NotIsolatedEdge(0, 1))));
    }

    #[test]
    fn two_points_examples() {
        assert_eq!(two_points_reduce(&canonical_disjoint(0, 3), 2, 1).unwrap().0, canonical_disjoint(0, 2));
        assert_eq!(two_points_reduce(&canonical_disjoint(1, 3), 4, 3).unwrap().0, canonical_disjoint(1, 2));
        assert!(matches!(
            two_points_reduce(&canonical_disjoint(1, 1), 2, 0),
            Err(Error::NotIsolated(0))
        ));
    }

    #[test]
    fn isolate_vertex_examples() {
        let g = g1(5, &[(1, 3), (3, 5), (5, 2), (2, 4), (4, 1), (3, 4)]);
        let (h, ops) = isolate_vertex(&g, 0).unwrap();
        assert_eq!(ops, vec![Operation::Mutate(2), Operation::Mutate(3)]);
        assert_eq!(h, g1(5, &[(2, 3), (3, 4), (4, 5), (5, 2)]));

        let iso = canonical_disjoint(1, 1);
        let (h, ops) = isolate_vertex(&iso, 2).unwrap();
        assert!(ops.is_empty());
        assert_eq!(h, iso);

        // μ_2(K_3) = {13}, then μ_3 gives {23}.
        let (h, ops) = isolate_vertex(&Graph::complete(3), 0).unwrap();
        assert_eq!(ops, vec![Operation::Mutate(1), Operation::Mutate(2)]);
        assert_eq!(h, g1(3, &[(2, 3)]));
    }

    #[test]
    fn normal_form_square_with_tail() {
        let nf = reduce_to_normal_form(&square_with_tail()).unwrap();
        assert_eq!((nf.alpha, nf.beta), (1, 3));
        assert_eq!(nf.trace.to_text(), "mu 1\nrmu 2 <- 1\nrmu 4 <- 1\n");
        assert_eq!(*nf.trace.final_graph(), g1(5, &[(1, 3)]));
        assert_eq!(nf.trace.final_graph().permuted(&nf.bijection), canonical_disjoint(1, 3));
    }

    #[test]
    fn normal_form_small_cases() {
        let nf = reduce_to_normal_form(&Graph::empty(1)).unwrap();
        assert_eq!((nf.alpha, nf.beta), (0, 1));
        assert!(nf.trace.steps().is_empty());

        let nf = reduce_to_normal_form(&Graph::complete(2)).unwrap();
        assert_eq!((nf.alpha, nf.beta), (0, 2));
        assert_eq!(nf.trace.steps(), &[Operation::Mutate(1)]);

        let nf = reduce_to_normal_form(&canonical_disjoint(2, 2)).unwrap();
        assert_eq!((nf.alpha, nf.beta), (2, 2));
        assert!(nf.trace.steps().is_empty());

        assert!(matches!(reduce_to_normal_form(&Graph::empty(0)), Err(Error::EmptyGraph)));
    }

    #[test]
    fn normal_form_exhaustive_small() {
        for n in 1..=6usize {
            for mask in 0..1u64 << (n * (n - 1) / 2) {
                let g = Graph::from_edge_mask(n, mask);
                let nf = reduce_to_normal_form(&g).unwrap();
                assert_eq!(2 * nf.alpha + nf.beta, n);
                assert!(nf.beta >= 1);
                assert_eq!(replay(&nf.trace).unwrap(), *nf.trace.final_graph());
            }
        }
    }

    #[test]
    fn point_reduction_multiplier() {
        let g = square_with_tail();
        let trace = reduce_to_point(&g).unwrap();
        assert_eq!(trace.final_graph().n(), 1);
        assert_eq!(trace.multiplier_exponent(), 2);
        assert_eq!(
            trace.to_text(),
            "mu 1\nrmu 2 <- 1\nrmu 4 <- 1\nknoerrer 1 3\ntwopoints 3 1\ntwopoints 2 1\n"
        );
    }

    #[test]
    fn replay_rejects_corrupted_trace() {
        let empty = ReductionTrace::new(square_with_tail());
        assert_eq!(replay(&empty).unwrap(), square_with_tail());

        let steps = vec![Operation::Knoerrer(0, 1)];
        let err = replay_steps(&square_with_tail(), &steps).unwrap_err();
        assert!(matches!(err, Error::InapplicableStep { index: 1, .. }), "{err}");

        let err = ReductionTrace::from_parts(square_with_tail(), vec![Operation::Mutate(0)], square_with_tail())
            .unwrap_err();
        assert!(matches!(err, Error::InternalInconsistency(_)));
    }

    #[test]
    fn trace_text_round_trip() {
        let text = "mu 1\nrmu 2 <- 1\nknoerrer 3 4\ntwopoints 5 2\n";
        let steps = parse_steps(text).unwrap();
        assert_eq!(
            steps,
            vec![
                Operation::Mutate(0),
                Operation::RelativeMutate { target: 1, reference: 0 },
                Operation::Knoerrer(2, 3),
                Operation::TwoPoints { removed: 4, kept: 1 },
            ]
        );
        assert_eq!(format_steps(&steps), text);
        assert!(matches!(parse_steps("mu 1\nrmu 2 1\n"), Err(Error::Parse { line: 2, .. })));
        assert!(parse_steps("mu 0").is_err());
    }
}
