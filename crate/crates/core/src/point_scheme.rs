//! Stanley–Reisner analysis of the point scheme.
//!
//! The point scheme is cut out by the cubic monomials `x_i x_j x_k` over the
//! triples whose three signs multiply to `-1`. In graph terms these are the
//! triples spanning zero or two edges. The simplicial complex `Δ_G` has
//! those triples as its minimal non-faces, and every coordinate-subspace
//! component of the scheme corresponds to a facet of `Δ_G`. `ℓ(G)` counts
//! the facets with two vertices, i.e. the components isomorphic to `P^1`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::classify::classify;
use crate::error::{Error, Result};
use crate::graph::{epsilon_from_graph, EpsilonMatrix, Graph, VertexSet};
use crate::mutation::{sound_relative_mutate, Operation};

/// Components are enumerated only up to this many vertices by default.
pub const DEFAULT_COMPONENT_CAP: usize = 12;

pub fn choose2(k: usize) -> usize {
    k * k.saturating_sub(1) / 2
}

/// Generator test by edges: no edges among the three pairs, or two edges
/// meeting at the vertex opposite the missing one.
#[inline]
pub fn is_generator(g: &Graph, i: usize, j: usize, k: usize) -> bool {
    let (ij, ik, jk) = (g.has_edge(i, j), g.has_edge(i, k), g.has_edge(j, k));
    let none = !ij && !ik && !jk;
    let two = (ij && ik && !jk) || (ij && jk && !ik) || (ik && jk && !ij);
    none || two
}

/// Generator test by signs: `ε_ij ε_jk ε_ki = -1`.
#[inline]
pub fn is_generator_by_signs(eps: &EpsilonMatrix, i: usize, j: usize, k: usize) -> bool {
    eps.get(i, j) * eps.get(j, k) * eps.get(k, i) == -1
}

/// Sorted set of triples `i < j < k`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct TripleSet(Vec<[usize; 3]>);

impl TripleSet {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, t: [usize; 3]) -> bool {
        let mut t = t;
        t.sort_unstable();
        self.0.binary_search(&t).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = &[usize; 3]> {
        self.0.iter()
    }
}

/// Minimal generators of `I_G`.
pub fn sr_generators(g: &Graph) -> TripleSet {
    let n = g.n();
    let mut triples = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                if is_generator(g, i, j, k) {
                    triples.push([i, j, k]);
                }
            }
        }
    }
    if cfg!(debug_assertions) {
        let eps = epsilon_from_graph(g);
        let mut by_signs = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    if is_generator_by_signs(&eps, i, j, k) {
                        by_signs.push([i, j, k]);
                    }
                }
            }
        }
        assert_eq!(triples, by_signs, "edge and sign descriptions of I_G disagree");
    }
    TripleSet(triples)
}

/// Whether `{i, j}` is a facet of `Δ_G`: every triple through it is a
/// generator. Always false below three vertices.
pub fn is_p1_facet(g: &Graph, i: usize, j: usize) -> bool {
    let n = g.n();
    if n < 3 || i == j || i >= n || j >= n {
        return false;
    }
    (0..n).filter(|&k| k != i && k != j).all(|k| is_generator(g, i, j, k))
}

/// Below three vertices there are no cubic generators and the pair count
/// is meaningless; the counting functions then return zero.
pub fn is_degenerate(g: &Graph) -> bool {
    g.n() < 3
}

/// Facets `{i, j}`, `i < j`, lexicographic.
pub fn p1_facets(g: &Graph) -> Vec<(usize, usize)> {
    let n = g.n();
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if is_p1_facet(g, i, j) {
                out.push((i, j));
            }
        }
    }
    out
}

/// `ℓ(G)`.
pub fn count_p1_components(g: &Graph) -> usize {
    p1_facets(g).len()
}

/// `J(G)`: pairs with equal, non-empty neighbourhoods, lexicographic.
pub fn j_pairs(g: &Graph) -> Vec<(usize, usize)> {
    let n = g.n();
    let mut out = Vec::new();
    for i in 0..n {
        if g.is_isolated(i) {
            continue;
        }
        for j in i + 1..n {
            if g.same_neighborhood(i, j) {
                out.push((i, j));
            }
        }
    }
    out
}

/// `j(G) + C(i(G), 2)`, valid when `G` has an isolated vertex.
pub fn ell_closed_form(g: &Graph) -> Result<usize> {
    let iso = g.isolated_count();
    if iso == 0 {
        return Err(Error::NoIsolatedVertex);
    }
    Ok(j_pairs(g).len() + choose2(iso))
}

/// An irreducible component `V(x_i : i ∉ F)` for a facet `F`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Component {
    pub facet: VertexSet,
    /// Projective dimension, `|F| - 1`.
    pub dimension: usize,
}

impl fmt::Display for Component {
    /// Component notation with 1-based coordinates, e.g. `V(x_1,x_2,x_5)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.facet.universe();
        let vanishing: Vec<String> = (0..n)
            .filter(|&v| !self.facet.contains(v))
            .map(|v| format!("x_{}", v + 1))
            .collect();
        if vanishing.is_empty() {
            write!(f, "P^{}", n.saturating_sub(1))
        } else {
            write!(f, "V({})", vanishing.join(","))
        }
    }
}

pub fn components(g: &Graph) -> Result<Vec<Component>> {
    components_with_cap(g, DEFAULT_COMPONENT_CAP)
}

/// All facets of `Δ_G` in lexicographic order of their sorted vertices.
pub fn components_with_cap(g: &Graph, cap: usize) -> Result<Vec<Component>> {
    let n = g.n();
    if n > cap {
        return Err(Error::CapExceeded { n, cap });
    }
    let mut facets = Vec::new();
    let mut face = Vec::with_capacity(n);
    let candidates: Vec<usize> = (0..n).collect();
    extend_faces(g, &mut face, &candidates, &mut facets);
    Ok(facets
        .into_iter()
        .map(|f: Vec<usize>| Component {
            dimension: f.len().saturating_sub(1),
            facet: VertexSet::from_vertices(n, f).expect("in range"),
        })
        .collect())
}

fn can_join(g: &Graph, face: &[usize], x: usize) -> bool {
    face.iter()
        .enumerate()
        .all(|(a, &p)| face[a + 1..].iter().all(|&q| !is_generator(g, p, q, x)))
}

/// Depth-first walk over the faces containing `face`, extended only by
/// `candidates` (all larger than the faces' current members). Maximal
/// faces are recorded.
fn extend_faces(g: &Graph, face: &mut Vec<usize>, candidates: &[usize], out: &mut Vec<Vec<usize>>) {
    let maximal = (0..g.n()).all(|x| face.contains(&x) || !can_join(g, face, x));
    if maximal {
        out.push(face.clone());
        return;
    }
    for (idx, &x) in candidates.iter().enumerate() {
        face.push(x);
        let next: Vec<usize> = candidates[idx + 1..]
            .iter()
            .copied()
            .filter(|&y| can_join(g, face, y))
            .collect();
        extend_faces(g, face, &next, out);
        face.pop();
    }
}

/// Outcome of one step of the `J(G)` reduction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JReduction {
    pub graph: Graph,
    /// The pair of `J(G)` the step started from.
    pub pair: (usize, usize),
    /// `u_1` followed by every other vertex sharing its neighbourhood.
    pub class: Vec<usize>,
    pub ops: Vec<Operation>,
}

impl JReduction {
    /// Size `m` of the neighbourhood class that was collapsed.
    pub fn m(&self) -> usize {
        self.class.len()
    }
}

/// Takes the smallest pair `{u_1, u_2}` of `J(G)`, collects every `u_i` with
/// `N(u_i) = N(u_1)` and applies `μ_{u_i←u_1}` in ascending order. Those
/// `u_i` become isolated.
pub fn j_reduction_step(g: &Graph) -> Result<JReduction> {
    if g.isolated_count() == 0 {
        return Err(Error::NoIsolatedVertex);
    }
    let pair = *j_pairs(g).first().ok_or(Error::JZero)?;
    let anchor = pair.0;
    let class: Vec<usize> = (anchor..g.n())
        .filter(|&x| x == anchor || g.same_neighborhood(anchor, x))
        .collect();
    let mut cur = g.clone();
    let mut ops = Vec::with_capacity(class.len() - 1);
    for &x in &class[1..] {
        cur = sound_relative_mutate(&cur, x, anchor)?;
        ops.push(Operation::RelativeMutate {
            target: x,
            reference: anchor,
        });
    }
    Ok(JReduction {
        graph: cur,
        pair,
        class,
        ops,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointSchemeReport {
    pub n: usize,
    pub generators: TripleSet,
    pub ell: usize,
    pub j_pairs: Vec<(usize, usize)>,
    pub j_count: usize,
    pub iso_count: usize,
    pub p1_facets: Vec<(usize, usize)>,
    pub r: usize,
    /// `C(r+1, 2)`.
    pub bound: usize,
    pub bound_holds: bool,
}

/// Assembles the `P^1`-component count together with the bound
/// `ℓ ≤ C(r+1, 2)`. With an isolated vertex present the facet count is
/// cross-checked against the closed form.
pub fn theorem4_report(g: &Graph) -> Result<PointSchemeReport> {
    let n = g.n();
    if n < 3 {
        return Err(Error::TooFewVertices(n));
    }
    let p1 = p1_facets(g);
    let ell = p1.len();
    let jp = j_pairs(g);
    let iso = g.isolated_count();
    if iso > 0 {
        let closed = jp.len() + choose2(iso);
        if closed != ell {
            return Err(Error::InternalInconsistency(format!(
                "facet count {ell} differs from j(G) + C(i(G),2) = {closed} for {g:?}"
            )));
        }
    }
    let r = classify(g)?.r;
    let bound = choose2(r + 1);
    Ok(PointSchemeReport {
        n,
        generators: sr_generators(g),
        ell,
        j_count: jp.len(),
        j_pairs: jp,
        iso_count: iso,
        p1_facets: p1,
        r,
        bound,
        bound_holds: ell <= bound,
    })
}

/// JSON shape of a [`PointSchemeReport`], 1-based labels.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointSchemeJson {
    pub n: usize,
    pub generators: Vec<[usize; 3]>,
    pub ell: usize,
    pub j_pairs: Vec<[usize; 2]>,
    pub j_count: usize,
    pub iso_count: usize,
    pub p1_facets: Vec<[usize; 2]>,
    pub r: usize,
    pub bound: usize,
    pub bound_holds: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub components: Option<Vec<ComponentJson>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentJson {
    pub facet: Vec<usize>,
    pub dimension: usize,
    pub label: String,
}

impl From<&Component> for ComponentJson {
    fn from(c: &Component) -> Self {
        ComponentJson {
            facet: c.facet.iter().map(|v| v + 1).collect(),
            dimension: c.dimension,
            label: c.to_string(),
        }
    }
}

fn pairs_one_based(pairs: &[(usize, usize)]) -> Vec<[usize; 2]> {
    pairs.iter().map(|&(a, b)| [a + 1, b + 1]).collect()
}

impl From<&PointSchemeReport> for PointSchemeJson {
    fn from(r: &PointSchemeReport) -> Self {
        PointSchemeJson {
            n: r.n,
            generators: r.generators.iter().map(|t| t.map(|v| v + 1)).collect(),
            ell: r.ell,
            j_pairs: pairs_one_based(&r.j_pairs),
            j_count: r.j_count,
            iso_count: r.iso_count,
            p1_facets: pairs_one_based(&r.p1_facets),
            r: r.r,
            bound: r.bound,
            bound_holds: r.bound_holds,
            components: None,
        }
    }
}

/// `{{1,3},{2,4}}`.
pub fn format_pairs(pairs: &[(usize, usize)]) -> String {
    let inner: Vec<String> = pairs.iter().map(|&(a, b)| format!("{{{},{}}}", a + 1, b + 1)).collect();
    format!("{{{}}}", inner.join(","))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::canonical_disjoint;

    fn g1(n: usize, edges: &[(usize, usize)]) -> Graph {
        Graph::from_one_based_edges(n, edges).unwrap()
    }

    fn square_plus_two() -> Graph {
        g1(6, &[(1, 2), (2, 3), (3, 4), (4, 1)])
    }

    /// Facets by brute force over all subsets; test-only oracle.
    fn brute_facets(g: &Graph) -> Vec<Vec<usize>> {
        let n = g.n();
        let is_face = |s: u32| {
            let vs: Vec<usize> = (0..n).filter(|&v| s >> v & 1 == 1).collect();
            vs.iter().enumerate().all(|(a, &i)| {
                vs[a + 1..]
                    .iter()
                    .enumerate()
                    .all(|(b, &j)| vs[a + b + 2..].iter().all(|&k| !is_generator(g, i, j, k)))
            })
        };
        let faces: Vec<u32> = (0u32..1 << n).filter(|&s| is_face(s)).collect();
        let mut facets: Vec<Vec<usize>> = faces
            .iter()
            .filter(|&&s| !faces.iter().any(|&t| t != s && t & s == s))
            .map(|&s| (0..n).filter(|&v| s >> v & 1 == 1).collect())
            .collect();
        facets.sort();
        facets
    }

    #[test]
    fn generators_examples() {
        assert!(sr_generators(&Graph::complete(5)).is_empty());
        let empty = sr_generators(&Graph::empty(4));
        assert_eq!(empty.len(), 4);
        let g = square_plus_two();
        let gens = sr_generators(&g);
        // {1,2,3}: edges 12, 23 meeting at 2, missing 13 -> generator.
        assert!(gens.contains([0, 1, 2]));
        // {1,2,5}: a single edge -> not a generator.
        assert!(!gens.contains([0, 1, 4]));
        assert!(gens.contains([0, 4, 5]));
    }

    #[test]
    fn generator_routes_agree_exhaustively() {
        for n in 3..=6usize {
            for mask in 0..1u64 << (n * (n - 1) / 2) {
                let g = Graph::from_edge_mask(n, mask);
                let eps = epsilon_from_graph(&g);
                for i in 0..n {
                    for j in i + 1..n {
                        for k in j + 1..n {
                            assert_eq!(is_generator(&g, i, j, k), is_generator_by_signs(&eps, i, j, k));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn p1_facet_examples() {
        let g = square_plus_two();
        assert!(is_p1_facet(&g, 0, 2));
        assert!(!is_p1_facet(&g, 0, 1));
        assert!((0..4).all(|i| (0..4).all(|j| !is_p1_facet(&Graph::complete(4), i, j))));
        assert!(!is_p1_facet(&Graph::empty(2), 0, 1));
    }

    #[test]
    fn ell_examples() {
        assert_eq!(count_p1_components(&square_plus_two()), 3);
        for n in 3..=8 {
            assert_eq!(count_p1_components(&Graph::complete(n)), 0);
            assert_eq!(count_p1_components(&Graph::empty(n)), choose2(n));
        }
        assert_eq!(count_p1_components(&Graph::empty(2)), 0);
        assert!(is_degenerate(&Graph::empty(2)));
    }

    #[test]
    fn j_pair_examples() {
        assert_eq!(j_pairs(&square_plus_two()), vec![(0, 2), (1, 3)]);
        assert!(j_pairs(&Graph::complete(5)).is_empty());
        assert!(j_pairs(&canonical_disjoint(0, 5)).is_empty());
    }

    #[test]
    fn closed_form_examples() {
        assert_eq!(ell_closed_form(&square_plus_two()).unwrap(), 3);
        assert_eq!(ell_closed_form(&canonical_disjoint(1, 4)).unwrap(), 6);
        let cycle = g1(4, &[(1, 2), (2, 3), (3, 4), (4, 1)]);
        assert!(matches!(ell_closed_form(&cycle), Err(Error::NoIsolatedVertex)));
    }

    #[test]
    fn components_of_square_plus_two() {
        let comps = components(&square_plus_two()).unwrap();
        assert_eq!(comps.len(), 11);
        assert_eq!(comps.iter().filter(|c| c.dimension == 2).count(), 8);
        let lines: Vec<(usize, usize)> = comps
            .iter()
            .filter(|c| c.dimension == 1)
            .map(|c| {
                let v = c.facet.to_vec();
                (v[0], v[1])
            })
            .collect();
        assert_eq!(lines, vec![(0, 2), (1, 3), (4, 5)]);
        let labels: Vec<String> = comps.iter().map(ToString::to_string).collect();
        for expected in [
            "V(x_1,x_2,x_5)",
            "V(x_1,x_2,x_6)",
            "V(x_1,x_4,x_5)",
            "V(x_1,x_4,x_6)",
            "V(x_2,x_3,x_5)",
            "V(x_2,x_3,x_6)",
            "V(x_3,x_4,x_5)",
            "V(x_3,x_4,x_6)",
            "V(x_1,x_2,x_3,x_4)",
            "V(x_1,x_3,x_5,x_6)",
            "V(x_2,x_4,x_5,x_6)",
        ] {
            assert!(labels.iter().any(|l| l == expected), "missing {expected}");
        }
    }

    #[test]
    fn components_small_cases() {
        let k = components(&Graph::complete(5)).unwrap();
        assert_eq!(k.len(), 1);
        assert_eq!(k[0].dimension, 4);
        assert_eq!(k[0].to_string(), "P^4");
        let e = components(&Graph::empty(4)).unwrap();
        assert_eq!(e.len(), 6);
        assert!(e.iter().all(|c| c.dimension == 1));
        assert!(matches!(components(&Graph::empty(13)), Err(Error::CapExceeded { n: 13, cap: 12 })));
    }

    #[test]
    fn components_match_brute_force() {
        for n in 1..=6usize {
            for mask in 0..1u64 << (n * (n - 1) / 2) {
                let g = Graph::from_edge_mask(n, mask);
                let dfs: Vec<Vec<usize>> = components(&g).unwrap().iter().map(|c| c.facet.to_vec()).collect();
                assert_eq!(dfs, brute_facets(&g), "{g:?}");
            }
        }
    }

    #[test]
    fn j_reduction_worked_example() {
        let first = j_reduction_step(&square_plus_two()).unwrap();
        assert_eq!(first.pair, (0, 2));
        assert_eq!(first.ops, vec![Operation::RelativeMutate { target: 2, reference: 0 }]);
        assert_eq!(first.graph, g1(6, &[(1, 2), (1, 4)]));
        assert_eq!(j_pairs(&first.graph), vec![(1, 3)]);

        let second = j_reduction_step(&first.graph).unwrap();
        assert_eq!(second.ops, vec![Operation::RelativeMutate { target: 3, reference: 1 }]);
        assert_eq!(second.graph, g1(6, &[(1, 2)]));
        assert_eq!(second.graph.isolated_edges().len(), 1);
        assert_eq!(second.graph.isolated_count(), 4);

        let ells = [
            count_p1_components(&square_plus_two()),
            count_p1_components(&first.graph),
            count_p1_components(&second.graph),
        ];
        assert!(ells[0] <= ells[1] && ells[1] <= ells[2]);
        assert_eq!(ells[2], 6);

        assert!(matches!(j_reduction_step(&second.graph), Err(Error::JZero)));
        let cycle = g1(4, &[(1, 2), (2, 3), (3, 4), (4, 1)]);
        assert!(matches!(j_reduction_step(&cycle), Err(Error::NoIsolatedVertex)));
    }

    #[test]
    fn report_examples() {
        let rep = theorem4_report(&square_plus_two()).unwrap();
        assert_eq!(rep.ell, 3);
        assert_eq!(rep.j_count, 2);
        assert_eq!(rep.iso_count, 2);
        assert_eq!(rep.p1_facets.len(), rep.ell);
        assert!(rep.bound_holds);
        assert_eq!(format_pairs(&rep.j_pairs), "{{1,3},{2,4}}");

        for n in 3..=8 {
            let rep = theorem4_report(&Graph::empty(n)).unwrap();
            assert_eq!((rep.ell, rep.r, rep.bound), (choose2(n), n - 1, choose2(n)));
            assert!(rep.bound_holds);
        }
        assert!(matches!(theorem4_report(&Graph::empty(2)), Err(Error::TooFewVertices(2))));
    }
}
