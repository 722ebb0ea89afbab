//! Brute-force combinatorial enumeration at desk scale.

use num_bigint::BigInt;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{DisjointSets, Graph};
use crate::matrix::integer_determinant;

/// Resource limits for every exponential enumeration.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Caps {
    pub trees: usize,
    pub matchings: usize,
    /// Largest vertex count for subset scans (toughness, automorphisms).
    pub brute_force_vertices: usize,
    /// Largest vertex count for capacity tables.
    pub capacity_vertices: usize,
    /// Largest edge count for eager tree-polytope constraint generation.
    pub polytope_edges: usize,
    /// Largest vertex count for vertex-subset constraint scans.
    pub subset_vertices: usize,
    /// Candidate budget for integer-point enumeration.
    pub lattice_candidates: usize,
    pub lp_iterations: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            trees: 200_000,
            matchings: 200_000,
            brute_force_vertices: 16,
            capacity_vertices: 14,
            polytope_edges: 20,
            subset_vertices: 20,
            lattice_candidates: 5_000_000,
            lp_iterations: 100_000,
        }
    }
}

/// All spanning trees in canonical (lexicographic edge-index) order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SpanningTreeSet {
    pub trees: Vec<Vec<usize>>,
}

impl SpanningTreeSet {
    pub fn len(&self) -> usize {
        self.trees.len()
    }

    pub fn is_empty(&self) -> bool {
        self.trees.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Vec<usize>> {
        self.trees.iter()
    }

    /// Degree of every vertex in tree `t`.
    pub fn degrees(&self, g: &Graph, t: usize) -> Vec<usize> {
        let mut deg = vec![0; g.vertex_count()];
        for &e in &self.trees[t] {
            let (u, v) = g.edge(e);
            deg[u] += 1;
            deg[v] += 1;
        }
        deg
    }
}

/// Contraction/deletion recursion over the canonical edge order. An edge is
/// contracted (kept) when it joins two different super-vertices; it may be
/// deleted only when the remaining edges still connect everything. Keeping
/// before deleting yields trees in lexicographic order.
pub fn enumerate_spanning_trees(g: &Graph, caps: &Caps) -> Result<SpanningTreeSet> {
    g.require_connected()?;
    let n = g.vertex_count();
    let mut out = Vec::new();
    let mut chosen = Vec::with_capacity(n.saturating_sub(1));
    let dsu = DisjointSets::new(n);
    trees_rec(g, 0, &dsu, &mut chosen, &mut out, caps.trees)?;
    Ok(SpanningTreeSet { trees: out })
}

fn trees_rec(
    g: &Graph,
    next: usize,
    dsu: &DisjointSets,
    chosen: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
    cap: usize,
) -> Result<()> {
    if dsu.components() == 1 {
        if out.len() >= cap {
            return Err(Error::resource("spanning tree count", cap));
        }
        out.push(chosen.clone());
        return Ok(());
    }
    if next == g.edge_count() {
        return Ok(());
    }
    let (u, v) = g.edge(next);
    let mut contracted = dsu.clone();
    if contracted.union(u, v) {
        chosen.push(next);
        trees_rec(g, next + 1, &contracted, chosen, out, cap)?;
        chosen.pop();
    }
    // deletion branch is only viable if the rest still spans
    let mut rest = dsu.clone();
    for e in next + 1..g.edge_count() {
        let (a, b) = g.edge(e);
        rest.union(a, b);
    }
    if rest.components() == 1 {
        trees_rec(g, next + 1, dsu, chosen, out, cap)?;
    }
    Ok(())
}

/// Number of spanning trees from the Matrix-Tree theorem (any cofactor of
/// the unweighted Laplacian).
pub fn matrix_tree_count(g: &Graph) -> BigInt {
    let n = g.vertex_count();
    if n <= 1 {
        return BigInt::from(1);
    }
    let mut rows = vec![vec![BigInt::from(0); n - 1]; n - 1];
    for &(u, v) in g.edges() {
        for (a, b) in [(u, v), (v, u)] {
            if a < n - 1 {
                rows[a][a] += 1;
                if b < n - 1 {
                    rows[a][b] -= 1;
                }
            }
        }
    }
    integer_determinant(&rows)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MatchingSet {
    /// Every matching as a sorted edge-index list; the empty matching first.
    pub matchings: Vec<Vec<usize>>,
    pub max_size: usize,
}

pub fn enumerate_matchings(g: &Graph, caps: &Caps) -> Result<MatchingSet> {
    let mut out = Vec::new();
    let mut used = vec![false; g.vertex_count()];
    let mut current = Vec::new();
    matchings_rec(g, 0, &mut used, &mut current, &mut out, caps.matchings)?;
    let max_size = out.iter().map(Vec::len).max().unwrap_or(0);
    Ok(MatchingSet {
        matchings: out,
        max_size,
    })
}

fn matchings_rec(
    g: &Graph,
    next: usize,
    used: &mut [bool],
    current: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
    cap: usize,
) -> Result<()> {
    if next == g.edge_count() {
        if out.len() >= cap {
            return Err(Error::resource("matching count", cap));
        }
        out.push(current.clone());
        return Ok(());
    }
    // exclusion first so the empty matching is listed first
    matchings_rec(g, next + 1, used, current, out, cap)?;
    let (u, v) = g.edge(next);
    if !used[u] && !used[v] {
        used[u] = true;
        used[v] = true;
        current.push(next);
        matchings_rec(g, next + 1, used, current, out, cap)?;
        current.pop();
        used[u] = false;
        used[v] = false;
    }
    Ok(())
}

/// Size of a maximum matching by dynamic programming over vertex subsets.
pub fn maximum_matching_size(g: &Graph, caps: &Caps) -> Result<usize> {
    let n = g.vertex_count();
    if n > caps.subset_vertices.max(caps.brute_force_vertices) || n >= usize::BITS as usize {
        return Err(Error::resource("vertex count for maximum matching", caps.subset_vertices));
    }
    let full = (1usize << n) - 1;
    let mut best = vec![0u8; 1 << n];
    for mask in 1..=full {
        let v = mask.trailing_zeros() as usize;
        let without = mask & !(1 << v);
        let mut b = best[without];
        for w in g.neighbors(v) {
            if without & (1 << w) != 0 {
                b = b.max(1 + best[without & !(1 << w)]);
            }
        }
        best[mask] = b;
    }
    Ok(best[full] as usize)
}

/// Hamiltonian paths as sorted edge sets (each undirected path once),
/// in lexicographic order.
pub fn hamiltonian_paths(g: &Graph) -> Vec<Vec<usize>> {
    let n = g.vertex_count();
    let mut out = Vec::new();
    if n == 0 {
        return out;
    }
    if n == 1 {
        out.push(Vec::new());
        return out;
    }
    let mut visited = vec![false; n];
    let mut path_vertices = Vec::with_capacity(n);
    let mut path_edges = Vec::with_capacity(n - 1);
    for start in 0..n {
        visited[start] = true;
        path_vertices.push(start);
        ham_rec(g, &mut visited, &mut path_vertices, &mut path_edges, &mut out);
        path_vertices.pop();
        visited[start] = false;
    }
    out.sort();
    out
}

fn ham_rec(
    g: &Graph,
    visited: &mut [bool],
    vertices: &mut Vec<usize>,
    edges: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    let n = g.vertex_count();
    if vertices.len() == n {
        // keep one orientation: start < end
        if vertices[0] < vertices[n - 1] {
            let mut set = edges.clone();
            set.sort_unstable();
            out.push(set);
        }
        return;
    }
    let last = *vertices.last().expect("nonempty path");
    for &(w, e) in g.incident(last) {
        if !visited[w] {
            visited[w] = true;
            vertices.push(w);
            edges.push(e);
            ham_rec(g, visited, vertices, edges, out);
            edges.pop();
            vertices.pop();
            visited[w] = false;
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ToughnessReport {
    pub one_tough: bool,
    /// Removal set maximizing `components(G - U) - |U|` among disconnecting
    /// sets; `None` when no vertex set disconnects the graph.
    pub witness: Option<Vec<usize>>,
    pub witness_components: usize,
}

pub fn is_one_tough(g: &Graph, caps: &Caps) -> Result<ToughnessReport> {
    let n = g.vertex_count();
    if n > caps.brute_force_vertices {
        return Err(Error::resource(
            "vertex count for toughness scan",
            caps.brute_force_vertices,
        ));
    }
    let mut best: Option<(i64, usize, usize)> = None; // (excess, mask, components)
    let mut alive = vec![true; n];
    for mask in 1usize..(1 << n) - 1 {
        for (v, a) in alive.iter_mut().enumerate() {
            *a = mask & (1 << v) == 0;
        }
        let comps = g.components_masked(&alive, None);
        if comps < 2 {
            continue;
        }
        let excess = comps as i64 - mask.count_ones() as i64;
        if best.is_none_or(|(b, _, _)| excess > b) {
            best = Some((excess, mask, comps));
        }
    }
    Ok(match best {
        None => ToughnessReport {
            one_tough: true,
            witness: None,
            witness_components: 0,
        },
        Some((excess, mask, comps)) => ToughnessReport {
            one_tough: excess <= 0,
            witness: Some((0..n).filter(|v| mask & (1 << v) != 0).collect()),
            witness_components: comps,
        },
    })
}

/// Exact vertex-transitivity test: for every vertex `v`, search for an
/// automorphism sending vertex 0 to `v`.
pub fn is_vertex_transitive(g: &Graph, caps: &Caps) -> Result<bool> {
    let n = g.vertex_count();
    if n > caps.brute_force_vertices {
        return Err(Error::resource(
            "vertex count for automorphism search",
            caps.brute_force_vertices,
        ));
    }
    if n <= 1 {
        return Ok(true);
    }
    let deg = g.degrees();
    if deg.iter().any(|&d| d != deg[0]) {
        return Ok(false);
    }
    for target in 0..n {
        let mut map = vec![usize::MAX; n];
        let mut used = vec![false; n];
        map[0] = target;
        used[target] = true;
        if !extend_automorphism(g, 1, &mut map, &mut used) {
            return Ok(false);
        }
    }
    Ok(true)
}

fn extend_automorphism(g: &Graph, v: usize, map: &mut [usize], used: &mut [bool]) -> bool {
    let n = g.vertex_count();
    if v == n {
        return true;
    }
    for image in 0..n {
        if used[image] || g.degree(image) != g.degree(v) {
            continue;
        }
        let consistent = (0..v).all(|u| g.has_edge(u, v) == g.has_edge(map[u], image));
        if !consistent {
            continue;
        }
        map[v] = image;
        used[image] = true;
        if extend_automorphism(g, v + 1, map, used) {
            return true;
        }
        used[image] = false;
        map[v] = usize::MAX;
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::NamedGraph;

    fn caps() -> Caps {
        Caps::default()
    }

    #[test]
    fn triangle_has_three_trees_in_lexicographic_order() {
        let g = Graph::cycle(3).unwrap();
        let t = enumerate_spanning_trees(&g, &caps()).unwrap();
        assert_eq!(t.trees, vec![vec![0, 1], vec![0, 2], vec![1, 2]]);
    }

    #[test]
    fn complete_four_has_sixteen_trees() {
        let g = Graph::complete(4).unwrap();
        assert_eq!(enumerate_spanning_trees(&g, &caps()).unwrap().len(), 16);
        assert_eq!(matrix_tree_count(&g), BigInt::from(16));
    }

    #[test]
    fn a_tree_spans_itself() {
        let g = Graph::named(NamedGraph::Star(4)).unwrap();
        let t = enumerate_spanning_trees(&g, &caps()).unwrap();
        assert_eq!(t.trees, vec![vec![0, 1, 2, 3]]);
    }

    #[test]
    fn tree_cap_is_a_resource_error() {
        let g = Graph::complete(5).unwrap();
        let small = Caps {
            trees: 100,
            ..Caps::default()
        };
        let err = enumerate_spanning_trees(&g, &small).unwrap_err();
        assert_eq!(err, Error::resource("spanning tree count", 100));
    }

    #[test]
    fn matching_counts() {
        let c4 = enumerate_matchings(&Graph::cycle(4).unwrap(), &caps()).unwrap();
        assert_eq!(c4.matchings.len(), 7);
        assert!(c4.matchings[0].is_empty());
        assert_eq!(c4.max_size, 2);
        let k2 = enumerate_matchings(&Graph::path(2).unwrap(), &caps()).unwrap();
        assert_eq!(k2.matchings.len(), 2);
        let c6 = enumerate_matchings(&Graph::cycle(6).unwrap(), &caps()).unwrap();
        assert_eq!(c6.max_size, 3);
        assert_eq!(maximum_matching_size(&Graph::cycle(6).unwrap(), &caps()).unwrap(), 3);
        assert_eq!(maximum_matching_size(&Graph::petersen(), &caps()).unwrap(), 5);
    }

    #[test]
    fn hamiltonian_path_counts() {
        assert_eq!(hamiltonian_paths(&Graph::complete(4).unwrap()).len(), 12);
        assert_eq!(hamiltonian_paths(&Graph::cycle(4).unwrap()).len(), 4);
        assert!(hamiltonian_paths(&Graph::named(NamedGraph::Star(3)).unwrap()).is_empty());
        assert_eq!(hamiltonian_paths(&Graph::petersen()).len(), 120);
    }

    #[test]
    fn toughness_examples() {
        assert!(is_one_tough(&Graph::cycle(5).unwrap(), &caps()).unwrap().one_tough);
        let star = is_one_tough(&Graph::named(NamedGraph::Star(3)).unwrap(), &caps()).unwrap();
        assert!(!star.one_tough);
        assert_eq!(star.witness, Some(vec![0]));
        assert_eq!(star.witness_components, 3);
        assert!(is_one_tough(&Graph::petersen(), &caps()).unwrap().one_tough);
        let k4 = is_one_tough(&Graph::complete(4).unwrap(), &caps()).unwrap();
        assert!(k4.one_tough && k4.witness.is_none());
    }

    #[test]
    fn vertex_transitivity_examples() {
        assert!(is_vertex_transitive(&Graph::cycle(7).unwrap(), &caps()).unwrap());
        assert!(!is_vertex_transitive(&Graph::path(3).unwrap(), &caps()).unwrap());
        assert!(is_vertex_transitive(&Graph::petersen(), &caps()).unwrap());
        let prism = Graph::cycle(3)
            .unwrap()
            .cartesian_product(&Graph::path(2).unwrap())
            .unwrap();
        assert!(is_vertex_transitive(&prism, &caps()).unwrap());
        // Frucht graph: cubic with a trivial automorphism group
        let frucht = Graph::new(
            12,
            [
                (0, 1), (0, 6), (0, 7), (1, 2), (1, 7), (2, 3), (2, 8), (3, 4), (3, 9),
                (4, 5), (4, 9), (5, 6), (5, 10), (6, 10), (7, 11), (8, 9), (8, 11), (10, 11),
            ],
        )
        .unwrap();
        assert!(!is_vertex_transitive(&frucht, &caps()).unwrap());
    }
}
