//! Simple undirected graphs with a canonical edge order.
//!
//! Edges are normalized to `(u, v)` with `u < v` and sorted
//! lexicographically; an edge's index is its position in that order, so any
//! vector indexed by edges is reproducible across runs.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Edge = (usize, usize);

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Graph {
    n: usize,
    edges: Vec<Edge>,
    /// adjacency[v] = (neighbour, edge index), sorted by neighbour
    adjacency: Vec<Vec<(usize, usize)>>,
}

/// The built-in graph families.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NamedGraph {
    Path(usize),
    Cycle(usize),
    Complete(usize),
    CompleteBipartite(usize, usize),
    Star(usize),
    Petersen,
    Grid(usize, usize),
}

impl Graph {
    /// Build a graph from an arbitrary edge list. Self-loops, parallel
    /// edges and out-of-range endpoints are rejected.
    pub fn new(n: usize, edges: impl IntoIterator<Item = Edge>) -> Result<Self> {
        let mut set = BTreeSet::new();
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::Parameter(format!(
                    "edge ({u},{v}) has an endpoint outside 0..{n}"
                )));
            }
            if u == v {
                return Err(Error::Parameter(format!("self-loop at vertex {u}")));
            }
            let e = (u.min(v), u.max(v));
            if !set.insert(e) {
                return Err(Error::Parameter(format!("parallel edge {}-{}", e.0, e.1)));
            }
        }
        let edges: Vec<Edge> = set.into_iter().collect();
        let mut adjacency = vec![Vec::new(); n];
        for (i, &(u, v)) in edges.iter().enumerate() {
            adjacency[u].push((v, i));
            adjacency[v].push((u, i));
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        Ok(Graph {
            n,
            edges,
            adjacency,
        })
    }

    pub fn named(name: NamedGraph) -> Result<Self> {
        let positive = |k: usize, what: &str| {
            if k == 0 {
                Err(Error::Parameter(format!("{what} must be at least 1")))
            } else {
                Ok(())
            }
        };
        match name {
            NamedGraph::Path(n) => {
                positive(n, "path length")?;
                Graph::new(n, (1..n).map(|i| (i - 1, i)))
            }
            NamedGraph::Cycle(n) => {
                if n < 3 {
                    return Err(Error::Parameter(format!(
                        "cycle needs at least 3 vertices, got {n}"
                    )));
                }
                Graph::new(n, (0..n).map(|i| (i, (i + 1) % n)))
            }
            NamedGraph::Complete(n) => {
                positive(n, "complete graph size")?;
                Graph::new(n, (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))))
            }
            NamedGraph::CompleteBipartite(a, b) => {
                positive(a, "first part size")?;
                positive(b, "second part size")?;
                Graph::new(a + b, (0..a).flat_map(|u| (a..a + b).map(move |v| (u, v))))
            }
            NamedGraph::Star(leaves) => {
                positive(leaves, "star size")?;
                Graph::new(leaves + 1, (1..=leaves).map(|v| (0, v)))
            }
            NamedGraph::Petersen => {
                let outer = (0..5).map(|i| (i, (i + 1) % 5));
                let spokes = (0..5).map(|i| (i, i + 5));
                let inner = (0..5).map(|i| (5 + i, 5 + (i + 2) % 5));
                Graph::new(10, outer.chain(spokes).chain(inner))
            }
            NamedGraph::Grid(rows, cols) => {
                positive(rows, "grid rows")?;
                positive(cols, "grid columns")?;
                Graph::path(rows)?.cartesian_product(&Graph::path(cols)?)
            }
        }
    }

    pub fn path(n: usize) -> Result<Self> {
        Graph::named(NamedGraph::Path(n))
    }

    pub fn cycle(n: usize) -> Result<Self> {
        Graph::named(NamedGraph::Cycle(n))
    }

    pub fn complete(n: usize) -> Result<Self> {
        Graph::named(NamedGraph::Complete(n))
    }

    pub fn complete_bipartite(a: usize, b: usize) -> Result<Self> {
        Graph::named(NamedGraph::CompleteBipartite(a, b))
    }

    pub fn petersen() -> Self {
        Graph::named(NamedGraph::Petersen).expect("petersen graph is valid")
    }

    pub fn grid(rows: usize, cols: usize) -> Result<Self> {
        Graph::named(NamedGraph::Grid(rows, cols))
    }

    /// Cartesian product: vertex `(a, b)` gets id `a * other.n + b`; two
    /// vertices are adjacent when exactly one coordinate moves along an edge.
    pub fn cartesian_product(&self, other: &Graph) -> Result<Self> {
        let m = other.n;
        let id = |a: usize, b: usize| a * m + b;
        let mut edges = Vec::new();
        for &(u, v) in &self.edges {
            for b in 0..m {
                edges.push((id(u, b), id(v, b)));
            }
        }
        for a in 0..self.n {
            for &(x, y) in &other.edges {
                edges.push((id(a, x), id(a, y)));
            }
        }
        Graph::new(self.n * m, edges)
    }

    /// Disjoint union followed by identifying `self`'s vertex `at_self`
    /// with `other`'s vertex `at_other` (a one-vertex gluing).
    pub fn glue_at_vertex(&self, at_self: usize, other: &Graph, at_other: usize) -> Result<Self> {
        if at_self >= self.n || at_other >= other.n {
            return Err(Error::Parameter("gluing vertex out of range".into()));
        }
        let mut map = Vec::with_capacity(other.n);
        let mut next = self.n;
        for v in 0..other.n {
            if v == at_other {
                map.push(at_self);
            } else {
                map.push(next);
                next += 1;
            }
        }
        let edges = self
            .edges
            .iter()
            .copied()
            .chain(other.edges.iter().map(|&(u, v)| (map[u], map[v])));
        Graph::new(next, edges)
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, i: usize) -> Edge {
        self.edges[i]
    }

    pub fn edge_index(&self, u: usize, v: usize) -> Option<usize> {
        if u >= self.n || v >= self.n {
            return None;
        }
        self.adjacency[u]
            .binary_search_by_key(&v, |&(w, _)| w)
            .ok()
            .map(|pos| self.adjacency[u][pos].1)
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.edge_index(u, v).is_some()
    }

    /// `(neighbour, edge index)` pairs, sorted by neighbour.
    pub fn incident(&self, v: usize) -> &[(usize, usize)] {
        &self.adjacency[v]
    }

    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.adjacency[v].iter().map(|&(w, _)| w)
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        (0..self.n).map(|v| self.degree(v)).collect()
    }

    /// Number of connected components of the subgraph on the vertices
    /// flagged `alive`, using only edges with `edge_alive[e]`.
    pub fn components_masked(&self, alive: &[bool], edge_alive: Option<&[bool]>) -> usize {
        let mut seen = vec![false; self.n];
        let mut count = 0;
        let mut stack = Vec::new();
        for s in 0..self.n {
            if !alive[s] || seen[s] {
                continue;
            }
            count += 1;
            seen[s] = true;
            stack.push(s);
            while let Some(v) = stack.pop() {
                for &(w, e) in &self.adjacency[v] {
                    if alive[w] && !seen[w] && edge_alive.is_none_or(|ea| ea[e]) {
                        seen[w] = true;
                        stack.push(w);
                    }
                }
            }
        }
        count
    }

    pub fn component_count(&self) -> usize {
        self.components_masked(&vec![true; self.n], None)
    }

    pub fn is_connected(&self) -> bool {
        self.n > 0 && self.component_count() == 1
    }

    pub fn require_connected(&self) -> Result<()> {
        if self.is_connected() {
            Ok(())
        } else {
            Err(Error::Disconnected(format!(
                "{} vertices in {} components",
                self.n,
                self.component_count()
            )))
        }
    }

    pub fn is_tree(&self) -> bool {
        self.is_connected() && self.edges.len() + 1 == self.n
    }

    pub fn is_path_graph(&self) -> bool {
        self.is_tree() && self.adjacency.iter().all(|a| a.len() <= 2)
    }

    pub fn is_cycle_graph(&self) -> bool {
        self.n >= 3
            && self.is_connected()
            && self.edges.len() == self.n
            && self.adjacency.iter().all(|a| a.len() == 2)
    }

    /// Two-colouring if the graph is bipartite; colour 0 contains vertex 0
    /// of each component.
    pub fn bipartition(&self) -> Option<Vec<u8>> {
        let mut colour = vec![u8::MAX; self.n];
        for s in 0..self.n {
            if colour[s] != u8::MAX {
                continue;
            }
            colour[s] = 0;
            let mut stack = vec![s];
            while let Some(v) = stack.pop() {
                for w in self.neighbors(v) {
                    if colour[w] == u8::MAX {
                        colour[w] = 1 - colour[v];
                        stack.push(w);
                    } else if colour[w] == colour[v] {
                        return None;
                    }
                }
            }
        }
        Some(colour)
    }

    /// Induced subgraph on `keep` (relabelled in increasing order) together
    /// with the map from new ids to old ids.
    pub fn induced(&self, keep: &[usize]) -> (Graph, Vec<usize>) {
        let mut keep: Vec<usize> = keep.to_vec();
        keep.sort_unstable();
        keep.dedup();
        let mut new_id = vec![usize::MAX; self.n];
        for (i, &v) in keep.iter().enumerate() {
            new_id[v] = i;
        }
        let edges = self
            .edges
            .iter()
            .filter(|&&(u, v)| new_id[u] != usize::MAX && new_id[v] != usize::MAX)
            .map(|&(u, v)| (new_id[u], new_id[v]));
        (
            Graph::new(keep.len(), edges).expect("induced subgraph is simple"),
            keep,
        )
    }

    /// Graph with one extra edge.
    pub fn with_edge(&self, u: usize, v: usize) -> Result<Graph> {
        Graph::new(self.n, self.edges.iter().copied().chain(std::iter::once((u, v))))
    }

    /// Indicator 0/1 vector of an edge subset.
    pub fn indicator(&self, edge_set: &[usize]) -> Vec<u8> {
        let mut x = vec![0u8; self.edges.len()];
        for &e in edge_set {
            x[e] = 1;
        }
        x
    }

    /// Parse the text format: a header `n m`, then `m` lines `u v`.
    /// Blank lines and lines starting with `#` are ignored.
    pub fn parse_text(text: &str) -> Result<Graph> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (hline, header) = lines.next().ok_or(Error::Parse {
            line: 0,
            msg: "missing `n m` header".into(),
        })?;
        let nums = parse_usizes(header, hline)?;
        let [n, m] = nums[..] else {
            return Err(Error::Parse {
                line: hline,
                msg: format!("header must be `n m`, got {header:?}"),
            });
        };
        let mut edges = Vec::with_capacity(m);
        for (line, l) in lines {
            let pair = parse_usizes(l, line)?;
            let [u, v] = pair[..] else {
                return Err(Error::Parse {
                    line,
                    msg: format!("edge line must be `u v`, got {l:?}"),
                });
            };
            edges.push((u, v));
        }
        if edges.len() != m {
            return Err(Error::Parse {
                line: hline,
                msg: format!("header declares {m} edges but {} were given", edges.len()),
            });
        }
        Graph::new(n, edges)
    }

    pub fn parse_json(text: &str) -> Result<Graph> {
        let doc: GraphJson = serde_json::from_str(text).map_err(|e| Error::Parse {
            line: e.line(),
            msg: e.to_string(),
        })?;
        Graph::new(doc.n, doc.edges.into_iter().map(|[u, v]| (u, v)))
    }

    /// Parse either format, choosing JSON when the text starts with `{`.
    pub fn parse(text: &str) -> Result<Graph> {
        if text.trim_start().starts_with('{') {
            Graph::parse_json(text)
        } else {
            Graph::parse_text(text)
        }
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.n, self.edges.len());
        for &(u, v) in &self.edges {
            out.push_str(&format!("{u} {v}\n"));
        }
        out
    }

    pub fn to_json(&self) -> GraphJson {
        GraphJson {
            n: self.n,
            edges: self.edges.iter().map(|&(u, v)| [u, v]).collect(),
        }
    }
}

fn parse_usizes(line: &str, lineno: usize) -> Result<Vec<usize>> {
    line.split_whitespace()
        .map(|tok| {
            tok.parse::<usize>().map_err(|_| Error::Parse {
                line: lineno,
                msg: format!("expected a nonnegative integer, got {tok:?}"),
            })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphJson {
    pub n: usize,
    pub edges: Vec<[usize; 2]>,
}

impl fmt::Display for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Graph(n={}, edges=[", self.n)?;
        for (i, (u, v)) in self.edges.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{u}-{v}")?;
        }
        write!(f, "])")
    }
}

/// Biconnected components (blocks) and cut vertices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Blocks {
    /// Edge indices of each block, each list sorted; blocks are ordered by
    /// their smallest edge index.
    pub blocks: Vec<Vec<usize>>,
    /// Sorted vertex set of each block.
    pub block_vertices: Vec<Vec<usize>>,
    /// Block id of every edge.
    pub edge_block: Vec<usize>,
    pub cut_vertices: Vec<usize>,
}

impl Blocks {
    pub fn count(&self) -> usize {
        self.blocks.len()
    }
}

/// Hopcroft-Tarjan edge-stack decomposition.
pub fn biconnected_components(g: &Graph) -> Result<Blocks> {
    g.require_connected()?;
    let n = g.vertex_count();
    let mut disc = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut time = 0usize;
    let mut edge_stack: Vec<usize> = Vec::new();
    let mut raw_blocks: Vec<Vec<usize>> = Vec::new();
    let mut is_cut = vec![false; n];

    // iterative DFS: frames of (vertex, parent edge, next adjacency position, child count)
    struct Frame {
        v: usize,
        parent_edge: Option<usize>,
        pos: usize,
        children: usize,
    }
    let root = 0;
    disc[root] = time;
    low[root] = time;
    time += 1;
    let mut stack = vec![Frame {
        v: root,
        parent_edge: None,
        pos: 0,
        children: 0,
    }];
    while let Some(top) = stack.last_mut() {
        let v = top.v;
        if top.pos < g.incident(v).len() {
            let (w, e) = g.incident(v)[top.pos];
            top.pos += 1;
            if Some(e) == top.parent_edge {
                continue;
            }
            if disc[w] == usize::MAX {
                top.children += 1;
                edge_stack.push(e);
                disc[w] = time;
                low[w] = time;
                time += 1;
                stack.push(Frame {
                    v: w,
                    parent_edge: Some(e),
                    pos: 0,
                    children: 0,
                });
            } else if disc[w] < disc[v] {
                edge_stack.push(e);
                low[v] = low[v].min(disc[w]);
            }
        } else {
            let done = stack.pop().expect("frame present");
            if let Some(parent) = stack.last() {
                let p = parent.v;
                low[p] = low[p].min(low[done.v]);
                if low[done.v] >= disc[p] {
                    let pe = done.parent_edge.expect("child frame has a parent edge");
                    let mut block = Vec::new();
                    while let Some(e) = edge_stack.pop() {
                        block.push(e);
                        if e == pe {
                            break;
                        }
                    }
                    raw_blocks.push(block);
                    if parent.parent_edge.is_some() {
                        is_cut[p] = true;
                    }
                }
            } else if done.children >= 2 {
                is_cut[done.v] = true;
            }
        }
    }

    for b in &mut raw_blocks {
        b.sort_unstable();
    }
    raw_blocks.sort();
    let mut edge_block = vec![0; g.edge_count()];
    let mut block_vertices = Vec::with_capacity(raw_blocks.len());
    for (i, b) in raw_blocks.iter().enumerate() {
        let mut verts = BTreeSet::new();
        for &e in b {
            edge_block[e] = i;
            let (u, v) = g.edge(e);
            verts.insert(u);
            verts.insert(v);
        }
        block_vertices.push(verts.into_iter().collect());
    }
    Ok(Blocks {
        blocks: raw_blocks,
        block_vertices,
        edge_block,
        cut_vertices: (0..n).filter(|&v| is_cut[v]).collect(),
    })
}

pub fn is_biconnected(g: &Graph) -> Result<bool> {
    Ok(biconnected_components(g)?.count() == 1)
}

/// Union-find with path halving, used for forest and component tests.
#[derive(Clone, Debug)]
pub struct DisjointSets {
    parent: Vec<usize>,
    components: usize,
}

impl DisjointSets {
    pub fn new(n: usize) -> Self {
        DisjointSets {
            parent: (0..n).collect(),
            components: n,
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns false when `a` and `b` were already joined.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra.max(rb)] = ra.min(rb);
        self.components -= 1;
        true
    }

    pub fn components(&self) -> usize {
        self.components
    }
}
