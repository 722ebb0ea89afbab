//! The spanning tree polytope `P(G)`, the doubled matching polytope
//! `2M(G)` and their intersection `Θ(G)`.
//!
//! Every constraint here has 0/1 coefficients, so a constraint is stored as
//! the set of edges it sums over together with a relation and an integer
//! bound.

use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::enumerate::{hamiltonian_paths, Caps, MatchingSet, SpanningTreeSet};
use crate::error::{Error, Result};
use crate::graph::{biconnected_components, Blocks, DisjointSets, Graph};
use crate::lp::{LinearProgram, LpStatus, Relation};
use crate::matrix::integer_rank;
use crate::scalar::{Rational, Scalar};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Tag {
    /// Upper bound over an edge subset `A`.
    EdgeSubset,
    Nonnegative,
    VertexDegree { vertex: usize },
    OddSet { vertices: Vec<usize> },
    /// Upper bound over the edges induced by a vertex subset.
    VertexSubset { vertices: Vec<usize> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Constraint {
    pub edges: Vec<usize>,
    pub relation: Relation,
    pub bound: i64,
    pub tag: Tag,
}

impl Constraint {
    fn lhs<S: Scalar>(&self, x: &[S]) -> S {
        self.edges.iter().fold(S::zero(), |acc, &e| acc + x[e].clone())
    }

    fn describe<S: Scalar>(&self, lhs: &S, strict: bool) -> String {
        let rel = match (self.relation, strict) {
            (Relation::Le, false) => "<=",
            (Relation::Le, true) => "<",
            (Relation::Ge, false) => ">=",
            (Relation::Ge, true) => ">",
            (Relation::Eq, _) => "=",
        };
        format!(
            "{:?}: sum over edges {:?} is {lhs}, required {rel} {}",
            self.tag, self.edges, self.bound
        )
    }

    /// `Some(description)` when `x` violates this constraint.
    fn violation<S: Scalar>(&self, x: &[S], strict: bool, tol: f64) -> Option<String> {
        let lhs = self.lhs(x);
        let slack = S::from_i64(self.bound) - lhs.clone();
        let ok = match self.relation {
            Relation::Eq => slack.sign(tol) == std::cmp::Ordering::Equal,
            Relation::Le if strict => slack.sign(tol) == std::cmp::Ordering::Greater,
            Relation::Le => slack.sign(tol) != std::cmp::Ordering::Less,
            Relation::Ge if strict => slack.sign(tol) == std::cmp::Ordering::Less,
            Relation::Ge => slack.sign(tol) != std::cmp::Ordering::Greater,
        };
        (!ok).then(|| self.describe(&lhs, strict && self.relation != Relation::Eq))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HyperplaneSystem {
    pub edge_count: usize,
    pub constraints: Vec<Constraint>,
}

impl HyperplaneSystem {
    pub fn len(&self) -> usize {
        self.constraints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.constraints.is_empty()
    }

    /// First violated constraint; `strict` tightens every inequality.
    pub fn first_violation<S: Scalar>(&self, x: &[S], strict: bool, tol: f64) -> Option<String> {
        self.constraints.iter().find_map(|c| c.violation(x, strict, tol))
    }

    pub fn merged(mut self, other: HyperplaneSystem) -> HyperplaneSystem {
        self.constraints.extend(other.constraints);
        self
    }
}

fn mask_to_vec(mask: u64, len: usize) -> Vec<usize> {
    (0..len).filter(|&i| mask >> i & 1 == 1).collect()
}

fn block_masks(blocks: &Blocks) -> Vec<u64> {
    blocks
        .blocks
        .iter()
        .map(|b| b.iter().fold(0u64, |m, &e| m | 1 << e))
        .collect()
}

fn is_block_union(mask: u64, blocks: &[u64]) -> bool {
    blocks.iter().all(|&b| mask & b == 0 || mask & b == b)
}

/// `|V| - #components of (V, A)` for the edge subset `A` given as a mask.
fn rank_of_edge_mask(g: &Graph, mask: u64) -> i64 {
    let mut dsu = DisjointSets::new(g.vertex_count());
    let mut rank = 0;
    for (e, &(u, v)) in g.edges().iter().enumerate() {
        if mask >> e & 1 == 1 && dsu.union(u, v) {
            rank += 1;
        }
    }
    rank
}

fn nonnegativity(g: &Graph) -> impl Iterator<Item = Constraint> + '_ {
    (0..g.edge_count()).map(|e| Constraint {
        edges: vec![e],
        relation: Relation::Ge,
        bound: 0,
        tag: Tag::Nonnegative,
    })
}

fn edge_subset_constraint(g: &Graph, mask: u64, blocks: &[u64]) -> Constraint {
    Constraint {
        edges: mask_to_vec(mask, g.edge_count()),
        relation: if is_block_union(mask, blocks) {
            Relation::Eq
        } else {
            Relation::Le
        },
        bound: rank_of_edge_mask(g, mask),
        tag: Tag::EdgeSubset,
    }
}

/// One upper bound per nonempty `A ⊆ E` (equality exactly when `A` is a
/// union of blocks) plus `x_e ≥ 0`, which is equivalent to the lower bounds
/// over all `A`.
pub fn tree_polytope_constraints(g: &Graph, caps: &Caps) -> Result<HyperplaneSystem> {
    let m = g.edge_count();
    if m > caps.polytope_edges {
        return Err(Error::resource("edge count for eager polytope constraints", caps.polytope_edges));
    }
    let blocks = block_masks(&biconnected_components(g)?);
    let mut constraints: Vec<Constraint> = nonnegativity(g).collect();
    constraints.extend((1u64..1 << m).map(|mask| edge_subset_constraint(g, mask, &blocks)));
    Ok(HyperplaneSystem {
        edge_count: m,
        constraints,
    })
}

/// Nonnegativity, degree at most 2, and `x(E(U)) ≤ |U| - 1` for odd `U`
/// with at least three vertices.
pub fn doubled_matching_constraints(g: &Graph, caps: &Caps) -> Result<HyperplaneSystem> {
    let n = g.vertex_count();
    if n > caps.subset_vertices {
        return Err(Error::resource("vertex count for odd-set constraints", caps.subset_vertices));
    }
    let mut constraints: Vec<Constraint> = nonnegativity(g).collect();
    for v in 0..n {
        constraints.push(Constraint {
            edges: g.incident(v).iter().map(|&(_, e)| e).collect::<std::collections::BTreeSet<_>>().into_iter().collect(),
            relation: Relation::Le,
            bound: 2,
            tag: Tag::VertexDegree { vertex: v },
        });
    }
    for mask in 1u64..1 << n {
        let size = mask.count_ones() as i64;
        if size < 3 || size % 2 == 0 {
            continue;
        }
        let edges = induced_edges(g, mask);
        if edges.is_empty() {
            continue;
        }
        constraints.push(Constraint {
            edges,
            relation: Relation::Le,
            bound: size - 1,
            tag: Tag::OddSet {
                vertices: mask_to_vec(mask, n),
            },
        });
    }
    Ok(HyperplaneSystem {
        edge_count: g.edge_count(),
        constraints,
    })
}

fn induced_edges(g: &Graph, vertex_mask: u64) -> Vec<usize> {
    g.edges()
        .iter()
        .enumerate()
        .filter(|(_, &(u, v))| vertex_mask >> u & 1 == 1 && vertex_mask >> v & 1 == 1)
        .map(|(e, _)| e)
        .collect()
}

fn induced_connected(g: &Graph, vertex_mask: u64) -> bool {
    let alive: Vec<bool> = (0..g.vertex_count()).map(|v| vertex_mask >> v & 1 == 1).collect();
    g.components_masked(&alive, None) == 1
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Body {
    P,
    PInterior,
    DoubledMatching,
    Theta,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Membership {
    pub member: bool,
    pub violated: Option<String>,
}

impl Membership {
    fn from_violation(v: Option<String>) -> Self {
        Membership {
            member: v.is_none(),
            violated: v,
        }
    }
}

/// Streaming check of the tree-polytope system. Small edge sets are
/// checked over every `A ⊆ E`; larger graphs use the equivalent
/// vertex-subset form `x(E) = |V|-1`, `x(E(S)) ≤ |S|-1`, where `S` gives an
/// implicit equality exactly when `G[S]` is connected and `E(S)` is a union
/// of blocks.
fn tree_violation<S: Scalar>(
    g: &Graph,
    x: &[S],
    strict: bool,
    tol: f64,
    caps: &Caps,
) -> Result<Option<String>> {
    let m = g.edge_count();
    if let Some(v) = nonnegativity(g).find_map(|c| c.violation(x, strict, tol)) {
        return Ok(Some(v));
    }
    let blocks = block_masks(&biconnected_components(g)?);
    if m <= caps.polytope_edges {
        for mask in 1u64..1 << m {
            let c = edge_subset_constraint(g, mask, &blocks);
            if let Some(v) = c.violation(x, strict, tol) {
                return Ok(Some(v));
            }
        }
        return Ok(None);
    }
    let n = g.vertex_count();
    if n > caps.subset_vertices {
        return Err(Error::resource("vertex count for lazy polytope membership", caps.subset_vertices));
    }
    for mask in 1u64..1 << n {
        if mask.count_ones() < 2 {
            continue;
        }
        let edges = induced_edges(g, mask);
        let edge_mask = edges.iter().fold(0u64, |acc, &e| acc | 1 << e);
        let forced = induced_connected(g, mask) && is_block_union(edge_mask, &blocks);
        let c = Constraint {
            edges,
            relation: if forced { Relation::Eq } else { Relation::Le },
            bound: mask.count_ones() as i64 - 1,
            tag: Tag::VertexSubset {
                vertices: mask_to_vec(mask, n),
            },
        };
        if let Some(v) = c.violation(x, strict, tol) {
            return Ok(Some(v));
        }
    }
    Ok(None)
}

/// Membership of `x` in one of the bodies. `P_interior` demands every
/// inequality that is not an implicit equality of `P(G)` to hold strictly.
pub fn membership<S: Scalar>(
    g: &Graph,
    x: &[S],
    body: Body,
    tol: f64,
    caps: &Caps,
) -> Result<Membership> {
    if x.len() != g.edge_count() {
        return Err(Error::Parameter(format!(
            "point has {} coordinates but the graph has {} edges",
            x.len(),
            g.edge_count()
        )));
    }
    let violation = match body {
        Body::P => tree_violation(g, x, false, tol, caps)?,
        Body::PInterior => tree_violation(g, x, true, tol, caps)?,
        Body::DoubledMatching => doubled_matching_constraints(g, caps)?.first_violation(x, false, tol),
        Body::Theta => match tree_violation(g, x, false, tol, caps)? {
            Some(v) => Some(v),
            None => doubled_matching_constraints(g, caps)?.first_violation(x, false, tol),
        },
    };
    Ok(Membership::from_violation(violation))
}

#[derive(Clone, Debug)]
pub struct HyperplaneRoute {
    pub nonempty: bool,
    /// Largest uniform slack on the non-equality constraints of `P(G)`.
    pub slack: Option<Rational>,
    pub point: Option<Vec<Rational>>,
    pub rounds: usize,
    pub cuts: usize,
}

/// Decides `P(G)° ∩ 2M(G) ≠ ∅` from the two hyperplane descriptions alone.
/// Maximizes a slack `s` subject to `x_e ≥ s`, `x(E(S)) + s ≤ |S| - 1` on
/// non-equality vertex subsets, the block equalities and the `2M(G)`
/// system; subset constraints are generated lazily (exact separation over
/// all vertex subsets), so the LP stays small.
pub fn interior_matching_route(g: &Graph, caps: &Caps) -> Result<HyperplaneRoute> {
    g.require_connected()?;
    let n = g.vertex_count();
    let m = g.edge_count();
    if n > caps.subset_vertices {
        return Err(Error::resource("vertex count for subset separation", caps.subset_vertices));
    }
    let blocks = biconnected_components(g)?;
    let block_edge_masks = block_masks(&blocks);
    let s_var = m;
    let mut lp = LinearProgram::new(m + 1);
    lp.set_objective(s_var, 1);
    let one = |v: i64| Rational::from_i64(v);
    lp.add_row((0..m).map(|e| (e, 1)).collect(), Relation::Eq, one(n as i64 - 1));
    for (b, vertices) in blocks.blocks.iter().zip(&blocks.block_vertices) {
        lp.add_row(b.iter().map(|&e| (e, 1)).collect(), Relation::Eq, one(vertices.len() as i64 - 1));
    }
    for e in 0..m {
        lp.add_row(vec![(e, 1), (s_var, -1)], Relation::Ge, Rational::zero());
    }
    for v in 0..n {
        lp.add_row(g.incident(v).iter().map(|&(_, e)| (e, 1)).collect(), Relation::Le, one(2));
    }
    lp.add_row(vec![(s_var, 1)], Relation::Le, one(1));

    // every subset with at least one induced edge: (edges, |S|-1, tree cut needs slack?, odd set?)
    struct Cut {
        edges: Vec<usize>,
        bound: i64,
        tree_slack: bool,
        odd: bool,
    }
    let cuts: Vec<Cut> = (1u64..1 << n)
        .filter_map(|mask| {
            let edges = induced_edges(g, mask);
            let size = mask.count_ones() as i64;
            if edges.is_empty() || size < 2 {
                return None;
            }
            let edge_mask = edges.iter().fold(0u64, |acc, &e| acc | 1 << e);
            let forced = induced_connected(g, mask) && is_block_union(edge_mask, &block_edge_masks);
            Some(Cut {
                edges,
                bound: size - 1,
                tree_slack: !forced,
                odd: size >= 3 && size % 2 == 1,
            })
        })
        .collect();
    let mut added = vec![false; cuts.len()];
    let mut rounds = 0;
    let mut cut_count = 0;
    loop {
        rounds += 1;
        if rounds > caps.lp_iterations {
            return Err(Error::resource("cutting-plane rounds", caps.lp_iterations));
        }
        let sol = lp.solve(caps.lp_iterations)?;
        if sol.status != LpStatus::Optimal {
            return Ok(HyperplaneRoute {
                nonempty: false,
                slack: None,
                point: None,
                rounds,
                cuts: cut_count,
            });
        }
        let s = sol.x[s_var].clone();
        let x = &sol.x[..m];
        let xf: Vec<f64> = x.iter().map(Scalar::to_f64).collect();
        let sf = s.to_f64();
        // float screen, exact confirmation
        let mut new_cuts = Vec::new();
        for (i, cut) in cuts.iter().enumerate() {
            if added[i] {
                continue;
            }
            let lhs_f: f64 = cut.edges.iter().map(|&e| xf[e]).sum();
            let with_slack = if cut.tree_slack { sf } else { 0.0 };
            if lhs_f + with_slack < cut.bound as f64 - 1e-9 {
                continue;
            }
            let lhs = cut.edges.iter().fold(Rational::zero(), |acc, &e| acc + x[e].clone());
            let tree_violated = cut.tree_slack && lhs.clone() + s.clone() > one(cut.bound);
            let odd_violated = cut.odd && lhs > one(cut.bound);
            if tree_violated || odd_violated {
                new_cuts.push(i);
            }
        }
        if new_cuts.is_empty() {
            let nonempty = s.is_positive();
            return Ok(HyperplaneRoute {
                nonempty,
                point: nonempty.then(|| x.to_vec()),
                slack: Some(s),
                rounds,
                cuts: cut_count,
            });
        }
        for i in new_cuts {
            let cut = &cuts[i];
            let mut coeffs: Vec<(usize, i64)> = cut.edges.iter().map(|&e| (e, 1)).collect();
            if cut.tree_slack {
                coeffs.push((s_var, 1));
            }
            // with s ≥ 0 the slack row implies the plain odd-set row
            lp.add_row(coeffs, Relation::Le, one(cut.bound));
            added[i] = true;
            cut_count += 1;
        }
    }
}

/// Whether `x` is a convex combination of the given 0/1 points, decided by
/// an exact LP (`scale` multiplies each point, e.g. 2 for `2M(G)`).
pub fn in_hull(
    points: &[Vec<usize>],
    scale: i64,
    x: &[Rational],
    caps: &Caps,
) -> Result<bool> {
    let mut lp = LinearProgram::new(points.len());
    for (e, xe) in x.iter().enumerate() {
        let coeffs = points
            .iter()
            .enumerate()
            .filter(|(_, p)| p.contains(&e))
            .map(|(j, _)| (j, scale))
            .collect();
        lp.add_row(coeffs, Relation::Eq, xe.clone());
    }
    lp.add_row((0..points.len()).map(|j| (j, 1)).collect(), Relation::Eq, Rational::from_i64(1));
    Ok(lp.solve(caps.lp_iterations)?.status == LpStatus::Optimal)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NonSeparability {
    pub non_separable: bool,
    /// Largest uniform lower bound `t` on a positive distribution whose
    /// marginals lie in the hull of the chosen trees.
    pub t_star: String,
}

/// Decides whether `conv(e_T | T ∈ F)` meets the relative interior of
/// `P(G)`: maximize `t` such that a convex combination of `F` equals the
/// marginals of a distribution with every tree probability at least `t`.
pub fn non_separable(
    g: &Graph,
    trees: &SpanningTreeSet,
    subset: &[usize],
    caps: &Caps,
) -> Result<NonSeparability> {
    if subset.is_empty() {
        return Err(Error::Parameter("tree subset is empty".into()));
    }
    if let Some(&bad) = subset.iter().find(|&&i| i >= trees.len()) {
        return Err(Error::Parameter(format!("tree index {bad} out of range")));
    }
    let f = subset.len();
    let n_trees = trees.len();
    let t = f + n_trees;
    let mut lp = LinearProgram::new(t + 1);
    lp.set_objective(t, 1);
    for e in 0..g.edge_count() {
        let mut coeffs: Vec<(usize, i64)> = Vec::new();
        for (k, &i) in subset.iter().enumerate() {
            if trees.trees[i].contains(&e) {
                coeffs.push((k, 1));
            }
        }
        let mut count = 0;
        for (j, tree) in trees.iter().enumerate() {
            if tree.contains(&e) {
                coeffs.push((f + j, -1));
                count += 1;
            }
        }
        coeffs.push((t, -count));
        lp.add_row(coeffs, Relation::Eq, Rational::from_i64(0));
    }
    lp.add_row((0..f).map(|k| (k, 1)).collect(), Relation::Eq, Rational::from_i64(1));
    let mut sum_row: Vec<(usize, i64)> = (0..n_trees).map(|j| (f + j, 1)).collect();
    sum_row.push((t, n_trees as i64));
    lp.add_row(sum_row, Relation::Eq, Rational::from_i64(1));
    let sol = lp.solve(caps.lp_iterations)?;
    let value = sol
        .value
        .ok_or_else(|| Error::Consistency("non-separability program has no optimum".into()))?;
    Ok(NonSeparability {
        non_separable: value > Rational::from_i64(0),
        t_star: value.to_string(),
    })
}

/// Whether some inequality of the edge-subset system that is not an
/// implicit equality is tight at every tree of the subset, i.e. the hull of
/// the subset lies in a proper face.
pub fn in_proper_face(
    g: &Graph,
    trees: &SpanningTreeSet,
    subset: &[usize],
    caps: &Caps,
) -> Result<bool> {
    let system = tree_polytope_constraints(g, caps)?;
    let points: Vec<Vec<i64>> = subset
        .iter()
        .map(|&i| g.indicator(&trees.trees[i]).iter().map(|&b| b as i64).collect())
        .collect();
    Ok(system.constraints.iter().any(|c| {
        c.relation != Relation::Eq
            && points.iter().all(|p| {
                let lhs: i64 = c.edges.iter().map(|&e| p[e]).sum();
                lhs == c.bound
            })
    }))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IntegerPoints {
    pub k: usize,
    pub count: usize,
    pub points: Vec<Vec<i64>>,
}

impl IntegerPoints {
    /// One point per line, coordinates separated by spaces.
    pub fn to_text(&self) -> String {
        self.points
            .iter()
            .map(|p| p.iter().map(i64::to_string).collect::<Vec<_>>().join(" ") + "\n")
            .collect()
    }
}

struct LatticeSearch<'a> {
    g: &'a Graph,
    k: i64,
    target: i64,
    x: Vec<i64>,
    degree: Vec<i64>,
    /// Incident edges not yet assigned, per vertex.
    open: Vec<i64>,
    nodes: usize,
    cap: usize,
    out: Vec<Vec<i64>>,
}

impl LatticeSearch<'_> {
    fn feasible_vertex(&self, v: usize) -> bool {
        // every vertex has degree between k and 2k in kΘ(G) when |V| ≥ 2
        self.degree[v] <= 2 * self.k && self.degree[v] + self.k * self.open[v] >= self.k
    }

    fn run(&mut self, e: usize, sum: i64, forest: Option<&mut DisjointSets>) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.cap {
            return Err(Error::resource("lattice search nodes", self.cap));
        }
        let m = self.g.edge_count();
        if sum > self.target || sum + self.k * ((m - e) as i64) < self.target {
            return Ok(());
        }
        if e == m {
            if sum == self.target && scaled_theta_member(self.g, &self.x, self.k) {
                self.out.push(self.x.clone());
            }
            return Ok(());
        }
        let (u, v) = self.g.edge(e);
        self.open[u] -= 1;
        self.open[v] -= 1;
        let mut forest = forest;
        for value in (0..=self.k).rev() {
            self.x[e] = value;
            self.degree[u] += value;
            self.degree[v] += value;
            if self.feasible_vertex(u) && self.feasible_vertex(v) {
                match forest.as_deref_mut() {
                    Some(dsu) if value == 1 => {
                        if dsu.find(u) != dsu.find(v) {
                            let mut next = dsu.clone();
                            next.union(u, v);
                            self.run(e + 1, sum + value, Some(&mut next))?;
                        }
                    }
                    Some(dsu) => {
                        let mut next = dsu.clone();
                        self.run(e + 1, sum + value, Some(&mut next))?;
                    }
                    None => self.run(e + 1, sum + value, None)?,
                }
            }
            self.degree[u] -= value;
            self.degree[v] -= value;
        }
        self.x[e] = 0;
        self.open[u] += 1;
        self.open[v] += 1;
        Ok(())
    }
}

/// Exact test of `x ∈ kΘ(G)` for an integer vector.
fn scaled_theta_member(g: &Graph, x: &[i64], k: i64) -> bool {
    let n = g.vertex_count();
    let total: i64 = x.iter().sum();
    if total != k * (n as i64 - 1) || x.iter().any(|&v| v < 0 || v > k) {
        return false;
    }
    if (0..n).any(|v| g.incident(v).iter().map(|&(_, e)| x[e]).sum::<i64>() > 2 * k) {
        return false;
    }
    (1u64..1 << n).all(|mask| {
        let size = mask.count_ones() as i64;
        if size < 2 {
            true
        } else {
        let inside: i64 = g
            .edges()
            .iter()
            .enumerate()
            .filter(|(_, &(u, v))| mask >> u & 1 == 1 && mask >> v & 1 == 1)
            .map(|(e, _)| x[e])
            .sum();
            inside <= k * (size - 1)
        }
    })
}

/// All integer points of `kΘ(G)`, in decreasing lexicographic order of
/// the coordinate vectors.
pub fn theta_integer_points(g: &Graph, k: usize, caps: &Caps) -> Result<IntegerPoints> {
    if k == 0 {
        return Err(Error::Parameter("dilation factor must be positive".into()));
    }
    g.require_connected()?;
    let n = g.vertex_count();
    if n > caps.subset_vertices {
        return Err(Error::resource("vertex count for lattice search", caps.subset_vertices));
    }
    let k = k as i64;
    let mut search = LatticeSearch {
        g,
        k,
        target: k * (n as i64 - 1),
        x: vec![0; g.edge_count()],
        degree: vec![0; n],
        open: g.degrees().iter().map(|&d| d as i64).collect(),
        nodes: 0,
        cap: caps.lattice_candidates,
        out: Vec::new(),
    };
    if n == 1 {
        return Ok(IntegerPoints { k: k as usize, count: 1, points: vec![Vec::new()] });
    }
    if k == 1 {
        let mut dsu = DisjointSets::new(n);
        search.run(0, 0, Some(&mut dsu))?;
    } else {
        search.run(0, 0, None)?;
    }
    Ok(IntegerPoints {
        k: k as usize,
        count: search.out.len(),
        points: search.out,
    })
}

/// Whether every vertex `e_T` of `P(G)` lies in `2M(G)`.
pub fn theta_equals_p(g: &Graph, trees: &SpanningTreeSet, caps: &Caps) -> Result<bool> {
    if !crate::graph::is_biconnected(g)? {
        return Err(Error::Precondition("graph is not biconnected".into()));
    }
    let system = doubled_matching_constraints(g, caps)?;
    Ok(trees.iter().all(|t| {
        let x: Vec<Rational> = g.indicator(t).iter().map(|&b| Rational::from_i64(b as i64)).collect();
        system.first_violation(&x, false, 0.0).is_none()
    }))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HamiltonianPathBound {
    pub paths: usize,
    /// Dimension of the affine hull of the path indicators (-1 if none).
    pub affine_rank: i64,
    pub affinely_independent: usize,
    /// `|E| - #blocks`, the dimension of `P(G)`.
    pub required: i64,
    pub rn_implied: bool,
}

pub fn independent_hamiltonian_path_bound(g: &Graph) -> Result<HamiltonianPathBound> {
    let blocks = biconnected_components(g)?;
    let paths = hamiltonian_paths(g);
    let required = g.edge_count() as i64 - blocks.count() as i64;
    let affine_rank = match paths.first() {
        None => -1,
        Some(first) => {
            let base = g.indicator(first);
            let diffs: Vec<Vec<num_bigint::BigInt>> = paths[1..]
                .iter()
                .map(|p| {
                    g.indicator(p)
                        .iter()
                        .zip(&base)
                        .map(|(&a, &b)| num_bigint::BigInt::from(a as i64 - b as i64))
                        .collect()
                })
                .collect();
            integer_rank(&diffs) as i64
        }
    };
    Ok(HamiltonianPathBound {
        paths: paths.len(),
        affine_rank,
        affinely_independent: (affine_rank + 1) as usize,
        required,
        rn_implied: !paths.is_empty() && affine_rank >= required,
    })
}

/// Matching indicators scaled by two, as hull points of `2M(G)`.
pub fn matching_points(matchings: &MatchingSet) -> &[Vec<usize>] {
    &matchings.matchings
}
