//! Kron reduction and circle inversion with matched weights.

use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::graph::{biconnected_components, Graph};
use crate::matrix::Matrix;
use crate::resistance::{curvature, effective_resistances, laplacian, Weights};
use crate::scalar::{json_vec, vec_approx_eq, Scalar, NUMERIC_TOL};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Operation {
    Kron { removed: Vec<usize> },
    Cinv { vertex: usize },
}

#[derive(Clone, Debug)]
pub struct TransformRecord<S> {
    pub operation: Operation,
    pub input: Graph,
    pub input_weights: Weights<S>,
    pub output: Graph,
    pub output_weights: Weights<S>,
    /// `vertex_map[new] = old` (for circle inversion the new vertex keeps
    /// the id of the inverted one).
    pub vertex_map: Vec<usize>,
    /// Curvature on the output as predicted by the update lemma.
    pub predicted: Vec<S>,
    pub recomputed: Vec<S>,
}

impl<S: Scalar> TransformRecord<S> {
    pub fn lemma_holds(&self) -> bool {
        vec_approx_eq(&self.predicted, &self.recomputed, NUMERIC_TOL)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "operation": self.operation,
            "input": {"graph": self.input.to_json(), "weights": json_vec(self.input_weights.values())},
            "output": {"graph": self.output.to_json(), "weights": json_vec(self.output_weights.values())},
            "vertex_map": self.vertex_map,
            "predicted_curvature": json_vec(&self.predicted),
            "recomputed_curvature": json_vec(&self.recomputed),
            "lemma_holds": self.lemma_holds(),
        })
    }
}

/// Symmetric weight matrix with an explicit adjacency pattern, so that
/// exact zeros in floating point never masquerade as edges.
struct Network<S> {
    alive: Vec<bool>,
    adjacent: Vec<Vec<bool>>,
    w: Matrix<S>,
}

impl<S: Scalar> Network<S> {
    fn new(g: &Graph, c: &Weights<S>) -> Self {
        let n = g.vertex_count();
        let mut adjacent = vec![vec![false; n]; n];
        let mut w = Matrix::zeros(n, n);
        for (e, &(u, v)) in g.edges().iter().enumerate() {
            adjacent[u][v] = true;
            adjacent[v][u] = true;
            w[(u, v)] = c[e].clone();
            w[(v, u)] = c[e].clone();
        }
        Network {
            alive: vec![true; n],
            adjacent,
            w,
        }
    }

    fn neighbors(&self, x: usize) -> Vec<usize> {
        (0..self.alive.len())
            .filter(|&y| self.alive[y] && self.adjacent[x][y])
            .collect()
    }

    fn strength(&self, x: usize) -> S {
        self.neighbors(x)
            .into_iter()
            .fold(S::zero(), |acc, y| acc + self.w[(x, y)].clone())
    }

    /// Single-vertex reduction with matched weights; returns the updated
    /// curvature predicted by the update lemma.
    fn eliminate(&mut self, x: usize, p: &[S]) -> Vec<S> {
        let nbrs = self.neighbors(x);
        let total = self.strength(x);
        let mut next = p.to_vec();
        for &v in &nbrs {
            next[v] += self.w[(x, v)].clone() * p[x].clone() / total.clone();
        }
        for (i, &u) in nbrs.iter().enumerate() {
            for &v in &nbrs[i + 1..] {
                let add = self.w[(u, x)].clone() * self.w[(x, v)].clone() / total.clone();
                let merged = self.w[(u, v)].clone() + add;
                self.w[(u, v)] = merged.clone();
                self.w[(v, u)] = merged;
                self.adjacent[u][v] = true;
                self.adjacent[v][u] = true;
            }
        }
        self.alive[x] = false;
        next
    }
}

/// `L[S,S] - L[S,U] L[U,U]^{-1} L[U,S]` for the surviving set `S`.
pub fn schur_complement<S: Scalar>(l: &Matrix<S>, keep: &[usize], removed: &[usize]) -> Result<Matrix<S>> {
    let luu = l.principal(removed);
    let inv = luu
        .inverse()
        .ok_or_else(|| Error::Consistency("Laplacian block on the removed set is singular".into()))?;
    let lsu = l.submatrix(keep, removed);
    let lus = l.submatrix(removed, keep);
    let correction = lsu.mul(&inv).mul(&lus);
    let lss = l.principal(keep);
    Ok(Matrix::from_fn(keep.len(), keep.len(), |a, b| {
        lss[(a, b)].clone() - correction[(a, b)].clone()
    }))
}

/// Reduce the vertex set `removed` (eliminated in the given order) with
/// matched weights. The sequential weights are checked against the Schur
/// complement, and surviving vertices are renumbered in increasing order.
pub fn kron_reduce<S: Scalar>(
    g: &Graph,
    c: &Weights<S>,
    removed: &[usize],
) -> Result<TransformRecord<S>> {
    let n = g.vertex_count();
    let mut seen = vec![false; n];
    for &u in removed {
        if u >= n || std::mem::replace(&mut seen[u], true) {
            return Err(Error::Parameter(format!("bad or repeated vertex {u} in reduction set")));
        }
    }
    if removed.is_empty() || removed.len() >= n {
        return Err(Error::Parameter("reduction set must be a nonempty proper subset".into()));
    }
    // G - U itself may be disconnected (the middle of a path): elimination
    // joins all of ∂U, so a connected G always reduces to a connected graph
    g.require_connected()?;
    let keep: Vec<usize> = (0..n).filter(|&v| !seen[v]).collect();

    let mut net = Network::new(g, c);
    let mut p = curvature(g, c)?;
    for &x in removed {
        p = net.eliminate(x, &p);
    }

    let mut sorted_removed = removed.to_vec();
    sorted_removed.sort_unstable();
    let schur = schur_complement(&laplacian(g, c)?, &keep, &sorted_removed)?;
    let mut edges = Vec::new();
    let mut weights = Vec::new();
    for (a, &u) in keep.iter().enumerate() {
        for (b, &v) in keep.iter().enumerate().skip(a + 1) {
            let from_schur = -schur[(a, b)].clone();
            let sequential = net.adjacent[u][v].then(|| net.w[(u, v)].clone());
            let schur_edge = from_schur.sign(NUMERIC_TOL) != std::cmp::Ordering::Equal;
            match sequential {
                Some(w) if schur_edge && w.approx_eq(&from_schur, NUMERIC_TOL) => {
                    edges.push((a, b));
                    weights.push(w);
                }
                None if !schur_edge => {}
                _ => {
                    return Err(Error::Consistency(format!(
                        "sequential and Schur-complement weights differ on {u}-{v}"
                    )))
                }
            }
        }
    }
    let output = Graph::new(keep.len(), edges)?;
    let output_weights = Weights::new(&output, weights)?;
    let recomputed = curvature(&output, &output_weights)?;
    Ok(TransformRecord {
        operation: Operation::Kron {
            removed: removed.to_vec(),
        },
        input: g.clone(),
        input_weights: c.clone(),
        predicted: keep.iter().map(|&v| p[v].clone()).collect(),
        output,
        output_weights,
        vertex_map: keep,
        recomputed,
    })
}

/// Single-vertex update lemma for Kron reduction: neighbours of `x` gain
/// `c_xv p_x / Σ c_xy`, everyone else is unchanged.
pub fn kron_curvature_check<S: Scalar>(record: &TransformRecord<S>) -> Result<bool> {
    match &record.operation {
        Operation::Kron { removed } if removed.len() == 1 => Ok(record.lemma_holds()),
        _ => Err(Error::Parameter("expected a single-vertex Kron reduction".into())),
    }
}

/// Update lemma for circle inversion (all three clauses).
pub fn cinv_curvature_check<S: Scalar>(record: &TransformRecord<S>) -> Result<bool> {
    match record.operation {
        Operation::Cinv { .. } => Ok(record.lemma_holds()),
        _ => Err(Error::Parameter("expected a circle inversion record".into())),
    }
}

/// Whether effective resistances among surviving vertices are unchanged.
pub fn kron_preserves_resistance<S: Scalar>(record: &TransformRecord<S>) -> Result<bool> {
    let before = effective_resistances(&record.input, &record.input_weights)?;
    let after = effective_resistances(&record.output, &record.output_weights)?;
    let map = &record.vertex_map;
    Ok((0..map.len()).all(|a| {
        (0..map.len()).all(|b| after[(a, b)].approx_eq(&before[(map[a], map[b])], NUMERIC_TOL))
    }))
}

/// Circle inversion over `x`: requires `p(c) ≥ 0`. The new vertex keeps
/// id `x`, is joined to every `y` with `p_y > 0` by weight `2 p_y ω_xy`,
/// and every other edge `uv` gets weight `c_uv ω_ux ω_xv`.
pub fn circle_invert<S: Scalar>(g: &Graph, c: &Weights<S>, x: usize) -> Result<TransformRecord<S>> {
    let n = g.vertex_count();
    if x >= n {
        return Err(Error::Parameter(format!("vertex {x} out of range")));
    }
    let omega = effective_resistances(g, c)?;
    let p = curvature(g, c)?;
    if let Some(v) = (0..n).find(|&v| p[v].sign(NUMERIC_TOL) == std::cmp::Ordering::Less) {
        return Err(Error::Precondition(format!(
            "circle inversion needs nonnegative curvature, but p_{v} = {}",
            p[v]
        )));
    }
    let mut pairs: Vec<((usize, usize), S)> = Vec::new();
    for (e, &(u, v)) in g.edges().iter().enumerate() {
        if u != x && v != x {
            pairs.push((
                (u, v),
                c[e].clone() * omega[(u, x)].clone() * omega[(x, v)].clone(),
            ));
        }
    }
    for y in (0..n).filter(|&y| y != x) {
        if p[y].sign(NUMERIC_TOL) == std::cmp::Ordering::Greater {
            pairs.push((
                (x.min(y), x.max(y)),
                S::from_i64(2) * p[y].clone() * omega[(x, y)].clone(),
            ));
        }
    }
    pairs.sort_by(|a, b| a.0.cmp(&b.0));
    let output = Graph::new(n, pairs.iter().map(|(e, _)| *e))?;
    if !output.is_connected() {
        return Err(Error::Disconnected(format!(
            "circle inversion over {x} leaves a disconnected graph"
        )));
    }
    let output_weights = Weights::new(&output, pairs.into_iter().map(|(_, w)| w).collect())?;
    let predicted: Vec<S> = (0..n)
        .map(|v| {
            if v == x {
                p[x].clone()
            } else if let Some(e) = g.edge_index(x, v) {
                S::half() * c[e].clone() * omega[(x, v)].clone()
            } else {
                S::zero()
            }
        })
        .collect();
    let recomputed = curvature(&output, &output_weights)?;
    Ok(TransformRecord {
        operation: Operation::Cinv { vertex: x },
        input: g.clone(),
        input_weights: c.clone(),
        output,
        output_weights,
        vertex_map: (0..n).collect(),
        predicted,
        recomputed,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Comparison {
    pub same_graph: bool,
    /// Weights agree up to one positive factor per block.
    pub blockwise_proportional: bool,
}

impl Comparison {
    pub fn equivalent(&self) -> bool {
        self.same_graph && self.blockwise_proportional
    }
}

/// Compare two weighted graphs on the same labelled vertex set.
pub fn compare_weighted<S: Scalar>(
    g1: &Graph,
    c1: &Weights<S>,
    g2: &Graph,
    c2: &Weights<S>,
) -> Result<Comparison> {
    if g1 != g2 {
        return Ok(Comparison {
            same_graph: false,
            blockwise_proportional: false,
        });
    }
    let blocks = biconnected_components(g1)?;
    let proportional = blocks.blocks.iter().all(|block| {
        let base = c1[block[0]].clone() / c2[block[0]].clone();
        block
            .iter()
            .all(|&e| (c1[e].clone() / c2[e].clone()).approx_eq(&base, NUMERIC_TOL))
    });
    Ok(Comparison {
        same_graph: true,
        blockwise_proportional: proportional,
    })
}

/// `cinv_x̂ ∘ cinv_x` against the identity.
pub fn cinv_involution<S: Scalar>(g: &Graph, c: &Weights<S>, x: usize) -> Result<Comparison> {
    let once = circle_invert(g, c, x)?;
    let twice = circle_invert(&once.output, &once.output_weights, x)?;
    compare_weighted(g, c, &twice.output, &twice.output_weights)
}

/// `cinv_x ∘ cinv_y` against `cinv_y ∘ cinv_x` (vertex ids are stable
/// under inversion, so no relabeling is needed).
pub fn cinv_commutation<S: Scalar>(
    g: &Graph,
    c: &Weights<S>,
    x: usize,
    y: usize,
) -> Result<Comparison> {
    let a1 = circle_invert(g, c, y)?;
    let a = circle_invert(&a1.output, &a1.output_weights, x)?;
    let b1 = circle_invert(g, c, x)?;
    let b = circle_invert(&b1.output, &b1.output_weights, y)?;
    compare_weighted(&a.output, &a.output_weights, &b.output, &b.output_weights)
}
