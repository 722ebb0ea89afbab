//! The resistance capacity set function and the searches built on it.
//!
//! For a vertex set `U` with `|U| ≥ 2`,
//! `τ_U = ½ + ½ (1ᵀ Ω[U]⁻¹ 1)⁻¹`. The quadratic form is evaluated without
//! fractions: with `A = D·Ω` integral, `1ᵀ A[U]⁻¹ 1 = -det B_U / det A[U]`
//! where `B_U` borders `A[U]` with a row and column of ones.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::enumerate::Caps;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::matrix::{integer_determinant, Matrix};
use crate::resistance::{
    curvature, effective_resistances, is_normalized, laplacian_from_inverse_resistance,
    normalize_weights, Weights,
};
use crate::scalar::{format_rational, json_vec, Rational, Scalar};

fn members(mask: u32, n: usize) -> Vec<usize> {
    (0..n).filter(|&i| mask >> i & 1 == 1).collect()
}

/// `D·Ω` as an integer matrix together with `D`.
fn integral_resistance(omega: &Matrix<Rational>) -> (Vec<Vec<BigInt>>, BigInt) {
    let n = omega.rows();
    let mut den = BigInt::one();
    for u in 0..n {
        for v in 0..n {
            den = den.lcm(omega[(u, v)].denom());
        }
    }
    let rows = (0..n)
        .map(|u| {
            (0..n)
                .map(|v| omega[(u, v)].numer() * (&den / omega[(u, v)].denom()))
                .collect()
        })
        .collect();
    (rows, den)
}

fn capacity_of(a: &[Vec<BigInt>], den: &BigInt, mask: u32) -> Result<Rational> {
    let idx = members(mask, a.len());
    match idx.len() {
        0 => return Ok(Rational::zero()),
        1 => return Ok(Rational::half()),
        _ => {}
    }
    let sub: Vec<Vec<BigInt>> = idx.iter().map(|&u| idx.iter().map(|&v| a[u][v].clone()).collect()).collect();
    let det_a = integer_determinant(&sub);
    let mut bordered = sub;
    for row in bordered.iter_mut() {
        row.push(BigInt::one());
    }
    let mut last = vec![BigInt::one(); idx.len()];
    last.push(BigInt::zero());
    bordered.push(last);
    let det_b = integer_determinant(&bordered);
    if det_a.is_zero() || det_b.is_zero() {
        return Err(Error::Consistency(format!("resistance submatrix on {idx:?} is singular")));
    }
    // τ = ½ - det A[U] / (2 D det B_U)
    Ok(Rational::half() - Rational::new(det_a, BigInt::from(2) * den * det_b))
}

/// `τ_U(c)` for normalized weights.
pub fn resistance_capacity(g: &Graph, c: &Weights<Rational>, subset: &[usize]) -> Result<Rational> {
    let n = g.vertex_count();
    let mut mask = 0u32;
    for &u in subset {
        if u >= n || n > 31 {
            return Err(Error::Parameter(format!("vertex {u} out of range")));
        }
        mask |= 1 << u;
    }
    require_normalized(g, c)?;
    let (a, den) = integral_resistance(&effective_resistances(g, c)?);
    capacity_of(&a, &den, mask)
}

fn require_normalized(g: &Graph, c: &Weights<Rational>) -> Result<()> {
    if !is_normalized(g, c)? {
        return Err(Error::Precondition(
            "capacity needs normalized weights (Σ K = 1)".into(),
        ));
    }
    Ok(())
}

/// `τ` on every vertex subset, indexed by bitmask.
#[derive(Clone, Debug)]
pub struct CapacityTable {
    pub graph: Graph,
    pub weights: Weights<Rational>,
    pub values: Vec<Rational>,
}

impl CapacityTable {
    pub fn vertex_count(&self) -> usize {
        self.graph.vertex_count()
    }

    pub fn get(&self, mask: u32) -> &Rational {
        &self.values[mask as usize]
    }

    pub fn pair(&self, u: usize, v: usize) -> &Rational {
        self.get(1 << u | 1 << v)
    }

    /// `σ²_U = τ_U - ½` for nonempty `U`.
    pub fn sigma_squared(&self, mask: u32) -> Rational {
        if mask == 0 {
            Rational::zero()
        } else {
            self.get(mask).clone() - Rational::half()
        }
    }

    /// Conventions, range `[0, 1]` and monotonicity; returns every violation.
    pub fn invariant_violations(&self) -> Vec<String> {
        let n = self.vertex_count();
        let full = (1u32 << n) - 1;
        let mut out = Vec::new();
        if !self.get(0).is_zero() {
            out.push("τ_∅ ≠ 0".to_string());
        }
        if *self.get(full) != Rational::one() {
            out.push(format!("τ_V = {} ≠ 1", self.get(full)));
        }
        for v in 0..n {
            if *self.get(1 << v) != Rational::half() {
                out.push(format!("τ_{{{v}}} ≠ 1/2"));
            }
        }
        for (mask, value) in self.values.iter().enumerate() {
            if value.is_negative() || *value > Rational::one() {
                out.push(format!("τ_{mask} = {value} outside [0, 1]"));
            }
            for v in 0..n {
                let bigger = mask | 1 << v;
                if bigger != mask && self.values[bigger] < *value {
                    out.push(format!("τ not monotone from {mask} to {bigger}"));
                }
            }
        }
        out
    }

    pub fn to_json(&self) -> Value {
        let values: Vec<Value> = self
            .values
            .iter()
            .enumerate()
            .map(|(mask, v)| json!({"subset": mask, "tau": format_rational(v)}))
            .collect();
        json!({
            "graph": self.graph.to_json(),
            "weights": json_vec(self.weights.values()),
            "values": values,
        })
    }
}

/// Full table over `2^|V|` subsets (in parallel). The invariants are checked
/// before returning; a violation is an internal consistency error.
pub fn full_table(g: &Graph, c: &Weights<Rational>, caps: &Caps) -> Result<CapacityTable> {
    let n = g.vertex_count();
    if n > caps.capacity_vertices.min(31) {
        return Err(Error::resource("capacity table vertices", caps.capacity_vertices));
    }
    require_normalized(g, c)?;
    let (a, den) = integral_resistance(&effective_resistances(g, c)?);
    let values = (0..1u32 << n)
        .into_par_iter()
        .map(|mask| capacity_of(&a, &den, mask))
        .collect::<Result<Vec<_>>>()?;
    let table = CapacityTable {
        graph: g.clone(),
        weights: c.clone(),
        values,
    };
    let violations = table.invariant_violations();
    if let Some(first) = violations.first() {
        return Err(Error::Consistency(format!("capacity table: {first}")));
    }
    Ok(table)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SubmodularityReport {
    pub submodular: bool,
    /// Least `f(A) + f(B) - f(A∪B) - f(A∩B)` over incomparable pairs.
    #[serde(serialize_with = "crate::scalar::serialize_opt_rational")]
    pub min_slack: Option<Rational>,
    pub argmin: Option<(u32, u32)>,
    pub pairs: u64,
}

/// Scan all incomparable pairs. A float pass finds the minimum and every
/// pair within `1e-9` of zero or of the minimum; only those are re-checked
/// exactly, which keeps the verdict and the reported minimum exact.
fn scan_pairs(f: &[Rational], overlapping_only: bool) -> SubmodularityReport {
    let size = f.len() as u32;
    let approx: Vec<f64> = f.iter().map(Scalar::to_f64).collect();
    let admissible = move |a: u32, b: u32| {
        let i = a & b;
        i != a && i != b && (!overlapping_only || i != 0)
    };
    let slack_f = |a: u32, b: u32| {
        approx[a as usize] + approx[b as usize] - approx[(a | b) as usize] - approx[(a & b) as usize]
    };
    let (lowest, pairs) = (0..size)
        .into_par_iter()
        .map(|a| {
            let mut low = f64::INFINITY;
            let mut count = 0u64;
            for b in a + 1..size {
                if admissible(a, b) {
                    low = low.min(slack_f(a, b));
                    count += 1;
                }
            }
            (low, count)
        })
        .reduce(|| (f64::INFINITY, 0), |x, y| (x.0.min(y.0), x.1 + y.1));
    if pairs == 0 {
        return SubmodularityReport {
            submodular: true,
            min_slack: None,
            argmin: None,
            pairs,
        };
    }
    let threshold = lowest.max(0.0) + 1e-9;
    let candidates: Vec<(u32, u32)> = (0..size)
        .into_par_iter()
        .flat_map_iter(|a| {
            (a + 1..size)
                .filter(move |&b| admissible(a, b) && slack_f(a, b) <= threshold)
                .map(move |b| (a, b))
        })
        .collect();
    let slack = |a: u32, b: u32| {
        f[a as usize].clone() + f[b as usize].clone() - f[(a | b) as usize].clone() - f[(a & b) as usize].clone()
    };
    let mut best: Option<(Rational, (u32, u32))> = None;
    for (a, b) in candidates {
        let s = slack(a, b);
        if best.as_ref().map_or(true, |(m, _)| s < *m) {
            best = Some((s, (a, b)));
        }
    }
    let (min_slack, argmin) = best.expect("the float minimum is always a candidate");
    SubmodularityReport {
        submodular: !min_slack.is_negative(),
        min_slack: Some(min_slack),
        argmin: Some(argmin),
        pairs,
    }
}

/// `τ(A) + τ(B) ≥ τ(A∪B) + τ(A∩B)` for all pairs.
pub fn is_submodular(table: &CapacityTable) -> SubmodularityReport {
    scan_pairs(&table.values, false)
}

/// The same inequality for `σ²`, either on all pairs or only on pairs
/// that intersect.
pub fn sigma_squared_submodularity(table: &CapacityTable, overlapping_only: bool) -> SubmodularityReport {
    let shifted: Vec<Rational> = (0..table.values.len() as u32).map(|m| table.sigma_squared(m)).collect();
    scan_pairs(&shifted, overlapping_only)
}

/// Rebuild the graph and its normalized weights from pair capacities via
/// `ω = 4τ - 2`, `K = Ω⁻¹` and `L = -2K + 2(K1)(K1)ᵀ`.
pub fn recover_graph(n: usize, pair: impl Fn(usize, usize) -> Rational) -> Result<(Graph, Weights<Rational>)> {
    if n < 2 {
        return Err(Error::Data("need at least two vertices".into()));
    }
    let omega = Matrix::from_fn(n, n, |u, v| {
        if u == v {
            Rational::zero()
        } else {
            Rational::from_i64(4) * pair(u.min(v), u.max(v)) - Rational::from_i64(2)
        }
    });
    let k = omega
        .inverse()
        .ok_or_else(|| Error::Data("pair capacities give a singular resistance matrix".into()))?;
    let l = laplacian_from_inverse_resistance(&k);
    let mut edges = Vec::new();
    let mut weights = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            let w = -l[(u, v)].clone();
            if w.is_positive() {
                edges.push((u, v));
                weights.push(w);
            } else if w.is_negative() {
                return Err(Error::Data(format!("reconstructed Laplacian has a positive entry at ({u}, {v})")));
            }
        }
    }
    let g = Graph::new(n, edges)?;
    if !g.is_connected() {
        return Err(Error::Data("reconstructed graph is disconnected".into()));
    }
    let c = Weights::new(&g, weights)?;
    if effective_resistances(&g, &c)? != omega {
        return Err(Error::Data("pair capacities are not the resistances of any weighted graph".into()));
    }
    Ok((g, c))
}

pub fn recover_from_table(table: &CapacityTable) -> Result<(Graph, Weights<Rational>)> {
    recover_graph(table.vertex_count(), |u, v| table.pair(u, v).clone())
}

/// Integer weights in `[1, 100]`, then normalized exactly.
pub fn random_normalized_weights(g: &Graph, rng: &mut impl Rng) -> Result<Weights<Rational>> {
    let raw = (0..g.edge_count()).map(|_| Rational::from_i64(rng.gen_range(1..=100))).collect();
    normalize_weights(g, &Weights::new(g, raw)?)
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ConjectureCounts {
    pub submodular_and_nonneg: usize,
    pub submodular_and_neg: usize,
    pub nonsub_and_nonneg: usize,
    pub nonsub_and_neg: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConjectureReport {
    pub samples: usize,
    pub seed: u64,
    pub counts: ConjectureCounts,
    /// Samples with `p ≥ 0` whose capacity is not submodular.
    pub theorem_violations: usize,
    /// Intersecting pairs on which `σ²` fails the inequality.
    pub sigma_overlap_violations: usize,
    /// Least curvature seen among submodular samples.
    pub min_curvature_when_submodular: Option<String>,
    pub counterexamples: Vec<Value>,
}

impl ConjectureReport {
    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("report serializes")
    }
}

struct Sample {
    submodular: bool,
    min_p: Rational,
    sigma_ok: bool,
    payload: Option<(&'static str, Value)>,
}

fn run_sample(g: &Graph, seed: u64, index: u64, caps: &Caps) -> Result<Sample> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let c = random_normalized_weights(g, &mut rng)?;
    let p = curvature(g, &c)?;
    let min_p = p.iter().min().cloned().unwrap_or_else(Rational::zero);
    let table = full_table(g, &c, caps)?;
    let sub = is_submodular(&table);
    let sigma_ok = sigma_squared_submodularity(&table, true).submodular;
    let kind = match (sub.submodular, min_p.is_negative()) {
        (true, true) => Some("conjecture_counterexample"),
        (false, false) => Some("theorem_violation"),
        _ => None,
    };
    let payload = kind.map(|k| {
        (
            k,
            json!({
                "kind": k,
                "sample": index,
                "graph": g.to_json(),
                "weights": json_vec(c.values()),
                "curvature": json_vec(&p),
                "table": table.to_json(),
                "submodularity": sub,
            }),
        )
    });
    Ok(Sample {
        submodular: sub.submodular,
        min_p,
        sigma_ok,
        payload,
    })
}

/// Sample random normalized weights and tabulate (submodular?, p ≥ 0?).
/// Sample `i` draws from stream `i` of the master seed, so results do not
/// depend on scheduling.
pub fn conjecture_search(g: &Graph, samples: usize, seed: u64, caps: &Caps) -> Result<ConjectureReport> {
    g.require_connected()?;
    if g.vertex_count() > caps.capacity_vertices {
        return Err(Error::resource("capacity table vertices", caps.capacity_vertices));
    }
    let results = (0..samples as u64)
        .into_par_iter()
        .map(|i| run_sample(g, seed, i, caps))
        .collect::<Result<Vec<_>>>()?;
    let mut counts = ConjectureCounts::default();
    let mut report_min: Option<Rational> = None;
    let mut counterexamples = Vec::new();
    let mut theorem_violations = 0;
    let mut sigma_overlap_violations = 0;
    for s in results {
        let nonneg = !s.min_p.is_negative();
        match (s.submodular, nonneg) {
            (true, true) => counts.submodular_and_nonneg += 1,
            (true, false) => counts.submodular_and_neg += 1,
            (false, true) => counts.nonsub_and_nonneg += 1,
            (false, false) => counts.nonsub_and_neg += 1,
        }
        if s.submodular && report_min.as_ref().map_or(true, |m| s.min_p < *m) {
            report_min = Some(s.min_p.clone());
        }
        if !s.sigma_ok {
            sigma_overlap_violations += 1;
        }
        if let Some((kind, payload)) = s.payload {
            if kind == "theorem_violation" {
                theorem_violations += 1;
            }
            counterexamples.push(payload);
        }
    }
    Ok(ConjectureReport {
        samples,
        seed,
        counts,
        theorem_violations,
        sigma_overlap_violations,
        min_curvature_when_submodular: report_min.as_ref().map(format_rational),
        counterexamples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(p: i64, d: i64) -> Rational {
        Rational::from_ratio(p, d)
    }

    fn normalized_unit(g: &Graph) -> Weights<Rational> {
        normalize_weights(g, &Weights::unit(g)).unwrap()
    }

    #[test]
    fn conventions_and_pairs() {
        let c4 = Graph::cycle(4).unwrap();
        let c = normalized_unit(&c4);
        assert_eq!(resistance_capacity(&c4, &c, &[]).unwrap(), q(0, 1));
        assert_eq!(resistance_capacity(&c4, &c, &[2]).unwrap(), q(1, 2));
        assert_eq!(resistance_capacity(&c4, &c, &[0, 1, 2, 3]).unwrap(), q(1, 1));
        let omega = effective_resistances(&c4, &c).unwrap();
        for (u, v) in [(0, 1), (0, 2), (1, 3)] {
            let tau = resistance_capacity(&c4, &c, &[u, v]).unwrap();
            assert_eq!(tau, q(1, 2) + q(1, 4) * omega[(u, v)].clone());
        }
    }

    #[test]
    fn non_normalized_weights_are_rejected() {
        let c3 = Graph::cycle(3).unwrap();
        let err = resistance_capacity(&c3, &Weights::unit(&c3), &[0, 1]);
        assert!(matches!(err, Err(Error::Precondition(_))));
    }

    #[test]
    fn k2_table() {
        let k2 = Graph::path(2).unwrap();
        let t = full_table(&k2, &normalized_unit(&k2), &Caps::default()).unwrap();
        assert_eq!(t.values, vec![q(0, 1), q(1, 2), q(1, 2), q(1, 1)]);
    }

    #[test]
    fn triangle_table_is_symmetric_and_submodular() {
        let c3 = Graph::cycle(3).unwrap();
        let t = full_table(&c3, &normalized_unit(&c3), &Caps::default()).unwrap();
        assert_eq!(t.pair(0, 1), t.pair(0, 2));
        assert_eq!(t.pair(1, 2), t.pair(0, 2));
        assert!(t.get(0b001) <= t.get(0b011) && t.get(0b011) <= t.get(0b111));
        let rep = is_submodular(&t);
        assert!(rep.submodular);
        // singletons: τ_a + τ_b = 1 = τ_V ≥ τ_ab
        assert!(t.get(1) + t.get(2) >= t.get(3) + t.get(0));
        let sigma = sigma_squared_submodularity(&t, false);
        assert!(!sigma.submodular);
        let (a, b) = sigma.argmin.unwrap();
        assert_eq!((a & b, (a | b).count_ones()), (0, 2));
        assert!(sigma_squared_submodularity(&t, true).submodular);
    }

    #[test]
    fn recovery_round_trips() {
        for g in [Graph::cycle(3).unwrap(), Graph::complete_bipartite(2, 3).unwrap()] {
            let raw = Weights::new(&g, (1..=g.edge_count() as i64).map(|i| q(i, 1)).collect()).unwrap();
            let c = normalize_weights(&g, &raw).unwrap();
            let t = full_table(&g, &c, &Caps::default()).unwrap();
            let (h, d) = recover_from_table(&t).unwrap();
            assert_eq!(h, g);
            assert_eq!(d, c);
        }
    }

    #[test]
    fn corrupted_pair_is_a_data_error() {
        let c3 = Graph::cycle(3).unwrap();
        let t = full_table(&c3, &normalized_unit(&c3), &Caps::default()).unwrap();
        let err = recover_graph(3, |u, v| {
            let base = t.pair(u, v).clone();
            if (u, v) == (0, 1) {
                base + q(1, 1)
            } else {
                base
            }
        });
        assert!(matches!(err, Err(Error::Data(_))));
    }

    #[test]
    fn search_on_triangle_and_k24() {
        let c3 = Graph::cycle(3).unwrap();
        let rep = conjecture_search(&c3, 100, 1, &Caps::default()).unwrap();
        assert_eq!(rep.theorem_violations, 0);
        assert_eq!(rep.counts.submodular_and_nonneg, 100);

        let k24 = Graph::complete_bipartite(2, 4).unwrap();
        let rep = conjecture_search(&k24, 100, 1, &Caps::default()).unwrap();
        assert_eq!(rep.counts.submodular_and_nonneg + rep.counts.nonsub_and_nonneg, 0);
        assert_eq!(rep.theorem_violations, 0);
    }

    #[test]
    fn search_is_deterministic() {
        let k4 = Graph::complete(4).unwrap();
        let a = conjecture_search(&k4, 8, 42, &Caps::default()).unwrap();
        let b = conjecture_search(&k4, 8, 42, &Caps::default()).unwrap();
        assert_eq!(a.to_json(), b.to_json());
    }

    #[test]
    fn table_cap() {
        let caps = Caps { capacity_vertices: 3, ..Caps::default() };
        let c4 = Graph::cycle(4).unwrap();
        let err = full_table(&c4, &normalized_unit(&c4), &caps);
        assert!(matches!(err, Err(Error::Resource { .. })));
    }
}
