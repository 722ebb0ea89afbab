//! Exact classification of graphs as RP, SRN or not RN.
//!
//! A graph is RN (resp. RP) exactly when some positive distribution on its
//! spanning trees has expected degree at most 2 (resp. below 2) at every
//! vertex. Writing `μ_T = t + ν_T` with `ν ≥ 0`, that becomes a linear
//! program in `(ν, t)` maximizing `t`; the graph qualifies iff `t* > 0`.
//! Trees with identical degree sequences give identical columns and are
//! merged into one variable, the mass of which is split evenly.

use std::collections::BTreeMap;

use num_traits::{Signed, Zero};
use serde::Serialize;
use serde_json::{json, Value};

use crate::enumerate::{
    enumerate_matchings, enumerate_spanning_trees, is_one_tough, maximum_matching_size, Caps,
    SpanningTreeSet,
};
use crate::error::{Error, Result};
use crate::fitting::{fit_weights, FitOptions, FitResult};
use crate::graph::Graph;
use crate::lp::{LinearProgram, LpStatus, Relation};
use crate::resistance::{
    curvature, edge_marginals, DistributionKind, TreeDistribution, Weights,
};
use crate::scalar::{json_vec, rationalize, Rational, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Class {
    #[serde(rename = "RP")]
    Rp,
    #[serde(rename = "SRN")]
    Srn,
    #[serde(rename = "NOT_RN")]
    NotRn,
}

impl Class {
    pub fn is_rn(self) -> bool {
        self != Class::NotRn
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Class::Rp => "RP",
            Class::Srn => "SRN",
            Class::NotRn => "NOT_RN",
        }
    }
}

impl std::fmt::Display for Class {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Outcome of one degree program.
#[derive(Clone, Debug)]
pub struct Decision {
    pub feasible: bool,
    /// `None` when even `t = 0` is infeasible (no distribution at all has
    /// expected degrees within the bound).
    pub t_star: Option<Rational>,
    pub distribution: Option<TreeDistribution>,
    /// Optimal dual multipliers (vertex rows, then the normalization row).
    pub duals: Vec<Rational>,
    pub program: LinearProgram,
}

/// `max t` s.t. `Σ_k deg_k(v) ν_k + (D_v + [strict]) t ≤ 2` for every
/// vertex, `Σ ν_k + N t = 1`, with `D_v` the total degree of `v` over all
/// trees.
fn degree_program(
    g: &Graph,
    trees: &SpanningTreeSet,
    strict: bool,
    caps: &Caps,
) -> Result<Decision> {
    let n = g.vertex_count();
    let count = trees.len();
    let mut classes: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
    for i in 0..count {
        classes.entry(trees.degrees(g, i)).or_default().push(i);
    }
    let classes: Vec<(Vec<usize>, Vec<usize>)> = classes.into_iter().collect();
    let t_var = classes.len();
    let mut lp = LinearProgram::new(t_var + 1);
    lp.set_objective(t_var, 1);
    for v in 0..n {
        let mut coeffs: Vec<(usize, i64)> = Vec::new();
        let mut total = 0i64;
        for (k, (deg, members)) in classes.iter().enumerate() {
            if deg[v] > 0 {
                coeffs.push((k, deg[v] as i64));
                total += (deg[v] * members.len()) as i64;
            }
        }
        coeffs.push((t_var, total + strict as i64));
        lp.add_row(coeffs, Relation::Le, Rational::from_i64(2));
    }
    let mut normalization: Vec<(usize, i64)> = (0..t_var).map(|k| (k, 1)).collect();
    normalization.push((t_var, count as i64));
    lp.add_row(normalization, Relation::Eq, Rational::from_i64(1));

    let solution = lp.solve(caps.lp_iterations)?;
    if solution.status != LpStatus::Optimal {
        return Ok(Decision {
            feasible: false,
            t_star: None,
            distribution: None,
            duals: Vec::new(),
            program: lp,
        });
    }
    let t = solution.x[t_var].clone();
    let feasible = t.is_positive();
    let distribution = feasible.then(|| {
        let mut mu = vec![t.clone(); count];
        for (k, (_, members)) in classes.iter().enumerate() {
            let share = solution.x[k].clone() / Rational::from_i64(members.len() as i64);
            if !share.is_zero() {
                for &i in members {
                    mu[i] += share.clone();
                }
            }
        }
        TreeDistribution {
            probabilities: mu,
            kind: DistributionKind::Positive,
        }
    });
    Ok(Decision {
        feasible,
        t_star: Some(t),
        distribution,
        duals: solution.duals,
        program: lp,
    })
}

pub fn decide_rn(g: &Graph, trees: &SpanningTreeSet, caps: &Caps) -> Result<Decision> {
    degree_program(g, trees, false, caps)
}

pub fn decide_rp(g: &Graph, trees: &SpanningTreeSet, caps: &Caps) -> Result<Decision> {
    degree_program(g, trees, true, caps)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Flags {
    pub near_perfect_matching: bool,
    /// Absent when the graph exceeds the brute-force toughness cap.
    pub one_tough: Option<bool>,
}

#[derive(Clone, Debug)]
pub struct Verdict {
    pub class: Class,
    pub t_star: Option<Rational>,
    pub witness: Option<TreeDistribution>,
    pub marginals: Option<Vec<Rational>>,
    pub flags: Flags,
    /// Dual solution of the strict program proving `t* ≤ 0` when not RP.
    pub not_rp_certificate: Option<Vec<Rational>>,
}

impl Verdict {
    pub fn to_json(&self, trees: &SpanningTreeSet) -> Value {
        let witness_trees: Vec<Value> = self
            .witness
            .as_ref()
            .map(|mu| {
                trees
                    .iter()
                    .zip(&mu.probabilities)
                    .map(|(t, p)| json!({"edges": t, "prob": p.to_string()}))
                    .collect()
            })
            .unwrap_or_default();
        let mut out = json!({
            "class": self.class,
            "t_star": self.t_star.as_ref().map(|t| t.to_string()),
            "witness_trees": witness_trees,
            "marginals": self.marginals.as_ref().map(|m| json_vec(m)).unwrap_or(json!([])),
            "flags": self.flags,
        });
        if let Some(cert) = &self.not_rp_certificate {
            out["not_rp_certificate"] = json_vec(cert);
        }
        out
    }
}

/// RP if the strict program succeeds, else SRN if the weak one does, else
/// not RN. Consistency with 1-toughness (for RP) and near-perfect matchings
/// (for RN) is enforced.
pub fn classify(g: &Graph, caps: &Caps) -> Result<(Verdict, SpanningTreeSet)> {
    let trees = enumerate_spanning_trees(g, caps)?;
    let verdict = classify_with_trees(g, &trees, caps)?;
    Ok((verdict, trees))
}

pub fn classify_with_trees(g: &Graph, trees: &SpanningTreeSet, caps: &Caps) -> Result<Verdict> {
    g.require_connected()?;
    let rp = decide_rp(g, trees, caps)?;
    let (class, decision, certificate) = if rp.feasible {
        (Class::Rp, rp, None)
    } else {
        let certificate = rp.t_star.is_some().then(|| rp.duals.clone());
        if let Some(cert) = &certificate {
            if rp.program.dual_bound(cert) != Some(Rational::zero()) {
                return Err(Error::Consistency("strict program dual does not certify t* = 0".into()));
            }
        }
        let rn = decide_rn(g, trees, caps)?;
        let class = if rn.feasible { Class::Srn } else { Class::NotRn };
        (class, rn, certificate)
    };
    let n = g.vertex_count();
    let near_perfect_matching = maximum_matching_size(g, caps)? == n / 2;
    let one_tough = if n <= caps.brute_force_vertices {
        Some(is_one_tough(g, caps)?.one_tough)
    } else {
        None
    };
    if class == Class::Rp && one_tough == Some(false) {
        return Err(Error::Consistency(format!("{g} classified RP but is not 1-tough")));
    }
    if class.is_rn() && !near_perfect_matching {
        return Err(Error::Consistency(format!("{g} classified RN but has no near-perfect matching")));
    }
    let marginals = match &decision.distribution {
        Some(mu) => Some(edge_marginals(g, trees, &mu.probabilities)?),
        None => None,
    };
    Ok(Verdict {
        class,
        t_star: decision.t_star,
        witness: decision.distribution,
        marginals,
        flags: Flags {
            near_perfect_matching,
            one_tough,
        },
        not_rp_certificate: certificate,
    })
}

#[derive(Clone, Debug)]
pub struct ThetaRoute {
    pub nonempty: bool,
    pub t_star: Option<Rational>,
    /// A point of `P(G)° ∩ 2M(G)` when one exists.
    pub point: Option<Vec<Rational>>,
}

/// Independent test for `P(G)° ∩ 2M(G) ≠ ∅`: the same point must be the
/// marginal vector of a positive tree distribution (`μ_T = t + ν_T`) and
/// twice a convex combination of matchings.
pub fn theta_route(g: &Graph, trees: &SpanningTreeSet, caps: &Caps) -> Result<ThetaRoute> {
    let matchings = enumerate_matchings(g, caps)?;
    let nt = trees.len();
    let nm = matchings.matchings.len();
    let t_var = nt;
    let lambda = |k: usize| nt + 1 + k;
    let mut lp = LinearProgram::new(nt + 1 + nm);
    lp.set_objective(t_var, 1);
    let m = g.edge_count();
    let mut rows: Vec<Vec<(usize, i64)>> = vec![Vec::new(); m];
    let mut counts = vec![0i64; m];
    for (j, t) in trees.iter().enumerate() {
        for &e in t {
            rows[e].push((j, 1));
            counts[e] += 1;
        }
    }
    for (k, matching) in matchings.matchings.iter().enumerate() {
        for &e in matching {
            rows[e].push((lambda(k), -2));
        }
    }
    for (e, mut row) in rows.into_iter().enumerate() {
        row.push((t_var, counts[e]));
        lp.add_row(row, Relation::Eq, Rational::zero());
    }
    let mut tree_sum: Vec<(usize, i64)> = (0..nt).map(|j| (j, 1)).collect();
    tree_sum.push((t_var, nt as i64));
    lp.add_row(tree_sum, Relation::Eq, Rational::from_i64(1));
    lp.add_row((0..nm).map(|k| (lambda(k), 1)).collect(), Relation::Eq, Rational::from_i64(1));
    let solution = lp.solve(caps.lp_iterations)?;
    if solution.status != LpStatus::Optimal {
        return Ok(ThetaRoute {
            nonempty: false,
            t_star: None,
            point: None,
        });
    }
    let t = solution.x[t_var].clone();
    let nonempty = t.is_positive();
    let point = nonempty.then(|| {
        let mut x = vec![Rational::zero(); m];
        for (e, xe) in x.iter_mut().enumerate() {
            *xe = t.clone() * Rational::from_i64(counts[e]);
        }
        for (j, tree) in trees.iter().enumerate() {
            if !solution.x[j].is_zero() {
                for &e in tree {
                    x[e] += solution.x[j].clone();
                }
            }
        }
        x
    });
    Ok(ThetaRoute {
        nonempty,
        t_star: Some(t),
        point,
    })
}

#[derive(Clone, Debug)]
pub struct WitnessWeights {
    pub fit: FitResult,
    pub marginals: Vec<Rational>,
    pub curvature: Vec<f64>,
    /// Rationalized weights and their exact curvature, when rounding the
    /// fitted weights keeps every curvature value nonnegative.
    pub exact: Option<(Weights<Rational>, Vec<Rational>)>,
}

/// Weights realizing the marginals of a strictly positive distribution.
pub fn witness_weights(
    g: &Graph,
    trees: &SpanningTreeSet,
    mu: &TreeDistribution,
    options: &FitOptions,
    caps: &Caps,
) -> Result<WitnessWeights> {
    if mu.probabilities.iter().any(|p| !p.is_positive()) {
        return Err(Error::Precondition("witness distribution is not strictly positive".into()));
    }
    let marginals = edge_marginals(g, trees, &mu.probabilities)?;
    let fit = fit_weights(g, &marginals, options, caps)?;
    if !fit.converged {
        return Err(Error::resource(
            format!("fitting iterations (residual {:.3e})", fit.residual),
            options.max_iter,
        ));
    }
    let p = curvature(g, &Weights::new(g, fit.weights.clone())?)?;
    if p.iter().any(|&v| v < -1e-6) {
        return Err(Error::Consistency(format!(
            "fitted weights have curvature {:?} below -1e-6",
            p
        )));
    }
    let exact = rationalized_certificate(g, &fit.weights, 1_000_000)?;
    Ok(WitnessWeights {
        fit,
        marginals,
        curvature: p,
        exact,
    })
}

/// Round weights to nearby rationals and recompute curvature exactly;
/// returns them if every curvature value is nonnegative.
pub fn rationalized_certificate(
    g: &Graph,
    weights: &[f64],
    max_den: u64,
) -> Result<Option<(Weights<Rational>, Vec<Rational>)>> {
    let values: Vec<Rational> = weights.iter().map(|&w| rationalize(w, max_den)).collect();
    if values.iter().any(|v| !v.is_positive()) {
        return Ok(None);
    }
    let c = Weights::new(g, values)?;
    let p = curvature(g, &c)?;
    Ok(p.iter().all(|v| !v.is_negative()).then_some((c, p)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::NamedGraph;

    fn q(p: i64, d: i64) -> Rational {
        Rational::from_ratio(p, d)
    }

    fn verdict(g: &Graph) -> Verdict {
        classify(g, &Caps::default()).unwrap().0
    }

    #[test]
    fn triangle_program_value() {
        let c3 = Graph::cycle(3).unwrap();
        let trees = enumerate_spanning_trees(&c3, &Caps::default()).unwrap();
        let d = decide_rn(&c3, &trees, &Caps::default()).unwrap();
        assert_eq!(d.t_star, Some(q(1, 3)));
        assert_eq!(d.distribution.unwrap().probabilities, vec![q(1, 3); 3]);
    }

    #[test]
    fn decide_examples() {
        let caps = Caps::default();
        let p4 = Graph::path(4).unwrap();
        let trees = enumerate_spanning_trees(&p4, &caps).unwrap();
        let rn = decide_rn(&p4, &trees, &caps).unwrap();
        assert_eq!(rn.t_star, Some(q(1, 1)));
        assert!(!decide_rp(&p4, &trees, &caps).unwrap().feasible);

        let star = Graph::named(NamedGraph::Star(3)).unwrap();
        let trees = enumerate_spanning_trees(&star, &caps).unwrap();
        let rn = decide_rn(&star, &trees, &caps).unwrap();
        assert!(!rn.feasible);
        assert!(rn.t_star.is_none());

        let c5 = Graph::cycle(5).unwrap();
        let trees = enumerate_spanning_trees(&c5, &caps).unwrap();
        assert!(decide_rn(&c5, &trees, &caps).unwrap().feasible);
        assert!(decide_rp(&c5, &trees, &caps).unwrap().feasible);

        let k23 = Graph::complete_bipartite(2, 3).unwrap();
        let trees = enumerate_spanning_trees(&k23, &caps).unwrap();
        assert!(!decide_rp(&k23, &trees, &caps).unwrap().feasible);
    }

    #[test]
    fn classify_examples() {
        assert_eq!(verdict(&Graph::petersen()).class, Class::Rp);
        let k23 = verdict(&Graph::complete_bipartite(2, 3).unwrap());
        assert_eq!(k23.class, Class::Srn);
        assert!(k23.not_rp_certificate.is_some());
        assert_eq!(verdict(&Graph::complete_bipartite(2, 4).unwrap()).class, Class::NotRn);
    }

    #[test]
    fn witness_marginals_respect_degree_bounds() {
        let g = Graph::complete(4).unwrap();
        let v = verdict(&g);
        let x = v.marginals.unwrap();
        let mu = v.witness.unwrap();
        let t = v.t_star.unwrap();
        assert!(mu.probabilities.iter().all(|p| *p >= t));
        for u in 0..4 {
            let deg: Rational = g.incident(u).iter().map(|&(_, e)| x[e].clone()).sum();
            assert!(deg < q(2, 1));
        }
    }

    #[test]
    fn theta_route_agrees_on_small_cases() {
        let caps = Caps::default();
        for (g, rn) in [
            (Graph::cycle(4).unwrap(), true),
            (Graph::complete_bipartite(2, 3).unwrap(), true),
            (Graph::complete_bipartite(1, 3).unwrap(), false),
            (Graph::path(3).unwrap(), true),
        ] {
            let trees = enumerate_spanning_trees(&g, &caps).unwrap();
            let route = theta_route(&g, &trees, &caps).unwrap();
            assert_eq!(route.nonempty, rn, "{g}");
        }
    }

    #[test]
    fn witness_weight_examples() {
        let caps = Caps::default();
        let opts = FitOptions::default();
        let c3 = Graph::cycle(3).unwrap();
        let trees = enumerate_spanning_trees(&c3, &caps).unwrap();
        let w = witness_weights(&c3, &trees, &TreeDistribution::uniform(3), &opts, &caps).unwrap();
        assert!(w.curvature.iter().all(|p| (p - 1.0 / 3.0).abs() < 1e-9));
        let (_, exact) = w.exact.unwrap();
        assert_eq!(exact, vec![q(1, 3); 3]);

        let c4 = Graph::cycle(4).unwrap();
        let trees = enumerate_spanning_trees(&c4, &caps).unwrap();
        let w = witness_weights(&c4, &trees, &TreeDistribution::uniform(4), &opts, &caps).unwrap();
        assert!(w.curvature.iter().all(|p| (p - 0.25).abs() < 1e-9));

        let p4 = Graph::path(4).unwrap();
        let trees = enumerate_spanning_trees(&p4, &caps).unwrap();
        let w = witness_weights(&p4, &trees, &TreeDistribution::uniform(1), &opts, &caps).unwrap();
        assert_eq!(w.fit.weights, vec![1.0; 3]);
        assert_eq!(w.exact.unwrap().1, vec![q(1, 2), q(0, 1), q(0, 1), q(1, 2)]);
    }
}
