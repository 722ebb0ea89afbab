//! Weighted Laplacians, effective and relative resistances, curvature and
//! the related tree-distribution and inverse-resistance machinery.
//!
//! All routines are generic over [`Scalar`]: with [`Rational`] every value
//! is exact; with `f64` comparisons use [`NUMERIC_TOL`].

use serde::Serialize;
use serde_json::{json, Value};

use crate::enumerate::SpanningTreeSet;
use crate::error::{Error, Result};
use crate::graph::{biconnected_components, Blocks, Graph};
use crate::matrix::Matrix;
use crate::scalar::{json_vec, parse_rational, sum, Rational, Scalar, NUMERIC_TOL};

/// Tolerance for the numeric normalization condition.
pub const NORMALIZATION_TOL: f64 = 1e-12;

/// Strictly positive, finite edge weights indexed by canonical edge index.
#[derive(Clone, Debug, PartialEq)]
pub struct Weights<S> {
    values: Vec<S>,
}

impl<S: Scalar> Weights<S> {
    pub fn new(g: &Graph, values: Vec<S>) -> Result<Self> {
        if values.len() != g.edge_count() {
            return Err(Error::Parameter(format!(
                "weight vector has {} entries but the graph has {} edges",
                values.len(),
                g.edge_count()
            )));
        }
        for (i, c) in values.iter().enumerate() {
            if !c.to_f64().is_finite() || c.sign(0.0) != std::cmp::Ordering::Greater {
                let (u, v) = g.edge(i);
                return Err(Error::Parameter(format!(
                    "weight of edge {u}-{v} must be positive and finite, got {c}"
                )));
            }
        }
        Ok(Weights { values })
    }

    pub fn unit(g: &Graph) -> Self {
        Weights {
            values: vec![S::one(); g.edge_count()],
        }
    }

    pub fn values(&self) -> &[S] {
        &self.values
    }

    pub fn into_values(self) -> Vec<S> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn scaled(&self, factor: &S) -> Self {
        Weights {
            values: self.values.iter().map(|c| c.clone() * factor.clone()).collect(),
        }
    }

    pub fn to_f64(&self) -> Weights<f64> {
        Weights {
            values: self.values.iter().map(Scalar::to_f64).collect(),
        }
    }

    fn check(&self, g: &Graph) -> Result<()> {
        if self.values.len() != g.edge_count() {
            return Err(Error::Parameter(format!(
                "weight vector has {} entries but the graph has {} edges",
                self.values.len(),
                g.edge_count()
            )));
        }
        Ok(())
    }
}

impl<S: Scalar> std::ops::Index<usize> for Weights<S> {
    type Output = S;

    fn index(&self, e: usize) -> &S {
        &self.values[e]
    }
}

/// Parse a weight file: one `u v weight` line per edge, weights as decimal
/// or `p/q` literals; `#` comment lines and blank lines are skipped.
pub fn parse_weights(g: &Graph, text: &str) -> Result<Weights<Rational>> {
    let mut values: Vec<Option<Rational>> = vec![None; g.edge_count()];
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let parse_err = |msg: String| Error::Parse { line: i + 1, msg };
        let toks: Vec<&str> = line.split_whitespace().collect();
        let [u, v, w] = toks[..] else {
            return Err(parse_err(format!("expected `u v weight`, got {line:?}")));
        };
        let u: usize = u.parse().map_err(|_| parse_err(format!("bad vertex {u:?}")))?;
        let v: usize = v.parse().map_err(|_| parse_err(format!("bad vertex {v:?}")))?;
        let e = g
            .edge_index(u, v)
            .ok_or_else(|| parse_err(format!("{u}-{v} is not an edge of the graph")))?;
        let w = parse_rational(w).map_err(|e| parse_err(e.to_string()))?;
        if values[e].replace(w).is_some() {
            return Err(parse_err(format!("edge {u}-{v} given twice")));
        }
    }
    let missing: Vec<String> = values
        .iter()
        .enumerate()
        .filter(|(_, w)| w.is_none())
        .map(|(e, _)| format!("{}-{}", g.edge(e).0, g.edge(e).1))
        .collect();
    if !missing.is_empty() {
        return Err(Error::Parameter(format!(
            "weight file misses edges {}",
            missing.join(", ")
        )));
    }
    Weights::new(g, values.into_iter().map(Option::unwrap).collect())
}

pub fn laplacian<S: Scalar>(g: &Graph, c: &Weights<S>) -> Result<Matrix<S>> {
    c.check(g)?;
    let n = g.vertex_count();
    let mut l = Matrix::zeros(n, n);
    for (e, &(u, v)) in g.edges().iter().enumerate() {
        let w = c[e].clone();
        l[(u, v)] -= w.clone();
        l[(v, u)] -= w.clone();
        l[(u, u)] += w.clone();
        l[(v, v)] += w;
    }
    Ok(l)
}

/// Moore-Penrose pseudoinverse of a connected Laplacian via
/// `(L + J/n)^{-1} - J/n`.
pub fn laplacian_pseudoinverse<S: Scalar>(l: &Matrix<S>) -> Result<Matrix<S>> {
    let n = l.rows();
    let j = S::from_ratio(1, n as i64);
    let bordered = Matrix::from_fn(n, n, |a, b| l[(a, b)].clone() + j.clone());
    let inv = bordered
        .inverse()
        .ok_or_else(|| Error::Disconnected("Laplacian kernel is larger than span(1)".into()))?;
    Ok(Matrix::from_fn(n, n, |a, b| inv[(a, b)].clone() - j.clone()))
}

fn resistance_from_pinv<S: Scalar>(pinv: &Matrix<S>) -> Matrix<S> {
    let n = pinv.rows();
    Matrix::from_fn(n, n, |u, v| {
        if u == v {
            S::zero()
        } else {
            pinv[(u, u)].clone() + pinv[(v, v)].clone()
                - S::from_i64(2) * pinv[(u, v)].clone()
        }
    })
}

/// Full effective-resistance matrix.
pub fn effective_resistances<S: Scalar>(g: &Graph, c: &Weights<S>) -> Result<Matrix<S>> {
    g.require_connected()?;
    let l = laplacian(g, c)?;
    Ok(resistance_from_pinv(&laplacian_pseudoinverse(&l)?))
}

fn relative_from_omega<S: Scalar>(g: &Graph, c: &Weights<S>, omega: &Matrix<S>) -> Vec<S> {
    g.edges()
        .iter()
        .enumerate()
        .map(|(e, &(u, v))| omega[(u, v)].clone() * c[e].clone())
        .collect()
}

/// `r_e = ω_e c_e` for every edge.
pub fn relative_resistances<S: Scalar>(g: &Graph, c: &Weights<S>) -> Result<Vec<S>> {
    let omega = effective_resistances(g, c)?;
    Ok(relative_from_omega(g, c, &omega))
}

/// Relative resistances from the spanning-tree ratio
/// `Σ_{T∋e} Π c / Σ_T Π c`.
pub fn relative_resistances_by_trees<S: Scalar>(
    g: &Graph,
    c: &Weights<S>,
    trees: &SpanningTreeSet,
) -> Result<Vec<S>> {
    c.check(g)?;
    let mut numer = vec![S::zero(); g.edge_count()];
    let mut total = S::zero();
    for t in trees.iter() {
        let w = tree_weight(c, t);
        for &e in t {
            numer[e] += w.clone();
        }
        total += w;
    }
    Ok(numer.into_iter().map(|x| x / total.clone()).collect())
}

fn tree_weight<S: Scalar>(c: &Weights<S>, tree: &[usize]) -> S {
    tree.iter().fold(S::one(), |acc, &e| acc * c[e].clone())
}

pub fn curvature_from_relative<S: Scalar>(g: &Graph, r: &[S]) -> Vec<S> {
    let mut p = vec![S::one(); g.vertex_count()];
    for (e, &(u, v)) in g.edges().iter().enumerate() {
        let half = r[e].clone() * S::half();
        p[u] -= half.clone();
        p[v] -= half;
    }
    p
}

/// `p_v = 1 - ½ Σ_{uv∈E} r_uv`.
pub fn curvature<S: Scalar>(g: &Graph, c: &Weights<S>) -> Result<Vec<S>> {
    let r = relative_resistances(g, c)?;
    Ok(curvature_from_relative(g, &r))
}

/// Every matrix and vector derived from one weighted graph.
#[derive(Clone, Debug)]
pub struct ResistanceProfile<S> {
    pub laplacian: Matrix<S>,
    pub pseudoinverse: Matrix<S>,
    pub resistance: Matrix<S>,
    /// `K = Ω^{-1}`; absent for the one-vertex graph.
    pub inverse_resistance: Option<Matrix<S>>,
    pub relative: Vec<S>,
    pub curvature: Vec<S>,
}

impl<S: Scalar> ResistanceProfile<S> {
    pub fn compute(g: &Graph, c: &Weights<S>) -> Result<Self> {
        g.require_connected()?;
        let laplacian = laplacian(g, c)?;
        let pseudoinverse = laplacian_pseudoinverse(&laplacian)?;
        let resistance = resistance_from_pinv(&pseudoinverse);
        let inverse_resistance = if g.vertex_count() >= 2 {
            Some(resistance.inverse().ok_or_else(|| {
                Error::Consistency("resistance matrix of a connected graph is singular".into())
            })?)
        } else {
            None
        };
        let relative = relative_from_omega(g, c, &resistance);
        let curvature = curvature_from_relative(g, &relative);
        Ok(ResistanceProfile {
            laplacian,
            pseudoinverse,
            resistance,
            inverse_resistance,
            relative,
            curvature,
        })
    }

    pub fn to_json(&self) -> Value {
        json!({
            "laplacian": self.laplacian,
            "pseudoinverse": self.pseudoinverse,
            "resistance": self.resistance,
            "inverse_resistance": self.inverse_resistance,
            "relative_resistances": json_vec(&self.relative),
            "curvature": json_vec(&self.curvature),
        })
    }
}

/// Checks the four defining properties of a Laplacian: symmetric, zero row
/// sums, nonpositive off-diagonal, and kernel exactly `span(1)` (i.e. the
/// support graph is connected), which with the others implies PSD.
pub fn is_laplacian<S: Scalar>(l: &Matrix<S>, tol: f64) -> bool {
    let n = l.rows();
    if !l.is_square() || !l.is_symmetric(tol) {
        return false;
    }
    if !l.row_sums().iter().all(|s| s.approx_eq(&S::zero(), tol)) {
        return false;
    }
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            match l[(u, v)].sign(tol) {
                std::cmp::Ordering::Greater => return false,
                std::cmp::Ordering::Less => edges.push((u, v)),
                std::cmp::Ordering::Equal => {}
            }
        }
    }
    Graph::new(n, edges).is_ok_and(|g| g.is_connected())
}

#[derive(Clone, Debug, Serialize)]
pub struct BlockFoster {
    pub vertices: Vec<usize>,
    pub edges: Vec<usize>,
    #[serde(serialize_with = "ser_scalar")]
    pub sum: String,
    pub expected: usize,
    pub holds: bool,
}

fn ser_scalar<Ser: serde::Serializer>(v: &str, s: Ser) -> std::result::Result<Ser::Ok, Ser::Error> {
    s.serialize_str(v)
}

#[derive(Clone, Debug, Serialize)]
pub struct FosterReport {
    pub global_sum: String,
    pub expected: usize,
    pub global: bool,
    pub per_component: bool,
    pub blocks: Vec<BlockFoster>,
}

/// Foster's theorem globally and on every biconnected component.
pub fn foster_check<S: Scalar>(g: &Graph, c: &Weights<S>) -> Result<FosterReport> {
    let r = relative_resistances(g, c)?;
    let blocks = biconnected_components(g)?;
    Ok(foster_from_relative(g, &r, &blocks))
}

pub fn foster_from_relative<S: Scalar>(g: &Graph, r: &[S], blocks: &Blocks) -> FosterReport {
    let n = g.vertex_count();
    let total = sum(r.iter().cloned());
    let global = total.approx_eq(&S::from_i64(n as i64 - 1), NUMERIC_TOL);
    let block_reports: Vec<BlockFoster> = blocks
        .blocks
        .iter()
        .zip(&blocks.block_vertices)
        .map(|(edges, verts)| {
            let s = sum(edges.iter().map(|&e| r[e].clone()));
            let expected = verts.len() - 1;
            BlockFoster {
                vertices: verts.clone(),
                edges: edges.clone(),
                holds: s.approx_eq(&S::from_i64(expected as i64), NUMERIC_TOL),
                sum: s.to_string(),
                expected,
            }
        })
        .collect();
    FosterReport {
        global_sum: total.to_string(),
        expected: n.saturating_sub(1),
        global,
        per_component: block_reports.iter().all(|b| b.holds),
        blocks: block_reports,
    }
}

/// Kirchhoff polynomial `Z_G(c) = Σ_T Π_{t∈T} c_t` by enumeration.
pub fn kirchhoff_by_trees<S: Scalar>(c: &Weights<S>, trees: &SpanningTreeSet) -> S {
    sum(trees.iter().map(|t| tree_weight(c, t)))
}

/// Kirchhoff polynomial from the weighted Matrix-Tree theorem.
pub fn kirchhoff_by_determinant<S: Scalar>(g: &Graph, c: &Weights<S>) -> Result<S> {
    let l = laplacian(g, c)?;
    let n = g.vertex_count();
    if n <= 1 {
        return Ok(S::one());
    }
    let keep: Vec<usize> = (0..n - 1).collect();
    Ok(l.principal(&keep).determinant())
}

/// Evaluate `Z_G(c)` by both routes and insist that they agree.
pub fn kirchhoff_polynomial<S: Scalar>(
    g: &Graph,
    c: &Weights<S>,
    trees: &SpanningTreeSet,
) -> Result<S> {
    let by_det = kirchhoff_by_determinant(g, c)?;
    let by_trees = kirchhoff_by_trees(c, trees);
    if !by_det.approx_eq(&by_trees, NUMERIC_TOL) {
        return Err(Error::Consistency(format!(
            "Kirchhoff polynomial routes disagree: determinant {by_det} vs enumeration {by_trees}"
        )));
    }
    Ok(by_det)
}

/// Largest relative deviation of `r_e Z` from `c_e ∂Z/∂c_e`, with the
/// derivative taken by central finite differences of the determinant route.
pub fn kirchhoff_derivative_defect(g: &Graph, c: &Weights<f64>) -> Result<f64> {
    let z = kirchhoff_by_determinant(g, c)?;
    let r = relative_resistances(g, c)?;
    let mut worst = 0.0f64;
    for e in 0..g.edge_count() {
        let h = 1e-6 * c[e];
        let mut plus = c.values().to_vec();
        let mut minus = c.values().to_vec();
        plus[e] += h;
        minus[e] -= h;
        let zp = kirchhoff_by_determinant(g, &Weights::new(g, plus)?)?;
        let zm = kirchhoff_by_determinant(g, &Weights::new(g, minus)?)?;
        let deriv = (zp - zm) / (2.0 * h);
        let lhs = r[e] * z;
        let rhs = c[e] * deriv;
        worst = worst.max((lhs - rhs).abs() / z.abs().max(1e-300));
    }
    Ok(worst)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DistributionKind {
    LogLinear,
    Positive,
    NonSeparable,
    General,
}

/// Probability vector aligned with a [`SpanningTreeSet`].
#[derive(Clone, Debug, PartialEq)]
pub struct TreeDistribution {
    pub probabilities: Vec<Rational>,
    pub kind: DistributionKind,
}

impl TreeDistribution {
    /// Validates `μ ≥ 0`, `Σμ = 1`, and strict positivity when claimed.
    pub fn new(probabilities: Vec<Rational>, kind: DistributionKind) -> Result<Self> {
        use num_traits::{One, Signed, Zero};
        if probabilities.iter().any(Signed::is_negative) {
            return Err(Error::Parameter("negative tree probability".into()));
        }
        let total: Rational = probabilities.iter().sum();
        if !total.is_one() {
            return Err(Error::Parameter(format!("tree probabilities sum to {total}, not 1")));
        }
        if matches!(kind, DistributionKind::Positive | DistributionKind::LogLinear)
            && probabilities.iter().any(Zero::is_zero)
        {
            return Err(Error::Parameter("positive distribution has a zero entry".into()));
        }
        Ok(TreeDistribution {
            probabilities,
            kind,
        })
    }

    pub fn uniform(count: usize) -> Self {
        TreeDistribution {
            probabilities: vec![Rational::from_ratio(1, count as i64); count],
            kind: DistributionKind::Positive,
        }
    }

    pub fn point_mass(count: usize, index: usize) -> Self {
        let mut probabilities = vec![Rational::from_i64(0); count];
        probabilities[index] = Rational::from_i64(1);
        TreeDistribution {
            probabilities,
            kind: DistributionKind::General,
        }
    }

    pub fn len(&self) -> usize {
        self.probabilities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probabilities.is_empty()
    }

    pub fn min_probability(&self) -> Option<&Rational> {
        self.probabilities.iter().min()
    }
}

/// `μ_c(T) = Π_{t∈T} c_t / Z_G(c)`.
pub fn log_linear_distribution(
    c: &Weights<Rational>,
    trees: &SpanningTreeSet,
) -> Result<TreeDistribution> {
    let weights: Vec<Rational> = trees.iter().map(|t| tree_weight(c, t)).collect();
    let z: Rational = weights.iter().sum();
    Ok(TreeDistribution {
        probabilities: weights.into_iter().map(|w| w / z.clone()).collect(),
        kind: DistributionKind::LogLinear,
    })
}

/// `x_e = Σ_{T∋e} μ(T)`.
pub fn edge_marginals<S: Scalar>(
    g: &Graph,
    trees: &SpanningTreeSet,
    probabilities: &[S],
) -> Result<Vec<S>> {
    if probabilities.len() != trees.len() {
        return Err(Error::Parameter(format!(
            "distribution has {} entries but there are {} spanning trees",
            probabilities.len(),
            trees.len()
        )));
    }
    let mut x = vec![S::zero(); g.edge_count()];
    for (t, mu) in trees.iter().zip(probabilities) {
        if mu.is_zero() {
            continue;
        }
        for &e in t {
            x[e] += mu.clone();
        }
    }
    Ok(x)
}

/// `Σ_{u,v} K_uv` for the current weights.
pub fn normalization_total<S: Scalar>(g: &Graph, c: &Weights<S>) -> Result<S> {
    let omega = effective_resistances(g, c)?;
    let k = omega
        .inverse()
        .ok_or_else(|| Error::Precondition("resistance matrix is singular (one vertex?)".into()))?;
    Ok(k.total_sum())
}

/// Rescale all weights so that `Σ K_uv = 1`.
pub fn normalize_weights<S: Scalar>(g: &Graph, c: &Weights<S>) -> Result<Weights<S>> {
    let total = normalization_total(g, c)?;
    Ok(c.scaled(&(S::one() / total)))
}

pub fn is_normalized<S: Scalar>(g: &Graph, c: &Weights<S>) -> Result<bool> {
    Ok(normalization_total(g, c)?.approx_eq(&S::one(), NORMALIZATION_TOL))
}

/// Curvature as column sums of `K`, valid for normalized weights only.
pub fn curvature_via_k<S: Scalar>(g: &Graph, c: &Weights<S>) -> Result<Vec<S>> {
    let omega = effective_resistances(g, c)?;
    let k = omega
        .inverse()
        .ok_or_else(|| Error::Precondition("resistance matrix is singular".into()))?;
    let total = k.total_sum();
    if !total.approx_eq(&S::one(), NORMALIZATION_TOL) {
        return Err(Error::Precondition(format!(
            "weights are not normalized: Σ K = {total}"
        )));
    }
    Ok(k.transpose().row_sums())
}

#[derive(Clone, Debug)]
pub struct KSpaceReport<S> {
    pub member: bool,
    pub violations: Vec<String>,
    /// `L = -2K + 2(K1)(K1)^T`.
    pub reconstructed_laplacian: Matrix<S>,
    /// Weights read off the reconstructed Laplacian when it has the edge
    /// pattern of the graph.
    pub reconstructed_weights: Option<Vec<S>>,
}

/// Laplacian reconstructed from an inverse resistance matrix.
pub fn laplacian_from_inverse_resistance<S: Scalar>(k: &Matrix<S>) -> Matrix<S> {
    let n = k.rows();
    let k1 = k.row_sums();
    let two = S::from_i64(2);
    Matrix::from_fn(n, n, |u, v| {
        two.clone() * (k1[u].clone() * k1[v].clone() - k[(u, v)].clone())
    })
}

/// Membership of a symmetric invertible `K` in the space of inverse
/// resistance matrices of `g` with normalized weights.
pub fn kspace_membership<S: Scalar>(g: &Graph, k: &Matrix<S>) -> Result<KSpaceReport<S>> {
    let n = g.vertex_count();
    if k.rows() != n || !k.is_square() {
        return Err(Error::Parameter(format!(
            "matrix is {}x{} but the graph has {n} vertices",
            k.rows(),
            k.cols()
        )));
    }
    if !k.is_symmetric(NUMERIC_TOL) {
        return Err(Error::Parameter("matrix is not symmetric".into()));
    }
    if k.determinant().sign(1e-300) == std::cmp::Ordering::Equal {
        return Err(Error::Parameter("matrix is singular".into()));
    }
    let mut violations = Vec::new();
    let total = k.total_sum();
    if !total.approx_eq(&S::one(), NORMALIZATION_TOL) {
        violations.push(format!("total entry sum is {total}, not 1"));
    }
    let k1 = k.row_sums();
    for u in 0..n {
        for v in u + 1..n {
            let product = k1[u].clone() * k1[v].clone();
            let entry = k[(u, v)].clone();
            if g.has_edge(u, v) {
                if (entry.clone() - product.clone()).sign(NUMERIC_TOL) != std::cmp::Ordering::Greater {
                    violations.push(format!("edge {u}-{v}: K_uv = {entry} is not > {product}"));
                }
            } else if !entry.approx_eq(&product, NUMERIC_TOL) {
                violations.push(format!("non-edge {u}-{v}: K_uv = {entry} differs from {product}"));
            }
        }
    }
    let reconstructed_laplacian = laplacian_from_inverse_resistance(k);
    let reconstructed_weights = if is_laplacian(&reconstructed_laplacian, NUMERIC_TOL) {
        let pattern_ok = (0..n).all(|u| {
            (u + 1..n).all(|v| {
                let neg = reconstructed_laplacian[(u, v)].sign(NUMERIC_TOL)
                    == std::cmp::Ordering::Less;
                neg == g.has_edge(u, v)
            })
        });
        pattern_ok.then(|| {
            g.edges()
                .iter()
                .map(|&(u, v)| -reconstructed_laplacian[(u, v)].clone())
                .collect()
        })
    } else {
        None
    };
    if violations.is_empty() && reconstructed_weights.is_none() {
        violations.push("reconstructed matrix is not a Laplacian of the graph".into());
    }
    Ok(KSpaceReport {
        member: violations.is_empty(),
        violations,
        reconstructed_laplacian,
        reconstructed_weights,
    })
}
