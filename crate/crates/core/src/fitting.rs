//! Recovering edge weights from target relative resistances by
//! multiplicative scaling, and the uniqueness check that goes with it.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::enumerate::Caps;
use crate::error::{Error, Result};
use crate::graph::{biconnected_components, Graph};
use crate::polytope::{membership, Body};
use crate::resistance::{relative_resistances, Weights};
use crate::scalar::{to_f64_vec, Scalar, NUMERIC_TOL};

#[derive(Clone, Debug)]
pub struct FitOptions {
    pub tol: f64,
    pub max_iter: usize,
    /// Random initial weights in `[1/2, 2]` instead of all ones.
    pub seed: Option<u64>,
    pub trace: bool,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            tol: 1e-9,
            max_iter: 100_000,
            seed: None,
            trace: false,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FitResult {
    /// Scaled so that the largest weight in every block is 1.
    pub weights: Vec<f64>,
    pub iterations: usize,
    pub residual: f64,
    pub converged: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace: Option<Vec<f64>>,
}

fn max_residual(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Rescale so that the largest weight of every biconnected component is 1.
pub fn normalize_per_block(g: &Graph, c: &mut [f64]) -> Result<()> {
    let blocks = biconnected_components(g)?;
    for block in &blocks.blocks {
        let top = block.iter().map(|&e| c[e]).fold(0.0, f64::max);
        for &e in block {
            c[e] /= top;
        }
    }
    Ok(())
}

/// Iterates `c_e ← c_e (r_e / r̂_e)^{1/(|V|-1)}` until the max-norm residual
/// drops below `tol`. The target must lie in the relative interior of the
/// spanning tree polytope (checked with `tol` slack in numeric mode and
/// exactly for rational targets).
pub fn fit_weights<S: Scalar>(
    g: &Graph,
    target: &[S],
    options: &FitOptions,
    caps: &Caps,
) -> Result<FitResult> {
    if !(options.tol > 0.0) {
        return Err(Error::Parameter(format!("tolerance must be positive, got {}", options.tol)));
    }
    g.require_connected()?;
    let inside = membership(g, target, Body::PInterior, NUMERIC_TOL, caps)?;
    if let Some(v) = inside.violated {
        return Err(Error::Precondition(format!(
            "target is not in the interior of the spanning tree polytope: {v}"
        )));
    }
    let r = to_f64_vec(target);
    let m = g.edge_count();
    let mut c: Vec<f64> = match options.seed {
        None => vec![1.0; m],
        Some(seed) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..m).map(|_| rng.gen_range(0.5..2.0)).collect()
        }
    };
    let exponent = 1.0 / (g.vertex_count() as f64 - 1.0);
    let mut r_hat = relative_resistances(g, &Weights::new(g, c.clone())?)?;
    let mut residual = max_residual(&r, &r_hat);
    let mut trace = options.trace.then(|| vec![residual]);
    let mut iterations = 0;
    while residual > options.tol && iterations < options.max_iter {
        for e in 0..m {
            c[e] *= (r[e] / r_hat[e]).powf(exponent);
        }
        // keep magnitudes near one; the update is scale-free
        let top = c.iter().cloned().fold(0.0, f64::max);
        c.iter_mut().for_each(|x| *x /= top);
        r_hat = relative_resistances(g, &Weights::new(g, c.clone())?)?;
        residual = max_residual(&r, &r_hat);
        iterations += 1;
        if let Some(t) = trace.as_mut() {
            t.push(residual);
        }
    }
    normalize_per_block(g, &mut c)?;
    Ok(FitResult {
        weights: c,
        iterations,
        converged: residual <= options.tol,
        residual,
        trace,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BirchReport {
    pub same_relative_resistances: bool,
    pub blockwise_proportional: bool,
}

impl BirchReport {
    /// The uniqueness statement: equal relative resistances exactly when
    /// the weights agree up to one factor per block.
    pub fn consistent(&self) -> bool {
        self.same_relative_resistances == self.blockwise_proportional
    }
}

/// Compares `r(c1)` with `r(c2)` and `c1/c2` with blockwise constants
/// (exactly for rationals, relative tolerance `1e-10` for floats).
pub fn check_birch_uniqueness<S: Scalar>(
    g: &Graph,
    c1: &Weights<S>,
    c2: &Weights<S>,
) -> Result<BirchReport> {
    const TOL: f64 = 1e-10;
    let r1 = relative_resistances(g, c1)?;
    let r2 = relative_resistances(g, c2)?;
    let same = r1.iter().zip(&r2).all(|(a, b)| a.approx_eq(b, TOL));
    let blocks = biconnected_components(g)?;
    let proportional = blocks.blocks.iter().all(|block| {
        let first = c1[block[0]].clone() / c2[block[0]].clone();
        block
            .iter()
            .all(|&e| (c1[e].clone() / c2[e].clone()).approx_eq(&first, TOL))
    });
    Ok(BirchReport {
        same_relative_resistances: same,
        blockwise_proportional: proportional,
    })
}

/// Largest relative deviation of `fitted / reference` from a constant on
/// each block.
pub fn blockwise_ratio_error(g: &Graph, fitted: &[f64], reference: &[f64]) -> Result<f64> {
    let blocks = biconnected_components(g)?;
    let mut worst: f64 = 0.0;
    for block in &blocks.blocks {
        let base = fitted[block[0]] / reference[block[0]];
        for &e in block {
            worst = worst.max(((fitted[e] / reference[e]) / base - 1.0).abs());
        }
    }
    Ok(worst)
}
