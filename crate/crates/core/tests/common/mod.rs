//! Helpers shared by the integration tests.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rescurv::resistance::Weights;
use rescurv::{Graph, Rational, Scalar};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn q(p: i64, d: i64) -> Rational {
    Rational::from_ratio(p, d)
}

/// Weights `a/b` with `a, b` uniform in `1..=10`.
pub fn random_rational_weights(g: &Graph, rng: &mut impl Rng) -> Weights<Rational> {
    let values = (0..g.edge_count())
        .map(|_| q(rng.gen_range(1..=10), rng.gen_range(1..=10)))
        .collect();
    Weights::new(g, values).unwrap()
}

/// Whether some Hamiltonian path closes into a Hamiltonian cycle.
pub fn has_hamiltonian_cycle(g: &Graph) -> bool {
    let n = g.vertex_count();
    if n < 3 {
        return false;
    }
    rescurv::enumerate::hamiltonian_paths(g).iter().any(|path| {
        let mut deg = vec![0; n];
        for &e in path {
            let (u, v) = g.edge(e);
            deg[u] += 1;
            deg[v] += 1;
        }
        let ends: Vec<usize> = (0..n).filter(|&v| deg[v] == 1).collect();
        ends.len() == 2 && g.has_edge(ends[0], ends[1])
    })
}
