//! Values computed outside this crate (networkx spanning-tree counts,
//! brute-force Hamiltonian path search, a sympy model of circle inversion,
//! hand-worked series/parallel resistances).

mod common;

use common::q;
use rescurv::corpus::corpus;
use rescurv::enumerate::{
    enumerate_matchings, enumerate_spanning_trees, hamiltonian_paths, matrix_tree_count, Caps,
};
use rescurv::polytope::independent_hamiltonian_path_bound;
use rescurv::resistance::{curvature, effective_resistances, Weights};
use rescurv::transforms::circle_invert;
use rescurv::{Graph, Rational};

#[test]
fn spanning_tree_counts() {
    let oracle = [
        ("petersen", 2000u64),
        ("grid:2,3", 15),
        ("grid:2,4", 56),
        ("grid:2,5", 209),
        ("grid:3,3", 192),
        ("grid:3,4", 2415),
        ("grid:4,4", 100_352),
        ("complete:5", 125),
        ("kab:3,3", 81),
    ];
    let all = corpus();
    for (name, expected) in oracle {
        let g = &all.iter().find(|c| c.name == name).unwrap().graph;
        assert_eq!(matrix_tree_count(g), expected.into(), "{name}");
        if expected <= 3000 {
            assert_eq!(enumerate_spanning_trees(g, &Caps::default()).unwrap().len() as u64, expected, "{name}");
        }
    }
}

#[test]
fn hamiltonian_path_counts() {
    let oracle = [
        ("grid:2,3", 8),
        ("grid:2,4", 14),
        ("grid:2,5", 22),
        ("grid:3,3", 20),
        ("grid:3,4", 62),
        ("grid:4,4", 276),
        ("petersen", 120),
        ("complete:4", 12),
        ("cycle:4", 4),
        ("kab:1,3", 0),
    ];
    let all = corpus();
    for (name, expected) in oracle {
        let g = &all.iter().find(|c| c.name == name).unwrap().graph;
        assert_eq!(hamiltonian_paths(g).len(), expected, "{name}");
    }
}

#[test]
fn hamiltonian_path_affine_dimensions() {
    for (g, dim) in [
        (Graph::cycle(4).unwrap(), 3),
        (Graph::complete(4).unwrap(), 5),
        (Graph::petersen(), 14),
    ] {
        assert_eq!(independent_hamiltonian_path_bound(&g).unwrap().affine_rank, dim, "{g}");
    }
}

#[test]
fn matching_counts() {
    let m = enumerate_matchings(&Graph::cycle(4).unwrap(), &Caps::default()).unwrap();
    assert_eq!((m.matchings.len(), m.max_size), (7, 2));
}

#[test]
fn series_parallel_resistances() {
    let c4 = Graph::cycle(4).unwrap();
    let omega = effective_resistances(&c4, &Weights::<Rational>::unit(&c4)).unwrap();
    assert_eq!(omega[(0, 1)], q(3, 4));
    assert_eq!(omega[(0, 2)], q(1, 1));
    let k5 = Graph::complete(5).unwrap();
    let omega = effective_resistances(&k5, &Weights::<Rational>::unit(&k5)).unwrap();
    assert_eq!(omega[(1, 3)], q(2, 5));
    let p5 = Graph::path(5).unwrap();
    let c = Weights::new(&p5, vec![q(1, 1), q(1, 2), q(2, 1), q(1, 3)]).unwrap();
    let omega = effective_resistances(&p5, &c).unwrap();
    assert_eq!(omega[(0, 4)], q(1, 1) + q(2, 1) + q(1, 2) + q(3, 1));
}

#[test]
fn circle_inversion_matches_symbolic_model() {
    // K_4 minus the edge 1-3, weights 01:3, 02:1, 03:2, 12:1, 23:1
    let g = Graph::new(4, [(0, 1), (0, 2), (0, 3), (1, 2), (2, 3)]).unwrap();
    let c = Weights::new(&g, vec![q(3, 1), q(1, 1), q(2, 1), q(1, 1), q(1, 1)]).unwrap();
    assert_eq!(curvature(&g, &c).unwrap(), vec![q(0, 1), q(10, 29), q(17, 58), q(21, 58)]);
    let rec = circle_invert(&g, &c, 0).unwrap();
    assert_eq!(rec.output, g);
    let expected: Vec<Rational> = [160, 204, 231, 96, 132].iter().map(|&v| q(v, 841)).collect();
    assert_eq!(rec.output_weights.values(), &expected[..]);
    assert_eq!(rec.recomputed, vec![q(0, 1), q(12, 29), q(6, 29), q(11, 29)]);
    // inverting back over the same vertex restores the weights exactly
    let back = circle_invert(&rec.output, &rec.output_weights, 0).unwrap();
    assert_eq!(back.output_weights, c);
}

#[test]
fn submodular_capacity_with_negative_curvature_on_k4() {
    // values recomputed with sympy from the defining formula for τ
    let g = Graph::complete(4).unwrap();
    let raw: Vec<Rational> = [16, 1, 8, 5, 72, 48].iter().map(|&v| q(v, 1)).collect();
    let c = rescurv::resistance::normalize_weights(&g, &Weights::new(&g, raw).unwrap()).unwrap();
    let p = curvature(&g, &c).unwrap();
    assert_eq!(p, vec![q(12659, 27712), q(4395, 27712), q(6249, 13856), q(-115, 1732)]);
    let table = rescurv::capacity::full_table(&g, &c, &Caps::default()).unwrap();
    let report = rescurv::capacity::is_submodular(&table);
    assert!(report.submodular);
    assert_eq!(report.min_slack, Some(q(45513, 147_318_572)));
}
