use inputsel::graph::{
    erdos_renyi, first_connected, geometric_graph, grounded_laplacian, named_graph, Graph, NamedGraph,
};
use inputsel::numerics::{expm, finite_horizon_gramian, lyapunov_gramian, spectral_abscissa};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn connected(n: usize, seed: u64) -> Graph {
    first_connected(seed, 1000, |s| erdos_renyi(n, 0.4, s, false)).unwrap().0
}

#[test]
fn grounded_block_is_spd_for_connected_graphs() {
    for seed in 0..30 {
        let n = 3 + (seed as usize % 6);
        let g = connected(n, seed);
        for s in [vec![0], vec![1, n - 1]] {
            let l = grounded_laplacian(&g, &s).unwrap().l_ff;
            assert_eq!(l, l.transpose());
            assert!(l.symmetric_eigen().eigenvalues.min() > 1e-9);
        }
    }
}

#[test]
fn adding_an_input_deletes_its_row_and_column() {
    for seed in 0..20 {
        let g = connected(7, seed);
        let small = grounded_laplacian(&g, &[2]).unwrap();
        let big = grounded_laplacian(&g, &[2, 5]).unwrap();
        let r = small.followers.iter().position(|&v| v == 5).unwrap();
        assert_eq!(big.l_ff, small.l_ff.clone().remove_row(r).remove_column(r));
    }
}

#[test]
fn generators_are_reproducible() {
    assert_eq!(geometric_graph(40, 500.0, 120.0, 9).unwrap().edges(), geometric_graph(40, 500.0, 120.0, 9).unwrap().edges());
    assert_eq!(erdos_renyi(30, 0.2, 4, true).unwrap().edges(), erdos_renyi(30, 0.2, 4, true).unwrap().edges());
    assert_ne!(erdos_renyi(30, 0.2, 4, false).unwrap().edges(), erdos_renyi(30, 0.2, 5, false).unwrap().edges());
}

#[test]
fn geometric_mean_degree_matches_area_estimate() {
    // Oracle: probability that two uniform points in the square are within range.
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let draws = 400_000;
    let hits = (0..draws)
        .filter(|_| {
            let (dx, dy) = (rng.random_range(0.0..1000.0) - rng.random_range(0.0..1000.0), rng.random_range(0.0..1000.0) - rng.random_range(0.0..1000.0));
            dx * dx + dy * dy <= 300.0 * 300.0
        })
        .count();
    let expected = hits as f64 / draws as f64 * 99.0;
    let mean: f64 = (0..50)
        .map(|seed| {
            let g = geometric_graph(100, 1000.0, 300.0, seed).unwrap();
            2.0 * g.edges().len() as f64 / 100.0
        })
        .sum::<f64>()
        / 50.0;
    assert!((mean / expected - 1.0).abs() < 0.2, "mean degree {mean} vs {expected}");
}

#[test]
fn erdos_renyi_edge_count_is_binomial() {
    let pairs: f64 = 70.0 * 69.0 / 2.0;
    let (mean, sd) = (0.07 * pairs, (0.07 * 0.93 * pairs).sqrt());
    let avg = (0..50).map(|s| erdos_renyi(70, 0.07, s, false).unwrap().edges().len() as f64).sum::<f64>() / 50.0;
    // Standard deviation of the 50-seed average.
    assert!((avg - mean).abs() <= 3.0 * sd / 50f64.sqrt(), "{avg} vs {mean}");
}

#[test]
fn expm_of_negation_is_inverse() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..20 {
        let m = DMatrix::from_fn(5, 5, |_, _| rng.random_range(-1.0..1.0));
        let m = &m * (2.0 / m.norm());
        let prod = expm(&m).unwrap() * expm(&-&m).unwrap();
        assert!((prod - DMatrix::identity(5, 5)).amax() < 1e-8);
    }
}

#[test]
fn finite_horizon_gramian_approaches_lyapunov() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..10 {
        let mut a = DMatrix::from_fn(4, 4, |_, _| rng.random_range(-1.0..1.0));
        let abscissa = spectral_abscissa(&a).unwrap().unwrap();
        a -= DMatrix::identity(4, 4) * (abscissa + 0.3);
        let b = DMatrix::from_fn(4, 2, |_, _| rng.random_range(-1.0..1.0));
        let rate = spectral_abscissa(&a).unwrap().unwrap().abs();
        let w = lyapunov_gramian(&a, &b).unwrap();
        let gam = finite_horizon_gramian(&a, &b, 0.0, 40.0 / rate).unwrap();
        assert!((&gam - &w).norm() / w.norm() < 1e-6);
    }
}

#[test]
fn grounded_propagator_is_stochastic_and_absorbing() {
    for seed in 0..10 {
        let g = connected(6, seed);
        let gl = grounded_laplacian(&g, &[0, 3]).unwrap();
        let p = expm(&(-gl.full() * 0.7)).unwrap();
        assert!(p.iter().all(|&x| x >= -1e-12));
        for i in 0..6 {
            assert!((p.row(i).sum() - 1.0).abs() < 1e-10);
        }
        assert!((p[(0, 0)] - 1.0).abs() < 1e-12 && (p[(3, 3)] - 1.0).abs() < 1e-12);
    }
}

#[test]
fn file_formats_round_trip() {
    let g = geometric_graph(12, 50.0, 20.0, 2).unwrap();
    assert_eq!(Graph::from_json(&g.to_json()).unwrap(), g);
    let (back, labels) = Graph::from_edge_list(&g.to_edge_list()).unwrap();
    assert_eq!(back.edges(), g.edges());
    assert!(labels.is_none());
    let star = named_graph(NamedGraph::Star, 5).unwrap();
    assert_eq!((0..5).map(|v| star.degree(v)).collect::<Vec<_>>(), vec![4, 1, 1, 1, 1]);
}
