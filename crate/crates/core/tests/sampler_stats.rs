use hyperspec::sampler::{sample_bipartite_biregular, SampleMethod};
use hyperspec::{sample_regular_hypergraph, SampleConfig};

/// Fraction of simple bipartite draws discarded for repeating a
/// hyperedge neighbourhood.
fn duplicate_rate(n: usize, d: usize, k: usize, draws: u64) -> f64 {
    let (mut dup, mut ok) = (0usize, 0usize);
    for seed in 0..draws {
        let (_, rep) = sample_regular_hypergraph(&SampleConfig::new(n, d, k, seed)).unwrap();
        dup += rep.duplicate_neighborhood_rejections;
        ok += 1;
    }
    dup as f64 / (dup + ok) as f64
}

#[test]
fn duplicate_rejections_vanish_with_n() {
    let rates: Vec<f64> = [60, 120, 240].iter().map(|&n| duplicate_rate(n, 5, 3, 1000)).collect();
    assert!(rates[0] > rates[1] && rates[1] > rates[2], "{rates:?}");
    assert!(rates[0] < 0.5, "{rates:?}");
}

#[test]
fn samples_are_regular_and_uniform() {
    for (i, (n, d, k)) in [(12, 3, 3), (15, 4, 3), (30, 5, 3), (20, 4, 4), (10, 3, 2)].into_iter().enumerate() {
        for seed in 0..20u64 {
            let (h, _) = sample_regular_hypergraph(&SampleConfig::new(n, d, k, 1000 * i as u64 + seed)).unwrap();
            assert_eq!(h.num_edges(), n * d / k);
            assert!(h.edges().iter().all(|e| e.len() == k));
            let mut deg = vec![0; n];
            h.edges().iter().flatten().for_each(|&v| deg[v] += 1);
            assert!(deg.iter().all(|&x| x == d));
            let mut sorted = h.edges().to_vec();
            sorted.sort();
            sorted.dedup();
            assert_eq!(sorted.len(), h.num_edges());
        }
    }
}

#[test]
fn switching_draws_are_simple_and_deterministic() {
    let cfg = SampleConfig::new(80, 8, 4, 3).with_method(SampleMethod::Switching { sweeps: 5 });
    let (a, _) = sample_regular_hypergraph(&cfg).unwrap();
    let (b, _) = sample_regular_hypergraph(&cfg).unwrap();
    assert_eq!(a, b);
    let (g, _) = sample_bipartite_biregular(&cfg).unwrap();
    assert!(g.adjacency_matrix().as_slice().iter().all(|&v| v == 0.0 || v == 1.0));
}
