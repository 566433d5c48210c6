//! Small exact values, frozen from an independent brute-force enumeration.

use shforge_core::oracle::{exact_max_edges, greedy_free_graph, SearchConfig};

#[test]
fn five_three_values() {
    let values: Vec<usize> = (3..=7)
        .map(|n| exact_max_edges(&SearchConfig::new(n, 3, 5, 3)).unwrap().value)
        .collect();
    assert_eq!(values, [1, 2, 2, 4, 7]);
}

#[test]
fn five_three_linear_values() {
    let values: Vec<usize> = (3..=7)
        .map(|n| {
            let cfg = SearchConfig::new(n, 3, 5, 3).with_max_pairwise_intersection(1);
            exact_max_edges(&cfg).unwrap().value
        })
        .collect();
    assert_eq!(values, [1, 1, 2, 4, 7]);
}

#[test]
fn fano_plane_is_optimal_on_seven() {
    let res = exact_max_edges(&SearchConfig::new(7, 3, 5, 3)).unwrap();
    assert_eq!(res.witness.max_pairwise_intersection(), 1);
    assert!(res.witness.is_free_naive(5, 3).unwrap().is_free());
}

#[test]
fn greedy_never_beats_exact() {
    for (n, r, v) in [(6, 3, 5), (7, 3, 6), (7, 4, 8), (8, 4, 9), (8, 3, 5)] {
        let exact = exact_max_edges(&SearchConfig::new(n, r, v, 3)).unwrap().value;
        for seed in 0..5 {
            let g = greedy_free_graph(&SearchConfig::new(n, r, v, 3).with_seed(seed)).unwrap();
            assert!(g.len() <= exact, "n={n} r={r} v={v} seed={seed}");
        }
    }
}

#[test]
fn denser_configurations() {
    for (n, r, v, want) in [(7, 4, 5, 14), (7, 3, 4, 15), (10, 3, 6, 6)] {
        let got = exact_max_edges(&SearchConfig::new(n, r, v, 3)).unwrap().value;
        assert_eq!(got, want, "n={n} r={r} v={v}");
    }
}
