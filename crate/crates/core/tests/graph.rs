mod common;

use dggkit::graph::{generate, load_graph, save_graph, Family, MeasureMode, MeasuredGraph, Subset};
use dggkit::Error;
use proptest::prelude::*;

use common::{corpus, family, family_deg};

#[test]
fn documents() {
    let k2: MeasuredGraph = load_graph(br#"{"vertices":[{"id":"a"},{"id":"b"}],"edges":[{"u":"a","v":"b","mu":1}]}"#).unwrap();
    assert_eq!(k2.len(), 2);
    assert_eq!((k2.degree(0), k2.degree(1)), (1.0, 1.0));

    let p3: MeasuredGraph = load_graph(
        br#"{"vertices":[{"id":"a","m":1},{"id":"b","m":1},{"id":"c","m":1}],
             "edges":[{"u":"a","v":"b","mu":1},{"u":"b","v":"c","mu":1}]}"#,
    )
    .unwrap();
    assert_eq!(p3.degree(p3.index_of("b").unwrap()), 2.0);

    let bad = |doc: &str| load_graph::<f64>(doc.as_bytes()).unwrap_err();
    let neg = bad(r#"{"vertices":[{"id":"a"},{"id":"b"}],"edges":[{"u":"a","v":"b","mu":-1}]}"#);
    assert!(neg.to_string().contains("nonpositive weight"), "{neg}");
    assert!(matches!(bad("{"), Error::Parse(_)));
    assert!(matches!(bad(r#"{"vertices":[{"id":"a"},{"id":"b"}]}"#), Error::InvalidGraph(_)));
    assert!(matches!(
        bad(r#"{"vertices":[{"id":"a"},{"id":"b"}],"edges":[{"u":"a","v":"a","mu":1},{"u":"a","v":"b","mu":1}]}"#),
        Error::InvalidGraph(_)
    ));
    assert!(matches!(
        bad(r#"{"vertices":[{"id":"a"},{"id":"b"}],"edges":[{"u":"a","v":"b","mu":1},{"u":"b","v":"a","mu":2}]}"#),
        Error::InvalidGraph(_)
    ));
    assert!(matches!(bad(r#"{"vertices":[{"id":"a","m":0},{"id":"b"}],"edges":[{"u":"a","v":"b","mu":1}]}"#), Error::InvalidGraph(_)));
}

#[test]
fn generators() {
    let p3 = family("path:3");
    assert_eq!((p3.len(), p3.edge_count()), (3, 2));
    let star = family("star:3,1");
    assert_eq!((star.len(), star.edge_count()), (7, 6));
    for (k, n) in [(2, 3), (4, 2), (5, 1)] {
        let s: MeasuredGraph = generate(Family::Star { arms: k, half_len: n }, MeasureMode::Unit).unwrap();
        assert_eq!(s.len(), 2 * k * n + 1);
    }
    let z = family("lattice:1,2");
    assert_eq!(z.ids(), ["-2", "-1", "0", "1", "2"]);
    assert_eq!(z.diameter(), 4);
    // |{z ∈ ℤ² : |z|₁ ≤ 3}| = 2·3² + 2·3 + 1
    assert_eq!(family("lattice:2,3").len(), 25);
    // 1 + 3 + 6 + 12
    assert_eq!(family("tree:3,3").len(), 22);
}

#[test]
fn distances_and_constants() {
    let p3 = family("path:3");
    let (a, c) = (0, 2);
    assert_eq!(p3.distance(a, &Subset::singleton(&p3, c)), 2);
    assert_eq!(p3.distance(a, &Subset::new(&p3, [a, c]).unwrap()), 0);
    let p21 = family("path:21");
    assert_eq!(p21.subset_distance(&Subset::singleton(&p21, 0), &Subset::singleton(&p21, 20)), 20);

    let k2 = family("path:2").structural_constants();
    assert_eq!((k2.d_m, k2.d_mu), (1.0, 1.0));
    let c = p3.structural_constants();
    assert_eq!((c.d_m, c.d_mu, c.m_max, c.m_min, c.mu_min), (2.0, 2.0, 1.0, 1.0, 1.0));
    assert_eq!(family_deg("path:3").structural_constants().d_m, 1.0);

    let u = Subset::singleton(&p3, a);
    assert_eq!(p3.neighborhood(&u, 0), u);
    assert_eq!(p3.neighborhood(&u, 1).members(), [0, 1]);
    let p5 = family("path:5");
    assert!(p5.neighborhood(&Subset::singleton(&p5, 2), 2).is_whole());

    assert!(Subset::new(&p3, Vec::<usize>::new()).is_err());
    assert!(Subset::new(&p3, [7]).is_err());
}

#[test]
fn corpus_invariants() {
    for (name, g) in corpus() {
        let n = g.len();
        let dist: Vec<Vec<usize>> = (0..n).map(|x| g.distances_from(&[x])).collect();
        for x in 0..n {
            let deg: f64 = g.neighbors(x).iter().map(|&(_, w)| w).sum();
            assert!((deg - g.degree(x)).abs() < 1e-12, "{name}");
            for y in 0..n {
                assert_eq!(dist[x][y], dist[y][x], "{name}");
                assert_eq!(dist[x][y] == 0, x == y, "{name}");
                for z in 0..n {
                    assert!(dist[x][z] <= dist[x][y] + dist[y][z], "{name}");
                }
            }
        }
        let back: MeasuredGraph = load_graph(save_graph(&g).as_bytes()).unwrap();
        assert_eq!(back, g, "{name}");
        let u = Subset::singleton(&g, 0);
        for r in 0..3 {
            for s in 0..3 {
                assert_eq!(g.neighborhood(&g.neighborhood(&u, s), r), g.neighborhood(&u, r + s), "{name}");
            }
        }
    }
}

/// A random connected graph: a random spanning tree plus extra edges, with
/// random weights and measures.
fn arb_graph() -> impl Strategy<Value = MeasuredGraph> {
    (3usize..30)
        .prop_flat_map(|n| {
            (
                Just(n),
                proptest::collection::vec(any::<prop::sample::Index>(), n - 1),
                proptest::collection::vec((0..n, 0..n), 0..n),
                proptest::collection::vec(0.1f64..5.0, 2 * n),
                proptest::collection::vec(0.1f64..5.0, n),
            )
        })
        .prop_map(|(n, parents, extra, w, m)| {
            let mut edges: Vec<(usize, usize, f64)> = Vec::new();
            for v in 1..n {
                edges.push((parents[v - 1].index(v), v, w[v - 1]));
            }
            for (k, &(a, b)) in extra.iter().enumerate() {
                let dup = edges.iter().any(|&(u, v, _)| (u, v) == (a, b) || (v, u) == (a, b));
                if a != b && !dup {
                    edges.push((a, b, w[n - 1 + k]));
                }
            }
            MeasuredGraph::new((0..n).map(|i| format!("v{i}")).collect(), &edges, m).unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn metric_axioms(g in arb_graph()) {
        let n = g.len();
        let d: Vec<Vec<usize>> = (0..n).map(|x| g.distances_from(&[x])).collect();
        for x in 0..n {
            for y in 0..n {
                prop_assert_eq!(d[x][y], d[y][x]);
                prop_assert_eq!(d[x][y] == 0, x == y);
                for z in 0..n {
                    prop_assert!(d[x][z] <= d[x][y] + d[y][z]);
                }
            }
        }
    }

    #[test]
    fn neighborhoods_compose(g in arb_graph(), seed in 0usize..30, r in 0usize..4, s in 0usize..4) {
        let u = Subset::singleton(&g, seed % g.len());
        prop_assert_eq!(g.neighborhood(&g.neighborhood(&u, s), r), g.neighborhood(&u, r + s));
    }

    #[test]
    fn documents_round_trip(g in arb_graph()) {
        let back: MeasuredGraph = load_graph(save_graph(&g).as_bytes()).unwrap();
        prop_assert_eq!(back, g);
    }
}
