use chrono::{TimeZone, Utc};
use continuum_core::routing::{astar_route, compute_routing_tables, lookup_route, RoutePath};
use continuum_core::topology::{NetworkGraph, NodeId};
use continuum_core::SimTime;
use continuum_testkit::{floyd_warshall, random_mixed_graph};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn epoch() -> SimTime {
    Utc.with_ymd_and_hms(2024, 12, 17, 0, 0, 0).unwrap()
}

fn assert_well_formed(graph: &NetworkGraph, route: &RoutePath) {
    assert!(route.is_simple());
    assert_eq!(route.link_sequence.len() + 1, route.node_sequence.len());
    let mut sum = 0.0;
    for (w, link) in route.node_sequence.windows(2).zip(&route.link_sequence) {
        let l = graph.link(*link).unwrap();
        assert!((l.endpoint_a == w[0] && l.endpoint_b == w[1]) || (l.endpoint_a == w[1] && l.endpoint_b == w[0]));
        sum += l.latency_ms;
    }
    assert!((sum - route.total_latency_ms).abs() <= 1e-9);
}

#[test]
fn tables_match_floyd_warshall() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..8 {
        let graph = random_mixed_graph(&mut rng, 200, epoch());
        let fw = floyd_warshall(&graph);
        let tables = compute_routing_tables(&graph);
        for (s, fw_row) in fw.iter().enumerate() {
            for (d, &expected) in fw_row.iter().enumerate() {
                let route = lookup_route(&tables, &graph, NodeId(s as u32), NodeId(d as u32)).unwrap();
                match route {
                    Some(r) => {
                        assert!((r.total_latency_ms - expected).abs() <= 1e-9, "{s} -> {d}");
                        if s != d && (s * 31 + d) % 17 == 0 {
                            assert_well_formed(&graph, &r);
                        }
                    }
                    None => assert!(expected.is_infinite(), "{s} -> {d} reachable in oracle"),
                }
            }
        }
    }
}

#[test]
fn astar_matches_tables_on_random_pairs() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    for _ in 0..8 {
        let graph = random_mixed_graph(&mut rng, 200, epoch());
        let tables = compute_routing_tables(&graph);
        let n = graph.node_count() as u32;
        for _ in 0..50 {
            let (s, d) = (NodeId(rng.gen_range(0..n)), NodeId(rng.gen_range(0..n)));
            let a = astar_route(&graph, s, d).unwrap();
            let t = lookup_route(&tables, &graph, s, d).unwrap();
            match (a, t) {
                (Some(a), Some(t)) => {
                    assert!((a.total_latency_ms - t.total_latency_ms).abs() <= 1e-9);
                    assert_well_formed(&graph, &a);
                }
                (None, None) => {}
                other => panic!("reachability differs for {s} -> {d}: {other:?}"),
            }
        }
    }
}

#[test]
fn table_latencies_obey_the_triangle_inequality() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let graph = random_mixed_graph(&mut rng, 150, epoch());
    let tables = compute_routing_tables(&graph);
    let n = graph.node_count() as u32;
    let lat = |a: u32, b: u32| tables.table(NodeId(a)).unwrap().get(NodeId(b)).map_or(f64::INFINITY, |e| e.latency_ms);
    for _ in 0..2000 {
        let (a, b, c) = (rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(0..n));
        if a == c {
            continue;
        }
        assert!(lat(a, c) <= lat(a, b) + lat(b, c) + 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn astar_equals_dijkstra_on_every_pair(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let graph = random_mixed_graph(&mut rng, 60, epoch());
        let tables = compute_routing_tables(&graph);
        let n = graph.node_count() as u32;
        for s in 0..n {
            for d in 0..n {
                let a = astar_route(&graph, NodeId(s), NodeId(d)).unwrap().map(|r| r.total_latency_ms);
                let t = tables.table(NodeId(s)).unwrap().get(NodeId(d)).map(|e| e.latency_ms);
                match (a, t) {
                    (Some(a), Some(t)) => prop_assert!((a - t).abs() <= 1e-9),
                    (None, None) => prop_assert!(s != d),
                    (Some(a), None) => prop_assert!(s == d && a == 0.0),
                    (None, Some(_)) => prop_assert!(false, "tables reach {} -> {} but A* does not", s, d),
                }
            }
        }
    }
}
