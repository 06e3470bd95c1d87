use continuum_core::orbital::OrbitalElements;
use continuum_core::topology::{update_links, Computing, ComputingType, GroundStationSpec, LinkParams, LinkProtocol, NetworkGraph};
use continuum_core::SimTime;

/// All-pairs shortest latencies in milliseconds; `INFINITY` when unreachable.
pub fn floyd_warshall(graph: &NetworkGraph) -> Vec<Vec<f64>> {
    let n = graph.node_count();
    let mut d = vec![vec![f64::INFINITY; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = 0.0;
    }
    for link in graph.links() {
        let (a, b) = (link.endpoint_a.index(), link.endpoint_b.index());
        if link.latency_ms < d[a][b] {
            d[a][b] = link.latency_ms;
            d[b][a] = link.latency_ms;
        }
    }
    for k in 0..n {
        let row_k = d[k].clone();
        for row in d.iter_mut() {
            let dik = row[k];
            if dik.is_infinite() {
                continue;
            }
            for (dij, dkj) in row.iter_mut().zip(&row_k) {
                let via = dik + dkj;
                if via < *dij {
                    *dij = via;
                }
            }
        }
    }
    d
}

/// Satellites plus ground stations, linked by `protocol` at `time`.
pub fn mixed_graph(
    satellites: &[OrbitalElements],
    stations: &[GroundStationSpec],
    protocol: LinkProtocol,
    params: &LinkParams,
    time: SimTime,
) -> NetworkGraph {
    let mut b = NetworkGraph::builder();
    for (i, el) in satellites.iter().enumerate() {
        b.add_satellite(format!("sat-{i}"), *el, Computing::new(ComputingType::Edge, 4000, 8192));
    }
    for g in stations {
        b.add_ground_station(g.name.clone(), g.location, g.computing);
    }
    let mut graph = b.build(time).expect("valid graph");
    update_links(&mut graph, protocol, params).expect("links build");
    graph
}
