use std::sync::{Arc, Mutex};
use std::time::Instant;

use chrono::TimeDelta;
use continuum_core::constellation::WalkerShell;
use continuum_core::engine::{
    build_graph, default_satellite_computing, latest, read_plugin_csv, read_step_csv, EngineError, HookPhase, Pacing, PluginError,
    SatelliteSpec, SharedSnapshot, SimPlugin, Simulation, SimulationConfig, SimulationState, SnapshotPublisher,
};
use continuum_core::routing::{astar_route, lookup_route, RouterKind};
use continuum_core::topology::{default_roster, NetworkGraph, NodeId};
use continuum_core::SimTime;

fn config(steps: u64) -> SimulationConfig {
    SimulationConfig { step_count: steps, ..SimulationConfig::default() }
}

fn graph(n: usize, cfg: &SimulationConfig) -> NetworkGraph {
    let sats: Vec<_> = WalkerShell::starlink_like(n)
        .generate(cfg.start_time)
        .unwrap()
        .into_iter()
        .enumerate()
        .map(|(i, elements)| SatelliteSpec { name: format!("sat-{i}"), elements })
        .collect();
    build_graph(&sats, &default_roster()[..20], default_satellite_computing(), cfg.start_time).unwrap()
}

type Log = Arc<Mutex<Vec<(String, HookPhase, u64, SimTime, u64)>>>;

struct Recorder {
    name: String,
    log: Log,
    fail_at: Option<(HookPhase, u64)>,
}

impl Recorder {
    fn new(name: &str, log: &Log) -> Self {
        Recorder { name: name.into(), log: log.clone(), fail_at: None }
    }

    fn record(&self, phase: HookPhase, step: u64, t: SimTime, state: &SimulationState) -> Result<(), PluginError> {
        self.log.lock().unwrap().push((self.name.clone(), phase, step, t, state.step_index()));
        if self.fail_at == Some((phase, step)) {
            return Err("planned failure".into());
        }
        Ok(())
    }
}

impl SimPlugin for Recorder {
    fn name(&self) -> &str {
        &self.name
    }

    fn pre_step(&mut self, step: u64, t: SimTime, state: &mut SimulationState) -> Result<(), PluginError> {
        self.record(HookPhase::Pre, step, t, state)
    }

    fn post_step(&mut self, step: u64, t: SimTime, state: &mut SimulationState) -> Result<(), PluginError> {
        self.record(HookPhase::Post, step, t, state)
    }
}

#[test]
fn hooks_run_in_registration_order_once_per_step() {
    let cfg = config(4);
    let mut sim = Simulation::new(cfg.clone(), graph(100, &cfg)).unwrap().with_resource_sampling(false);
    let log = Log::default();
    sim.register(Recorder::new("first", &log)).unwrap();
    sim.register(Recorder::new("second", &log)).unwrap();
    sim.run().unwrap();
    let log = log.lock().unwrap();
    assert_eq!(log.len(), 16);
    for (k, chunk) in log.chunks(4).enumerate() {
        let step = k as u64 + 1;
        let order: Vec<_> = chunk.iter().map(|e| (e.0.as_str(), e.1, e.2)).collect();
        assert_eq!(
            order,
            vec![("first", HookPhase::Pre, step), ("second", HookPhase::Pre, step), ("first", HookPhase::Post, step), ("second", HookPhase::Post, step)]
        );
        let expected_t = cfg.start_time + TimeDelta::seconds(60 * step as i64);
        assert!(chunk.iter().all(|e| e.3 == expected_t));
        assert_eq!(chunk[0].4, step - 1, "pre hooks see the previous step");
        assert_eq!(chunk[2].4, step, "post hooks see the finished step");
    }
    assert_eq!(sim.state().plugin_timings().len(), 8);
    assert_eq!(sim.plugin_names(), vec!["first", "second"]);
}

#[test]
fn registering_after_start_fails() {
    let cfg = config(2);
    let mut sim = Simulation::new(cfg.clone(), graph(50, &cfg)).unwrap().with_resource_sampling(false);
    sim.step().unwrap();
    let log = Log::default();
    assert!(matches!(sim.register(Recorder::new("late", &log)), Err(EngineError::AlreadyStarted)));
}

#[test]
fn plugin_failure_stops_the_run() {
    for (phase, expected_index) in [(HookPhase::Pre, 2), (HookPhase::Post, 3)] {
        let cfg = config(10);
        let mut sim = Simulation::new(cfg.clone(), graph(50, &cfg)).unwrap().with_resource_sampling(false);
        let log = Log::default();
        let mut failing = Recorder::new("failing", &log);
        failing.fail_at = Some((phase, 3));
        sim.register(failing).unwrap();
        sim.register(Recorder::new("after", &log)).unwrap();
        match sim.run() {
            Err(EngineError::Plugin { plugin, phase: p, step, .. }) => {
                assert_eq!((plugin.as_str(), p, step), ("failing", phase, 3));
            }
            other => panic!("expected plugin error, got {other:?}"),
        }
        assert_eq!(sim.state().step_index(), expected_index);
        let log = log.lock().unwrap();
        let last = log.last().unwrap();
        assert_eq!((last.0.as_str(), last.1, last.2), ("failing", phase, 3), "later hooks do not run");
    }
}

#[test]
fn runs_are_deterministic() {
    let cfg = SimulationConfig { precompute_tables: true, router: RouterKind::Dijkstra, ..config(5) };
    let run = || {
        let mut sim = Simulation::new(cfg.clone(), graph(300, &cfg)).unwrap().with_resource_sampling(false);
        let mut snapshots = Vec::new();
        while !sim.is_finished() {
            sim.step().unwrap();
            let g = &sim.state().graph;
            let links: Vec<_> = g.links().iter().map(|l| (l.endpoint_a, l.endpoint_b, l.distance_km.to_bits())).collect();
            let positions: Vec<_> = g.positions().map(|p| (p.x_km.to_bits(), p.y_km.to_bits(), p.z_km.to_bits())).collect();
            let table: Vec<_> = sim.state().tables().unwrap().table(NodeId(0)).unwrap().iter().map(|(d, e)| (d, e.next_hop, e.latency_ms.to_bits())).collect();
            snapshots.push((links, positions, table));
        }
        snapshots
    };
    assert_eq!(run(), run());
}

#[test]
fn state_is_coherent_after_every_step() {
    let cfg = SimulationConfig { precompute_tables: true, router: RouterKind::Dijkstra, ..config(3) };
    let mut sim = Simulation::new(cfg.clone(), graph(200, &cfg)).unwrap().with_resource_sampling(false);
    let mut previous = sim.state().sim_time();
    while !sim.is_finished() {
        sim.step().unwrap();
        let state = sim.state();
        assert!(state.sim_time() > previous);
        previous = state.sim_time();
        let g = &state.graph;
        assert_eq!(g.time(), state.sim_time());
        for node in g.nodes() {
            assert_eq!(node.motion.position_at(state.sim_time()).unwrap(), node.position);
        }
        let tables = state.tables().unwrap();
        for s in (0..g.node_count() as u32).step_by(37) {
            for d in (0..g.node_count() as u32).step_by(11) {
                let t = lookup_route(tables, g, NodeId(s), NodeId(d)).unwrap().map(|r| r.total_latency_ms);
                let a = astar_route(g, NodeId(s), NodeId(d)).unwrap().map(|r| r.total_latency_ms);
                match (t, a) {
                    (Some(t), Some(a)) => assert!((t - a).abs() <= 1e-9),
                    (t, a) => assert_eq!(t.is_some(), a.is_some()),
                }
            }
        }
        let m = state.metrics().last().unwrap();
        assert!(m.tables_ms > 0.0 && m.total_ms >= m.position_ms + m.links_ms + m.tables_ms);
    }
}

#[test]
fn metrics_are_written_as_csv() {
    let cfg = config(3);
    let mut sim = Simulation::new(cfg.clone(), graph(60, &cfg)).unwrap();
    let log = Log::default();
    sim.register(Recorder::new("rec", &log)).unwrap();
    sim.run().unwrap();
    let dir = tempfile::tempdir().unwrap();
    sim.write_metrics(dir.path()).unwrap();
    let steps = read_step_csv(&dir.path().join("steps.csv")).unwrap();
    assert_eq!(steps.len(), 3);
    assert_eq!(steps.iter().map(|s| s.step).collect::<Vec<_>>(), vec![1, 2, 3]);
    assert!(steps.iter().all(|s| s.mem_mb > 0.0));
    let plugins = read_plugin_csv(&dir.path().join("plugins.csv")).unwrap();
    assert_eq!(plugins.len(), 3);
    assert!(plugins.iter().all(|p| p.plugin == "rec"));
}

#[test]
fn snapshot_publisher_tracks_the_latest_step() {
    let cfg = SimulationConfig { precompute_tables: true, router: RouterKind::Dijkstra, ..config(2) };
    let mut sim = Simulation::new(cfg.clone(), graph(80, &cfg)).unwrap().with_resource_sampling(false);
    let shared = SharedSnapshot::default();
    sim.register(SnapshotPublisher::new(shared.clone())).unwrap();
    assert!(latest(&shared).is_none());
    sim.step().unwrap();
    let snap = latest(&shared).unwrap();
    assert_eq!(snap.step_index, 1);
    let from = &default_roster()[0].name;
    let to = &default_roster()[5].name;
    let via_snapshot = snap.view().query_route(from, to).map(|r| r.total_latency_ms).ok();
    let via_state = sim.state().query_route(from, to).map(|r| r.total_latency_ms).ok();
    assert_eq!(via_snapshot, via_state);
    sim.step().unwrap();
    assert_eq!(latest(&shared).unwrap().step_index, 2);
}

#[test]
fn real_time_pacing_waits_for_wall_clock() {
    let cfg = SimulationConfig { step_duration: TimeDelta::milliseconds(60), pacing: Pacing::RealTime, ..config(4) };
    let mut sim = Simulation::new(cfg.clone(), graph(30, &cfg)).unwrap().with_resource_sampling(false);
    let start = Instant::now();
    sim.run().unwrap();
    assert!(start.elapsed().as_millis() >= 240);
}
