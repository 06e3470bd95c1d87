use std::net::SocketAddr;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use chrono::{DateTime, TimeDelta, Utc};
use clap::{Args, Parser, Subcommand};
use continuum_cli::{format_table, summarize, write_csv, write_walker_tle, Experiment, ExperimentSpec, RunSummary};
use continuum_core::constellation::WalkerShell;
use continuum_core::engine::{Pacing, SharedSnapshot, SnapshotPublisher};
use continuum_core::routing::{RouterKind, TableSources};
use continuum_core::time::parse_duration;
use continuum_core::topology::{CandidateMode, LinkProtocol};
use tracing_subscriber::EnvFilter;

/// Discrete-step simulator of the Edge, Cloud and LEO satellite continuum.
#[derive(Parser)]
#[command(name = "continuum", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment and write its metrics.
    Run(SimArgs),
    /// Compare finished runs.
    Summarize {
        /// Run directories or steps.csv files.
        paths: Vec<PathBuf>,
        /// Print CSV instead of a text table.
        #[arg(long)]
        csv: bool,
    },
    /// Run a real-time simulation behind an HTTP latency proxy.
    Proxy {
        #[command(flatten)]
        sim: SimArgs,
        #[arg(long, default_value = "127.0.0.1:8080")]
        listen: SocketAddr,
        /// Base URL requests are forwarded to.
        #[arg(long)]
        upstream: String,
    },
    /// Write a synthetic Walker shell as a TLE file.
    GenTle {
        #[arg(long)]
        satellites: usize,
        #[arg(long)]
        planes: Option<usize>,
        #[arg(long, default_value_t = 550.0)]
        altitude_km: f64,
        #[arg(long, default_value_t = 53.0)]
        inclination_deg: f64,
        #[arg(long, default_value_t = 1)]
        phasing: usize,
        /// Element epoch, RFC 3339.
        #[arg(long)]
        epoch: Option<DateTime<Utc>>,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args, Clone)]
struct SimArgs {
    /// TOML experiment file; flags given on the command line take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    tle: Option<PathBuf>,
    /// Generate a Walker shell of this size instead of reading a TLE file.
    #[arg(long)]
    walker: Option<usize>,
    #[arg(long)]
    ground_roster: Option<PathBuf>,
    #[arg(long)]
    steps: Option<u64>,
    /// Simulated time per step, e.g. `60s` or `1m`.
    #[arg(long, value_parser = parse_step)]
    step_duration: Option<TimeDelta>,
    /// Simulated start time, RFC 3339.
    #[arg(long)]
    start_time: Option<DateTime<Utc>>,
    /// mst, mst_loop, mst_smart_loop, pst, pst_loop or pst_smart_loop.
    #[arg(long)]
    link_protocol: Option<LinkProtocol>,
    /// `dijkstra` precomputes routing tables every step; `astar` routes on demand.
    #[arg(long)]
    router: Option<RouterKind>,
    /// all_nodes or satellites_only.
    #[arg(long, value_parser = parse_table_sources)]
    table_sources: Option<TableSources>,
    #[arg(long)]
    multiplier: Option<usize>,
    #[arg(long)]
    workflows_per_step: Option<usize>,
    /// Workflow template (TOML); defaults to the flood-response workflow.
    #[arg(long)]
    workflow: Option<PathBuf>,
    /// Release each workflow this many steps after deployment.
    #[arg(long)]
    release_after: Option<u64>,
    /// Count live SLO violations after every step.
    #[arg(long)]
    track_slo: bool,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads for parallel phases.
    #[arg(long)]
    workers: Option<usize>,
    /// as_fast_as_possible or real_time.
    #[arg(long)]
    pacing: Option<Pacing>,
    #[arg(long)]
    max_isl_range_km: Option<f64>,
    /// Nearest-neighbour candidates per satellite.
    #[arg(long, conflicts_with = "all_pairs")]
    knn: Option<usize>,
    /// Test every satellite pair as a link candidate.
    #[arg(long)]
    all_pairs: bool,
    /// Degree at or below which loop protocols add links.
    #[arg(long)]
    loop_degree_threshold: Option<usize>,
}

fn parse_step(text: &str) -> Result<TimeDelta, String> {
    parse_duration(text)
}

fn parse_table_sources(text: &str) -> Result<TableSources, String> {
    match text.trim().to_ascii_lowercase().replace('-', "_").as_str() {
        "all_nodes" | "all" => Ok(TableSources::AllNodes),
        "satellites_only" | "satellites" => Ok(TableSources::SatellitesOnly),
        other => Err(format!("unknown table sources {other:?} (expected all_nodes or satellites_only)")),
    }
}

impl SimArgs {
    fn into_spec(self) -> Result<ExperimentSpec> {
        let mut spec = match &self.config {
            Some(path) => ExperimentSpec::load(path)?,
            None => ExperimentSpec::default(),
        };
        let sim = &mut spec.simulation;
        if let Some(p) = self.tle {
            sim.tle_path = Some(p);
        }
        if let Some(p) = self.ground_roster {
            sim.ground_roster_path = Some(p);
        }
        if let Some(n) = self.steps {
            sim.step_count = n;
        }
        if let Some(d) = self.step_duration {
            sim.step_duration = d;
        }
        if let Some(t) = self.start_time {
            sim.start_time = t;
        }
        if let Some(p) = self.link_protocol {
            sim.link_protocol = p;
        }
        if let Some(r) = self.router {
            sim.router = r;
            sim.precompute_tables = r == RouterKind::Dijkstra;
        }
        if let Some(t) = self.table_sources {
            sim.table_sources = t;
        }
        if let Some(p) = self.pacing {
            sim.pacing = p;
        }
        if let Some(r) = self.max_isl_range_km {
            sim.links.max_isl_range_km = r;
        }
        if let Some(k) = self.knn {
            sim.links.candidates = CandidateMode::Nearest { k };
        }
        if self.all_pairs {
            sim.links.candidates = CandidateMode::AllPairs;
        }
        if let Some(t) = self.loop_degree_threshold {
            sim.links.loop_degree_threshold = t;
        }
        if let Some(n) = self.walker {
            spec.walker_satellites = Some(n);
        }
        if let Some(m) = self.multiplier {
            spec.satellite_multiplier = m;
        }
        if let Some(w) = self.workflows_per_step {
            spec.workflow_instances_per_step = w;
        }
        if let Some(p) = self.workflow {
            spec.workflow_path = Some(p);
        }
        if let Some(r) = self.release_after {
            spec.release_after_steps = Some(r);
        }
        if self.track_slo {
            spec.track_slo_violations = true;
        }
        if let Some(o) = self.out {
            spec.output_directory = o;
        }
        if let Some(w) = self.workers {
            spec.workers = Some(w);
        }
        Ok(spec)
    }
}

fn init_workers(workers: Option<usize>) -> Result<()> {
    if let Some(n) = workers {
        if n == 0 {
            bail!("--workers must be at least 1");
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().context("configuring worker threads")?;
    }
    Ok(())
}

fn print_summary(s: &RunSummary) {
    println!(
        "{} satellites + {} ground stations, {} steps, {}: {:.2} s end to end, {:.2} ms mean step, {:.2} ms mean scheduling, {:.1} MB peak memory",
        s.satellites, s.ground_stations, s.steps, s.link_protocol, s.end_to_end_s, s.mean_step_ms, s.mean_scheduling_ms, s.peak_mem_mb
    );
    if s.workflow_instances_per_step > 0 {
        println!("{} workflows deployed, {} unschedulable", s.deployed, s.unschedulable);
    }
}

fn run(args: SimArgs) -> Result<()> {
    let spec = args.into_spec()?;
    init_workers(spec.workers)?;
    let out = spec.output_directory.clone();
    let summary = Experiment::prepare(spec)?.run()?;
    print_summary(&summary);
    println!("results in {}", out.display());
    Ok(())
}

fn proxy(args: SimArgs, listen: SocketAddr, upstream: String) -> Result<()> {
    let explicit_pacing = args.pacing;
    let mut spec = args.into_spec()?;
    match explicit_pacing {
        Some(Pacing::RealTime) | None => spec.simulation.pacing = Pacing::RealTime,
        Some(other) => bail!("the proxy needs --pacing real_time, got {other}"),
    }
    init_workers(spec.workers)?;
    let shared = SharedSnapshot::default();
    let state = continuum_proxy::ProxyState::new(shared.clone(), &upstream)?;
    let mut experiment = Experiment::prepare(spec)?;
    experiment.register(SnapshotPublisher::new(shared))?;

    let runtime = tokio::runtime::Runtime::new().context("starting async runtime")?;
    runtime.block_on(async move {
        let (listener, addr) = continuum_proxy::bind(listen).await.with_context(|| format!("binding {listen}"))?;
        println!("proxy listening on http://{addr}, forwarding to {upstream}");
        let sim = tokio::task::spawn_blocking(move || experiment.run());
        let (done_tx, done_rx) = tokio::sync::oneshot::channel::<()>();
        let server = tokio::spawn(continuum_proxy::serve(listener, state, async move {
            tokio::select! {
                _ = done_rx => {}
                _ = tokio::signal::ctrl_c() => {}
            }
        }));
        let summary = sim.await.context("simulation thread panicked")?;
        let _ = done_tx.send(());
        server.await.context("proxy task panicked")??;
        print_summary(&summary?);
        Ok(())
    })
}

/// Error chain without causes already quoted by their parent.
fn describe(e: &anyhow::Error) -> String {
    let mut out = e.to_string();
    for cause in e.chain().skip(1) {
        let text = cause.to_string();
        if !out.contains(&text) {
            out = format!("{out}: {text}");
        }
    }
    out
}

fn main() -> ExitCode {
    tracing_subscriber::fmt().with_env_filter(EnvFilter::from_default_env()).with_writer(std::io::stderr).init();
    let result = match Cli::parse().command {
        Command::Run(args) => run(args),
        Command::Summarize { paths, csv } => summarize(&paths).map_err(Into::into).and_then(|rows| {
            if csv {
                write_csv(&rows, std::io::stdout().lock())?;
            } else {
                print!("{}", format_table(&rows));
            }
            Ok(())
        }),
        Command::Proxy { sim, listen, upstream } => proxy(sim, listen, upstream),
        Command::GenTle { satellites, planes, altitude_km, inclination_deg, phasing, epoch, out } => {
            let mut shell = WalkerShell::starlink_like(satellites);
            if let Some(p) = planes {
                shell.planes = p;
            }
            shell.altitude_km = altitude_km;
            shell.inclination_deg = inclination_deg;
            shell.phasing = phasing;
            let epoch = epoch.unwrap_or_else(|| continuum_core::engine::SimulationConfig::default().start_time);
            write_walker_tle(&out, &shell, epoch).map(|n| println!("wrote {n} satellites to {}", out.display())).map_err(Into::into)
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", describe(&e));
            ExitCode::FAILURE
        }
    }
}
