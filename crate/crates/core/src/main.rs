use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use dtnc::netmodel::{write_records, RoadNetwork, DEFAULT_CELL_SIZE_M};
use dtnc::pipeline::{
    read_locations, read_output, run_stream, write_locations, write_output, Config, StreamReport,
};
use dtnc::prob::DiffusionPolicy;
use dtnc::synthlab::{deviation_report, generate, read_truth, write_truth, Scenario};
use dtnc::ttdist::DistributionStore;
use dtnc::{Error, Result};

#[derive(Parser)]
#[command(
    name = "dtnc",
    version,
    about = "Cleanse noisy cellular trajectories against a transportation network"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Cleanse a trajectory CSV window by window.
    Cleanse(CleanseArgs),
    /// Generate a synthetic city with raw observations and ground truth.
    Synth(SynthArgs),
    /// Compare cleansed output with ground truth.
    Eval(EvalArgs),
}

#[derive(Args)]
struct CleanseArgs {
    /// Network in JSON-lines form.
    #[arg(long)]
    network: PathBuf,
    /// Input CSV: object_id,t,lat,lon,u.
    #[arg(long)]
    input: PathBuf,
    /// Output CSV: object_id,t,lat,lon,provenance.
    #[arg(long)]
    output: PathBuf,
    #[arg(long, default_value_t = 70)]
    window: u32,
    #[arg(long, default_value_t = 15)]
    particles: usize,
    #[arg(long, default_value_t = 2.0)]
    epsilon: f64,
    #[arg(long, default_value_t = 0.05)]
    delta: f64,
    #[arg(long, default_value_t = 1.0)]
    gamma0: f64,
    /// Maximum travel speed for pruning, m/s.
    #[arg(long, default_value_t = 50.0)]
    vmax: f64,
    #[arg(long, default_value = "even")]
    policy: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads (0 = all cores).
    #[arg(long, default_value_t = 0)]
    workers: usize,
    /// Samples per edge for initial distributions.
    #[arg(long, default_value_t = 20)]
    init_samples: usize,
    /// Travel-time distributions: loaded if the file exists, saved after the run.
    #[arg(long)]
    dist_store: Option<PathBuf>,
    /// Write per-phase timings and run statistics as JSON.
    #[arg(long)]
    timings: Option<PathBuf>,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long)]
    spec: PathBuf,
    #[arg(long)]
    out_raw: PathBuf,
    #[arg(long)]
    out_truth: PathBuf,
    /// Also write the generated network as JSON lines.
    #[arg(long)]
    out_network: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    cleansed: PathBuf,
    #[arg(long)]
    truth: PathBuf,
    #[arg(long)]
    report: PathBuf,
}

fn cleanse(a: CleanseArgs) -> Result<()> {
    let policy: DiffusionPolicy = a.policy.parse().map_err(Error::Config)?;
    let config = Config {
        window_len: a.window,
        n_particles: a.particles,
        epsilon: a.epsilon,
        delta: a.delta,
        gamma0: a.gamma0,
        v_max: a.vmax,
        policy,
        seed: a.seed,
        init_samples: a.init_samples,
        workers: a.workers,
        ..Config::default()
    };
    config.validate()?;
    let net = RoadNetwork::load(&a.network, DEFAULT_CELL_SIZE_M)?;
    let mut dists = DistributionStore::initialize(&net, config.init_samples, config.seed);
    if let Some(path) = a.dist_store.as_ref().filter(|p| p.exists()) {
        dists.apply_records(&net, &DistributionStore::load_records(path)?)?;
    }
    let locations = read_locations(&a.input)?;
    let out = run_stream(locations, &net, &mut dists, &config)?;
    write_output(create(&a.output)?, &out.rows)?;
    if let Some(path) = &a.dist_store {
        dists.save(&net, path)?;
    }
    if let Some(path) = &a.timings {
        write_json(path, &out.report)?;
    }
    log_report(&out.report);
    Ok(())
}

fn log_report(r: &StreamReport) {
    log::info!(
        "{} windows, {} objects, {} locations ({} unmatched, {} dropped), {} samples learned",
        r.windows,
        r.stats.objects,
        r.stats.locations,
        r.stats.unmatched,
        r.dropped,
        r.samples
    );
}

fn synth(a: SynthArgs) -> Result<()> {
    let scenario = Scenario::load(&a.spec)?;
    let g = generate(&scenario, a.seed)?;
    write_locations(&a.out_raw, &g.raw)?;
    write_truth(&a.out_truth, &g.truth)?;
    if let Some(path) = &a.out_network {
        write_records(path, &g.records)?;
    }
    Ok(())
}

fn eval(a: EvalArgs) -> Result<()> {
    let cleansed = read_output(&a.cleansed)?;
    let truth = read_truth(&a.truth)?;
    write_json(&a.report, &deviation_report(&cleansed, &truth)?)
}

fn create(path: &PathBuf) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::Input(format!("cannot create {}: {e}", path.display())))
}

fn write_json<T: Serialize>(path: &PathBuf, value: &T) -> Result<()> {
    let w = create(path)?;
    serde_json::to_writer_pretty(w, value)?;
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let res = match cli.command {
        Command::Cleanse(a) => cleanse(a),
        Command::Synth(a) => synth(a),
        Command::Eval(a) => eval(a),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
