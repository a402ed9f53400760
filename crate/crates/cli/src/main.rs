use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use pitchrl::config::Config;
use pitchrl::eval::{extract_offball_q, render_field_plot, team_aggregate, team_summary_csv, PlotMode, PlotOptions};
use pitchrl::ingest::{
    feature_dump, load_events, load_roster, load_tracking, preprocess, scene_frames, synth_generate, MatchInput,
    PreprocessSettings, Roster, SarDataset, Scenario, StateKind, SynthOptions,
};
use pitchrl::io::write_atomic;
use pitchrl::rlearn::{loss_log_csv, loss_record, standardize, train, Checkpoint};

#[derive(Parser)]
#[command(name = "pitchrl", version, about = "Decision-making states and masked recurrent Q-learning for soccer tracking data")]
struct Cli {
    /// JSON config; defaults apply when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Tracking + events to a .sar.jsonl file.
    Preprocess(PreprocessArgs),
    /// Write a seeded synthetic match (tracking.csv, events.json, roster.json).
    Synth(SynthArgs),
    /// Train a Q-network and write a checkpoint plus a loss CSV.
    Train(TrainArgs),
    /// Loss metrics of a checkpoint on a SAR file.
    Eval(EvalArgs),
    /// SVG field plot of one frame with off-ball Q-values.
    Viz(VizArgs),
    /// Dump EDMS state rows for a frame range as CSV.
    Features(FeaturesArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum StateArg {
    Edms,
    Pvs,
}

impl From<StateArg> for StateKind {
    fn from(s: StateArg) -> Self {
        match s {
            StateArg::Edms => StateKind::Edms,
            StateArg::Pvs => StateKind::Pvs,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Switch {
    On,
    Off,
}

/// A directory holding tracking.csv, events.json and optionally roster.json.
#[derive(Args)]
struct MatchDirs {
    #[arg(long = "match", value_name = "DIR", required = true)]
    matches: Vec<PathBuf>,
}

#[derive(Args)]
struct PreprocessArgs {
    #[command(flatten)]
    input: MatchDirs,
    #[arg(long, value_enum, default_value = "edms")]
    state: StateArg,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value = "counterattack")]
    scenario: String,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct TrainArgs {
    #[arg(long)]
    data: PathBuf,
    /// Must match the data file's state kind when given.
    #[arg(long, value_enum)]
    state: Option<StateArg>,
    #[arg(long, value_enum)]
    mask: Option<Switch>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    epochs: Option<usize>,
    /// Checkpoint path.
    #[arg(long)]
    out: PathBuf,
    /// Loss CSV; defaults to the checkpoint path with a .loss.csv suffix.
    #[arg(long)]
    log: Option<PathBuf>,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    checkpoint: PathBuf,
    #[arg(long)]
    data: PathBuf,
    /// Metrics CSV; printed to stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Per-team terminal-step Q summary CSV.
    #[arg(long)]
    teams: Option<PathBuf>,
}

#[derive(Args)]
struct VizArgs {
    #[arg(long)]
    checkpoint: PathBuf,
    #[arg(long)]
    data: PathBuf,
    /// Match directory the SAR file was built from.
    #[arg(long = "match", value_name = "DIR")]
    match_dir: PathBuf,
    #[arg(long)]
    frame: u64,
    /// Highlighted off-ball players; none gives a pitch-only plot.
    #[arg(long = "player", value_delimiter = ',')]
    players: Vec<u32>,
    #[arg(long)]
    episode: Option<u64>,
    #[arg(long, default_value_t = 3)]
    top_k: usize,
    /// Draw top-k move arrows instead of a bar chart.
    #[arg(long)]
    overlay: bool,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct FeaturesArgs {
    #[arg(long = "match", value_name = "DIR")]
    match_dir: PathBuf,
    #[arg(long)]
    from: u64,
    #[arg(long)]
    to: u64,
    #[arg(long)]
    out: PathBuf,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    if let Err(e) = init_threads() {
        eprintln!("error: {e:#}");
        return ExitCode::from(2);
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn init_threads() -> Result<()> {
    if let Ok(v) = std::env::var("PITCHRL_THREADS") {
        let n: usize = v.parse().with_context(|| format!("PITCHRL_THREADS must be a positive integer, got `{v}`"))?;
        if n == 0 {
            bail!("PITCHRL_THREADS must be at least 1");
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    let config = match &cli.config {
        Some(path) => Config::load(path)?,
        None => Config::default(),
    };
    match cli.command {
        Command::Preprocess(a) => cmd_preprocess(&config, a),
        Command::Synth(a) => cmd_synth(&config, a),
        Command::Train(a) => cmd_train(&config, a),
        Command::Eval(a) => cmd_eval(a),
        Command::Viz(a) => cmd_viz(&config, a),
        Command::Features(a) => cmd_features(&config, a),
    }
}

fn load_match(dir: &Path) -> Result<MatchInput> {
    let roster_path = dir.join("roster.json");
    let roster = if roster_path.exists() { load_roster(&roster_path)? } else { Roster::default() };
    Ok(MatchInput {
        tracking: load_tracking(&dir.join("tracking.csv"))?,
        events: load_events(&dir.join("events.json"))?,
        roster,
    })
}

fn cmd_preprocess(config: &Config, a: PreprocessArgs) -> Result<()> {
    let matches = a.input.matches.iter().map(|d| load_match(d)).collect::<Result<Vec<_>>>()?;
    let vocabulary = config.vocabulary()?;
    let engine = config.feature_engine();
    let epv = config.epv_grid()?;
    let settings = PreprocessSettings {
        pitch: &config.pitch,
        kinematics: &config.kinematics,
        ingest: &config.ingest,
        vocabulary: &vocabulary,
        engine: &engine,
        epv: &epv,
        state_kind: a.state.into(),
    };
    let (dataset, report) = preprocess(&matches, &settings)?;
    let mut buf = Vec::new();
    dataset.write(&mut buf)?;
    write_atomic(&a.out, &buf)?;
    eprintln!(
        "{} sequences ({} truncated), {} samples, {} events dropped",
        report.sequences, report.truncated, report.samples, report.dropped_events
    );
    Ok(())
}

fn cmd_synth(config: &Config, a: SynthArgs) -> Result<()> {
    let scenario: Scenario = a.scenario.parse()?;
    let mut options = SynthOptions::new(a.seed, a.n, scenario);
    options.frame_rate = config.pitch.frame_rate;
    synth_generate(&options)?.write_to_dir(&a.out)?;
    Ok(())
}

fn cmd_train(config: &Config, a: TrainArgs) -> Result<()> {
    let data = SarDataset::load(&a.data)?;
    if let Some(state) = a.state {
        let want: StateKind = state.into();
        if want != data.header.state_kind {
            bail!("{} holds {} states, not {want}", a.data.display(), data.header.state_kind);
        }
    }
    let mut tc = config.train.clone();
    if let Some(m) = a.mask {
        tc.mask = matches!(m, Switch::On);
    }
    if let Some(s) = a.seed {
        tc.seed = s;
    }
    if let Some(e) = a.epochs {
        tc.epochs = e;
    }
    tc.validate()?;
    let scaler = &data.header.scaling.features;
    let trajectories = standardize(&data.trajectories()?, scaler);
    let outcome = train(&trajectories, &tc, None)?;
    let checkpoint = Checkpoint::new(&outcome.net, data.header.state_kind, data.header.scaling.clone(), tc);
    checkpoint.save(&a.out)?;
    let log_path = a.log.unwrap_or_else(|| sibling(&a.out, "loss.csv"));
    write_atomic(&log_path, loss_log_csv(&outcome.log).as_bytes())?;
    if let (Some(first), Some(last)) = (outcome.log.first(), outcome.log.last()) {
        eprintln!("total loss {:.6} -> {:.6} over {} epochs", first.total_loss, last.total_loss, last.epoch);
    }
    Ok(())
}

fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    path.with_file_name(format!("{stem}.{suffix}"))
}

fn load_checked(checkpoint: &Path, data: &Path) -> Result<(Checkpoint, SarDataset)> {
    let ck = Checkpoint::load(checkpoint)?;
    let ds = SarDataset::load(data)?;
    if ck.state_kind != ds.header.state_kind || ck.shape.input != ds.header.state_dim {
        bail!(
            "checkpoint expects {} states of width {}, {} holds {} of width {}",
            ck.state_kind,
            ck.shape.input,
            data.display(),
            ds.header.state_kind,
            ds.header.state_dim
        );
    }
    Ok((ck, ds))
}

fn cmd_eval(a: EvalArgs) -> Result<()> {
    let (ck, ds) = load_checked(&a.checkpoint, &a.data)?;
    let net = ck.net()?;
    let scaler = &ck.scaling.features;
    let raw = ds.trajectories()?;
    let record = loss_record(ck.config.epochs, &net, &standardize(&raw, scaler), &ck.config)?;
    let csv = loss_log_csv(std::slice::from_ref(&record));
    match &a.out {
        Some(path) => write_atomic(path, csv.as_bytes())?,
        None => print!("{csv}"),
    }
    if let Some(path) = &a.teams {
        let rows = team_aggregate(&net, scaler, &raw)?;
        for team in ["home", "away"] {
            if !rows.iter().any(|r| r.team.as_str() == team) {
                eprintln!("warning: no sequences for team {team}; row omitted");
            }
        }
        write_atomic(path, team_summary_csv(&rows).as_bytes())?;
    }
    Ok(())
}

fn cmd_viz(config: &Config, a: VizArgs) -> Result<()> {
    let (ck, ds) = load_checked(&a.checkpoint, &a.data)?;
    let net = ck.net()?;
    let raw = ds.trajectories()?;
    let highlights = a
        .players
        .iter()
        .map(|&p| extract_offball_q(&net, &ck.scaling.features, &ck.config, &raw, a.frame, p, a.episode, a.top_k))
        .collect::<pitchrl::Result<Vec<_>>>()?;
    let input = load_match(&a.match_dir)?;
    let scenes = scene_frames(&input, &config.pitch, &config.kinematics, &config.ingest)?;
    let scene = scenes
        .iter()
        .find(|s| s.frame.frame_index == a.frame)
        .with_context(|| format!("frame {} is not in {}", a.frame, a.match_dir.display()))?;
    let options = PlotOptions {
        mode: if a.overlay { PlotMode::Overlay } else { PlotMode::Panel },
        top_k: a.top_k,
        pitch: config.pitch,
    };
    let svg = render_field_plot(&scene.frame, &highlights, &options)?;
    write_atomic(&a.out, svg.as_bytes())?;
    Ok(())
}

fn cmd_features(config: &Config, a: FeaturesArgs) -> Result<()> {
    if a.from > a.to {
        bail!("--from {} is after --to {}", a.from, a.to);
    }
    let input = load_match(&a.match_dir)?;
    let scenes = scene_frames(&input, &config.pitch, &config.kinematics, &config.ingest)?;
    let (columns, rows) = feature_dump(&scenes, &config.feature_engine(), a.from, a.to)?;
    let mut out = String::from("frame_index,player_id");
    for c in &columns {
        out.push(',');
        out.push_str(c);
    }
    out.push('\n');
    for r in &rows {
        out.push_str(&format!("{},{}", r.frame_index, r.player_id));
        for v in &r.values {
            out.push_str(&format!(",{v}"));
        }
        out.push('\n');
    }
    write_atomic(&a.out, out.as_bytes())?;
    eprintln!("{} rows", rows.len());
    Ok(())
}
