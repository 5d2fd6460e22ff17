use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use auxrl::envs::compass::CompassModel;
use auxrl::envs::layout::{load_preset, EnvLayout};
use auxrl::envs::lobster::LobsterModel;
use auxrl::envs::EnumerableModel;
use auxrl::oracle::mdp::TabularMdp;

use auxrl_harness::config::{self, Scale};
use auxrl_harness::{experiment, geometry, init_thread_pool, plot, sweep, HarnessError};

#[derive(Parser)]
#[command(name = "auxrl", about = "Agent-state experiment runner", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ScaleArg {
    Desk,
    Paper,
}

impl From<ScaleArg> for Scale {
    fn from(s: ScaleArg) -> Scale {
        match s {
            ScaleArg::Desk => Scale::Desk,
            ScaleArg::Paper => Scale::Paper,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Train one configuration over its seeds and write a run CSV.
    Run(RunArgs),
    /// Expand a grid file, run every point and report the selection.
    Sweep(SweepArgs),
    /// Aggregate run CSVs into an SVG learning-curve plot.
    Plot(PlotArgs),
    /// Exact references: dump the tabular MDP behind an environment.
    Oracle {
        #[command(subcommand)]
        what: OracleCommand,
    },
    /// Project a saved linear agent onto its belief plane.
    Geometry(GeometryArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Flat key = value config file.
    #[arg(long)]
    config: PathBuf,
    /// Step-count profile the config is resolved against.
    #[arg(long, value_enum, default_value = "desk")]
    scale: ScaleArg,
    /// Directory the run CSV is written into.
    #[arg(long)]
    out: PathBuf,
    /// Also save the first seed's trained net as a JSON checkpoint.
    #[arg(long)]
    save_agent: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    /// Config file with sweep.<key> axes and a sweep.seeds block.
    #[arg(long)]
    grid: PathBuf,
    #[arg(long, value_enum, default_value = "desk")]
    scale: ScaleArg,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct PlotArgs {
    /// Run CSVs, one curve per file.
    #[arg(long = "in", required = true, num_args = 1..)]
    inputs: Vec<PathBuf>,
    /// Output SVG path.
    #[arg(long)]
    out: PathBuf,
    /// Metric to plot; defaults to the most frequent one in the inputs.
    #[arg(long)]
    metric: Option<String>,
}

#[derive(Subcommand)]
enum OracleCommand {
    /// Print the enumerated MDP (transitions, rewards, start states) as JSON.
    DumpMdp {
        /// `lobster` or `compass`.
        env: String,
        /// Discount the dump is annotated with.
        #[arg(long, default_value_t = 0.9)]
        gamma: f64,
        /// Write to a file instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct GeometryArgs {
    /// Checkpoint JSON written by `run --save-agent`.
    #[arg(long)]
    agent: PathBuf,
    /// Output CSV path.
    #[arg(long)]
    out: PathBuf,
}

/// Status prints survive a closed pipe (`auxrl run ... | head`): the work
/// already happened, so a truncated report is not an error.
macro_rules! say {
    ($($arg:tt)*) => {{
        use std::io::Write;
        let _ = writeln!(std::io::stdout(), $($arg)*);
    }};
}

fn main() -> ExitCode {
    init_thread_pool();
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn dispatch(command: Command) -> Result<(), HarnessError> {
    match command {
        Command::Run(args) => run(args),
        Command::Sweep(args) => run_sweep(args),
        Command::Plot(args) => run_plot(args),
        Command::Oracle { what } => match what {
            OracleCommand::DumpMdp { env, gamma, out } => dump_mdp(&env, gamma, out),
        },
        Command::Geometry(args) => run_geometry(args),
    }
}

fn run(args: RunArgs) -> Result<(), HarnessError> {
    let text = std::fs::read_to_string(&args.config)?;
    let cfg = config::load(&text, args.scale.into())?;
    std::fs::create_dir_all(&args.out)?;
    let output = experiment::run_config(&cfg, &args.out, args.save_agent.is_some())?;
    say!("config {} ({})", cfg.tag(), output.config_hash);
    say!("csv {}", output.csv_path.display());
    if output.failed_seeds.is_empty() {
        say!("seeds {} ok", cfg.seeds.len());
    } else {
        say!(
            "seeds {} ok, {} failed: {:?}",
            cfg.seeds.len() - output.failed_seeds.len(),
            output.failed_seeds.len(),
            output.failed_seeds
        );
    }
    if let Some(path) = args.save_agent {
        let net = output.first_seed_net.ok_or_else(|| {
            HarnessError::Unsupported(
                "--save-agent needs a linear net; this run did not produce one".into(),
            )
        })?;
        let ckpt = geometry::checkpoint_from_run(&cfg, &net);
        geometry::save_checkpoint(&path, &ckpt)?;
        say!("agent {}", path.display());
    }
    Ok(())
}

fn run_sweep(args: SweepArgs) -> Result<(), HarnessError> {
    let text = std::fs::read_to_string(&args.grid)?;
    let spec = sweep::parse_grid(&text)?;
    std::fs::create_dir_all(&args.out)?;
    let report = sweep::run_sweep(&spec, args.scale.into(), &args.out)?;
    say!("report {}", report.report_path.display());
    for (i, entry) in report.entries.iter().enumerate() {
        let marker = if i == 0 { "*" } else { " " };
        let axes: Vec<String> =
            entry.assignment.iter().map(|(k, v)| format!("{k}={v}")).collect();
        say!(
            "{} {}  {}  score {:.4} +- {:.4}",
            marker,
            entry.tag,
            axes.join(" "),
            entry.mean,
            entry.se
        );
    }
    say!("selected {}", report.selected_path.display());
    Ok(())
}

fn run_plot(args: PlotArgs) -> Result<(), HarnessError> {
    let summary = plot::render(&args.inputs, &args.out, args.metric.as_deref())?;
    say!(
        "plotted `{}`: {} curves on {} grid points -> {}",
        summary.metric,
        summary.curves,
        summary.grid_points,
        args.out.display()
    );
    Ok(())
}

fn dump_model<M: EnumerableModel>(model: &M, gamma: f64) -> Result<serde_json::Value, HarnessError> {
    let mdp = TabularMdp::from_model(model, gamma)?;
    let states: Vec<serde_json::Value> = (0..mdp.state_count)
        .map(|s| {
            let actions: Vec<serde_json::Value> = (0..mdp.action_count)
                .map(|a| {
                    let edges: Vec<serde_json::Value> = mdp.edges[s][a]
                        .iter()
                        .map(|e| {
                            serde_json::json!({
                                "next": e.next,
                                "probability": e.probability,
                                "reward": e.reward,
                            })
                        })
                        .collect();
                    serde_json::json!({ "action": a, "edges": edges })
                })
                .collect();
            serde_json::json!({
                "state": s,
                "terminal": mdp.terminal[s],
                "start_probability": mdp.start[s],
                "actions": actions,
            })
        })
        .collect();
    Ok(serde_json::json!({
        "state_count": mdp.state_count,
        "action_count": mdp.action_count,
        "gamma": mdp.gamma,
        "states": states,
    }))
}

fn dump_mdp(env: &str, gamma: f64, out: Option<PathBuf>) -> Result<(), HarnessError> {
    let value = match env {
        "lobster" => {
            let EnvLayout::Lobster(params) = load_preset("lobster")? else {
                return Err(HarnessError::Unsupported(
                    "lobster preset is not a lobster layout".into(),
                ));
            };
            dump_model(&LobsterModel::new(params), gamma)?
        }
        "compass" => dump_model(&CompassModel, gamma)?,
        other => {
            return Err(HarnessError::Unsupported(format!(
                "dump-mdp covers the enumerable environments (lobster, compass), not `{other}`"
            )))
        }
    };
    let text = serde_json::to_string_pretty(&value)?;
    match out {
        Some(path) => {
            std::fs::write(&path, text)?;
            say!("mdp {}", path.display());
        }
        None => say!("{text}"),
    }
    Ok(())
}

fn run_geometry(args: GeometryArgs) -> Result<(), HarnessError> {
    let summary = geometry::export(&args.agent, &args.out)?;
    for (name, count) in &summary.series {
        say!("{name} {count} points");
    }
    say!("geometry {}", args.out.display());
    Ok(())
}
