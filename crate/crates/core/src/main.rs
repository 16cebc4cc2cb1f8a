use adaptive_mpc::envs::run_episode;
use adaptive_mpc::harness::{plot_dir, run_benchmark, run_tune, ExperimentConfig};
use adaptive_mpc::rng::RngStream;
use anyhow::{bail, Context};
use clap::{Parser, Subcommand};
use std::path::PathBuf;

#[derive(Parser)]
#[command(name = "adaptive-mpc", about = "Adaptive MPC hyper-parameter benchmark", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a single optimiser for one seed and log its trajectory.
    Tune {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        optimizer: String,
        /// Seed; defaults to the first seed in the config.
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory for the run CSV.
        #[arg(long, default_value = "results")]
        out: PathBuf,
    },
    /// Run the full optimiser comparison from the config.
    Benchmark {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = "results")]
        out: PathBuf,
    },
    /// Run one episode at a given search point and print the return.
    RunEpisode {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Comma-separated physical coordinates in search-space order;
        /// defaults to the box centre.
        #[arg(long)]
        point: Option<String>,
    },
    /// Render the CSVs of a benchmark directory into an SVG chart.
    Plot {
        /// Directory holding the run CSVs.
        #[arg(long, default_value = "results")]
        out: PathBuf,
    },
}

fn main() -> anyhow::Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    match cli.command {
        Command::Tune { config, optimizer, seed, out } => {
            let cfg = load(&config)?;
            if !cfg.raw.experiment.optimizers.iter().any(|o| *o == optimizer) {
                log::warn!("optimizer '{optimizer}' is not listed in the config");
            }
            let seed = seed.unwrap_or(cfg.raw.experiment.seeds[0]);
            std::fs::create_dir_all(&out)?;
            let path = out.join(format!("{optimizer}_seed{seed}.csv"));
            let rows = run_tune(&cfg, &optimizer, seed, None, Some(&path))?;
            let best = rows.last().context("no iterations were run")?;
            println!(
                "{}: {} iterations, final best_so_far = {}, log at {}",
                optimizer,
                rows.len(),
                best.best_so_far,
                path.display()
            );
        }
        Command::Benchmark { config, out } => {
            let cfg = load(&config)?;
            run_benchmark(&cfg, &out)?;
            println!("benchmark complete; CSVs in {}", out.display());
        }
        Command::RunEpisode { config, seed, point } => {
            let cfg = load(&config)?;
            let unit = match point {
                None => vec![0.5; cfg.space.dim()],
                Some(text) => {
                    let phys: Vec<f64> = text
                        .split(',')
                        .map(|v| v.trim().parse::<f64>())
                        .collect::<Result<_, _>>()
                        .context("parsing --point")?;
                    if phys.len() != cfg.space.dim() {
                        bail!(
                            "--point needs {} comma-separated values ({})",
                            cfg.space.dim(),
                            cfg.space.names().join(",")
                        );
                    }
                    cfg.space.normalize(&phys)
                }
            };
            let (psi, phi) = cfg.decode(&unit)?;
            let env = cfg.make_env()?;
            let r = run_episode(
                env.as_ref(),
                &cfg.episode_options(),
                &phi,
                &psi,
                RngStream::new(seed, 0),
            );
            println!(
                "return = {}, collision steps = {}, final state = {:?}",
                r.total_reward,
                r.collision_steps,
                r.states.last().expect("episode has states")
            );
        }
        Command::Plot { out } => {
            let svg = out.join("plot.svg");
            plot_dir(&out, &svg)?;
            println!("wrote {}", svg.display());
        }
    }
    Ok(())
}

fn load(path: &std::path::Path) -> anyhow::Result<ExperimentConfig> {
    ExperimentConfig::from_path(path).with_context(|| format!("loading {}", path.display()))
}
