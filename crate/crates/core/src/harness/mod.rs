//! Experiment orchestration: configuration, objective evaluation, seeded
//! benchmark runs, and plotting.

mod benchmark;
mod config;
mod eval;
mod plot;

pub use benchmark::{csv_header, run_benchmark, run_tune, LogRow};
pub use config::{pendulum_preset, planar_preset, ExperimentConfig};
pub use eval::{avg_cum_reward, evaluate_point, find_worst_start, WORST_SCAN_POINTS};
pub use plot::plot_dir;
