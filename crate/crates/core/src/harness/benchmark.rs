//! Benchmark orchestration: seeded optimiser runs, CSV logging, summaries.
//!
//! CSV schema (comma-separated, '.' decimal):
//! `iter,seed,optimizer,g,best_so_far,avg_cum_reward,<one column per search
//! dimension, named>`, with dimension columns in physical units.

use super::config::ExperimentConfig;
use super::eval::{avg_cum_reward, evaluate_point, find_worst_start};
use crate::error::Result;
use crate::optimizers::make_optimizer;
use crate::rng::RngStream;
use crate::space::{Dataset, EvalRecord};
use rayon::prelude::*;
use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

/// Stream id of the worst-start scan, outside the per-optimizer range.
const WORST_SCAN_STREAM: u64 = 1000;

/// Fixed per-optimizer RNG stream ids, independent of config order.
fn optimizer_stream(name: &str) -> u64 {
    match name {
        "bore-rf" => 1,
        "bore-mlp" => 2,
        "bo-ucb" => 3,
        "bo-ei" => 4,
        "tpe" => 5,
        "cmaes" => 6,
        "random" => 7,
        _ => 99,
    }
}

/// One logged benchmark iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct LogRow {
    pub iter: usize,
    pub seed: u64,
    pub optimizer: String,
    pub g: f64,
    pub best_so_far: f64,
    pub avg_cum_reward: f64,
    /// Physical (denormalised) coordinates of the evaluated point.
    pub x: Vec<f64>,
}

pub fn csv_header(cfg: &ExperimentConfig) -> String {
    let mut h = String::from("iter,seed,optimizer,g,best_so_far,avg_cum_reward");
    for name in cfg.space.names() {
        h.push(',');
        h.push_str(name);
    }
    h
}

fn csv_row(row: &LogRow) -> String {
    let mut s = format!(
        "{},{},{},{},{},{}",
        row.iter, row.seed, row.optimizer, row.g, row.best_so_far, row.avg_cum_reward
    );
    for v in &row.x {
        write!(s, ",{v}").expect("string write");
    }
    s
}

/// Runs one optimiser for one seed: n iterations of suggest, evaluate,
/// observe. When `worst` is given the dataset is seeded with it (without
/// consuming budget) and distribution-based methods start centred there.
/// Rows are flushed to `csv_path` as they are produced.
pub fn run_tune(
    cfg: &ExperimentConfig,
    opt_name: &str,
    seed: u64,
    worst: Option<&EvalRecord>,
    csv_path: Option<&Path>,
) -> Result<Vec<LogRow>> {
    let n = cfg.raw.experiment.iterations;
    let mut opt =
        make_optimizer(opt_name, cfg.space.dim(), cfg.gamma_schedule(), cfg.raw.cmaes.sigma0)?;
    let root = RngStream::new(seed, optimizer_stream(opt_name));

    let mut writer = match csv_path {
        Some(p) => {
            let mut w = BufWriter::new(File::create(p)?);
            writeln!(w, "{}", csv_header(cfg))?;
            Some(w)
        }
        None => None,
    };

    let mut data = Dataset::new();
    if let Some(w) = worst {
        data.push(w.clone());
        opt.set_initial_mean(&w.x);
    }

    let mut g_history = Vec::with_capacity(n);
    let mut rows = Vec::with_capacity(n);
    for t in 1..=n {
        let iter_stream = root.child(t as u64);
        let x = cfg.space.clamp_unit(&opt.suggest(&data, iter_stream.child(0)));
        let rec = evaluate_point(cfg, &x, iter_stream.child(1))?;
        opt.observe(&x, rec.g);
        g_history.push(rec.g);
        data.push(rec);

        let row = LogRow {
            iter: t,
            seed,
            optimizer: opt_name.to_string(),
            g: *g_history.last().expect("just pushed"),
            best_so_far: data.incumbent().expect("non-empty").g,
            avg_cum_reward: avg_cum_reward(&g_history, t)?,
            x: cfg.space.denormalize(&x),
        };
        if let Some(w) = writer.as_mut() {
            writeln!(w, "{}", csv_row(&row))?;
            w.flush()?;
        }
        rows.push(row);
    }
    Ok(rows)
}

/// Runs every configured optimiser for every seed, writing one CSV per
/// `(optimizer, seed)` pair plus `summary.csv` and (when seeding at the
/// worst start) `worst_start.csv` into `out_dir`.
pub fn run_benchmark(cfg: &ExperimentConfig, out_dir: &Path) -> Result<()> {
    std::fs::create_dir_all(out_dir)?;
    let exp = &cfg.raw.experiment;

    let worst = if exp.start_at_worst {
        let stream = RngStream::new(exp.seeds[0], WORST_SCAN_STREAM);
        let rec = find_worst_start(cfg, stream)?;
        let mut w = BufWriter::new(File::create(out_dir.join("worst_start.csv"))?);
        write!(w, "g")?;
        for name in cfg.space.names() {
            write!(w, ",{name}")?;
        }
        writeln!(w)?;
        write!(w, "{}", rec.g)?;
        for v in cfg.space.denormalize(&rec.x) {
            write!(w, ",{v}")?;
        }
        writeln!(w)?;
        log::info!("worst start g = {}", rec.g);
        Some(rec)
    } else {
        None
    };

    let pairs: Vec<(String, u64)> = exp
        .optimizers
        .iter()
        .flat_map(|o| exp.seeds.iter().map(move |&s| (o.clone(), s)))
        .collect();
    let results: Vec<Result<Vec<LogRow>>> = pairs
        .par_iter()
        .map(|(opt, seed)| {
            let path = out_dir.join(format!("{opt}_seed{seed}.csv"));
            run_tune(cfg, opt, *seed, worst.as_ref(), Some(&path))
        })
        .collect();
    let mut all_rows = Vec::new();
    for r in results {
        all_rows.push(r?);
    }

    write_summary(cfg, &all_rows, &out_dir.join("summary.csv"))?;
    Ok(())
}

/// Mean and population std of `avg_cum_reward` across seeds, per optimiser
/// and iteration.
fn write_summary(cfg: &ExperimentConfig, runs: &[Vec<LogRow>], path: &Path) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "iter,optimizer,mean_avg_cum_reward,std_avg_cum_reward")?;
    let n = cfg.raw.experiment.iterations;
    for opt in &cfg.raw.experiment.optimizers {
        for t in 1..=n {
            let vals: Vec<f64> = runs
                .iter()
                .flat_map(|rows| rows.iter())
                .filter(|r| r.optimizer == *opt && r.iter == t)
                .map(|r| r.avg_cum_reward)
                .collect();
            let m = vals.iter().sum::<f64>() / vals.len() as f64;
            let var = vals.iter().map(|v| (v - m).powi(2)).sum::<f64>() / vals.len() as f64;
            writeln!(w, "{t},{opt},{m},{}", var.sqrt())?;
        }
    }
    Ok(())
}
