//! Parameter sweeps over the chain and dumbbell families, emitted as CSV.
//!
//! Grid points are solved in parallel; rows are buffered and written in
//! configuration order so identical configs produce identical bytes.

use std::path::PathBuf;

use anyhow::{bail, Context};
use clap::{Args, Subcommand};
use qnu_core::{
    compute_utility, max_active_coalition_size, EnumerationConfig, EnumerationMode, NetworkSpec,
    UtilityModel, ACTIVE_RATE_THRESHOLD,
};
use rayon::prelude::*;

#[derive(Subcommand)]
pub enum SweepFamily {
    /// Chains of increasing length.
    Chain {
        /// Chain lengths to sweep: a single value or an inclusive range "2..16".
        #[arg(long, value_parser = parse_range, default_value = "2..16")]
        nodes: NodeRange,
        #[arg(long, default_value_t = 0.6)]
        link_rate: f64,
        #[command(flatten)]
        grid: GridOpts,
    },
    /// Dumbbells over a log-spaced bar-to-spoke rate ratio grid.
    Dumbbell {
        #[arg(long, default_value_t = 3)]
        side: usize,
        #[arg(long, default_value_t = 0.6)]
        spoke_rate: f64,
        #[arg(long, default_value_t = 0.1)]
        ratio_min: f64,
        #[arg(long, default_value_t = 100.0)]
        ratio_max: f64,
        #[arg(long, default_value_t = 13)]
        ratio_steps: usize,
        #[command(flatten)]
        grid: GridOpts,
    },
}

#[derive(Args, Clone)]
pub struct GridOpts {
    /// Swap efficiency q at every node.
    #[arg(long, default_value_t = 0.9)]
    swap_eff: f64,
    /// Comma-separated volume bases.
    #[arg(long, value_delimiter = ',', default_values_t = [1.5, 2.0, 3.0])]
    beta: Vec<f64>,
    /// Comma-separated effective gate-error values.
    #[arg(long, value_delimiter = ',', default_values_t = [0.0, 0.01])]
    eps: Vec<f64>,
    #[arg(long)]
    taper_v0: Option<f64>,
    #[arg(long, value_parser = crate::parse_mode, default_value = "connected")]
    mode: EnumerationMode,
    #[arg(long)]
    no_prune: bool,
    /// Active-rate threshold for the max_coalition column.
    #[arg(long, default_value_t = ACTIVE_RATE_THRESHOLD)]
    threshold: f64,
    /// Write CSV here instead of stdout.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Clone, Copy)]
pub struct NodeRange {
    lo: usize,
    hi: usize,
}

fn parse_range(s: &str) -> Result<NodeRange, String> {
    let parse = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("{t:?}: {e}"));
    let (lo, hi) = match s.split_once("..") {
        Some((a, b)) => (parse(a)?, parse(b)?),
        None => {
            let n = parse(s)?;
            (n, n)
        }
    };
    if lo < 2 || hi < lo {
        return Err(format!("bad node range {s:?}; need 2 <= lo <= hi"));
    }
    Ok(NodeRange { lo, hi })
}

impl GridOpts {
    fn enumeration(&self) -> EnumerationConfig {
        EnumerationConfig {
            mode: self.mode,
            size_cap: None,
            prune: !self.no_prune,
            force_all: false,
        }
    }
}

/// One grid point: the network plus the swept parameter values echoed into
/// the row prefix.
struct Job {
    prefix: String,
    net: qnu_core::Result<NetworkSpec>,
    beta: f64,
}

fn solve_rows(jobs: Vec<(Job, f64)>, grid: &GridOpts, with_size: bool) -> Vec<String> {
    jobs.par_iter()
        .map(|(job, eps)| {
            let outcome = job.net.as_ref().map_err(|e| e.to_string()).and_then(|net| {
                let model = UtilityModel::with_taper(job.beta, grid.taper_v0)
                    .map_err(|e| e.to_string())?;
                compute_utility(net, &model, &grid.enumeration()).map_err(|e| e.to_string())
            });
            match outcome {
                Ok(result) => {
                    let tail = if with_size {
                        format!(",{}", max_active_coalition_size(&result, grid.threshold))
                    } else {
                        String::new()
                    };
                    format!(
                        "{},{},{},{},{},{}{tail},optimal",
                        job.prefix,
                        job.beta,
                        eps,
                        result.utility,
                        result.noswap_baseline,
                        result.ratio_to_noswap()
                    )
                }
                Err(msg) => {
                    let blanks = if with_size { ",,,,," } else { ",,,," };
                    format!("{},{},{}{blanks}{}", job.prefix, job.beta, eps, sanitize(&msg))
                }
            }
        })
        .collect()
}

fn sanitize(msg: &str) -> String {
    msg.replace([',', '\n', '\r'], ";")
}

fn write_csv(csv: &Option<PathBuf>, header: &str, rows: &[String]) -> anyhow::Result<()> {
    let mut text = String::with_capacity(rows.len() * 64);
    text.push_str(header);
    text.push('\n');
    for row in rows {
        text.push_str(row);
        text.push('\n');
    }
    match csv {
        Some(path) => std::fs::write(path, text)
            .with_context(|| format!("writing {}", path.display()))?,
        None => print!("{text}"),
    }
    Ok(())
}

pub fn run(family: SweepFamily) -> anyhow::Result<()> {
    match family {
        SweepFamily::Chain {
            nodes,
            link_rate,
            grid,
        } => {
            let mut jobs = Vec::new();
            for m in nodes.lo..=nodes.hi {
                for &beta in &grid.beta {
                    for &eps in &grid.eps {
                        jobs.push((
                            Job {
                                prefix: m.to_string(),
                                net: NetworkSpec::chain(m, link_rate, grid.swap_eff, eps),
                                beta,
                            },
                            eps,
                        ));
                    }
                }
            }
            let rows = solve_rows(jobs, &grid, true);
            write_csv(
                &grid.csv,
                "m,beta,eps,u_comp,noswap,ratio,max_coalition,status",
                &rows,
            )
        }
        SweepFamily::Dumbbell {
            side,
            spoke_rate,
            ratio_min,
            ratio_max,
            ratio_steps,
            grid,
        } => {
            if ratio_steps == 0 || ratio_min <= 0.0 || ratio_max < ratio_min {
                bail!("need ratio_steps >= 1 and 0 < ratio_min <= ratio_max");
            }
            let mut jobs = Vec::new();
            for i in 0..ratio_steps {
                let ratio = if ratio_steps == 1 {
                    ratio_min
                } else {
                    let t = i as f64 / (ratio_steps - 1) as f64;
                    ratio_min * (ratio_max / ratio_min).powf(t)
                };
                for &beta in &grid.beta {
                    for &eps in &grid.eps {
                        jobs.push((
                            Job {
                                prefix: ratio.to_string(),
                                net: NetworkSpec::dumbbell(
                                    side,
                                    spoke_rate,
                                    ratio * spoke_rate,
                                    grid.swap_eff,
                                    eps,
                                ),
                                beta,
                            },
                            eps,
                        ));
                    }
                }
            }
            let rows = solve_rows(jobs, &grid, false);
            write_csv(
                &grid.csv,
                "ratio,beta,eps,u_comp,noswap,u_ratio,status",
                &rows,
            )
        }
    }
}
