//! Command-line driver: single solves, parameter sweeps over chain and
//! dumbbell families, coalition-size bound reports, and entanglement-graph
//! export.

mod dot;
mod sweep;

use std::path::PathBuf;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use qnu_core::{
    coalition_size_cap, coalition_size_lower_bound_noisy, coalition_size_lower_bound_perfect,
    compute_utility, load_network, EnumerationConfig, EnumerationMode, NetworkSpec, UtilityModel,
    UtilityReport, UtilityResult,
};

#[derive(Parser)]
#[command(name = "qnu", about = "Quantum network utility benchmarking", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a homogeneous repeater chain.
    Chain {
        #[arg(long)]
        nodes: usize,
        #[arg(long, default_value_t = 0.6)]
        link_rate: f64,
        #[command(flatten)]
        params: NetParams,
        #[command(flatten)]
        run: RunOpts,
    },
    /// Solve a dumbbell network (two hubs joined by a bar, spokes on each).
    Dumbbell {
        #[arg(long)]
        side: usize,
        #[arg(long, default_value_t = 0.6)]
        spoke_rate: f64,
        #[arg(long, default_value_t = 0.6)]
        bar_rate: f64,
        #[command(flatten)]
        params: NetParams,
        #[command(flatten)]
        run: RunOpts,
    },
    /// Solve a network loaded from a file.
    Solve {
        #[arg(long)]
        network: PathBuf,
        #[command(flatten)]
        run: RunOpts,
    },
    /// Sweep a parameter grid and emit CSV rows.
    Sweep {
        #[command(subcommand)]
        family: sweep::SweepFamily,
    },
    /// Report coalition-size bounds for a homogeneous chain.
    Bounds {
        #[arg(long)]
        nodes: usize,
        #[arg(long, default_value_t = 0.9)]
        swap_eff: f64,
        #[arg(long, default_value_t = 2.0)]
        beta: f64,
        #[arg(long, default_value_t = 0.0)]
        eps: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve a network and export its entanglement graph in DOT form.
    ExportDot {
        #[arg(long)]
        network: PathBuf,
        #[command(flatten)]
        run: RunOpts,
    },
}

#[derive(Args, Clone, Copy)]
struct NetParams {
    /// Swap efficiency q applied at every node.
    #[arg(long, default_value_t = 0.9)]
    swap_eff: f64,
    /// Effective two-qubit gate error probability.
    #[arg(long, default_value_t = 0.0)]
    eps: f64,
}

#[derive(Args, Clone)]
struct RunOpts {
    /// Volume base beta.
    #[arg(long, default_value_t = 2.0)]
    beta: f64,
    /// Taper threshold v0; large volumes saturate toward v0.
    #[arg(long)]
    taper_v0: Option<f64>,
    /// Candidate coalitions: connected subgraphs or all subsets.
    #[arg(long, value_parser = parse_mode, default_value = "connected")]
    mode: EnumerationMode,
    /// Disable the error-derived coalition size cap.
    #[arg(long)]
    no_prune: bool,
    /// Allow all-subset enumeration past the 20-node guard.
    #[arg(long)]
    force_all: bool,
    /// Active-rate threshold for reported tasks and support edges.
    #[arg(long, default_value_t = qnu_core::ACTIVE_RATE_THRESHOLD)]
    threshold: f64,
    /// Write output here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

pub(crate) fn parse_mode(s: &str) -> Result<EnumerationMode, String> {
    match s {
        "connected" => Ok(EnumerationMode::Connected),
        "all" => Ok(EnumerationMode::All),
        other => Err(format!("unknown mode {other:?}; use connected or all")),
    }
}

impl RunOpts {
    fn model(&self) -> anyhow::Result<UtilityModel> {
        Ok(UtilityModel::with_taper(self.beta, self.taper_v0)?)
    }

    fn enumeration(&self) -> EnumerationConfig {
        EnumerationConfig {
            mode: self.mode,
            size_cap: None,
            prune: !self.no_prune,
            force_all: self.force_all,
        }
    }

    fn solve(&self, net: &NetworkSpec) -> anyhow::Result<UtilityResult> {
        Ok(compute_utility(net, &self.model()?, &self.enumeration())?)
    }
}

fn emit(out: &Option<PathBuf>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(path) => std::fs::write(path, text)
            .with_context(|| format!("writing {}", path.display()))?,
        None => print!("{text}"),
    }
    Ok(())
}

fn emit_report(result: &UtilityResult, out: &Option<PathBuf>) -> anyhow::Result<()> {
    let report = UtilityReport::from_result(result);
    let mut text = serde_json::to_string_pretty(&report)?;
    text.push('\n');
    emit(out, &text)
}

fn main() -> anyhow::Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::Chain {
            nodes,
            link_rate,
            params,
            run,
        } => {
            let net = NetworkSpec::chain(nodes, link_rate, params.swap_eff, params.eps)?;
            emit_report(&run.solve(&net)?, &run.out)
        }
        Command::Dumbbell {
            side,
            spoke_rate,
            bar_rate,
            params,
            run,
        } => {
            let net =
                NetworkSpec::dumbbell(side, spoke_rate, bar_rate, params.swap_eff, params.eps)?;
            emit_report(&run.solve(&net)?, &run.out)
        }
        Command::Solve { network, run } => {
            let net = load_network(&network)
                .with_context(|| format!("loading {}", network.display()))?;
            emit_report(&run.solve(&net)?, &run.out)
        }
        Command::Sweep { family } => sweep::run(family),
        Command::Bounds {
            nodes,
            swap_eff,
            beta,
            eps,
            out,
        } => {
            if nodes < 2 {
                bail!("--nodes must be at least 2");
            }
            let perfect = coalition_size_lower_bound_perfect(nodes, swap_eff, beta)?;
            let report = serde_json::json!({
                "nodes": nodes,
                "swap_eff": swap_eff,
                "beta": beta,
                "epsilon_eff": eps,
                "size_cap": coalition_size_cap(eps),
                "lower_bound_perfect": perfect,
                "lower_bound_noisy": if eps > 0.0 {
                    coalition_size_lower_bound_noisy(nodes, swap_eff, beta, eps).ok()
                } else {
                    None
                },
            });
            let mut text = serde_json::to_string_pretty(&report)?;
            text.push('\n');
            emit(&out, &text)
        }
        Command::ExportDot { network, run } => {
            let net = load_network(&network)
                .with_context(|| format!("loading {}", network.display()))?;
            let result = run.solve(&net)?;
            let text = dot::render(&net, &result, run.threshold);
            emit(&run.out, &text)
        }
    }
}
