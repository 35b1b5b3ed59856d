use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use noma_lc::experiment::{self, ExperimentKind, ExperimentSpec};
use noma_lc::scenario::{generate, ScenarioConfig, ScenarioDocument};
use noma_lc::{GroupingPolicy, NetworkModel, Schedule, SolveConfig};

#[derive(Parser)]
#[command(
    name = "noma-lc",
    version,
    about = "Multi-cell NOMA load-coupling experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Maximum per-cell throughput against the load limit.
    Throughput {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',')]
        load_limits: Option<Vec<f64>>,
    },
    /// Per-cell loads of OMA and NOMA at OMA's maximum throughput, sorted.
    CellLoads {
        #[command(flatten)]
        common: Common,
    },
    /// Fraction of trials supporting every user, against users per cell.
    UsersCdf {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',')]
        users: Option<Vec<usize>>,
        /// Per-user demand levels in bits/s.
        #[arg(long, value_delimiter = ',')]
        demands: Option<Vec<f64>>,
    },
    /// Spectral efficiency against the share of cell-edge users.
    Spectral {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',')]
        edge_fractions: Option<Vec<f64>>,
    },
    /// Sup-norm step per iteration for several demand levels.
    Convergence {
        #[command(flatten)]
        common: Common,
        /// Per-user demand levels in bits/s.
        #[arg(long, value_delimiter = ',')]
        demands: Option<Vec<f64>>,
    },
    /// Runs the randomized property suites; exits nonzero on any failure.
    Verify {
        #[command(flatten)]
        common: Common,
    },
    /// Writes a generated network with its configuration as JSON.
    Generate {
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        scenario: Option<PathBuf>,
        /// Output file; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solves the load-coupling fixed point of a network JSON file.
    Solve {
        /// Network JSON, bare or as written by `generate`.
        #[arg(long)]
        network: PathBuf,
        #[arg(long, value_enum, default_value_t = PolicyArg::Pairs)]
        policy: PolicyArg,
        /// Group size bound for the exhaustive policy.
        #[arg(long, default_value_t = 2)]
        max_group_size: usize,
        #[arg(long, default_value_t = 1e-4)]
        epsilon: f64,
        #[arg(long, value_enum, default_value_t = ScheduleArg::Jacobi)]
        schedule: ScheduleArg,
        #[arg(long, default_value = "results/solve")]
        out: PathBuf,
    },
}

#[derive(Args)]
struct Common {
    /// Base seed; runs use seed, seed + 1, ...
    #[arg(long)]
    seed: Option<u64>,
    /// Number of seeds (trials).
    #[arg(long)]
    seeds: Option<usize>,
    /// Scenario configuration JSON; missing fields take defaults.
    #[arg(long)]
    scenario: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = PolicyArg::Pairs)]
    policy: PolicyArg,
    /// Group size bound for the exhaustive policy.
    #[arg(long, default_value_t = 2)]
    max_group_size: usize,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long, value_enum, default_value_t = ScheduleArg::Jacobi)]
    schedule: ScheduleArg,
}

#[derive(Clone, Copy, ValueEnum)]
enum PolicyArg {
    Oma,
    Pairs,
    /// Pairs strongest with weakest home gain; same grouping at every load.
    Fixed,
    Exhaustive,
}

#[derive(Clone, Copy, ValueEnum)]
enum ScheduleArg {
    Jacobi,
    Gs,
}

impl From<ScheduleArg> for Schedule {
    fn from(s: ScheduleArg) -> Self {
        match s {
            ScheduleArg::Jacobi => Schedule::Jacobi,
            ScheduleArg::Gs => Schedule::GaussSeidel,
        }
    }
}

fn load_scenario(path: Option<&Path>, seed: Option<u64>) -> noma_lc::Result<ScenarioConfig> {
    let mut cfg = match path {
        Some(p) => serde_json::from_str(&fs::read_to_string(p)?)?,
        None => ScenarioConfig::default(),
    };
    if let Some(seed) = seed {
        cfg.seed = seed;
    }
    Ok(cfg)
}

/// `fixed` needs a partition; pair users of every cell by rank of their
/// home gain (strongest with weakest) so the grouping stays the same for all
/// loads.
fn fixed_pairs(net: &NetworkModel) -> noma_lc::Result<GroupingPolicy> {
    let mut partition = Vec::new();
    for cell in 0..net.n_cells() {
        let mut ues = net.cell_ues(cell).to_vec();
        ues.sort_by(|&a, &b| net.gain(cell, b).total_cmp(&net.gain(cell, a)));
        let (mut lo, mut hi) = (0, ues.len());
        while lo < hi {
            hi -= 1;
            if lo == hi {
                partition.push(vec![ues[lo]]);
            } else {
                partition.push(vec![ues[lo], ues[hi]]);
            }
            lo += 1;
        }
    }
    GroupingPolicy::fixed(partition)
}

fn policy_for(
    arg: PolicyArg,
    max_group_size: usize,
    net: Option<&NetworkModel>,
) -> noma_lc::Result<GroupingPolicy> {
    match arg {
        PolicyArg::Oma => Ok(GroupingPolicy::oma()),
        PolicyArg::Pairs => Ok(GroupingPolicy::pairs()),
        PolicyArg::Exhaustive => GroupingPolicy::exhaustive(max_group_size),
        PolicyArg::Fixed => match net {
            Some(net) => fixed_pairs(net),
            None => Err(noma_lc::Error::InvalidPolicy(
                "the fixed policy needs a concrete network; use it with `solve`".into(),
            )),
        },
    }
}

fn experiment_spec(kind: ExperimentKind, common: &Common) -> noma_lc::Result<ExperimentSpec> {
    let mut spec = ExperimentSpec::new(kind);
    spec.scenario = load_scenario(common.scenario.as_deref(), common.seed)?;
    spec.policy = policy_for(common.policy, common.max_group_size, None)?;
    spec.solver.schedule = common.schedule.into();
    if let Some(eps) = common.epsilon {
        spec.solver.epsilon = eps;
    }
    if let Some(n) = common.seeds {
        spec.seeds = n;
    }
    if let Some(out) = &common.out {
        spec.out_dir = out.clone();
    }
    Ok(spec)
}

fn run(cli: Cli) -> noma_lc::Result<()> {
    let spec = match cli.command {
        Command::Throughput {
            common,
            load_limits,
        } => {
            let mut spec = experiment_spec(ExperimentKind::ThroughputVsLoadlimit, &common)?;
            if let Some(l) = load_limits {
                spec.load_limits = l;
            }
            spec
        }
        Command::CellLoads { common } => experiment_spec(ExperimentKind::CellLoads, &common)?,
        Command::UsersCdf {
            common,
            users,
            demands,
        } => {
            let mut spec = experiment_spec(ExperimentKind::UsersCdf, &common)?;
            if let Some(u) = users {
                spec.users_per_cell = u;
            }
            if let Some(d) = demands {
                spec.demand_grid_bps = d;
            }
            spec
        }
        Command::Spectral {
            common,
            edge_fractions,
        } => {
            let mut spec = experiment_spec(ExperimentKind::SpectralVsEdge, &common)?;
            if let Some(e) = edge_fractions {
                spec.edge_fractions = e;
            }
            spec
        }
        Command::Convergence { common, demands } => {
            let mut spec = experiment_spec(ExperimentKind::ConvergenceTrace, &common)?;
            if let Some(d) = demands {
                spec.demand_grid_bps = d;
            }
            spec
        }
        Command::Verify { common } => experiment_spec(ExperimentKind::Verify, &common)?,
        Command::Generate {
            seed,
            scenario,
            out,
        } => {
            let cfg = load_scenario(scenario.as_deref(), seed)?;
            let doc = ScenarioDocument::new(&cfg, generate(&cfg)?);
            let text = doc.to_json()? + "\n";
            match out {
                Some(path) => fs::write(path, text)?,
                None => print!("{text}"),
            }
            return Ok(());
        }
        Command::Solve {
            network,
            policy,
            max_group_size,
            epsilon,
            schedule,
            out,
        } => {
            let text = fs::read_to_string(network)?;
            let net = match serde_json::from_str::<ScenarioDocument>(&text) {
                Ok(doc) => doc.network,
                Err(_) => NetworkModel::from_json(&text)?,
            };
            let policy = policy_for(policy, max_group_size, Some(&net))?;
            let cfg = SolveConfig::default()
                .with_epsilon(epsilon)
                .with_schedule(schedule.into());
            let sol = noma_lc::solve(&net, &policy, &cfg)?;
            fs::create_dir_all(&out)?;
            fs::write(
                out.join("cells.json"),
                serde_json::to_string_pretty(&sol.cells)? + "\n",
            )?;
            fs::write(
                out.join("rho.json"),
                serde_json::to_string_pretty(&sol.rho)? + "\n",
            )?;
            fs::write(out.join("trace.csv"), sol.trace.to_csv())?;
            println!(
                "converged in {} iterations, max load {:.6}, written to {}",
                sol.trace.iterations(),
                sol.rho.max(),
                out.display()
            );
            return Ok(());
        }
    };
    let manifest = experiment::run(&spec)?;
    for f in &manifest.files {
        println!("{}  {}", f.sha256, spec.out_dir.join(&f.path).display());
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
