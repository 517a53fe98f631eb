//! Command-line front end: scenario generation, single solves, surrogate
//! training, benchmarks and plots.
//!
//! Exit status is 0 on success, 1 on a usage error and 2 when a run fails,
//! including when no feasible schedule exists.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use edgesched::harness::{
    read_summary_csv, render_svgs, run_bench, solve_setting, write_csv, BenchConfig, BenchContext,
    BenchSetting, SolverKind, SVG_FILES,
};
use edgesched::problem::{apportion, check_feasibility, Solution};
use edgesched::scengen::{generate_corpus, load_corpus, save_corpus};
use edgesched::surrogate::{
    label_corpus, load_dataset, load_model, save_dataset, save_model, train, SurrogateModel,
};
use edgesched::{Error, Scenario};

#[derive(Parser, Debug)]
#[command(name = "edgesched", version, about = "Request scheduling for serverless edge nodes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Common {
    /// TOML run configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overrides the scenario seed (and the training seed for `train`).
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write a seeded scenario corpus as JSON files.
    Gen {
        #[command(flatten)]
        common: Common,
        /// Number of scenarios; defaults to `corpus_size`.
        #[arg(long)]
        count: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Solve one scenario and print or write the solver report.
    Solve {
        #[command(flatten)]
        common: Common,
        /// Scenario JSON file.
        scenario: PathBuf,
        #[arg(long, default_value = "evo")]
        solver: String,
        /// Objective evaluations for ga and evo.
        #[arg(long, default_value_t = 5000)]
        budget: u64,
        /// Trained model for the surrogate solver; defaults to the config's.
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate and label a corpus, then train the surrogate.
    Train {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        count: Option<usize>,
        /// Training set directory. Loaded if it holds scenarios, otherwise the
        /// generated and labelled corpus is saved there.
        #[arg(long)]
        dataset: Option<PathBuf>,
        /// Model file to write.
        #[arg(long)]
        out: PathBuf,
    },
    /// Run every configured setting on a corpus; writes report.csv and charts.
    Bench {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        count: Option<usize>,
        /// Scenario directory to use instead of generating one.
        #[arg(long)]
        corpus: Option<PathBuf>,
        #[arg(long)]
        model: Option<PathBuf>,
        /// Worker threads; 1 gives timing-grade wall times.
        #[arg(long)]
        jobs: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Redraw the charts from a report CSV.
    Plot {
        report: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn load_config(common: &Common) -> anyhow::Result<BenchConfig> {
    let mut cfg = match &common.config {
        Some(path) => BenchConfig::load(path)
            .with_context(|| format!("reading config {}", path.display()))?,
        None => BenchConfig::default(),
    };
    if let Some(seed) = common.seed {
        cfg.scenario.seed = seed;
        cfg.train.seed = seed;
    }
    Ok(cfg)
}

fn load_model_from(path: Option<&Path>) -> anyhow::Result<Option<SurrogateModel>> {
    path.map(|p| load_model(p).with_context(|| format!("loading model {}", p.display())))
        .transpose()
}

/// A schedule that packs requests by descending demand onto the node with
/// the most compute left and splits bandwidth evenly; its violations explain
/// why the solver found nothing.
fn diagnostic_schedule(s: &Scenario) -> Option<Solution> {
    let n = s.request_count();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| s.requests[b].demand.total_cmp(&s.requests[a].demand));
    let mut room: Vec<f64> = s.nodes.iter().map(|v| v.compute_capacity).collect();
    let mut assignment = vec![0; n];
    for k in order {
        let v = (0..room.len()).max_by(|&a, &b| room[a].total_cmp(&room[b]).then(b.cmp(&a)))?;
        assignment[k] = v;
        room[v] -= s.requests[k].demand;
    }
    let mut bandwidth = vec![0; n];
    for (v, node) in s.nodes.iter().enumerate() {
        let members: Vec<usize> = (0..n).filter(|&k| assignment[k] == v).collect();
        let split = apportion(&vec![1.0; members.len()], node.bandwidth_capacity)
            .unwrap_or_else(|| vec![1; members.len()]);
        for (k, b) in members.into_iter().zip(split) {
            bandwidth[k] = b;
        }
    }
    Some(Solution::new(assignment, bandwidth))
}

fn cmd_gen(common: &Common, count: Option<usize>, out: &Path) -> anyhow::Result<()> {
    let cfg = load_config(common)?;
    let count = count.unwrap_or(cfg.corpus_size);
    let corpus: Vec<Scenario> = generate_corpus(&cfg.scenario, count)?;
    save_corpus(&corpus, out)?;
    eprintln!("wrote {count} scenarios to {}", out.display());
    Ok(())
}

fn cmd_solve(
    common: &Common,
    path: &Path,
    solver: &str,
    budget: u64,
    model: Option<&Path>,
    out: Option<&Path>,
) -> anyhow::Result<()> {
    let cfg = load_config(common)?;
    let scenario = Scenario::load(path).with_context(|| format!("reading {}", path.display()))?;
    let kind: SolverKind = solver.parse()?;
    let mut setting = BenchSetting::new(solver, kind, budget);
    setting.seed = common.seed.unwrap_or(0);
    let model = load_model_from(model.or(cfg.model.as_deref()))?;
    let ctx = BenchContext {
        kind: cfg.objective,
        ga: cfg.ga.clone(),
        evo: cfg.evo.clone(),
        model: model.as_ref(),
        jobs: 1,
    };
    let report = match solve_setting(&setting, &scenario, 0, &ctx) {
        Ok(r) => r,
        Err(
            e @ (Error::NoFeasibleSolution
            | Error::InfeasibleInstance(_)
            | Error::InfeasibleDecode { .. }),
        ) => {
            let mut msg = format!("{e}");
            if let Some(sol) = diagnostic_schedule(&scenario) {
                for v in check_feasibility(&scenario, &sol) {
                    msg.push_str(&format!("\n  violation: {v}"));
                }
            }
            bail!(msg);
        }
        Err(e) => return Err(e.into()),
    };
    let violations = check_feasibility(&scenario, &report.solution);
    if let Some(v) = violations.first() {
        bail!("solver returned an infeasible schedule: {v}");
    }
    let json = report.to_json()?;
    match out {
        Some(p) => std::fs::write(p, json).with_context(|| format!("writing {}", p.display()))?,
        None => println!("{json}"),
    }
    Ok(())
}

fn cmd_train(common: &Common, count: Option<usize>, dataset: Option<&Path>, out: &Path) -> anyhow::Result<()> {
    let cfg = load_config(common)?;
    let existing = dataset.filter(|d| d.join(edgesched::scengen::scenario_file_name(0)).exists());
    let (corpus, labels): (Vec<Scenario>, _) = match existing {
        Some(dir) => load_dataset(dir).with_context(|| format!("reading dataset {}", dir.display()))?,
        None => {
            let corpus = generate_corpus(&cfg.scenario, count.unwrap_or(cfg.corpus_size))?;
            let evo = edgesched::evo::EvoParams {
                budget: cfg.label_budget,
                objective: cfg.objective,
                ..cfg.evo.clone()
            };
            eprintln!("labelling {} scenarios with evo-{}", corpus.len(), cfg.label_budget);
            let labels = label_corpus(&corpus, &evo)?;
            if let Some(dir) = dataset {
                save_dataset(dir, &corpus, &labels)?;
            }
            (corpus, labels)
        }
    };
    eprintln!("training on {} scenarios", corpus.len());
    let mut model = train(&corpus, &labels, &cfg.train)?;
    model.metadata.label_solver = format!("evo-{}", cfg.label_budget);
    if let (Some(l), Some(v)) = (model.metadata.loss_curve.last(), model.metadata.validation_curve.last()) {
        eprintln!("final training loss {l:.6}, validation loss {v:.6}");
    }
    save_model(&model, out).with_context(|| format!("writing {}", out.display()))?;
    Ok(())
}

fn cmd_bench(
    common: &Common,
    count: Option<usize>,
    corpus_dir: Option<&Path>,
    model: Option<&Path>,
    jobs: Option<usize>,
    out: &Path,
) -> anyhow::Result<()> {
    let cfg = load_config(common)?;
    let corpus: Vec<Scenario> = match corpus_dir {
        Some(dir) => load_corpus(dir)?,
        None => generate_corpus(&cfg.scenario, count.unwrap_or(cfg.corpus_size))?,
    };
    let model = load_model_from(model.or(cfg.model.as_deref()))?;
    let ctx = BenchContext {
        kind: cfg.objective,
        ga: cfg.ga.clone(),
        evo: cfg.evo.clone(),
        model: model.as_ref(),
        jobs: jobs.unwrap_or(cfg.jobs),
    };
    let report = run_bench(&corpus, &cfg.settings, &ctx)?;
    std::fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    write_csv(&report, out.join("report.csv"))?;
    render_svgs(&report.summary, out)?;
    for s in &report.summary {
        eprintln!(
            "{:<12} delay {:.6} s  time {:.6} s  wins {}  failures {}",
            s.name, s.mean_delay_s, s.mean_wall_time_s, s.wins, s.failures
        );
    }
    Ok(())
}

fn cmd_plot(report: &Path, out: &Path) -> anyhow::Result<()> {
    let summary = read_summary_csv(report).with_context(|| format!("reading {}", report.display()))?;
    std::fs::create_dir_all(out)?;
    render_svgs(&summary, out)?;
    eprintln!("wrote {} to {}", SVG_FILES.join(", "), out.display());
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match &cli.command {
        Command::Gen { common, count, out } => cmd_gen(common, *count, out),
        Command::Solve {
            common,
            scenario,
            solver,
            budget,
            model,
            out,
        } => cmd_solve(common, scenario, solver, *budget, model.as_deref(), out.as_deref()),
        Command::Train {
            common,
            count,
            dataset,
            out,
        } => cmd_train(common, *count, dataset.as_deref(), out),
        Command::Bench {
            common,
            count,
            corpus,
            model,
            jobs,
            out,
        } => cmd_bench(common, *count, corpus.as_deref(), model.as_deref(), *jobs, out),
        Command::Plot { report, out } => cmd_plot(report, out),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
