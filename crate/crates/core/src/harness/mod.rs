//! Benchmark runs: every setting solves every scenario of a corpus, results
//! are re-checked for feasibility, and per-scenario winners are counted.

mod config;
mod output;

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evo::{solve_evo, EvoParams};
use crate::exact::solve_exact_report;
use crate::ga::{solve_ga, GaParams};
use crate::num::Scalar;
use crate::problem::{check_feasibility, ObjectiveKind, Scenario, Solution};
use crate::report::SolverReport;
use crate::surrogate::{infer, SurrogateModel};

pub use config::BenchConfig;
pub use output::{
    csv_string, format_number, read_summary_csv, render_svg, render_svgs, write_csv, CSV_HEADER, SVG_FILES,
};

/// Objective values closer than this are a tie; every tied setting wins.
pub const TIE_TOLERANCE_S: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverKind {
    Ga,
    Evo,
    Surrogate,
    Exact,
}

impl fmt::Display for SolverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SolverKind::Ga => "ga",
            SolverKind::Evo => "evo",
            SolverKind::Surrogate => "surrogate",
            SolverKind::Exact => "exact",
        })
    }
}

impl FromStr for SolverKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ga" => Ok(Self::Ga),
            "evo" => Ok(Self::Evo),
            "surrogate" => Ok(Self::Surrogate),
            "exact" => Ok(Self::Exact),
            other => Err(Error::Config(format!("unknown solver `{other}`"))),
        }
    }
}

/// How a setting seeds its solver on each scenario.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SeedPolicy {
    /// `seed + scenario index`
    #[default]
    PerScenario,
    /// `seed` on every scenario.
    Fixed,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchSetting {
    pub name: String,
    pub solver: SolverKind,
    /// Objective evaluations; ignored by the surrogate and exact solvers.
    #[serde(default)]
    pub budget: u64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub seed_policy: SeedPolicy,
}

impl BenchSetting {
    pub fn new(name: impl Into<String>, solver: SolverKind, budget: u64) -> Self {
        Self {
            name: name.into(),
            solver,
            budget,
            seed: 0,
            seed_policy: SeedPolicy::PerScenario,
        }
    }

    pub fn seed_for(&self, scenario_index: usize) -> u64 {
        match self.seed_policy {
            SeedPolicy::PerScenario => self.seed.wrapping_add(scenario_index as u64),
            SeedPolicy::Fixed => self.seed,
        }
    }
}

/// GA-5000, GA-50000, evo-5000, evo-50000 and the surrogate.
pub fn comparison_settings() -> Vec<BenchSetting> {
    vec![
        BenchSetting::new("ga-5000", SolverKind::Ga, 5000),
        BenchSetting::new("ga-50000", SolverKind::Ga, 50000),
        BenchSetting::new("evo-5000", SolverKind::Evo, 5000),
        BenchSetting::new("evo-50000", SolverKind::Evo, 50000),
        BenchSetting::new("surrogate", SolverKind::Surrogate, 0),
    ]
}

/// Solver parameters shared by all settings of a run. Budgets and seeds
/// come from each setting.
#[derive(Clone, Debug)]
pub struct BenchContext<'a, T = f64> {
    pub kind: ObjectiveKind,
    pub ga: GaParams,
    pub evo: EvoParams,
    pub model: Option<&'a SurrogateModel<T>>,
    /// Worker threads; 0 uses every core.
    pub jobs: usize,
}

impl<T> Default for BenchContext<'_, T> {
    fn default() -> Self {
        Self {
            kind: ObjectiveKind::Total,
            ga: GaParams::default(),
            evo: EvoParams::default(),
            model: None,
            jobs: 0,
        }
    }
}

/// Runs one setting on one scenario.
pub fn solve_setting<T: Scalar>(
    setting: &BenchSetting,
    scenario: &Scenario<T>,
    scenario_index: usize,
    ctx: &BenchContext<'_, T>,
) -> Result<SolverReport<T>> {
    let seed = setting.seed_for(scenario_index);
    let mut report = match setting.solver {
        SolverKind::Ga => {
            let params = GaParams {
                objective: ctx.kind,
                seed,
                ..ctx.ga.clone()
            }
            .with_evaluation_budget(setting.budget);
            solve_ga(scenario, &params)?
        }
        SolverKind::Evo => {
            let params = EvoParams {
                budget: setting.budget,
                objective: ctx.kind,
                seed,
                ..ctx.evo.clone()
            };
            solve_evo(scenario, &params)?
        }
        SolverKind::Surrogate => {
            let model = ctx.model.ok_or_else(|| {
                Error::Config(format!("setting `{}` needs a trained model", setting.name))
            })?;
            infer(model, scenario, ctx.kind)?
        }
        SolverKind::Exact => solve_exact_report(scenario, ctx.kind)?,
    };
    report.solver = setting.name.clone();
    Ok(report)
}

/// One (scenario, setting) result.
#[derive(Clone, Debug, PartialEq)]
pub struct Cell {
    pub scenario: usize,
    pub setting: usize,
    /// `None` when the solver reported no solution, see `error`.
    pub solution: Option<Solution>,
    pub objective: f64,
    pub total_delay: f64,
    pub makespan: f64,
    pub wall_time_s: f64,
    pub evaluations: u64,
    pub winner: bool,
    pub error: Option<String>,
}

impl Cell {
    pub fn solved(&self) -> bool {
        self.solution.is_some()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SettingSummary {
    pub name: String,
    /// Mean and population standard deviation of total delay over solved
    /// scenarios.
    pub mean_delay_s: f64,
    pub std_delay_s: f64,
    pub mean_makespan_s: f64,
    pub mean_wall_time_s: f64,
    pub mean_evaluations: f64,
    pub wins: usize,
    pub failures: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchReport {
    pub kind: ObjectiveKind,
    pub settings: Vec<BenchSetting>,
    pub scenario_count: usize,
    /// Scenario-major: cell `i * settings.len() + j` is scenario `i`, setting `j`.
    pub cells: Vec<Cell>,
    pub summary: Vec<SettingSummary>,
}

impl BenchReport {
    pub fn cell(&self, scenario: usize, setting: usize) -> &Cell {
        &self.cells[scenario * self.settings.len() + setting]
    }

    pub fn summary_for(&self, name: &str) -> Option<&SettingSummary> {
        self.summary.iter().find(|s| s.name == name)
    }
}

fn validate_settings(settings: &[BenchSetting]) -> Result<()> {
    if settings.is_empty() {
        return Err(Error::Config("no benchmark settings".into()));
    }
    let mut seen = HashSet::new();
    for s in settings {
        if s.name.is_empty() || s.name.contains([',', '"', '\n']) {
            return Err(Error::Config(format!("invalid setting name `{}`", s.name)));
        }
        if !seen.insert(s.name.as_str()) {
            return Err(Error::Config(format!("duplicate setting name `{}`", s.name)));
        }
    }
    Ok(())
}

fn run_cell<T: Scalar>(
    corpus: &[Scenario<T>],
    settings: &[BenchSetting],
    ctx: &BenchContext<'_, T>,
    scenario: usize,
    setting: usize,
) -> Result<Cell> {
    let mut cell = Cell {
        scenario,
        setting,
        solution: None,
        objective: f64::NAN,
        total_delay: f64::NAN,
        makespan: f64::NAN,
        wall_time_s: f64::NAN,
        evaluations: 0,
        winner: false,
        error: None,
    };
    match solve_setting(&settings[setting], &corpus[scenario], scenario, ctx) {
        Ok(r) => {
            cell.objective = r.objective.to_f64_lossy();
            cell.total_delay = r.delays.sum_total.to_f64_lossy();
            cell.makespan = r.delays.max_total.to_f64_lossy();
            cell.wall_time_s = r.wall_time_s;
            cell.evaluations = r.evaluations;
            cell.solution = Some(r.solution);
        }
        // Solver-level "found nothing" outcomes are counted, not fatal.
        Err(
            e @ (Error::NoFeasibleSolution
            | Error::InfeasibleDecode { .. }
            | Error::InfeasibleInstance(_)
            | Error::InstanceTooLarge(_)),
        ) => cell.error = Some(e.to_string()),
        Err(e) => return Err(e),
    }
    Ok(cell)
}

/// Solves every scenario with every setting. Cells may run on a worker pool
/// but are merged in (scenario, setting) order, so everything except wall
/// times is independent of `ctx.jobs`. Any emitted solution that fails the
/// feasibility check aborts the run.
pub fn run_bench<T: Scalar>(
    corpus: &[Scenario<T>],
    settings: &[BenchSetting],
    ctx: &BenchContext<'_, T>,
) -> Result<BenchReport> {
    validate_settings(settings)?;
    if corpus.is_empty() {
        return Err(Error::Config("benchmark corpus is empty".into()));
    }
    if settings.iter().any(|s| s.solver == SolverKind::Surrogate) && ctx.model.is_none() {
        return Err(Error::Config("a surrogate setting needs a trained model".into()));
    }
    let m = settings.len();
    let jobs: Vec<(usize, usize)> = (0..corpus.len())
        .flat_map(|i| (0..m).map(move |j| (i, j)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(ctx.jobs)
        .build()
        .map_err(|e| Error::Config(format!("worker pool: {e}")))?;
    let results: Vec<Result<Cell>> = pool.install(|| {
        jobs.par_iter()
            .map(|&(i, j)| run_cell(corpus, settings, ctx, i, j))
            .collect()
    });
    let mut cells = results.into_iter().collect::<Result<Vec<_>>>()?;

    for cell in &cells {
        if let Some(sol) = &cell.solution {
            if let Some(v) = check_feasibility(&corpus[cell.scenario], sol).first() {
                return Err(Error::InfeasibleSolution(format!(
                    "setting `{}` on scenario {}: {v}",
                    settings[cell.setting].name, cell.scenario
                )));
            }
        }
    }

    for row in cells.chunks_mut(m) {
        let best = row
            .iter()
            .filter(|c| c.solved())
            .map(|c| c.objective)
            .fold(f64::INFINITY, f64::min);
        for c in row.iter_mut() {
            c.winner = c.solved() && c.objective <= best + TIE_TOLERANCE_S;
        }
    }

    let summary = (0..m)
        .map(|j| summarize(&settings[j].name, cells.iter().filter(|c| c.setting == j)))
        .collect();
    Ok(BenchReport {
        kind: ctx.kind,
        settings: settings.to_vec(),
        scenario_count: corpus.len(),
        cells,
        summary,
    })
}

fn summarize<'a>(name: &str, cells: impl Iterator<Item = &'a Cell>) -> SettingSummary {
    let cells: Vec<&Cell> = cells.collect();
    let solved: Vec<&&Cell> = cells.iter().filter(|c| c.solved()).collect();
    let n = solved.len() as f64;
    let mean = |f: fn(&Cell) -> f64| {
        if solved.is_empty() {
            f64::NAN
        } else {
            solved.iter().map(|c| f(c)).sum::<f64>() / n
        }
    };
    let mean_delay = mean(|c| c.total_delay);
    let std = if solved.is_empty() {
        f64::NAN
    } else {
        (solved.iter().map(|c| (c.total_delay - mean_delay).powi(2)).sum::<f64>() / n).sqrt()
    };
    SettingSummary {
        name: name.to_string(),
        mean_delay_s: mean_delay,
        std_delay_s: std,
        mean_makespan_s: mean(|c| c.makespan),
        mean_wall_time_s: mean(|c| c.wall_time_s),
        mean_evaluations: mean(|c| c.evaluations as f64),
        wins: cells.iter().filter(|c| c.winner).count(),
        failures: cells.len() - solved.len(),
    }
}
