//! Seeded experiment grids: exact versus revenue-ordered, MCST versus the
//! Markov and choosy models, and cross-model robustness.
//!
//! A run writes three CSV files. `rows.csv` holds one line per instance and
//! `aggregates.csv` one line per cell; both are byte-identical across reruns.
//! Wall-clock measurements go to `timings.csv` only.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use anyhow::{ensure, Context, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::exact::{solve_choosy_exact, solve_markov_optimal, solve_mcst_exact, ExactOptions};
use crate::generators::{gen_random, GenSpec, RevenueDist, TransitionKind};
use crate::model::{choosy_revenue, markov_evaluate, Assortment, Instance};
use crate::poly::best_revenue_ordered;
use crate::solution::SolveStatus;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cell {
    pub n: usize,
    pub revenue: RevenueDist,
    pub transitions: TransitionKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Table {
    /// Exact optimum versus the best revenue-ordered assortment.
    RevenueOrdered,
    /// MCST optimum versus the Markov and choosy optima.
    Comparison,
    /// Each model's optimal assortment scored under the other models.
    Robustness,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub cells: Vec<Cell>,
    pub instances_per_cell: usize,
    pub seed: u64,
    /// Per-instance limit for each exact solve.
    #[serde(default)]
    pub time_limit_secs: Option<f64>,
    #[serde(default)]
    pub node_limit: Option<usize>,
    #[serde(default)]
    pub output: Option<PathBuf>,
}

impl ExperimentConfig {
    /// Sizes 5, 10, 30, 50 crossed with both revenue laws and DEN/SPA, 100 instances each.
    pub fn desk_default(seed: u64) -> Self {
        let mut cells = Vec::new();
        for n in [5, 10, 30, 50] {
            for transitions in [TransitionKind::Den, TransitionKind::Spa] {
                for revenue in [RevenueDist::Uni, RevenueDist::Exp] {
                    cells.push(Cell {
                        n,
                        revenue,
                        transitions,
                    });
                }
            }
        }
        Self {
            cells,
            instances_per_cell: 100,
            seed,
            time_limit_secs: Some(60.0),
            node_limit: None,
            output: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        ensure!(
            self.instances_per_cell >= 1,
            "instances_per_cell must be at least 1"
        );
        ensure!(!self.cells.is_empty(), "the grid has no cells");
        for cell in &self.cells {
            ensure!(cell.n >= 1, "cell sizes must be positive");
        }
        if let Some(t) = self.time_limit_secs {
            ensure!(t.is_finite() && t > 0.0, "time_limit_secs must be positive");
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).context("parsing experiment config")?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text =
            fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    fn exact_options(&self) -> ExactOptions {
        ExactOptions {
            time_limit: self.time_limit_secs.map(Duration::from_secs_f64),
            node_limit: self.node_limit,
            ..ExactOptions::default()
        }
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of instance `index` in `cell`; independent of the order of cells in the grid.
pub fn instance_seed(base: u64, cell: &Cell, index: usize) -> u64 {
    let tag = (cell.n as u64) << 8 | (cell.revenue as u64) << 4 | cell.transitions as u64;
    splitmix64(splitmix64(base ^ splitmix64(tag)).wrapping_add(index as u64))
}

/// Results for one instance; columns a table does not need are left empty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceRow {
    pub n: usize,
    pub revenue: RevenueDist,
    pub transitions: TransitionKind,
    pub index: usize,
    pub seed: u64,
    pub mcst_status: String,
    pub mcst_opt: f64,
    pub mcst_gap: f64,
    pub nodes: usize,
    pub ro_revenue: Option<f64>,
    pub markov_opt: Option<f64>,
    pub choosy_status: Option<String>,
    pub choosy_opt: Option<f64>,
    /// MCST optimal assortment scored by the Markov model.
    pub mcst_under_markov: Option<f64>,
    pub choosy_under_markov: Option<f64>,
    pub mcst_under_choosy: Option<f64>,
    pub markov_under_choosy: Option<f64>,
}

impl InstanceRow {
    fn cell(&self) -> Cell {
        Cell {
            n: self.n,
            revenue: self.revenue,
            transitions: self.transitions,
        }
    }

    fn solved(&self) -> bool {
        self.mcst_status == SolveStatus::Optimal.label()
            && self
                .choosy_status
                .as_deref()
                .is_none_or(|s| s == SolveStatus::Optimal.label())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimingRow {
    pub n: usize,
    pub revenue: RevenueDist,
    pub transitions: TransitionKind,
    pub index: usize,
    pub mcst_build_secs: f64,
    pub mcst_solve_secs: f64,
    pub ro_secs: f64,
    pub markov_secs: Option<f64>,
    pub choosy_secs: Option<f64>,
}

/// Per-cell statistics recomputed from the instance rows.
///
/// Ratio statistics skip instances where an exact solve hit a limit; those are
/// counted in `limit_hits`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellAggregate {
    pub n: usize,
    pub revenue: RevenueDist,
    pub transitions: TransitionKind,
    pub instances: usize,
    pub limit_hits: usize,
    pub ro_mean_pct: Option<f64>,
    pub ro_min_pct: Option<f64>,
    pub mcst_ge_markov_pct: Option<f64>,
    pub mcst_markov_mean: Option<f64>,
    pub mcst_markov_min: Option<f64>,
    pub mcst_markov_max: Option<f64>,
    pub mcst_ge_choosy_pct: Option<f64>,
    pub mcst_choosy_mean: Option<f64>,
    pub mcst_choosy_min: Option<f64>,
    pub mcst_choosy_max: Option<f64>,
    pub true_markov_mcst_mean: Option<f64>,
    pub true_markov_mcst_min: Option<f64>,
    pub true_markov_choosy_mean: Option<f64>,
    pub true_markov_choosy_min: Option<f64>,
    pub true_choosy_mcst_mean: Option<f64>,
    pub true_choosy_mcst_min: Option<f64>,
    pub true_choosy_markov_mean: Option<f64>,
    pub true_choosy_markov_min: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimingAggregate {
    pub n: usize,
    pub revenue: RevenueDist,
    pub transitions: TransitionKind,
    pub mcst_build_mean_secs: f64,
    pub mcst_solve_mean_secs: f64,
    pub mcst_solve_max_secs: f64,
    pub ro_mean_secs: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub rows: Vec<InstanceRow>,
    pub aggregates: Vec<CellAggregate>,
    pub timings: Vec<TimingRow>,
    pub timing_aggregates: Vec<TimingAggregate>,
}

fn ratio(a: f64, b: f64) -> f64 {
    if b == 0.0 && a == 0.0 {
        1.0
    } else {
        a / b
    }
}

struct Stat {
    sum: f64,
    min: f64,
    max: f64,
    count: usize,
}

impl Stat {
    fn new() -> Self {
        Self {
            sum: 0.0,
            min: f64::INFINITY,
            max: f64::NEG_INFINITY,
            count: 0,
        }
    }

    fn push(&mut self, v: f64) {
        self.sum += v;
        self.min = self.min.min(v);
        self.max = self.max.max(v);
        self.count += 1;
    }

    fn mean(&self) -> Option<f64> {
        (self.count > 0).then(|| self.sum / self.count as f64)
    }

    fn min(&self) -> Option<f64> {
        (self.count > 0).then_some(self.min)
    }

    fn max(&self) -> Option<f64> {
        (self.count > 0).then_some(self.max)
    }
}

fn percent(hits: usize, total: usize) -> Option<f64> {
    (total > 0).then(|| 100.0 * hits as f64 / total as f64)
}

/// Groups rows by cell, in order of first appearance.
fn group<'a, T, K: PartialEq + Copy>(
    items: &'a [T],
    key: impl Fn(&T) -> K,
) -> Vec<(K, Vec<&'a T>)> {
    let mut groups: Vec<(K, Vec<&T>)> = Vec::new();
    for item in items {
        let k = key(item);
        match groups.iter_mut().find(|(g, _)| *g == k) {
            Some((_, members)) => members.push(item),
            None => groups.push((k, vec![item])),
        }
    }
    groups
}

/// Cell statistics from instance rows.
pub fn aggregate(rows: &[InstanceRow]) -> Vec<CellAggregate> {
    let slack = 1e-9;
    group(rows, InstanceRow::cell)
        .into_iter()
        .map(|(cell, members)| {
            let solved: Vec<&InstanceRow> =
                members.iter().copied().filter(|r| r.solved()).collect();
            let mut ro = Stat::new();
            let mut vs_markov = Stat::new();
            let mut vs_choosy = Stat::new();
            let (mut ge_markov, mut ge_choosy) = (0, 0);
            let mut cross = [Stat::new(), Stat::new(), Stat::new(), Stat::new()];
            for r in &solved {
                if let Some(v) = r.ro_revenue {
                    ro.push(100.0 * ratio(v, r.mcst_opt));
                }
                if let Some(m) = r.markov_opt {
                    vs_markov.push(ratio(r.mcst_opt, m));
                    ge_markov += usize::from(r.mcst_opt >= m - slack);
                }
                if let Some(c) = r.choosy_opt {
                    vs_choosy.push(ratio(r.mcst_opt, c));
                    ge_choosy += usize::from(r.mcst_opt >= c - slack);
                }
                let pairs = [
                    (r.mcst_under_markov, r.markov_opt),
                    (r.choosy_under_markov, r.markov_opt),
                    (r.mcst_under_choosy, r.choosy_opt),
                    (r.markov_under_choosy, r.choosy_opt),
                ];
                for (stat, pair) in cross.iter_mut().zip(pairs) {
                    if let (Some(a), Some(b)) = pair {
                        stat.push(ratio(a, b));
                    }
                }
            }
            CellAggregate {
                n: cell.n,
                revenue: cell.revenue,
                transitions: cell.transitions,
                instances: members.len(),
                limit_hits: members.len() - solved.len(),
                ro_mean_pct: ro.mean(),
                ro_min_pct: ro.min(),
                mcst_ge_markov_pct: percent(ge_markov, vs_markov.count),
                mcst_markov_mean: vs_markov.mean(),
                mcst_markov_min: vs_markov.min(),
                mcst_markov_max: vs_markov.max(),
                mcst_ge_choosy_pct: percent(ge_choosy, vs_choosy.count),
                mcst_choosy_mean: vs_choosy.mean(),
                mcst_choosy_min: vs_choosy.min(),
                mcst_choosy_max: vs_choosy.max(),
                true_markov_mcst_mean: cross[0].mean(),
                true_markov_mcst_min: cross[0].min(),
                true_markov_choosy_mean: cross[1].mean(),
                true_markov_choosy_min: cross[1].min(),
                true_choosy_mcst_mean: cross[2].mean(),
                true_choosy_mcst_min: cross[2].min(),
                true_choosy_markov_mean: cross[3].mean(),
                true_choosy_markov_min: cross[3].min(),
            }
        })
        .collect()
}

/// Cell means and maxima of the wall-clock columns.
pub fn aggregate_timings(timings: &[TimingRow]) -> Vec<TimingAggregate> {
    group(timings, |t| (t.n, t.revenue, t.transitions))
        .into_iter()
        .map(|((n, revenue, transitions), members)| {
            let count = members.len() as f64;
            let mean = |f: fn(&TimingRow) -> f64| members.iter().map(|t| f(t)).sum::<f64>() / count;
            TimingAggregate {
                n,
                revenue,
                transitions,
                mcst_build_mean_secs: mean(|t| t.mcst_build_secs),
                mcst_solve_mean_secs: mean(|t| t.mcst_solve_secs),
                mcst_solve_max_secs: members
                    .iter()
                    .map(|t| t.mcst_solve_secs)
                    .fold(0.0, f64::max),
                ro_mean_secs: mean(|t| t.ro_secs),
            }
        })
        .collect()
}

fn run_instance(
    inst: &Instance,
    cell: &Cell,
    index: usize,
    seed: u64,
    tables: &[Table],
    options: &ExactOptions,
) -> Result<(InstanceRow, TimingRow)> {
    let n = inst.n();
    let need_ro = tables.contains(&Table::RevenueOrdered);
    let need_others = tables.contains(&Table::Comparison) || tables.contains(&Table::Robustness);
    let cross = tables.contains(&Table::Robustness);

    let mcst = solve_mcst_exact(inst, options)?;
    let ro = if need_ro {
        let t = Instant::now();
        let (ro, _) = best_revenue_ordered(inst)?;
        Some((ro.revenue, t.elapsed()))
    } else {
        None
    };
    let (markov, markov_secs) = if need_others {
        let t = Instant::now();
        let m = solve_markov_optimal(inst, 1e-12, 100_000)?;
        (Some(m), Some(t.elapsed().as_secs_f64()))
    } else {
        (None, None)
    };
    let (choosy, choosy_secs) = if need_others {
        let t = Instant::now();
        let c = solve_choosy_exact(inst, options)?;
        (Some(c), Some(t.elapsed().as_secs_f64()))
    } else {
        (None, None)
    };
    let under_markov = |s: &Assortment| -> Result<f64> { Ok(markov_evaluate(inst, s)?.revenue) };
    let (mut mcst_under_markov, mut choosy_under_markov) = (None, None);
    let (mut mcst_under_choosy, mut markov_under_choosy) = (None, None);
    if cross {
        let m = markov.as_ref().expect("computed above");
        let c = choosy.as_ref().expect("computed above");
        mcst_under_markov = Some(under_markov(&mcst.assortment)?);
        choosy_under_markov = Some(under_markov(&c.assortment)?);
        mcst_under_choosy = Some(choosy_revenue(inst, &mcst.assortment));
        markov_under_choosy = Some(choosy_revenue(inst, &m.assortment));
    }
    let row = InstanceRow {
        n,
        revenue: cell.revenue,
        transitions: cell.transitions,
        index,
        seed,
        mcst_status: mcst.status.label().to_string(),
        mcst_opt: mcst.revenue,
        mcst_gap: mcst.stats.gap,
        nodes: mcst.stats.nodes,
        ro_revenue: ro.map(|r| r.0),
        markov_opt: markov.as_ref().map(|m| m.revenue),
        choosy_status: choosy.as_ref().map(|c| c.status.label().to_string()),
        choosy_opt: choosy.as_ref().map(|c| c.revenue),
        mcst_under_markov,
        choosy_under_markov,
        mcst_under_choosy,
        markov_under_choosy,
    };
    let timing = TimingRow {
        n,
        revenue: cell.revenue,
        transitions: cell.transitions,
        index,
        mcst_build_secs: mcst.stats.build_time.as_secs_f64(),
        mcst_solve_secs: mcst.stats.wall_time.as_secs_f64(),
        ro_secs: ro.map_or(0.0, |r| r.1.as_secs_f64()),
        markov_secs,
        choosy_secs,
    };
    Ok((row, timing))
}

/// Runs every cell of the grid, computing the columns the requested tables need.
pub fn run_tables(cfg: &ExperimentConfig, tables: &[Table]) -> Result<ExperimentReport> {
    cfg.validate()?;
    let options = cfg.exact_options();
    let mut rows = Vec::new();
    let mut timings = Vec::new();
    for cell in &cfg.cells {
        let results: Vec<Result<(InstanceRow, TimingRow)>> = (0..cfg.instances_per_cell)
            .into_par_iter()
            .map(|index| {
                let seed = instance_seed(cfg.seed, cell, index);
                let inst = gen_random(&GenSpec::new(cell.n, cell.revenue, cell.transitions, seed));
                run_instance(&inst, cell, index, seed, tables, &options).with_context(|| {
                    format!(
                        "cell ({}, {}, {}) instance {index}",
                        cell.n, cell.revenue, cell.transitions
                    )
                })
            })
            .collect();
        for result in results {
            let (row, timing) = result?;
            rows.push(row);
            timings.push(timing);
        }
    }
    Ok(ExperimentReport {
        aggregates: aggregate(&rows),
        timing_aggregates: aggregate_timings(&timings),
        rows,
        timings,
    })
}

pub fn run_table1(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    run_tables(cfg, &[Table::RevenueOrdered])
}

pub fn run_table2(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    run_tables(cfg, &[Table::Comparison])
}

pub fn run_table3(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    run_tables(cfg, &[Table::Robustness])
}

pub fn run_all(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    run_tables(
        cfg,
        &[Table::RevenueOrdered, Table::Comparison, Table::Robustness],
    )
}

fn write_csv<T: Serialize>(path: &Path, items: &[T]) -> Result<()> {
    let mut writer =
        csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    for item in items {
        writer.serialize(item)?;
    }
    writer.flush()?;
    Ok(())
}

/// Reads a CSV file written by [`ExperimentReport::write`].
pub fn read_csv<T: for<'de> Deserialize<'de>>(path: impl AsRef<Path>) -> Result<Vec<T>> {
    let path = path.as_ref();
    let mut reader =
        csv::Reader::from_path(path).with_context(|| format!("opening {}", path.display()))?;
    reader
        .deserialize()
        .map(|r| r.with_context(|| format!("parsing {}", path.display())))
        .collect()
}

impl ExperimentReport {
    /// Writes `rows.csv`, `aggregates.csv`, `timings.csv` and `timing_summary.csv` into `dir`.
    pub fn write(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        write_csv(&dir.join("rows.csv"), &self.rows)?;
        write_csv(&dir.join("aggregates.csv"), &self.aggregates)?;
        write_csv(&dir.join("timings.csv"), &self.timings)?;
        write_csv(&dir.join("timing_summary.csv"), &self.timing_aggregates)?;
        Ok(())
    }
}
