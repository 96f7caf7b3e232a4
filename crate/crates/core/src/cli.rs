//! Command-line front end.
//!
//! Machine-readable output goes to stdout or files; human summaries go to
//! stderr. Exit codes: 0 success, 1 usage or input error, 2 solver failure or
//! limit reached.

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::time::Duration;

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use crate::exact::{solve_choosy_exact, solve_markov_optimal, solve_mcst_exact, ExactOptions};
use crate::experiments::{run_all, ExperimentConfig};
use crate::generators::{
    gen_random, reduce_independent_set, GenSpec, Graph, RevenueDist, TransitionKind,
};
use crate::model::{
    choosy_revenue, markov_evaluate, mcst_evaluate, mcst_revenue, Assortment, Instance,
    RecommendationPlan,
};
use crate::poly::{best_revenue_ordered, solve_homogeneous, solve_tree_dp};
use crate::solution::{SolveResult, SolveStatus};

#[derive(Debug, Parser)]
#[command(
    name = "mcst",
    version,
    about = "Assortment optimization under single-transition Markov chain choice"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a random instance.
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long, value_parser = clap::builder::ValueParser::new(parse_rev))]
        rev: RevenueDist,
        #[arg(long, value_parser = clap::builder::ValueParser::new(parse_trans))]
        trans: TransitionKind,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output file; stdout when omitted.
        #[arg(short = 'o', long)]
        output: Option<PathBuf>,
    },
    /// Solve an instance and print the result as JSON.
    Solve {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = Method::Exact)]
        method: Method,
        #[arg(long)]
        time_limit: Option<f64>,
        #[arg(long)]
        node_limit: Option<usize>,
    },
    /// Evaluate an assortment (1-based labels, comma separated).
    Eval {
        file: PathBuf,
        #[arg(long, value_delimiter = ',', num_args = 0..)]
        assortment: Vec<usize>,
        #[arg(long, value_enum, default_value_t = Model::Mcst)]
        model: Model,
    },
    /// Build the MCST instance for an independent-set question.
    Reduce {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(short = 'o', long)]
        output: PathBuf,
    },
    /// Run an experiment grid and write CSV reports.
    Bench {
        #[arg(long)]
        config: PathBuf,
        #[arg(short = 'o', long)]
        output: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Exact,
    Ro,
    Homogeneous,
    Tree,
    Markov,
    Choosy,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Model {
    Mcst,
    Markov,
    Choosy,
}

fn parse_rev(s: &str) -> Result<RevenueDist, String> {
    s.parse()
}

fn parse_trans(s: &str) -> Result<TransitionKind, String> {
    s.parse()
}

/// Failure classes mapped to exit codes.
#[derive(Debug)]
pub enum CliError {
    Usage(anyhow::Error),
    Solver(anyhow::Error),
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Solver(_) => 2,
        }
    }
}

fn usage(e: anyhow::Error) -> CliError {
    CliError::Usage(e)
}

fn solver(e: impl Into<anyhow::Error>) -> CliError {
    CliError::Solver(e.into())
}

/// Plan as a JSON object keyed by 1-based unavailable product.
pub fn plan_json(plan: &RecommendationPlan, assortment: &Assortment, n: usize) -> Value {
    let mut map = Map::new();
    for (j, rec) in plan.to_explicit(assortment, n) {
        let labels: Vec<usize> = rec.iter().map(|&i| i + 1).collect();
        map.insert((j + 1).to_string(), json!(labels));
    }
    Value::Object(map)
}

/// JSON form of a solve result; wall-clock times are left out so output is reproducible.
pub fn result_json(method: &str, result: &SolveResult, n: usize) -> Value {
    let s = &result.stats;
    json!({
        "method": method,
        "status": result.status.label(),
        "assortment": result.assortment.labels(),
        "revenue": result.revenue,
        "plan": plan_json(&result.plan, &result.assortment, n),
        "stats": {
            "nodes": s.nodes,
            "lp_iterations": s.lp_iterations,
            "cuts": s.cuts,
            "incumbent_updates": s.incumbent_updates,
            "iterations": s.iterations,
            "bound": s.bound,
            "gap": s.gap,
        },
    })
}

fn read_instance(path: &PathBuf) -> Result<Instance, CliError> {
    Instance::read_json(path)
        .with_context(|| format!("reading instance {}", path.display()))
        .map_err(usage)
}

fn print_json(value: &Value) {
    let text = serde_json::to_string_pretty(value).expect("JSON values serialize");
    // A closed pipe downstream is not an error of ours.
    let _ = writeln!(std::io::stdout().lock(), "{text}");
}

fn solve(
    file: &PathBuf,
    method: Method,
    time_limit: Option<f64>,
    node_limit: Option<usize>,
) -> Result<(), CliError> {
    let inst = read_instance(file)?;
    let n = inst.n();
    if let Some(t) = time_limit {
        if !(t.is_finite() && t > 0.0) {
            return Err(usage(anyhow!(
                "--time-limit must be a positive number of seconds"
            )));
        }
    }
    let options = ExactOptions {
        time_limit: time_limit.map(Duration::from_secs_f64),
        node_limit,
        ..ExactOptions::default()
    };
    let (name, result) = match method {
        Method::Exact => ("exact", solve_mcst_exact(&inst, &options).map_err(solver)?),
        Method::Ro => ("ro", best_revenue_ordered(&inst).map_err(solver)?.0),
        Method::Homogeneous => (
            "homogeneous",
            solve_homogeneous(&inst).map_err(|e| usage(e.into()))?,
        ),
        Method::Tree => ("tree", solve_tree_dp(&inst).map_err(|e| usage(e.into()))?),
        Method::Markov => (
            "markov",
            solve_markov_optimal(&inst, 1e-12, 100_000).map_err(solver)?,
        ),
        Method::Choosy => (
            "choosy",
            solve_choosy_exact(&inst, &options).map_err(solver)?,
        ),
    };
    print_json(&result_json(name, &result, n));
    eprintln!(
        "{name}: revenue {:.10} status {} nodes {} time {:.3}s",
        result.revenue,
        result.status.label(),
        result.stats.nodes,
        result.stats.wall_time.as_secs_f64()
    );
    if result.status == SolveStatus::LimitReached {
        return Err(solver(anyhow!(
            "limit reached, gap {:.3e}",
            result.stats.gap
        )));
    }
    Ok(())
}

fn eval(file: &PathBuf, labels: &[usize], model: Model) -> Result<(), CliError> {
    let inst = read_instance(file)?;
    let n = inst.n();
    let assortment = Assortment::from_labels(labels, n).map_err(|e| usage(e.into()))?;
    let value = match model {
        Model::Mcst => {
            let (_, plan) = mcst_revenue(&inst, &assortment).map_err(solver)?;
            let eval = mcst_evaluate(&inst, &assortment, &plan).map_err(solver)?;
            json!({
                "model": "mcst",
                "assortment": assortment.labels(),
                "revenue": eval.revenue,
                "purchase_probabilities": eval.purchase_probs,
                "plan": plan_json(&plan, &assortment, n),
            })
        }
        Model::Markov => {
            let eval = markov_evaluate(&inst, &assortment).map_err(solver)?;
            json!({
                "model": "markov",
                "assortment": assortment.labels(),
                "revenue": eval.revenue,
                "purchase_probabilities": eval.purchase_probs,
            })
        }
        Model::Choosy => json!({
            "model": "choosy",
            "assortment": assortment.labels(),
            "revenue": choosy_revenue(&inst, &assortment),
        }),
    };
    print_json(&value);
    Ok(())
}

fn reduce(graph: &PathBuf, k: usize, output: &PathBuf) -> Result<(), CliError> {
    let text = fs::read_to_string(graph)
        .with_context(|| format!("reading graph {}", graph.display()))
        .map_err(usage)?;
    let graph = Graph::from_json(&text).map_err(usage)?;
    let red = reduce_independent_set(&graph, k).map_err(|e| usage(e.into()))?;
    red.instance
        .write_json(output)
        .with_context(|| format!("writing {}", output.display()))
        .map_err(usage)?;
    print_json(&json!({
        "products": red.instance.n(),
        "scale": red.scale,
        "threshold": red.threshold,
    }));
    eprintln!(
        "independent set of size {k} exists iff the optimal revenue is at least {:.12}",
        red.threshold
    );
    Ok(())
}

fn bench(config: &PathBuf, output: Option<&PathBuf>) -> Result<(), CliError> {
    let cfg = ExperimentConfig::read(config).map_err(usage)?;
    let dir = output
        .cloned()
        .or_else(|| cfg.output.clone())
        .ok_or_else(|| {
            usage(anyhow!(
                "no output directory: pass -o or set \"output\" in the config"
            ))
        })?;
    let report = run_all(&cfg).map_err(solver)?;
    report.write(&dir).map_err(usage)?;
    for (agg, time) in report.aggregates.iter().zip(&report.timing_aggregates) {
        eprintln!(
            "({:>3}, {}, {}) RO {:>7.3}% MCST>=Markov {:>6.2}% MCST/Choosy {:.4} exact {:.4}s limit hits {}",
            agg.n,
            agg.revenue,
            agg.transitions,
            agg.ro_mean_pct.unwrap_or(f64::NAN),
            agg.mcst_ge_markov_pct.unwrap_or(f64::NAN),
            agg.mcst_choosy_mean.unwrap_or(f64::NAN),
            time.mcst_solve_mean_secs,
            agg.limit_hits
        );
    }
    if report.aggregates.iter().any(|a| a.limit_hits > 0) {
        return Err(solver(anyhow!("some exact solves hit their limits")));
    }
    Ok(())
}

fn gen(
    n: usize,
    rev: RevenueDist,
    trans: TransitionKind,
    seed: u64,
    output: Option<&PathBuf>,
) -> Result<(), CliError> {
    if n == 0 {
        return Err(usage(anyhow!("--n must be at least 1")));
    }
    let inst = gen_random(&GenSpec::new(n, rev, trans, seed));
    match output {
        Some(path) => inst
            .write_json(path)
            .with_context(|| format!("writing {}", path.display()))
            .map_err(usage)?,
        None => {
            let _ = writeln!(std::io::stdout().lock(), "{}", inst.to_json());
        }
    }
    Ok(())
}

pub fn execute(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Gen {
            n,
            rev,
            trans,
            seed,
            output,
        } => gen(*n, *rev, *trans, *seed, output.as_ref()),
        Command::Solve {
            file,
            method,
            time_limit,
            node_limit,
        } => solve(file, *method, *time_limit, *node_limit),
        Command::Eval {
            file,
            assortment,
            model,
        } => eval(file, assortment, *model),
        Command::Reduce { graph, k, output } => reduce(graph, *k, output),
        Command::Bench { config, output } => bench(config, output.as_ref()),
    }
}

/// Parses `args` (including the program name), runs the command and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            let (CliError::Usage(inner) | CliError::Solver(inner)) = &e;
            eprintln!("error: {inner:#}");
            e.code()
        }
    }
}
