//! Command implementations behind the `pareto-tree` binary.

use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use pareto_tree::oracle::{brute_frontier, random_dataset};
use pareto_tree::{
    parse_dataset, select_best, BiPair, Dataset, MetricCounts, MetricKind, SolveConfig, SolveStats, Solver, Technique,
    Tree,
};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Debug, Parser)]
#[command(name = "pareto-tree", version, about = "Pareto fronts of misclassification pairs for depth-bounded decision trees")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute the full front.
    Frontier(SolveArgs),
    /// Pick the metric-optimal front point and a tree achieving it.
    Optimize(OptimizeArgs),
    /// Choose the depth by stratified k-fold cross-validation.
    Tune(TuneArgs),
    /// Compare the solver against brute force on random small datasets.
    OracleCheck(OracleArgs),
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    /// Dataset file: one instance per line, label first, then 0/1 features.
    pub path: PathBuf,
    #[arg(long, default_value_t = 3)]
    pub depth: usize,
    /// Technique to switch off: A, B, C, D or depth2. Repeatable.
    #[arg(long = "disable", value_delimiter = ',')]
    pub disable: Vec<Technique>,
}

#[derive(Debug, Args)]
pub struct OptimizeArgs {
    #[command(flatten)]
    pub solve: SolveArgs,
    /// accuracy, misclass, weighted:<wp>:<wn>, f1, mcc or fowlkes.
    #[arg(long, default_value = "f1")]
    pub metric: MetricKind,
}

#[derive(Debug, Args)]
pub struct TuneArgs {
    pub path: PathBuf,
    #[arg(long, default_value_t = 4)]
    pub max_depth: usize,
    #[arg(long, default_value_t = 5)]
    pub folds: usize,
    #[arg(long, default_value = "f1")]
    pub metric: MetricKind,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long = "disable", value_delimiter = ',')]
    pub disable: Vec<Technique>,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[arg(long, default_value_t = 200)]
    pub cases: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 3)]
    pub max_depth: usize,
    #[arg(long, default_value_t = 20)]
    pub max_instances: usize,
    #[arg(long, default_value_t = 6)]
    pub max_features: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetStats {
    pub instances: usize,
    pub positives: usize,
    pub negatives: usize,
    pub features: usize,
}

impl DatasetStats {
    pub fn of(d: &Dataset) -> Self {
        let (positives, negatives) = d.class_counts();
        DatasetStats { instances: d.len(), positives, negatives, features: d.num_features() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Selection {
    pub metric: String,
    pub point: BiPair,
    pub value: f64,
    pub counts: MetricCounts,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub path: String,
    pub dataset: DatasetStats,
    pub depth: usize,
    pub config: SolveConfig,
    pub frontier: Vec<BiPair>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub selected: Option<Selection>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub tree: Option<Tree>,
    pub wall_ms: f64,
    pub stats: SolveStats,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DepthScore {
    pub depth: usize,
    pub mean_train: f64,
    pub mean_test: f64,
    pub test_per_fold: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TuneReport {
    pub path: String,
    pub dataset: DatasetStats,
    pub metric: String,
    pub folds: usize,
    pub seed: u64,
    pub scores: Vec<DepthScore>,
    pub best_depth: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mismatch {
    pub case: usize,
    pub depth: usize,
    pub dataset: String,
    pub solver: Vec<BiPair>,
    pub oracle: Vec<BiPair>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub seed: u64,
    pub cases: usize,
    pub comparisons: usize,
    pub mismatches: Vec<Mismatch>,
}

pub fn load(path: &Path) -> Result<Dataset> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_dataset(&text).with_context(|| format!("parsing {}", path.display()))
}

fn config(depth: usize, disable: &[Technique]) -> SolveConfig {
    disable.iter().fold(SolveConfig::new(depth), |c, &t| c.without(t))
}

fn totals(d: &Dataset) -> (u32, u32) {
    let (p, n) = d.class_counts();
    (p as u32, n as u32)
}

pub fn frontier(args: &SolveArgs) -> Result<RunReport> {
    let d = load(&args.path)?;
    let config = config(args.depth, &args.disable);
    let mut solver = Solver::new(config);
    let start = Instant::now();
    let front = solver.frontier(&d, args.depth)?;
    Ok(RunReport {
        path: args.path.display().to_string(),
        dataset: DatasetStats::of(&d),
        depth: args.depth,
        config,
        frontier: front.points().to_vec(),
        selected: None,
        tree: None,
        wall_ms: start.elapsed().as_secs_f64() * 1e3,
        stats: solver.stats(),
    })
}

pub fn optimize(args: &OptimizeArgs) -> Result<RunReport> {
    let d = load(&args.solve.path)?;
    let depth = args.solve.depth;
    let config = config(depth, &args.solve.disable);
    let mut solver = Solver::new(config);
    let start = Instant::now();
    let front = solver.frontier(&d, depth)?;
    let (n_pos, n_neg) = totals(&d);
    let (point, value) = select_best(&front, args.metric, n_pos, n_neg)?;
    let tree = solver.reconstruct_tree(&d, depth, point)?;
    let wall_ms = start.elapsed().as_secs_f64() * 1e3;
    debug_assert_eq!(tree.evaluate(&d).ok(), Some(point));
    Ok(RunReport {
        path: args.solve.path.display().to_string(),
        dataset: DatasetStats::of(&d),
        depth,
        config,
        frontier: front.points().to_vec(),
        selected: Some(Selection {
            metric: args.metric.to_string(),
            point,
            value,
            counts: MetricCounts::from_pair(point, n_pos, n_neg)?,
        }),
        tree: Some(tree),
        wall_ms,
        stats: solver.stats(),
    })
}

/// Seeded stratified partition of `d` into `k` folds of instance indices.
///
/// Each class is shuffled separately and dealt round-robin; negatives continue
/// where positives stopped so fold sizes differ by at most one.
pub fn stratified_folds(d: &Dataset, k: usize, seed: u64) -> Result<Vec<Vec<usize>>> {
    let (n_pos, n_neg) = d.class_counts();
    if k < 2 {
        bail!("need at least 2 folds, got {k}");
    }
    if k > n_pos.min(n_neg) {
        bail!("{k} folds exceed the minority class size {}", n_pos.min(n_neg));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pos: Vec<usize> = d.positives().iter().collect();
    let mut neg: Vec<usize> = d.negatives().iter().collect();
    pos.shuffle(&mut rng);
    neg.shuffle(&mut rng);
    let mut folds = vec![Vec::new(); k];
    for (slot, i) in pos.into_iter().chain(neg).enumerate() {
        folds[slot % k].push(i);
    }
    for f in &mut folds {
        f.sort_unstable();
    }
    Ok(folds)
}

fn score(tree: &Tree, d: &Dataset, kind: MetricKind) -> Result<f64> {
    let (n_pos, n_neg) = totals(d);
    Ok(kind.value(MetricCounts::from_pair(tree.evaluate(d)?, n_pos, n_neg)?))
}

/// Train and test scores of the metric-optimal tree at each depth `0..=max_depth`.
fn run_fold(d: &Dataset, test: &[usize], args: &TuneArgs) -> Result<Vec<(f64, f64)>> {
    let held: std::collections::HashSet<usize> = test.iter().copied().collect();
    let train = d.with_instances(d.indices().filter(|i| !held.contains(i)))?;
    let test = d.with_instances(test.iter().copied())?;
    let (n_pos, n_neg) = totals(&train);
    let mut solver = Solver::new(config(args.max_depth, &args.disable));
    (0..=args.max_depth)
        .map(|depth| {
            let front = solver.frontier(&train, depth)?;
            let (point, train_value) = select_best(&front, args.metric, n_pos, n_neg)?;
            let tree = solver.reconstruct_tree(&train, depth, point)?;
            Ok((train_value, score(&tree, &test, args.metric)?))
        })
        .collect()
}

pub fn tune(args: &TuneArgs) -> Result<TuneReport> {
    let d = load(&args.path)?;
    let folds = stratified_folds(&d, args.folds, args.seed)?;
    let per_fold: Vec<Vec<(f64, f64)>> =
        folds.par_iter().map(|test| run_fold(&d, test, args)).collect::<Result<_>>()?;
    let k = folds.len() as f64;
    let scores: Vec<DepthScore> = (0..=args.max_depth)
        .map(|depth| {
            let test_per_fold: Vec<f64> = per_fold.iter().map(|f| f[depth].1).collect();
            DepthScore {
                depth,
                mean_train: per_fold.iter().map(|f| f[depth].0).sum::<f64>() / k,
                mean_test: test_per_fold.iter().sum::<f64>() / k,
                test_per_fold,
            }
        })
        .collect();
    let best_depth = scores
        .iter()
        .fold(&scores[0], |best, s| if args.metric.better(s.mean_test, best.mean_test) { s } else { best })
        .depth;
    Ok(TuneReport {
        path: args.path.display().to_string(),
        dataset: DatasetStats::of(&d),
        metric: args.metric.to_string(),
        folds: args.folds,
        seed: args.seed,
        scores,
        best_depth,
    })
}

pub fn oracle_check(args: &OracleArgs) -> Result<OracleReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let mut report = OracleReport { seed: args.seed, cases: args.cases, comparisons: 0, mismatches: Vec::new() };
    for case in 0..args.cases {
        let d = random_dataset(&mut rng, args.max_instances, args.max_features);
        let mut solver = Solver::new(SolveConfig::new(args.max_depth));
        for depth in 0..=args.max_depth {
            let ours = solver.frontier(&d, depth)?;
            let truth = brute_frontier(&d, depth)?;
            report.comparisons += 1;
            if ours != truth {
                report.mismatches.push(Mismatch {
                    case,
                    depth,
                    dataset: d.to_text(),
                    solver: ours.points().to_vec(),
                    oracle: truth.points().to_vec(),
                });
            }
        }
    }
    Ok(report)
}

fn to_json<T: Serialize>(v: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(v)?)
}

/// Runs a command, returning its JSON report and whether it succeeded.
pub fn run(cli: &Cli) -> Result<(String, bool)> {
    match &cli.command {
        Command::Frontier(a) => Ok((to_json(&frontier(a)?)?, true)),
        Command::Optimize(a) => Ok((to_json(&optimize(a)?)?, true)),
        Command::Tune(a) => Ok((to_json(&tune(a)?)?, true)),
        Command::OracleCheck(a) => {
            let r = oracle_check(a)?;
            Ok((to_json(&r)?, r.mismatches.is_empty()))
        }
    }
}
