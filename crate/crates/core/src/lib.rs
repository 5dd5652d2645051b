//! Exact Pareto fronts of (false negatives, false positives) over depth-bounded
//! binary decision trees, and metric-optimal tree extraction.
//!
//! ```
//! use pareto_tree::{parse_dataset, MetricKind, SolveConfig, Solver, select_best};
//!
//! let d = parse_dataset("1 1 0\n1 0 1\n0 1 1\n0 0 0\n").unwrap();
//! let mut solver = Solver::new(SolveConfig::new(2));
//! let front = solver.frontier(&d, 2).unwrap();
//! let (n_pos, n_neg) = d.class_counts();
//! let (best, f1) = select_best(&front, MetricKind::F1, n_pos as u32, n_neg as u32).unwrap();
//! let tree = solver.reconstruct_tree(&d, 2, best).unwrap();
//! assert_eq!(f1, 1.0);
//! assert_eq!(tree.evaluate(&d).unwrap(), best);
//! ```

pub mod bitset;
pub mod dataset;
pub mod depth2;
pub mod metrics;
pub mod oracle;
pub mod pareto;
pub mod solver;
pub mod tree;

pub use dataset::{
    difference_bounds, parse_dataset, CacheKey, Dataset, DatasetError, FrequencyTable, Instance, Literal, ParseError,
};
pub use depth2::solve_shallow;
pub use metrics::{counts_from_pair, metric_value, select_best, Direction, MetricCounts, MetricError, MetricKind};
pub use pareto::{dominates, front_gt, leaf_front, merge, nondom, subtract_ub, BiPair, BoundSet, ParetoFront, Witness, UNBOUNDED};
pub use solver::{
    lookahead_lb, similarity_lb, CacheEntry, CacheStatus, SolveConfig, SolveError, SolveStats, Solver, Technique,
};
pub use tree::{evaluate, Tree, TreeError};
