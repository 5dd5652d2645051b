//! Brute-force ground truth for small instances.
//!
//! [`enumerate_trees`] lists every tree literally. The frontier and metric
//! checks instead build the set of error pairs reachable by any tree bottom-up,
//! straight from the instance rows: the reachable set of a split is every sum of
//! one reachable pair per child. That is the same set the literal enumeration
//! would produce, without materialising the ~10^8 trees of depth 3 over six
//! features.

use std::collections::BTreeSet;

use rand::Rng;
use thiserror::Error;

use crate::dataset::{Dataset, Instance};
use crate::metrics::{MetricCounts, MetricKind};
use crate::pareto::{BiPair, ParetoFront};
use crate::tree::Tree;

pub const MAX_FEATURES: usize = 8;
pub const MAX_DEPTH: usize = 3;

#[derive(Debug, Error, PartialEq, Eq)]
#[error("oracle limited to {MAX_FEATURES} features and depth {MAX_DEPTH}, got {num_features} features and depth {depth}")]
pub struct LimitsExceeded {
    pub num_features: usize,
    pub depth: usize,
}

fn check(num_features: usize, depth: usize) -> Result<(), LimitsExceeded> {
    if num_features > MAX_FEATURES || depth > MAX_DEPTH {
        return Err(LimitsExceeded { num_features, depth });
    }
    Ok(())
}

fn trees(num_features: usize, depth: usize) -> Box<dyn Iterator<Item = Tree>> {
    let leaves = [Tree::Leaf(false), Tree::Leaf(true)].into_iter();
    if depth == 0 {
        return Box::new(leaves);
    }
    Box::new(leaves.chain((0..num_features).flat_map(move |f| {
        trees(num_features, depth - 1).flat_map(move |l| {
            trees(num_features, depth - 1).map(move |r| Tree::split(f, l.clone(), r))
        })
    })))
}

/// Every tree of depth at most `depth`, features repeating freely.
pub fn enumerate_trees(num_features: usize, depth: usize) -> Result<impl Iterator<Item = Tree>, LimitsExceeded> {
    check(num_features, depth)?;
    Ok(trees(num_features, depth))
}

fn reachable(rows: &[&Instance], num_features: usize, depth: usize) -> BTreeSet<(u32, u32)> {
    let pos = rows.iter().filter(|r| r.label()).count() as u32;
    let neg = rows.len() as u32 - pos;
    let mut out = BTreeSet::from([(pos, 0), (0, neg)]);
    if depth == 0 {
        return out;
    }
    for f in 0..num_features {
        let (with, without): (Vec<&Instance>, Vec<&Instance>) = rows.iter().partition(|r| r.has_feature(f));
        let left = reachable(&without, num_features, depth - 1);
        let right = reachable(&with, num_features, depth - 1);
        for &(a, b) in &left {
            for &(c, e) in &right {
                out.insert((a + c, b + e));
            }
        }
    }
    out
}

/// Every error pair some tree of depth at most `depth` attains on `d`.
pub fn reachable_pairs(d: &Dataset, depth: usize) -> Result<Vec<BiPair>, LimitsExceeded> {
    check(d.num_features(), depth)?;
    let rows: Vec<&Instance> = d.instances().collect();
    Ok(reachable(&rows, d.num_features(), depth).into_iter().map(BiPair::from).collect())
}

pub fn brute_frontier(d: &Dataset, depth: usize) -> Result<ParetoFront, LimitsExceeded> {
    Ok(ParetoFront::nondom(reachable_pairs(d, depth)?))
}

/// Best value of `kind` over all trees of depth at most `depth`.
pub fn brute_best_metric(d: &Dataset, depth: usize, kind: MetricKind) -> Result<f64, LimitsExceeded> {
    let (n_pos, n_neg) = d.class_counts();
    let values = reachable_pairs(d, depth)?.into_iter().map(|p| {
        kind.value(MetricCounts::from_pair(p, n_pos as u32, n_neg as u32).expect("reachable pairs fit the totals"))
    });
    Ok(values.reduce(|a, b| if kind.better(b, a) { b } else { a }).expect("leaves are always reachable"))
}

/// Random dataset with up to the given number of rows and features and a
/// random positive rate.
///
/// Rows draw their features from a random-sized pool, so repeated feature
/// vectors with conflicting labels keep fronts non-trivial at every depth.
pub fn random_dataset<R: Rng>(rng: &mut R, max_instances: usize, max_features: usize) -> Dataset {
    let nf = rng.gen_range(1..=max_features.max(1));
    let n = if rng.gen_bool(0.2) { rng.gen_range(0..=max_instances) } else { rng.gen_range(max_instances / 2..=max_instances) };
    let pos_rate: f64 = rng.gen();
    let density: f64 = rng.gen_range(0.2..0.8);
    let pool: Vec<Vec<bool>> =
        (0..rng.gen_range(1..=(n / 2).max(1))).map(|_| (0..nf).map(|_| rng.gen_bool(density)).collect()).collect();
    let instances = (0..n)
        .map(|_| Instance::new(&pool[rng.gen_range(0..pool.len())], rng.gen_bool(pos_rate)))
        .collect();
    Dataset::from_instances(nf, instances)
}
