//! Exact fronts for depth budgets 0, 1 and 2 without splitting the dataset.
//!
//! Depth 1 needs only per-feature class counts. Depth 2 reads every leaf's
//! class counts off the pairwise [`FrequencyTable`]: below root feature `f`
//! and child feature `g`, each leaf holds the instances matching one pair of
//! literals.

use thiserror::Error;

use crate::dataset::{Dataset, FrequencyTable, Literal};
use crate::pareto::{BiPair, ParetoFront, Witness};

#[derive(Debug, Error, PartialEq, Eq)]
#[error("specialised solver handles depth 0..=2, got {0}")]
pub struct DepthOutOfRange(pub usize);

/// Canonical points of a single-leaf front, label 1 first when both exist.
#[inline]
fn leaf_points(n_pos: u32, n_neg: u32) -> ([(BiPair, bool); 2], usize) {
    let all_pos = (BiPair::new(0, n_neg), true);
    let all_neg = (BiPair::new(n_pos, 0), false);
    if n_neg == 0 {
        ([all_pos, all_pos], 1)
    } else if n_pos == 0 {
        ([all_neg, all_neg], 1)
    } else {
        ([all_pos, all_neg], 2)
    }
}

fn leaf_candidates(n_pos: u32, n_neg: u32, out: &mut Vec<(BiPair, Witness)>) {
    let (pts, k) = leaf_points(n_pos, n_neg);
    out.extend(pts[..k].iter().map(|&(p, label)| (p, Witness::Leaf(label))));
}

/// Pushes the fronts of `split on feature` with a leaf on each side.
#[inline]
fn stump_candidates(feature: usize, left: (u32, u32), right: (u32, u32), out: &mut Vec<(BiPair, Witness)>) {
    let (lp, lk) = leaf_points(left.0, left.1);
    let (rp, rk) = leaf_points(right.0, right.1);
    for &(l, _) in &lp[..lk] {
        for &(r, _) in &rp[..rk] {
            out.push((l.saturating_add(r), Witness::Split { feature: feature as u32, left: l, right: r }));
        }
    }
}

fn depth_one(d: &Dataset) -> ParetoFront {
    let (n_pos, n_neg) = d.class_counts();
    let (n_pos, n_neg) = (n_pos as u32, n_neg as u32);
    let mut cands = Vec::with_capacity(2 + 4 * d.num_features());
    leaf_candidates(n_pos, n_neg, &mut cands);
    for f in 0..d.num_features() {
        let (p, n) = d.feature_counts(f);
        let (p, n) = (p as u32, n as u32);
        stump_candidates(f, (n_pos - p, n_neg - n), (p, n), &mut cands);
    }
    ParetoFront::nondom_with_witnesses(cands)
}

/// Depth-≤1 front of the instances matching literal `a`.
fn literal_front(fq: &FrequencyTable, a: Literal, cands: &mut Vec<(BiPair, Witness)>) -> ParetoFront {
    cands.clear();
    leaf_candidates(fq.fq_pos(a, a), fq.fq_neg(a, a), cands);
    for g in 0..fq.num_features() {
        let (gn, gp) = (Literal::neg(g), Literal::pos(g));
        stump_candidates(
            g,
            (fq.fq_pos(a, gn), fq.fq_neg(a, gn)),
            (fq.fq_pos(a, gp), fq.fq_neg(a, gp)),
            cands,
        );
    }
    ParetoFront::nondom_with_witnesses(std::mem::take(cands))
}

fn depth_two(d: &Dataset) -> ParetoFront {
    let fq = d.pairwise_counts();
    let mut root = Vec::new();
    leaf_candidates(fq.total_pos(), fq.total_neg(), &mut root);
    let mut scratch = Vec::new();
    for f in 0..d.num_features() {
        let left = literal_front(&fq, Literal::neg(f), &mut scratch);
        let right = literal_front(&fq, Literal::pos(f), &mut scratch);
        for &l in left.points() {
            for &r in right.points() {
                root.push((l.saturating_add(r), Witness::Split { feature: f as u32, left: l, right: r }));
            }
        }
    }
    ParetoFront::nondom_with_witnesses(root)
}

/// Exact front over all trees of depth at most `depth` (0, 1 or 2), with
/// witnesses for every point.
pub fn solve_shallow(d: &Dataset, depth: usize) -> Result<ParetoFront, DepthOutOfRange> {
    match depth {
        0 => {
            let (p, n) = d.class_counts();
            Ok(ParetoFront::leaf(p as u32, n as u32))
        }
        1 => Ok(depth_one(d)),
        2 => Ok(depth_two(d)),
        other => Err(DepthOutOfRange(other)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::tests::xor;

    fn pts(f: &ParetoFront) -> Vec<(u32, u32)> {
        f.iter().map(Into::into).collect()
    }

    #[test]
    fn xor_fronts() {
        let d = xor();
        assert_eq!(pts(&solve_shallow(&d, 2).unwrap()), vec![(0, 0)]);
        assert_eq!(pts(&solve_shallow(&d, 1).unwrap()), vec![(0, 2), (1, 1), (2, 0)]);
        assert_eq!(pts(&solve_shallow(&d, 0).unwrap()), vec![(0, 2), (2, 0)]);
    }

    #[test]
    fn depth_out_of_range() {
        assert_eq!(solve_shallow(&xor(), 3).unwrap_err(), DepthOutOfRange(3));
    }

    #[test]
    fn leaf_witness_preferred_on_ties() {
        let d = xor();
        let f = solve_shallow(&d, 2).unwrap();
        assert!(matches!(f.witness_of(BiPair::ZERO), Some(Witness::Split { feature: 0, .. })));
        let f1 = solve_shallow(&d, 1).unwrap();
        assert_eq!(f1.witness_of(BiPair::new(2, 0)), Some(Witness::Leaf(false)));
        assert_eq!(f1.witness_of(BiPair::new(0, 2)), Some(Witness::Leaf(true)));
    }

    #[test]
    fn empty_and_featureless() {
        let d = xor().with_instances([]).unwrap();
        for k in 0..=2 {
            assert_eq!(pts(&solve_shallow(&d, k).unwrap()), vec![(0, 0)]);
        }
        let d = crate::dataset::parse_dataset("1\n0\n1\n").unwrap();
        assert_eq!(pts(&solve_shallow(&d, 2).unwrap()), vec![(0, 1), (2, 0)]);
    }
}
