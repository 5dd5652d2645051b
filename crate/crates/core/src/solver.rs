//! Recursive bi-objective search with caching and bound-based pruning.
//!
//! `solve` returns the achievable nondominated pairs of a dataset that are not
//! strictly dominated by the caller's upper bound. Internally every upper-bound
//! point carries the recursion level that found it. When a candidate is
//! discarded, the level of its dominator tells whether the discard was caused by
//! the node itself (harmless to its own front) or by something above it. Only
//! fronts untouched by outside pruning are cached as optimal; the rest become
//! lower bounds.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::{difference_bounds, CacheKey, Dataset};
use crate::depth2::solve_shallow;
use crate::pareto::{staircase_meet, BiPair, BoundSet, ParetoFront, Witness, UNBOUNDED};
use crate::tree::Tree;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SolveError {
    #[error("depth {depth} exceeds the configured maximum {max}")]
    DepthExceedsMax { depth: usize, max: usize },
    #[error("dataset does not share the instance store this solver was first used with")]
    ForeignDataset,
    #[error("({}, {}) is not on the front", .0.mp, .0.mn)]
    NotOnFront(BiPair),
}

/// Pruning techniques that can be switched off individually.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Technique {
    /// Upper bound for the right child derived from the left child's front.
    UpperBound,
    /// Lower bounds cached for subproblems that found nothing below the bound.
    InfeasibilityLb,
    /// Skipping a feature when its merged child lower bounds are dominated.
    Lookahead,
    /// Child lower bounds translated from a similar solved dataset.
    Similarity,
    /// Frequency-count solver for depth budgets up to 2.
    Depth2,
}

impl Technique {
    pub const ALL: [Technique; 5] = [
        Technique::UpperBound,
        Technique::InfeasibilityLb,
        Technique::Lookahead,
        Technique::Similarity,
        Technique::Depth2,
    ];
}

impl fmt::Display for Technique {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Technique::UpperBound => "A",
            Technique::InfeasibilityLb => "B",
            Technique::Lookahead => "C",
            Technique::Similarity => "D",
            Technique::Depth2 => "depth2",
        })
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("unknown technique {0:?} (expected A, B, C, D or depth2)")]
pub struct UnknownTechnique(pub String);

impl FromStr for Technique {
    type Err = UnknownTechnique;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "A" | "a" => Ok(Technique::UpperBound),
            "B" | "b" => Ok(Technique::InfeasibilityLb),
            "C" | "c" => Ok(Technique::Lookahead),
            "D" | "d" => Ok(Technique::Similarity),
            "depth2" => Ok(Technique::Depth2),
            other => Err(UnknownTechnique(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolveConfig {
    pub max_depth: usize,
    pub upper_bound: bool,
    pub infeasibility_lb: bool,
    pub lookahead: bool,
    pub similarity: bool,
    pub depth2: bool,
}

impl SolveConfig {
    /// All techniques enabled.
    pub fn new(max_depth: usize) -> Self {
        SolveConfig {
            max_depth,
            upper_bound: true,
            infeasibility_lb: true,
            lookahead: true,
            similarity: true,
            depth2: true,
        }
    }

    pub fn set(mut self, t: Technique, enabled: bool) -> Self {
        *match t {
            Technique::UpperBound => &mut self.upper_bound,
            Technique::InfeasibilityLb => &mut self.infeasibility_lb,
            Technique::Lookahead => &mut self.lookahead,
            Technique::Similarity => &mut self.similarity,
            Technique::Depth2 => &mut self.depth2,
        } = enabled;
        self
    }

    pub fn without(self, t: Technique) -> Self {
        self.set(t, false)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolveStats {
    /// Subproblems searched feature by feature.
    pub expansions: u64,
    /// Subproblems answered from an optimal cache entry.
    pub cache_hits: u64,
    /// Subproblems discarded by a cached lower bound.
    pub lb_prunes: u64,
    /// Features skipped by lookahead.
    pub lookahead_prunes: u64,
    /// Fronts computed by the depth-2 solver.
    pub shallow_solves: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CacheStatus {
    Optimal,
    LowerBound,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CacheEntry {
    pub front: ParetoFront,
    pub status: CacheStatus,
}

#[derive(Default)]
struct Slot {
    optimal: Option<ParetoFront>,
    lower: Option<BoundSet>,
}

/// No discard recorded.
const CLEAN: u32 = u32::MAX;

/// An upper bound whose points remember the recursion level that produced them.
#[derive(Debug, Clone, Default)]
struct TaggedBound {
    points: Vec<BiPair>,
    origin: Vec<u32>,
}

impl TaggedBound {
    fn from_bound(b: &BoundSet, origin: u32) -> Self {
        TaggedBound { points: b.points().to_vec(), origin: vec![origin; b.len()] }
    }

    /// Canonical form of arbitrary tagged points; equal points keep the
    /// highest origin.
    fn normalize(mut v: Vec<(BiPair, u32)>) -> Self {
        v.sort_unstable_by(|a, b| (a.0.mp, a.0.mn, std::cmp::Reverse(a.1)).cmp(&(b.0.mp, b.0.mn, std::cmp::Reverse(b.1))));
        let mut out = TaggedBound { points: Vec::with_capacity(v.len()), origin: Vec::with_capacity(v.len()) };
        for (p, o) in v {
            if out.points.last().is_none_or(|last| p.mn < last.mn) {
                out.points.push(p);
                out.origin.push(o);
            }
        }
        out
    }

    /// Highest origin among points strictly dominating `p`.
    #[inline]
    fn justify(&self, p: BiPair) -> Option<u32> {
        let hi = self.points.partition_point(|q| q.mp <= p.mp);
        let lo = self.points[..hi].partition_point(|q| q.mn > p.mn);
        (lo..hi).filter(|&i| self.points[i] != p).map(|i| self.origin[i]).max()
    }

    /// `Some(taint)` if every point of the non-empty `lower` is strictly
    /// dominated.
    fn dominates_all(&self, lower: &[BiPair]) -> Option<u32> {
        if lower.is_empty() {
            return None;
        }
        let mut taint = CLEAN;
        for &p in lower {
            taint = taint.min(self.justify(p)?);
        }
        Some(taint)
    }

    fn filter(&self, front: &ParetoFront, taint: &mut u32) -> ParetoFront {
        let mut dropped = false;
        for p in front.iter() {
            if let Some(o) = self.justify(p) {
                *taint = (*taint).min(o);
                dropped = true;
            }
        }
        if dropped {
            front.filter_undominated(&BoundSet::new(self.points.iter().copied()))
        } else {
            front.clone()
        }
    }

    fn insert(&mut self, found: &ParetoFront, origin: u32) {
        let v = self
            .points
            .iter()
            .copied()
            .zip(self.origin.iter().copied())
            .chain(found.iter().map(|p| (p, origin)))
            .collect();
        *self = TaggedBound::normalize(v);
    }

    /// `max(u - l, 0)` for every point. A right subtree strictly dominated by
    /// it gives, together with `l`, a tree strictly dominated by `u`.
    fn shifted_down(&self, l: BiPair) -> Self {
        let shift = |x: u32, d: u32| if x == UNBOUNDED { UNBOUNDED } else { x.saturating_sub(d) };
        TaggedBound::normalize(
            self.points
                .iter()
                .zip(&self.origin)
                .map(|(u, &o)| (BiPair::new(shift(u.mp, l.mp), shift(u.mn, l.mn)), o))
                .collect(),
        )
    }

    fn meet(&self, other: &TaggedBound) -> Self {
        let (points, origin) =
            staircase_meet(&self.points, &other.points, |i, j| self.origin[i].min(other.origin[j]));
        TaggedBound { points, origin }
    }

    /// Bound for a right subtree that must combine with one of `left`.
    fn for_right(&self, left: &ParetoFront) -> Self {
        let mut it = left.iter();
        let Some(first) = it.next() else { return TaggedBound::default() };
        it.fold(self.shifted_down(first), |acc, l| acc.meet(&self.shifted_down(l)))
    }

    fn finite_points(&self) -> impl Iterator<Item = BiPair> + '_ {
        self.points.iter().copied().filter(|p| p.mp != UNBOUNDED && p.mn != UNBOUNDED)
    }
}

/// Lower bound for a dataset from the optimal front of a reference dataset,
/// where the reference has `b_pos` positives and `b_neg` negatives that the
/// dataset lacks: each point moves down by that much, clamped at zero.
pub fn similarity_lb(reference_front: &ParetoFront, b_pos: u32, b_neg: u32) -> BoundSet {
    translate_down(reference_front.points(), b_pos, b_neg)
}

fn translate_down(points: &[BiPair], b_pos: u32, b_neg: u32) -> BoundSet {
    BoundSet::new(points.iter().map(|p| BiPair::new(p.mp.saturating_sub(b_pos), p.mn.saturating_sub(b_neg))))
}

/// Lower bound for a split from lower bounds of its two children.
pub fn lookahead_lb(lb_left: &BoundSet, lb_right: &BoundSet) -> BoundSet {
    let mut sums = Vec::with_capacity(lb_left.len() * lb_right.len());
    for &a in lb_left.points() {
        for &b in lb_right.points() {
            sums.push(a.saturating_add(b));
        }
    }
    BoundSet::new(sums)
}

/// A dataset solved to optimality, and its front.
struct Reference {
    data: Dataset,
    front: Vec<BiPair>,
}

pub struct Solver {
    config: SolveConfig,
    cache: HashMap<(CacheKey, usize), Slot>,
    stats: SolveStats,
    anchor: Option<Dataset>,
}

impl Solver {
    pub fn new(config: SolveConfig) -> Self {
        Solver { config, cache: HashMap::new(), stats: SolveStats::default(), anchor: None }
    }

    pub fn config(&self) -> &SolveConfig {
        &self.config
    }

    pub fn stats(&self) -> SolveStats {
        self.stats
    }

    pub fn clear_cache(&mut self) {
        self.cache.clear();
    }

    pub fn cache_entry(&self, d: &Dataset, depth: usize) -> Option<CacheEntry> {
        let slot = self.cache.get(&(d.key(), depth))?;
        if let Some(front) = &slot.optimal {
            return Some(CacheEntry { front: front.clone(), status: CacheStatus::Optimal });
        }
        slot.lower.as_ref().map(|lb| CacheEntry {
            front: ParetoFront::nondom(lb.points().iter().copied()),
            status: CacheStatus::LowerBound,
        })
    }

    fn check(&mut self, d: &Dataset, depth: usize) -> Result<(), SolveError> {
        if depth > self.config.max_depth {
            return Err(SolveError::DepthExceedsMax { depth, max: self.config.max_depth });
        }
        match &self.anchor {
            Some(a) if !a.shares_store(d) => Err(SolveError::ForeignDataset),
            Some(_) => Ok(()),
            None => {
                self.anchor = Some(d.clone());
                Ok(())
            }
        }
    }

    /// Achievable nondominated pairs of trees of depth at most `depth` on `d`
    /// that no point of `ub` strictly dominates. Points carry witnesses.
    pub fn solve(&mut self, d: &Dataset, depth: usize, ub: &BoundSet) -> Result<ParetoFront, SolveError> {
        self.check(d, depth)?;
        Ok(self.solve_node(d, depth, &TaggedBound::from_bound(ub, 0), 1).0)
    }

    /// The complete front.
    pub fn frontier(&mut self, d: &Dataset, depth: usize) -> Result<ParetoFront, SolveError> {
        self.solve(d, depth, &BoundSet::unbounded())
    }

    /// A tree of depth at most `depth` whose errors on `d` are exactly `target`.
    pub fn reconstruct_tree(&mut self, d: &Dataset, depth: usize, target: BiPair) -> Result<Tree, SolveError> {
        let front = self.frontier(d, depth)?;
        match front.witness_of(target) {
            None => Err(SolveError::NotOnFront(target)),
            Some(Witness::Leaf(label)) => Ok(Tree::Leaf(label)),
            Some(Witness::Split { feature, left, right }) => {
                let (absent, present) = d.split_unchecked(feature as usize);
                Ok(Tree::split(
                    feature as usize,
                    self.reconstruct_tree(&absent, depth - 1, left)?,
                    self.reconstruct_tree(&present, depth - 1, right)?,
                ))
            }
        }
    }

    fn optimal(&self, d: &Dataset, depth: usize) -> Option<&ParetoFront> {
        self.cache.get(&(d.key(), depth)).and_then(|s| s.optimal.as_ref())
    }

    /// Best available lower bound for a child not yet searched.
    fn child_lb(&self, d: &Dataset, depth: usize, reference: Option<&Reference>) -> BoundSet {
        let slot = self.cache.get(&(d.key(), depth));
        if let Some(front) = slot.and_then(|s| s.optimal.as_ref()) {
            return front.to_bound();
        }
        let mut lb = BoundSet::zero();
        if self.config.infeasibility_lb {
            if let Some(cached) = slot.and_then(|s| s.lower.as_ref()) {
                lb = cached.clone();
            }
        }
        if self.config.similarity {
            if let Some(r) = reference {
                let (bp, bn) = difference_bounds(&r.data, d).expect("same store");
                lb = lb.meet(&translate_down(&r.front, bp as u32, bn as u32));
            }
        }
        lb
    }

    fn solve_node(&mut self, d: &Dataset, depth: usize, ub: &TaggedBound, level: u32) -> (ParetoFront, u32) {
        let mut taint = CLEAN;
        if depth == 0 {
            let (p, n) = d.class_counts();
            return (ub.filter(&ParetoFront::leaf(p as u32, n as u32), &mut taint), taint);
        }
        let key = (d.key(), depth);
        if depth <= 2 && self.config.depth2 {
            let front = match self.cache.get(&key).and_then(|s| s.optimal.as_ref()) {
                Some(f) => {
                    self.stats.cache_hits += 1;
                    ub.filter(f, &mut taint)
                }
                None => {
                    self.stats.shallow_solves += 1;
                    let f = solve_shallow(d, depth).expect("depth within range");
                    let out = ub.filter(&f, &mut taint);
                    self.cache.entry(key).or_default().optimal = Some(f);
                    out
                }
            };
            return (front, taint);
        }
        if let Some(slot) = self.cache.get(&key) {
            if let Some(f) = &slot.optimal {
                self.stats.cache_hits += 1;
                return (ub.filter(f, &mut taint), taint);
            }
            if let Some(lb) = &slot.lower {
                if let Some(t) = ub.dominates_all(lb.points()) {
                    self.stats.lb_prunes += 1;
                    return (ParetoFront::empty(), t);
                }
            }
        }
        self.stats.expansions += 1;

        let mut ub = ub.clone();
        let (n_pos, n_neg) = d.class_counts();
        let mut pf = ub.filter(&ParetoFront::leaf(n_pos as u32, n_neg as u32), &mut taint);
        ub.insert(&pf, level);
        let mut reference: Option<Reference> = None;
        let total = n_pos + n_neg;

        for f in 0..d.num_features() {
            let (p, n) = d.feature_counts(f);
            if p + n == 0 || p + n == total {
                continue;
            }
            let (absent, present) = d.split_unchecked(f);
            if self.config.lookahead {
                let lb = lookahead_lb(
                    &self.child_lb(&absent, depth - 1, reference.as_ref()),
                    &self.child_lb(&present, depth - 1, reference.as_ref()),
                );
                if let Some(t) = ub.dominates_all(lb.points()) {
                    self.stats.lookahead_prunes += 1;
                    taint = taint.min(t);
                    continue;
                }
            }

            let (left, t) = self.solve_node(&absent, depth - 1, &ub, level + 1);
            taint = taint.min(t);
            self.note_reference(&absent, depth - 1, &mut reference);
            if left.is_empty() {
                continue;
            }
            let right_ub = if self.config.upper_bound { ub.for_right(&left) } else { ub.clone() };
            let (right, t) = self.solve_node(&present, depth - 1, &right_ub, level + 1);
            taint = taint.min(t);
            self.note_reference(&present, depth - 1, &mut reference);
            if right.is_empty() {
                continue;
            }

            let found = ub.filter(&ParetoFront::merge_split(f, &left, &right), &mut taint);
            if !found.is_empty() {
                pf = pf.union(&found);
                ub.insert(&found, level);
            }
        }

        let slot = self.cache.entry(key).or_default();
        if taint >= level {
            slot.optimal = Some(pf.clone());
            slot.lower = None;
        } else if self.config.infeasibility_lb {
            let lb = BoundSet::new(pf.iter().chain(ub.finite_points()));
            slot.lower = Some(match slot.lower.take() {
                Some(old) => old.meet(&lb),
                None => lb,
            });
        }
        (pf, taint)
    }

    fn note_reference(&self, d: &Dataset, depth: usize, reference: &mut Option<Reference>) {
        if let Some(front) = self.optimal(d, depth) {
            *reference = Some(Reference { data: d.clone(), front: front.points().to_vec() });
        }
    }
}
