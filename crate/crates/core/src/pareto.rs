//! Objective pairs, dominance, and operations on nondominated sets.
//!
//! Every [`ParetoFront`] and [`BoundSet`] is kept in canonical form: strictly
//! increasing in `mp` and strictly decreasing in `mn`. All scans below rely on
//! that ordering.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

/// Saturating stand-in for an unbounded objective value.
pub const UNBOUNDED: u32 = u32::MAX;

/// Bi-misclassification of a tree: (misclassified positives, misclassified negatives).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "(u32, u32)", into = "(u32, u32)")]
pub struct BiPair {
    /// False negatives.
    pub mp: u32,
    /// False positives.
    pub mn: u32,
}

impl From<(u32, u32)> for BiPair {
    fn from((mp, mn): (u32, u32)) -> Self {
        BiPair { mp, mn }
    }
}

impl From<BiPair> for (u32, u32) {
    fn from(p: BiPair) -> Self {
        (p.mp, p.mn)
    }
}

impl BiPair {
    pub const ZERO: BiPair = BiPair { mp: 0, mn: 0 };
    pub const INFINITY: BiPair = BiPair { mp: UNBOUNDED, mn: UNBOUNDED };

    #[inline]
    pub const fn new(mp: u32, mn: u32) -> Self {
        BiPair { mp, mn }
    }

    /// Componentwise `<=` with inequality somewhere.
    #[inline]
    pub fn dominates(self, other: BiPair) -> bool {
        self.mp <= other.mp && self.mn <= other.mn && self != other
    }

    #[inline]
    pub fn weakly_dominates(self, other: BiPair) -> bool {
        self.mp <= other.mp && self.mn <= other.mn
    }

    #[inline]
    pub fn saturating_add(self, other: BiPair) -> BiPair {
        BiPair::new(sat_add(self.mp, other.mp), sat_add(self.mn, other.mn))
    }

    /// `self - other`, or `None` if a component would go negative.
    /// Unbounded components stay unbounded.
    #[inline]
    pub fn checked_sub(self, other: BiPair) -> Option<BiPair> {
        Some(BiPair::new(sat_sub(self.mp, other.mp)?, sat_sub(self.mn, other.mn)?))
    }

    /// Componentwise maximum.
    #[inline]
    pub fn join(self, other: BiPair) -> BiPair {
        BiPair::new(self.mp.max(other.mp), self.mn.max(other.mn))
    }
}

#[inline]
fn sat_add(a: u32, b: u32) -> u32 {
    if a == UNBOUNDED || b == UNBOUNDED {
        UNBOUNDED
    } else {
        a.saturating_add(b)
    }
}

#[inline]
fn sat_sub(a: u32, b: u32) -> Option<u32> {
    if a == UNBOUNDED {
        Some(UNBOUNDED)
    } else {
        a.checked_sub(b)
    }
}

pub fn dominates(p: BiPair, q: BiPair) -> bool {
    p.dominates(q)
}

/// How a front point is realised: a leaf label or a split whose children
/// achieve `left` (feature absent) and `right` (feature present).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Witness {
    Leaf(bool),
    Split { feature: u32, left: BiPair, right: BiPair },
}

#[inline]
fn lex(a: &BiPair, b: &BiPair) -> Ordering {
    (a.mp, a.mn).cmp(&(b.mp, b.mn))
}

/// Keeps the nondominated points of a lexicographically sorted slice.
/// Of several equal points the first is kept.
fn sweep_sorted<T>(sorted: impl IntoIterator<Item = (BiPair, T)>) -> (Vec<BiPair>, Vec<T>) {
    let mut points: Vec<BiPair> = Vec::new();
    let mut extra = Vec::new();
    for (p, t) in sorted {
        match points.last() {
            Some(last) if p.mn >= last.mn => {}
            _ => {
                points.push(p);
                extra.push(t);
            }
        }
    }
    (points, extra)
}

/// Index of the last point with `mp <= x`, for canonical `points`.
#[inline]
fn last_at_or_before(points: &[BiPair], x: u32) -> Option<usize> {
    let idx = points.partition_point(|p| p.mp <= x);
    idx.checked_sub(1)
}

/// Whether some point of canonical `set` strictly dominates `p`.
#[inline]
pub(crate) fn strictly_dominated_by(set: &[BiPair], p: BiPair) -> bool {
    // Among points with mp <= p.mp the last has the smallest mn; any earlier
    // candidate has a larger mn, so checking the last one suffices.
    match last_at_or_before(set, p.mp) {
        Some(i) => set[i].mn <= p.mn && set[i] != p,
        None => false,
    }
}

/// Mutually nondominated objective pairs in canonical order, with optional
/// per-point provenance.
#[derive(Debug, Clone, Default)]
pub struct ParetoFront {
    points: Vec<BiPair>,
    witnesses: Option<Vec<Witness>>,
}

/// Fronts compare by their point sets; provenance is not part of equality.
impl PartialEq for ParetoFront {
    fn eq(&self, other: &Self) -> bool {
        self.points == other.points
    }
}

impl Eq for ParetoFront {}

impl ParetoFront {
    pub fn empty() -> Self {
        ParetoFront { points: Vec::new(), witnesses: None }
    }

    /// Nondominated, deduplicated subset of `points`.
    pub fn nondom(points: impl IntoIterator<Item = BiPair>) -> Self {
        let mut v: Vec<BiPair> = points.into_iter().collect();
        v.sort_unstable_by(lex);
        let (points, _) = sweep_sorted(v.into_iter().map(|p| (p, ())));
        ParetoFront { points, witnesses: None }
    }

    /// Like [`ParetoFront::nondom`] but keeps a witness per surviving point; on
    /// ties the earliest candidate in input order wins.
    pub fn nondom_with_witnesses(mut candidates: Vec<(BiPair, Witness)>) -> Self {
        candidates.sort_by(|a, b| lex(&a.0, &b.0));
        let (points, witnesses) = sweep_sorted(candidates);
        ParetoFront { points, witnesses: Some(witnesses) }
    }

    /// The two single-leaf classifiers: label 0 costs `(n_pos, 0)`, label 1
    /// costs `(0, n_neg)`.
    pub fn leaf(n_pos: u32, n_neg: u32) -> Self {
        ParetoFront::nondom_with_witnesses(vec![
            (BiPair::new(0, n_neg), Witness::Leaf(true)),
            (BiPair::new(n_pos, 0), Witness::Leaf(false)),
        ])
    }

    #[inline]
    pub fn points(&self) -> &[BiPair] {
        &self.points
    }

    pub fn witnesses(&self) -> Option<&[Witness]> {
        self.witnesses.as_deref()
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.points.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = BiPair> + '_ {
        self.points.iter().copied()
    }

    fn position(&self, p: BiPair) -> Option<usize> {
        self.points.binary_search_by(|q| lex(q, &p)).ok()
    }

    pub fn contains(&self, p: BiPair) -> bool {
        self.position(p).is_some()
    }

    pub fn witness_of(&self, p: BiPair) -> Option<Witness> {
        let i = self.position(p)?;
        self.witnesses.as_ref().map(|w| w[i])
    }

    pub fn strip_witnesses(mut self) -> Self {
        self.witnesses = None;
        self
    }

    /// Nondominated pairwise sums. Provenance is dropped; see
    /// [`ParetoFront::merge_split`] for the tracked variant.
    pub fn merge(&self, other: &ParetoFront) -> ParetoFront {
        let mut sums = Vec::with_capacity(self.len() * other.len());
        for &a in &self.points {
            for &b in &other.points {
                sums.push(a.saturating_add(b));
            }
        }
        ParetoFront::nondom(sums)
    }

    /// Front of the tree that splits on `feature` with `left` under the
    /// feature-absent branch and `right` under the feature-present branch.
    pub fn merge_split(feature: usize, left: &ParetoFront, right: &ParetoFront) -> ParetoFront {
        let mut sums = Vec::with_capacity(left.len() * right.len());
        for &a in &left.points {
            for &b in &right.points {
                sums.push((a.saturating_add(b), Witness::Split { feature: feature as u32, left: a, right: b }));
            }
        }
        ParetoFront::nondom_with_witnesses(sums)
    }

    /// `nondom(self ∪ other)` in linear time. On equal points `self` wins.
    /// Witnesses survive only if both operands carry them.
    pub fn union(&self, other: &ParetoFront) -> ParetoFront {
        let keep = self.witnesses.is_some() && other.witnesses.is_some();
        let (mut i, mut j) = (0, 0);
        let mut points = Vec::with_capacity(self.len() + other.len());
        let mut witnesses = Vec::new();
        let wit = |f: &ParetoFront, k: usize| f.witnesses.as_ref().map(|w| w[k]);
        let mut push = |p: BiPair, w: Option<Witness>| {
            if points.last().is_none_or(|last: &BiPair| p.mn < last.mn) {
                points.push(p);
                if let Some(w) = w {
                    witnesses.push(w);
                }
            }
        };
        while i < self.len() || j < other.len() {
            let take_self = match (self.points.get(i), other.points.get(j)) {
                (Some(a), Some(b)) => lex(a, b) != Ordering::Greater,
                (Some(_), None) => true,
                _ => false,
            };
            if take_self {
                push(self.points[i], if keep { wit(self, i) } else { None });
                i += 1;
            } else {
                push(other.points[j], if keep { wit(other, j) } else { None });
                j += 1;
            }
        }
        ParetoFront { points, witnesses: if keep { Some(witnesses) } else { None } }
    }

    /// Points not strictly dominated by any point of `bound`.
    pub fn filter_undominated(&self, bound: &BoundSet) -> ParetoFront {
        let mut points = Vec::with_capacity(self.len());
        let mut witnesses = self.witnesses.as_ref().map(|_| Vec::with_capacity(self.len()));
        for (k, &p) in self.points.iter().enumerate() {
            if !strictly_dominated_by(&bound.points, p) {
                points.push(p);
                if let (Some(out), Some(src)) = (witnesses.as_mut(), self.witnesses.as_ref()) {
                    out.push(src[k]);
                }
            }
        }
        ParetoFront { points, witnesses }
    }

    pub fn to_bound(&self) -> BoundSet {
        BoundSet { points: self.points.clone() }
    }
}

/// A set of objective pairs used as an upper or lower bound.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BoundSet {
    points: Vec<BiPair>,
}

impl BoundSet {
    pub fn new(points: impl IntoIterator<Item = BiPair>) -> Self {
        BoundSet { points: ParetoFront::nondom(points).points }
    }

    /// `{(∞, ∞)}`: excludes nothing.
    pub fn unbounded() -> Self {
        BoundSet { points: vec![BiPair::INFINITY] }
    }

    /// `{(0, 0)}`: valid lower bound for any dataset.
    pub fn zero() -> Self {
        BoundSet { points: vec![BiPair::ZERO] }
    }

    #[inline]
    pub fn points(&self) -> &[BiPair] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// `self > upper`: every point of `self` is strictly dominated by a point
    /// of `upper`. An empty `self` never compares greater.
    pub fn front_gt(&self, upper: &BoundSet) -> bool {
        !self.points.is_empty() && self.points.iter().all(|&p| strictly_dominated_by(&upper.points, p))
    }

    /// Upper bound for a right subtree given its sibling's front:
    /// `nondom{u - l}` over all pairs, dropping differences with a negative
    /// component.
    pub fn subtract_ub(&self, left: &ParetoFront) -> BoundSet {
        let mut diffs = Vec::with_capacity(self.len() * left.len());
        for &u in &self.points {
            for &l in &left.points {
                if let Some(d) = u.checked_sub(l) {
                    diffs.push(d);
                }
            }
        }
        BoundSet::new(diffs)
    }

    /// Intersection of the up-sets of `self` and `other`, as its minimal points.
    ///
    /// A pair lies above some point of both sets iff it lies above the
    /// componentwise maximum of one point from each, so two lower bounds for
    /// the same dataset combine into a bound at least as tight as either.
    pub fn meet(&self, other: &BoundSet) -> BoundSet {
        BoundSet { points: staircase_meet(&self.points, &other.points, |_, _| ()).0 }
    }

    pub fn contains(&self, p: BiPair) -> bool {
        self.points.binary_search_by(|q| lex(q, &p)).is_ok()
    }
}

/// Minimal points of `Up(a) ∩ Up(b)` for canonical `a`, `b`. `tag` combines the
/// extra data of the two contributing points.
pub(crate) fn staircase_meet<T>(
    a: &[BiPair],
    b: &[BiPair],
    mut tag: impl FnMut(usize, usize) -> T,
) -> (Vec<BiPair>, Vec<T>) {
    let mut points: Vec<BiPair> = Vec::new();
    let mut tags = Vec::new();
    let (mut i, mut j) = (0usize, 0usize);
    // i, j: count of points in a, b with mp <= x
    while i < a.len() || j < b.len() {
        let x = match (a.get(i), b.get(j)) {
            (Some(p), Some(q)) => p.mp.min(q.mp),
            (Some(p), None) => p.mp,
            (None, Some(q)) => q.mp,
            (None, None) => break,
        };
        while i < a.len() && a[i].mp <= x {
            i += 1;
        }
        while j < b.len() && b[j].mp <= x {
            j += 1;
        }
        if i == 0 || j == 0 {
            continue;
        }
        let h = a[i - 1].mn.max(b[j - 1].mn);
        if points.last().is_none_or(|last| h < last.mn) {
            points.push(BiPair::new(x, h));
            tags.push(tag(i - 1, j - 1));
        }
    }
    (points, tags)
}

/// Free-function forms of the canonical operations.
pub fn nondom(points: impl IntoIterator<Item = BiPair>) -> ParetoFront {
    ParetoFront::nondom(points)
}

pub fn merge(left: &ParetoFront, right: &ParetoFront) -> ParetoFront {
    left.merge(right)
}

pub fn front_gt(lower: &BoundSet, upper: &BoundSet) -> bool {
    lower.front_gt(upper)
}

pub fn subtract_ub(ub: &BoundSet, left_front: &ParetoFront) -> BoundSet {
    ub.subtract_ub(left_front)
}

pub fn leaf_front(n_pos: u32, n_neg: u32) -> ParetoFront {
    ParetoFront::leaf(n_pos, n_neg)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bp(mp: u32, mn: u32) -> BiPair {
        BiPair::new(mp, mn)
    }

    fn pts(f: &ParetoFront) -> Vec<(u32, u32)> {
        f.iter().map(Into::into).collect()
    }

    fn front(v: &[(u32, u32)]) -> ParetoFront {
        ParetoFront::nondom(v.iter().map(|&p| p.into()))
    }

    fn bound(v: &[(u32, u32)]) -> BoundSet {
        BoundSet::new(v.iter().map(|&p| p.into()))
    }

    #[test]
    fn dominance() {
        assert!(dominates(bp(1, 1), bp(1, 2)));
        assert!(!dominates(bp(1, 1), bp(1, 1)));
        assert!(!dominates(bp(1, 2), bp(2, 1)));
        assert!(!dominates(bp(2, 1), bp(1, 2)));
    }

    #[test]
    fn nondom_examples() {
        assert_eq!(pts(&front(&[(1, 2), (2, 2), (0, 5)])), vec![(0, 5), (1, 2)]);
        assert_eq!(pts(&front(&[(1, 2), (1, 2)])), vec![(1, 2)]);
        assert!(front(&[]).is_empty());
    }

    #[test]
    fn merge_examples() {
        let m = merge(&front(&[(3, 0), (0, 2)]), &front(&[(1, 0), (0, 1)]));
        assert_eq!(pts(&m), vec![(0, 3), (1, 2), (3, 1), (4, 0)]);
        let f = front(&[(0, 7), (2, 3), (5, 0)]);
        assert_eq!(merge(&f, &front(&[(0, 0)])), f);
    }

    #[test]
    fn merge_split_records_contributors() {
        let l = ParetoFront::leaf(3, 0);
        let r = ParetoFront::leaf(1, 2);
        let m = ParetoFront::merge_split(4, &l, &r);
        assert_eq!(pts(&m), vec![(0, 2), (1, 0)]);
        assert_eq!(
            m.witness_of(bp(1, 0)),
            Some(Witness::Split { feature: 4, left: bp(0, 0), right: bp(1, 0) })
        );
    }

    #[test]
    fn front_gt_examples() {
        assert!(front_gt(&bound(&[(2, 2)]), &bound(&[(1, 1)])));
        assert!(!front_gt(&bound(&[(0, 0)]), &bound(&[(1, 1)])));
        assert!(!front_gt(&bound(&[(2, 2), (0, 9)]), &bound(&[(1, 1)])));
        assert!(!front_gt(&bound(&[(1, 1)]), &bound(&[(1, 1)])));
        assert!(!front_gt(&BoundSet::default(), &bound(&[(1, 1)])));
        assert!(!front_gt(&bound(&[(5, 5)]), &BoundSet::unbounded()));
    }

    #[test]
    fn subtract_ub_examples() {
        let ub = bound(&[(5, 5)]);
        assert_eq!(ub.subtract_ub(&front(&[(1, 2), (2, 1)])), bound(&[(3, 4), (4, 3)]));
        assert!(bound(&[(1, 1)]).subtract_ub(&front(&[(2, 0)])).is_empty());
        let f = front(&[(0, 3), (2, 1)]);
        assert_eq!(BoundSet::unbounded().subtract_ub(&f), BoundSet::unbounded());
    }

    #[test]
    fn leaf_front_examples() {
        assert_eq!(pts(&leaf_front(3, 2)), vec![(0, 2), (3, 0)]);
        assert_eq!(pts(&leaf_front(0, 5)), vec![(0, 0)]);
        assert_eq!(pts(&leaf_front(0, 0)), vec![(0, 0)]);
        let f = leaf_front(3, 2);
        assert_eq!(f.witness_of(bp(3, 0)), Some(Witness::Leaf(false)));
        assert_eq!(f.witness_of(bp(0, 2)), Some(Witness::Leaf(true)));
        assert_eq!(leaf_front(0, 5).witness_of(bp(0, 0)), Some(Witness::Leaf(false)));
    }

    #[test]
    fn union_prefers_left_witness() {
        let a = ParetoFront::nondom_with_witnesses(vec![(bp(1, 1), Witness::Leaf(true))]);
        let b = ParetoFront::nondom_with_witnesses(vec![(bp(1, 1), Witness::Leaf(false)), (bp(0, 3), Witness::Leaf(false))]);
        let u = a.union(&b);
        assert_eq!(pts(&u), vec![(0, 3), (1, 1)]);
        assert_eq!(u.witness_of(bp(1, 1)), Some(Witness::Leaf(true)));
    }

    #[test]
    fn filter_is_strict() {
        let f = front(&[(0, 4), (1, 1), (4, 0)]);
        let kept = f.filter_undominated(&bound(&[(1, 1), (3, 0)]));
        assert_eq!(pts(&kept), vec![(0, 4), (1, 1)]);
    }

    #[test]
    fn meet_examples() {
        let a = bound(&[(0, 4), (3, 1)]);
        let b = bound(&[(1, 2), (4, 0)]);
        assert_eq!(a.meet(&b), bound(&[(1, 4), (3, 2), (4, 1)]));
        assert_eq!(a.meet(&BoundSet::zero()), a);
        assert!(a.meet(&BoundSet::default()).is_empty());
    }
}
