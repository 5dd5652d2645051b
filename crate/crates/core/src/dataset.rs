//! Binary-feature datasets backed by a shared, read-only instance store.
//!
//! A [`Dataset`] is a pair of instance bitsets (positives and negatives) over
//! an [`Arc`]-shared store, so splitting on a feature is two word-wise ANDs and
//! every subset produced during the search shares the same backing rows.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::bitset::Bitset;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("empty dataset: no instance lines found")]
    Empty,
    #[error("line {line}: non-binary token {token:?}")]
    NonBinaryToken { line: usize, token: String },
    #[error("line {line}: expected {expected} tokens, found {found}")]
    RaggedLine { line: usize, expected: usize, found: usize },
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DatasetError {
    #[error("feature index {feature} out of range (dataset has {num_features} features)")]
    FeatureOutOfRange { feature: usize, num_features: usize },
    #[error("datasets do not share a backing store")]
    MismatchedStore,
    #[error("instance index {index} out of range (store has {len} instances)")]
    InstanceOutOfRange { index: usize, len: usize },
}

/// One labelled row: a fixed-length binary feature vector and a 0/1 class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    features: Bitset,
    label: bool,
}

impl Instance {
    pub fn new(features: &[bool], label: bool) -> Self {
        let features = Bitset::from_indices(
            features.len(),
            features.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i),
        );
        Instance { features, label }
    }

    #[inline]
    pub fn has_feature(&self, f: usize) -> bool {
        self.features.contains(f)
    }

    #[inline]
    pub fn label(&self) -> bool {
        self.label
    }

    pub fn num_features(&self) -> usize {
        self.features.capacity()
    }
}

#[derive(Debug)]
struct Store {
    num_features: usize,
    instances: Vec<Instance>,
    /// Indices of present features, per instance, ascending.
    present: Vec<Vec<u32>>,
    /// Instances containing each feature.
    columns: Vec<Bitset>,
}

impl Store {
    fn new(num_features: usize, instances: Vec<Instance>) -> Self {
        let n = instances.len();
        let mut columns = vec![Bitset::new(n); num_features];
        let mut present = Vec::with_capacity(n);
        for (i, inst) in instances.iter().enumerate() {
            let feats: Vec<u32> = inst.features.iter().map(|f| f as u32).collect();
            for &f in &feats {
                columns[f as usize].insert(i);
            }
            present.push(feats);
        }
        Store { num_features, instances, present, columns }
    }
}

/// Identity of a dataset's instance set, used to key the solver cache.
///
/// Two keys are equal iff the underlying instance bitsets are equal, which makes
/// the key independent of the order in which splits produced the subset.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CacheKey(Bitset);

/// A subset of a shared instance store, partitioned by class.
#[derive(Clone)]
pub struct Dataset {
    store: Arc<Store>,
    positives: Bitset,
    negatives: Bitset,
}

impl fmt::Debug for Dataset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Dataset")
            .field("num_features", &self.store.num_features)
            .field("positives", &self.positives)
            .field("negatives", &self.negatives)
            .finish()
    }
}

/// Content equality: same feature width and the same multiset of rows in the
/// same index order. Datasets over different stores compare by value.
impl PartialEq for Dataset {
    fn eq(&self, other: &Self) -> bool {
        if self.num_features() != other.num_features() {
            return false;
        }
        if Arc::ptr_eq(&self.store, &other.store) {
            return self.positives == other.positives && self.negatives == other.negatives;
        }
        let a: Vec<&Instance> = self.instances().collect();
        let b: Vec<&Instance> = other.instances().collect();
        a == b
    }
}

impl Dataset {
    /// Builds a dataset holding every given instance.
    ///
    /// Panics if the instances disagree on feature width.
    pub fn from_instances(num_features: usize, instances: Vec<Instance>) -> Self {
        assert!(
            instances.iter().all(|i| i.num_features() == num_features),
            "all instances must have {num_features} features"
        );
        let n = instances.len();
        let positives = Bitset::from_indices(n, instances.iter().enumerate().filter(|(_, i)| i.label).map(|(k, _)| k));
        let negatives = Bitset::full(n).difference(&positives);
        Dataset { store: Arc::new(Store::new(num_features, instances)), positives, negatives }
    }

    /// The sub-dataset of this dataset's store containing exactly `indices`.
    pub fn with_instances(&self, indices: impl IntoIterator<Item = usize>) -> Result<Dataset, DatasetError> {
        let len = self.store.instances.len();
        let mut mask = Bitset::new(len);
        for i in indices {
            if i >= len {
                return Err(DatasetError::InstanceOutOfRange { index: i, len });
            }
            mask.insert(i);
        }
        Ok(self.restricted(&mask))
    }

    fn restricted(&self, mask: &Bitset) -> Dataset {
        let all_pos = Bitset::from_indices(
            mask.capacity(),
            self.store.instances.iter().enumerate().filter(|(_, i)| i.label).map(|(k, _)| k),
        );
        Dataset {
            store: Arc::clone(&self.store),
            positives: mask.intersection(&all_pos),
            negatives: mask.difference(&all_pos),
        }
    }

    #[inline]
    pub fn num_features(&self) -> usize {
        self.store.num_features
    }

    /// Number of rows in the backing store (not in this subset).
    pub fn store_len(&self) -> usize {
        self.store.instances.len()
    }

    #[inline]
    pub fn positives(&self) -> &Bitset {
        &self.positives
    }

    #[inline]
    pub fn negatives(&self) -> &Bitset {
        &self.negatives
    }

    pub fn len(&self) -> usize {
        self.positives.len() + self.negatives.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positives.is_empty() && self.negatives.is_empty()
    }

    /// `(|D+|, |D−|)`.
    #[inline]
    pub fn class_counts(&self) -> (usize, usize) {
        (self.positives.len(), self.negatives.len())
    }

    pub fn instance(&self, index: usize) -> &Instance {
        &self.store.instances[index]
    }

    /// Indices of the instances in this subset, ascending.
    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.positives.union(&self.negatives).iter().collect::<Vec<_>>().into_iter()
    }

    pub fn instances(&self) -> impl Iterator<Item = &Instance> + '_ {
        self.indices().map(move |i| &self.store.instances[i])
    }

    pub fn shares_store(&self, other: &Dataset) -> bool {
        Arc::ptr_eq(&self.store, &other.store)
    }

    /// Partitions on feature `f`, returning `(D(f̄), D(f))`.
    pub fn split(&self, f: usize) -> Result<(Dataset, Dataset), DatasetError> {
        if f >= self.num_features() {
            return Err(DatasetError::FeatureOutOfRange { feature: f, num_features: self.num_features() });
        }
        Ok(self.split_unchecked(f))
    }

    #[inline]
    pub(crate) fn split_unchecked(&self, f: usize) -> (Dataset, Dataset) {
        let column = &self.store.columns[f];
        let absent = Dataset {
            store: Arc::clone(&self.store),
            positives: self.positives.difference(column),
            negatives: self.negatives.difference(column),
        };
        let present = Dataset {
            store: Arc::clone(&self.store),
            positives: self.positives.intersection(column),
            negatives: self.negatives.intersection(column),
        };
        (absent, present)
    }

    /// `(|D+(f)|, |D−(f)|)` without materialising the split.
    #[inline]
    pub(crate) fn feature_counts(&self, f: usize) -> (usize, usize) {
        let column = &self.store.columns[f];
        (self.positives.intersection_len(column), self.negatives.intersection_len(column))
    }

    pub fn key(&self) -> CacheKey {
        CacheKey(self.positives.union(&self.negatives))
    }

    /// Pairwise literal frequency counts for this subset.
    ///
    /// Positive-literal pairs are counted by walking each instance's present
    /// features, so the work is quadratic in the features set per row rather
    /// than in `|F|`; negated literals are derived on lookup.
    pub fn pairwise_counts(&self) -> FrequencyTable {
        let nf = self.num_features();
        let mut table = FrequencyTable {
            num_features: nf,
            totals: [self.negatives.len() as u32, self.positives.len() as u32],
            pairs: [vec![0; nf * nf], vec![0; nf * nf]],
        };
        for (class, set) in [(0usize, &self.negatives), (1usize, &self.positives)] {
            let counts = &mut table.pairs[class];
            for i in set.iter() {
                let present = &self.store.present[i];
                for (k, &a) in present.iter().enumerate() {
                    let row = a as usize * nf;
                    for &b in &present[k..] {
                        counts[row + b as usize] += 1;
                    }
                }
            }
        }
        table
    }

    /// Serialises in the label-first text format accepted by [`parse_dataset`].
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for inst in self.instances() {
            out.push(if inst.label { '1' } else { '0' });
            for f in 0..self.num_features() {
                out.push(' ');
                out.push(if inst.has_feature(f) { '1' } else { '0' });
            }
            out.push('\n');
        }
        out
    }
}

/// `(|target+ \ reference+|, |target− \ reference−|)`.
pub fn difference_bounds(target: &Dataset, reference: &Dataset) -> Result<(usize, usize), DatasetError> {
    if !target.shares_store(reference) {
        return Err(DatasetError::MismatchedStore);
    }
    Ok((
        target.positives.difference_len(&reference.positives),
        target.negatives.difference_len(&reference.negatives),
    ))
}

/// A feature or its negation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Literal {
    pub feature: usize,
    pub present: bool,
}

impl Literal {
    pub fn pos(feature: usize) -> Self {
        Literal { feature, present: true }
    }

    pub fn neg(feature: usize) -> Self {
        Literal { feature, present: false }
    }
}

/// Per-class instance counts for every pair of (possibly negated) literals.
#[derive(Debug, Clone)]
pub struct FrequencyTable {
    num_features: usize,
    /// Indexed by class: 0 = negative, 1 = positive.
    totals: [u32; 2],
    /// Upper triangle (row <= col) of positive-literal co-occurrence counts.
    pairs: [Vec<u32>; 2],
}

impl FrequencyTable {
    pub fn num_features(&self) -> usize {
        self.num_features
    }

    #[inline]
    fn both(&self, class: usize, f: usize, g: usize) -> u32 {
        let (lo, hi) = if f <= g { (f, g) } else { (g, f) };
        self.pairs[class][lo * self.num_features + hi]
    }

    #[inline]
    fn get(&self, class: usize, a: Literal, b: Literal) -> u32 {
        let fg = self.both(class, a.feature, b.feature);
        match (a.present, b.present) {
            (true, true) => fg,
            (true, false) => self.both(class, a.feature, a.feature) - fg,
            (false, true) => self.both(class, b.feature, b.feature) - fg,
            (false, false) => {
                self.totals[class] + fg
                    - self.both(class, a.feature, a.feature)
                    - self.both(class, b.feature, b.feature)
            }
        }
    }

    /// Positive instances containing both literals.
    #[inline]
    pub fn fq_pos(&self, a: Literal, b: Literal) -> u32 {
        self.get(1, a, b)
    }

    /// Negative instances containing both literals.
    #[inline]
    pub fn fq_neg(&self, a: Literal, b: Literal) -> u32 {
        self.get(0, a, b)
    }

    pub fn total_pos(&self) -> u32 {
        self.totals[1]
    }

    pub fn total_neg(&self) -> u32 {
        self.totals[0]
    }
}

/// Parses label-first, whitespace-separated 0/1 rows.
pub fn parse_dataset(text: &str) -> Result<Dataset, ParseError> {
    let mut width: Option<usize> = None;
    let mut instances = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line_no = lineno + 1;
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.is_empty() {
            continue;
        }
        match width {
            None => width = Some(tokens.len()),
            Some(w) if w != tokens.len() => {
                return Err(ParseError::RaggedLine { line: line_no, expected: w, found: tokens.len() })
            }
            Some(_) => {}
        }
        let mut bits = Vec::with_capacity(tokens.len());
        for tok in tokens {
            match tok {
                "0" => bits.push(false),
                "1" => bits.push(true),
                other => return Err(ParseError::NonBinaryToken { line: line_no, token: other.to_string() }),
            }
        }
        instances.push(Instance::new(&bits[1..], bits[0]));
    }
    let width = width.ok_or(ParseError::Empty)?;
    Ok(Dataset::from_instances(width - 1, instances))
}
