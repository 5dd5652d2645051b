//! Binary decision trees over binary features.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::{Dataset, Instance};
use crate::pareto::BiPair;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TreeError {
    #[error("tree tests feature {feature} but the dataset has {num_features} features")]
    InvalidFeature { feature: usize, num_features: usize },
}

/// A classification tree. `left` is taken when the feature is absent.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "TreeRepr", into = "TreeRepr")]
pub enum Tree {
    Leaf(bool),
    Split { feature: usize, left: Box<Tree>, right: Box<Tree> },
}

/// JSON shape: `{"leaf": 0|1}` or `{"feature": i, "left": .., "right": ..}`.
#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum TreeRepr {
    Leaf { leaf: u8 },
    Split { feature: usize, left: Box<TreeRepr>, right: Box<TreeRepr> },
}

impl From<TreeRepr> for Tree {
    fn from(r: TreeRepr) -> Self {
        match r {
            TreeRepr::Leaf { leaf } => Tree::Leaf(leaf != 0),
            TreeRepr::Split { feature, left, right } => Tree::split(feature, (*left).into(), (*right).into()),
        }
    }
}

impl From<Tree> for TreeRepr {
    fn from(t: Tree) -> Self {
        match t {
            Tree::Leaf(label) => TreeRepr::Leaf { leaf: label as u8 },
            Tree::Split { feature, left, right } => TreeRepr::Split {
                feature,
                left: Box::new((*left).into()),
                right: Box::new((*right).into()),
            },
        }
    }
}

impl Tree {
    pub fn split(feature: usize, left: Tree, right: Tree) -> Tree {
        Tree::Split { feature, left: Box::new(left), right: Box::new(right) }
    }

    /// Number of predicate nodes on the longest root-to-leaf path.
    pub fn depth(&self) -> usize {
        match self {
            Tree::Leaf(_) => 0,
            Tree::Split { left, right, .. } => 1 + left.depth().max(right.depth()),
        }
    }

    /// Number of predicate nodes.
    pub fn size(&self) -> usize {
        match self {
            Tree::Leaf(_) => 0,
            Tree::Split { left, right, .. } => 1 + left.size() + right.size(),
        }
    }

    fn max_feature(&self) -> Option<usize> {
        match self {
            Tree::Leaf(_) => None,
            Tree::Split { feature, left, right } => {
                Some([Some(*feature), left.max_feature(), right.max_feature()].into_iter().flatten().max().unwrap())
            }
        }
    }

    pub fn classify(&self, instance: &Instance) -> bool {
        let mut node = self;
        loop {
            match node {
                Tree::Leaf(label) => return *label,
                Tree::Split { feature, left, right } => {
                    node = if instance.has_feature(*feature) { right } else { left };
                }
            }
        }
    }

    /// `(positives classified 0, negatives classified 1)` on `d`.
    pub fn evaluate(&self, d: &Dataset) -> Result<BiPair, TreeError> {
        if let Some(f) = self.max_feature() {
            if f >= d.num_features() {
                return Err(TreeError::InvalidFeature { feature: f, num_features: d.num_features() });
            }
        }
        let mut errs = BiPair::ZERO;
        for i in d.positives().iter() {
            if !self.classify(d.instance(i)) {
                errs.mp += 1;
            }
        }
        for i in d.negatives().iter() {
            if self.classify(d.instance(i)) {
                errs.mn += 1;
            }
        }
        Ok(errs)
    }
}

/// Free-function form of [`Tree::evaluate`].
pub fn evaluate(t: &Tree, d: &Dataset) -> Result<BiPair, TreeError> {
    t.evaluate(d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::parse_dataset;

    fn xor_tree() -> Tree {
        Tree::split(
            0,
            Tree::split(1, Tree::Leaf(false), Tree::Leaf(true)),
            Tree::split(1, Tree::Leaf(true), Tree::Leaf(false)),
        )
    }

    #[test]
    fn leaves_on_counts() {
        let d = parse_dataset("1 0\n1 1\n1 0\n0 0\n0 1\n0 0\n0 1\n0 0\n").unwrap();
        assert_eq!(d.class_counts(), (3, 5));
        assert_eq!(Tree::Leaf(true).evaluate(&d).unwrap(), BiPair::new(0, 5));
        assert_eq!(Tree::Leaf(false).evaluate(&d).unwrap(), BiPair::new(3, 0));
    }

    #[test]
    fn perfect_xor_tree() {
        let d = parse_dataset("1 1 0\n1 0 1\n0 1 1\n0 0 0\n").unwrap();
        let t = xor_tree();
        assert_eq!(t.evaluate(&d).unwrap(), BiPair::ZERO);
        assert_eq!(t.depth(), 2);
        assert_eq!(t.size(), 3);
    }

    #[test]
    fn invalid_feature_is_reported() {
        let d = parse_dataset("1 1\n0 0\n").unwrap();
        let t = Tree::split(3, Tree::Leaf(false), Tree::Leaf(true));
        assert_eq!(t.evaluate(&d), Err(TreeError::InvalidFeature { feature: 3, num_features: 1 }));
    }

    #[test]
    fn json_shape() {
        let t = Tree::split(2, Tree::Leaf(false), Tree::Leaf(true));
        let json = serde_json::to_string(&t).unwrap();
        assert_eq!(json, r#"{"feature":2,"left":{"leaf":0},"right":{"leaf":1}}"#);
        let back: Tree = serde_json::from_str(&json).unwrap();
        assert_eq!(back, t);
        let round: Tree = serde_json::from_str(&serde_json::to_string(&xor_tree()).unwrap()).unwrap();
        assert_eq!(round, xor_tree());
    }
}
