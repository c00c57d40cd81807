//! Memory-based classification.
//!
//! Training stores every instance. Features are weighted by information
//! gain, and two classifiers are built on top of the stored instances:
//!
//! * [`Ib1Model`]: weighted-overlap 1-nearest-neighbour search over the
//!   whole instance base.
//! * [`IgTreeModel`]: an oblivious decision tree whose levels test the
//!   features in descending weight order, falling back to the node's
//!   default class on unseen values.
//!
//! Both models are immutable once built and can be shared across threads.

mod base;
mod dictionary;
mod ib1;
mod igtree;
pub mod io;
mod schema;
mod weights;

pub use base::{distance, feature_delta, InstanceBase, NumericRange};
pub use ib1::{Ib1Model, Ib1Outcome, TIE_TOLERANCE};
pub use igtree::{IgTreeModel, NodeRef};
pub use io::{load_model, read_model, save_model, write_model};
pub use schema::{FeatureKind, FeatureSchema, FeatureSpec, FeatureValue, Instance};
pub use weights::{entropy, information_gain};

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum MblError {
    #[error("empty training data")]
    EmptyTrainingData,
    #[error("schema has no features")]
    NoFeatures,
    #[error("duplicate feature name: {0}")]
    DuplicateFeature(String),
    #[error("unknown feature kind: {0}")]
    UnknownFeatureKind(String),
    #[error("expected {expected} values, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("feature {feature} expects a {} value", expected.as_str())]
    KindMismatch {
        feature: String,
        expected: FeatureKind,
    },
    #[error("feature {feature} has non-finite value {value}")]
    NonFiniteValue { feature: String, value: f64 },
    #[error("invalid feature weight {0}")]
    InvalidWeight(f64),
    #[error("unknown algorithm: {0}")]
    UnknownAlgorithm(String),
    #[error("model has no stored instances; an IB1-IG model is required")]
    NoInstances,
}

/// The two memory-based learners.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    Ib1Ig,
    IgTree,
}

impl Algorithm {
    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::Ib1Ig => "ib1ig",
            Algorithm::IgTree => "igtree",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Algorithm {
    type Err = MblError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "ib1ig" | "ib1-ig" => Ok(Algorithm::Ib1Ig),
            "igtree" => Ok(Algorithm::IgTree),
            _ => Err(MblError::UnknownAlgorithm(s.to_string())),
        }
    }
}

/// A trained classifier of either kind.
#[derive(Debug, Clone)]
pub enum Classifier {
    Ib1(Ib1Model),
    IgTree(IgTreeModel),
}

impl Classifier {
    /// Computes weights on `base` and builds the requested model.
    pub fn train(base: InstanceBase, algorithm: Algorithm) -> Result<Self, MblError> {
        match algorithm {
            Algorithm::Ib1Ig => Ib1Model::train(base).map(Classifier::Ib1),
            Algorithm::IgTree => IgTreeModel::train(&base).map(Classifier::IgTree),
        }
    }

    pub fn algorithm(&self) -> Algorithm {
        match self {
            Classifier::Ib1(_) => Algorithm::Ib1Ig,
            Classifier::IgTree(_) => Algorithm::IgTree,
        }
    }

    pub fn schema(&self) -> &FeatureSchema {
        match self {
            Classifier::Ib1(m) => m.schema(),
            Classifier::IgTree(m) => m.schema(),
        }
    }

    pub fn classify(&self, values: &[FeatureValue]) -> Result<&str, MblError> {
        match self {
            Classifier::Ib1(m) => m.classify(values).map(|o| o.class),
            Classifier::IgTree(m) => m.classify(values),
        }
    }
}
