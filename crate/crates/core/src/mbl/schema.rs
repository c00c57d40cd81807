use std::cmp::Ordering;
use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::hash::{Hash, Hasher};

use super::MblError;

/// Whether a feature is compared by identity or by scaled numeric difference.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FeatureKind {
    Symbolic,
    Numeric,
}

impl FeatureKind {
    pub fn as_str(self) -> &'static str {
        match self {
            FeatureKind::Symbolic => "symbolic",
            FeatureKind::Numeric => "numeric",
        }
    }
}

impl std::str::FromStr for FeatureKind {
    type Err = MblError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "symbolic" => Ok(FeatureKind::Symbolic),
            "numeric" => Ok(FeatureKind::Numeric),
            other => Err(MblError::UnknownFeatureKind(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeatureSpec {
    pub name: String,
    pub kind: FeatureKind,
}

impl FeatureSpec {
    pub fn symbolic(name: impl Into<String>) -> Self {
        FeatureSpec {
            name: name.into(),
            kind: FeatureKind::Symbolic,
        }
    }

    pub fn numeric(name: impl Into<String>) -> Self {
        FeatureSpec {
            name: name.into(),
            kind: FeatureKind::Numeric,
        }
    }
}

/// Ordered feature descriptors, the class labels seen in training, and one
/// information-gain weight (in bits) per feature.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureSchema {
    features: Vec<FeatureSpec>,
    class_domain: BTreeSet<String>,
    weights: Vec<f64>,
}

impl FeatureSchema {
    /// Creates a schema with all weights set to zero.
    pub fn new(features: Vec<FeatureSpec>) -> Result<Self, MblError> {
        if features.is_empty() {
            return Err(MblError::NoFeatures);
        }
        let mut seen = HashSet::new();
        for spec in &features {
            if !seen.insert(spec.name.as_str()) {
                return Err(MblError::DuplicateFeature(spec.name.clone()));
            }
        }
        let weights = vec![0.0; features.len()];
        Ok(FeatureSchema {
            features,
            class_domain: BTreeSet::new(),
            weights,
        })
    }

    pub fn features(&self) -> &[FeatureSpec] {
        &self.features
    }

    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }

    pub fn kind(&self, feature: usize) -> FeatureKind {
        self.features[feature].kind
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.features.iter().map(|f| f.name.as_str())
    }

    pub fn class_domain(&self) -> &BTreeSet<String> {
        &self.class_domain
    }

    pub(crate) fn insert_class(&mut self, class: &str) {
        if !self.class_domain.contains(class) {
            self.class_domain.insert(class.to_string());
        }
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn set_weights(&mut self, weights: Vec<f64>) -> Result<(), MblError> {
        if weights.len() != self.features.len() {
            return Err(MblError::LengthMismatch {
                expected: self.features.len(),
                found: weights.len(),
            });
        }
        if let Some(bad) = weights.iter().find(|w| !(w.is_finite() && **w >= 0.0)) {
            return Err(MblError::InvalidWeight(*bad));
        }
        self.weights = weights;
        Ok(())
    }

    /// Feature indices sorted by descending weight; equal weights keep
    /// their original order.
    pub fn order_by_weight(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.features.len()).collect();
        order.sort_by(|&a, &b| {
            self.weights[b]
                .partial_cmp(&self.weights[a])
                .unwrap_or(Ordering::Equal)
                .then(a.cmp(&b))
        });
        order
    }

    /// Checks that `values` has one entry per feature and that numeric
    /// values sit only in numeric positions.
    pub fn check_values(&self, values: &[FeatureValue]) -> Result<(), MblError> {
        if values.len() != self.features.len() {
            return Err(MblError::LengthMismatch {
                expected: self.features.len(),
                found: values.len(),
            });
        }
        for (spec, value) in self.features.iter().zip(values) {
            match (spec.kind, value) {
                (_, FeatureValue::Missing) => {}
                (FeatureKind::Symbolic, FeatureValue::Symbolic(_)) => {}
                (FeatureKind::Numeric, FeatureValue::Numeric(x)) if x.is_finite() => {}
                (FeatureKind::Numeric, FeatureValue::Numeric(x)) => {
                    return Err(MblError::NonFiniteValue {
                        feature: spec.name.clone(),
                        value: *x,
                    })
                }
                (kind, _) => {
                    return Err(MblError::KindMismatch {
                        feature: spec.name.clone(),
                        expected: kind,
                    })
                }
            }
        }
        Ok(())
    }
}

/// One feature value. `Missing` is the padding value; it only matches
/// itself.
#[derive(Debug, Clone)]
pub enum FeatureValue {
    Missing,
    Symbolic(String),
    Numeric(f64),
}

impl FeatureValue {
    pub fn symbol(s: impl Into<String>) -> Self {
        FeatureValue::Symbolic(s.into())
    }

    pub fn as_numeric(&self) -> Option<f64> {
        match self {
            FeatureValue::Numeric(x) => Some(*x),
            _ => None,
        }
    }

    pub fn is_missing(&self) -> bool {
        matches!(self, FeatureValue::Missing)
    }

    fn rank(&self) -> u8 {
        match self {
            FeatureValue::Missing => 0,
            FeatureValue::Numeric(_) => 1,
            FeatureValue::Symbolic(_) => 2,
        }
    }
}

// -0.0 and 0.0 are the same value.
fn normalized_bits(x: f64) -> u64 {
    if x == 0.0 {
        0
    } else {
        x.to_bits()
    }
}

impl PartialEq for FeatureValue {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (FeatureValue::Missing, FeatureValue::Missing) => true,
            (FeatureValue::Symbolic(a), FeatureValue::Symbolic(b)) => a == b,
            (FeatureValue::Numeric(a), FeatureValue::Numeric(b)) => {
                normalized_bits(*a) == normalized_bits(*b)
            }
            _ => false,
        }
    }
}

impl Eq for FeatureValue {}

impl Hash for FeatureValue {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.rank().hash(state);
        match self {
            FeatureValue::Missing => {}
            FeatureValue::Symbolic(s) => s.hash(state),
            FeatureValue::Numeric(x) => normalized_bits(*x).hash(state),
        }
    }
}

impl PartialOrd for FeatureValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for FeatureValue {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (FeatureValue::Symbolic(a), FeatureValue::Symbolic(b)) => a.cmp(b),
            (FeatureValue::Numeric(a), FeatureValue::Numeric(b)) => {
                let (a, b) = (
                    if *a == 0.0 { 0.0 } else { *a },
                    if *b == 0.0 { 0.0 } else { *b },
                );
                a.total_cmp(&b)
            }
            _ => self.rank().cmp(&other.rank()),
        }
    }
}

impl fmt::Display for FeatureValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FeatureValue::Missing => f.write_str("-"),
            FeatureValue::Symbolic(s) => f.write_str(s),
            FeatureValue::Numeric(x) => write!(f, "{x}"),
        }
    }
}

impl From<&str> for FeatureValue {
    fn from(s: &str) -> Self {
        FeatureValue::Symbolic(s.to_string())
    }
}

impl From<f64> for FeatureValue {
    fn from(x: f64) -> Self {
        FeatureValue::Numeric(x)
    }
}

/// A feature vector with its class label.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub values: Vec<FeatureValue>,
    pub class: String,
}

impl Instance {
    pub fn new(values: Vec<FeatureValue>, class: impl Into<String>) -> Self {
        Instance {
            values,
            class: class.into(),
        }
    }
}
