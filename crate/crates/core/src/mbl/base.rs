use std::collections::BTreeMap;

use super::schema::{FeatureKind, FeatureSchema, FeatureValue, Instance};
use super::weights::information_gain;
use super::MblError;

/// Observed bounds of a numeric feature in the training data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NumericRange {
    pub min: f64,
    pub max: f64,
}

impl NumericRange {
    fn include(range: &mut Option<NumericRange>, x: f64) {
        match range {
            Some(r) => {
                r.min = r.min.min(x);
                r.max = r.max.max(x);
            }
            None => *range = Some(NumericRange { min: x, max: x }),
        }
    }

    pub fn span(&self) -> f64 {
        self.max - self.min
    }
}

/// The stored training instances plus the statistics the metric needs.
#[derive(Debug, Clone)]
pub struct InstanceBase {
    schema: FeatureSchema,
    instances: Vec<Instance>,
    class_frequencies: BTreeMap<String, usize>,
    numeric_ranges: Vec<Option<NumericRange>>,
}

impl InstanceBase {
    pub fn new(schema: FeatureSchema) -> Self {
        let numeric_ranges = vec![None; schema.len()];
        InstanceBase {
            schema,
            instances: Vec::new(),
            class_frequencies: BTreeMap::new(),
            numeric_ranges,
        }
    }

    pub fn with_instances(
        schema: FeatureSchema,
        instances: impl IntoIterator<Item = Instance>,
    ) -> Result<Self, MblError> {
        let mut base = InstanceBase::new(schema);
        for instance in instances {
            base.push(instance)?;
        }
        Ok(base)
    }

    pub fn push(&mut self, instance: Instance) -> Result<(), MblError> {
        self.schema.check_values(&instance.values)?;
        for (range, value) in self.numeric_ranges.iter_mut().zip(&instance.values) {
            if let FeatureValue::Numeric(x) = value {
                NumericRange::include(range, *x);
            }
        }
        self.schema.insert_class(&instance.class);
        *self
            .class_frequencies
            .entry(instance.class.clone())
            .or_insert(0) += 1;
        self.instances.push(instance);
        Ok(())
    }

    pub fn schema(&self) -> &FeatureSchema {
        &self.schema
    }

    pub fn instances(&self) -> &[Instance] {
        &self.instances
    }

    pub fn len(&self) -> usize {
        self.instances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instances.is_empty()
    }

    pub fn class_frequencies(&self) -> &BTreeMap<String, usize> {
        &self.class_frequencies
    }

    pub fn numeric_ranges(&self) -> &[Option<NumericRange>] {
        &self.numeric_ranges
    }

    /// Computes information-gain weights and stores them in the schema.
    pub fn compute_weights(&mut self) -> Result<&[f64], MblError> {
        let weights = information_gain(self)?;
        self.schema.set_weights(weights)?;
        Ok(self.schema.weights())
    }

    /// Overrides the schema weights, e.g. with weights computed elsewhere.
    pub fn set_weights(&mut self, weights: Vec<f64>) -> Result<(), MblError> {
        self.schema.set_weights(weights)
    }

    /// Weighted distance between two value vectors under this base's
    /// schema weights and numeric ranges.
    pub fn distance(&self, a: &[FeatureValue], b: &[FeatureValue]) -> Result<f64, MblError> {
        distance(a, b, &self.schema, &self.numeric_ranges)
    }
}

/// Mismatch cost of a single feature, in [0, 1].
///
/// Symbolic values (and `Missing`) cost 0 on identity and 1 otherwise.
/// Two numbers cost their absolute difference scaled by the training range
/// and clipped to 1; a degenerate or unknown range costs 0.
pub fn feature_delta(
    kind: FeatureKind,
    range: Option<NumericRange>,
    a: &FeatureValue,
    b: &FeatureValue,
) -> f64 {
    match (kind, a, b) {
        (FeatureKind::Numeric, FeatureValue::Numeric(x), FeatureValue::Numeric(y)) => match range {
            Some(r) if r.span() > 0.0 => ((x - y).abs() / r.span()).min(1.0),
            _ => 0.0,
        },
        _ => {
            if a == b {
                0.0
            } else {
                1.0
            }
        }
    }
}

/// Weighted overlap distance: the sum over features of weight times
/// mismatch cost.
pub fn distance(
    a: &[FeatureValue],
    b: &[FeatureValue],
    schema: &FeatureSchema,
    ranges: &[Option<NumericRange>],
) -> Result<f64, MblError> {
    schema.check_values(a)?;
    schema.check_values(b)?;
    if ranges.len() != schema.len() {
        return Err(MblError::LengthMismatch {
            expected: schema.len(),
            found: ranges.len(),
        });
    }
    Ok(a.iter()
        .zip(b)
        .enumerate()
        .map(|(f, (x, y))| schema.weights()[f] * feature_delta(schema.kind(f), ranges[f], x, y))
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mbl::FeatureSpec;

    fn sym(s: &str) -> FeatureValue {
        FeatureValue::symbol(s)
    }

    fn two_feature_schema(w: [f64; 2]) -> FeatureSchema {
        let mut schema =
            FeatureSchema::new(vec![FeatureSpec::symbolic("a"), FeatureSpec::symbolic("b")])
                .unwrap();
        schema.set_weights(w.to_vec()).unwrap();
        schema
    }

    #[test]
    fn identical_vectors_are_at_distance_zero() {
        let schema = two_feature_schema([0.39, 0.40]);
        let v = [sym("x"), FeatureValue::Missing];
        assert_eq!(distance(&v, &v, &schema, &[None, None]).unwrap(), 0.0);
    }

    #[test]
    fn single_mismatch_costs_its_weight() {
        let schema = two_feature_schema([0.39, 0.40]);
        let d = distance(
            &[sym("x"), sym("y")],
            &[sym("x"), sym("z")],
            &schema,
            &[None, None],
        )
        .unwrap();
        assert_eq!(d, 0.40);
    }

    #[test]
    fn double_mismatch_sums_weights() {
        let schema = two_feature_schema([0.39, 0.40]);
        let d = distance(
            &[sym("p"), sym("q")],
            &[sym("r"), sym("s")],
            &schema,
            &[None, None],
        )
        .unwrap();
        assert!((d - 0.79).abs() < 1e-12);
    }

    #[test]
    fn missing_only_matches_missing() {
        let schema = two_feature_schema([1.0, 1.0]);
        let d = distance(
            &[FeatureValue::Missing, FeatureValue::Missing],
            &[sym("-"), FeatureValue::Missing],
            &schema,
            &[None, None],
        )
        .unwrap();
        assert_eq!(d, 1.0);
    }

    #[test]
    fn numeric_delta_is_range_scaled_and_clipped() {
        let range = Some(NumericRange {
            min: -2.0,
            max: 2.0,
        });
        let k = FeatureKind::Numeric;
        let d = |a: f64, b: f64| feature_delta(k, range, &a.into(), &b.into());
        assert_eq!(d(-1.0, 1.0), 0.5);
        assert_eq!(d(-2.0, 10.0), 1.0);
        assert_eq!(
            feature_delta(k, range, &1.0.into(), &FeatureValue::Missing),
            1.0
        );
        let flat = Some(NumericRange { min: 3.0, max: 3.0 });
        assert_eq!(feature_delta(k, flat, &3.0.into(), &7.0.into()), 0.0);
    }

    #[test]
    fn length_mismatch_is_an_error() {
        let schema = two_feature_schema([1.0, 1.0]);
        assert!(distance(&[sym("a")], &[sym("a"), sym("b")], &schema, &[None, None]).is_err());
    }

    #[test]
    fn push_tracks_frequencies_and_ranges() {
        let schema =
            FeatureSchema::new(vec![FeatureSpec::numeric("n"), FeatureSpec::symbolic("s")])
                .unwrap();
        let mut base = InstanceBase::new(schema);
        base.push(Instance::new(vec![3.0.into(), sym("a")], "A"))
            .unwrap();
        base.push(Instance::new(vec![(-1.0).into(), sym("b")], "B"))
            .unwrap();
        base.push(Instance::new(vec![FeatureValue::Missing, sym("b")], "B"))
            .unwrap();
        assert_eq!(base.class_frequencies()["B"], 2);
        assert_eq!(
            base.numeric_ranges()[0],
            Some(NumericRange {
                min: -1.0,
                max: 3.0
            })
        );
        assert_eq!(base.numeric_ranges()[1], None);
        assert_eq!(base.schema().class_domain().len(), 2);
    }
}
