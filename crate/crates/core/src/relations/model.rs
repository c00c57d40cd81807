use std::fmt;
use std::str::FromStr;

use super::{
    relation_schema, sentence_instances, RelationClass, RelationError, RelationInstance,
    RelationPair, RelationTarget, RELATION_FEATURES,
};
use crate::chunker::Chunk;
use crate::corpus::Sentence;
use crate::mbl::{
    Algorithm, Classifier, FeatureSchema, FeatureValue, Ib1Model, IgTreeModel, InstanceBase,
};

/// How instances are classified.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RelationMode {
    Ib1Ig,
    IgTree,
    /// A relation is predicted only when IB1-IG and IGTree agree on it.
    Unanimous,
}

impl RelationMode {
    pub fn as_str(self) -> &'static str {
        match self {
            RelationMode::Ib1Ig => "ib1ig",
            RelationMode::IgTree => "igtree",
            RelationMode::Unanimous => "unanimous",
        }
    }
}

impl fmt::Display for RelationMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl From<Algorithm> for RelationMode {
    fn from(a: Algorithm) -> Self {
        match a {
            Algorithm::Ib1Ig => RelationMode::Ib1Ig,
            Algorithm::IgTree => RelationMode::IgTree,
        }
    }
}

impl FromStr for RelationMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.eq_ignore_ascii_case("unanimous") {
            return Ok(RelationMode::Unanimous);
        }
        s.parse::<Algorithm>()
            .map(RelationMode::from)
            .map_err(|_| format!("unknown algorithm {s:?} (expected ib1ig, igtree or unanimous)"))
    }
}

/// The classifier(s) behind a relation mode.
#[derive(Debug, Clone)]
pub struct RelationModel {
    mode: RelationMode,
    ib1: Option<Ib1Model>,
    igtree: Option<IgTreeModel>,
}

fn check_schema(schema: &FeatureSchema) -> Result<(), RelationError> {
    let names: Vec<&str> = schema.names().collect();
    if names != RELATION_FEATURES {
        return Err(RelationError::SchemaMismatch(names.join(", ")));
    }
    Ok(())
}

impl RelationModel {
    pub fn train(
        instances: &[RelationInstance],
        mode: RelationMode,
    ) -> Result<Self, RelationError> {
        let mut base = InstanceBase::with_instances(
            relation_schema(),
            instances.iter().map(RelationInstance::to_instance),
        )?;
        base.compute_weights()?;
        let igtree = match mode {
            RelationMode::IgTree | RelationMode::Unanimous => {
                Some(IgTreeModel::from_weighted(&base)?)
            }
            RelationMode::Ib1Ig => None,
        };
        let ib1 = match mode {
            RelationMode::Ib1Ig | RelationMode::Unanimous => Some(Ib1Model::from_weighted(base)?),
            RelationMode::IgTree => None,
        };
        Ok(RelationModel { mode, ib1, igtree })
    }

    /// Wraps a loaded classifier. Unanimous mode needs an IB1-IG model, from
    /// whose instance base the IGTree is rebuilt.
    pub fn from_classifier(
        classifier: Classifier,
        mode: RelationMode,
    ) -> Result<Self, RelationError> {
        check_schema(classifier.schema())?;
        let (ib1, igtree) = match (classifier, mode) {
            (Classifier::Ib1(m), RelationMode::Ib1Ig) => (Some(m), None),
            (Classifier::IgTree(m), RelationMode::IgTree) => (None, Some(m)),
            (Classifier::Ib1(m), RelationMode::Unanimous) => {
                let tree = IgTreeModel::from_weighted(m.base())?;
                (Some(m), Some(tree))
            }
            (Classifier::Ib1(m), RelationMode::IgTree) => {
                (None, Some(IgTreeModel::from_weighted(m.base())?))
            }
            (Classifier::IgTree(_), _) => return Err(RelationError::MissingModel),
        };
        Ok(RelationModel { mode, ib1, igtree })
    }

    pub fn from_parts(
        ib1: Option<Ib1Model>,
        igtree: Option<IgTreeModel>,
        mode: RelationMode,
    ) -> Result<Self, RelationError> {
        let ok = match mode {
            RelationMode::Ib1Ig => ib1.is_some(),
            RelationMode::IgTree => igtree.is_some(),
            RelationMode::Unanimous => ib1.is_some() && igtree.is_some(),
        };
        if !ok {
            return Err(RelationError::MissingModel);
        }
        for schema in ib1
            .iter()
            .map(Ib1Model::schema)
            .chain(igtree.iter().map(IgTreeModel::schema))
        {
            check_schema(schema)?;
        }
        Ok(RelationModel { mode, ib1, igtree })
    }

    pub fn mode(&self) -> RelationMode {
        self.mode
    }

    /// The model to save: the IB1-IG model when there is one, since the
    /// tree can be rebuilt from it.
    pub fn primary_classifier(&self) -> Classifier {
        match (&self.ib1, &self.igtree) {
            (Some(m), _) => Classifier::Ib1(m.clone()),
            (None, Some(t)) => Classifier::IgTree(t.clone()),
            (None, None) => unreachable!("a relation model holds at least one classifier"),
        }
    }

    pub fn classify(
        &self,
        values: &[FeatureValue],
    ) -> Result<Option<RelationClass>, RelationError> {
        let ib1 = |m: &Ib1Model| -> Result<Option<RelationClass>, RelationError> {
            Ok(RelationClass::from_label(m.classify(values)?.class))
        };
        let tree = |m: &IgTreeModel| -> Result<Option<RelationClass>, RelationError> {
            Ok(RelationClass::from_label(m.classify(values)?))
        };
        match (self.mode, &self.ib1, &self.igtree) {
            (RelationMode::Ib1Ig, Some(m), _) => ib1(m),
            (RelationMode::IgTree, _, Some(t)) => tree(t),
            (RelationMode::Unanimous, Some(m), Some(t)) => {
                let a = ib1(m)?;
                let b = tree(t)?;
                Ok(if a == b { a } else { None })
            }
            _ => Err(RelationError::MissingModel),
        }
    }

    pub fn classify_all(
        &self,
        instances: &[RelationInstance],
    ) -> Result<Vec<Option<RelationClass>>, RelationError> {
        instances.iter().map(|i| self.classify(&i.values)).collect()
    }

    /// Relations predicted for one sentence under the given chunking.
    pub fn predict_relations(
        &self,
        sentence: &Sentence,
        chunks: &[Chunk],
    ) -> Result<Vec<RelationPair>, RelationError> {
        let instances = sentence_instances(sentence, chunks, RelationTarget::Both);
        let classes = self.classify_all(&instances)?;
        Ok(pairs_from_classes(&instances, &classes))
    }
}

/// The pairs whose predicted class is S or O.
pub fn pairs_from_classes(
    instances: &[RelationInstance],
    classes: &[Option<RelationClass>],
) -> Vec<RelationPair> {
    instances
        .iter()
        .zip(classes)
        .filter_map(|(inst, class)| {
            class.map(|class| RelationPair {
                verb_index: inst.verb_index,
                head_index: inst.head_index,
                class,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::relations::NO_RELATION;

    fn inst(distance: f64, verb: &str, class: &str) -> RelationInstance {
        let mut values = vec![FeatureValue::Numeric(distance), 0.0.into(), 0.0.into()];
        values.extend((0..10).map(|i| FeatureValue::symbol(if i == 0 { verb } else { "x" })));
        RelationInstance {
            verb_index: 0,
            head_index: 1,
            values,
            class: class.to_string(),
        }
    }

    #[test]
    fn unanimous_requires_agreement() {
        let data = vec![
            inst(-1.0, "saw", "S"),
            inst(1.0, "saw", "O"),
            inst(2.0, "saw", NO_RELATION),
        ];
        let model = RelationModel::train(&data, RelationMode::Unanimous).unwrap();
        for d in &data {
            assert_eq!(model.classify(&d.values).unwrap(), d.gold_class());
        }
    }

    #[test]
    fn igtree_model_cannot_serve_unanimous() {
        let data = vec![inst(-1.0, "saw", "S"), inst(1.0, "saw", "O")];
        let model = RelationModel::train(&data, RelationMode::IgTree).unwrap();
        assert!(matches!(
            RelationModel::from_classifier(model.primary_classifier(), RelationMode::Unanimous),
            Err(RelationError::MissingModel)
        ));
        assert!(RelationModel::from_parts(None, None, RelationMode::Ib1Ig).is_err());
    }

    #[test]
    fn ib1_model_rebuilds_the_tree() {
        let data = vec![inst(-1.0, "saw", "S"), inst(1.0, "saw", "O")];
        let model = RelationModel::train(&data, RelationMode::Ib1Ig).unwrap();
        let both =
            RelationModel::from_classifier(model.primary_classifier(), RelationMode::Unanimous)
                .unwrap();
        assert_eq!(
            both.classify(&data[0].values).unwrap(),
            Some(RelationClass::Subject)
        );
    }

    #[test]
    fn mode_names_parse() {
        for mode in [
            RelationMode::Ib1Ig,
            RelationMode::IgTree,
            RelationMode::Unanimous,
        ] {
            assert_eq!(mode.as_str().parse::<RelationMode>().unwrap(), mode);
        }
        assert!("knn".parse::<RelationMode>().is_err());
    }
}
