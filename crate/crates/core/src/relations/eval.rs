use std::collections::HashMap;

use super::{RelationClass, RelationInstance, RelationPair};
use crate::metrics::{Accuracy, PrfCounts};

/// Instance accuracy and pair counts for subjects and objects.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RelationEvaluation {
    pub accuracy: Accuracy,
    pub subjects: PrfCounts,
    pub objects: PrfCounts,
}

impl RelationEvaluation {
    /// Subjects and objects pooled.
    pub fn together(&self) -> PrfCounts {
        let mut t = self.subjects;
        t += self.objects;
        t
    }

    pub fn class(&self, class: RelationClass) -> PrfCounts {
        match class {
            RelationClass::Subject => self.subjects,
            RelationClass::Object => self.objects,
        }
    }

    fn class_mut(&mut self, class: RelationClass) -> &mut PrfCounts {
        match class {
            RelationClass::Subject => &mut self.subjects,
            RelationClass::Object => &mut self.objects,
        }
    }

    /// Counts pairs. A prediction is correct only if verb, head and class all
    /// match a gold pair; pairs are matched as multisets.
    pub fn add_pairs(&mut self, gold: &[RelationPair], predicted: &[RelationPair]) {
        let mut remaining: HashMap<RelationPair, usize> = HashMap::new();
        for g in gold {
            *remaining.entry(*g).or_insert(0) += 1;
            self.class_mut(g.class).gold += 1;
        }
        for p in predicted {
            let counts = self.class_mut(p.class);
            counts.predicted += 1;
            if let Some(n) = remaining.get_mut(p).filter(|n| **n > 0) {
                *n -= 1;
                counts.correct += 1;
            }
        }
    }

    /// Scores per-instance class decisions (including `-`).
    pub fn add_instances(
        &mut self,
        instances: &[RelationInstance],
        predicted: &[Option<RelationClass>],
    ) {
        for (inst, p) in instances.iter().zip(predicted) {
            self.accuracy.record(inst.gold_class() == *p);
        }
    }

    pub fn merge(&mut self, other: &RelationEvaluation) {
        self.accuracy += other.accuracy;
        self.subjects += other.subjects;
        self.objects += other.objects;
    }
}

/// Reads per-instance decisions back off a set of predicted pairs.
pub fn classes_from_pairs(
    instances: &[RelationInstance],
    pairs: &[RelationPair],
) -> Vec<Option<RelationClass>> {
    instances
        .iter()
        .map(|inst| {
            pairs
                .iter()
                .find(|p| p.verb_index == inst.verb_index && p.head_index == inst.head_index)
                .map(|p| p.class)
        })
        .collect()
}

/// Pair-level precision and recall; accuracy is left empty since it needs
/// the instances.
pub fn evaluate_relations(gold: &[RelationPair], predicted: &[RelationPair]) -> RelationEvaluation {
    let mut eval = RelationEvaluation::default();
    eval.add_pairs(gold, predicted);
    eval
}
