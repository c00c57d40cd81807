use std::collections::BTreeMap;

use rand::distributions::{Distribution, WeightedIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{HeadItem, RelationClass, RelationInstance, RelationPair};

fn is_nominal(item: &HeadItem) -> bool {
    item.pos.starts_with("NN") || item.pos.starts_with("PRP")
}

/// Takes the (pro)noun item directly before each verb as its subject and
/// the one directly after as its object.
pub fn heuristic_baseline(items: &[HeadItem]) -> Vec<RelationPair> {
    let mut pairs = Vec::new();
    for (i, verb) in items.iter().enumerate() {
        if !verb.is_verb() {
            continue;
        }
        let neighbours = [
            (i.checked_sub(1), RelationClass::Subject),
            (Some(i + 1), RelationClass::Object),
        ];
        for (j, class) in neighbours {
            if let Some(item) = j.and_then(|j| items.get(j)) {
                if is_nominal(item) {
                    pairs.push(RelationPair {
                        verb_index: verb.token_index,
                        head_index: item.token_index,
                        class,
                    });
                }
            }
        }
    }
    pairs
}

/// Draws a class for every instance from `distribution` (label to count).
/// Labels other than `S` and `O` produce no relation.
pub fn random_baseline(
    instances: &[RelationInstance],
    distribution: &BTreeMap<String, usize>,
    seed: u64,
) -> Vec<Option<RelationClass>> {
    let labels: Vec<&String> = distribution.keys().collect();
    let Ok(sampler) = WeightedIndex::new(distribution.values()) else {
        return vec![None; instances.len()];
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    instances
        .iter()
        .map(|_| RelationClass::from_label(labels[sampler.sample(&mut rng)]))
        .collect()
}
