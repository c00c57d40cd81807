//! Shared test helpers: seeded random datasets, brute-force oracles written
//! independently of the library's learners, and a synthetic corpus.
#![allow(dead_code)]

pub mod oracles;
pub mod synthetic;

use mbsp::mbl::{FeatureSchema, FeatureSpec, FeatureValue, Instance, InstanceBase};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// A small mixed dataset plus some queries.
pub struct Dataset {
    pub specs: Vec<FeatureSpec>,
    pub instances: Vec<Instance>,
    pub queries: Vec<Vec<FeatureValue>>,
}

impl Dataset {
    pub fn base(&self) -> InstanceBase {
        let schema = FeatureSchema::new(self.specs.clone()).unwrap();
        InstanceBase::with_instances(schema, self.instances.clone()).unwrap()
    }
}

fn random_value(rng: &mut ChaCha8Rng, numeric: bool, arity: usize) -> FeatureValue {
    if rng.gen_ratio(1, 12) {
        return FeatureValue::Missing;
    }
    if numeric {
        FeatureValue::Numeric(rng.gen_range(0..arity as i64) as f64 * 0.5)
    } else {
        FeatureValue::symbol(format!("v{}", rng.gen_range(0..arity)))
    }
}

/// Up to `max_instances` instances over 1..=`max_features` features, some
/// numeric, drawn from small value sets so that ties are common.
pub fn random_dataset(
    seed: u64,
    max_instances: usize,
    max_features: usize,
    queries: usize,
) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_features = rng.gen_range(1..=max_features);
    let n_instances = rng.gen_range(1..=max_instances);
    let n_classes = rng.gen_range(1..=4);
    let kinds: Vec<(bool, usize)> = (0..n_features)
        .map(|_| (rng.gen_ratio(1, 3), rng.gen_range(2..=5)))
        .collect();
    let specs = kinds
        .iter()
        .enumerate()
        .map(|(i, &(numeric, _))| {
            if numeric {
                FeatureSpec::numeric(format!("f{i}"))
            } else {
                FeatureSpec::symbolic(format!("f{i}"))
            }
        })
        .collect();
    let row = |rng: &mut ChaCha8Rng| -> Vec<FeatureValue> {
        kinds
            .iter()
            .map(|&(numeric, arity)| random_value(rng, numeric, arity))
            .collect()
    };
    let instances = (0..n_instances)
        .map(|_| {
            let values = row(&mut rng);
            // Tie the class loosely to the first feature so IG is not flat.
            let class = if rng.gen_ratio(2, 3) {
                match &values[0] {
                    FeatureValue::Symbolic(s) => s.len() + s.as_bytes()[s.len() - 1] as usize,
                    FeatureValue::Numeric(x) => (*x * 2.0) as usize,
                    FeatureValue::Missing => 0,
                }
            } else {
                rng.gen_range(0..n_classes)
            } % n_classes;
            Instance::new(values, format!("c{class}"))
        })
        .collect();
    // Queries may use values never seen in training (arity + 1).
    let queries = (0..queries)
        .map(|_| {
            kinds
                .iter()
                .map(|&(numeric, arity)| random_value(&mut rng, numeric, arity + 1))
                .collect()
        })
        .collect();
    Dataset {
        specs,
        instances,
        queries,
    }
}
