use std::collections::HashMap;

use super::base::InstanceBase;
use super::schema::FeatureValue;
use super::MblError;

/// Shannon entropy in bits of a distribution given as raw counts.
pub fn entropy<I>(counts: I) -> f64
where
    I: IntoIterator<Item = usize>,
    I::IntoIter: Clone,
{
    let counts = counts.into_iter();
    let total: usize = counts.clone().sum();
    if total == 0 {
        return 0.0;
    }
    let total = total as f64;
    counts
        .filter(|&c| c > 0)
        .map(|c| {
            let p = c as f64 / total;
            -p * p.log2()
        })
        .sum()
}

/// Information gain of every feature with respect to the class, in bits.
///
/// Every feature is treated as a set of discrete values here, numeric ones
/// included.
pub fn information_gain(base: &InstanceBase) -> Result<Vec<f64>, MblError> {
    if base.is_empty() {
        return Err(MblError::EmptyTrainingData);
    }
    let class_ids: HashMap<&str, usize> = base
        .schema()
        .class_domain()
        .iter()
        .enumerate()
        .map(|(i, c)| (c.as_str(), i))
        .collect();
    let n_classes = class_ids.len();
    let total = base.len() as f64;
    let labels: Vec<usize> = base
        .instances()
        .iter()
        .map(|inst| class_ids[inst.class.as_str()])
        .collect();

    let mut prior = vec![0usize; n_classes];
    for &c in &labels {
        prior[c] += 1;
    }
    let prior_entropy = entropy(prior.iter().copied());

    let mut weights = Vec::with_capacity(base.schema().len());
    for f in 0..base.schema().len() {
        let mut by_value: HashMap<&FeatureValue, Vec<usize>> = HashMap::new();
        for (inst, &c) in base.instances().iter().zip(&labels) {
            by_value
                .entry(&inst.values[f])
                .or_insert_with(|| vec![0; n_classes])[c] += 1;
        }
        let conditional: f64 = by_value
            .values()
            .map(|counts| {
                let n: usize = counts.iter().sum();
                n as f64 / total * entropy(counts.iter().copied())
            })
            .sum();
        weights.push((prior_entropy - conditional).max(0.0));
    }
    Ok(weights)
}
