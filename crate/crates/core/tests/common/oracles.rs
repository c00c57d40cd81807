//! Naive reference implementations. They share no code with the library
//! beyond its value types and are written for clarity, not speed.

use std::collections::{BTreeMap, HashMap};

use mbsp::mbl::{FeatureKind, FeatureSpec, FeatureValue, Instance};

/// A hashable stand-in for a feature value.
fn key(v: &FeatureValue) -> String {
    match v {
        FeatureValue::Missing => "\u{0}missing".to_string(),
        FeatureValue::Symbolic(s) => format!("s:{s}"),
        FeatureValue::Numeric(x) => format!("n:{}", if *x == 0.0 { 0.0 } else { *x }),
    }
}

fn entropy_of(counts: &HashMap<&str, usize>) -> f64 {
    let total: usize = counts.values().sum();
    let mut h = 0.0;
    for &c in counts.values() {
        if c > 0 {
            let p = c as f64 / total as f64;
            h -= p * p.log2();
        }
    }
    h
}

/// H(C) - sum over values v of P(v) H(C | v), in bits, per feature.
pub fn information_gain(n_features: usize, instances: &[Instance]) -> Vec<f64> {
    let mut prior: HashMap<&str, usize> = HashMap::new();
    for inst in instances {
        *prior.entry(inst.class.as_str()).or_default() += 1;
    }
    let h_c = entropy_of(&prior);
    let n = instances.len() as f64;
    (0..n_features)
        .map(|f| {
            let mut by_value: HashMap<String, HashMap<&str, usize>> = HashMap::new();
            for inst in instances {
                *by_value
                    .entry(key(&inst.values[f]))
                    .or_default()
                    .entry(inst.class.as_str())
                    .or_default() += 1;
            }
            let conditional: f64 = by_value
                .values()
                .map(|counts| {
                    let m: usize = counts.values().sum();
                    m as f64 / n * entropy_of(counts)
                })
                .sum();
            (h_c - conditional).max(0.0)
        })
        .collect()
}

fn numeric_ranges(specs: &[FeatureSpec], instances: &[Instance]) -> Vec<Option<(f64, f64)>> {
    (0..specs.len())
        .map(|f| {
            let xs: Vec<f64> = instances
                .iter()
                .filter_map(|i| match i.values[f] {
                    FeatureValue::Numeric(x) => Some(x),
                    _ => None,
                })
                .collect();
            if xs.is_empty() {
                None
            } else {
                let lo = xs.iter().cloned().fold(f64::INFINITY, f64::min);
                let hi = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                Some((lo, hi))
            }
        })
        .collect()
}

pub fn weighted_distance(
    specs: &[FeatureSpec],
    ranges: &[Option<(f64, f64)>],
    weights: &[f64],
    a: &[FeatureValue],
    b: &[FeatureValue],
) -> f64 {
    let mut d = 0.0;
    for f in 0..specs.len() {
        let delta = match (specs[f].kind, &a[f], &b[f]) {
            (FeatureKind::Numeric, FeatureValue::Numeric(x), FeatureValue::Numeric(y)) => {
                match ranges[f] {
                    Some((lo, hi)) if hi > lo => ((x - y).abs() / (hi - lo)).min(1.0),
                    _ => 0.0,
                }
            }
            _ => {
                if key(&a[f]) == key(&b[f]) {
                    0.0
                } else {
                    1.0
                }
            }
        };
        d += weights[f] * delta;
    }
    d
}

/// Picks a class from a multiset of labels: most votes, then higher global
/// frequency, then the smaller label.
fn vote(labels: &[&str], global: &HashMap<&str, usize>) -> String {
    let mut votes: BTreeMap<&str, usize> = BTreeMap::new();
    for l in labels {
        *votes.entry(l).or_default() += 1;
    }
    let mut best: Option<(&str, usize, usize)> = None;
    for (label, v) in votes {
        let g = global[label];
        let better = match best {
            None => true,
            Some((bl, bv, bg)) => {
                v > bv || (v == bv && g > bg) || (v == bv && g == bg && label < bl)
            }
        };
        if better {
            best = Some((label, v, g));
        }
    }
    best.unwrap().0.to_string()
}

/// Relative slack for calling two distances equal.
pub const TIE_SLACK: f64 = 1e-9;

/// Scans every training instance; all instances within the tie slack of the
/// minimum distance vote.
pub fn brute_force_1nn(
    specs: &[FeatureSpec],
    instances: &[Instance],
    query: &[FeatureValue],
) -> (String, f64) {
    let weights = information_gain(specs.len(), instances);
    brute_force_1nn_weighted(specs, instances, &weights, query)
}

pub fn brute_force_1nn_weighted(
    specs: &[FeatureSpec],
    instances: &[Instance],
    weights: &[f64],
    query: &[FeatureValue],
) -> (String, f64) {
    let ranges = numeric_ranges(specs, instances);
    let distances: Vec<f64> = instances
        .iter()
        .map(|i| weighted_distance(specs, &ranges, weights, query, &i.values))
        .collect();
    let min = distances.iter().cloned().fold(f64::INFINITY, f64::min);
    let slack = TIE_SLACK * weights.iter().sum::<f64>();
    let tied: Vec<&str> = instances
        .iter()
        .zip(&distances)
        .filter(|(_, &d)| d <= min + slack)
        .map(|(i, _)| i.class.as_str())
        .collect();
    let mut global: HashMap<&str, usize> = HashMap::new();
    for i in instances {
        *global.entry(i.class.as_str()).or_default() += 1;
    }
    (vote(&tied, &global), min)
}

/// A decision tree built by plain recursion over instance subsets.
pub struct OracleTree {
    default: String,
    children: HashMap<String, OracleTree>,
}

fn majority(instances: &[&Instance]) -> String {
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for i in instances {
        *counts.entry(i.class.as_str()).or_default() += 1;
    }
    // BTreeMap iterates labels in order, so the first maximum is the
    // smallest label among the most frequent.
    let max = *counts.values().max().unwrap();
    counts
        .into_iter()
        .find(|(_, c)| *c == max)
        .unwrap()
        .0
        .to_string()
}

impl OracleTree {
    pub fn build(instances: &[Instance], order: &[usize]) -> OracleTree {
        let all: Vec<&Instance> = instances.iter().collect();
        Self::grow(&all, order, 0)
    }

    fn grow(instances: &[&Instance], order: &[usize], depth: usize) -> OracleTree {
        let default = majority(instances);
        let homogeneous = instances.iter().all(|i| i.class == instances[0].class);
        let mut children = HashMap::new();
        if !homogeneous && depth < order.len() {
            let mut groups: HashMap<String, Vec<&Instance>> = HashMap::new();
            for i in instances {
                groups
                    .entry(key(&i.values[order[depth]]))
                    .or_default()
                    .push(i);
            }
            for (value, group) in groups {
                children.insert(value, Self::grow(&group, order, depth + 1));
            }
        }
        OracleTree { default, children }
    }

    pub fn classify(&self, query: &[FeatureValue], order: &[usize]) -> String {
        let mut node = self;
        for &f in order {
            match node.children.get(&key(&query[f])) {
                Some(child) => node = child,
                None => break,
            }
        }
        node.default.clone()
    }
}
