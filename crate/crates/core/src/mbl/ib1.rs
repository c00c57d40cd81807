use std::collections::BTreeMap;

use super::base::{feature_delta, InstanceBase};
use super::dictionary::{encode_rows, ValueDictionary};
use super::schema::{FeatureKind, FeatureSchema, FeatureValue};
use super::MblError;

/// Distances within `TIE_TOLERANCE * sum(weights)` of the minimum count as
/// tied. Scaling with the total weight keeps the nearest set unchanged when
/// all weights are multiplied by a constant.
pub const TIE_TOLERANCE: f64 = 1e-9;

const NO_LEAF: u32 = u32::MAX;

#[derive(Debug, Clone, Copy)]
struct TrieNode {
    edges_start: u32,
    edges_len: u32,
    leaf: u32,
}

/// Result of a nearest-neighbour lookup.
#[derive(Debug, Clone, PartialEq)]
pub struct Ib1Outcome<'a> {
    pub class: &'a str,
    /// Distance of the nearest stored instances.
    pub distance: f64,
    /// Number of stored instances tied at that distance.
    pub neighbor_count: usize,
}

/// IB1-IG: 1-nearest-neighbour classification under the IG-weighted
/// overlap metric.
///
/// The search is exact. Instances are kept in a trie whose levels follow
/// the features in descending weight order, and branches whose partial
/// distance already exceeds the best complete distance are skipped. The
/// class is the majority among all instances tied at the minimum
/// distance; ties go to the globally more frequent class, then to the
/// lexicographically smaller label.
#[derive(Debug, Clone)]
pub struct Ib1Model {
    base: InstanceBase,
    order: Vec<usize>,
    dicts: Vec<ValueDictionary>,
    classes: Vec<String>,
    class_frequency: Vec<usize>,
    nodes: Vec<TrieNode>,
    edges: Vec<(u32, u32)>,
    leaves: Vec<Vec<(u32, u32)>>,
    tolerance: f64,
}

impl Ib1Model {
    /// Computes information-gain weights on `base` and indexes it.
    pub fn train(mut base: InstanceBase) -> Result<Self, MblError> {
        base.compute_weights()?;
        Self::from_weighted(base)
    }

    /// Indexes a base whose schema weights are already set.
    pub fn from_weighted(base: InstanceBase) -> Result<Self, MblError> {
        if base.is_empty() {
            return Err(MblError::EmptyTrainingData);
        }
        let schema = base.schema();
        let order = schema.order_by_weight();
        let classes: Vec<String> = schema.class_domain().iter().cloned().collect();
        let class_frequency = classes
            .iter()
            .map(|c| base.class_frequencies().get(c).copied().unwrap_or(0))
            .collect();
        let labels: Vec<u32> = base
            .instances()
            .iter()
            .map(|inst| classes.binary_search(&inst.class).unwrap() as u32)
            .collect();
        let (dicts, rows) = encode_rows(
            schema.len(),
            base.instances().iter().map(|i| i.values.as_slice()),
        );

        let mut sorted: Vec<usize> = (0..rows.len()).collect();
        sorted.sort_by(|&a, &b| {
            order
                .iter()
                .map(|&f| rows[a][f])
                .cmp(order.iter().map(|&f| rows[b][f]))
        });

        let mut builder = TrieBuilder {
            rows: &rows,
            labels: &labels,
            order: &order,
            nodes: Vec::new(),
            edges: Vec::new(),
            leaves: Vec::new(),
        };
        builder.build(&sorted, 0);
        let TrieBuilder {
            nodes,
            edges,
            leaves,
            ..
        } = builder;

        let tolerance = TIE_TOLERANCE * schema.weights().iter().sum::<f64>();
        Ok(Ib1Model {
            base,
            order,
            dicts,
            classes,
            class_frequency,
            nodes,
            edges,
            leaves,
            tolerance,
        })
    }

    pub fn base(&self) -> &InstanceBase {
        &self.base
    }

    pub fn schema(&self) -> &FeatureSchema {
        self.base.schema()
    }

    pub fn into_base(self) -> InstanceBase {
        self.base
    }

    pub fn classify(&self, query: &[FeatureValue]) -> Result<Ib1Outcome<'_>, MblError> {
        self.schema().check_values(query)?;
        let codes = query
            .iter()
            .zip(&self.dicts)
            .map(|(v, d)| d.code(v))
            .collect();
        let mut search = Search {
            query,
            codes,
            best: f64::INFINITY,
            tolerance: self.tolerance,
            hits: Vec::new(),
        };
        self.descend(0, 0, 0.0, &mut search);

        let limit = search.best + search.tolerance;
        let mut votes = vec![0usize; self.classes.len()];
        for &(d, leaf) in &search.hits {
            if d <= limit {
                for &(class, count) in &self.leaves[leaf as usize] {
                    votes[class as usize] += count as usize;
                }
            }
        }
        let neighbor_count = votes.iter().sum();
        let winner = (0..self.classes.len())
            .max_by(|&a, &b| {
                votes[a]
                    .cmp(&votes[b])
                    .then(self.class_frequency[a].cmp(&self.class_frequency[b]))
                    .then(b.cmp(&a))
            })
            .expect("trained model has at least one class");
        Ok(Ib1Outcome {
            class: &self.classes[winner],
            distance: search.best,
            neighbor_count,
        })
    }

    fn descend(&self, node: u32, depth: usize, partial: f64, search: &mut Search<'_>) {
        let node = self.nodes[node as usize];
        if depth == self.order.len() {
            search.offer(partial, node.leaf);
            return;
        }
        let edges =
            &self.edges[node.edges_start as usize..(node.edges_start + node.edges_len) as usize];
        let feature = self.order[depth];
        let weight = self.schema().weights()[feature];
        match self.schema().kind(feature) {
            FeatureKind::Symbolic => {
                let matched = search.codes[feature]
                    .and_then(|code| edges.binary_search_by_key(&code, |e| e.0).ok());
                if let Some(i) = matched {
                    self.descend(edges[i].1, depth + 1, partial, search);
                }
                let mismatch = partial + weight;
                for (i, &(_, child)) in edges.iter().enumerate() {
                    if !search.admits(mismatch) {
                        break;
                    }
                    if Some(i) != matched {
                        self.descend(child, depth + 1, mismatch, search);
                    }
                }
            }
            FeatureKind::Numeric => {
                let range = self.base.numeric_ranges()[feature];
                let q = &search.query[feature];
                let mut costs: Vec<(f64, u32)> = edges
                    .iter()
                    .map(|&(code, child)| {
                        let v = self.dicts[feature].value(code);
                        (
                            partial + weight * feature_delta(FeatureKind::Numeric, range, q, v),
                            child,
                        )
                    })
                    .collect();
                costs.sort_by(|a, b| a.0.total_cmp(&b.0));
                for (cost, child) in costs {
                    if !search.admits(cost) {
                        break;
                    }
                    self.descend(child, depth + 1, cost, search);
                }
            }
        }
    }
}

struct Search<'q> {
    query: &'q [FeatureValue],
    codes: Vec<Option<u32>>,
    best: f64,
    tolerance: f64,
    hits: Vec<(f64, u32)>,
}

impl Search<'_> {
    fn admits(&self, d: f64) -> bool {
        d <= self.best + self.tolerance
    }

    fn offer(&mut self, d: f64, leaf: u32) {
        if d < self.best {
            self.best = d;
            let limit = d + self.tolerance;
            self.hits.retain(|h| h.0 <= limit);
        }
        if self.admits(d) {
            self.hits.push((d, leaf));
        }
    }
}

struct TrieBuilder<'a> {
    rows: &'a [Vec<u32>],
    labels: &'a [u32],
    order: &'a [usize],
    nodes: Vec<TrieNode>,
    edges: Vec<(u32, u32)>,
    leaves: Vec<Vec<(u32, u32)>>,
}

impl TrieBuilder<'_> {
    /// `rows` must be sorted by their codes in feature order.
    fn build(&mut self, rows: &[usize], depth: usize) -> u32 {
        let id = self.nodes.len() as u32;
        self.nodes.push(TrieNode {
            edges_start: 0,
            edges_len: 0,
            leaf: NO_LEAF,
        });
        if depth == self.order.len() {
            let mut counts: BTreeMap<u32, u32> = BTreeMap::new();
            for &r in rows {
                *counts.entry(self.labels[r]).or_insert(0) += 1;
            }
            self.nodes[id as usize].leaf = self.leaves.len() as u32;
            self.leaves.push(counts.into_iter().collect());
            return id;
        }
        let feature = self.order[depth];
        let mut groups = Vec::new();
        let mut start = 0;
        while start < rows.len() {
            let code = self.rows[rows[start]][feature];
            let mut end = start + 1;
            while end < rows.len() && self.rows[rows[end]][feature] == code {
                end += 1;
            }
            groups.push((code, start..end));
            start = end;
        }
        let edges_start = self.edges.len();
        self.edges.extend(groups.iter().map(|(code, _)| (*code, 0)));
        self.nodes[id as usize].edges_start = edges_start as u32;
        self.nodes[id as usize].edges_len = groups.len() as u32;
        for (i, (_, range)) in groups.into_iter().enumerate() {
            let child = self.build(&rows[range], depth + 1);
            self.edges[edges_start + i].1 = child;
        }
        id
    }
}
