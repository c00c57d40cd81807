use super::base::InstanceBase;
use super::dictionary::{encode_rows, ValueDictionary};
use super::schema::{FeatureSchema, FeatureValue};
use super::MblError;

#[derive(Debug, Clone, Copy)]
struct TreeNode {
    default_class: u32,
    edges_start: u32,
    edges_len: u32,
}

/// Oblivious decision tree over the features in descending weight order.
///
/// Level `d` of the tree tests `feature_order()[d]` at every node. Each node
/// stores the most frequent class of the training instances that reach it
/// (ties go to the smaller label). A node stops expanding once its
/// instances agree on the class or all features have been tested. Values
/// are matched by identity, numeric features included.
#[derive(Debug, Clone)]
pub struct IgTreeModel {
    schema: FeatureSchema,
    order: Vec<usize>,
    classes: Vec<String>,
    dicts: Vec<ValueDictionary>,
    nodes: Vec<TreeNode>,
    edges: Vec<(u32, u32)>,
}

impl IgTreeModel {
    /// Computes weights on a copy of `base` and builds the tree.
    pub fn train(base: &InstanceBase) -> Result<Self, MblError> {
        let mut base = base.clone();
        base.compute_weights()?;
        Self::from_weighted(&base)
    }

    /// Builds the tree from a base whose schema weights are already set.
    pub fn from_weighted(base: &InstanceBase) -> Result<Self, MblError> {
        if base.is_empty() {
            return Err(MblError::EmptyTrainingData);
        }
        let schema = base.schema().clone();
        let order = schema.order_by_weight();
        let classes: Vec<String> = schema.class_domain().iter().cloned().collect();
        let labels: Vec<u32> = base
            .instances()
            .iter()
            .map(|inst| classes.binary_search(&inst.class).unwrap() as u32)
            .collect();
        let (dicts, rows) = encode_rows(
            schema.len(),
            base.instances().iter().map(|i| i.values.as_slice()),
        );

        let mut builder = TreeBuilder {
            rows: &rows,
            labels: &labels,
            order: &order,
            n_classes: classes.len(),
            nodes: Vec::new(),
            edges: Vec::new(),
        };
        let mut subset: Vec<usize> = (0..rows.len()).collect();
        builder.build(&mut subset, 0);
        let TreeBuilder { nodes, edges, .. } = builder;

        Ok(IgTreeModel {
            schema,
            order,
            classes,
            dicts,
            nodes,
            edges,
        })
    }

    pub fn schema(&self) -> &FeatureSchema {
        &self.schema
    }

    pub fn feature_order(&self) -> &[usize] {
        &self.order
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn root(&self) -> NodeRef<'_> {
        NodeRef {
            model: self,
            id: 0,
            depth: 0,
        }
    }

    pub fn classify(&self, query: &[FeatureValue]) -> Result<&str, MblError> {
        self.schema.check_values(query)?;
        let mut node = self.root();
        loop {
            let Some(feature) = node.tested_feature() else {
                return Ok(node.default_class());
            };
            let child = self.dicts[feature]
                .code(&query[feature])
                .and_then(|code| node.child_by_code(code));
            match child {
                Some(next) => node = next,
                None => return Ok(node.default_class()),
            }
        }
    }

    /// Rebuilds a model from parsed parts. Each entry of `nodes` is
    /// `(depth, value, default class)` in depth-first pre-order; the root
    /// has no value.
    pub(crate) fn from_parts(
        schema: FeatureSchema,
        nodes: Vec<(usize, Option<FeatureValue>, String)>,
    ) -> Result<Self, String> {
        let order = schema.order_by_weight();
        let classes: Vec<String> = schema.class_domain().iter().cloned().collect();
        let mut dicts = vec![ValueDictionary::default(); schema.len()];
        let mut parsed = Vec::with_capacity(nodes.len());
        for (depth, value, class) in nodes {
            let class = classes
                .binary_search(&class)
                .map_err(|_| format!("class {class:?} is not in the class list"))?
                as u32;
            let code = match (depth, value) {
                (0, None) => None,
                (d, Some(v)) if d >= 1 && d <= order.len() => Some(dicts[order[d - 1]].intern(&v)),
                (d, _) => return Err(format!("bad node at depth {d}")),
            };
            parsed.push((depth, code, class));
        }
        if parsed.first().map(|n| n.0) != Some(0) || parsed[1..].iter().any(|n| n.0 == 0) {
            return Err("the tree must have exactly one root, first".to_string());
        }

        let mut model = IgTreeModel {
            schema,
            order,
            classes,
            dicts,
            nodes: Vec::with_capacity(parsed.len()),
            edges: Vec::with_capacity(parsed.len()),
        };
        let mut pos = 0;
        model.assemble(&parsed, &mut pos, 0)?;
        Ok(model)
    }

    fn assemble(
        &mut self,
        parsed: &[(usize, Option<u32>, u32)],
        pos: &mut usize,
        depth: usize,
    ) -> Result<u32, String> {
        let id = self.nodes.len() as u32;
        self.nodes.push(TreeNode {
            default_class: parsed[*pos].2,
            edges_start: 0,
            edges_len: 0,
        });
        *pos += 1;
        let mut children = Vec::new();
        while *pos < parsed.len() && parsed[*pos].0 > depth {
            if parsed[*pos].0 != depth + 1 {
                return Err(format!("node at depth {} skips a level", parsed[*pos].0));
            }
            let code = parsed[*pos].1.expect("non-root nodes carry a value");
            let child = self.assemble(parsed, pos, depth + 1)?;
            children.push((code, child));
        }
        children.sort_unstable();
        if children.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err("duplicate child value".to_string());
        }
        let start = self.edges.len();
        self.edges.extend(children.iter().copied());
        let node = &mut self.nodes[id as usize];
        node.edges_start = start as u32;
        node.edges_len = children.len() as u32;
        Ok(id)
    }
}

/// Read-only view of one tree node.
#[derive(Clone, Copy)]
pub struct NodeRef<'a> {
    model: &'a IgTreeModel,
    id: u32,
    depth: usize,
}

impl<'a> NodeRef<'a> {
    fn node(&self) -> TreeNode {
        self.model.nodes[self.id as usize]
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn default_class(&self) -> &'a str {
        &self.model.classes[self.node().default_class as usize]
    }

    pub fn is_leaf(&self) -> bool {
        self.node().edges_len == 0
    }

    /// The feature this node's children branch on, if it has children.
    pub fn tested_feature(&self) -> Option<usize> {
        if self.is_leaf() {
            None
        } else {
            Some(self.model.order[self.depth])
        }
    }

    /// Children as (feature value, node), ordered by value.
    pub fn children(&self) -> Vec<(&'a FeatureValue, NodeRef<'a>)> {
        let Some(feature) = self.tested_feature() else {
            return Vec::new();
        };
        let mut out: Vec<_> = self
            .edges()
            .iter()
            .map(|&(code, child)| {
                (
                    self.model.dicts[feature].value(code),
                    NodeRef {
                        model: self.model,
                        id: child,
                        depth: self.depth + 1,
                    },
                )
            })
            .collect();
        out.sort_by(|a, b| a.0.cmp(b.0));
        out
    }

    fn edges(&self) -> &'a [(u32, u32)] {
        let n = self.node();
        &self.model.edges[n.edges_start as usize..(n.edges_start + n.edges_len) as usize]
    }

    fn child_by_code(&self, code: u32) -> Option<NodeRef<'a>> {
        let edges = self.edges();
        edges
            .binary_search_by_key(&code, |e| e.0)
            .ok()
            .map(|i| NodeRef {
                model: self.model,
                id: edges[i].1,
                depth: self.depth + 1,
            })
    }
}

struct TreeBuilder<'a> {
    rows: &'a [Vec<u32>],
    labels: &'a [u32],
    order: &'a [usize],
    n_classes: usize,
    nodes: Vec<TreeNode>,
    edges: Vec<(u32, u32)>,
}

impl TreeBuilder<'_> {
    fn build(&mut self, subset: &mut [usize], depth: usize) -> u32 {
        let mut counts = vec![0usize; self.n_classes];
        for &r in subset.iter() {
            counts[self.labels[r] as usize] += 1;
        }
        // Highest count; equal counts resolve to the lower class id.
        let default_class = (0..self.n_classes)
            .max_by(|&a, &b| counts[a].cmp(&counts[b]).then(b.cmp(&a)))
            .unwrap_or(0) as u32;
        let id = self.nodes.len() as u32;
        self.nodes.push(TreeNode {
            default_class,
            edges_start: 0,
            edges_len: 0,
        });
        let homogeneous = counts.iter().filter(|&&c| c > 0).count() <= 1;
        if homogeneous || depth == self.order.len() {
            return id;
        }

        let feature = self.order[depth];
        let rows = self.rows;
        subset.sort_unstable_by_key(|&r| rows[r][feature]);
        let mut groups = Vec::new();
        let mut start = 0;
        while start < subset.len() {
            let code = rows[subset[start]][feature];
            let mut end = start + 1;
            while end < subset.len() && rows[subset[end]][feature] == code {
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
            let child = self.build(&mut subset[range], depth + 1);
            self.edges[edges_start + i].1 = child;
        }
        id
    }
}
