//! Subject/object detection between verbs and the heads of other chunks.
//!
//! A chunked sentence is reduced to a sequence of items (one per chunk,
//! represented by its rightmost token, plus every token outside a chunk).
//! Each verb item is paired with nearby candidate items and every pair
//! becomes a 13-feature instance classified as `S`, `O` or `-`.

mod baselines;
mod eval;
mod model;

pub use baselines::{heuristic_baseline, random_baseline};
pub use eval::{classes_from_pairs, evaluate_relations, RelationEvaluation};
pub use model::{pairs_from_classes, RelationMode, RelationModel};

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::chunker::{Chunk, ChunkKind};
use crate::corpus::Sentence;
use crate::mbl::{FeatureSchema, FeatureSpec, FeatureValue, Instance, MblError};

/// Class label for pairs that are neither subject nor object.
pub const NO_RELATION: &str = "-";

/// Feature names of a relation instance, in order.
pub const RELATION_FEATURES: [&str; 13] = [
    "distance",
    "vps_between",
    "commas_between",
    "verb",
    "verb_pos",
    "left2",
    "left2_pos",
    "left1",
    "left1_pos",
    "head",
    "head_pos",
    "right1",
    "right1_pos",
];

/// POS tags that never head a subject or object.
pub const PUNCTUATION_TAGS: [&str; 9] = [".", ",", ":", "``", "''", "-LRB-", "-RRB-", "$", "#"];

#[derive(Debug, Error)]
pub enum RelationError {
    #[error("unknown relation class {0:?}")]
    UnknownClass(String),
    #[error("unanimous mode needs both an IB1-IG and an IGTree model")]
    MissingModel,
    #[error("model features do not match the relation instance layout: found [{0}]")]
    SchemaMismatch(String),
    #[error("sentence {0} has no complete chunk-tag column")]
    MissingChunks(usize),
    #[error(transparent)]
    Model(#[from] MblError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RelationClass {
    Subject,
    Object,
}

impl RelationClass {
    pub const ALL: [RelationClass; 2] = [RelationClass::Subject, RelationClass::Object];

    pub fn as_str(self) -> &'static str {
        match self {
            RelationClass::Subject => "S",
            RelationClass::Object => "O",
        }
    }

    /// Maps a classifier label to a relation; `-` and anything else is none.
    pub fn from_label(label: &str) -> Option<Self> {
        label.parse().ok()
    }
}

impl fmt::Display for RelationClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RelationClass {
    type Err = RelationError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "S" => Ok(RelationClass::Subject),
            "O" => Ok(RelationClass::Object),
            _ => Err(RelationError::UnknownClass(s.to_string())),
        }
    }
}

/// A verb and the head of one of its dependents, by token index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RelationPair {
    pub verb_index: usize,
    pub head_index: usize,
    pub class: RelationClass,
}

/// Which relations a model is trained and evaluated on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RelationTarget {
    #[default]
    Both,
    Subject,
    Object,
}

impl RelationTarget {
    pub fn keeps(self, class: RelationClass) -> bool {
        match self {
            RelationTarget::Both => true,
            RelationTarget::Subject => class == RelationClass::Subject,
            RelationTarget::Object => class == RelationClass::Object,
        }
    }
}

impl FromStr for RelationTarget {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "both" => Ok(RelationTarget::Both),
            "subject" => Ok(RelationTarget::Subject),
            "object" => Ok(RelationTarget::Object),
            _ => Err(format!(
                "unknown relation target {s:?} (expected both, subject or object)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HeadSource {
    NpHead,
    VpHead,
    Token,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HeadItem {
    pub token_index: usize,
    pub word: String,
    pub pos: String,
    pub source: HeadSource,
}

impl HeadItem {
    pub fn is_verb(&self) -> bool {
        self.source == HeadSource::VpHead
    }

    pub fn is_punctuation(&self) -> bool {
        PUNCTUATION_TAGS.contains(&self.pos.as_str())
    }
}

/// One item per chunk (its last token) and one per token outside any
/// chunk, in sentence order.
pub fn reduce_to_heads(sentence: &Sentence, chunks: &[Chunk]) -> Vec<HeadItem> {
    let mut chunk_at: Vec<Option<&Chunk>> = vec![None; sentence.len()];
    for chunk in chunks {
        for slot in &mut chunk_at[chunk.start..=chunk.end.min(sentence.len().saturating_sub(1))] {
            *slot = Some(chunk);
        }
    }
    let mut items = Vec::new();
    for (i, token) in sentence.tokens.iter().enumerate() {
        let source = match chunk_at[i] {
            None => HeadSource::Token,
            Some(c) if c.end != i => continue,
            Some(c) => match c.kind {
                ChunkKind::Np => HeadSource::NpHead,
                ChunkKind::Vp => HeadSource::VpHead,
            },
        };
        items.push(HeadItem {
            token_index: i,
            word: token.word.clone(),
            pos: token.pos.clone(),
            source,
        });
    }
    items
}

/// A verb item and a candidate item, by position in the item sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CandidatePair {
    pub verb_item: usize,
    pub head_item: usize,
}

fn verbs_between(items: &[HeadItem], a: usize, b: usize) -> usize {
    let (lo, hi) = if a < b { (a, b) } else { (b, a) };
    items[lo + 1..hi].iter().filter(|it| it.is_verb()).count()
}

/// Pairs every verb item with each non-verb, non-punctuation item that has
/// at most one other verb item between them. Pairs come verb by verb, in
/// sentence order.
pub fn generate_pairs(items: &[HeadItem]) -> Vec<CandidatePair> {
    let mut pairs = Vec::new();
    for (v, verb) in items.iter().enumerate() {
        if !verb.is_verb() {
            continue;
        }
        for (h, head) in items.iter().enumerate() {
            if h == v || head.is_verb() || head.is_punctuation() {
                continue;
            }
            if verbs_between(items, v, h) <= 1 {
                pairs.push(CandidatePair {
                    verb_item: v,
                    head_item: h,
                });
            }
        }
    }
    pairs
}

/// A classified or to-be-classified verb/candidate pair.
#[derive(Debug, Clone, PartialEq)]
pub struct RelationInstance {
    pub verb_index: usize,
    pub head_index: usize,
    pub values: Vec<FeatureValue>,
    pub class: String,
}

impl RelationInstance {
    pub fn to_instance(&self) -> Instance {
        Instance::new(self.values.clone(), self.class.clone())
    }

    pub fn gold_class(&self) -> Option<RelationClass> {
        RelationClass::from_label(&self.class)
    }
}

pub fn relation_schema() -> FeatureSchema {
    let specs = RELATION_FEATURES
        .iter()
        .enumerate()
        .map(|(i, name)| {
            if i < 3 {
                FeatureSpec::numeric(*name)
            } else {
                FeatureSpec::symbolic(*name)
            }
        })
        .collect();
    FeatureSchema::new(specs).expect("relation feature names are distinct")
}

/// Builds the 13 features for `pair`; the class is looked up in `gold` by
/// verb and head token index, `-` when absent.
pub fn build_relation_instance(
    pair: CandidatePair,
    items: &[HeadItem],
    gold: &[RelationPair],
) -> RelationInstance {
    let (v, h) = (pair.verb_item, pair.head_item);
    let verb = &items[v];
    let head = &items[h];
    let (lo, hi) = if v < h { (v, h) } else { (h, v) };
    let commas = items[lo + 1..hi].iter().filter(|it| it.word == ",").count();
    let item_at = |offset: isize| -> [FeatureValue; 2] {
        let i = h as isize + offset;
        match usize::try_from(i).ok().and_then(|i| items.get(i)) {
            Some(it) => [
                FeatureValue::symbol(it.word.as_str()),
                FeatureValue::symbol(it.pos.as_str()),
            ],
            None => [FeatureValue::Missing, FeatureValue::Missing],
        }
    };
    let mut values = vec![
        FeatureValue::Numeric(h as f64 - v as f64),
        FeatureValue::Numeric(verbs_between(items, v, h) as f64),
        FeatureValue::Numeric(commas as f64),
        FeatureValue::symbol(verb.word.as_str()),
        FeatureValue::symbol(verb.pos.as_str()),
    ];
    for offset in [-2, -1, 0, 1] {
        values.extend(item_at(offset));
    }
    let class = gold
        .iter()
        .find(|p| p.verb_index == verb.token_index && p.head_index == head.token_index)
        .map_or(NO_RELATION, |p| p.class.as_str());
    RelationInstance {
        verb_index: verb.token_index,
        head_index: head.token_index,
        values,
        class: class.to_string(),
    }
}

/// The gold pairs of `sentence` restricted to `target`.
pub fn gold_pairs(sentence: &Sentence, target: RelationTarget) -> Vec<RelationPair> {
    sentence
        .relation_pairs()
        .into_iter()
        .filter(|p| target.keeps(p.class))
        .collect()
}

/// All instances of a sentence under the given chunking, labelled from the
/// sentence's gold relations.
pub fn sentence_instances(
    sentence: &Sentence,
    chunks: &[Chunk],
    target: RelationTarget,
) -> Vec<RelationInstance> {
    let items = reduce_to_heads(sentence, chunks);
    let gold = gold_pairs(sentence, target);
    generate_pairs(&items)
        .into_iter()
        .map(|pair| build_relation_instance(pair, &items, &gold))
        .collect()
}

/// Instances for training, built on the gold chunk-tag column.
pub fn training_instances<'a, I>(
    sentences: I,
    target: RelationTarget,
) -> Result<Vec<RelationInstance>, RelationError>
where
    I: IntoIterator<Item = &'a Sentence>,
{
    let mut out = Vec::new();
    for (s, sentence) in sentences.into_iter().enumerate() {
        let chunks = sentence.chunks().ok_or(RelationError::MissingChunks(s))?;
        out.extend(sentence_instances(sentence, &chunks, target));
    }
    Ok(out)
}
