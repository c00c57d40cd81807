//! Cross-validation runs. Folds are evaluated in parallel and returned in
//! fold order.

use std::collections::BTreeMap;

use anyhow::{anyhow, Result};
use rayon::prelude::*;

use crate::chunker::{
    decode_tags_to_chunks, evaluate_tag_sequences, ChunkEvaluation, Chunker, ChunkerConfig,
};
use crate::corpus::{kfold_split, CorpusDocument, Fold, Sentence};
use crate::relations::{
    classes_from_pairs, gold_pairs, heuristic_baseline, pairs_from_classes, random_baseline,
    reduce_to_heads, sentence_instances, training_instances, RelationEvaluation, RelationMode,
    RelationModel, RelationTarget,
};

/// Whether relation test sentences use their gold chunk tags or tags
/// predicted by a chunker trained on the same fold.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChunkSource {
    Gold,
    Predicted,
}

impl std::str::FromStr for ChunkSource {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "gold" => Ok(ChunkSource::Gold),
            "predicted" => Ok(ChunkSource::Predicted),
            _ => Err(format!(
                "unknown chunk source {s:?} (expected gold or predicted)"
            )),
        }
    }
}

#[derive(Debug, Clone)]
pub struct FoldResult<E> {
    pub test_sentences: usize,
    pub eval: E,
}

fn gold_tags(sentences: &[&Sentence]) -> Result<Vec<Vec<crate::chunker::ChunkTag>>> {
    sentences
        .iter()
        .map(|s| {
            s.tags()
                .ok_or_else(|| anyhow!("a test sentence has no chunk-tag column"))
        })
        .collect()
}

pub fn cv_chunker(
    doc: &CorpusDocument,
    k: usize,
    seed: u64,
    config: ChunkerConfig,
) -> Result<Vec<FoldResult<ChunkEvaluation>>> {
    let folds = kfold_split(doc, k, seed)?;
    folds
        .par_iter()
        .map(|fold| {
            let chunker = Chunker::train(fold.train.iter().copied(), config)?;
            let predicted = chunker.tag_all(&fold.test)?;
            let eval = evaluate_tag_sequences(&gold_tags(&fold.test)?, &predicted)?;
            Ok(FoldResult {
                test_sentences: fold.test.len(),
                eval,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy)]
pub struct RelationCvOptions {
    pub mode: RelationMode,
    pub target: RelationTarget,
    pub chunks: ChunkSource,
    pub chunker: ChunkerConfig,
}

fn test_chunks(
    fold: &Fold<'_>,
    source: ChunkSource,
    chunker: ChunkerConfig,
) -> Result<Vec<Vec<crate::chunker::Chunk>>> {
    match source {
        ChunkSource::Gold => fold
            .test
            .iter()
            .map(|s| {
                s.chunks()
                    .ok_or_else(|| anyhow!("a test sentence has no chunk-tag column"))
            })
            .collect(),
        ChunkSource::Predicted => {
            let model = Chunker::train(fold.train.iter().copied(), chunker)?;
            Ok(model
                .tag_all(&fold.test)?
                .iter()
                .map(|tags| decode_tags_to_chunks(tags))
                .collect())
        }
    }
}

pub fn cv_relations(
    doc: &CorpusDocument,
    k: usize,
    seed: u64,
    options: RelationCvOptions,
) -> Result<Vec<FoldResult<RelationEvaluation>>> {
    let folds = kfold_split(doc, k, seed)?;
    folds
        .par_iter()
        .map(|fold| {
            let train = training_instances(fold.train.iter().copied(), options.target)?;
            let model = RelationModel::train(&train, options.mode)?;
            let chunks = test_chunks(fold, options.chunks, options.chunker)?;
            let mut eval = RelationEvaluation::default();
            for (sentence, chunks) in fold.test.iter().zip(&chunks) {
                let instances = sentence_instances(sentence, chunks, options.target);
                let classes = model.classify_all(&instances)?;
                eval.add_pairs(
                    &gold_pairs(sentence, options.target),
                    &pairs_from_classes(&instances, &classes),
                );
                eval.add_instances(&instances, &classes);
            }
            Ok(FoldResult {
                test_sentences: fold.test.len(),
                eval,
            })
        })
        .collect()
}

/// Random and heuristic relation baselines on gold chunks, per fold.
pub struct BaselineFolds {
    pub random: Vec<FoldResult<RelationEvaluation>>,
    pub heuristic: Vec<FoldResult<RelationEvaluation>>,
}

pub fn cv_relation_baselines(
    doc: &CorpusDocument,
    k: usize,
    seed: u64,
    target: RelationTarget,
) -> Result<BaselineFolds> {
    let folds = kfold_split(doc, k, seed)?;
    let results: Vec<(
        FoldResult<RelationEvaluation>,
        FoldResult<RelationEvaluation>,
    )> = folds
        .par_iter()
        .map(|fold| {
            let mut distribution: BTreeMap<String, usize> = BTreeMap::new();
            for inst in training_instances(fold.train.iter().copied(), target)? {
                *distribution.entry(inst.class).or_insert(0) += 1;
            }
            let mut random = RelationEvaluation::default();
            let mut heuristic = RelationEvaluation::default();
            let mut test_instances = Vec::new();
            let mut spans = Vec::new();
            for sentence in &fold.test {
                let chunks = sentence
                    .chunks()
                    .ok_or_else(|| anyhow!("a test sentence has no chunk-tag column"))?;
                let instances = sentence_instances(sentence, &chunks, target);
                let gold = gold_pairs(sentence, target);
                let guessed: Vec<_> = heuristic_baseline(&reduce_to_heads(sentence, &chunks))
                    .into_iter()
                    .filter(|p| target.keeps(p.class))
                    .collect();
                heuristic.add_pairs(&gold, &guessed);
                heuristic.add_instances(&instances, &classes_from_pairs(&instances, &guessed));
                spans.push((test_instances.len(), instances.len(), gold));
                test_instances.extend(instances);
            }
            let drawn = random_baseline(
                &test_instances,
                &distribution,
                seed.wrapping_add(fold.index as u64),
            );
            for (start, len, gold) in spans {
                let instances = &test_instances[start..start + len];
                let classes = &drawn[start..start + len];
                random.add_pairs(&gold, &pairs_from_classes(instances, classes));
                random.add_instances(instances, classes);
            }
            let n = fold.test.len();
            Ok((
                FoldResult {
                    test_sentences: n,
                    eval: random,
                },
                FoldResult {
                    test_sentences: n,
                    eval: heuristic,
                },
            ))
        })
        .collect::<Result<_>>()?;
    let (random, heuristic) = results.into_iter().unzip();
    Ok(BaselineFolds { random, heuristic })
}

pub fn micro_chunks(folds: &[FoldResult<ChunkEvaluation>]) -> ChunkEvaluation {
    let mut total = ChunkEvaluation::default();
    for f in folds {
        total.merge(&f.eval);
    }
    total
}

pub fn micro_relations(folds: &[FoldResult<RelationEvaluation>]) -> RelationEvaluation {
    let mut total = RelationEvaluation::default();
    for f in folds {
        total.merge(&f.eval);
    }
    total
}
