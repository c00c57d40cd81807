use std::collections::{BTreeMap, HashSet};

use super::{decode_tags_to_chunks, ChunkError, ChunkKind, ChunkTag};
use crate::corpus::Sentence;
use crate::metrics::{Accuracy, PrfCounts};

/// Tag accuracy plus chunk counts per kind.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ChunkEvaluation {
    pub accuracy: Accuracy,
    pub per_kind: BTreeMap<ChunkKind, PrfCounts>,
}

impl ChunkEvaluation {
    pub fn overall(&self) -> PrfCounts {
        let mut total = PrfCounts::default();
        for counts in self.per_kind.values() {
            total += *counts;
        }
        total
    }

    pub fn kind(&self, kind: ChunkKind) -> PrfCounts {
        self.per_kind.get(&kind).copied().unwrap_or_default()
    }

    /// Scores one sentence. A predicted chunk is correct when a gold chunk
    /// has the same kind, start and end.
    pub fn add_sentence(
        &mut self,
        gold: &[ChunkTag],
        predicted: &[ChunkTag],
    ) -> Result<(), ChunkError> {
        if gold.len() != predicted.len() {
            return Err(ChunkError::CountMismatch {
                what: "token",
                gold: gold.len(),
                predicted: predicted.len(),
            });
        }
        for (g, p) in gold.iter().zip(predicted) {
            self.accuracy.record(g == p);
        }
        for kind in ChunkKind::ALL {
            self.per_kind.entry(kind).or_default();
        }
        let gold_chunks: HashSet<_> = decode_tags_to_chunks(gold).into_iter().collect();
        for chunk in &gold_chunks {
            self.per_kind.entry(chunk.kind).or_default().gold += 1;
        }
        for chunk in decode_tags_to_chunks(predicted) {
            let counts = self.per_kind.entry(chunk.kind).or_default();
            counts.predicted += 1;
            if gold_chunks.contains(&chunk) {
                counts.correct += 1;
            }
        }
        Ok(())
    }

    pub fn merge(&mut self, other: &ChunkEvaluation) {
        self.accuracy += other.accuracy;
        for (kind, counts) in &other.per_kind {
            *self.per_kind.entry(*kind).or_default() += *counts;
        }
    }
}

pub fn evaluate_tag_sequences(
    gold: &[Vec<ChunkTag>],
    predicted: &[Vec<ChunkTag>],
) -> Result<ChunkEvaluation, ChunkError> {
    if gold.len() != predicted.len() {
        return Err(ChunkError::CountMismatch {
            what: "sentence",
            gold: gold.len(),
            predicted: predicted.len(),
        });
    }
    let mut eval = ChunkEvaluation::default();
    for (g, p) in gold.iter().zip(predicted) {
        eval.add_sentence(g, p)?;
    }
    Ok(eval)
}

/// Compares the chunk-tag columns of two parallel corpora.
pub fn evaluate_chunks(
    gold: &[Sentence],
    predicted: &[Sentence],
) -> Result<ChunkEvaluation, ChunkError> {
    if gold.len() != predicted.len() {
        return Err(ChunkError::CountMismatch {
            what: "sentence",
            gold: gold.len(),
            predicted: predicted.len(),
        });
    }
    let tags = |side: &[Sentence]| -> Result<Vec<Vec<ChunkTag>>, ChunkError> {
        side.iter()
            .enumerate()
            .map(|(s, sentence)| {
                sentence.tags().ok_or_else(|| ChunkError::MissingTag {
                    sentence: s,
                    token: sentence
                        .tokens
                        .iter()
                        .position(|t| t.chunk_tag.is_none())
                        .unwrap_or(0),
                })
            })
            .collect()
    };
    evaluate_tag_sequences(&tags(gold)?, &tags(predicted)?)
}
