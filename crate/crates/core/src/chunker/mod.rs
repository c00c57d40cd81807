//! BaseNP/baseVP chunking as per-token tagging.
//!
//! Each token becomes one instance whose features are the words and/or POS
//! tags in a window around it; a memory-based classifier predicts its
//! five-tag IOB label and the label sequence is decoded back into chunks.

mod eval;
mod tags;

pub use eval::{evaluate_chunks, evaluate_tag_sequences, ChunkEvaluation};
pub use tags::{decode_tags_to_chunks, encode_chunks_to_tags, Chunk, ChunkKind, ChunkTag};

use rayon::prelude::*;
use thiserror::Error;

use crate::corpus::Sentence;
use crate::mbl::{
    Algorithm, Classifier, FeatureSchema, FeatureSpec, FeatureValue, Instance, InstanceBase,
    MblError,
};

#[derive(Debug, Error)]
pub enum ChunkError {
    #[error("unknown chunk tag {0:?}")]
    UnknownTag(String),
    #[error("chunks {0:?} and {1:?} overlap")]
    Overlap(Chunk, Chunk),
    #[error("chunk {chunk:?} lies outside a sentence of {len} tokens")]
    ChunkOutOfRange { chunk: Chunk, len: usize },
    #[error("token {token} of sentence {sentence} has no chunk tag")]
    MissingTag { sentence: usize, token: usize },
    #[error("{what} count mismatch: gold has {gold}, prediction has {predicted}")]
    CountMismatch {
        what: &'static str,
        gold: usize,
        predicted: usize,
    },
    #[error("model features do not match the chunker configuration: expected [{expected}], model has [{found}]")]
    SchemaMismatch { expected: String, found: String },
    #[error("invalid chunker configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Model(#[from] MblError),
}

/// Window shape and feature set for the chunker.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ChunkerConfig {
    pub left_context: usize,
    pub right_context: usize,
    pub use_words: bool,
    pub use_pos: bool,
    pub algorithm: Algorithm,
}

impl Default for ChunkerConfig {
    /// Words and POS of two tokens left, the focus, and one token right.
    fn default() -> Self {
        ChunkerConfig {
            left_context: 2,
            right_context: 1,
            use_words: true,
            use_pos: true,
            algorithm: Algorithm::Ib1Ig,
        }
    }
}

impl ChunkerConfig {
    /// Five tokens left and three right.
    pub fn wide() -> Self {
        ChunkerConfig {
            left_context: 5,
            right_context: 3,
            ..Self::default()
        }
    }

    /// Focus POS tag only.
    pub fn pos_baseline(algorithm: Algorithm) -> Self {
        ChunkerConfig {
            left_context: 0,
            right_context: 0,
            use_words: false,
            use_pos: true,
            algorithm,
        }
    }

    /// Focus word only.
    pub fn word_baseline(algorithm: Algorithm) -> Self {
        ChunkerConfig {
            use_words: true,
            use_pos: false,
            ..Self::pos_baseline(algorithm)
        }
    }

    pub fn validate(&self) -> Result<(), ChunkError> {
        if !(self.use_words || self.use_pos) {
            return Err(ChunkError::InvalidConfig(
                "at least one of words and POS must be used".to_string(),
            ));
        }
        Ok(())
    }

    fn offsets(&self) -> impl Iterator<Item = isize> + Clone {
        -(self.left_context as isize)..=self.right_context as isize
    }

    pub fn feature_names(&self) -> Vec<String> {
        let mut names = Vec::new();
        if self.use_words {
            names.extend(self.offsets().map(|o| format!("word[{o:+}]")));
        }
        if self.use_pos {
            names.extend(self.offsets().map(|o| format!("pos[{o:+}]")));
        }
        names
    }

    pub fn schema(&self) -> Result<FeatureSchema, ChunkError> {
        self.validate()?;
        Ok(FeatureSchema::new(
            self.feature_names()
                .into_iter()
                .map(FeatureSpec::symbolic)
                .collect(),
        )?)
    }
}

/// Feature values for the token at `focus`; positions outside the sentence
/// are `Missing`.
pub fn window_features(
    sentence: &Sentence,
    focus: usize,
    config: &ChunkerConfig,
) -> Vec<FeatureValue> {
    let at = |offset: isize| {
        let i = focus as isize + offset;
        if i < 0 {
            None
        } else {
            sentence.tokens.get(i as usize)
        }
    };
    let mut values = Vec::with_capacity(config.feature_names().len());
    if config.use_words {
        values.extend(config.offsets().map(|o| {
            at(o).map_or(FeatureValue::Missing, |t| {
                FeatureValue::symbol(t.word.as_str())
            })
        }));
    }
    if config.use_pos {
        values.extend(config.offsets().map(|o| {
            at(o).map_or(FeatureValue::Missing, |t| {
                FeatureValue::symbol(t.pos.as_str())
            })
        }));
    }
    values
}

/// One training instance per token, labelled with its gold chunk tag.
pub fn make_window_instances(
    sentence: &Sentence,
    config: &ChunkerConfig,
) -> Result<Vec<Instance>, ChunkError> {
    (0..sentence.len())
        .map(|i| {
            let tag = sentence.tokens[i].chunk_tag.ok_or(ChunkError::MissingTag {
                sentence: 0,
                token: i,
            })?;
            Ok(Instance::new(
                window_features(sentence, i, config),
                tag.as_str(),
            ))
        })
        .collect()
}

/// A sentence's predicted tags and the chunks they decode to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChunkedSentence {
    pub tags: Vec<ChunkTag>,
    pub chunks: Vec<Chunk>,
}

/// A trained chunker: a classifier plus the window configuration it was
/// trained with.
#[derive(Debug, Clone)]
pub struct Chunker {
    config: ChunkerConfig,
    classifier: Classifier,
}

impl Chunker {
    pub fn train<'a, I>(sentences: I, config: ChunkerConfig) -> Result<Self, ChunkError>
    where
        I: IntoIterator<Item = &'a Sentence>,
    {
        let mut base = InstanceBase::new(config.schema()?);
        for (s, sentence) in sentences.into_iter().enumerate() {
            let instances = make_window_instances(sentence, &config).map_err(|e| match e {
                ChunkError::MissingTag { token, .. } => {
                    ChunkError::MissingTag { sentence: s, token }
                }
                other => other,
            })?;
            for instance in instances {
                base.push(instance)?;
            }
        }
        let classifier = Classifier::train(base, config.algorithm)?;
        Ok(Chunker { config, classifier })
    }

    /// Wraps a loaded classifier, checking that its features are the ones
    /// `config` produces.
    pub fn from_classifier(
        classifier: Classifier,
        config: ChunkerConfig,
    ) -> Result<Self, ChunkError> {
        let expected = config.feature_names();
        let found: Vec<&str> = classifier.schema().names().collect();
        if expected != found {
            return Err(ChunkError::SchemaMismatch {
                expected: expected.join(", "),
                found: found.join(", "),
            });
        }
        if let Some(bad) = classifier
            .schema()
            .class_domain()
            .iter()
            .find(|c| c.parse::<ChunkTag>().is_err())
        {
            return Err(ChunkError::UnknownTag(bad.clone()));
        }
        let config = ChunkerConfig {
            algorithm: classifier.algorithm(),
            ..config
        };
        Ok(Chunker { config, classifier })
    }

    pub fn config(&self) -> &ChunkerConfig {
        &self.config
    }

    pub fn classifier(&self) -> &Classifier {
        &self.classifier
    }

    pub fn into_classifier(self) -> Classifier {
        self.classifier
    }

    /// Tags each token independently from its window.
    pub fn tag(&self, sentence: &Sentence) -> Result<Vec<ChunkTag>, ChunkError> {
        (0..sentence.len())
            .map(|i| {
                let class =
                    self.classifier
                        .classify(&window_features(sentence, i, &self.config))?;
                class.parse()
            })
            .collect()
    }

    pub fn chunk_sentence(&self, sentence: &Sentence) -> Result<ChunkedSentence, ChunkError> {
        let tags = self.tag(sentence)?;
        let chunks = decode_tags_to_chunks(&tags);
        Ok(ChunkedSentence { tags, chunks })
    }

    /// Tags many sentences in parallel; output order follows input order.
    pub fn tag_all(&self, sentences: &[&Sentence]) -> Result<Vec<Vec<ChunkTag>>, ChunkError> {
        sentences.par_iter().map(|s| self.tag(s)).collect()
    }
}
