//! The token-per-line corpus format and cross-validation splits.
//!
//! ```text
//! WORD POS [CHUNKTAG [RELS]]
//! ```
//!
//! Columns are whitespace-separated and a blank line ends a sentence.
//! `CHUNKTAG` is one of `I_NP B_NP I_VP B_VP O`, or `_` when absent. `RELS`
//! is `_` or a comma-separated list of `CLASS:VERBINDEX` entries such as
//! `S:4`, with 0-based token indices inside the sentence. Files using the
//! CoNLL-2000 `B-NP`/`I-NP`/... chunk tags are accepted too: their NP and VP
//! chunks are re-encoded in the five-tag scheme and all other chunk types
//! become `O`.

use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::chunker::{decode_tags_to_chunks, encode_chunks_to_tags, Chunk, ChunkKind, ChunkTag};
use crate::relations::{RelationClass, RelationPair};

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("cannot read {}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error(transparent)]
    Write(#[from] io::Error),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("cannot write token {0:?}: words and tags must be non-empty and free of whitespace")]
    Unwritable(String),
    #[error("cannot make {k} folds: need k >= 2 and at least k sentences (have {sentences})")]
    FoldCount { k: usize, sentences: usize },
}

/// A gold relation stored on the dependent's head token.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GoldRelation {
    pub verb_index: usize,
    pub class: RelationClass,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub word: String,
    pub pos: String,
    pub chunk_tag: Option<ChunkTag>,
    pub relations: Vec<GoldRelation>,
}

impl Token {
    pub fn new(word: impl Into<String>, pos: impl Into<String>) -> Self {
        Token {
            word: word.into(),
            pos: pos.into(),
            chunk_tag: None,
            relations: Vec::new(),
        }
    }

    pub fn with_tag(mut self, tag: ChunkTag) -> Self {
        self.chunk_tag = Some(tag);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Sentence {
    pub tokens: Vec<Token>,
}

impl Sentence {
    pub fn new(tokens: Vec<Token>) -> Self {
        Sentence { tokens }
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// The chunk tags, if every token has one.
    pub fn tags(&self) -> Option<Vec<ChunkTag>> {
        self.tokens.iter().map(|t| t.chunk_tag).collect()
    }

    pub fn chunks(&self) -> Option<Vec<Chunk>> {
        self.tags().map(|tags| decode_tags_to_chunks(&tags))
    }

    pub fn set_tags(&mut self, tags: &[ChunkTag]) {
        for (token, &tag) in self.tokens.iter_mut().zip(tags) {
            token.chunk_tag = Some(tag);
        }
    }

    pub fn relation_pairs(&self) -> Vec<RelationPair> {
        self.tokens
            .iter()
            .enumerate()
            .flat_map(|(head, t)| {
                t.relations.iter().map(move |r| RelationPair {
                    verb_index: r.verb_index,
                    head_index: head,
                    class: r.class,
                })
            })
            .collect()
    }

    /// Replaces the relation column with `pairs`.
    pub fn set_relation_pairs(&mut self, pairs: &[RelationPair]) {
        for token in &mut self.tokens {
            token.relations.clear();
        }
        for p in pairs {
            self.tokens[p.head_index].relations.push(GoldRelation {
                verb_index: p.verb_index,
                class: p.class,
            });
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CorpusDocument {
    pub sentences: Vec<Sentence>,
    pub source_path: Option<PathBuf>,
}

impl CorpusDocument {
    pub fn new(sentences: Vec<Sentence>) -> Self {
        CorpusDocument {
            sentences,
            source_path: None,
        }
    }

    pub fn token_count(&self) -> usize {
        self.sentences.iter().map(Sentence::len).sum()
    }
}

/// Which columns [`write_corpus`] emits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Columns {
    WordPos,
    Chunks,
    Full,
}

pub fn read_corpus(path: impl AsRef<Path>) -> Result<CorpusDocument, CorpusError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| CorpusError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut doc = parse_corpus(&text)?;
    doc.source_path = Some(path.to_path_buf());
    Ok(doc)
}

enum RawTag {
    Absent,
    Five(ChunkTag),
    Conll { begin: bool, kind: String },
}

struct PendingSentence {
    tokens: Vec<Token>,
    tags: Vec<RawTag>,
    lines: Vec<usize>,
}

pub fn parse_corpus(text: &str) -> Result<CorpusDocument, CorpusError> {
    let mut sentences = Vec::new();
    let mut pending = PendingSentence {
        tokens: Vec::new(),
        tags: Vec::new(),
        lines: Vec::new(),
    };
    for (i, raw) in text.split('\n').enumerate() {
        let line = i + 1;
        let raw = raw.strip_suffix('\r').unwrap_or(raw);
        let cols: Vec<&str> = raw.split_whitespace().collect();
        if cols.is_empty() {
            if !pending.tokens.is_empty() {
                sentences.push(finish_sentence(&mut pending)?);
            }
            continue;
        }
        if cols.len() > 4 || cols.len() < 2 {
            return Err(parse_error(
                line,
                format!("expected 2 to 4 columns, found {}", cols.len()),
            ));
        }
        let mut token = Token::new(cols[0], cols[1]);
        let tag = match cols.get(2) {
            None | Some(&"_") => RawTag::Absent,
            Some(t) => {
                parse_tag(t).ok_or_else(|| parse_error(line, format!("bad chunk tag {t:?}")))?
            }
        };
        if let Some(rels) = cols.get(3) {
            token.relations = parse_relations(rels).map_err(|m| parse_error(line, m))?;
        }
        pending.tokens.push(token);
        pending.tags.push(tag);
        pending.lines.push(line);
    }
    if !pending.tokens.is_empty() {
        sentences.push(finish_sentence(&mut pending)?);
    }
    Ok(CorpusDocument::new(sentences))
}

fn parse_error(line: usize, message: impl Into<String>) -> CorpusError {
    CorpusError::Parse {
        line,
        message: message.into(),
    }
}

fn parse_tag(tag: &str) -> Option<RawTag> {
    if let Ok(t) = tag.parse::<ChunkTag>() {
        return Some(RawTag::Five(t));
    }
    let (prefix, kind) = tag.split_once('-')?;
    let begin = match prefix {
        "B" => true,
        "I" => false,
        _ => return None,
    };
    if kind.is_empty() {
        return None;
    }
    Some(RawTag::Conll {
        begin,
        kind: kind.to_string(),
    })
}

fn parse_relations(field: &str) -> Result<Vec<GoldRelation>, String> {
    if field == "_" {
        return Ok(Vec::new());
    }
    field
        .split(',')
        .map(|entry| {
            let (class, index) = entry
                .split_once(':')
                .ok_or_else(|| format!("bad relation {entry:?}, expected CLASS:VERBINDEX"))?;
            let class = class
                .parse::<RelationClass>()
                .map_err(|_| format!("bad relation class {class:?}"))?;
            let verb_index = index
                .parse::<usize>()
                .map_err(|_| format!("bad verb index {index:?}"))?;
            Ok(GoldRelation { verb_index, class })
        })
        .collect()
}

fn finish_sentence(pending: &mut PendingSentence) -> Result<Sentence, CorpusError> {
    let mut tokens = std::mem::take(&mut pending.tokens);
    let tags = std::mem::take(&mut pending.tags);
    let lines = std::mem::take(&mut pending.lines);
    let len = tokens.len();

    for (token, &line) in tokens.iter().zip(&lines) {
        for rel in &token.relations {
            if rel.verb_index >= len {
                return Err(parse_error(
                    line,
                    format!(
                        "verb index {} out of range for a sentence of {len} tokens",
                        rel.verb_index
                    ),
                ));
            }
        }
    }
    for (i, token) in tokens.iter().enumerate() {
        if token.relations.iter().any(|r| r.verb_index == i) {
            return Err(parse_error(lines[i], "a token cannot be its own verb"));
        }
    }

    let conll = tags.iter().any(|t| matches!(t, RawTag::Conll { .. }));
    if conll {
        if let Some(i) = tags
            .iter()
            .position(|t| matches!(t, RawTag::Five(t) if *t != ChunkTag::O))
        {
            return Err(parse_error(
                lines[i],
                "five-tag chunk tags mixed with CoNLL chunk tags in one sentence",
            ));
        }
        for (token, tag) in tokens.iter_mut().zip(conll_to_five_tag(&tags, lines[0])?) {
            token.chunk_tag = Some(tag);
        }
    } else {
        for (token, tag) in tokens.iter_mut().zip(tags) {
            if let RawTag::Five(t) = tag {
                token.chunk_tag = Some(t);
            }
        }
    }
    Ok(Sentence::new(tokens))
}

fn conll_to_five_tag(tags: &[RawTag], first_line: usize) -> Result<Vec<ChunkTag>, CorpusError> {
    let mut chunks = Vec::new();
    let mut open: Option<(String, usize, usize)> = None;
    let mut close = |open: &mut Option<(String, usize, usize)>| {
        if let Some((kind, start, end)) = open.take() {
            let kind = match kind.as_str() {
                "NP" => Some(ChunkKind::Np),
                "VP" => Some(ChunkKind::Vp),
                _ => None,
            };
            if let Some(kind) = kind {
                chunks.push(Chunk::new(kind, start, end));
            }
        }
    };
    for (i, tag) in tags.iter().enumerate() {
        match tag {
            RawTag::Conll { begin, kind } => match open.as_mut() {
                Some((k, _, end)) if !begin && k == kind => *end = i,
                _ => {
                    close(&mut open);
                    open = Some((kind.clone(), i, i));
                }
            },
            _ => close(&mut open),
        }
    }
    close(&mut open);
    encode_chunks_to_tags(tags.len(), &chunks).map_err(|e| parse_error(first_line, e.to_string()))
}

fn check_field(s: &str) -> Result<(), CorpusError> {
    if s.is_empty() || s.chars().any(char::is_whitespace) {
        Err(CorpusError::Unwritable(s.to_string()))
    } else {
        Ok(())
    }
}

pub fn format_relations(relations: &[GoldRelation]) -> String {
    if relations.is_empty() {
        return "_".to_string();
    }
    relations
        .iter()
        .map(|r| format!("{}:{}", r.class, r.verb_index))
        .collect::<Vec<_>>()
        .join(",")
}

pub fn write_corpus<W: Write + ?Sized>(
    doc: &CorpusDocument,
    out: &mut W,
    columns: Columns,
) -> Result<(), CorpusError> {
    for sentence in &doc.sentences {
        for token in &sentence.tokens {
            check_field(&token.word)?;
            check_field(&token.pos)?;
            write!(out, "{} {}", token.word, token.pos)?;
            if columns != Columns::WordPos {
                let tag = token.chunk_tag.map_or("_", ChunkTag::as_str);
                write!(out, " {tag}")?;
            }
            if columns == Columns::Full {
                write!(out, " {}", format_relations(&token.relations))?;
            }
            writeln!(out)?;
        }
        writeln!(out)?;
    }
    Ok(())
}

pub fn write_corpus_file(
    doc: &CorpusDocument,
    path: impl AsRef<Path>,
    columns: Columns,
) -> Result<(), CorpusError> {
    let path = path.as_ref();
    let file = fs::File::create(path).map_err(|source| CorpusError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut out = BufWriter::new(file);
    write_corpus(doc, &mut out, columns)?;
    out.flush()?;
    Ok(())
}

/// Assignment of sentences to cross-validation folds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoldSpec {
    pub k: usize,
    pub seed: u64,
    assignment: Vec<usize>,
}

impl FoldSpec {
    /// Shuffles sentence indices with a seeded ChaCha8 generator and deals
    /// them round-robin into `k` folds, so fold sizes differ by at most one.
    pub fn new(sentences: usize, k: usize, seed: u64) -> Result<Self, CorpusError> {
        if k < 2 || k > sentences {
            return Err(CorpusError::FoldCount { k, sentences });
        }
        let mut order: Vec<usize> = (0..sentences).collect();
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let mut assignment = vec![0; sentences];
        for (pos, &sentence) in order.iter().enumerate() {
            assignment[sentence] = pos % k;
        }
        Ok(FoldSpec {
            k,
            seed,
            assignment,
        })
    }

    pub fn fold_of(&self, sentence: usize) -> usize {
        self.assignment[sentence]
    }

    /// Sentence indices of fold `fold`, in corpus order.
    pub fn test_indices(&self, fold: usize) -> Vec<usize> {
        (0..self.assignment.len())
            .filter(|&s| self.assignment[s] == fold)
            .collect()
    }

    pub fn train_indices(&self, fold: usize) -> Vec<usize> {
        (0..self.assignment.len())
            .filter(|&s| self.assignment[s] != fold)
            .collect()
    }
}

/// One train/test view of a document.
#[derive(Debug, Clone)]
pub struct Fold<'a> {
    pub index: usize,
    pub train: Vec<&'a Sentence>,
    pub test: Vec<&'a Sentence>,
}

pub fn kfold_split(
    doc: &CorpusDocument,
    k: usize,
    seed: u64,
) -> Result<Vec<Fold<'_>>, CorpusError> {
    let spec = FoldSpec::new(doc.sentences.len(), k, seed)?;
    Ok((0..k)
        .map(|fold| Fold {
            index: fold,
            train: spec
                .train_indices(fold)
                .into_iter()
                .map(|i| &doc.sentences[i])
                .collect(),
            test: spec
                .test_indices(fold)
                .into_iter()
                .map(|i| &doc.sentences[i])
                .collect(),
        })
        .collect())
}
