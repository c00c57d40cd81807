//! A toy grammar that emits chunked, relation-annotated sentences.

use mbsp::chunker::{ChunkKind, ChunkTag};
use mbsp::corpus::{CorpusDocument, GoldRelation, Sentence, Token};
use mbsp::relations::RelationClass;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const DETERMINERS: &[&str] = &["the", "a", "this", "every"];
const ADJECTIVES: &[&str] = &["old", "big", "red", "new", "quiet", "nonexecutive"];
const NOUNS: &[(&str, &str)] = &[
    ("man", "NN"),
    ("board", "NN"),
    ("dog", "NN"),
    ("director", "NN"),
    ("company", "NN"),
    ("sisters", "NNS"),
    ("stocks", "NNS"),
    ("books", "NNS"),
];
const NAMES: &[&str] = &["Pierre", "Vinken", "Mary", "John", "Smith"];
const PRONOUNS: &[&str] = &["he", "she", "they", "it"];
const MODALS: &[&str] = &["will", "can", "may"];
const VERBS: &[(&str, &str)] = &[
    ("saw", "VBD"),
    ("joined", "VBD"),
    ("bought", "VBD"),
    ("sells", "VBZ"),
    ("likes", "VBZ"),
    ("seen", "VBN"),
];
const PREPOSITIONS: &[&str] = &["in", "of", "with", "as"];
const ADVERBS: &[&str] = &["lately", "yesterday", "again"];

struct Builder {
    tokens: Vec<Token>,
    last_chunk_end: Option<(ChunkKind, usize)>,
}

impl Builder {
    fn chunk(&mut self, kind: ChunkKind, words: &[(String, String)]) -> usize {
        let start = self.tokens.len();
        let adjacent_same = self.last_chunk_end == Some((kind, start.wrapping_sub(1)));
        for (i, (w, p)) in words.iter().enumerate() {
            let tag = if i == 0 && adjacent_same {
                ChunkTag::begin(kind)
            } else {
                ChunkTag::inside(kind)
            };
            self.tokens
                .push(Token::new(w.as_str(), p.as_str()).with_tag(tag));
        }
        let head = self.tokens.len() - 1;
        self.last_chunk_end = Some((kind, head));
        head
    }

    fn outside(&mut self, word: &str, pos: &str) {
        self.tokens
            .push(Token::new(word, pos).with_tag(ChunkTag::O));
    }

    fn relate(&mut self, head: usize, verb: usize, class: RelationClass) {
        self.tokens[head].relations.push(GoldRelation {
            verb_index: verb,
            class,
        });
    }
}

fn pick<'a, T>(rng: &mut ChaCha8Rng, items: &'a [T]) -> &'a T {
    items.choose(rng).unwrap()
}

fn noun_phrase(rng: &mut ChaCha8Rng) -> Vec<(String, String)> {
    let pair = |w: &str, p: &str| (w.to_string(), p.to_string());
    match rng.gen_range(0..6) {
        0 => vec![pair(pick(rng, PRONOUNS), "PRP")],
        1 => vec![pair(pick(rng, NAMES), "NNP"), pair(pick(rng, NAMES), "NNP")],
        _ => {
            let mut np = Vec::new();
            if rng.gen_ratio(3, 4) {
                np.push(pair(pick(rng, DETERMINERS), "DT"));
            }
            if rng.gen_ratio(1, 2) {
                np.push(pair(pick(rng, ADJECTIVES), "JJ"));
            }
            let (w, p) = *pick(rng, NOUNS);
            np.push(pair(w, p));
            np
        }
    }
}

fn verb_phrase(rng: &mut ChaCha8Rng) -> Vec<(String, String)> {
    let mut vp = Vec::new();
    if rng.gen_ratio(1, 3) {
        vp.push((pick(rng, MODALS).to_string(), "MD".to_string()));
    }
    if rng.gen_ratio(1, 5) {
        vp.push(("not".to_string(), "RB".to_string()));
    }
    let (w, p) = *pick(rng, VERBS);
    vp.push((w.to_string(), p.to_string()));
    vp
}

fn clause(b: &mut Builder, rng: &mut ChaCha8Rng) {
    let subject = b.chunk(ChunkKind::Np, &noun_phrase(rng));
    let verb = b.chunk(ChunkKind::Vp, &verb_phrase(rng));
    b.relate(subject, verb, RelationClass::Subject);
    if rng.gen_ratio(4, 5) {
        let object = b.chunk(ChunkKind::Np, &noun_phrase(rng));
        b.relate(object, verb, RelationClass::Object);
        if rng.gen_ratio(1, 6) {
            let second = b.chunk(ChunkKind::Np, &noun_phrase(rng));
            b.relate(second, verb, RelationClass::Object);
        }
    }
    if rng.gen_ratio(1, 3) {
        b.outside(pick(rng, PREPOSITIONS), "IN");
        b.chunk(ChunkKind::Np, &noun_phrase(rng));
    }
    if rng.gen_ratio(1, 4) {
        b.outside(pick(rng, ADVERBS), "RB");
    }
}

pub fn sentence(rng: &mut ChaCha8Rng) -> Sentence {
    let mut b = Builder {
        tokens: Vec::new(),
        last_chunk_end: None,
    };
    clause(&mut b, rng);
    if rng.gen_ratio(1, 3) {
        if rng.gen_ratio(1, 2) {
            b.outside(",", ",");
        } else {
            b.outside("and", "CC");
        }
        clause(&mut b, rng);
    }
    b.outside(".", ".");
    Sentence::new(b.tokens)
}

pub fn corpus(seed: u64, sentences: usize) -> CorpusDocument {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    CorpusDocument::new((0..sentences).map(|_| sentence(&mut rng)).collect())
}
