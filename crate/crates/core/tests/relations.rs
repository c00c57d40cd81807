mod common;

use std::collections::BTreeMap;

use mbsp::corpus::{read_corpus, Sentence};
use mbsp::mbl::FeatureValue;
use mbsp::relations::{
    evaluate_relations, generate_pairs, gold_pairs, heuristic_baseline, random_baseline,
    reduce_to_heads, sentence_instances, training_instances, RelationClass, RelationEvaluation,
    RelationMode, RelationModel, RelationPair, RelationTarget,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn sisters() -> Sentence {
    let path = format!("{}/tests/fixtures/sisters.txt", env!("CARGO_MANIFEST_DIR"));
    read_corpus(path).unwrap().sentences.remove(0)
}

fn row(values: &[FeatureValue]) -> Vec<String> {
    values
        .iter()
        .map(|v| match v {
            FeatureValue::Numeric(x) => format!("{x}"),
            other => other.to_string(),
        })
        .collect()
}

#[test]
fn example_sentence_yields_three_instances() {
    let s = sisters();
    let instances = sentence_instances(&s, &s.chunks().unwrap(), RelationTarget::Both);
    let rows: Vec<(Vec<String>, &str)> = instances
        .iter()
        .map(|i| (row(&i.values), i.class.as_str()))
        .collect();
    let expect = |fields: &str, class| {
        (
            fields.split(' ').map(String::from).collect::<Vec<_>>(),
            class,
        )
    };
    assert_eq!(
        rows,
        vec![
            expect("-1 0 0 seen VBN - - - - sisters NNS seen VBN", "S"),
            expect("1 0 0 seen VBN sisters NNS seen VBN man NN lately RB", "O"),
            expect("2 0 0 seen VBN seen VBN man NN lately RB . .", "-"),
        ]
    );
}

#[test]
fn example_sentence_reduces_to_five_items() {
    let s = sisters();
    let items = reduce_to_heads(&s, &s.chunks().unwrap());
    let words: Vec<&str> = items.iter().map(|i| i.word.as_str()).collect();
    assert_eq!(words, ["sisters", "seen", "man", "lately", "."]);
    assert_eq!(items.len(), 3 + 2);
    let candidates: Vec<&str> = generate_pairs(&items)
        .iter()
        .map(|p| items[p.head_item].word.as_str())
        .collect();
    assert_eq!(candidates, ["sisters", "man", "lately"]);
}

#[test]
fn heuristic_finds_subject_and_object_in_the_example() {
    let s = sisters();
    let items = reduce_to_heads(&s, &s.chunks().unwrap());
    let pairs = heuristic_baseline(&items);
    assert_eq!(
        pairs,
        vec![
            RelationPair {
                verb_index: 4,
                head_index: 1,
                class: RelationClass::Subject
            },
            RelationPair {
                verb_index: 4,
                head_index: 7,
                class: RelationClass::Object
            },
        ]
    );
    assert_eq!(
        evaluate_relations(&s.relation_pairs(), &pairs)
            .together()
            .f_score(1.0),
        1.0
    );
}

#[test]
fn instances_respect_the_filter_and_sign_convention() {
    let doc = common::synthetic::corpus(8, 300);
    for s in &doc.sentences {
        let items = reduce_to_heads(s, &s.chunks().unwrap());
        for pair in generate_pairs(&items) {
            let inst = mbsp::relations::build_relation_instance(pair, &items, &[]);
            let f1 = inst.values[0].as_numeric().unwrap();
            let f2 = inst.values[1].as_numeric().unwrap();
            assert_ne!(f1, 0.0);
            assert_eq!(f1 < 0.0, pair.head_item < pair.verb_item);
            assert_eq!(f1.abs() as usize, pair.head_item.abs_diff(pair.verb_item));
            assert!(f2 == 0.0 || f2 == 1.0);
            assert_eq!(
                inst,
                mbsp::relations::build_relation_instance(pair, &items, &[])
            );
        }
    }
}

#[test]
fn trained_models_recover_toy_relations() {
    let train = common::synthetic::corpus(31, 400);
    let test = common::synthetic::corpus(32, 100);
    let instances = training_instances(&train.sentences, RelationTarget::Both).unwrap();
    for mode in [
        RelationMode::Ib1Ig,
        RelationMode::IgTree,
        RelationMode::Unanimous,
    ] {
        let model = RelationModel::train(&instances, mode).unwrap();
        let mut eval = RelationEvaluation::default();
        for s in &test.sentences {
            let predicted = model.predict_relations(s, &s.chunks().unwrap()).unwrap();
            eval.add_pairs(&s.relation_pairs(), &predicted);
        }
        assert!(
            eval.together().f_score(1.0) > 0.9,
            "{mode}: {:?}",
            eval.together()
        );
    }
}

#[test]
fn random_baseline_tracks_the_class_distribution() {
    // Draws are independent of gold, so a drawn S is right with probability
    // p(S); precision over S and O together is (pS^2 + pO^2) / (pS + pO).
    let doc = common::synthetic::corpus(41, 2000);
    let instances = training_instances(&doc.sentences, RelationTarget::Both).unwrap();
    let mut distribution = BTreeMap::new();
    for inst in &instances {
        *distribution.entry(inst.class.clone()).or_insert(0) += 1;
    }
    let drawn = random_baseline(&instances, &distribution, 9);
    // Pair indices are sentence-local, so score instance by instance.
    let predicted = drawn.iter().filter(|c| c.is_some()).count();
    let correct = instances
        .iter()
        .zip(&drawn)
        .filter(|(i, d)| d.is_some() && i.gold_class() == **d)
        .count();
    let n = instances.len() as f64;
    let ps = distribution["S"] as f64 / n;
    let po = distribution["O"] as f64 / n;
    let want = (ps * ps + po * po) / (ps + po);
    let p = correct as f64 / predicted as f64;
    assert!((p - want).abs() < 0.03, "precision {p}, expected {want}");
    assert_eq!(drawn, random_baseline(&instances, &distribution, 9));
}

/// Corrupts a fraction of gold relations so the two learners disagree.
fn noisy_corpus(seed: u64, sentences: usize, noise: f64) -> Vec<Sentence> {
    let mut doc = common::synthetic::corpus(seed, sentences);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xabcd);
    for s in &mut doc.sentences {
        for t in &mut s.tokens {
            for r in &mut t.relations {
                if rng.gen_bool(noise) {
                    r.class = match r.class {
                        RelationClass::Subject => RelationClass::Object,
                        RelationClass::Object => RelationClass::Subject,
                    };
                }
            }
        }
    }
    doc.sentences
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn unanimous_is_the_agreeing_intersection(seed in 0u64..1000, noise in 0.05f64..0.4) {
        let sentences = noisy_corpus(seed, 160, noise);
        let (train, test) = sentences.split_at(120);
        let instances = training_instances(train, RelationTarget::Both).unwrap();
        let ib1 = RelationModel::train(&instances, RelationMode::Ib1Ig).unwrap();
        let tree = RelationModel::train(&instances, RelationMode::IgTree).unwrap();
        let both = RelationModel::train(&instances, RelationMode::Unanimous).unwrap();
        let (mut e_ib1, mut e_tree, mut e_both) = Default::default();
        for s in test {
            let chunks = s.chunks().unwrap();
            let a = ib1.predict_relations(s, &chunks).unwrap();
            let b = tree.predict_relations(s, &chunks).unwrap();
            let u = both.predict_relations(s, &chunks).unwrap();
            let agreed: Vec<RelationPair> = a.iter().filter(|p| b.contains(p)).copied().collect();
            prop_assert_eq!(&u, &agreed);
            let gold = gold_pairs(s, RelationTarget::Both);
            RelationEvaluation::add_pairs(&mut e_ib1, &gold, &a);
            RelationEvaluation::add_pairs(&mut e_tree, &gold, &b);
            RelationEvaluation::add_pairs(&mut e_both, &gold, &u);
        }
        let (e_ib1, e_tree, e_both): (RelationEvaluation, RelationEvaluation, RelationEvaluation) = (e_ib1, e_tree, e_both);
        prop_assert!(e_both.together().recall() <= e_ib1.together().recall().min(e_tree.together().recall()));
    }

    #[test]
    fn intersection_never_raises_recall(
        gold in proptest::collection::vec((0usize..4, 0usize..8, any::<bool>()), 0..20),
        a in proptest::collection::vec((0usize..4, 0usize..8, any::<bool>()), 0..20),
        b in proptest::collection::vec((0usize..4, 0usize..8, any::<bool>()), 0..20),
    ) {
        let to_pairs = |v: &[(usize, usize, bool)]| -> Vec<RelationPair> {
            let mut pairs: Vec<RelationPair> = v.iter().map(|&(verb, head, s)| RelationPair {
                verb_index: verb,
                head_index: head,
                class: if s { RelationClass::Subject } else { RelationClass::Object },
            }).collect();
            pairs.sort();
            pairs.dedup();
            pairs
        };
        let (gold, a, b) = (to_pairs(&gold), to_pairs(&a), to_pairs(&b));
        let both: Vec<RelationPair> = a.iter().filter(|p| b.contains(p)).copied().collect();
        let r = |pred: &[RelationPair]| evaluate_relations(&gold, pred).together().recall();
        prop_assert!(r(&both) <= r(&a).min(r(&b)));
    }
}
