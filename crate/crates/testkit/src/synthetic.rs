//! Synthetic corpora with known ambiguity structure.

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeSet;

#[derive(Debug, Clone)]
pub struct SyntheticQuery {
    pub id: String,
    pub text: String,
    pub ambiguous: bool,
}

#[derive(Debug, Clone)]
pub struct SyntheticFixture {
    /// `(passage id, text)` pairs.
    pub passages: Vec<(String, String)>,
    pub queries: Vec<SyntheticQuery>,
}

impl SyntheticFixture {
    pub fn corpus_tsv(&self) -> String {
        self.passages
            .iter()
            .map(|(id, text)| format!("{id}\t{text}\n"))
            .collect()
    }

    /// ClariQ-style TSV: ambiguous queries get level 4, clear ones level 1.
    pub fn clariq_tsv(&self) -> String {
        let mut out = String::from("topic_id\tinitial_request\tclarification_need\n");
        for q in &self.queries {
            out.push_str(&format!("{}\t{}\t{}\n", q.id, q.text, if q.ambiguous { 4 } else { 1 }));
        }
        out
    }
}

fn token_set(text: &str) -> BTreeSet<&str> {
    text.split_whitespace().collect()
}

pub fn jaccard(a: &str, b: &str) -> f64 {
    let (a, b) = (token_set(a), token_set(b));
    let inter = a.intersection(&b).count() as f64;
    let union = a.union(&b).count() as f64;
    if union == 0.0 {
        0.0
    } else {
        inter / union
    }
}

const TOPICS: usize = 5;
const PASSAGES_PER_TOPIC: usize = 20;
const VOCAB_PER_TOPIC: usize = 12;
const WORDS_PER_PASSAGE: usize = 8;

fn topic_word(topic: usize, w: usize) -> String {
    format!("t{topic}w{w:02}")
}

/// Five disjoint-vocabulary topics of twenty passages each, twenty clear
/// queries (two terms of one topic) and twenty ambiguous ones (one term from
/// each of three topics).
///
/// Panics if the generated passages do not separate cleanly under token-set
/// Jaccard: every same-topic pair must exceed 0.25 and every cross-topic
/// pair must be 0.
pub fn five_topic_fixture(seed: u64) -> SyntheticFixture {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut passages = Vec::new();
    let mut topic_of = Vec::new();
    for topic in 0..TOPICS {
        let vocab: Vec<String> = (0..VOCAB_PER_TOPIC).map(|w| topic_word(topic, w)).collect();
        for p in 0..PASSAGES_PER_TOPIC {
            let mut chosen: Vec<&String> = vocab.choose_multiple(&mut rng, WORDS_PER_PASSAGE).collect();
            chosen.sort();
            let mut words = Vec::new();
            for w in chosen {
                for _ in 0..rng.random_range(1..=3) {
                    words.push(w.clone());
                }
            }
            words.shuffle(&mut rng);
            passages.push((format!("t{topic}p{p:02}"), words.join(" ")));
            topic_of.push(topic);
        }
    }

    for i in 0..passages.len() {
        for j in 0..passages.len() {
            if i == j {
                continue;
            }
            let sim = jaccard(&passages[i].1, &passages[j].1);
            if topic_of[i] == topic_of[j] {
                assert!(sim > 0.25, "same-topic pair {i},{j} has Jaccard {sim}");
            } else {
                assert_eq!(sim, 0.0, "cross-topic pair {i},{j} shares vocabulary");
            }
        }
    }

    let mut queries = Vec::new();
    for q in 0..20 {
        let topic = q % TOPICS;
        let words: Vec<usize> = (0..VOCAB_PER_TOPIC)
            .collect::<Vec<_>>()
            .choose_multiple(&mut rng, 2)
            .cloned()
            .collect();
        let text = words
            .iter()
            .map(|&w| topic_word(topic, w))
            .collect::<Vec<_>>()
            .join(" ");
        queries.push(SyntheticQuery {
            id: format!("clear{q:02}"),
            text,
            ambiguous: false,
        });
    }
    for q in 0..20 {
        let topics: Vec<usize> = (0..TOPICS)
            .collect::<Vec<_>>()
            .choose_multiple(&mut rng, 3)
            .cloned()
            .collect();
        let text = topics
            .iter()
            .map(|&t| topic_word(t, rng.random_range(0..VOCAB_PER_TOPIC)))
            .collect::<Vec<_>>()
            .join(" ");
        queries.push(SyntheticQuery {
            id: format!("ambig{q:02}"),
            text,
            ambiguous: true,
        });
    }
    SyntheticFixture { passages, queries }
}

/// Hand-derived average node connectivity for the [`depth_fixture`] queries.
pub mod depth_expectations {
    /// Ten identical core passages form a complete digraph.
    pub const CLEAR_AT_10: f64 = 9.0;
    /// Two complete 5-cliques: 2 * (5 * 4 pairs) * 4 paths / 90.
    pub const AMBIGUOUS_AT_10: f64 = 160.0 / 90.0;
    /// One complete 10-clique plus ten isolated noise passages:
    /// (10 * 9 pairs) * 9 paths / 380.
    pub const CLEAR_AT_20: f64 = 810.0 / 380.0;
    /// Two complete 10-cliques: 2 * (10 * 9 pairs) * 9 paths / 380.
    pub const AMBIGUOUS_AT_20: f64 = 1620.0 / 380.0;
}

/// Fixture whose clarity signal only lives in the top ten results.
///
/// Clear query `i` matches ten identical core passages (term frequency 3)
/// and ten noise passages that share nothing but the query term (term
/// frequency 1). Ambiguous query `j` matches two ten-passage clusters with
/// identical scores whose ids interleave, so the top ten split five/five.
/// Every passage is exactly eight tokens long.
pub fn depth_fixture() -> SyntheticFixture {
    let mut passages = Vec::new();
    let mut queries = Vec::new();
    for i in 0..4 {
        let term = format!("clear{i}");
        for n in 0..10 {
            let text = format!("{term} {term} {term} c{i}a c{i}b c{i}c c{i}d c{i}e");
            passages.push((format!("c{i}core{n:02}"), text));
            let noise: Vec<String> = (0..7).map(|w| format!("n{i}x{n}w{w}")).collect();
            passages.push((format!("c{i}noise{n:02}"), format!("{term} {}", noise.join(" "))));
        }
        queries.push(SyntheticQuery {
            id: format!("clear{i}"),
            text: term,
            ambiguous: false,
        });
    }
    for j in 0..4 {
        for side in ["x", "y"] {
            for n in 0..10 {
                let vocab: Vec<String> = ["a", "b", "c", "d", "e", "f", "g"]
                    .iter()
                    .map(|w| format!("a{j}{side}{w}"))
                    .collect();
                passages.push((
                    format!("a{j}_{n:02}_{side}"),
                    format!("amb{j}{side} {}", vocab.join(" ")),
                ));
            }
        }
        queries.push(SyntheticQuery {
            id: format!("ambig{j}"),
            text: format!("amb{j}x amb{j}y"),
            ambiguous: true,
        });
    }
    SyntheticFixture { passages, queries }
}
