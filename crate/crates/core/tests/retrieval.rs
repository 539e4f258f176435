use clarity_core::corpus::{build_index, load_index, save_index, tokenize, Bm25Params, Index, Passage, Query};
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_corpus(rng: &mut ChaCha8Rng, n: usize) -> Vec<Passage> {
    let vocab: Vec<String> = (0..40).map(|i| format!("w{i}")).collect();
    (0..n)
        .map(|i| {
            let len = rng.random_range(3..15);
            let words: Vec<&str> = (0..len).map(|_| vocab.choose(rng).unwrap().as_str()).collect();
            Passage::new(format!("p{i:03}"), words.join(" "))
        })
        .collect()
}

fn random_query(rng: &mut ChaCha8Rng, i: usize) -> Query {
    let len = rng.random_range(1..4);
    let words: Vec<String> = (0..len).map(|_| format!("w{}", rng.random_range(0..45))).collect();
    Query::new(format!("q{i}"), words.join(" "))
}

/// Scores every passage with the public per-document scorer and sorts.
fn brute_force(index: &Index, query: &Query, k: usize) -> Vec<(String, f64)> {
    let terms = tokenize(&query.text);
    let mut all: Vec<(String, f64)> = index
        .passages()
        .map(|p| {
            let s = index.bm25_score(&terms, &p.id).unwrap();
            (p.id, s)
        })
        .filter(|(_, s)| *s > 0.0)
        .collect();
    all.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    all.truncate(k);
    all
}

fn as_pairs(list: &clarity_core::RankedList) -> Vec<(String, f64)> {
    list.entries.iter().map(|e| (e.passage_id.clone(), e.score)).collect()
}

#[test]
fn top_k_matches_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let index = build_index(random_corpus(&mut rng, 150), Bm25Params::default()).unwrap();
    for i in 0..30 {
        let q = random_query(&mut rng, i);
        for k in [1, 5, 20, 200] {
            assert_eq!(
                as_pairs(&index.retrieve_top_k(&q, k)),
                brute_force(&index, &q, k),
                "{q:?} k={k}"
            );
        }
    }
}

#[test]
fn shallower_lists_are_prefixes() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let index = build_index(random_corpus(&mut rng, 80), Bm25Params::default()).unwrap();
    for i in 0..20 {
        let q = random_query(&mut rng, i);
        let deep = index.retrieve_top_k(&q, 30);
        for k in 1..30 {
            assert_eq!(index.retrieve_top_k(&q, k), deep.truncated(k));
        }
    }
}

#[test]
fn persisted_index_retrieves_identically() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let index = build_index(random_corpus(&mut rng, 120), Bm25Params { k1: 1.2, b: 0.75 }).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let meta = save_index(&index, dir.path()).unwrap();
    let (loaded, loaded_meta) = load_index(dir.path()).unwrap();
    assert_eq!(meta, loaded_meta);
    assert_eq!(loaded.params(), Bm25Params { k1: 1.2, b: 0.75 });
    for i in 0..20 {
        let q = random_query(&mut rng, i);
        assert_eq!(index.retrieve_top_k(&q, 20), loaded.retrieve_top_k(&q, 20));
        assert_eq!(index.corpus_score(&q).to_bits(), loaded.corpus_score(&q).to_bits());
    }
}

#[test]
fn rebuild_gives_identical_files() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let corpus = random_corpus(&mut rng, 50);
    let mut shuffled = corpus.clone();
    shuffled.reverse();
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let ma = save_index(&build_index(corpus, Bm25Params::default()).unwrap(), a.path()).unwrap();
    let mb = save_index(&build_index(shuffled, Bm25Params::default()).unwrap(), b.path()).unwrap();
    assert_eq!(ma.index_sha256, mb.index_sha256);
    let read = |d: &std::path::Path| std::fs::read(d.join(clarity_core::corpus::INDEX_FILE)).unwrap();
    assert_eq!(read(a.path()), read(b.path()));
}

#[test]
fn corrupted_index_is_rejected() {
    let index = build_index(
        vec![Passage::new("a", "one two"), Passage::new("b", "two three")],
        Bm25Params::default(),
    )
    .unwrap();
    let dir = tempfile::tempdir().unwrap();
    save_index(&index, dir.path()).unwrap();
    let path = dir.path().join(clarity_core::corpus::INDEX_FILE);
    let mut bytes = std::fs::read(&path).unwrap();
    let last = bytes.len() - 1;
    bytes[last] ^= 0xff;
    std::fs::write(&path, bytes).unwrap();
    assert!(load_index(dir.path()).is_err());
}
