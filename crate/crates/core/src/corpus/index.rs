use super::{tokenize, CorpusError, Passage, Query, RankedEntry, RankedList, CORPUS_SCORE_FLOOR};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bm25Params {
    pub k1: f64,
    pub b: f64,
}

impl Default for Bm25Params {
    fn default() -> Self {
        Bm25Params { k1: 0.9, b: 0.4 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Posting {
    /// Position of the passage in the id-sorted document table.
    pub doc: u32,
    pub tf: u32,
}

/// Immutable inverted index over a passage corpus.
///
/// Documents are numbered in ascending (byte-wise) passage id order, so
/// every postings list, sorted by document number, is also sorted by
/// passage id.
#[derive(Debug, Clone, PartialEq)]
pub struct Index {
    pub(crate) params: Bm25Params,
    pub(crate) doc_ids: Vec<String>,
    pub(crate) doc_texts: Vec<String>,
    pub(crate) doc_lengths: Vec<u32>,
    pub(crate) postings: BTreeMap<String, Vec<Posting>>,
    pub(crate) collection_tf: BTreeMap<String, u64>,
    pub(crate) total_tokens: u64,
    pub(crate) lookup: HashMap<String, u32>,
}

pub fn build_index<I>(corpus: I, params: Bm25Params) -> Result<Index, CorpusError>
where
    I: IntoIterator<Item = Passage>,
{
    let mut passages: Vec<Passage> = corpus.into_iter().collect();
    if passages.is_empty() {
        return Err(CorpusError::EmptyCorpus);
    }
    passages.sort_by(|a, b| a.id.cmp(&b.id));
    if let Some(dup) = passages.windows(2).find(|w| w[0].id == w[1].id) {
        return Err(CorpusError::DuplicateId(dup[0].id.clone()));
    }

    let mut doc_ids = Vec::with_capacity(passages.len());
    let mut doc_texts = Vec::with_capacity(passages.len());
    let mut doc_lengths = Vec::with_capacity(passages.len());
    let mut postings: BTreeMap<String, Vec<Posting>> = BTreeMap::new();
    let mut collection_tf: BTreeMap<String, u64> = BTreeMap::new();
    let mut total_tokens = 0u64;

    for (doc, passage) in passages.into_iter().enumerate() {
        if passage.text.trim().is_empty() {
            return Err(CorpusError::EmptyPassage(passage.id));
        }
        let tokens = tokenize(&passage.text);
        let mut counts: BTreeMap<String, u32> = BTreeMap::new();
        for t in tokens.iter() {
            *counts.entry(t.clone()).or_default() += 1;
        }
        for (term, tf) in counts {
            *collection_tf.entry(term.clone()).or_default() += tf as u64;
            postings.entry(term).or_default().push(Posting { doc: doc as u32, tf });
        }
        doc_lengths.push(tokens.len() as u32);
        total_tokens += tokens.len() as u64;
        doc_ids.push(passage.id);
        doc_texts.push(passage.text);
    }
    Ok(Index::assemble(
        params,
        doc_ids,
        doc_texts,
        doc_lengths,
        postings,
        collection_tf,
        total_tokens,
    ))
}

impl Index {
    pub(crate) fn assemble(
        params: Bm25Params,
        doc_ids: Vec<String>,
        doc_texts: Vec<String>,
        doc_lengths: Vec<u32>,
        postings: BTreeMap<String, Vec<Posting>>,
        collection_tf: BTreeMap<String, u64>,
        total_tokens: u64,
    ) -> Index {
        let lookup = doc_ids
            .iter()
            .enumerate()
            .map(|(i, id)| (id.clone(), i as u32))
            .collect();
        Index {
            params,
            doc_ids,
            doc_texts,
            doc_lengths,
            postings,
            collection_tf,
            total_tokens,
            lookup,
        }
    }

    pub fn params(&self) -> Bm25Params {
        self.params
    }

    pub fn doc_count(&self) -> usize {
        self.doc_ids.len()
    }

    pub fn total_tokens(&self) -> u64 {
        self.total_tokens
    }

    pub fn avg_doc_len(&self) -> f64 {
        self.total_tokens as f64 / self.doc_count() as f64
    }

    pub fn term_count(&self) -> usize {
        self.postings.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = &str> {
        self.postings.keys().map(String::as_str)
    }

    pub fn postings(&self, term: &str) -> &[Posting] {
        self.postings.get(term).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn collection_tf(&self, term: &str) -> u64 {
        self.collection_tf.get(term).copied().unwrap_or(0)
    }

    pub fn doc_length(&self, pid: &str) -> Option<u32> {
        self.lookup.get(pid).map(|&d| self.doc_lengths[d as usize])
    }

    pub fn passage_id(&self, doc: u32) -> &str {
        &self.doc_ids[doc as usize]
    }

    pub fn passage(&self, pid: &str) -> Option<Passage> {
        self.lookup
            .get(pid)
            .map(|&d| Passage::new(pid, self.doc_texts[d as usize].clone()))
    }

    pub fn passages(&self) -> impl Iterator<Item = Passage> + '_ {
        self.doc_ids
            .iter()
            .zip(&self.doc_texts)
            .map(|(id, text)| Passage::new(id.clone(), text.clone()))
    }

    fn idf(&self, df: f64) -> f64 {
        let n = self.doc_count() as f64;
        (1.0 + (n - df + 0.5) / (df + 0.5)).ln()
    }

    fn saturation(&self, tf: f64, dl: f64) -> f64 {
        let Bm25Params { k1, b } = self.params;
        tf * (k1 + 1.0) / (tf + k1 * (1.0 - b + b * dl / self.avg_doc_len()))
    }

    /// BM25 of one passage. Repeated query terms contribute once per
    /// occurrence.
    pub fn bm25_score(&self, query_terms: &[String], pid: &str) -> Result<f64, CorpusError> {
        let doc = *self
            .lookup
            .get(pid)
            .ok_or_else(|| CorpusError::UnknownPassage(pid.to_string()))?;
        let dl = self.doc_lengths[doc as usize] as f64;
        let mut score = 0.0;
        for term in query_terms {
            let list = self.postings(term);
            if let Ok(at) = list.binary_search_by_key(&doc, |p| p.doc) {
                score += self.idf(list.len() as f64) * self.saturation(list[at].tf as f64, dl);
            }
        }
        Ok(score)
    }

    /// The `k` best passages with a positive score, ties broken by passage
    /// id ascending.
    pub fn retrieve_top_k(&self, query: &Query, k: usize) -> RankedList {
        let terms = tokenize(&query.text);
        let mut acc: HashMap<u32, f64> = HashMap::new();
        for term in &terms {
            let list = self.postings(term);
            if list.is_empty() {
                continue;
            }
            let idf = self.idf(list.len() as f64);
            for p in list {
                let dl = self.doc_lengths[p.doc as usize] as f64;
                *acc.entry(p.doc).or_insert(0.0) += idf * self.saturation(p.tf as f64, dl);
            }
        }
        let mut hits: Vec<(u32, f64)> = acc.into_iter().filter(|&(_, s)| s > 0.0).collect();
        hits.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        hits.truncate(k);
        RankedList {
            query_id: query.id.clone(),
            entries: hits
                .into_iter()
                .map(|(doc, score)| RankedEntry {
                    passage_id: self.doc_ids[doc as usize].clone(),
                    score,
                })
                .collect(),
        }
    }

    /// Collection score used to normalise QPP predictors: BM25 of the query
    /// against a pseudo-document made of the whole collection (term
    /// frequencies `collection_tf`, length `total_tokens`), with the
    /// document frequency fixed at N/2. Falls back to
    /// [`CORPUS_SCORE_FLOOR`] when no query term is in the collection.
    pub fn corpus_score(&self, query: &Query) -> f64 {
        let idf = self.idf(self.doc_count() as f64 / 2.0);
        let dl = self.total_tokens as f64;
        let mut score = 0.0;
        for term in tokenize(&query.text) {
            let tf = self.collection_tf(&term);
            if tf > 0 {
                score += idf * self.saturation(tf as f64, dl);
            }
        }
        if score > 0.0 {
            score
        } else {
            CORPUS_SCORE_FLOOR
        }
    }

    /// Checks the internal consistency invariants, returning a description
    /// of the first violation.
    pub fn check_invariants(&self) -> Result<(), String> {
        if self.doc_ids.windows(2).any(|w| w[0] >= w[1]) {
            return Err("document ids are not strictly ascending".into());
        }
        let len_sum: u64 = self.doc_lengths.iter().map(|&l| l as u64).sum();
        if len_sum != self.total_tokens {
            return Err(format!(
                "doc lengths sum to {len_sum}, total_tokens is {}",
                self.total_tokens
            ));
        }
        if self.postings.len() != self.collection_tf.len() {
            return Err("postings and collection_tf cover different terms".into());
        }
        for (term, list) in &self.postings {
            if list.windows(2).any(|w| w[0].doc >= w[1].doc) {
                return Err(format!("postings for `{term}` are not sorted"));
            }
            if list.iter().any(|p| p.doc as usize >= self.doc_count() || p.tf == 0) {
                return Err(format!("postings for `{term}` reference a bad document"));
            }
            let sum: u64 = list.iter().map(|p| p.tf as u64).sum();
            if Some(&sum) != self.collection_tf.get(term) {
                return Err(format!("collection_tf mismatch for `{term}`"));
            }
        }
        Ok(())
    }
}
