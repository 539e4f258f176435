//! On-disk index layout.
//!
//! An index directory holds two files:
//!
//! * `index.bin`, little-endian throughout, strings are a `u32` byte length
//!   followed by UTF-8 bytes:
//!
//!   ```text
//!   magic          8 bytes  "CLRIDX01"
//!   k1, b          f64, f64
//!   doc_count      u32
//!     doc_count x  { id: str, text: str, length: u32 }     ascending id
//!   total_tokens   u64
//!   term_count     u32
//!     term_count x { term: str, collection_tf: u64, n: u32,
//!                    n x { doc: u32, tf: u32 } }          ascending term
//!   ```
//!
//! * `meta.json`, a sidecar with the tokenizer id, BM25 parameters, corpus
//!   statistics and checksums of the corpus content and of `index.bin`.

use super::index::{Bm25Params, Index, Posting};
use super::{CorpusError, TOKENIZER_ID};
use crate::checksum::sha256_hex;
use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::io::{Cursor, Read};
use std::path::Path;

pub const INDEX_FILE: &str = "index.bin";
pub const METADATA_FILE: &str = "meta.json";
const MAGIC: &[u8; 8] = b"CLRIDX01";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexMetadata {
    pub format: String,
    pub tokenizer: String,
    pub bm25: Bm25Params,
    pub doc_count: usize,
    pub term_count: usize,
    pub total_tokens: u64,
    /// Checksum over the id-sorted `<id>\t<text>\n` records.
    pub corpus_sha256: String,
    pub index_sha256: String,
}

fn corpus_checksum(index: &Index) -> String {
    let mut buf = Vec::new();
    for (id, text) in index.doc_ids.iter().zip(&index.doc_texts) {
        buf.extend_from_slice(id.as_bytes());
        buf.push(b'\t');
        buf.extend_from_slice(text.as_bytes());
        buf.push(b'\n');
    }
    sha256_hex(&buf)
}

fn put_str(out: &mut Vec<u8>, s: &str) {
    out.write_u32::<LittleEndian>(s.len() as u32).unwrap();
    out.extend_from_slice(s.as_bytes());
}

pub(crate) fn encode(index: &Index) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(MAGIC);
    // Writes into a Vec cannot fail.
    out.write_f64::<LittleEndian>(index.params.k1).unwrap();
    out.write_f64::<LittleEndian>(index.params.b).unwrap();
    out.write_u32::<LittleEndian>(index.doc_ids.len() as u32).unwrap();
    for ((id, text), len) in index.doc_ids.iter().zip(&index.doc_texts).zip(&index.doc_lengths) {
        put_str(&mut out, id);
        put_str(&mut out, text);
        out.write_u32::<LittleEndian>(*len).unwrap();
    }
    out.write_u64::<LittleEndian>(index.total_tokens).unwrap();
    out.write_u32::<LittleEndian>(index.postings.len() as u32).unwrap();
    for (term, list) in &index.postings {
        put_str(&mut out, term);
        out.write_u64::<LittleEndian>(index.collection_tf[term]).unwrap();
        out.write_u32::<LittleEndian>(list.len() as u32).unwrap();
        for p in list {
            out.write_u32::<LittleEndian>(p.doc).unwrap();
            out.write_u32::<LittleEndian>(p.tf).unwrap();
        }
    }
    out
}

fn get_str(cur: &mut Cursor<&[u8]>) -> std::io::Result<String> {
    let len = cur.read_u32::<LittleEndian>()? as usize;
    let remaining = cur.get_ref().len() - cur.position() as usize;
    if len > remaining {
        return Err(std::io::Error::new(
            std::io::ErrorKind::UnexpectedEof,
            "string past end",
        ));
    }
    let mut buf = vec![0u8; len];
    cur.read_exact(&mut buf)?;
    String::from_utf8(buf).map_err(|e| std::io::Error::new(std::io::ErrorKind::InvalidData, e))
}

pub(crate) fn decode(bytes: &[u8]) -> Result<Index, CorpusError> {
    let corrupt = |e: std::io::Error| CorpusError::Corrupt(e.to_string());
    let mut cur = Cursor::new(bytes);
    let mut magic = [0u8; 8];
    cur.read_exact(&mut magic).map_err(corrupt)?;
    if &magic != MAGIC {
        return Err(CorpusError::Corrupt("bad magic".into()));
    }
    let k1 = cur.read_f64::<LittleEndian>().map_err(corrupt)?;
    let b = cur.read_f64::<LittleEndian>().map_err(corrupt)?;
    let doc_count = cur.read_u32::<LittleEndian>().map_err(corrupt)? as usize;
    let mut doc_ids = Vec::with_capacity(doc_count.min(1 << 20));
    let mut doc_texts = Vec::with_capacity(doc_count.min(1 << 20));
    let mut doc_lengths = Vec::with_capacity(doc_count.min(1 << 20));
    for _ in 0..doc_count {
        doc_ids.push(get_str(&mut cur).map_err(corrupt)?);
        doc_texts.push(get_str(&mut cur).map_err(corrupt)?);
        doc_lengths.push(cur.read_u32::<LittleEndian>().map_err(corrupt)?);
    }
    let total_tokens = cur.read_u64::<LittleEndian>().map_err(corrupt)?;
    let term_count = cur.read_u32::<LittleEndian>().map_err(corrupt)? as usize;
    let mut postings = BTreeMap::new();
    let mut collection_tf = BTreeMap::new();
    for _ in 0..term_count {
        let term = get_str(&mut cur).map_err(corrupt)?;
        let ctf = cur.read_u64::<LittleEndian>().map_err(corrupt)?;
        let n = cur.read_u32::<LittleEndian>().map_err(corrupt)? as usize;
        let mut list = Vec::with_capacity(n.min(doc_count));
        for _ in 0..n {
            let doc = cur.read_u32::<LittleEndian>().map_err(corrupt)?;
            let tf = cur.read_u32::<LittleEndian>().map_err(corrupt)?;
            list.push(Posting { doc, tf });
        }
        collection_tf.insert(term.clone(), ctf);
        postings.insert(term, list);
    }
    if cur.position() as usize != bytes.len() {
        return Err(CorpusError::Corrupt("trailing bytes".into()));
    }
    if doc_count == 0 {
        return Err(CorpusError::EmptyCorpus);
    }
    let index = Index::assemble(
        Bm25Params { k1, b },
        doc_ids,
        doc_texts,
        doc_lengths,
        postings,
        collection_tf,
        total_tokens,
    );
    index.check_invariants().map_err(CorpusError::Corrupt)?;
    Ok(index)
}

pub fn metadata(index: &Index, encoded: &[u8]) -> IndexMetadata {
    IndexMetadata {
        format: String::from_utf8_lossy(MAGIC).into_owned(),
        tokenizer: TOKENIZER_ID.to_string(),
        bm25: index.params,
        doc_count: index.doc_count(),
        term_count: index.term_count(),
        total_tokens: index.total_tokens,
        corpus_sha256: corpus_checksum(index),
        index_sha256: sha256_hex(encoded),
    }
}

/// Writes `index.bin` and `meta.json` into `dir`, creating it if needed.
pub fn save_index(index: &Index, dir: &Path) -> Result<IndexMetadata, CorpusError> {
    std::fs::create_dir_all(dir).map_err(|e| CorpusError::io(dir, e))?;
    let encoded = encode(index);
    let meta = metadata(index, &encoded);
    let bin = dir.join(INDEX_FILE);
    std::fs::write(&bin, &encoded).map_err(|e| CorpusError::io(&bin, e))?;
    let json = serde_json::to_string_pretty(&meta).expect("metadata serializes") + "\n";
    let sidecar = dir.join(METADATA_FILE);
    std::fs::write(&sidecar, json).map_err(|e| CorpusError::io(&sidecar, e))?;
    Ok(meta)
}

pub fn load_index(dir: &Path) -> Result<(Index, IndexMetadata), CorpusError> {
    let sidecar = dir.join(METADATA_FILE);
    let raw = std::fs::read_to_string(&sidecar).map_err(|e| CorpusError::io(&sidecar, e))?;
    let meta: IndexMetadata =
        serde_json::from_str(&raw).map_err(|e| CorpusError::Corrupt(format!("{}: {e}", sidecar.display())))?;
    if meta.tokenizer != TOKENIZER_ID {
        return Err(CorpusError::Corrupt(format!(
            "index built with tokenizer `{}`, this build uses `{TOKENIZER_ID}`",
            meta.tokenizer
        )));
    }
    let bin = dir.join(INDEX_FILE);
    let bytes = std::fs::read(&bin).map_err(|e| CorpusError::io(&bin, e))?;
    if sha256_hex(&bytes) != meta.index_sha256 {
        return Err(CorpusError::Corrupt(
            "index.bin does not match its metadata checksum".into(),
        ));
    }
    let index = decode(&bytes)?;
    Ok((index, meta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{build_index, Passage};

    fn sample() -> Index {
        let passages = vec![
            Passage::new("b", "Folk remedies for a sore throat"),
            Passage::new("a", "Tell me about the Land Rover defender"),
            Passage::new("c", "Microsoft Defender antivirus: défense"),
        ];
        build_index(passages, Bm25Params { k1: 1.2, b: 0.75 }).unwrap()
    }

    #[test]
    fn encode_decode_is_byte_identical() {
        let index = sample();
        let bytes = encode(&index);
        let back = decode(&bytes).unwrap();
        assert_eq!(back, index);
        assert_eq!(encode(&back), bytes);
    }

    #[test]
    fn rejects_corruption() {
        let mut bytes = encode(&sample());
        bytes[0] = b'X';
        assert!(matches!(decode(&bytes), Err(CorpusError::Corrupt(_))));
        let bytes = encode(&sample());
        assert!(decode(&bytes[..bytes.len() - 3]).is_err());
    }

    #[test]
    fn directory_round_trip_checks_checksum() {
        let dir = tempfile::tempdir().unwrap();
        let meta = save_index(&sample(), dir.path()).unwrap();
        let (loaded, loaded_meta) = load_index(dir.path()).unwrap();
        assert_eq!(meta, loaded_meta);
        assert_eq!(loaded, sample());
        assert_eq!(meta.bm25, Bm25Params { k1: 1.2, b: 0.75 });

        let bin = dir.path().join(INDEX_FILE);
        let mut bytes = std::fs::read(&bin).unwrap();
        let last = bytes.len() - 1;
        bytes[last] ^= 1;
        std::fs::write(&bin, bytes).unwrap();
        assert!(matches!(load_index(dir.path()), Err(CorpusError::Corrupt(_))));
    }
}
