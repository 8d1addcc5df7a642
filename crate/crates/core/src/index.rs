//! Weighted forward/reverse inverted index for one field with on-disk
//! persistence.
//!
//! Both views are materialized: `term -> postings` (forward) and
//! `record -> term counts` (reverse). Postings carry token positions so
//! phrase queries can require consecutive terms. Replacing a document keeps
//! its old dictionary entries around as empty postings lists until
//! [`optimize`] prunes them.
//!
//! On-disk layout per field: `<root>/<field>/` containing `terms.bin`,
//! `postings.bin`, `docs.bin` and a text `meta` file (format version,
//! document count, analyzer fingerprint and configuration, completeness
//! state).

use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use crate::analysis::{analyze, AnalyzerConfig};
use crate::error::{Error, Result};
use crate::idset::RecordId;

const FORMAT_VERSION: u32 = 1;

/// One forward-index entry: a document and where the term occurs in it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Posting {
    pub recid: RecordId,
    /// Term count in the document; always equals `positions.len()`.
    pub tf: u32,
    /// Ascending offsets into the analyzed token sequence.
    pub positions: Vec<u32>,
}

/// Size and shape of a saved field index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct IndexStats {
    pub distinct_terms: usize,
    pub total_postings: usize,
    pub bytes_on_disk: u64,
}

/// In-memory weighted index for a single field.
#[derive(Debug, Clone)]
pub struct FieldIndex {
    field: String,
    analyzer: AnalyzerConfig,
    /// Forward view: term -> postings sorted by recid ascending. Entries may
    /// be empty after document replacement until the index is optimized.
    term_postings: BTreeMap<String, Vec<Posting>>,
    /// Reverse view: record -> term -> tf.
    doc_terms: BTreeMap<RecordId, BTreeMap<String, u32>>,
    /// Token count per document after analysis.
    doc_len: BTreeMap<RecordId, u32>,
}

impl FieldIndex {
    pub fn new(field: &str, analyzer: AnalyzerConfig) -> Self {
        Self {
            field: field.to_string(),
            analyzer,
            term_postings: BTreeMap::new(),
            doc_terms: BTreeMap::new(),
            doc_len: BTreeMap::new(),
        }
    }

    pub fn field(&self) -> &str {
        &self.field
    }

    pub fn analyzer(&self) -> &AnalyzerConfig {
        &self.analyzer
    }

    pub fn doc_count(&self) -> usize {
        self.doc_terms.len()
    }

    pub fn contains_doc(&self, recid: RecordId) -> bool {
        self.doc_terms.contains_key(&recid)
    }

    pub fn doc_ids(&self) -> impl Iterator<Item = RecordId> + '_ {
        self.doc_terms.keys().copied()
    }

    pub fn max_doc_id(&self) -> Option<RecordId> {
        self.doc_terms.keys().next_back().copied()
    }

    pub fn doc_len(&self, recid: RecordId) -> Option<u32> {
        self.doc_len.get(&recid).copied()
    }

    pub fn avg_doc_len(&self) -> f64 {
        if self.doc_len.is_empty() {
            return 0.0;
        }
        self.doc_len.values().map(|&l| l as u64).sum::<u64>() as f64 / self.doc_len.len() as f64
    }

    /// Reverse view for one document.
    pub fn doc_terms(&self, recid: RecordId) -> Option<&BTreeMap<String, u32>> {
        self.doc_terms.get(&recid)
    }

    /// Number of terms with at least one posting.
    pub fn distinct_terms(&self) -> usize {
        self.term_postings.values().filter(|p| !p.is_empty()).count()
    }

    /// Document frequency of an already-analyzed term.
    pub fn df(&self, analyzed_term: &str) -> u32 {
        self.postings_analyzed(analyzed_term).len() as u32
    }

    /// Postings for a raw (unanalyzed) single token. The token runs through
    /// the field's analyzer first, so stopwords come back empty and terms
    /// sharing a stem share postings.
    pub fn postings(&self, raw_term: &str) -> &[Posting] {
        let analyzed = analyze(raw_term, &self.analyzer);
        match analyzed.first() {
            Some(term) => self.postings_analyzed(term),
            None => &[],
        }
    }

    /// Postings lookup without re-analysis, for callers holding analyzed terms.
    pub fn postings_analyzed(&self, term: &str) -> &[Posting] {
        self.term_postings
            .get(term)
            .map(|p| p.as_slice())
            .unwrap_or(&[])
    }

    /// Adds or fully replaces a document. Empty text leaves the record known
    /// to the index with no terms.
    pub fn add_document(&mut self, recid: RecordId, text: &str) -> Result<()> {
        if recid == 0 {
            return Err(Error::InvalidRecordId);
        }
        if let Some(old_terms) = self.doc_terms.remove(&recid) {
            for term in old_terms.keys() {
                if let Some(postings) = self.term_postings.get_mut(term) {
                    postings.retain(|p| p.recid != recid);
                }
            }
            self.doc_len.remove(&recid);
        }

        let sequence = analyze(text, &self.analyzer);
        let mut positions_per_term: BTreeMap<&str, Vec<u32>> = BTreeMap::new();
        for (offset, term) in sequence.iter().enumerate() {
            positions_per_term
                .entry(term.as_str())
                .or_default()
                .push(offset as u32);
        }

        let mut term_counts = BTreeMap::new();
        for (term, positions) in positions_per_term {
            term_counts.insert(term.to_string(), positions.len() as u32);
            let postings = self.term_postings.entry(term.to_string()).or_default();
            let at = postings
                .binary_search_by_key(&recid, |p| p.recid)
                .unwrap_err();
            postings.insert(
                at,
                Posting {
                    recid,
                    tf: positions.len() as u32,
                    positions,
                },
            );
        }
        self.doc_terms.insert(recid, term_counts);
        self.doc_len.insert(recid, sequence.len() as u32);
        Ok(())
    }

    fn stats_with_bytes(&self, bytes_on_disk: u64) -> IndexStats {
        IndexStats {
            distinct_terms: self.distinct_terms(),
            total_postings: self.term_postings.values().map(|p| p.len()).sum(),
            bytes_on_disk,
        }
    }

    /// Writes the index under `<root>/<field>/`. The `meta` file is written
    /// in partial state first and flipped to complete after the data files,
    /// so an aborted save is detectable on open.
    pub fn save(&self, root: &Path) -> Result<IndexStats> {
        let dir = root.join(&self.field);
        std::fs::create_dir_all(&dir)?;
        self.write_meta(&dir, "partial")?;

        let mut terms = Vec::new();
        let mut postings = Vec::new();
        write_u32(&mut terms, self.term_postings.len() as u32);
        for (term, list) in &self.term_postings {
            write_string(&mut terms, term);
            write_u32(&mut terms, list.len() as u32);
            let mut prev_recid = 0u32;
            for posting in list {
                write_u32(&mut postings, posting.recid - prev_recid);
                prev_recid = posting.recid;
                write_u32(&mut postings, posting.tf);
                let mut prev_pos = 0u32;
                for (i, &pos) in posting.positions.iter().enumerate() {
                    write_u32(&mut postings, if i == 0 { pos } else { pos - prev_pos });
                    prev_pos = pos;
                }
            }
        }

        let mut docs = Vec::new();
        write_u32(&mut docs, self.doc_terms.len() as u32);
        for (&recid, terms_of_doc) in &self.doc_terms {
            write_u32(&mut docs, recid);
            write_u32(&mut docs, self.doc_len[&recid]);
            write_u32(&mut docs, terms_of_doc.len() as u32);
            for (term, &tf) in terms_of_doc {
                write_string(&mut docs, term);
                write_u32(&mut docs, tf);
            }
        }

        std::fs::write(dir.join("terms.bin"), &terms)?;
        std::fs::write(dir.join("postings.bin"), &postings)?;
        std::fs::write(dir.join("docs.bin"), &docs)?;
        self.write_meta(&dir, "complete")?;

        Ok(self.stats_with_bytes(dir_bytes(&dir)?))
    }

    fn write_meta(&self, dir: &Path, state: &str) -> Result<()> {
        let mut meta = String::new();
        meta.push_str(&format!("version={FORMAT_VERSION}\n"));
        meta.push_str(&format!("field={}\n", self.field));
        meta.push_str(&format!("doc_count={}\n", self.doc_terms.len()));
        meta.push_str(&format!("analyzer={}\n", self.analyzer.fingerprint()));
        meta.push_str(&format!("language={}\n", self.analyzer.language()));
        meta.push_str(&format!("stemming={}\n", self.analyzer.stemming_enabled()));
        meta.push_str(&format!("stopword={}\n", self.analyzer.stop_enabled()));
        for word in self.analyzer.stopwords() {
            meta.push_str(&format!("sw={word}\n"));
        }
        meta.push_str(&format!("state={state}\n"));
        std::fs::write(dir.join("meta"), meta)?;
        Ok(())
    }

    /// Opens a saved field index; observationally identical to the instance
    /// that was saved.
    pub fn open(root: &Path, field: &str) -> Result<FieldIndex> {
        let dir = root.join(field);
        let meta = Meta::read(&dir.join("meta"))?;
        if meta.version != FORMAT_VERSION {
            return Err(Error::VersionMismatch {
                found: meta.version,
                expected: FORMAT_VERSION,
            });
        }
        if meta.state != "complete" {
            return Err(Error::IndexFormat(format!(
                "index `{field}` is in {} state (aborted write?)",
                meta.state
            )));
        }
        if meta.field != field {
            return Err(Error::IndexFormat(format!(
                "meta names field `{}`, expected `{field}`",
                meta.field
            )));
        }
        let analyzer = AnalyzerConfig::new(
            &meta.language,
            meta.stopwords.into_iter().collect(),
            meta.stemming,
            meta.stop,
        )?;
        if analyzer.fingerprint() != meta.fingerprint {
            return Err(Error::IndexFormat(format!(
                "analyzer fingerprint mismatch for `{field}`"
            )));
        }

        let terms_buf = std::fs::read(dir.join("terms.bin"))?;
        let postings_buf = std::fs::read(dir.join("postings.bin"))?;
        let docs_buf = std::fs::read(dir.join("docs.bin"))?;

        let mut index = FieldIndex::new(field, analyzer);
        let mut terms = Cursor::new(&terms_buf);
        let mut postings = Cursor::new(&postings_buf);
        let term_count = terms.u32()?;
        for _ in 0..term_count {
            let term = terms.string()?;
            let n = terms.u32()?;
            let mut list = Vec::with_capacity(n as usize);
            let mut recid = 0u32;
            for _ in 0..n {
                recid += postings.u32()?;
                let tf = postings.u32()?;
                let mut positions = Vec::with_capacity(tf as usize);
                let mut pos = 0u32;
                for i in 0..tf {
                    let delta = postings.u32()?;
                    pos = if i == 0 { delta } else { pos + delta };
                    positions.push(pos);
                }
                list.push(Posting {
                    recid,
                    tf,
                    positions,
                });
            }
            index.term_postings.insert(term, list);
        }

        let mut docs = Cursor::new(&docs_buf);
        let doc_count = docs.u32()?;
        for _ in 0..doc_count {
            let recid = docs.u32()?;
            let len = docs.u32()?;
            let n_terms = docs.u32()?;
            let mut term_counts = BTreeMap::new();
            for _ in 0..n_terms {
                let term = docs.string()?;
                let tf = docs.u32()?;
                term_counts.insert(term, tf);
            }
            index.doc_terms.insert(recid, term_counts);
            index.doc_len.insert(recid, len);
        }
        if index.doc_terms.len() != meta.doc_count {
            return Err(Error::IndexFormat(format!(
                "doc count mismatch for `{field}`: meta says {}, docs.bin has {}",
                meta.doc_count,
                index.doc_terms.len()
            )));
        }
        Ok(index)
    }
}

/// Rewrites a saved field index compactly: dictionary entries whose postings
/// emptied out through document replacement are dropped. Query results are
/// unchanged and the on-disk size never grows.
pub fn optimize(root: &Path, field: &str) -> Result<IndexStats> {
    let mut index = FieldIndex::open(root, field)?;
    index.term_postings.retain(|_, postings| !postings.is_empty());
    index.save(root)
}

fn dir_bytes(dir: &Path) -> Result<u64> {
    let mut total = 0;
    for entry in std::fs::read_dir(dir)? {
        total += entry?.metadata()?.len();
    }
    Ok(total)
}

fn write_u32(buf: &mut Vec<u8>, value: u32) {
    buf.extend_from_slice(&value.to_le_bytes());
}

fn write_string(buf: &mut Vec<u8>, s: &str) {
    write_u32(buf, s.len() as u32);
    buf.extend_from_slice(s.as_bytes());
}

struct Cursor<'a> {
    buf: &'a [u8],
}

impl<'a> Cursor<'a> {
    fn new(buf: &'a [u8]) -> Self {
        Self { buf }
    }

    fn u32(&mut self) -> Result<u32> {
        if self.buf.len() < 4 {
            return Err(Error::IndexFormat("unexpected end of file".into()));
        }
        let (head, rest) = self.buf.split_at(4);
        self.buf = rest;
        Ok(u32::from_le_bytes(head.try_into().unwrap()))
    }

    fn string(&mut self) -> Result<String> {
        let len = self.u32()? as usize;
        if self.buf.len() < len {
            return Err(Error::IndexFormat("unexpected end of file".into()));
        }
        let (head, rest) = self.buf.split_at(len);
        self.buf = rest;
        String::from_utf8(head.to_vec())
            .map_err(|_| Error::IndexFormat("non-UTF-8 term".into()))
    }
}

struct Meta {
    version: u32,
    field: String,
    doc_count: usize,
    fingerprint: String,
    language: String,
    stemming: bool,
    stop: bool,
    stopwords: Vec<String>,
    state: String,
}

impl Meta {
    fn read(path: &Path) -> Result<Meta> {
        let text = std::fs::read_to_string(path)?;
        let mut meta = Meta {
            version: 0,
            field: String::new(),
            doc_count: 0,
            fingerprint: String::new(),
            language: String::new(),
            stemming: false,
            stop: false,
            stopwords: Vec::new(),
            state: String::new(),
        };
        for line in text.lines() {
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::IndexFormat(format!("bad meta line `{line}`")));
            };
            match key {
                "version" => {
                    meta.version = value
                        .parse()
                        .map_err(|_| Error::IndexFormat("bad version".into()))?
                }
                "field" => meta.field = value.into(),
                "doc_count" => {
                    meta.doc_count = value
                        .parse()
                        .map_err(|_| Error::IndexFormat("bad doc_count".into()))?
                }
                "analyzer" => meta.fingerprint = value.into(),
                "language" => meta.language = value.into(),
                "stemming" => meta.stemming = value == "true",
                "stopword" => meta.stop = value == "true",
                "sw" => meta.stopwords.push(value.into()),
                "state" => meta.state = value.into(),
                _ => {}
            }
        }
        Ok(meta)
    }
}
