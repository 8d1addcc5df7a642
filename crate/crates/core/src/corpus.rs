//! Record model, corpus file ingestion and synthetic corpus generation.
//!
//! The corpus file is line-delimited JSON: one flat object per line with the
//! keys `id`, `abstract`, `first_author`, `additional_authors`, `keyword`,
//! `title` and `fulltext`. Absent keys mean empty.

use std::collections::BTreeMap;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, Zipf};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::idset::RecordId;

/// The five record fields used for word similarity ranking.
pub const RANKING_FIELDS: [&str; 5] = ["abstract", "author", "fulltext", "keyword", "title"];

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Record {
    pub id: RecordId,
    #[serde(rename = "abstract", default, skip_serializing_if = "String::is_empty")]
    pub abstract_text: String,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub first_author: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub additional_authors: Vec<String>,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub keyword: String,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub title: String,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub fulltext: String,
}

impl Record {
    /// Text of one of the [`RANKING_FIELDS`]; `author` concatenates first and
    /// additional authors.
    pub fn field_text(&self, field: &str) -> Option<String> {
        match field {
            "abstract" => Some(self.abstract_text.clone()),
            "author" => Some(author_field(self)),
            "fulltext" => Some(self.fulltext.clone()),
            "keyword" => Some(self.keyword.clone()),
            "title" => Some(self.title.clone()),
            _ => None,
        }
    }
}

/// First author and all additional authors joined by single spaces.
/// Empty parts are skipped, so the result never carries leading, trailing or
/// doubled spaces.
pub fn author_field(record: &Record) -> String {
    let mut parts: Vec<&str> = Vec::with_capacity(1 + record.additional_authors.len());
    if !record.first_author.is_empty() {
        parts.push(&record.first_author);
    }
    parts.extend(
        record
            .additional_authors
            .iter()
            .map(|a| a.as_str())
            .filter(|a| !a.is_empty()),
    );
    parts.join(" ")
}

/// Ordered collection of records with unique positive ids.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Corpus {
    records: Vec<Record>,
    max_recid: RecordId,
}

impl Corpus {
    /// Validates ids: positive and unique within the corpus.
    pub fn from_records(records: Vec<Record>) -> Result<Self> {
        let mut seen = std::collections::BTreeSet::new();
        let mut max_recid = 0;
        for r in &records {
            if r.id == 0 {
                return Err(Error::InvalidRecordId);
            }
            if !seen.insert(r.id) {
                return Err(Error::DuplicateRecordId(r.id));
            }
            max_recid = max_recid.max(r.id);
        }
        Ok(Self { records, max_recid })
    }

    pub fn records(&self) -> &[Record] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Maximum record id, `0` for an empty corpus.
    pub fn max_recid(&self) -> RecordId {
        self.max_recid
    }

    pub fn get(&self, id: RecordId) -> Option<&Record> {
        self.records.iter().find(|r| r.id == id)
    }

    /// Lookup table keyed by record id.
    pub fn by_id(&self) -> BTreeMap<RecordId, &Record> {
        self.records.iter().map(|r| (r.id, r)).collect()
    }

    /// Sub-corpus over a range of the record list (benchmark slicing).
    pub fn slice(&self, start: usize, len: usize) -> Result<Corpus> {
        if start + len > self.records.len() {
            return Err(Error::InvalidPlan(format!(
                "slice {start}..{} exceeds corpus size {}",
                start + len,
                self.records.len()
            )));
        }
        Corpus::from_records(self.records[start..start + len].to_vec())
    }
}

/// Reads a line-delimited JSON corpus file. Blank lines are skipped; parse
/// failures report the offending line number.
pub fn load_corpus(path: &Path) -> Result<Corpus> {
    let file = std::fs::File::open(path)?;
    let reader = BufReader::new(file);
    let mut records = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let record: Record = serde_json::from_str(&line).map_err(|e| Error::CorpusParse {
            line: i + 1,
            msg: e.to_string(),
        })?;
        if record.id == 0 {
            return Err(Error::CorpusParse {
                line: i + 1,
                msg: "record id must be a positive integer".into(),
            });
        }
        records.push(record);
    }
    Corpus::from_records(records)
}

/// Writes the corpus in the same line-delimited JSON format `load_corpus`
/// reads; `load(save(c))` round-trips exactly.
pub fn save_corpus(corpus: &Corpus, path: &Path) -> Result<()> {
    let file = std::fs::File::create(path)?;
    let mut writer = BufWriter::new(file);
    for record in corpus.records() {
        serde_json::to_writer(&mut writer, record)
            .map_err(|e| Error::Io(std::io::Error::other(e)))?;
        writer.write_all(b"\n")?;
    }
    writer.flush()?;
    Ok(())
}

/// Fulltext size classes observed in real record attachments: short papers
/// and news, long papers and BSc theses, books and PhD theses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SizeProfile {
    Short,
    Midsize,
    Long,
    /// 60% short, 30% midsize, 10% long.
    Mixed,
}

impl SizeProfile {
    fn token_range(self, rng: &mut ChaCha12Rng) -> std::ops::Range<usize> {
        match self {
            SizeProfile::Short => 40..90,
            SizeProfile::Midsize => 150..320,
            SizeProfile::Long => 600..1100,
            SizeProfile::Mixed => {
                let draw: f64 = rng.random();
                if draw < 0.6 {
                    SizeProfile::Short.token_range(rng)
                } else if draw < 0.9 {
                    SizeProfile::Midsize.token_range(rng)
                } else {
                    SizeProfile::Long.token_range(rng)
                }
            }
        }
    }
}

impl std::str::FromStr for SizeProfile {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "short" => Ok(SizeProfile::Short),
            "midsize" => Ok(SizeProfile::Midsize),
            "long" => Ok(SizeProfile::Long),
            "mixed" => Ok(SizeProfile::Mixed),
            other => Err(Error::Config(format!("unknown size profile `{other}`"))),
        }
    }
}

const VOCABULARY_SIZE: usize = 4000;

const SYLLABLES: [&str; 40] = [
    "ba", "be", "bo", "da", "de", "di", "fa", "fe", "ga", "go", "ka", "ke", "ki", "la", "le",
    "li", "lo", "ma", "me", "mi", "mo", "na", "ne", "ni", "no", "pa", "pe", "po", "ra", "re",
    "ri", "ro", "sa", "se", "si", "so", "ta", "te", "ti", "to",
];

/// Probe terms injected with controlled per-record probabilities so the
/// benchmark query suite returns meaningful result counts at desk scale.
/// `of` is present in every fulltext (worst case), `model` is common,
/// `boson` typical.
const PROBE_TERMS: [(&str, f64); 8] = [
    ("the", 0.90),
    ("model", 0.35),
    ("standard", 0.30),
    ("phys", 0.18),
    ("rev", 0.15),
    ("boson", 0.12),
    ("higgs", 0.10),
    ("of", 1.0),
];

/// Probe bigrams for the phrase query suite.
const PROBE_BIGRAMS: [(&str, &str, f64); 4] = [
    ("of", "the", 0.60),
    ("phys", "rev", 0.12),
    ("standard", "model", 0.20),
    ("higgs", "boson", 0.08),
];

const SURNAMES: [&str; 12] = [
    "Ellis", "Enqvist", "Nanopoulos", "Aglietti", "Dvali", "Weber", "Okada", "Martin",
    "Silva", "Novak", "Haas", "Lindgren",
];

fn vocabulary_word(index: usize) -> String {
    // splitmix-style scramble keeps the vocabulary stable and independent of
    // how many records are generated
    let mut z = index as u64 ^ 0x9e37_79b9_7f4a_7c15;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^= z >> 31;
    let syllable_count = 2 + (z % 3) as usize;
    let mut word = String::new();
    for i in 0..syllable_count {
        let pick = ((z >> (8 * i)) % SYLLABLES.len() as u64) as usize;
        word.push_str(SYLLABLES[pick]);
    }
    word
}

/// Deterministic synthetic corpus: Zipf-distributed vocabulary, probe terms
/// with controlled frequencies, fulltext lengths drawn from the size classes.
pub fn generate_synthetic(n: usize, seed: u64, profile: SizeProfile) -> Corpus {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let zipf = Zipf::new(VOCABULARY_SIZE as f64, 1.07).expect("valid zipf parameters");
    let mut draw_word = |rng: &mut ChaCha12Rng| -> String {
        let rank = zipf.sample(rng) as usize;
        vocabulary_word(rank.clamp(1, VOCABULARY_SIZE) - 1)
    };

    let mut records = Vec::with_capacity(n);
    for id in 1..=n {
        let len = profile.token_range(&mut rng);
        let target = rng.random_range(len);
        let mut tokens: Vec<String> = (0..target).map(|_| draw_word(&mut rng)).collect();
        for (term, p) in PROBE_TERMS {
            if p >= 1.0 || rng.random_bool(p) {
                let at = rng.random_range(0..=tokens.len());
                tokens.insert(at, term.to_string());
            }
        }
        for (first, second, p) in PROBE_BIGRAMS {
            if rng.random_bool(p) {
                let at = rng.random_range(0..=tokens.len());
                tokens.insert(at, second.to_string());
                tokens.insert(at, first.to_string());
            }
        }
        let fulltext = tokens.join(" ");

        let title: Vec<String> = (0..rng.random_range(3..7))
            .map(|_| draw_word(&mut rng))
            .collect();
        let abstract_words: Vec<String> = (0..rng.random_range(15..40))
            .map(|_| draw_word(&mut rng))
            .collect();
        let first_author = format!(
            "{}, {}",
            SURNAMES[rng.random_range(0..SURNAMES.len())],
            (b'A' + rng.random_range(0..26u8)) as char
        );
        let additional_authors = (0..rng.random_range(0..3))
            .map(|_| {
                format!(
                    "{}, {}",
                    SURNAMES[rng.random_range(0..SURNAMES.len())],
                    (b'A' + rng.random_range(0..26u8)) as char
                )
            })
            .collect();

        records.push(Record {
            id: id as RecordId,
            abstract_text: abstract_words.join(" "),
            first_author,
            additional_authors,
            keyword: draw_word(&mut rng),
            title: title.join(" "),
            fulltext,
        });
    }

    Corpus::from_records(records).expect("generated ids are unique and positive")
}

/// Deterministic permutation of the record order; ids are unchanged.
pub fn shuffle(corpus: &Corpus, seed: u64) -> Corpus {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut records = corpus.records().to_vec();
    records.shuffle(&mut rng);
    Corpus::from_records(records).expect("shuffle preserves ids")
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    fn table4_corpus() -> Corpus {
        // the four-record mini corpus; descriptions live in `fulltext`
        let rows = [
            ("Core Java", "Best Java book for programmers to learn writing Java programs."),
            ("Effective Java", "Yet another must have for every Java programmer. Written by a Java expert for Java programmers to write better Java programs."),
            ("Java Beaches", "A movie about beaches of the island of Java. The beaches are white and surrounded by clear water. Not for programmers."),
            ("How to become a programmer", "Introduction to different programming languages including Python, C++ and ABAP."),
        ];
        let records = rows
            .iter()
            .enumerate()
            .map(|(i, (title, description))| Record {
                id: (i + 1) as RecordId,
                title: title.to_string(),
                fulltext: description.to_string(),
                ..Record::default()
            })
            .collect();
        Corpus::from_records(records).unwrap()
    }

    #[test]
    fn load_save_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("mini.jsonl");
        let corpus = table4_corpus();
        save_corpus(&corpus, &path).unwrap();
        let loaded = load_corpus(&path).unwrap();
        assert_eq!(loaded, corpus);
        assert_eq!(loaded.max_recid(), 4);
    }

    #[test]
    fn load_empty_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("empty.jsonl");
        std::fs::write(&path, "").unwrap();
        let corpus = load_corpus(&path).unwrap();
        assert_eq!(corpus.len(), 0);
        assert_eq!(corpus.max_recid(), 0);
    }

    #[test]
    fn load_rejects_duplicates_and_bad_ids() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("dup.jsonl");
        std::fs::write(&path, "{\"id\":7}\n{\"id\":7}\n").unwrap();
        assert!(matches!(
            load_corpus(&path),
            Err(Error::DuplicateRecordId(7))
        ));
        std::fs::write(&path, "{\"id\":0}\n").unwrap();
        assert!(matches!(
            load_corpus(&path),
            Err(Error::CorpusParse { line: 1, .. })
        ));
        std::fs::write(&path, "{\"id\":1}\nnot json\n").unwrap();
        assert!(matches!(
            load_corpus(&path),
            Err(Error::CorpusParse { line: 2, .. })
        ));
    }

    #[test]
    fn author_field_joins() {
        let r = Record {
            id: 1,
            first_author: "Ellis, J".into(),
            additional_authors: vec!["Enqvist, K".into(), "Nanopoulos, D".into()],
            ..Record::default()
        };
        assert_eq!(author_field(&r), "Ellis, J Enqvist, K Nanopoulos, D");
        let empty = Record {
            id: 2,
            ..Record::default()
        };
        assert_eq!(author_field(&empty), "");
        let solo = Record {
            id: 3,
            first_author: "Solo, A".into(),
            ..Record::default()
        };
        assert_eq!(author_field(&solo), "Solo, A");
    }

    #[test]
    fn author_field_never_doubles_spaces() {
        let r = Record {
            id: 1,
            first_author: "".into(),
            additional_authors: vec!["".into(), "Weber, K".into(), "".into()],
            ..Record::default()
        };
        let joined = author_field(&r);
        assert_eq!(joined, "Weber, K");
        assert!(!joined.contains("  "));
        assert_eq!(joined.trim(), joined);
    }

    #[test]
    fn synthetic_deterministic() {
        let a = generate_synthetic(50, 42, SizeProfile::Mixed);
        let b = generate_synthetic(50, 42, SizeProfile::Mixed);
        assert_eq!(a, b);
        assert_eq!(a.len(), 50);
        assert_eq!(a.max_recid(), 50);
        assert!(generate_synthetic(0, 1, SizeProfile::Mixed).is_empty());
    }

    #[test]
    fn synthetic_distinct_terms_grow_sublinearly() {
        let distinct = |corpus: &Corpus| -> usize {
            let mut terms = BTreeSet::new();
            for r in corpus.records() {
                terms.extend(crate::analysis::tokenize(&r.fulltext));
            }
            terms.len()
        };
        let small = distinct(&generate_synthetic(100, 42, SizeProfile::Mixed));
        let large = distinct(&generate_synthetic(1000, 42, SizeProfile::Mixed));
        assert!(
            (large as f64) < 10.0 * small as f64,
            "distinct terms grew linearly: {small} -> {large}"
        );
    }

    #[test]
    fn synthetic_probe_terms_present() {
        let corpus = generate_synthetic(200, 7, SizeProfile::Mixed);
        let with_term = |t: &str| {
            corpus
                .records()
                .iter()
                .filter(|r| crate::analysis::tokenize(&r.fulltext).contains(&t.to_string()))
                .count()
        };
        assert_eq!(with_term("of"), 200, "worst-case term must hit every record");
        assert!(with_term("model") > with_term("boson"));
        assert!(with_term("boson") > 0);
    }

    #[test]
    fn shuffle_permutes_and_is_deterministic() {
        let corpus = generate_synthetic(50, 3, SizeProfile::Short);
        let a = shuffle(&corpus, 1);
        let b = shuffle(&corpus, 1);
        let c = shuffle(&corpus, 2);
        assert_eq!(a, b);
        assert_ne!(
            a.records().iter().map(|r| r.id).collect::<Vec<_>>(),
            c.records().iter().map(|r| r.id).collect::<Vec<_>>()
        );
        let mut ids: Vec<_> = a.records().iter().map(|r| r.id).collect();
        ids.sort_unstable();
        assert_eq!(ids, (1..=50).collect::<Vec<_>>());
        assert!(shuffle(&Corpus::default(), 9).is_empty());
    }

    #[test]
    fn missing_keys_mean_empty() {
        let record: Record = serde_json::from_str("{\"id\":12}").unwrap();
        assert_eq!(record.abstract_text, "");
        assert_eq!(record.additional_authors, Vec::<String>::new());
        assert_eq!(record.fulltext, "");
    }
}
