//! Unified ranking engine: whole-query evaluation with field weights over a
//! shared set of field indexes, scored with a tf-idf vector space model.
//!
//! Also houses the reference cosine used by the worked examples: dot product
//! and norms are both restricted to the dimensions (terms) present in both
//! vectors.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::analysis::analyze;
use crate::error::{Error, Result};
use crate::idset::{IdSet, RecordId};
use crate::index::FieldIndex;
use crate::query::{Operator, SearchUnit, UnitKind};

/// Sparse term-weight vector; zero or negative weights are never stored.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct WeightedVector {
    entries: BTreeMap<String, f64>,
}

impl WeightedVector {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_pairs<'a, I: IntoIterator<Item = (&'a str, f64)>>(pairs: I) -> Self {
        let mut v = Self::new();
        for (term, weight) in pairs {
            v.insert(term, weight);
        }
        v
    }

    /// Ignores non-finite and non-positive weights.
    pub fn insert(&mut self, term: &str, weight: f64) {
        if weight.is_finite() && weight > 0.0 {
            self.entries.insert(term.to_string(), weight);
        }
    }

    pub fn get(&self, term: &str) -> Option<f64> {
        self.entries.get(term).copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> + '_ {
        self.entries.iter().map(|(t, &w)| (t.as_str(), w))
    }
}

/// Cosine of the angle between record and query vectors, restricted to the
/// dimensions that exist in both. Returns 0 when there are no common terms.
pub fn cosine(record: &WeightedVector, query: &WeightedVector) -> f64 {
    let mut dot = 0.0;
    let mut record_norm = 0.0;
    let mut query_norm = 0.0;
    for (term, rw) in record.iter() {
        if let Some(qw) = query.get(term) {
            dot += rw * qw;
            record_norm += rw * rw;
            query_norm += qw * qw;
        }
    }
    let denominator = record_norm.sqrt() * query_norm.sqrt();
    if denominator == 0.0 {
        0.0
    } else {
        dot / denominator
    }
}

/// A match with its raw engine score, before integer conversion and
/// normalization.
#[derive(Debug, Clone, PartialEq)]
pub struct RawHit {
    pub recid: RecordId,
    pub raw_score: f64,
}

/// Raw-score to integer-score conversion applied to every engine hit:
/// `floor(raw * 100) + 1`. The `+1` keeps even a 0.0 raw score at 1, so the
/// best surviving hit always normalizes to 100.
pub fn to_integer_score(raw: f64) -> u32 {
    (raw * 100.0).floor() as u32 + 1
}

/// Document tf-idf weight: `(1 + ln tf) * ln(N / df)`.
fn tfidf_weight(tf: u32, df: u32, doc_count: usize) -> f64 {
    if tf == 0 || df == 0 || doc_count == 0 {
        return 0.0;
    }
    (1.0 + (tf as f64).ln()) * ((doc_count as f64) / (df as f64)).ln()
}

/// The tf-idf vector of one document in one field index.
pub fn doc_tfidf_vector(ix: &FieldIndex, recid: RecordId) -> WeightedVector {
    let mut v = WeightedVector::new();
    if let Some(terms) = ix.doc_terms(recid) {
        for (term, &tf) in terms {
            v.insert(term, tfidf_weight(tf, ix.df(term), ix.doc_count()));
        }
    }
    v
}

/// One evaluated pattern against one field: the analyzed token sequence for
/// matching plus the distinct terms for scoring.
struct EvaluatedUnit {
    operator: Operator,
    field: String,
    sequence: Vec<String>,
    kind: UnitKind,
    weight: u32,
}

/// Docs whose field contains all tokens of the sequence; a phrase
/// additionally requires strictly consecutive positions (stopwords were
/// dropped by the analyzer, so "consecutive" means consecutive among the
/// surviving terms).
fn match_set(ix: &FieldIndex, sequence: &[String], kind: UnitKind) -> IdSet {
    if sequence.is_empty() {
        return IdSet::new();
    }
    let mut docs: Option<Vec<RecordId>> = None;
    for term in sequence {
        let ids: Vec<RecordId> = ix.postings_analyzed(term).iter().map(|p| p.recid).collect();
        docs = Some(match docs {
            None => ids,
            Some(current) => current.into_iter().filter(|d| ids.contains(d)).collect(),
        });
        if docs.as_ref().is_some_and(|d| d.is_empty()) {
            break;
        }
    }
    let candidates = docs.unwrap_or_default();
    let survivors: Vec<RecordId> = match kind {
        UnitKind::Word => candidates,
        UnitKind::Phrase => candidates
            .into_iter()
            .filter(|&recid| phrase_occurs(ix, sequence, recid))
            .collect(),
    };
    IdSet::from_ids(survivors).expect("postings never carry id 0")
}

fn phrase_occurs(ix: &FieldIndex, sequence: &[String], recid: RecordId) -> bool {
    let position_lists: Vec<&[u32]> = sequence
        .iter()
        .map(|term| {
            ix.postings_analyzed(term)
                .iter()
                .find(|p| p.recid == recid)
                .map(|p| p.positions.as_slice())
                .unwrap_or(&[])
        })
        .collect();
    if position_lists.iter().any(|l| l.is_empty()) {
        return false;
    }
    position_lists[0].iter().any(|&start| {
        position_lists
            .iter()
            .enumerate()
            .all(|(offset, list)| list.binary_search(&(start + offset as u32)).is_ok())
    })
}

fn evaluate_boolean(
    indexes: &BTreeMap<String, FieldIndex>,
    units: &[EvaluatedUnit],
) -> Result<IdSet> {
    let mut acc: Option<IdSet> = None;
    for unit in units {
        let ix = indexes
            .get(&unit.field)
            .ok_or_else(|| Error::UnknownField(unit.field.clone()))?;
        let matches = match_set(ix, &unit.sequence, unit.kind);
        acc = Some(match (acc, unit.operator) {
            (None, Operator::Not) => all_docs(indexes).difference(&matches),
            (None, _) => matches,
            (Some(a), Operator::And) => a.intersection(&matches),
            (Some(a), Operator::Or) => a.union(&matches),
            (Some(a), Operator::Not) => a.difference(&matches),
        });
    }
    Ok(acc.unwrap_or_default())
}

fn all_docs(indexes: &BTreeMap<String, FieldIndex>) -> IdSet {
    let mut all = IdSet::new();
    for ix in indexes.values() {
        for recid in ix.doc_ids() {
            all.insert(recid).expect("indexed ids are positive");
        }
    }
    all
}

fn to_evaluated(indexes: &BTreeMap<String, FieldIndex>, unit: &SearchUnit, weight: u32) -> Result<EvaluatedUnit> {
    let ix = indexes
        .get(&unit.field)
        .ok_or_else(|| Error::UnknownField(unit.field.clone()))?;
    Ok(EvaluatedUnit {
        operator: unit.operator,
        field: unit.field.clone(),
        sequence: analyze(&unit.pattern, ix.analyzer()),
        kind: unit.kind,
        weight,
    })
}

/// Boolean evaluation of already-substituted search units: the candidate
/// search shared by the command line and the benchmark harness.
pub fn boolean_matches(
    indexes: &BTreeMap<String, FieldIndex>,
    units: &[SearchUnit],
) -> Result<IdSet> {
    let evaluated: Vec<EvaluatedUnit> = units
        .iter()
        .map(|u| to_evaluated(indexes, u, 1))
        .collect::<Result<_>>()?;
    evaluate_boolean(indexes, &evaluated)
}

/// Evaluates a rendered weighted boolean query (`field:pattern^weight`
/// joined by `AND`/`OR`/`NOT`) against the field indexes.
///
/// Boolean semantics select the matching documents; every match is then
/// scored with the sum over positive query units of
/// `unit_weight * cosine(document tf-idf vector in the unit's field, unit
/// query vector)`, where the unit query vector carries weight 1 per distinct
/// term and document norms run over the full field vector. At most `rows`
/// highest-scoring hits are kept, then hits outside `candidates` are
/// dropped.
pub fn score_documents(
    indexes: &BTreeMap<String, FieldIndex>,
    rendered_query: &str,
    candidates: &IdSet,
    rows: usize,
) -> Result<Vec<RawHit>> {
    let parsed = parse_rendered(rendered_query)?;
    let units: Vec<EvaluatedUnit> = parsed
        .iter()
        .map(|u| to_evaluated(indexes, &u.unit, u.weight))
        .collect::<Result<_>>()?;
    if units.is_empty() {
        return Ok(Vec::new());
    }

    let matched = evaluate_boolean(indexes, &units)?;

    // per-field caches: document norms and term idf
    let mut norms: HashMap<(String, RecordId), f64> = HashMap::new();
    let mut scored: Vec<RawHit> = Vec::new();
    for recid in matched.iter() {
        let mut score = 0.0;
        for unit in &units {
            if unit.operator == Operator::Not {
                continue;
            }
            let ix = &indexes[&unit.field];
            let distinct: BTreeSet<&str> = unit.sequence.iter().map(|s| s.as_str()).collect();
            if distinct.is_empty() {
                continue;
            }
            let Some(doc_terms) = ix.doc_terms(recid) else {
                continue;
            };
            let mut dot = 0.0;
            for term in &distinct {
                if let Some(&tf) = doc_terms.get(*term) {
                    dot += tfidf_weight(tf, ix.df(term), ix.doc_count());
                }
            }
            if dot == 0.0 {
                continue;
            }
            let doc_norm = *norms
                .entry((unit.field.clone(), recid))
                .or_insert_with(|| {
                    doc_terms
                        .iter()
                        .map(|(term, &tf)| {
                            let w = tfidf_weight(tf, ix.df(term), ix.doc_count());
                            w * w
                        })
                        .sum::<f64>()
                        .sqrt()
                });
            let query_norm = (distinct.len() as f64).sqrt();
            if doc_norm > 0.0 {
                score += unit.weight as f64 * dot / (doc_norm * query_norm);
            }
        }
        scored.push(RawHit {
            recid,
            raw_score: score,
        });
    }

    scored.sort_by(|a, b| {
        b.raw_score
            .partial_cmp(&a.raw_score)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.recid.cmp(&b.recid))
    });
    scored.truncate(rows);
    scored.retain(|hit| candidates.contains(hit.recid).unwrap_or(false));
    Ok(scored)
}

struct RenderedUnit {
    unit: SearchUnit,
    weight: u32,
}

/// Parses the weighted boolean grammar emitted by
/// [`crate::query::render_weighted`].
fn parse_rendered(rendered: &str) -> Result<Vec<RenderedUnit>> {
    let mut units = Vec::new();
    let mut pending: Option<Operator> = None;
    for token in lex_rendered(rendered)? {
        match token.as_str() {
            "AND" => pending = Some(Operator::And),
            "OR" => pending = Some(Operator::Or),
            "NOT" => pending = Some(Operator::Not),
            _ => {
                let (field, rest) = token.split_once(':').ok_or_else(|| {
                    Error::QueryParse(format!("expected `field:pattern` in `{token}`"))
                })?;
                if field.is_empty() {
                    return Err(Error::QueryParse(format!("empty field in `{token}`")));
                }
                let (pattern, kind, weight) = split_pattern_weight(rest)?;
                if pattern.is_empty() {
                    return Err(Error::QueryParse(format!("empty pattern in `{token}`")));
                }
                units.push(RenderedUnit {
                    unit: SearchUnit {
                        operator: pending.take().unwrap_or(Operator::And),
                        pattern,
                        field: field.to_string(),
                        kind,
                    },
                    weight,
                });
            }
        }
    }
    Ok(units)
}

/// Whitespace-separated tokens, except that double quotes protect spaces.
fn lex_rendered(text: &str) -> Result<Vec<String>> {
    let mut tokens = Vec::new();
    let mut current = String::new();
    let mut in_quotes = false;
    for c in text.chars() {
        if c == '"' {
            in_quotes = !in_quotes;
            current.push(c);
        } else if c.is_whitespace() && !in_quotes {
            if !current.is_empty() {
                tokens.push(std::mem::take(&mut current));
            }
        } else {
            current.push(c);
        }
    }
    if in_quotes {
        return Err(Error::QueryParse("unbalanced quotes".into()));
    }
    if !current.is_empty() {
        tokens.push(current);
    }
    Ok(tokens)
}

fn split_pattern_weight(rest: &str) -> Result<(String, UnitKind, u32)> {
    let (body, weight) = match rest.rsplit_once('^') {
        Some((body, digits)) if !digits.is_empty() && digits.chars().all(|c| c.is_ascii_digit()) => {
            (body, digits.parse().unwrap_or(1))
        }
        _ => (rest, 1),
    };
    if body.len() >= 2 && body.starts_with('"') && body.ends_with('"') {
        Ok((body[1..body.len() - 1].to_string(), UnitKind::Phrase, weight))
    } else {
        Ok((body.to_string(), UnitKind::Word, weight))
    }
}
