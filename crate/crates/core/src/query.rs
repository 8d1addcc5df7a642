//! Field-query parsing and weighted boolean rendering.
//!
//! A query string like `"FOR NUCLEAR" + title:at - year:2010` breaks into
//! basic search units `(operator, pattern, field, kind)`. Units without an
//! explicit `field:` prefix get the ambient field; textual `AND`/`OR`/`NOT`
//! are equivalent to `+`/`|`/`-`. Rendering re-emits the units as a weighted
//! boolean query (`field:pattern^weight` joined by the boolean equivalents)
//! for the unified engine.

use std::collections::BTreeMap;

use crate::error::{Error, Result};

/// Boolean equivalents of the unit operators.
pub const BOOLEAN_EQUIVALENTS: [(&str, &str); 3] = [("+", "AND"), ("|", "OR"), ("-", "NOT")];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Operator {
    /// `+`, rendered `AND`
    And,
    /// `|`, rendered `OR`
    Or,
    /// `-`, rendered `NOT`
    Not,
}

impl Operator {
    pub fn symbol(self) -> &'static str {
        match self {
            Operator::And => "+",
            Operator::Or => "|",
            Operator::Not => "-",
        }
    }

    pub fn boolean_equivalent(self) -> &'static str {
        match self {
            Operator::And => "AND",
            Operator::Or => "OR",
            Operator::Not => "NOT",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnitKind {
    Word,
    Phrase,
}

/// One parsed query atom.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchUnit {
    pub operator: Operator,
    /// Term or phrase text, quotes and `%` wildcards stripped. Never empty.
    pub pattern: String,
    pub field: String,
    pub kind: UnitKind,
}

impl SearchUnit {
    pub fn new(operator: Operator, pattern: &str, field: &str, kind: UnitKind) -> Self {
        Self {
            operator,
            pattern: pattern.to_string(),
            field: field.to_string(),
            kind,
        }
    }
}

/// Per-field ranking weights plus the default field substituted for
/// unsupported ones, and the prologue/epilogue wrapped around displayed
/// relevance numbers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldSettings {
    weights: BTreeMap<String, u32>,
    default_field: String,
    prologue: String,
    epilogue: String,
}

impl FieldSettings {
    pub fn new(
        weights: BTreeMap<String, u32>,
        default_field: &str,
        prologue: &str,
        epilogue: &str,
    ) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::Config("field settings need at least one field".into()));
        }
        if let Some((field, &weight)) = weights.iter().find(|(_, &w)| w < 1) {
            return Err(Error::Config(format!(
                "field `{field}` has weight {weight}, weights must be >= 1"
            )));
        }
        if !weights.contains_key(default_field) {
            return Err(Error::Config(format!(
                "default_field `{default_field}` is not among the configured fields"
            )));
        }
        Ok(Self {
            weights,
            default_field: default_field.to_string(),
            prologue: prologue.to_string(),
            epilogue: epilogue.to_string(),
        })
    }

    pub fn weights(&self) -> &BTreeMap<String, u32> {
        &self.weights
    }

    pub fn weight(&self, field: &str) -> Option<u32> {
        self.weights.get(field).copied()
    }

    pub fn supports(&self, field: &str) -> bool {
        self.weights.contains_key(field)
    }

    pub fn default_field(&self) -> &str {
        &self.default_field
    }

    pub fn prologue(&self) -> &str {
        &self.prologue
    }

    pub fn epilogue(&self) -> &str {
        &self.epilogue
    }
}

/// Parses a query string into basic search units.
///
/// - tokens without a `field:` prefix get `ambient_field`
/// - `AND`/`OR`/`NOT` (uppercase) and `+`/`|`/`-` set the operator of the
///   following unit; the first unit defaults to `+` unless negated
/// - a double-quoted span is one phrase unit; `field:"..."` binds the field
///   to the whole phrase
/// - a pattern wrapped in `%...%` has the wildcards stripped and becomes a
///   phrase
///
/// Unbalanced quotes are an error; an empty query parses to no units.
pub fn parse(query: &str, ambient_field: &str) -> Result<Vec<SearchUnit>> {
    let mut units = Vec::new();
    let mut pending: Option<Operator> = None;
    let chars: Vec<char> = query.chars().collect();
    let mut i = 0;

    while i < chars.len() {
        if chars[i].is_whitespace() {
            i += 1;
            continue;
        }

        if chars[i] == '"' {
            let (pattern, next) = read_quoted(&chars, i)?;
            push_unit(
                &mut units,
                pending.take(),
                pattern,
                ambient_field.to_string(),
                UnitKind::Phrase,
            );
            i = next;
            continue;
        }

        // a bare token runs to whitespace or an opening quote
        let start = i;
        while i < chars.len() && !chars[i].is_whitespace() && chars[i] != '"' {
            i += 1;
        }
        let mut token: String = chars[start..i].iter().collect();

        match token.as_str() {
            "+" | "AND" => {
                pending = Some(Operator::And);
                continue;
            }
            "|" | "OR" => {
                pending = Some(Operator::Or);
                continue;
            }
            "-" | "NOT" => {
                pending = Some(Operator::Not);
                continue;
            }
            _ => {}
        }

        // attached operator prefix, e.g. `-year:2010`
        if token.len() > 1 {
            if let Some(op) = match token.chars().next().unwrap() {
                '+' => Some(Operator::And),
                '|' => Some(Operator::Or),
                '-' => Some(Operator::Not),
                _ => None,
            } {
                pending = Some(op);
                token.remove(0);
            }
        }

        // `field:pattern`, or `field:"..."` when the quote follows directly
        let (field, rest) = match token.split_once(':') {
            Some((prefix, rest)) if !prefix.is_empty() => {
                (prefix.to_lowercase(), rest.to_string())
            }
            _ => (ambient_field.to_string(), token),
        };

        if rest.is_empty() && i < chars.len() && chars[i] == '"' {
            let (pattern, next) = read_quoted(&chars, i)?;
            push_unit(&mut units, pending.take(), pattern, field, UnitKind::Phrase);
            i = next;
            continue;
        }

        let (pattern, kind) = strip_wildcards(&rest);
        push_unit(&mut units, pending.take(), pattern, field, kind);
    }

    Ok(units)
}

fn read_quoted(chars: &[char], open: usize) -> Result<(String, usize)> {
    let mut j = open + 1;
    while j < chars.len() && chars[j] != '"' {
        j += 1;
    }
    if j >= chars.len() {
        return Err(Error::QueryParse("unbalanced quotes".into()));
    }
    Ok((chars[open + 1..j].iter().collect(), j + 1))
}

/// Eliminates leading and trailing `%`; a wrapped pattern becomes a phrase.
fn strip_wildcards(pattern: &str) -> (String, UnitKind) {
    if pattern.starts_with('%') {
        let stripped = pattern.trim_start_matches('%').trim_end_matches('%');
        (stripped.to_string(), UnitKind::Phrase)
    } else {
        (pattern.to_string(), UnitKind::Word)
    }
}

fn push_unit(
    units: &mut Vec<SearchUnit>,
    pending: Option<Operator>,
    pattern: String,
    field: String,
    kind: UnitKind,
) {
    if pattern.is_empty() {
        return;
    }
    units.push(SearchUnit {
        operator: pending.unwrap_or(Operator::And),
        pattern,
        field,
        kind,
    });
}

/// Replaces an unsupported field by the configured default field.
pub fn substitute_default(unit: &SearchUnit, settings: &FieldSettings) -> SearchUnit {
    if settings.supports(&unit.field) {
        unit.clone()
    } else {
        SearchUnit {
            field: settings.default_field().to_string(),
            ..unit.clone()
        }
    }
}

/// Renders units as a weighted boolean query: each unit becomes
/// `field:pattern^weight` (phrases double-quoted), joined by the boolean
/// equivalents. The connector appears from the second part on and for a
/// negated first part. Units are default-substituted on the way, so the
/// rendering is total.
pub fn render_weighted(units: &[SearchUnit], settings: &FieldSettings) -> String {
    let mut out = String::new();
    for unit in units {
        let unit = substitute_default(unit, settings);
        let weight = settings
            .weight(&unit.field)
            .expect("substituted field is always configured");
        if !out.is_empty() || unit.operator == Operator::Not {
            out.push(' ');
            out.push_str(unit.operator.boolean_equivalent());
            out.push(' ');
        }
        match unit.kind {
            UnitKind::Word => {
                out.push_str(&format!("{}:{}^{}", unit.field, unit.pattern, weight))
            }
            UnitKind::Phrase => {
                out.push_str(&format!("{}:\"{}\"^{}", unit.field, unit.pattern, weight))
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn settings() -> FieldSettings {
        FieldSettings::new(
            [("fulltext".to_string(), 10), ("title".to_string(), 2)]
                .into_iter()
                .collect(),
            "fulltext",
            "(",
            ")",
        )
        .unwrap()
    }

    #[test]
    fn parse_sample_query() {
        let units = parse("\"FOR NUCLEAR\" + title:at - year:2010", "fulltext").unwrap();
        assert_eq!(
            units,
            vec![
                SearchUnit::new(Operator::And, "FOR NUCLEAR", "fulltext", UnitKind::Phrase),
                SearchUnit::new(Operator::And, "at", "title", UnitKind::Word),
                SearchUnit::new(Operator::Not, "2010", "year", UnitKind::Word),
            ]
        );
    }

    #[test]
    fn textual_operators_are_equivalent() {
        let a = parse("abstract:Higgs AND title:Spin", "fulltext").unwrap();
        let b = parse("abstract:Higgs + title:Spin", "fulltext").unwrap();
        assert_eq!(a, b);
        let c = parse("abstract:Higgs | title:Spin - fulltext:\"Test at CERN\"", "any").unwrap();
        assert_eq!(c[1].operator, Operator::Or);
        assert_eq!(c[2].operator, Operator::Not);
        assert_eq!(c[2].pattern, "Test at CERN");
        assert_eq!(c[2].kind, UnitKind::Phrase);
    }

    #[test]
    fn parse_edge_cases() {
        assert_eq!(parse("", "fulltext").unwrap(), vec![]);
        assert!(parse("\"unbalanced", "fulltext").is_err());
        // lowercase and / or are ordinary terms
        let units = parse("cat and dog", "fulltext").unwrap();
        assert_eq!(units.len(), 3);
        assert_eq!(units[1].pattern, "and");
        // attached prefix
        let units = parse("-year:2010", "fulltext").unwrap();
        assert_eq!(units[0].operator, Operator::Not);
        assert_eq!(units[0].field, "year");
    }

    #[test]
    fn wildcard_patterns_become_phrases() {
        let units = parse("%standard model%", "fulltext").unwrap();
        assert_eq!(units[0].pattern, "standard");
        let units = parse("title:%beaches%", "fulltext").unwrap();
        assert_eq!(
            units[0],
            SearchUnit::new(Operator::And, "beaches", "title", UnitKind::Phrase)
        );
    }

    #[test]
    fn substitute_unsupported_field() {
        let s = settings();
        let unit = SearchUnit::new(Operator::Not, "2010", "year", UnitKind::Word);
        let sub = substitute_default(&unit, &s);
        assert_eq!(sub.field, "fulltext");
        assert_eq!(sub.operator, Operator::Not);

        let supported = SearchUnit::new(Operator::And, "at", "title", UnitKind::Word);
        assert_eq!(substitute_default(&supported, &s), supported);
        let on_default = SearchUnit::new(Operator::And, "x", "fulltext", UnitKind::Word);
        assert_eq!(substitute_default(&on_default, &s), on_default);
    }

    #[test]
    fn render_sample_query() {
        let s = settings();
        let units = parse("\"FOR NUCLEAR\" + title:at - year:2010", "fulltext").unwrap();
        let units: Vec<SearchUnit> = units.iter().map(|u| substitute_default(u, &s)).collect();
        assert_eq!(
            render_weighted(&units, &s),
            "fulltext:\"FOR NUCLEAR\"^10 AND title:at^2 NOT fulltext:2010^10"
        );
    }

    #[test]
    fn render_single_and_leading_negation() {
        let s = FieldSettings::new(
            [("abstract".to_string(), 3)].into_iter().collect(),
            "abstract",
            "",
            "",
        )
        .unwrap();
        let single = [SearchUnit::new(Operator::And, "higgs", "abstract", UnitKind::Word)];
        assert_eq!(render_weighted(&single, &s), "abstract:higgs^3");

        let s2 = FieldSettings::new(
            [("title".to_string(), 2)].into_iter().collect(),
            "title",
            "",
            "",
        )
        .unwrap();
        let negated = [SearchUnit::new(Operator::Not, "x", "title", UnitKind::Word)];
        assert_eq!(render_weighted(&negated, &s2), " NOT title:x^2");
    }

    #[test]
    fn boolean_equivalents_table() {
        assert_eq!(
            BOOLEAN_EQUIVALENTS,
            [("+", "AND"), ("|", "OR"), ("-", "NOT")]
        );
        for (sym, equiv) in BOOLEAN_EQUIVALENTS {
            let op = match sym {
                "+" => Operator::And,
                "|" => Operator::Or,
                _ => Operator::Not,
            };
            assert_eq!(op.symbol(), sym);
            assert_eq!(op.boolean_equivalent(), equiv);
        }
    }

    #[test]
    fn field_settings_validation() {
        let err = FieldSettings::new(
            [("title".to_string(), 2)].into_iter().collect(),
            "year",
            "",
            "",
        );
        assert!(err.is_err());
        let err = FieldSettings::new(
            [("title".to_string(), 0)].into_iter().collect(),
            "title",
            "",
            "",
        );
        assert!(err.is_err());
        assert!(FieldSettings::new(BTreeMap::new(), "x", "", "").is_err());
    }
}
