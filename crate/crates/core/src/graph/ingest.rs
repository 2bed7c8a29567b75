//! ConceptNet assertion dump reader.
//!
//! Each line is `assertion_uri TAB relation_uri TAB start_uri TAB end_uri TAB
//! json_metadata`. Only edges whose two endpoints are in the requested
//! language are kept.

use std::fmt;
use std::io::BufRead;

use serde::Deserialize;

use super::{normalize_surface, GraphBuilder, KnowledgeGraph};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IngestReport {
    pub lines: u64,
    pub kept: u64,
    pub duplicates: u64,
    pub other_language: u64,
    pub malformed: u64,
    /// 1-based line numbers of the first few malformed lines.
    pub malformed_examples: Vec<u64>,
}

impl fmt::Display for IngestReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "lines={} kept={} duplicates={} other_language={} malformed={}",
            self.lines, self.kept, self.duplicates, self.other_language, self.malformed
        )
    }
}

const MAX_MALFORMED_EXAMPLES: usize = 16;

#[derive(Deserialize)]
struct Metadata {
    weight: Option<f64>,
}

/// Splits `/c/<lang>/<surface>[/...]` into language and normalized surface.
pub fn parse_concept_uri(uri: &str) -> Option<(&str, String)> {
    let rest = uri.strip_prefix("/c/")?;
    let mut parts = rest.split('/');
    let lang = parts.next().filter(|l| !l.is_empty())?;
    let surface = normalize_surface(&parts.next()?.replace('_', " "));
    if surface.is_empty() {
        return None;
    }
    Some((lang, surface))
}

/// Extracts the relation name from `/r/<Name>`.
pub fn parse_relation_uri(uri: &str) -> Option<&str> {
    uri.strip_prefix("/r/").filter(|r| !r.is_empty())
}

enum Line<'a> {
    Edge {
        start: String,
        relation: &'a str,
        end: String,
        weight: f32,
    },
    OtherLanguage,
}

fn parse_line<'a>(line: &'a str, lang: &str) -> Option<Line<'a>> {
    let mut fields = line.split('\t');
    let _assertion = fields.next()?;
    let relation = parse_relation_uri(fields.next()?)?;
    let (start_lang, start) = parse_concept_uri(fields.next()?)?;
    let (end_lang, end) = parse_concept_uri(fields.next()?)?;
    if start_lang != lang || end_lang != lang {
        return Some(Line::OtherLanguage);
    }
    let weight = match fields.next().map(str::trim) {
        None | Some("") => 1.0,
        Some(json) => {
            let meta: Metadata = serde_json::from_str(json).ok()?;
            meta.weight.unwrap_or(1.0)
        }
    };
    if !(weight.is_finite() && weight >= 0.0) {
        return None;
    }
    Some(Line::Edge {
        start,
        relation,
        end,
        weight: weight as f32,
    })
}

/// Reads a tab-separated assertion dump into a graph restricted to `lang`.
///
/// Malformed lines are skipped and counted. A dump that yields no edge is an
/// error.
pub fn ingest_csv<R: BufRead>(mut source: R, lang: &str) -> Result<(KnowledgeGraph, IngestReport)> {
    if lang.is_empty() {
        return Err(Error::EmptyLanguage);
    }
    let mut builder = GraphBuilder::new(lang);
    let mut report = IngestReport::default();
    let mut buf = Vec::new();
    loop {
        buf.clear();
        if source.read_until(b'\n', &mut buf)? == 0 {
            break;
        }
        report.lines += 1;
        let line = match std::str::from_utf8(&buf) {
            Ok(l) => l.trim_end_matches(['\n', '\r']),
            Err(_) => {
                report.note_malformed();
                continue;
            }
        };
        if line.trim().is_empty() {
            continue;
        }
        match parse_line(line, lang) {
            Some(Line::Edge {
                start,
                relation,
                end,
                weight,
            }) => {
                if builder.add_edge(&start, relation, &end, weight) {
                    report.kept += 1;
                } else {
                    report.duplicates += 1;
                }
            }
            Some(Line::OtherLanguage) => report.other_language += 1,
            None => report.note_malformed(),
        }
    }
    if builder.edge_count() == 0 {
        return Err(Error::NoEdges);
    }
    Ok((builder.build(), report))
}

impl IngestReport {
    fn note_malformed(&mut self) {
        self.malformed += 1;
        if self.malformed_examples.len() < MAX_MALFORMED_EXAMPLES {
            self.malformed_examples.push(self.lines);
        }
    }
}
