//! Import of the annotation tool's tab-separated export (one file per
//! document) into the native model.
//!
//! The supported grammar is a subset of the WebAnno TSV 3.3 family: header
//! lines declare one span layer with the features entity-type, global
//! entity-name, and Wikidata, and one relation layer with a label feature
//! and a source pointer. Token lines carry `sent-tok` indices, character
//! offsets `start-end`, the token text, and one cell per feature column.
//! `_` marks no annotation, `*` an annotation with an unset feature, and
//! multi-token spans share a bracketed disambiguation index like `PER[3]`.
//! Stacked annotations on one token are `|`-separated. Relation cells sit
//! on the anaphor's first token row and point at the antecedent's token,
//! optionally as `1-2[targetIdx_sourceIdx]`.
//!
//! The export carries no raw text body, so document text is reconstructed
//! from the token offsets, padding gaps with spaces.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::model::{
    Corpus, Discourse, Document, EntityType, Mention, OutletCode, RelationEdge, RelationType, Span,
};

#[derive(Debug, Error)]
pub enum TabularError {
    #[error("{file}:{line}: {message}")]
    Grammar {
        file: String,
        line: usize,
        message: String,
    },
    #[error("{file}:{line}: dangling relation pointer {pointer:?}")]
    DanglingRelationPointer {
        file: String,
        line: usize,
        pointer: String,
    },
    #[error("{file}:{line}: offset mismatch: {message}")]
    OffsetMismatch {
        file: String,
        line: usize,
        message: String,
    },
    #[error("document id {0:?} has no `<digits>_<outlet>` form and no explicit discourse mapping")]
    BadDocumentId(String),
}

/// Result of a tabular import: the corpus plus info-level notices about
/// ignored layers and normalized values.
#[derive(Debug)]
pub struct ImportOutcome {
    pub corpus: Corpus,
    pub notices: Vec<String>,
}

/// One annotation value parsed from a cell: the value text and its
/// disambiguation index (0 = single-token annotation without index).
#[derive(Debug, Clone, PartialEq)]
struct CellValue {
    value: Option<String>,
    index: usize,
}

fn parse_cell(cell: &str) -> Vec<CellValue> {
    if cell == "_" {
        return Vec::new();
    }
    cell.split('|')
        .map(|item| {
            let (raw, index) = match item.rfind('[') {
                Some(pos) if item.ends_with(']') => {
                    let idx = item[pos + 1..item.len() - 1].parse().unwrap_or(0);
                    (&item[..pos], idx)
                }
                _ => (item, 0),
            };
            CellValue {
                value: if raw == "*" || raw == "_" || raw.is_empty() {
                    None
                } else {
                    Some(unescape(raw))
                },
                index,
            }
        })
        .collect()
}

// Pointer cells keep their `[targetIdx_sourceIdx]` suffix verbatim; only
// `_`/`*` placeholders and `|` stacking are interpreted here.
fn parse_pointer_cell(cell: &str) -> Vec<CellValue> {
    if cell == "_" {
        return Vec::new();
    }
    cell.split('|')
        .map(|item| CellValue {
            value: if item == "*" || item == "_" || item.is_empty() {
                None
            } else {
                Some(item.to_string())
            },
            index: 0,
        })
        .collect()
}

// WebAnno escapes reserved characters in cell values with a backslash.
fn unescape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    let mut chars = s.chars();
    while let Some(c) = chars.next() {
        if c == '\\' {
            if let Some(next) = chars.next() {
                out.push(next);
            }
        } else {
            out.push(c);
        }
    }
    out
}

#[derive(Debug)]
struct TokenRow {
    line: usize,
    sent: usize,
    tok: usize,
    start: usize,
    end: usize,
    text: String,
    entity_type: Vec<CellValue>,
    global_entity: Vec<CellValue>,
    wikidata: Vec<CellValue>,
    rel_label: Vec<CellValue>,
    rel_pointer: Vec<CellValue>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct ColumnLayout {
    /// Feature-column count of layers before the entity span layer.
    leading: usize,
    /// Feature-column count between the entity layer and the relation layer.
    between: usize,
    has_relation_layer: bool,
}

/// Parses the `#T_SP=`/`#T_RL=`/`#T_CH=` header lines. Exactly one span
/// layer with three features is treated as the entity layer and one
/// relation layer as the relation layer; any other declared layers are
/// skipped with a notice.
fn parse_layout(
    file: &str,
    lines: &[(usize, &str)],
    notices: &mut Vec<String>,
) -> Result<ColumnLayout, TabularError> {
    let mut leading = 0usize;
    let mut between = 0usize;
    let mut seen_entity = false;
    let mut seen_relation = false;
    for (lineno, line) in lines {
        let (kind, decl) = if let Some(rest) = line.strip_prefix("#T_SP=") {
            ("span", rest)
        } else if let Some(rest) = line.strip_prefix("#T_RL=") {
            ("relation", rest)
        } else if let Some(rest) = line.strip_prefix("#T_CH=") {
            ("chain", rest)
        } else {
            continue;
        };
        let mut parts = decl.split('|');
        let name = parts.next().unwrap_or_default().to_string();
        let features = parts.count();
        match kind {
            "span" if !seen_entity && features == 3 => seen_entity = true,
            "relation" if seen_entity && !seen_relation => seen_relation = true,
            _ => {
                notices.push(format!(
                    "{file}: ignoring additional {kind} layer {name:?} ({features} columns)"
                ));
                if !seen_entity {
                    leading += features;
                } else if !seen_relation {
                    between += features;
                } else {
                    return Err(TabularError::Grammar {
                        file: file.to_string(),
                        line: *lineno,
                        message: "layers after the relation layer are not supported".to_string(),
                    });
                }
            }
        }
    }
    if !seen_entity {
        return Err(TabularError::Grammar {
            file: file.to_string(),
            line: 1,
            message: "no span layer with entity-type, global entity-name, and Wikidata features"
                .to_string(),
        });
    }
    Ok(ColumnLayout {
        leading,
        between,
        has_relation_layer: seen_relation,
    })
}

fn parse_index_pair(file: &str, line: usize, s: &str) -> Result<(usize, usize), TabularError> {
    let err = || TabularError::Grammar {
        file: file.to_string(),
        line,
        message: format!("malformed index pair {s:?}"),
    };
    let (a, b) = s.split_once('-').ok_or_else(err)?;
    Ok((a.parse().map_err(|_| err())?, b.parse().map_err(|_| err())?))
}

fn parse_document(file: &str, input: &str, notices: &mut Vec<String>) -> Result<Vec<TokenRow>, TabularError> {
    let numbered: Vec<(usize, &str)> = input.lines().enumerate().map(|(i, l)| (i + 1, l)).collect();
    let layout = parse_layout(file, &numbered, notices)?;
    let mut rows = Vec::new();
    for (lineno, line) in numbered {
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        let needed = 3 + layout.leading + 3 + layout.between + if layout.has_relation_layer { 2 } else { 0 };
        if fields.len() < needed {
            return Err(TabularError::Grammar {
                file: file.to_string(),
                line: lineno,
                message: format!("expected {needed} tab-separated fields, found {}", fields.len()),
            });
        }
        let (sent, tok) = parse_index_pair(file, lineno, fields[0])?;
        let (start, end) = parse_index_pair(file, lineno, fields[1])?;
        let text = unescape(fields[2]);
        let entity_base = 3 + layout.leading;
        let rel_base = entity_base + 3 + layout.between;
        rows.push(TokenRow {
            line: lineno,
            sent,
            tok,
            start,
            end,
            text,
            entity_type: parse_cell(fields[entity_base]),
            global_entity: parse_cell(fields[entity_base + 1]),
            wikidata: parse_cell(fields[entity_base + 2]),
            rel_label: if layout.has_relation_layer {
                parse_cell(fields[rel_base])
            } else {
                Vec::new()
            },
            rel_pointer: if layout.has_relation_layer {
                parse_pointer_cell(fields[rel_base + 1])
            } else {
                Vec::new()
            },
        });
    }
    Ok(rows)
}

fn reconstruct_text(file: &str, rows: &[TokenRow]) -> Result<String, TabularError> {
    let mut text: Vec<char> = Vec::new();
    for row in rows {
        let token_len = row.text.chars().count();
        if row.end.saturating_sub(row.start) != token_len {
            return Err(TabularError::OffsetMismatch {
                file: file.to_string(),
                line: row.line,
                message: format!(
                    "token {:?} has {token_len} code points but declares offsets {}-{}",
                    row.text, row.start, row.end
                ),
            });
        }
        if row.start < text.len() {
            return Err(TabularError::OffsetMismatch {
                file: file.to_string(),
                line: row.line,
                message: format!(
                    "token offset {} overlaps previously reconstructed text of length {}",
                    row.start,
                    text.len()
                ),
            });
        }
        while text.len() < row.start {
            text.push(' ');
        }
        text.extend(row.text.chars());
    }
    Ok(text.into_iter().collect())
}

/// Normalizes a Wikidata cell value to a bare QID, noting full-URL inputs.
fn canonical_qid(file: &str, value: &str, notices: &mut Vec<String>) -> String {
    if let Some(tail) = value
        .strip_prefix("https://www.wikidata.org/wiki/")
        .or_else(|| value.strip_prefix("http://www.wikidata.org/wiki/"))
        .or_else(|| value.strip_prefix("http://www.wikidata.org/entity/"))
        .or_else(|| value.strip_prefix("https://www.wikidata.org/entity/"))
    {
        notices.push(format!(
            "{file}: normalized full Wikidata URL {value:?} to {tail:?}"
        ));
        tail.to_string()
    } else {
        value.to_string()
    }
}

/// Imports one tabular export file per document and assembles a corpus.
///
/// `discourse_assignment` maps document ids to discourse ids; unmapped
/// documents take the digit prefix of their `<digits>_<outlet>` id.
pub fn import_tabular_export(
    files: &BTreeMap<String, Vec<u8>>,
    discourse_assignment: &BTreeMap<String, String>,
) -> Result<ImportOutcome, TabularError> {
    let mut notices = Vec::new();
    let mut discourses: BTreeMap<String, Vec<Document>> = BTreeMap::new();

    for (doc_id, bytes) in files {
        let (digits, outlet_str) = doc_id.split_once('_').unwrap_or(("", ""));
        let outlet: OutletCode = outlet_str
            .parse()
            .map_err(|_| TabularError::BadDocumentId(doc_id.clone()))?;
        let discourse_id = match discourse_assignment.get(doc_id) {
            Some(d) => d.clone(),
            None if !digits.is_empty() && digits.chars().all(|c| c.is_ascii_digit()) => {
                digits.to_string()
            }
            None => return Err(TabularError::BadDocumentId(doc_id.clone())),
        };

        let input = std::str::from_utf8(bytes).map_err(|e| TabularError::Grammar {
            file: doc_id.clone(),
            line: 0,
            message: format!("not valid UTF-8: {e}"),
        })?;
        let rows = parse_document(doc_id, input, &mut notices)?;
        let text = reconstruct_text(doc_id, &rows)?;

        // Mentions: values sharing a disambiguation index merge into one
        // span; index 0 values are single-token annotations.
        #[derive(Debug)]
        struct PartialMention {
            start: usize,
            end: usize,
            entity_type: Option<String>,
            global_entity: Option<String>,
            wikidata: Option<String>,
        }
        let mut by_index: BTreeMap<usize, usize> = BTreeMap::new(); // disambiguation -> mention slot
        let mut partials: Vec<PartialMention> = Vec::new();

        for row in &rows {
            for (pos, et) in row.entity_type.iter().enumerate() {
                let ge = row.global_entity.get(pos);
                let wd = row.wikidata.get(pos);
                let slot = if et.index > 0 {
                    *by_index.entry(et.index).or_insert_with(|| {
                        partials.push(PartialMention {
                            start: row.start,
                            end: row.end,
                            entity_type: None,
                            global_entity: None,
                            wikidata: None,
                        });
                        partials.len() - 1
                    })
                } else {
                    partials.push(PartialMention {
                        start: row.start,
                        end: row.end,
                        entity_type: None,
                        global_entity: None,
                        wikidata: None,
                    });
                    partials.len() - 1
                };
                let p = &mut partials[slot];
                p.start = p.start.min(row.start);
                p.end = p.end.max(row.end);
                if p.entity_type.is_none() {
                    p.entity_type = et.value.clone();
                }
                if p.global_entity.is_none() {
                    p.global_entity = ge.and_then(|v| v.value.clone());
                }
                if p.wikidata.is_none() {
                    p.wikidata = wd.and_then(|v| v.value.clone());
                }
                // remember which slot an index-0 annotation of this token maps to
                if et.index == 0 {
                    by_index.entry(token_key(row.sent, row.tok)).or_insert(slot);
                }
            }
        }

        let mut mentions = Vec::new();
        for (i, p) in partials.iter().enumerate() {
            let entity_type = p.entity_type.clone().ok_or_else(|| TabularError::Grammar {
                file: doc_id.clone(),
                line: 0,
                message: "span annotation without entity-type value".to_string(),
            })?;
            entity_type
                .parse::<EntityType>()
                .map_err(|_| TabularError::Grammar {
                    file: doc_id.clone(),
                    line: 0,
                    message: format!("unknown entity type {entity_type:?}"),
                })?;
            mentions.push(Mention {
                id: format!("m{}", i + 1),
                span: Span::new(p.start, p.end),
                entity_type,
                global_entity: p.global_entity.clone().filter(|s| !s.is_empty()),
                wikidata: p
                    .wikidata
                    .as_deref()
                    .map(|w| canonical_qid(doc_id, w, &mut notices))
                    .filter(|s| !s.is_empty()),
            });
        }

        // Relations: the cell sits on the anaphor's row and points at the
        // antecedent's token address.
        let resolve = |sent: usize, tok: usize, index: usize| -> Option<usize> {
            if index > 0 {
                by_index.get(&index).copied()
            } else {
                by_index.get(&token_key(sent, tok)).copied()
            }
        };
        let mut relations = Vec::new();
        for row in &rows {
            for (pos, label_cell) in row.rel_label.iter().enumerate() {
                let label = match &label_cell.value {
                    Some(l) => l.clone(),
                    None => continue,
                };
                label
                    .parse::<RelationType>()
                    .map_err(|_| TabularError::Grammar {
                        file: doc_id.clone(),
                        line: row.line,
                        message: format!("unknown relation label {label:?}"),
                    })?;
                let pointer = row
                    .rel_pointer
                    .get(pos)
                    .and_then(|c| c.value.clone())
                    .ok_or_else(|| TabularError::Grammar {
                        file: doc_id.clone(),
                        line: row.line,
                        message: "relation label without source pointer".to_string(),
                    })?;
                // pointer: `sent-tok` or `sent-tok[targetIdx_sourceIdx]`
                let (addr, target_idx, source_idx) = match pointer.find('[') {
                    Some(pos) if pointer.ends_with(']') => {
                        let inner = &pointer[pos + 1..pointer.len() - 1];
                        let (t, s) =
                            inner.split_once('_').ok_or_else(|| TabularError::Grammar {
                                file: doc_id.clone(),
                                line: row.line,
                                message: format!("malformed relation pointer {pointer:?}"),
                            })?;
                        let parse_idx = |v: &str| {
                            v.parse::<usize>().map_err(|_| TabularError::Grammar {
                                file: doc_id.clone(),
                                line: row.line,
                                message: format!("malformed relation pointer {pointer:?}"),
                            })
                        };
                        (&pointer[..pos], parse_idx(t)?, parse_idx(s)?)
                    }
                    _ => (pointer.as_str(), 0, 0),
                };
                let (tsent, ttok) = parse_index_pair(doc_id, row.line, addr)?;
                let target = resolve(tsent, ttok, target_idx).ok_or_else(|| {
                    TabularError::DanglingRelationPointer {
                        file: doc_id.clone(),
                        line: row.line,
                        pointer: pointer.clone(),
                    }
                })?;
                let source = resolve(row.sent, row.tok, source_idx).ok_or_else(|| {
                    TabularError::DanglingRelationPointer {
                        file: doc_id.clone(),
                        line: row.line,
                        pointer: format!("{}-{}", row.sent, row.tok),
                    }
                })?;
                relations.push(RelationEdge {
                    source: mentions[source].id.clone(),
                    target: mentions[target].id.clone(),
                    label,
                });
            }
        }

        discourses.entry(discourse_id.clone()).or_default().push(Document {
            id: doc_id.clone(),
            discourse_id,
            outlet,
            text,
            mentions,
            relations,
        });
    }

    let mut corpus = Corpus::new();
    corpus.discourses = discourses
        .into_iter()
        .map(|(id, documents)| Discourse { id, documents })
        .collect();
    Ok(ImportOutcome { corpus, notices })
}

// Index-0 (single-token) annotations are keyed per token in the same map
// as disambiguation indices, offset far above any real index.
fn token_key(sent: usize, tok: usize) -> usize {
    1_000_000 + sent * 10_000 + tok
}
