//! Reading and writing the native corpus format, plus import of the
//! annotation tool's tabular export.
//!
//! The native format is a single UTF-8 JSON file per corpus (extension
//! `.dcdcr.json`). Reading is strict: unknown keys are rejected and the
//! closed vocabularies are enforced. Absent optional fields are written as
//! empty strings and normalized to absent on read.

mod tabular;

pub use tabular::{import_tabular_export, ImportOutcome, TabularError};

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{
    Corpus, Discourse, Document, EntityType, Mention, OutletCode, RelationEdge, Span,
};

/// Current native format version.
pub const FORMAT_VERSION: &str = "1.0";

/// Conventional file extension of the native format.
pub const FILE_EXTENSION: &str = ".dcdcr.json";

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("schema error at {path}: {reason}")]
    Schema { path: String, reason: String },
    #[error("duplicate id {0:?}")]
    DuplicateId(String),
    #[error("value {value:?} is not a valid {field}")]
    BadEnum { value: String, field: &'static str },
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CorpusRepr {
    version: String,
    discourses: Vec<DiscourseRepr>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DiscourseRepr {
    id: String,
    documents: Vec<DocumentRepr>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DocumentRepr {
    id: String,
    outlet: String,
    text: String,
    mentions: Vec<MentionRepr>,
    relations: Vec<RelationRepr>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MentionRepr {
    id: String,
    start: usize,
    end: usize,
    entity_type: String,
    global_entity: String,
    wikidata: String,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RelationRepr {
    source: String,
    target: String,
    label: String,
}

fn none_if_empty(s: String) -> Option<String> {
    if s.is_empty() {
        None
    } else {
        Some(s)
    }
}

/// Parses a native corpus file. Structural invariants (id uniqueness, span
/// bounds, closed vocabularies, edge endpoint resolution) are checked here;
/// scheme-level rules are the validator's job.
pub fn parse_corpus(input: &[u8]) -> Result<Corpus, IngestError> {
    let text = std::str::from_utf8(input).map_err(|e| IngestError::Syntax {
        line: 0,
        column: 0,
        message: format!("input is not valid UTF-8: {e}"),
    })?;
    let repr: CorpusRepr = serde_json::from_str(text).map_err(|e| {
        if e.is_syntax() || e.is_eof() {
            IngestError::Syntax {
                line: e.line(),
                column: e.column(),
                message: e.to_string(),
            }
        } else {
            IngestError::Schema {
                path: format!("line {}, column {}", e.line(), e.column()),
                reason: e.to_string(),
            }
        }
    })?;

    if repr.version != FORMAT_VERSION {
        return Err(IngestError::Schema {
            path: "version".to_string(),
            reason: format!(
                "unsupported format version {:?}, expected {FORMAT_VERSION:?}",
                repr.version
            ),
        });
    }

    let mut corpus = Corpus {
        version: repr.version,
        discourses: Vec::new(),
    };
    let mut discourse_ids = BTreeSet::new();
    let mut document_ids = BTreeSet::new();

    for (di, disc) in repr.discourses.into_iter().enumerate() {
        if !discourse_ids.insert(disc.id.clone()) {
            return Err(IngestError::DuplicateId(disc.id));
        }
        let mut documents = Vec::new();
        for (ji, doc) in disc.documents.into_iter().enumerate() {
            let path = |field: &str| format!("discourses[{di}].documents[{ji}].{field}");
            if !document_ids.insert(doc.id.clone()) {
                return Err(IngestError::DuplicateId(doc.id));
            }
            let outlet: OutletCode = doc.outlet.parse().map_err(|_| IngestError::BadEnum {
                value: doc.outlet.clone(),
                field: "outlet",
            })?;
            let text_len = doc.text.chars().count();

            let mut mention_ids = BTreeSet::new();
            let mut mentions = Vec::new();
            for (mi, m) in doc.mentions.into_iter().enumerate() {
                if !mention_ids.insert(m.id.clone()) {
                    return Err(IngestError::DuplicateId(m.id));
                }
                m.entity_type
                    .parse::<EntityType>()
                    .map_err(|_| IngestError::BadEnum {
                        value: m.entity_type.clone(),
                        field: "entity_type",
                    })?;
                if m.start >= m.end || m.end > text_len {
                    return Err(IngestError::Schema {
                        path: path(&format!("mentions[{mi}]")),
                        reason: format!(
                            "span [{},{}) out of bounds for text of length {text_len}",
                            m.start, m.end
                        ),
                    });
                }
                mentions.push(Mention {
                    id: m.id,
                    span: Span::new(m.start, m.end),
                    entity_type: m.entity_type,
                    global_entity: none_if_empty(m.global_entity),
                    wikidata: none_if_empty(m.wikidata),
                });
            }

            let mut relations = Vec::new();
            for (ri, r) in doc.relations.into_iter().enumerate() {
                r.label
                    .parse::<crate::model::RelationType>()
                    .map_err(|_| IngestError::BadEnum {
                        value: r.label.clone(),
                        field: "label",
                    })?;
                for endpoint in [&r.source, &r.target] {
                    if !mention_ids.contains(endpoint) {
                        return Err(IngestError::Schema {
                            path: path(&format!("relations[{ri}]")),
                            reason: format!("edge endpoint {endpoint:?} is not a mention id"),
                        });
                    }
                }
                relations.push(RelationEdge {
                    source: r.source,
                    target: r.target,
                    label: r.label,
                });
            }

            documents.push(Document {
                id: doc.id,
                discourse_id: disc.id.clone(),
                outlet,
                text: doc.text,
                mentions,
                relations,
            });
        }
        corpus.discourses.push(Discourse {
            id: disc.id,
            documents,
        });
    }
    Ok(corpus)
}

/// Serializes a corpus deterministically: stable key order, discourses by
/// id, documents by id, mentions by (start, end, id), relations by
/// (source, target, label). Re-parsing the output of `export_corpus`
/// yields the input corpus back (up to canonical ordering).
pub fn export_corpus(corpus: &Corpus) -> Vec<u8> {
    let mut sorted = corpus.clone();
    sorted.normalize();
    let repr = CorpusRepr {
        version: sorted.version,
        discourses: sorted
            .discourses
            .into_iter()
            .map(|disc| DiscourseRepr {
                id: disc.id,
                documents: disc
                    .documents
                    .into_iter()
                    .map(|doc| DocumentRepr {
                        id: doc.id,
                        outlet: doc.outlet.as_str().to_string(),
                        text: doc.text,
                        mentions: doc
                            .mentions
                            .into_iter()
                            .map(|m| MentionRepr {
                                id: m.id,
                                start: m.span.start,
                                end: m.span.end,
                                entity_type: m.entity_type,
                                global_entity: m.global_entity.unwrap_or_default(),
                                wikidata: m.wikidata.unwrap_or_default(),
                            })
                            .collect(),
                        relations: doc
                            .relations
                            .into_iter()
                            .map(|r| RelationRepr {
                                source: r.source,
                                target: r.target,
                                label: r.label,
                            })
                            .collect(),
                    })
                    .collect(),
            })
            .collect(),
    };
    let mut out = serde_json::to_vec_pretty(&repr).expect("corpus serialization cannot fail");
    out.push(b'\n');
    out
}
