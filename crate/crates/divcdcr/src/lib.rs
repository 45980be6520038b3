//! Toolkit for diverse cross-document coreference annotations in news articles.
//!
//! The annotation model has four layers: mentions (text spans carrying an
//! entity type, an optional global entity name, and an optional Wikidata
//! QID), local per-document identity clusters, discourse entities grouping
//! corresponding clusters across the documents of one discourse, and global
//! referents uniting discourse entities across discourses through their
//! knowledge-graph identifier. Near-identity and bridging links between
//! mentions (MET, MER, CLS, STF, DEC, BRD) are explicit labeled edges.
//!
//! The crate parses and writes the native corpus format, imports tabular
//! annotation-tool exports, validates corpora against the scheme's rule
//! catalog, builds the cross-document entity layers, extracts per-outlet
//! frames, resolves and audits Wikidata links, and scores two annotations
//! of the same documents (MUC, B³, CEAF-e, LEA, CoNLL average, edge P/R/F1,
//! entity-type kappa).
//!
//! See the `examples/` directory for one runnable example per capability:
//!
//! ```text
//! cargo run --example validate_corpus
//! cargo run --example score_annotators
//! cargo run --example entity_layers
//! cargo run --example frames_and_stats
//! cargo run --example import_tabular
//! cargo run --example wikidata_audit
//! ```
//!
//! A thin command-line front end over the same functionality is available
//! as the `divcdcr` binary (`validate`, `convert`, `entities`, `frames`,
//! `stats`, `link-audit`, `score`).

pub mod cli;
pub mod graph;
pub mod ingest;
pub mod metrics;
pub mod model;
pub mod validate;
pub mod wikidata;

pub use model::{
    Corpus, Discourse, Document, EntityType, LocalCluster, Mention, OutletCode, RelationEdge,
    RelationType, Severity, Span, ValidationFinding,
};
