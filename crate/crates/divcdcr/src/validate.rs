//! Checks a corpus against the machine-checkable rules of the annotation
//! scheme and emits a deterministic list of findings.
//!
//! Rules that would require linguistic judgment (NP-hood, head identity,
//! date exclusion, MER-vs-MET precedence choices) are deliberately not
//! validated here; they remain manual-review checklist items.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::model::{
    derive_local_clusters_lenient, has_untrimmed_edge, is_conventional_document_id, is_valid_qid,
    surface_text, Corpus, Document, EntityType, RelationType, Severity, ValidationFinding,
};

/// One entry of the published rule catalog.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rule {
    pub id: &'static str,
    pub severity: Severity,
    pub description: &'static str,
}

/// The rule catalog, versioned with the artifact. Severities follow the
/// guideline language: hard exclusions are errors, advisory guidance is a
/// warning.
pub const CATALOG: [Rule; 16] = [
    Rule { id: "V01", severity: Severity::Error, description: "entity type must be one of PER, ORG, GRP, GPE, LOC, OBJ" },
    Rule { id: "V02", severity: Severity::Error, description: "relation label must be one of MET, MER, CLS, STF, DEC, BRD" },
    Rule { id: "V03", severity: Severity::Error, description: "mention surface must not start or end with whitespace or punctuation" },
    Rule { id: "V04", severity: Severity::Error, description: "every local cluster needs at least two mentions" },
    Rule { id: "V05", severity: Severity::Warning, description: "every mention should be in a cluster of two or more or be an edge endpoint" },
    Rule { id: "V06", severity: Severity::Error, description: "all mentions of one cluster must share one entity type" },
    Rule { id: "V07", severity: Severity::Warning, description: "within a cluster at most one mention should carry a Wikidata value" },
    Rule { id: "V08a", severity: Severity::Error, description: "one global entity name must not resolve to two different URIs" },
    Rule { id: "V08b", severity: Severity::Warning, description: "one URI should not appear under two different global names" },
    Rule { id: "V09", severity: Severity::Warning, description: "antecedent should not start after its anaphor (cataphora only if necessary)" },
    Rule { id: "V10", severity: Severity::Warning, description: "at most one MET edge between the same ordered pair of clusters" },
    Rule { id: "V11", severity: Severity::Error, description: "edge endpoints must be distinct mentions of the same document" },
    Rule { id: "V12", severity: Severity::Error, description: "Wikidata values must match Q followed by digits" },
    Rule { id: "V13", severity: Severity::Warning, description: "duplicate (source, target, label) edges" },
    Rule { id: "V14", severity: Severity::Warning, description: "document id should have the form <digits>_<outlet>" },
    Rule { id: "V15", severity: Severity::Warning, description: "two distinct mentions with identical spans are suspicious" },
];

pub fn rule(id: &str) -> Option<&'static Rule> {
    CATALOG.iter().find(|r| r.id == id)
}

#[derive(Debug, Clone, Default)]
pub struct ValidationConfig {
    /// Rule ids to skip. "V08" disables both V08a and V08b.
    pub disabled_rules: BTreeSet<String>,
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("unknown rule id {0:?} in disabled rules")]
    UnknownRule(String),
}

struct Collector<'a> {
    findings: Vec<ValidationFinding>,
    disabled: &'a BTreeSet<String>,
}

impl Collector<'_> {
    fn emit(
        &mut self,
        rule_id: &'static str,
        document_id: Option<&str>,
        subject: String,
        offset: usize,
        message: String,
    ) {
        if self.disabled.contains(rule_id)
            || (rule_id.starts_with("V08") && self.disabled.contains("V08"))
        {
            return;
        }
        let severity = rule(rule_id).expect("rule id in catalog").severity;
        self.findings.push(ValidationFinding {
            rule_id: rule_id.to_string(),
            severity,
            document_id: document_id.map(String::from),
            subject,
            offset,
            message,
        });
    }
}

/// Runs every enabled rule over the corpus. Findings are sorted by
/// (document id, rule id, subject offset) and are deterministic for
/// identical inputs.
pub fn validate_corpus(
    corpus: &Corpus,
    config: &ValidationConfig,
) -> Result<Vec<ValidationFinding>, ConfigError> {
    for id in &config.disabled_rules {
        if id != "V08" && rule(id).is_none() {
            return Err(ConfigError::UnknownRule(id.clone()));
        }
    }
    let mut c = Collector {
        findings: Vec::new(),
        disabled: &config.disabled_rules,
    };

    for doc in corpus.documents() {
        check_document(doc, &mut c);
    }
    check_name_uri_consistency(corpus, &mut c);

    c.findings.sort_by_key(|f| f.sort_key());
    Ok(c.findings)
}

fn check_document(doc: &Document, c: &mut Collector) {
    let clusters = derive_local_clusters_lenient(doc);

    // V14
    if !is_conventional_document_id(&doc.id) {
        c.emit(
            "V14",
            Some(&doc.id),
            format!("document {}", doc.id),
            0,
            "document id is not of the form <digits>_<outlet>".to_string(),
        );
    }

    for m in &doc.mentions {
        let subject = format!("mention {}", m.id);
        // V01
        if m.entity_type.parse::<EntityType>().is_err() {
            c.emit(
                "V01",
                Some(&doc.id),
                subject.clone(),
                m.span.start,
                format!("entity type {:?} is not in the closed set", m.entity_type),
            );
        }
        // V03
        if let Ok(surface) = surface_text(&doc.text, m.span) {
            if has_untrimmed_edge(&surface) {
                c.emit(
                    "V03",
                    Some(&doc.id),
                    subject.clone(),
                    m.span.start,
                    format!("surface {surface:?} starts or ends with whitespace or punctuation"),
                );
            }
        }
        // V12
        if let Some(qid) = m.wikidata.as_deref().filter(|q| !q.is_empty()) {
            if !is_valid_qid(qid) {
                c.emit(
                    "V12",
                    Some(&doc.id),
                    subject.clone(),
                    m.span.start,
                    format!("Wikidata value {qid:?} does not match Q<digits>"),
                );
            }
        }
        // V05
        let clustered = clusters
            .iter()
            .any(|(cl, _)| cl.len() >= 2 && cl.mention_ids.contains(&m.id));
        let linked = doc
            .relations
            .iter()
            .any(|r| r.source == m.id || r.target == m.id);
        if !clustered && !linked {
            c.emit(
                "V05",
                Some(&doc.id),
                subject,
                m.span.start,
                "mention participates in no cluster of two or more and no relation".to_string(),
            );
        }
    }

    for (cluster, _) in &clusters {
        let first_offset = cluster
            .mention_ids
            .first()
            .and_then(|id| doc.mention(id))
            .map(|m| m.span.start)
            .unwrap_or(0);
        let subject = format!("cluster {:?}", cluster.name);
        // V04
        if cluster.len() < 2 {
            c.emit(
                "V04",
                Some(&doc.id),
                subject.clone(),
                first_offset,
                format!("cluster has only {} mention(s)", cluster.len()),
            );
        }
        // V06
        let types: BTreeSet<&str> = cluster
            .mention_ids
            .iter()
            .filter_map(|id| doc.mention(id))
            .map(|m| m.entity_type.as_str())
            .collect();
        if types.len() > 1 {
            c.emit(
                "V06",
                Some(&doc.id),
                subject.clone(),
                first_offset,
                format!("cluster mixes entity types {types:?}"),
            );
        }
        // V07
        let with_uri = cluster
            .mention_ids
            .iter()
            .filter_map(|id| doc.mention(id))
            .filter(|m| m.wikidata.as_deref().is_some_and(|q| !q.is_empty()))
            .count();
        if with_uri > 1 {
            c.emit(
                "V07",
                Some(&doc.id),
                subject,
                first_offset,
                format!("{with_uri} mentions carry a Wikidata value; only the first needs one"),
            );
        }
    }

    let cluster_of = |mention_id: &str| -> Option<&str> {
        clusters
            .iter()
            .find(|(cl, _)| cl.mention_ids.iter().any(|id| id == mention_id))
            .map(|(cl, _)| cl.name.as_str())
    };

    let mut met_pairs: BTreeMap<(&str, &str), (usize, usize)> = BTreeMap::new();
    let mut edge_counts: BTreeMap<(&str, &str, &str), (usize, usize)> = BTreeMap::new();
    for edge in &doc.relations {
        let subject = format!("edge {}->{}", edge.source, edge.target);
        let source = doc.mention(&edge.source);
        let target = doc.mention(&edge.target);
        let offset = source.map(|m| m.span.start).unwrap_or(0);
        // V02
        if edge.label.parse::<RelationType>().is_err() {
            c.emit(
                "V02",
                Some(&doc.id),
                subject.clone(),
                offset,
                format!("relation label {:?} is not in the closed set", edge.label),
            );
        }
        // V11
        if edge.source == edge.target {
            c.emit(
                "V11",
                Some(&doc.id),
                subject.clone(),
                offset,
                "edge connects a mention to itself".to_string(),
            );
        } else if source.is_none() || target.is_none() {
            c.emit(
                "V11",
                Some(&doc.id),
                subject.clone(),
                offset,
                "edge endpoint does not resolve to a mention of this document".to_string(),
            );
        }
        // V09
        if let (Some(s), Some(t)) = (source, target) {
            if t.span.start > s.span.start {
                c.emit(
                    "V09",
                    Some(&doc.id),
                    subject.clone(),
                    s.span.start,
                    "antecedent starts after its anaphor (cataphoric link)".to_string(),
                );
            }
        }
        // V10 bookkeeping: MET edges between two clusters
        if edge.label == "MET" {
            if let (Some(sc), Some(tc)) = (cluster_of(&edge.source), cluster_of(&edge.target)) {
                let entry = met_pairs.entry((sc, tc)).or_insert((0, offset));
                entry.0 += 1;
                entry.1 = entry.1.min(offset);
            }
        }
        // V13 bookkeeping
        let entry = edge_counts
            .entry((&edge.source, &edge.target, &edge.label))
            .or_insert((0, offset));
        entry.0 += 1;
    }
    for ((sc, tc), (count, offset)) in met_pairs {
        if count > 1 {
            c.emit(
                "V10",
                Some(&doc.id),
                format!("clusters {sc:?}->{tc:?}"),
                offset,
                format!("{count} MET edges between the same ordered cluster pair; link only the first truly coreferential mention"),
            );
        }
    }
    for ((s, t, label), (count, offset)) in edge_counts {
        if count > 1 {
            c.emit(
                "V13",
                Some(&doc.id),
                format!("edge {s}->{t}"),
                offset,
                format!("edge ({s}, {t}, {label}) appears {count} times"),
            );
        }
    }

    // V15
    let mut by_span: BTreeMap<(usize, usize), Vec<&str>> = BTreeMap::new();
    for m in &doc.mentions {
        by_span
            .entry((m.span.start, m.span.end))
            .or_default()
            .push(&m.id);
    }
    for ((start, end), ids) in by_span {
        if ids.len() > 1 {
            c.emit(
                "V15",
                Some(&doc.id),
                format!("mentions {}", ids.join(", ")),
                start,
                format!("{} mentions share the exact span [{start},{end})", ids.len()),
            );
        }
    }
}

/// Corpus-global rules V08a and V08b over the name <-> URI mapping.
fn check_name_uri_consistency(corpus: &Corpus, c: &mut Collector) {
    let mut name_to_uris: BTreeMap<&str, BTreeSet<&str>> = BTreeMap::new();
    let mut uri_to_names: BTreeMap<&str, BTreeSet<&str>> = BTreeMap::new();
    for doc in corpus.documents() {
        for m in &doc.mentions {
            if let (Some(name), Some(qid)) = (m.global_entity.as_deref(), m.wikidata.as_deref()) {
                if !name.is_empty() && !qid.is_empty() {
                    name_to_uris.entry(name).or_default().insert(qid);
                    uri_to_names.entry(qid).or_default().insert(name);
                }
            }
        }
    }
    for (name, uris) in name_to_uris {
        if uris.len() > 1 {
            c.emit(
                "V08a",
                None,
                format!("name {name:?}"),
                0,
                format!(
                    "global entity name resolves to {} different URIs: {}; disambiguate by adding the document id to the name",
                    uris.len(),
                    uris.iter().copied().collect::<Vec<_>>().join(", ")
                ),
            );
        }
    }
    for (uri, names) in uri_to_names {
        if names.len() > 1 {
            c.emit(
                "V08b",
                None,
                format!("uri {uri}"),
                0,
                format!(
                    "URI appears under {} different global names: {}",
                    names.len(),
                    names
                        .iter()
                        .map(|n| format!("{n:?}"))
                        .collect::<Vec<_>>()
                        .join(", ")
                ),
            );
        }
    }
}

/// Maximum severity present in `findings`; `None` means clean.
pub fn max_severity(findings: &[ValidationFinding]) -> Option<Severity> {
    findings.iter().map(|f| f.severity).max()
}

/// True when no finding reaches `fail_level`.
pub fn passes(findings: &[ValidationFinding], fail_level: Severity) -> bool {
    max_severity(findings).is_none_or(|s| s < fail_level)
}
