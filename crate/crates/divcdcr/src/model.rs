//! Domain types of the annotation scheme and pure derivation functions.
//!
//! Offsets throughout the crate are Unicode code points, end-exclusive.
//! Identity coreference is implicit in a shared global entity name; only
//! near-identity and bridging relations are explicit edges. Entity types
//! and relation labels are stored as raw strings on [`Mention`] and
//! [`RelationEdge`] so that out-of-vocabulary values can be represented
//! and reported by the validator; the closed vocabularies themselves are
//! [`EntityType`], [`RelationType`], and [`OutletCode`].

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;
use unicode_properties::{GeneralCategoryGroup, UnicodeGeneralCategory};

/// Political-leaning abbreviation embedded in document ids.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum OutletCode {
    /// HuffPost ("Left").
    LL,
    /// The New York Times ("Lean Left").
    L,
    /// USA Today ("Middle").
    M,
    /// Fox News ("Right").
    R,
    /// Breitbart News Network ("Strong Right").
    RR,
}

impl OutletCode {
    pub const ALL: [OutletCode; 5] = [
        OutletCode::LL,
        OutletCode::L,
        OutletCode::M,
        OutletCode::R,
        OutletCode::RR,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            OutletCode::LL => "LL",
            OutletCode::L => "L",
            OutletCode::M => "M",
            OutletCode::R => "R",
            OutletCode::RR => "RR",
        }
    }
}

impl fmt::Display for OutletCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for OutletCode {
    type Err = UnknownValue;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        OutletCode::ALL
            .into_iter()
            .find(|o| o.as_str() == s)
            .ok_or_else(|| UnknownValue {
                value: s.to_string(),
                field: "outlet",
            })
    }
}

/// Entity types of the scheme's second annotation pass.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum EntityType {
    /// Person: an individual actor.
    Per,
    /// Organization that is not government-related.
    Org,
    /// Group of individuals acting collectively.
    Grp,
    /// Geo-political entity (government, population, location, nation).
    Gpe,
    /// Physical location that is not a GPE.
    Loc,
    /// Object or other static concept.
    Obj,
}

impl EntityType {
    pub const ALL: [EntityType; 6] = [
        EntityType::Per,
        EntityType::Org,
        EntityType::Grp,
        EntityType::Gpe,
        EntityType::Loc,
        EntityType::Obj,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            EntityType::Per => "PER",
            EntityType::Org => "ORG",
            EntityType::Grp => "GRP",
            EntityType::Gpe => "GPE",
            EntityType::Loc => "LOC",
            EntityType::Obj => "OBJ",
        }
    }
}

impl fmt::Display for EntityType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EntityType {
    type Err = UnknownValue;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        EntityType::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| UnknownValue {
                value: s.to_string(),
                field: "entity_type",
            })
    }
}

/// Near-identity and bridging relation labels of the third pass.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum RelationType {
    /// Metonymy: the anaphor highlights a different facet of the entity.
    Met,
    /// Meronymy: part-whole, stuff-object, overlapping sets, conjunction member.
    Mer,
    /// Class: an 'is-a' sub-/superclass connection.
    Cls,
    /// Spatio-temporal function: deviation in place, time, number, or person.
    Stf,
    /// Declarative: connection through a declaration or description.
    Dec,
    /// Bridging: distinct entities, one inferable from the other.
    Brd,
}

impl RelationType {
    pub const ALL: [RelationType; 6] = [
        RelationType::Met,
        RelationType::Mer,
        RelationType::Cls,
        RelationType::Stf,
        RelationType::Dec,
        RelationType::Brd,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            RelationType::Met => "MET",
            RelationType::Mer => "MER",
            RelationType::Cls => "CLS",
            RelationType::Stf => "STF",
            RelationType::Dec => "DEC",
            RelationType::Brd => "BRD",
        }
    }
}

impl fmt::Display for RelationType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RelationType {
    type Err = UnknownValue;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        RelationType::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| UnknownValue {
                value: s.to_string(),
                field: "label",
            })
    }
}

/// A value that is not a member of its closed vocabulary.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown value {value:?} for field {field}")]
pub struct UnknownValue {
    pub value: String,
    pub field: &'static str,
}

/// Label argument of [`precedence_rank`]: identity or one of the explicit
/// relation types.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PrecedenceLabel {
    Identity,
    Near(RelationType),
}

/// Preference rank used when choosing between relation labels: lower is
/// preferred. Identity beats everything; MET before MER before CLS before
/// DEC; BRD last. STF is ranked with CLS as a tie (the guidelines only pin
/// it down as "not BRD").
pub fn precedence_rank(label: PrecedenceLabel) -> u8 {
    match label {
        PrecedenceLabel::Identity => 0,
        PrecedenceLabel::Near(RelationType::Met) => 1,
        PrecedenceLabel::Near(RelationType::Mer) => 2,
        PrecedenceLabel::Near(RelationType::Cls) => 3,
        PrecedenceLabel::Near(RelationType::Stf) => 3,
        PrecedenceLabel::Near(RelationType::Dec) => 4,
        PrecedenceLabel::Near(RelationType::Brd) => 5,
    }
}

/// Code-point span, start inclusive, end exclusive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Span {
        Span { start, end }
    }

    pub fn len(&self) -> usize {
        self.end.saturating_sub(self.start)
    }

    pub fn is_empty(&self) -> bool {
        self.end <= self.start
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{})", self.start, self.end)
    }
}

/// A markable text span with its second-pass annotations.
///
/// Mentions annotated only in the third pass (near-identity endpoints that
/// participate in no identity cluster) carry neither a global entity name
/// nor a Wikidata QID.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mention {
    /// Unique within the owning document.
    pub id: String,
    pub span: Span,
    /// One of the closed entity types; checked by ingest and rule V01.
    pub entity_type: String,
    /// Global entity name shared by all identity mentions of one referent.
    pub global_entity: Option<String>,
    /// Wikidata QID (`Q` followed by digits), normally on the cluster's
    /// first mention only.
    pub wikidata: Option<String>,
}

impl Mention {
    pub fn entity_type(&self) -> Option<EntityType> {
        self.entity_type.parse().ok()
    }
}

/// Directed anaphor -> antecedent link labeled with a near-identity or
/// bridging type. Both endpoints are mention ids of the same document.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationEdge {
    /// Anaphor mention id.
    pub source: String,
    /// Antecedent mention id.
    pub target: String,
    /// One of the closed relation labels; checked by ingest and rule V02.
    pub label: String,
}

impl RelationEdge {
    pub fn label(&self) -> Option<RelationType> {
        self.label.parse().ok()
    }
}

/// One news article with its annotations.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    /// Document id, by convention `<discourse digits>_<outlet>`.
    pub id: String,
    /// Id of the containing discourse.
    pub discourse_id: String,
    pub outlet: OutletCode,
    /// Full article body.
    pub text: String,
    pub mentions: Vec<Mention>,
    pub relations: Vec<RelationEdge>,
}

impl Document {
    pub fn mention(&self, id: &str) -> Option<&Mention> {
        self.mentions.iter().find(|m| m.id == id)
    }

    /// Number of code points in the document text.
    pub fn text_len(&self) -> usize {
        self.text.chars().count()
    }
}

/// All documents of one discourse (articles reporting on the same happening).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Discourse {
    pub id: String,
    pub documents: Vec<Document>,
}

/// A whole annotated corpus.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Corpus {
    pub version: String,
    pub discourses: Vec<Discourse>,
}

impl Corpus {
    pub fn new() -> Corpus {
        Corpus {
            version: crate::ingest::FORMAT_VERSION.to_string(),
            discourses: Vec::new(),
        }
    }

    pub fn documents(&self) -> impl Iterator<Item = &Document> {
        self.discourses.iter().flat_map(|d| d.documents.iter())
    }

    pub fn document(&self, id: &str) -> Option<&Document> {
        self.documents().find(|d| d.id == id)
    }

    /// Sorts discourses, documents, mentions, and relations into the
    /// canonical order used by the exporter.
    pub fn normalize(&mut self) {
        for disc in &mut self.discourses {
            for doc in &mut disc.documents {
                doc.mentions
                    .sort_by(|a, b| (a.span, &a.id).cmp(&(b.span, &b.id)));
                doc.relations
                    .sort_by(|a, b| (&a.source, &a.target, &a.label).cmp(&(&b.source, &b.target, &b.label)));
            }
            disc.documents.sort_by(|a, b| a.id.cmp(&b.id));
        }
        self.discourses.sort_by(|a, b| a.id.cmp(&b.id));
    }
}

impl Default for Corpus {
    fn default() -> Self {
        Corpus::new()
    }
}

/// Per-document group of identity mentions sharing one global entity name.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalCluster {
    pub document_id: String,
    /// The shared global entity name.
    pub name: String,
    /// Member mention ids in document order (by span start).
    pub mention_ids: Vec<String>,
    /// The unique non-empty QID among the members, if any.
    pub uri: Option<String>,
}

impl LocalCluster {
    pub fn len(&self) -> usize {
        self.mention_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mention_ids.is_empty()
    }
}

/// Severity of a validation or audit finding.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Info,
    Warning,
    Error,
}

impl Severity {
    pub fn as_str(self) -> &'static str {
        match self {
            Severity::Info => "info",
            Severity::Warning => "warning",
            Severity::Error => "error",
        }
    }
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Severity {
    type Err = UnknownValue;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "info" => Ok(Severity::Info),
            "warning" => Ok(Severity::Warning),
            "error" => Ok(Severity::Error),
            _ => Err(UnknownValue {
                value: s.to_string(),
                field: "severity",
            }),
        }
    }
}

/// One rule violation or notice, locating the offending subject.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationFinding {
    /// Rule id from the published catalog, e.g. "V03".
    pub rule_id: String,
    pub severity: Severity,
    /// Absent for corpus-global findings.
    pub document_id: Option<String>,
    /// Human-readable subject reference (mention, edge, cluster, or name).
    pub subject: String,
    /// Span start of the subject, used as deterministic sort key; 0 when
    /// the subject has no position.
    pub offset: usize,
    pub message: String,
}

impl ValidationFinding {
    /// Deterministic ordering: (document, rule, subject offset, subject).
    pub fn sort_key(&self) -> (String, String, usize, String) {
        (
            self.document_id.clone().unwrap_or_default(),
            self.rule_id.clone(),
            self.offset,
            self.subject.clone(),
        )
    }
}

impl fmt::Display for ValidationFinding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {} {} {} {}",
            self.rule_id,
            self.severity,
            self.document_id.as_deref().unwrap_or("-"),
            self.subject,
            self.message
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("span {span} out of bounds for document of length {len}")]
    OutOfBounds { span: Span, len: usize },
    #[error("cluster {cluster:?} carries conflicting URIs {first:?} and {second:?}")]
    ConflictingUri {
        cluster: String,
        first: String,
        second: String,
    },
}

/// Exact code-point slice of `text` for `span`.
pub fn surface_text(text: &str, span: Span) -> Result<String, ModelError> {
    let len = text.chars().count();
    if span.start >= span.end || span.end > len {
        return Err(ModelError::OutOfBounds { span, len });
    }
    Ok(text
        .chars()
        .skip(span.start)
        .take(span.end - span.start)
        .collect())
}

/// True when the surface starts or ends with whitespace or punctuation
/// (Unicode general categories P*).
pub fn has_untrimmed_edge(surface: &str) -> bool {
    let edge_char = |c: char| {
        c.is_whitespace() || c.general_category_group() == GeneralCategoryGroup::Punctuation
    };
    surface.chars().next().is_some_and(edge_char)
        || surface.chars().last().is_some_and(edge_char)
}

/// Groups the document's named mentions into local identity clusters.
///
/// One cluster per distinct non-empty global entity name; mentions without
/// a name belong to no cluster. Clusters are ordered by their first
/// mention's offset, members by span start. The cluster URI is the unique
/// non-empty QID among the members; two distinct QIDs are an error.
pub fn derive_local_clusters(document: &Document) -> Result<Vec<LocalCluster>, ModelError> {
    let mut clusters = derive_local_clusters_lenient(document);
    for (cluster, extra) in &mut clusters {
        if let Some(second) = extra.first() {
            return Err(ModelError::ConflictingUri {
                cluster: cluster.name.clone(),
                first: cluster.uri.clone().unwrap_or_default(),
                second: second.clone(),
            });
        }
    }
    Ok(clusters.into_iter().map(|(c, _)| c).collect())
}

/// Like [`derive_local_clusters`] but tolerant of URI conflicts: each
/// cluster keeps the first URI in document order, and any further distinct
/// QIDs are returned alongside it. Used by the validator, which reports
/// conflicts as findings instead of failing.
pub fn derive_local_clusters_lenient(
    document: &Document,
) -> Vec<(LocalCluster, Vec<String>)> {
    let mut by_name: BTreeMap<&str, Vec<&Mention>> = BTreeMap::new();
    for m in &document.mentions {
        if let Some(name) = m.global_entity.as_deref() {
            if !name.is_empty() {
                by_name.entry(name).or_default().push(m);
            }
        }
    }
    let mut clusters: Vec<(LocalCluster, Vec<String>)> = by_name
        .into_iter()
        .map(|(name, mut members)| {
            members.sort_by_key(|m| (m.span, m.id.clone()));
            let mut uri: Option<String> = None;
            let mut extra = Vec::new();
            for m in &members {
                if let Some(q) = m.wikidata.as_deref().filter(|q| !q.is_empty()) {
                    match uri.as_deref() {
                        None => uri = Some(q.to_string()),
                        Some(u) if u != q && !extra.iter().any(|e| e == q) => {
                            extra.push(q.to_string())
                        }
                        _ => {}
                    }
                }
            }
            (
                LocalCluster {
                    document_id: document.id.clone(),
                    name: name.to_string(),
                    mention_ids: members.iter().map(|m| m.id.clone()).collect(),
                    uri,
                },
                extra,
            )
        })
        .collect();
    // order clusters by first mention offset
    let first_offset = |c: &LocalCluster| {
        c.mention_ids
            .first()
            .and_then(|id| document.mention(id))
            .map(|m| m.span.start)
            .unwrap_or(0)
    };
    clusters.sort_by_key(|(c, _)| (first_offset(c), c.name.clone()));
    clusters
}

/// True when `id` has the conventional `<digits>_<outlet>` form.
pub fn is_conventional_document_id(id: &str) -> bool {
    match id.split_once('_') {
        Some((digits, outlet)) => {
            !digits.is_empty()
                && digits.chars().all(|c| c.is_ascii_digit())
                && outlet.parse::<OutletCode>().is_ok()
        }
        None => false,
    }
}

/// True when `qid` matches `Q` followed by one or more digits.
pub fn is_valid_qid(qid: &str) -> bool {
    let mut chars = qid.chars();
    chars.next() == Some('Q') && {
        let rest = chars.as_str();
        !rest.is_empty() && rest.chars().all(|c| c.is_ascii_digit())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mention(id: &str, start: usize, end: usize, name: Option<&str>, qid: Option<&str>) -> Mention {
        Mention {
            id: id.to_string(),
            span: Span::new(start, end),
            entity_type: "PER".to_string(),
            global_entity: name.map(String::from),
            wikidata: qid.map(String::from),
        }
    }

    fn doc(mentions: Vec<Mention>) -> Document {
        Document {
            id: "0_L".to_string(),
            discourse_id: "0".to_string(),
            outlet: OutletCode::L,
            text: "Joe Biden arrived in Berlin yesterday, but the president did not come alone."
                .to_string(),
            mentions,
            relations: Vec::new(),
        }
    }

    #[test]
    fn closed_vocabularies_reject_unknown_values() {
        assert!("PERSON".parse::<EntityType>().is_err());
        assert!("met".parse::<RelationType>().is_err());
        assert!("C".parse::<OutletCode>().is_err());
        assert_eq!("GPE".parse::<EntityType>().unwrap(), EntityType::Gpe);
        assert_eq!("RR".parse::<OutletCode>().unwrap(), OutletCode::RR);
    }

    #[test]
    fn precedence_orders_identity_first_and_bridging_last() {
        assert_eq!(precedence_rank(PrecedenceLabel::Identity), 0);
        assert_eq!(precedence_rank(PrecedenceLabel::Near(RelationType::Met)), 1);
        assert_eq!(precedence_rank(PrecedenceLabel::Near(RelationType::Mer)), 2);
        assert_eq!(precedence_rank(PrecedenceLabel::Near(RelationType::Brd)), 5);
        for t in RelationType::ALL {
            let r = precedence_rank(PrecedenceLabel::Near(t));
            assert!(r > 0);
            if t != RelationType::Brd {
                assert!(r < precedence_rank(PrecedenceLabel::Near(RelationType::Brd)));
            }
        }
    }

    #[test]
    fn surface_text_slices_code_points() {
        assert_eq!(surface_text("abc", Span::new(0, 3)).unwrap(), "abc");
        assert_eq!(surface_text("héllo", Span::new(1, 2)).unwrap(), "é");
        assert!(matches!(
            surface_text("a b", Span::new(2, 2)),
            Err(ModelError::OutOfBounds { .. })
        ));
        assert!(surface_text("abc", Span::new(1, 4)).is_err());
    }

    #[test]
    fn untrimmed_edges_cover_whitespace_and_unicode_punctuation() {
        assert!(has_untrimmed_edge(" the president"));
        assert!(has_untrimmed_edge("Biden,"));
        assert!(has_untrimmed_edge("“Biden"));
        assert!(!has_untrimmed_edge("the president"));
        assert!(!has_untrimmed_edge("€2.3 billion"));
    }

    #[test]
    fn biden_example_forms_one_cluster_with_uri() {
        let d = doc(vec![
            mention("m1", 0, 9, Some("Joe Biden"), Some("Q6279")),
            mention("m2", 43, 56, Some("Joe Biden"), None),
        ]);
        let clusters = derive_local_clusters(&d).unwrap();
        assert_eq!(clusters.len(), 1);
        assert_eq!(clusters[0].name, "Joe Biden");
        assert_eq!(clusters[0].mention_ids, vec!["m1", "m2"]);
        assert_eq!(clusters[0].uri.as_deref(), Some("Q6279"));
    }

    #[test]
    fn empty_document_has_no_clusters() {
        assert!(derive_local_clusters(&doc(vec![])).unwrap().is_empty());
    }

    #[test]
    fn grouping_matches_brute_force_by_name() {
        let d = doc(vec![
            mention("m1", 0, 3, Some("A"), None),
            mention("m2", 4, 9, Some("B"), None),
            mention("m3", 10, 16, Some("A"), None),
            mention("m4", 21, 27, Some("B"), None),
            mention("m5", 28, 37, None, None),
        ]);
        let clusters = derive_local_clusters(&d).unwrap();
        assert_eq!(clusters.len(), 2);
        assert!(clusters.iter().all(|c| c.len() == 2));
        let all: Vec<&String> = clusters.iter().flat_map(|c| &c.mention_ids).collect();
        assert!(!all.contains(&&"m5".to_string()));
    }

    #[test]
    fn cluster_derivation_is_order_independent() {
        let mut mentions = vec![
            mention("m1", 0, 3, Some("A"), Some("Q1")),
            mention("m2", 4, 9, Some("A"), None),
            mention("m3", 10, 16, Some("B"), None),
            mention("m4", 21, 27, Some("B"), None),
        ];
        let a = derive_local_clusters(&doc(mentions.clone())).unwrap();
        mentions.reverse();
        let b = derive_local_clusters(&doc(mentions)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn conflicting_uris_are_an_error() {
        let d = doc(vec![
            mention("m1", 0, 3, Some("A"), Some("Q1")),
            mention("m2", 4, 9, Some("A"), Some("Q2")),
        ]);
        assert!(matches!(
            derive_local_clusters(&d),
            Err(ModelError::ConflictingUri { .. })
        ));
    }

    #[test]
    fn repeated_identical_uri_is_not_a_conflict() {
        let d = doc(vec![
            mention("m1", 0, 3, Some("A"), Some("Q1")),
            mention("m2", 4, 9, Some("A"), Some("Q1")),
        ]);
        assert_eq!(
            derive_local_clusters(&d).unwrap()[0].uri.as_deref(),
            Some("Q1")
        );
    }

    #[test]
    fn document_id_convention() {
        assert!(is_conventional_document_id("0_L"));
        assert!(is_conventional_document_id("12_RR"));
        assert!(!is_conventional_document_id("0-L"));
        assert!(!is_conventional_document_id("_L"));
        assert!(!is_conventional_document_id("0_XX"));
        assert!(!is_conventional_document_id("abc"));
    }

    #[test]
    fn qid_pattern() {
        assert!(is_valid_qid("Q6279"));
        assert!(is_valid_qid("Q0"));
        assert!(!is_valid_qid("6279"));
        assert!(!is_valid_qid("Q"));
        assert!(!is_valid_qid("Q12a"));
        assert!(!is_valid_qid("https://www.wikidata.org/wiki/Q6279"));
    }
}
