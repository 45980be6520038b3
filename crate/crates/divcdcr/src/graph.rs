//! Cross-document layers above the local clusters: discourse entities,
//! global referents, per-outlet frames, and relation statistics.
//!
//! Within one discourse, clusters group into a discourse entity when they
//! share a URI, or when they share a name and at least one of them has no
//! URI (the URI is the stronger key). Discourse entities with a URI unite
//! across discourses into global referents; entities without a URI are
//! never merged globally.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::model::{
    derive_local_clusters, Corpus, LocalCluster, ModelError, OutletCode, RelationType,
};

/// Key identifying a discourse entity: the members' URI if any has one,
/// otherwise the shared global name.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum ReferentKey {
    Uri(String),
    Name(String),
}

impl ReferentKey {
    pub fn as_str(&self) -> &str {
        match self {
            ReferentKey::Uri(s) | ReferentKey::Name(s) => s,
        }
    }
}

/// Grouping of corresponding local clusters within one discourse.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DiscourseEntity {
    pub discourse_id: String,
    pub key: ReferentKey,
    pub clusters: Vec<LocalCluster>,
}

/// A knowledge-graph-identified entity uniting discourse entities across
/// discourses.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GlobalReferent {
    pub uri: String,
    pub discourse_entities: Vec<DiscourseEntity>,
}

/// The word-choice expressions one outlet uses for one referent.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Frame {
    pub referent_key: String,
    pub outlet: OutletCode,
    /// (document id, mention surface, entity type) in document order.
    pub surfaces: Vec<(String, String, String)>,
}

/// Edge counts keyed by (outlet, relation type) plus per-discourse totals.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RelationStats {
    pub by_outlet: BTreeMap<(OutletCode, RelationType), usize>,
    pub by_discourse: BTreeMap<String, usize>,
}

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("grouping is ambiguous: {0}")]
    AmbiguousGrouping(String),
    #[error("unknown referent {0:?}")]
    UnknownReferent(String),
}

impl From<ModelError> for GraphError {
    fn from(e: ModelError) -> Self {
        GraphError::AmbiguousGrouping(e.to_string())
    }
}

/// Partitions each discourse's local clusters into discourse entities.
///
/// Fails with [`GraphError::AmbiguousGrouping`] when one global name maps
/// to two different URIs (rule V08a), because name-based grouping would
/// then be ill-defined.
pub fn build_discourse_entities(corpus: &Corpus) -> Result<Vec<DiscourseEntity>, GraphError> {
    // name -> URI must be functional for name grouping to be well defined
    let mut name_uri: BTreeMap<&str, &str> = BTreeMap::new();
    for doc in corpus.documents() {
        for m in &doc.mentions {
            if let (Some(name), Some(qid)) = (m.global_entity.as_deref(), m.wikidata.as_deref()) {
                if name.is_empty() || qid.is_empty() {
                    continue;
                }
                if let Some(prev) = name_uri.insert(name, qid) {
                    if prev != qid {
                        return Err(GraphError::AmbiguousGrouping(format!(
                            "name {name:?} maps to both {prev} and {qid}"
                        )));
                    }
                }
            }
        }
    }

    let mut entities = Vec::new();
    for discourse in &corpus.discourses {
        let mut clusters = Vec::new();
        for doc in &discourse.documents {
            clusters.extend(derive_local_clusters(doc)?);
        }
        // union-find over cluster indices
        let mut parent: Vec<usize> = (0..clusters.len()).collect();
        fn find(parent: &mut Vec<usize>, x: usize) -> usize {
            if parent[x] != x {
                let root = find(parent, parent[x]);
                parent[x] = root;
            }
            parent[x]
        }
        for i in 0..clusters.len() {
            for j in i + 1..clusters.len() {
                let (a, b) = (&clusters[i], &clusters[j]);
                let same_uri = matches!((&a.uri, &b.uri), (Some(x), Some(y)) if x == y);
                let name_link =
                    a.name == b.name && (a.uri.is_none() || b.uri.is_none());
                if same_uri || name_link {
                    let (ra, rb) = (find(&mut parent, i), find(&mut parent, j));
                    if ra != rb {
                        parent[ra] = rb;
                    }
                }
            }
        }
        let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for i in 0..clusters.len() {
            let root = find(&mut parent, i);
            groups.entry(root).or_default().push(i);
        }
        let mut discourse_entities: Vec<DiscourseEntity> = groups
            .into_values()
            .map(|members| {
                let clusters: Vec<LocalCluster> =
                    members.into_iter().map(|i| clusters[i].clone()).collect();
                let key = clusters
                    .iter()
                    .find_map(|c| c.uri.clone().map(ReferentKey::Uri))
                    .unwrap_or_else(|| ReferentKey::Name(clusters[0].name.clone()));
                DiscourseEntity {
                    discourse_id: discourse.id.clone(),
                    key,
                    clusters,
                }
            })
            .collect();
        discourse_entities.sort_by(|a, b| a.key.cmp(&b.key));
        entities.extend(discourse_entities);
    }
    Ok(entities)
}

/// Groups discourse entities by URI across discourses. Entities without a
/// URI never join a global referent.
pub fn build_global_referents(corpus: &Corpus) -> Result<Vec<GlobalReferent>, GraphError> {
    let entities = build_discourse_entities(corpus)?;
    let mut by_uri: BTreeMap<String, Vec<DiscourseEntity>> = BTreeMap::new();
    for entity in entities {
        if let ReferentKey::Uri(uri) = &entity.key {
            by_uri.entry(uri.clone()).or_default().push(entity);
        }
    }
    Ok(by_uri
        .into_iter()
        .map(|(uri, discourse_entities)| GlobalReferent {
            uri,
            discourse_entities,
        })
        .collect())
}

/// Extracts one frame per outlet for the referent given as a QID or a
/// global name. Frames contain only identity-cluster mentions; mentions
/// linked by near-identity edges are separate clusters and show up in
/// [`relation_stats`] instead.
pub fn extract_frames(corpus: &Corpus, referent: &str) -> Result<Vec<Frame>, GraphError> {
    let entities = build_discourse_entities(corpus)?;
    let matching: Vec<&DiscourseEntity> = entities
        .iter()
        .filter(|e| e.key.as_str() == referent)
        .collect();
    if matching.is_empty() {
        return Err(GraphError::UnknownReferent(referent.to_string()));
    }

    let mut by_outlet: BTreeMap<OutletCode, Vec<(String, String, String)>> = BTreeMap::new();
    for entity in matching {
        for cluster in &entity.clusters {
            let doc = corpus
                .document(&cluster.document_id)
                .expect("cluster references an existing document");
            for mention_id in &cluster.mention_ids {
                let m = doc.mention(mention_id).expect("cluster member exists");
                let surface =
                    crate::model::surface_text(&doc.text, m.span).unwrap_or_default();
                by_outlet.entry(doc.outlet).or_default().push((
                    doc.id.clone(),
                    surface,
                    m.entity_type.clone(),
                ));
            }
        }
    }
    let mut frames: Vec<Frame> = by_outlet
        .into_iter()
        .map(|(outlet, mut surfaces)| {
            surfaces.sort_by(|a, b| a.0.cmp(&b.0));
            Frame {
                referent_key: referent.to_string(),
                outlet,
                surfaces,
            }
        })
        .collect();
    frames.sort_by_key(|f| f.outlet);
    Ok(frames)
}

/// Tallies relation edges by (outlet, relation type) and per discourse.
/// With `dense`, every (outlet, type) combination is present, zeros
/// included. Edges with out-of-vocabulary labels are skipped.
pub fn relation_stats(corpus: &Corpus, dense: bool) -> RelationStats {
    let mut stats = RelationStats::default();
    if dense {
        for outlet in OutletCode::ALL {
            for label in RelationType::ALL {
                stats.by_outlet.insert((outlet, label), 0);
            }
        }
        for discourse in &corpus.discourses {
            stats.by_discourse.insert(discourse.id.clone(), 0);
        }
    }
    for discourse in &corpus.discourses {
        for doc in &discourse.documents {
            for edge in &doc.relations {
                if let Ok(label) = edge.label.parse::<RelationType>() {
                    *stats.by_outlet.entry((doc.outlet, label)).or_insert(0) += 1;
                    *stats.by_discourse.entry(discourse.id.clone()).or_insert(0) += 1;
                }
            }
        }
    }
    stats
}
