//! Wikidata entity search and verification with an on-disk cache and a
//! strict offline mode.
//!
//! The client is a shared handle: live requests are serialized and spaced
//! at least 100 ms apart, cache reads are concurrent, cache writes are
//! atomic (write to a temp file, then rename). In offline mode the client
//! never touches the network; cache misses surface as
//! [`WikidataError::OfflineMiss`]. The endpoint is overridable through the
//! `DIVCDCR_WIKIDATA_URL` environment variable.

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant, SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::model::{
    derive_local_clusters_lenient, is_valid_qid, Corpus, Severity, ValidationFinding,
};

/// Default entity API endpoint.
pub const DEFAULT_BASE_URL: &str = "https://www.wikidata.org/w/api.php";

/// Environment variable overriding the endpoint.
pub const BASE_URL_ENV: &str = "DIVCDCR_WIKIDATA_URL";

/// Default cache time-to-live: identifiers are stable, labels drift slowly.
pub const DEFAULT_TTL: Duration = Duration::from_secs(30 * 24 * 3600);

/// Minimum spacing between live requests.
pub const MIN_REQUEST_INTERVAL: Duration = Duration::from_millis(100);

#[derive(Debug, Error)]
pub enum WikidataError {
    #[error("network error: {0}")]
    Network(String),
    #[error("service returned status {0}")]
    Service(u16),
    #[error("offline and not cached: {0}")]
    OfflineMiss(String),
    #[error("label is empty after trimming")]
    EmptyLabel,
    #[error("{0:?} is not a QID (expected Q followed by digits)")]
    BadQid(String),
    #[error("unexpected service payload: {0}")]
    Payload(String),
    #[error("cache error: {0}")]
    Cache(#[from] std::io::Error),
}

/// One entry of the service's search ranking.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntityCandidate {
    pub qid: String,
    pub label: String,
    pub description: String,
}

/// Outcome of verifying a QID.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QidStatus {
    pub exists: bool,
    pub canonical_label: String,
}

/// Transport abstraction so tests and examples can run without a network.
pub trait Transport: Send + Sync {
    fn get(&self, url: &str) -> Result<String, WikidataError>;
}

/// Live HTTPS transport.
pub struct HttpTransport;

impl Transport for HttpTransport {
    fn get(&self, url: &str) -> Result<String, WikidataError> {
        match ureq::get(url).call() {
            Ok(response) => response
                .into_string()
                .map_err(|e| WikidataError::Network(e.to_string())),
            Err(ureq::Error::Status(status, _)) => Err(WikidataError::Service(status)),
            Err(e) => Err(WikidataError::Network(e.to_string())),
        }
    }
}

/// Canned transport serving recorded payloads, matched by URL substring.
/// Counts every call, so tests can assert that offline mode performs none.
#[derive(Default)]
pub struct StaticTransport {
    responses: Vec<(String, String)>,
    calls: AtomicUsize,
}

impl StaticTransport {
    pub fn new() -> StaticTransport {
        StaticTransport::default()
    }

    /// Serves `body` for any URL containing `url_fragment`.
    pub fn with_response(mut self, url_fragment: &str, body: &str) -> StaticTransport {
        self.responses.push((url_fragment.to_string(), body.to_string()));
        self
    }

    pub fn calls(&self) -> usize {
        self.calls.load(Ordering::SeqCst)
    }
}

impl Transport for StaticTransport {
    fn get(&self, url: &str) -> Result<String, WikidataError> {
        self.calls.fetch_add(1, Ordering::SeqCst);
        self.responses
            .iter()
            .find(|(fragment, _)| url.contains(fragment))
            .map(|(_, body)| body.clone())
            .ok_or_else(|| WikidataError::Service(404))
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct CacheEntry {
    url: String,
    body: String,
    fetched_at: u64,
    ttl_secs: u64,
}

/// Client configuration; see [`WikidataClient::new`].
pub struct ClientConfig {
    pub base_url: String,
    pub cache_dir: PathBuf,
    pub offline: bool,
    pub ttl: Duration,
}

impl ClientConfig {
    /// Base URL from the environment or the default, cache in `cache_dir`.
    pub fn with_cache_dir(cache_dir: impl Into<PathBuf>) -> ClientConfig {
        ClientConfig {
            base_url: std::env::var(BASE_URL_ENV).unwrap_or_else(|_| DEFAULT_BASE_URL.to_string()),
            cache_dir: cache_dir.into(),
            offline: false,
            ttl: DEFAULT_TTL,
        }
    }

    pub fn offline(mut self, offline: bool) -> ClientConfig {
        self.offline = offline;
        self
    }
}

pub struct WikidataClient {
    config: ClientConfig,
    transport: Box<dyn Transport>,
    // serializes live requests and enforces the request spacing
    last_request: Mutex<Option<Instant>>,
}

impl WikidataClient {
    pub fn new(config: ClientConfig) -> WikidataClient {
        WikidataClient::with_transport(config, Box::new(HttpTransport))
    }

    pub fn with_transport(config: ClientConfig, transport: Box<dyn Transport>) -> WikidataClient {
        WikidataClient {
            config,
            transport,
            last_request: Mutex::new(None),
        }
    }

    pub fn is_offline(&self) -> bool {
        self.config.offline
    }

    fn cache_path(&self, url: &str) -> PathBuf {
        let digest = Sha256::digest(url.as_bytes());
        let mut name = String::with_capacity(64);
        for byte in digest {
            name.push_str(&format!("{byte:02x}"));
        }
        self.config.cache_dir.join(format!("{name}.json"))
    }

    fn cache_read(&self, url: &str) -> Option<String> {
        let raw = std::fs::read_to_string(self.cache_path(url)).ok()?;
        let entry: CacheEntry = serde_json::from_str(&raw).ok()?;
        let now = SystemTime::now().duration_since(UNIX_EPOCH).ok()?.as_secs();
        if now.saturating_sub(entry.fetched_at) > entry.ttl_secs {
            return None; // expired entries are treated as absent
        }
        Some(entry.body)
    }

    fn cache_write(&self, url: &str, body: &str) -> Result<(), WikidataError> {
        std::fs::create_dir_all(&self.config.cache_dir)?;
        let entry = CacheEntry {
            url: url.to_string(),
            body: body.to_string(),
            fetched_at: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
            ttl_secs: self.config.ttl.as_secs(),
        };
        let payload = serde_json::to_vec_pretty(&entry).expect("cache entry serializes");
        let final_path = self.cache_path(url);
        let tmp_path = final_path.with_extension("tmp");
        std::fs::write(&tmp_path, payload)?;
        std::fs::rename(&tmp_path, &final_path)?;
        Ok(())
    }

    fn request(&self, url: &str) -> Result<String, WikidataError> {
        if let Some(body) = self.cache_read(url) {
            return Ok(body);
        }
        if self.config.offline {
            return Err(WikidataError::OfflineMiss(url.to_string()));
        }
        let body = {
            let mut last = self.last_request.lock().expect("request lock");
            if let Some(t) = *last {
                let elapsed = t.elapsed();
                if elapsed < MIN_REQUEST_INTERVAL {
                    std::thread::sleep(MIN_REQUEST_INTERVAL - elapsed);
                }
            }
            let result = self.transport.get(url);
            *last = Some(Instant::now());
            result?
        };
        self.cache_write(url, &body)?;
        Ok(body)
    }

    fn build_url(&self, params: &[(&str, &str)]) -> String {
        let mut url = url::Url::parse(&self.config.base_url)
            .unwrap_or_else(|_| url::Url::parse(DEFAULT_BASE_URL).expect("default URL parses"));
        url.query_pairs_mut().extend_pairs(params);
        url.to_string()
    }

    /// Searches the knowledge graph for entities matching `label`, in
    /// service-ranked order, at most `limit` candidates.
    pub fn search_entity(
        &self,
        label: &str,
        limit: usize,
    ) -> Result<Vec<EntityCandidate>, WikidataError> {
        let label = label.trim();
        if label.is_empty() {
            return Err(WikidataError::EmptyLabel);
        }
        let limit_str = limit.to_string();
        let url = self.build_url(&[
            ("action", "wbsearchentities"),
            ("format", "json"),
            ("language", "en"),
            ("limit", &limit_str),
            ("search", label),
        ]);
        let body = self.request(&url)?;
        let parsed: serde_json::Value =
            serde_json::from_str(&body).map_err(|e| WikidataError::Payload(e.to_string()))?;
        let results = parsed
            .get("search")
            .and_then(|s| s.as_array())
            .ok_or_else(|| WikidataError::Payload("missing `search` array".to_string()))?;
        Ok(results
            .iter()
            .take(limit)
            .filter_map(|item| {
                Some(EntityCandidate {
                    qid: item.get("id")?.as_str()?.to_string(),
                    label: item
                        .get("label")
                        .and_then(|l| l.as_str())
                        .unwrap_or_default()
                        .to_string(),
                    description: item
                        .get("description")
                        .and_then(|d| d.as_str())
                        .unwrap_or_default()
                        .to_string(),
                })
            })
            .collect())
    }

    /// Checks whether `qid` exists and fetches its canonical English label.
    pub fn verify_qid(&self, qid: &str) -> Result<QidStatus, WikidataError> {
        if !is_valid_qid(qid) {
            return Err(WikidataError::BadQid(qid.to_string()));
        }
        let url = self.build_url(&[
            ("action", "wbgetentities"),
            ("format", "json"),
            ("props", "labels"),
            ("languages", "en"),
            ("ids", qid),
        ]);
        let body = self.request(&url)?;
        let parsed: serde_json::Value =
            serde_json::from_str(&body).map_err(|e| WikidataError::Payload(e.to_string()))?;
        let entity = parsed
            .get("entities")
            .and_then(|e| e.get(qid))
            .ok_or_else(|| WikidataError::Payload(format!("no entry for {qid}")))?;
        if entity.get("missing").is_some() {
            return Ok(QidStatus {
                exists: false,
                canonical_label: String::new(),
            });
        }
        let label = entity
            .pointer("/labels/en/value")
            .and_then(|v| v.as_str())
            .unwrap_or_default()
            .to_string();
        Ok(QidStatus {
            exists: true,
            canonical_label: label,
        })
    }
}

/// Audit rule ids, documented alongside the validator catalog: A01 warning
/// (unknown QID), A02 info (cluster name shares no token with the
/// canonical label), A03 info (link unverifiable, e.g. offline with a cold
/// cache), A04 info (URI-less cluster with a unique search candidate).
pub const AUDIT_RULES: [(&str, Severity); 4] = [
    ("A01", Severity::Warning),
    ("A02", Severity::Info),
    ("A03", Severity::Info),
    ("A04", Severity::Info),
];

fn audit_finding(
    rule_id: &str,
    document_id: &str,
    subject: String,
    offset: usize,
    message: String,
) -> ValidationFinding {
    let severity = AUDIT_RULES
        .iter()
        .find(|(id, _)| *id == rule_id)
        .map(|(_, s)| *s)
        .expect("audit rule id");
    ValidationFinding {
        rule_id: rule_id.to_string(),
        severity,
        document_id: Some(document_id.to_string()),
        subject,
        offset,
        message,
    }
}

fn tokens(s: &str) -> BTreeSet<String> {
    s.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(|t| t.to_lowercase())
        .collect()
}

/// Audits every cluster's knowledge-graph link. Degrades instead of
/// failing: unverifiable links become info findings.
pub fn audit_corpus_links(client: &WikidataClient, corpus: &Corpus) -> Vec<ValidationFinding> {
    let mut findings = Vec::new();
    for doc in corpus.documents() {
        for (cluster, _) in derive_local_clusters_lenient(doc) {
            let offset = cluster
                .mention_ids
                .first()
                .and_then(|id| doc.mention(id))
                .map(|m| m.span.start)
                .unwrap_or(0);
            let subject = format!("cluster {:?}", cluster.name);
            match cluster.uri.as_deref() {
                Some(uri) => match client.verify_qid(uri) {
                    Ok(status) if !status.exists => findings.push(audit_finding(
                        "A01",
                        &doc.id,
                        subject,
                        offset,
                        format!("no knowledge-graph entity with identifier {uri}"),
                    )),
                    Ok(status) => {
                        if tokens(&cluster.name)
                            .intersection(&tokens(&status.canonical_label))
                            .next()
                            .is_none()
                        {
                            findings.push(audit_finding(
                                "A02",
                                &doc.id,
                                subject,
                                offset,
                                format!(
                                    "cluster name {:?} shares no token with canonical label {:?} of {uri}",
                                    cluster.name, status.canonical_label
                                ),
                            ));
                        }
                    }
                    Err(WikidataError::OfflineMiss(_)) => findings.push(audit_finding(
                        "A03",
                        &doc.id,
                        subject,
                        offset,
                        format!("{uri} not verifiable offline (not cached)"),
                    )),
                    Err(e) => findings.push(audit_finding(
                        "A03",
                        &doc.id,
                        subject,
                        offset,
                        format!("{uri} not verifiable: {e}"),
                    )),
                },
                None => {
                    // suggest a link when the search is unambiguous
                    if let Ok(candidates) = client.search_entity(&cluster.name, 2) {
                        if let [only] = candidates.as_slice() {
                            findings.push(audit_finding(
                                "A04",
                                &doc.id,
                                subject,
                                offset,
                                format!(
                                    "unique candidate {} ({:?}) for unlinked cluster",
                                    only.qid, only.label
                                ),
                            ));
                        }
                    }
                }
            }
        }
    }
    findings.sort_by_key(|f| f.sort_key());
    findings
}
