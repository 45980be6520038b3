//! Audits the knowledge-graph links of a corpus. Runs entirely from
//! recorded payloads so it works without a network; swap in
//! `WikidataClient::new` for live lookups (endpoint overridable through
//! the DIVCDCR_WIKIDATA_URL environment variable).

use divcdcr::ingest::parse_corpus;
use divcdcr::wikidata::{
    audit_corpus_links, ClientConfig, StaticTransport, WikidataClient,
};

fn fixture(name: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn recorded(name: &str) -> String {
    std::fs::read_to_string(fixture(&format!("wikidata/{name}"))).unwrap()
}

fn main() {
    let corpus = parse_corpus(&std::fs::read(fixture("scheme.dcdcr.json")).unwrap()).unwrap();

    let transport = StaticTransport::new()
        .with_response("ids=Q6279", &recorded("get_q6279.json"))
        .with_response("ids=Q39259", &recorded("get_q39259.json"))
        .with_response("ids=Q423", &recorded("get_q423.json"))
        .with_response("ids=Q9682", &recorded("get_q9682.json"))
        .with_response("ids=Q43274", &recorded("get_q43274.json"))
        .with_response("wbsearchentities", &recorded("search_north_and_south_korea.json"));

    let cache = tempfile::tempdir().unwrap();
    let client = WikidataClient::with_transport(
        ClientConfig::with_cache_dir(cache.path()),
        Box::new(transport),
    );

    // every QID verifies against its canonical label; the one unlinked
    // cluster gets a candidate suggestion
    let findings = audit_corpus_links(&client, &corpus);
    println!("audit with recorded payloads: {} finding(s)", findings.len());
    for f in &findings {
        println!("  {f}");
    }

    // direct lookups through the same client
    let status = client.verify_qid("Q6279").unwrap();
    println!("\nQ6279 exists: {}, canonical label {:?}", status.exists, status.canonical_label);
    for candidate in client.search_entity("North and South Korea", 5).unwrap() {
        println!("candidate {} {:?}: {}", candidate.qid, candidate.label, candidate.description);
    }

    // offline mode answers from the cache warmed above and never calls out
    let offline = WikidataClient::with_transport(
        ClientConfig::with_cache_dir(cache.path()).offline(true),
        Box::new(StaticTransport::new()),
    );
    let cached = audit_corpus_links(&offline, &corpus);
    println!("\noffline rerun from cache: {} finding(s), identical {}",
        cached.len(), cached == findings);
}
