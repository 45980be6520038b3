//! Walks the entity layers bottom-up: local clusters per document,
//! discourse entities per discourse, and global referents across
//! discourses.

use divcdcr::graph::{build_discourse_entities, build_global_referents};
use divcdcr::ingest::parse_corpus;
use divcdcr::model::derive_local_clusters;

fn fixture(name: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn main() {
    let corpus = parse_corpus(&std::fs::read(fixture("scheme.dcdcr.json")).unwrap()).unwrap();

    println!("local clusters:");
    for doc in corpus.documents() {
        for cluster in derive_local_clusters(doc).expect("no URI conflicts") {
            println!(
                "  {} {:?} ({} mentions, uri {})",
                doc.id,
                cluster.name,
                cluster.len(),
                cluster.uri.as_deref().unwrap_or("-")
            );
        }
    }

    println!("\ndiscourse entities:");
    for entity in build_discourse_entities(&corpus).expect("well-defined grouping") {
        let members: Vec<String> = entity
            .clusters
            .iter()
            .map(|c| format!("{}:{}", c.document_id, c.name))
            .collect();
        println!(
            "  discourse {} [{}] <- {}",
            entity.discourse_id,
            entity.key.as_str(),
            members.join(", ")
        );
    }

    println!("\nglobal referents:");
    for referent in build_global_referents(&corpus).unwrap() {
        let discourses: Vec<&str> = referent
            .discourse_entities
            .iter()
            .map(|e| e.discourse_id.as_str())
            .collect();
        println!("  {} spans discourse(s) {}", referent.uri, discourses.join(", "));
    }
}
