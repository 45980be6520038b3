//! Imports annotation-tool TSV exports (one file per document) into the
//! native corpus format.

use std::collections::BTreeMap;

use divcdcr::ingest::{export_corpus, import_tabular_export};
use divcdcr::model::surface_text;

fn fixture(name: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn main() {
    // gather the per-document export files; the file stem is the document id
    let mut files = BTreeMap::new();
    for entry in std::fs::read_dir(fixture("tabular")).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().and_then(|e| e.to_str()) == Some("tsv") {
            let doc_id = path.file_stem().unwrap().to_string_lossy().into_owned();
            files.insert(doc_id, std::fs::read(&path).unwrap());
        }
    }
    let assignment: BTreeMap<String, String> =
        serde_json::from_slice(&std::fs::read(fixture("tabular/discourses.json")).unwrap())
            .unwrap();

    let outcome = import_tabular_export(&files, &assignment).expect("fixture imports");
    for notice in &outcome.notices {
        println!("notice: {notice}");
    }

    for doc in outcome.corpus.documents() {
        println!("{} (discourse {}, outlet {}):", doc.id, doc.discourse_id, doc.outlet);
        println!("  text: {:?}", doc.text);
        for m in &doc.mentions {
            println!(
                "  {} [{}..{}] {:?} {} {} {}",
                m.id,
                m.span.start,
                m.span.end,
                surface_text(&doc.text, m.span).unwrap(),
                m.entity_type,
                m.global_entity.as_deref().unwrap_or("-"),
                m.wikidata.as_deref().unwrap_or("-"),
            );
        }
    }

    println!("\nnative export:\n{}", String::from_utf8(export_corpus(&outcome.corpus)).unwrap());
}
