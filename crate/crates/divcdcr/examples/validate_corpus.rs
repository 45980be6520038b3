//! Parses a corpus file and checks it against the rule catalog, then
//! breaks one annotation to show how findings look.

use divcdcr::ingest::parse_corpus;
use divcdcr::validate::{validate_corpus, CATALOG, ValidationConfig};

fn fixture(name: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn main() {
    let bytes = std::fs::read(fixture("scheme.dcdcr.json")).expect("fixture exists");
    let corpus = parse_corpus(&bytes).expect("fixture parses");

    let config = ValidationConfig::default();
    let findings = validate_corpus(&corpus, &config).expect("no unknown rules disabled");
    println!(
        "checked {} documents against {} rules: {} finding(s)",
        corpus.documents().count(),
        CATALOG.len(),
        findings.len()
    );

    // untrim one mention span: the surface now ends mid-punctuation
    let mut broken = corpus.clone();
    let doc = &mut broken.discourses[0].documents[0];
    doc.mentions[0].span.end += 1; // "Joe Biden " -> trailing space
    let findings = validate_corpus(&broken, &config).unwrap();
    println!("\nafter widening one mention span:");
    for f in &findings {
        println!("  {f}");
    }

    // individual rules can be switched off
    let mut relaxed = ValidationConfig::default();
    relaxed.disabled_rules.insert("V03".to_string());
    let remaining = validate_corpus(&broken, &relaxed).unwrap();
    println!("with V03 disabled: {} finding(s)", remaining.len());
}
