//! Shows how differently the outlets refer to one referent (frames) and
//! how relation use distributes over the outlet spectrum.

use divcdcr::graph::{extract_frames, relation_stats};
use divcdcr::ingest::parse_corpus;

fn fixture(name: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn main() {
    let corpus = parse_corpus(&std::fs::read(fixture("scheme.dcdcr.json")).unwrap()).unwrap();

    println!("frames for Q6279:");
    for frame in extract_frames(&corpus, "Q6279").expect("referent exists") {
        for (doc, surface, entity_type) in &frame.surfaces {
            println!("  [{}] {doc}: {surface:?} ({entity_type})", frame.outlet);
        }
    }

    // frames also work for URI-less referents, keyed by global name
    println!("\nframes for \"North and South Korea\":");
    for frame in extract_frames(&corpus, "North and South Korea").unwrap() {
        for (doc, surface, _) in &frame.surfaces {
            println!("  [{}] {doc}: {surface:?}", frame.outlet);
        }
    }

    println!("\nrelation edges by outlet:");
    let stats = relation_stats(&corpus, false);
    for ((outlet, label), count) in &stats.by_outlet {
        println!("  {outlet:<3} {label} {count}");
    }
    println!("\nedges per discourse:");
    for (discourse, count) in &stats.by_discourse {
        println!("  {discourse}: {count}");
    }
}
