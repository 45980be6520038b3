//! Compares two annotations of the same articles: cluster metrics,
//! relation-edge scores, and entity-type agreement.

use divcdcr::ingest::parse_corpus;
use divcdcr::metrics::score_corpora;

fn fixture(name: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn main() {
    let gold = parse_corpus(&std::fs::read(fixture("scheme.dcdcr.json")).unwrap()).unwrap();
    let sys = parse_corpus(&std::fs::read(fixture("system.dcdcr.json")).unwrap()).unwrap();

    let report = score_corpora(&gold, &sys).expect("same articles on both sides");

    let row = |name: &str, s: &divcdcr::metrics::PrF| {
        println!("{name:<12} p {:.4}  r {:.4}  f1 {:.4}", s.precision, s.recall, s.f1);
    };
    row("mentions", &report.mention_detection);
    row("muc", &report.muc);
    row("b3", &report.b_cubed);
    row("ceaf_e", &report.ceaf_e);
    row("lea", &report.lea);
    println!("{:<12} {:.4}", "conll", report.conll);

    println!("\nrelation edges:");
    row("micro", &report.edges.micro);
    for (label, s) in &report.edges.per_label {
        row(label, s);
    }
    for cell in &report.edges.confusion {
        println!(
            "confused {} as {} ({}x, precedence distance {:?})",
            cell.gold_label, cell.sys_label, cell.count, cell.precedence_distance
        );
    }

    if let Some(kappa) = report.entity_type_kappa {
        println!("\nentity-type kappa {kappa:.4}");
    }
}
