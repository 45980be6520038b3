//! Command-line front end: `validate`, `convert`, `entities`, `frames`,
//! `stats`, `link-audit`, and `score` over a corpus file.
//!
//! Exit-code contract: 0 success/clean, 1 findings at or above the fail
//! level or a score threshold unmet, 2 usage/IO/parse errors. Stdout
//! carries only the payload; diagnostics go to stderr.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::graph::{self, DiscourseEntity, Frame, GlobalReferent, ReferentKey, RelationStats};
use crate::ingest;
use crate::metrics::{self, PrF, ScoreReport};
use crate::model::{Corpus, Severity, ValidationFinding};
use crate::validate::{self, ValidationConfig};
use crate::wikidata::{audit_corpus_links, ClientConfig, WikidataClient};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FINDINGS: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser)]
#[command(
    name = "divcdcr",
    version,
    about = "Validate, convert, query, link-audit, and score diverse cross-document coreference annotations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    /// Human-readable aligned columns.
    Text,
    /// One JSON record per line.
    Machine,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FailLevel {
    Warning,
    Error,
}

#[derive(Args)]
struct WikidataOpts {
    /// Never touch the network; answer from the cache only.
    #[arg(long)]
    offline: bool,
    /// Cache directory (default: the platform cache location).
    #[arg(long, value_name = "DIR")]
    cache: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Check a corpus against the annotation-scheme rule catalog.
    Validate {
        corpus: PathBuf,
        /// Severity at which findings fail the run.
        #[arg(long, value_enum, default_value = "error")]
        fail_on: FailLevel,
        /// Comma-separated rule ids to skip (e.g. V05,V14).
        #[arg(long, value_delimiter = ',', value_name = "RULES")]
        disable: Vec<String>,
        #[arg(long, value_enum, default_value = "text")]
        format: OutputFormat,
    },
    /// Import annotation-tool exports into a native corpus file.
    Convert {
        /// Source format; only `tabular` is supported.
        #[arg(long = "from", default_value = "tabular")]
        from: String,
        /// Directory containing one .tsv export per document.
        #[arg(long = "in", value_name = "DIR")]
        input: PathBuf,
        /// Native corpus file to write.
        #[arg(long = "out", value_name = "FILE")]
        output: PathBuf,
        /// JSON file mapping document ids to discourse ids.
        #[arg(long, value_name = "FILE")]
        discourse_map: Option<PathBuf>,
    },
    /// List discourse entities and global referents.
    Entities {
        corpus: PathBuf,
        /// Also audit every cluster's Wikidata link.
        #[arg(long)]
        wikidata_check: bool,
        #[command(flatten)]
        wikidata: WikidataOpts,
        #[arg(long, value_enum, default_value = "text")]
        format: OutputFormat,
    },
    /// Show the per-outlet frames (word-choice surfaces) of one referent.
    Frames {
        corpus: PathBuf,
        /// QID or global entity name.
        #[arg(long, value_name = "QID|NAME")]
        referent: String,
        #[arg(long, value_enum, default_value = "text")]
        format: OutputFormat,
    },
    /// Relation-edge counts by outlet and relation type.
    Stats {
        corpus: PathBuf,
        /// Include zero rows for absent combinations.
        #[arg(long)]
        dense: bool,
        #[arg(long, value_enum, default_value = "text")]
        format: OutputFormat,
    },
    /// Audit all Wikidata links of a corpus.
    LinkAudit {
        corpus: PathBuf,
        #[command(flatten)]
        wikidata: WikidataOpts,
        #[arg(long, value_enum, default_value = "text")]
        format: OutputFormat,
    },
    /// Score a system annotation against a gold annotation.
    Score {
        /// Gold corpus file.
        #[arg(long, value_name = "FILE")]
        gold: PathBuf,
        /// System corpus file.
        #[arg(long, value_name = "FILE")]
        sys: PathBuf,
        /// Comma-separated subset of: mentions,muc,b3,ceaf,lea,conll,edges,kappa.
        #[arg(long, value_delimiter = ',', value_name = "LIST")]
        metrics: Vec<String>,
        /// Fail (exit 1) when the CoNLL average is below this value.
        #[arg(long, value_name = "X")]
        min_conll: Option<f64>,
        #[arg(long, value_enum, default_value = "text")]
        format: OutputFormat,
    },
}

/// Entry point used by the binary; parses `std::env::args_os`.
pub fn run() -> i32 {
    run_from(std::env::args_os())
}

pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(message) => {
            eprintln!("divcdcr: {message}");
            EXIT_USAGE
        }
    }
}

fn load_corpus(path: &Path) -> Result<Corpus, String> {
    let bytes = std::fs::read(path).map_err(|e| format!("{}: {e}", path.display()))?;
    ingest::parse_corpus(&bytes).map_err(|e| format!("{}: {e}", path.display()))
}

fn default_cache_dir() -> PathBuf {
    std::env::var_os("XDG_CACHE_HOME")
        .map(PathBuf::from)
        .or_else(|| std::env::var_os("HOME").map(|h| PathBuf::from(h).join(".cache")))
        .unwrap_or_else(std::env::temp_dir)
        .join("divcdcr")
}

fn make_client(opts: &WikidataOpts) -> WikidataClient {
    let cache_dir = opts.cache.clone().unwrap_or_else(default_cache_dir);
    WikidataClient::new(ClientConfig::with_cache_dir(cache_dir).offline(opts.offline))
}

fn dispatch(command: Command) -> Result<i32, String> {
    match command {
        Command::Validate {
            corpus,
            fail_on,
            disable,
            format,
        } => cmd_validate(&corpus, fail_on, disable, format),
        Command::Convert {
            from,
            input,
            output,
            discourse_map,
        } => cmd_convert(&from, &input, &output, discourse_map.as_deref()),
        Command::Entities {
            corpus,
            wikidata_check,
            wikidata,
            format,
        } => cmd_entities(&corpus, wikidata_check, &wikidata, format),
        Command::Frames {
            corpus,
            referent,
            format,
        } => cmd_frames(&corpus, &referent, format),
        Command::Stats {
            corpus,
            dense,
            format,
        } => cmd_stats(&corpus, dense, format),
        Command::LinkAudit {
            corpus,
            wikidata,
            format,
        } => cmd_link_audit(&corpus, &wikidata, format),
        Command::Score {
            gold,
            sys,
            metrics,
            min_conll,
            format,
        } => cmd_score(&gold, &sys, &metrics, min_conll, format),
    }
}

fn print_findings(findings: &[ValidationFinding], format: OutputFormat) {
    for f in findings {
        match format {
            OutputFormat::Text => println!("{f}"),
            OutputFormat::Machine => {
                println!("{}", serde_json::to_string(f).expect("finding serializes"))
            }
        }
    }
}

fn cmd_validate(
    corpus_path: &Path,
    fail_on: FailLevel,
    disable: Vec<String>,
    format: OutputFormat,
) -> Result<i32, String> {
    let corpus = load_corpus(corpus_path)?;
    let config = ValidationConfig {
        disabled_rules: disable.into_iter().filter(|s| !s.is_empty()).collect(),
    };
    let findings = validate::validate_corpus(&corpus, &config).map_err(|e| e.to_string())?;
    print_findings(&findings, format);
    let fail_level = match fail_on {
        FailLevel::Warning => Severity::Warning,
        FailLevel::Error => Severity::Error,
    };
    Ok(if validate::passes(&findings, fail_level) {
        EXIT_OK
    } else {
        EXIT_FINDINGS
    })
}

fn cmd_convert(
    from: &str,
    input: &Path,
    output: &Path,
    discourse_map: Option<&Path>,
) -> Result<i32, String> {
    if from != "tabular" {
        return Err(format!("unsupported source format {from:?}"));
    }
    let mut files = BTreeMap::new();
    let entries = std::fs::read_dir(input).map_err(|e| format!("{}: {e}", input.display()))?;
    for entry in entries {
        let path = entry.map_err(|e| e.to_string())?.path();
        if path.extension().and_then(|e| e.to_str()) == Some("tsv") {
            let doc_id = path
                .file_stem()
                .and_then(|s| s.to_str())
                .ok_or_else(|| format!("unreadable file name {}", path.display()))?
                .to_string();
            let bytes = std::fs::read(&path).map_err(|e| format!("{}: {e}", path.display()))?;
            files.insert(doc_id, bytes);
        }
    }
    if files.is_empty() {
        return Err(format!("no .tsv export files in {}", input.display()));
    }
    let assignment: BTreeMap<String, String> = match discourse_map {
        Some(path) => {
            let bytes = std::fs::read(path).map_err(|e| format!("{}: {e}", path.display()))?;
            serde_json::from_slice(&bytes).map_err(|e| format!("{}: {e}", path.display()))?
        }
        None => BTreeMap::new(),
    };
    let outcome =
        ingest::import_tabular_export(&files, &assignment).map_err(|e| e.to_string())?;
    for notice in &outcome.notices {
        eprintln!("notice: {notice}");
    }
    std::fs::write(output, ingest::export_corpus(&outcome.corpus))
        .map_err(|e| format!("{}: {e}", output.display()))?;
    let documents = outcome.corpus.documents().count();
    let mentions: usize = outcome.corpus.documents().map(|d| d.mentions.len()).sum();
    let edges: usize = outcome.corpus.documents().map(|d| d.relations.len()).sum();
    println!("documents {documents} mentions {mentions} edges {edges}");
    Ok(EXIT_OK)
}

fn render_table(headers: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = headers.iter().map(|h| h.len()).collect();
    for row in rows {
        for (i, cell) in row.iter().enumerate() {
            if i < widths.len() {
                widths[i] = widths[i].max(cell.len());
            }
        }
    }
    let mut out = String::new();
    let render_row = |cells: &[String], widths: &[usize]| -> String {
        let mut line = String::new();
        for (i, cell) in cells.iter().enumerate() {
            if i > 0 {
                line.push_str("  ");
            }
            line.push_str(cell);
            if i + 1 < cells.len() {
                line.push_str(&" ".repeat(widths[i].saturating_sub(cell.len())));
            }
        }
        line
    };
    let header_cells: Vec<String> = headers.iter().map(|h| h.to_string()).collect();
    out.push_str(&render_row(&header_cells, &widths));
    out.push('\n');
    for row in rows {
        out.push_str(&render_row(row, &widths));
        out.push('\n');
    }
    out
}

fn entity_rows(entities: &[DiscourseEntity]) -> Vec<Vec<String>> {
    entities
        .iter()
        .map(|e| {
            let kind = match &e.key {
                ReferentKey::Uri(_) => "uri",
                ReferentKey::Name(_) => "name",
            };
            let members = e
                .clusters
                .iter()
                .map(|c| format!("{}:{}", c.document_id, c.name))
                .collect::<Vec<_>>()
                .join(", ");
            vec![
                e.discourse_id.clone(),
                kind.to_string(),
                e.key.as_str().to_string(),
                members,
            ]
        })
        .collect()
}

fn cmd_entities(
    corpus_path: &Path,
    wikidata_check: bool,
    opts: &WikidataOpts,
    format: OutputFormat,
) -> Result<i32, String> {
    let corpus = load_corpus(corpus_path)?;
    let entities = graph::build_discourse_entities(&corpus).map_err(|e| e.to_string())?;
    let referents = graph::build_global_referents(&corpus).map_err(|e| e.to_string())?;
    match format {
        OutputFormat::Text => {
            print!(
                "{}",
                render_table(
                    &["discourse", "kind", "key", "clusters"],
                    &entity_rows(&entities)
                )
            );
            if !referents.is_empty() {
                let rows: Vec<Vec<String>> = referents
                    .iter()
                    .map(|r: &GlobalReferent| {
                        vec![
                            r.uri.clone(),
                            r.discourse_entities.len().to_string(),
                            r.discourse_entities
                                .iter()
                                .map(|e| e.discourse_id.as_str())
                                .collect::<Vec<_>>()
                                .join(", "),
                        ]
                    })
                    .collect();
                println!();
                print!("{}", render_table(&["referent", "entities", "discourses"], &rows));
            }
        }
        OutputFormat::Machine => {
            for e in &entities {
                println!("{}", serde_json::to_string(e).expect("entity serializes"));
            }
            for r in &referents {
                println!("{}", serde_json::to_string(r).expect("referent serializes"));
            }
        }
    }
    if wikidata_check {
        let client = make_client(opts);
        let findings = audit_corpus_links(&client, &corpus);
        print_findings(&findings, format);
    }
    Ok(EXIT_OK)
}

fn cmd_frames(corpus_path: &Path, referent: &str, format: OutputFormat) -> Result<i32, String> {
    let corpus = load_corpus(corpus_path)?;
    let frames = graph::extract_frames(&corpus, referent).map_err(|e| e.to_string())?;
    match format {
        OutputFormat::Text => {
            let rows: Vec<Vec<String>> = frames
                .iter()
                .flat_map(|f: &Frame| {
                    f.surfaces.iter().map(|(doc, surface, entity_type)| {
                        vec![
                            f.outlet.to_string(),
                            doc.clone(),
                            surface.clone(),
                            entity_type.clone(),
                        ]
                    })
                })
                .collect();
            print!(
                "{}",
                render_table(&["outlet", "document", "surface", "type"], &rows)
            );
        }
        OutputFormat::Machine => {
            for f in &frames {
                println!("{}", serde_json::to_string(f).expect("frame serializes"));
            }
        }
    }
    Ok(EXIT_OK)
}

fn cmd_stats(corpus_path: &Path, dense: bool, format: OutputFormat) -> Result<i32, String> {
    let corpus = load_corpus(corpus_path)?;
    let stats: RelationStats = graph::relation_stats(&corpus, dense);
    match format {
        OutputFormat::Text => {
            let rows: Vec<Vec<String>> = stats
                .by_outlet
                .iter()
                .map(|((outlet, label), count)| {
                    vec![outlet.to_string(), label.to_string(), count.to_string()]
                })
                .collect();
            print!("{}", render_table(&["outlet", "label", "count"], &rows));
            if !stats.by_discourse.is_empty() {
                println!();
                let rows: Vec<Vec<String>> = stats
                    .by_discourse
                    .iter()
                    .map(|(d, count)| vec![d.clone(), count.to_string()])
                    .collect();
                print!("{}", render_table(&["discourse", "edges"], &rows));
            }
        }
        OutputFormat::Machine => {
            for ((outlet, label), count) in &stats.by_outlet {
                println!(
                    "{}",
                    serde_json::json!({"outlet": outlet.as_str(), "label": label.as_str(), "count": count})
                );
            }
            for (discourse, count) in &stats.by_discourse {
                println!(
                    "{}",
                    serde_json::json!({"discourse": discourse, "total": count})
                );
            }
        }
    }
    Ok(EXIT_OK)
}

fn cmd_link_audit(
    corpus_path: &Path,
    opts: &WikidataOpts,
    format: OutputFormat,
) -> Result<i32, String> {
    let corpus = load_corpus(corpus_path)?;
    let client = make_client(opts);
    let findings = audit_corpus_links(&client, &corpus);
    print_findings(&findings, format);
    Ok(if findings.iter().any(|f| f.severity >= Severity::Warning) {
        EXIT_FINDINGS
    } else {
        EXIT_OK
    })
}

fn fmt4(v: f64) -> String {
    format!("{v:.4}")
}

fn score_rows(report: &ScoreReport, selected: &[String]) -> Vec<Vec<String>> {
    let want = |name: &str| selected.is_empty() || selected.iter().any(|s| s == name);
    let prf_row = |name: &str, s: &PrF| {
        vec![
            name.to_string(),
            fmt4(s.precision),
            fmt4(s.recall),
            fmt4(s.f1),
        ]
    };
    let mut rows = Vec::new();
    if want("mentions") {
        rows.push(prf_row("mentions", &report.mention_detection));
    }
    if want("muc") {
        rows.push(prf_row("muc", &report.muc));
    }
    if want("b3") {
        rows.push(prf_row("b3", &report.b_cubed));
    }
    if want("ceaf") {
        rows.push(prf_row("ceaf_e", &report.ceaf_e));
    }
    if want("lea") {
        rows.push(prf_row("lea", &report.lea));
    }
    if want("conll") {
        rows.push(vec![
            "conll".to_string(),
            String::new(),
            String::new(),
            fmt4(report.conll),
        ]);
    }
    if want("edges") {
        rows.push(prf_row("edges_micro", &report.edges.micro));
        for (label, s) in &report.edges.per_label {
            rows.push(prf_row(&format!("edge_{label}"), s));
        }
    }
    if want("kappa") {
        rows.push(vec![
            "entity_type_kappa".to_string(),
            String::new(),
            String::new(),
            report
                .entity_type_kappa
                .map(fmt4)
                .unwrap_or_else(|| "n/a".to_string()),
        ]);
    }
    rows
}

fn cmd_score(
    gold_path: &Path,
    sys_path: &Path,
    selected: &[String],
    min_conll: Option<f64>,
    format: OutputFormat,
) -> Result<i32, String> {
    let gold = load_corpus(gold_path)?;
    let sys = load_corpus(sys_path)?;
    let report = metrics::score_corpora(&gold, &sys).map_err(|e| e.to_string())?;
    match format {
        OutputFormat::Text => {
            print!(
                "{}",
                render_table(
                    &["metric", "precision", "recall", "f1"],
                    &score_rows(&report, selected)
                )
            );
            if !report.edges.confusion.is_empty() {
                println!();
                let rows: Vec<Vec<String>> = report
                    .edges
                    .confusion
                    .iter()
                    .map(|c| {
                        vec![
                            c.gold_label.clone(),
                            c.sys_label.clone(),
                            c.count.to_string(),
                            c.precedence_distance
                                .map(|d| d.to_string())
                                .unwrap_or_else(|| "-".to_string()),
                        ]
                    })
                    .collect();
                print!(
                    "{}",
                    render_table(&["gold", "sys", "count", "precedence_distance"], &rows)
                );
            }
        }
        OutputFormat::Machine => {
            println!(
                "{}",
                serde_json::to_string(&report).expect("report serializes")
            );
        }
    }
    if let Some(threshold) = min_conll {
        if report.conll < threshold {
            eprintln!(
                "divcdcr: CoNLL average {} below threshold {}",
                fmt4(report.conll),
                threshold
            );
            return Ok(EXIT_FINDINGS);
        }
    }
    Ok(EXIT_OK)
}
