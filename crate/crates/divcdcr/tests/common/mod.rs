//! Shared fixtures for the integration tests: corpus builders, the
//! seeded-violation corpus, random generators, and independent
//! brute-force reference implementations of the cluster metrics.

#![allow(dead_code)]

use divcdcr::model::{
    Corpus, Discourse, Document, LocalCluster, Mention, OutletCode, RelationEdge, Span,
};
use rand::Rng;

/// Builds a document token by token, tracking code-point offsets so
/// mention spans are correct by construction.
pub struct DocBuilder {
    id: String,
    discourse_id: String,
    outlet: OutletCode,
    text: String,
    mentions: Vec<Mention>,
    relations: Vec<RelationEdge>,
}

impl DocBuilder {
    pub fn new(id: &str, discourse_id: &str, outlet: OutletCode) -> DocBuilder {
        DocBuilder {
            id: id.to_string(),
            discourse_id: discourse_id.to_string(),
            outlet,
            text: String::new(),
            mentions: Vec::new(),
            relations: Vec::new(),
        }
    }

    fn append(&mut self, s: &str) -> Span {
        if !self.text.is_empty() {
            self.text.push(' ');
        }
        let start = self.text.chars().count();
        self.text.push_str(s);
        Span::new(start, start + s.chars().count())
    }

    /// Appends filler text that is not a mention.
    pub fn words(&mut self, s: &str) -> &mut Self {
        self.append(s);
        self
    }

    /// Appends `surface` and records it as a mention; returns its id.
    pub fn mention(
        &mut self,
        surface: &str,
        entity_type: &str,
        name: Option<&str>,
        qid: Option<&str>,
    ) -> String {
        let span = self.append(surface);
        let id = format!("m{}", self.mentions.len() + 1);
        self.mentions.push(Mention {
            id: id.clone(),
            span,
            entity_type: entity_type.to_string(),
            global_entity: name.map(String::from),
            wikidata: qid.map(String::from),
        });
        id
    }

    /// Records a second mention over the span of an existing one.
    pub fn mention_over(
        &mut self,
        other_id: &str,
        entity_type: &str,
        name: Option<&str>,
        qid: Option<&str>,
    ) -> String {
        let span = self
            .mentions
            .iter()
            .find(|m| m.id == other_id)
            .expect("mention exists")
            .span;
        let id = format!("m{}", self.mentions.len() + 1);
        self.mentions.push(Mention {
            id: id.clone(),
            span,
            entity_type: entity_type.to_string(),
            global_entity: name.map(String::from),
            wikidata: qid.map(String::from),
        });
        id
    }

    pub fn edge(&mut self, source: &str, target: &str, label: &str) -> &mut Self {
        self.relations.push(RelationEdge {
            source: source.to_string(),
            target: target.to_string(),
            label: label.to_string(),
        });
        self
    }

    pub fn build(self) -> Document {
        Document {
            id: self.id,
            discourse_id: self.discourse_id,
            outlet: self.outlet,
            text: self.text,
            mentions: self.mentions,
            relations: self.relations,
        }
    }
}

pub fn corpus_of(groups: Vec<(&str, Vec<Document>)>) -> Corpus {
    let mut corpus = Corpus::new();
    corpus.discourses = groups
        .into_iter()
        .map(|(id, documents)| Discourse {
            id: id.to_string(),
            documents,
        })
        .collect();
    corpus.normalize();
    corpus
}

/// The reference corpus: five articles over two discourses exercising the
/// identity layer and every near-identity/bridging relation. Validates
/// without findings; the relation manifest is MET 2, MER 4, CLS 1, STF 1,
/// DEC 1, BRD 2.
pub fn scheme_corpus() -> Corpus {
    // Discourse 100: a presidential visit (left/center/right outlets).
    let mut l = DocBuilder::new("100_L", "100", OutletCode::L);
    let l_biden = l.mention("Joe Biden", "PER", Some("Joe Biden"), Some("Q6279"));
    l.words("arrived in Berlin yesterday, but");
    l.mention("the president", "PER", Some("Joe Biden"), None);
    l.words("did not come alone.");
    let l_wh = l.mention("The White House", "ORG", None, None);
    l.words("said the visit was routine, and");
    let l_dc = l.mention("Washington", "GPE", None, None);
    l.words("backed the trip.");
    l.edge(&l_wh, &l_biden, "MET");
    l.edge(&l_dc, &l_biden, "MET");

    let mut m = DocBuilder::new("100_M", "100", OutletCode::M);
    let m_both = m.mention(
        "North and South Korea",
        "GPE",
        Some("North and South Korea"),
        None,
    );
    m.words("have resumed talks at the border.");
    let m_south = m.mention("South Korea", "GPE", None, None);
    m.words("seems hopeful, and");
    let m_north = m.mention("North Korea", "GPE", None, None);
    m.words("sent a delegation.");
    m.mention("The two Koreas", "GPE", Some("North and South Korea"), None);
    m.words("last met in 2018.");
    m.edge(&m_south, &m_both, "MER");
    m.edge(&m_north, &m_both, "MER");

    let mut r = DocBuilder::new("100_R", "100", OutletCode::R);
    let r_erdogan = r.mention("Erdogan", "PER", Some("Recep Tayyip Erdogan"), Some("Q39259"));
    r.words("spoke in Ankara on Monday after meeting");
    r.mention("Joe Biden", "PER", Some("Joe Biden"), Some("Q6279"));
    r.words(".");
    let r_gov = r.mention("The Turkish government", "ORG", None, None);
    r.words("rejected the proposal, and");
    let r_erdogan2 = r.mention("Erdogan", "PER", Some("Recep Tayyip Erdogan"), None);
    r.words("insisted that");
    let r_class = r.mention("skilled negotiators", "GRP", None, None);
    r.words("always prevail.");
    r.mention("Biden", "PER", Some("Joe Biden"), None);
    r.words("declined to comment.");
    r.edge(&r_gov, &r_erdogan, "STF");
    r.edge(&r_class, &r_erdogan2, "CLS");

    // Discourse 200: missile coverage and royal succession (fringe outlets).
    let mut ll = DocBuilder::new("200_LL", "200", OutletCode::LL);
    let ll_nk1 = ll.mention("North Korea", "GPE", Some("North Korea"), Some("Q423"));
    ll.words("launched another missile on Friday. Critics called");
    let ll_nk2 = ll.mention("North Korea", "GPE", Some("North Korea"), None);
    let ll_dec = ll.mention("a barbaric nation", "GPE", None, None);
    ll.words(".");
    let ll_army = ll.mention("The army", "ORG", None, None);
    ll.words("paraded in Pyongyang, and");
    let ll_capital = ll.mention("the capital", "GPE", None, None);
    ll.words("celebrated.");
    ll.edge(&ll_dec, &ll_nk2, "DEC");
    ll.edge(&ll_army, &ll_nk1, "MER");
    ll.edge(&ll_capital, &ll_nk1, "MER");

    let mut rr = DocBuilder::new("200_RR", "200", OutletCode::RR);
    let rr_queen = rr.mention(
        "Queen Elizabeth",
        "PER",
        Some("Queen Elizabeth II"),
        Some("Q9682"),
    );
    rr.words("met");
    let rr_fans = rr.mention("supporters", "GRP", None, None);
    rr.words("in London.");
    let rr_charles = rr.mention("Charles", "PER", Some("Charles III"), Some("Q43274"));
    rr.words("joined");
    rr.mention("the Queen", "PER", Some("Queen Elizabeth II"), None);
    rr.words("later, and");
    let rr_views = rr.mention("his political views", "OBJ", None, None);
    rr.words("drew attention.");
    rr.mention("The heir", "PER", Some("Charles III"), None);
    rr.words("thanked the crowd.");
    rr.edge(&rr_views, &rr_charles, "BRD");
    rr.edge(&rr_fans, &rr_queen, "BRD");

    corpus_of(vec![
        ("100", vec![l.build(), m.build(), r.build()]),
        ("200", vec![ll.build(), rr.build()]),
    ])
}

/// A second annotator's imperfect pass over the same articles: one missed
/// mention, one split cluster, one wrongly merged cluster, one relabeled
/// edge, one spurious edge, and one entity-type disagreement.
pub fn system_corpus() -> Corpus {
    let mut corpus = scheme_corpus();
    for discourse in &mut corpus.discourses {
        for doc in &mut discourse.documents {
            match doc.id.as_str() {
                "100_L" => {
                    // misses the "Washington" metonymy entirely
                    doc.relations.retain(|e| e.source != "m4");
                    doc.mentions.retain(|m| m.id != "m4");
                }
                "100_R" => {
                    // splits the Biden cluster: final "Biden" gets its own name
                    let m = doc.mentions.iter_mut().find(|m| m.id == "m6").unwrap();
                    m.global_entity = Some("Biden".to_string());
                }
                "200_LL" => {
                    // reads the declared class as an ordinary class link
                    let e = doc.relations.iter_mut().find(|e| e.label == "DEC").unwrap();
                    e.label = "CLS".to_string();
                }
                "200_RR" => {
                    // wrongly merges "The heir" into the Queen's cluster ...
                    let m = doc.mentions.iter_mut().find(|m| m.id == "m6").unwrap();
                    m.global_entity = Some("Queen Elizabeth II".to_string());
                    // ... types the supporters as an organisation ...
                    let m = doc.mentions.iter_mut().find(|m| m.id == "m2").unwrap();
                    m.entity_type = "ORG".to_string();
                    // ... and invents a bridging link
                    doc.relations.push(RelationEdge {
                        source: "m6".to_string(),
                        target: "m1".to_string(),
                        label: "BRD".to_string(),
                    });
                }
                _ => {}
            }
        }
    }
    corpus.normalize();
    corpus
}

/// A corpus seeded with exactly one violation per catalog rule, and
/// nothing else: validating it yields 16 findings, V01 through V15 with
/// both halves of V08.
pub fn seeded_violation_corpus() -> Corpus {
    // 9_L: V01 (bad entity type), V02 (bad label), V03 (untrimmed
    // surface), V04 (singleton cluster), V05 (orphan mention)
    let mut l = DocBuilder::new("9_L", "9", OutletCode::L);
    let x2 = l.mention("Ann", "PER", None, None);
    l.words("met");
    let x1 = l.mention("Xavier", "XX", None, None);
    l.words("while");
    let y2 = l.mention("Beta", "ORG", None, None);
    l.words("hosted");
    let y1 = l.mention("Ygrek", "ORG", None, None);
    l.words(". Later");
    l.mention("Gamma", "LOC", Some("Gamma"), None);
    l.mention("Gamma.", "LOC", Some("Gamma"), None);
    l.words("appeared once more.");
    let w = l.mention("Delta", "GPE", Some("Delta"), None);
    l.words("welcomed");
    let v = l.mention("visitors", "GRP", None, None);
    l.words("and");
    l.mention("Uma", "PER", None, None);
    l.words("stayed home.");
    l.edge(&x1, &x2, "MET");
    l.edge(&y1, &y2, "XYZ");
    l.edge(&v, &w, "STF");

    // 9_M: V06 (mixed cluster types), V07 (two Wikidata values), V09
    // (cataphora), V10 (double MET between one cluster pair), V11
    // (self-edge); also one side each of the V08 pairs
    let mut m = DocBuilder::new("9_M", "9", OutletCode::M);
    m.mention("Epsilon", "PER", Some("Epsilon"), None);
    m.words("and");
    m.mention("Epsilon", "ORG", Some("Epsilon"), None);
    m.words("diverge.");
    m.mention("Zeta", "OBJ", Some("Zeta"), Some("Q100"));
    m.words("resembles");
    m.mention("Zeta", "OBJ", Some("Zeta"), Some("Q100"));
    m.words(".");
    let g2 = m.mention("it", "GPE", None, None);
    m.words("pointed ahead to");
    let g1 = m.mention("Gondor", "GPE", None, None);
    m.words(".");
    let h1 = m.mention("Eta", "ORG", Some("Eta"), None);
    m.words("and");
    let h2 = m.mention("Eta", "ORG", Some("Eta"), None);
    m.words("preceded");
    let h3 = m.mention("Theta", "ORG", Some("Theta"), None);
    m.words("and");
    let h4 = m.mention("Theta", "ORG", Some("Theta"), None);
    m.words(".");
    let i1 = m.mention("Iota", "OBJ", None, None);
    m.words("looped.");
    m.mention("Mu", "PER", Some("Mu"), Some("Q201"));
    m.words("shadowed");
    m.mention("Mu", "PER", Some("Mu"), None);
    m.words("while");
    m.mention("Xi", "LOC", Some("Xi"), Some("Q300"));
    m.words("bordered");
    m.mention("Xi", "LOC", Some("Xi"), None);
    m.words(".");
    m.edge(&g2, &g1, "BRD");
    m.edge(&h3, &h1, "MET");
    m.edge(&h4, &h2, "MET");
    m.edge(&i1, &i1, "CLS");

    // 9_R: V12 (malformed QID), V13 (duplicate edge), V15 (identical
    // spans); the other side of each V08 pair
    let mut r = DocBuilder::new("9_R", "9", OutletCode::R);
    r.mention("Kappa", "PER", Some("Kappa"), Some("WRONG"));
    r.words("met");
    r.mention("Kappa", "PER", Some("Kappa"), None);
    r.words(".");
    let k2 = r.mention("Lambda", "ORG", None, None);
    r.words("absorbed");
    let k1 = r.mention("units", "ORG", None, None);
    r.words(".");
    let l1 = r.mention("Sigma", "OBJ", None, None);
    let l2 = r.mention_over(&l1, "OBJ", None, None);
    r.words("gleamed.");
    r.mention("Mu", "PER", Some("Mu"), Some("Q200"));
    r.words("returned as");
    r.mention("Mu", "PER", Some("Mu"), None);
    r.words("and");
    r.mention("Nu", "LOC", Some("Nu"), Some("Q300"));
    r.words("touched");
    r.mention("Nu", "LOC", Some("Nu"), None);
    r.words(".");
    r.edge(&k1, &k2, "MER");
    r.edge(&k1, &k2, "MER");
    r.edge(&l2, &l1, "CLS");

    // V14: unconventional document id, otherwise empty
    let bad = DocBuilder::new("draft-nine", "9", OutletCode::L);

    corpus_of(vec![("9", vec![l.build(), m.build(), r.build(), bad.build()])])
}

// ---------------------------------------------------------------------
// Random generators
// ---------------------------------------------------------------------

const TYPES: [&str; 6] = ["PER", "ORG", "GRP", "GPE", "LOC", "OBJ"];
const LABELS: [&str; 6] = ["MET", "MER", "CLS", "STF", "DEC", "BRD"];
const OUTLETS: [OutletCode; 5] = [
    OutletCode::LL,
    OutletCode::L,
    OutletCode::M,
    OutletCode::R,
    OutletCode::RR,
];

/// Random clustering of `0..n` into at most `max_clusters` groups; every
/// index is assigned, empty groups are dropped.
pub fn random_clustering(rng: &mut impl Rng, n: usize, max_clusters: usize) -> Vec<Vec<usize>> {
    let k = rng.gen_range(1..=max_clusters);
    let mut clusters: Vec<Vec<usize>> = vec![Vec::new(); k];
    for i in 0..n {
        clusters[rng.gen_range(0..k)].push(i);
    }
    clusters.retain(|c| !c.is_empty());
    clusters
}

/// Random well-formed corpus with identity clusters, unnamed mentions, and
/// relation edges; canonical after `normalize`.
pub fn random_corpus(rng: &mut impl Rng) -> Corpus {
    let names = ["Alder", "Birch", "Cedar", "Dogwood", "Elm", "Fir"];
    let qids = [Some("Q11"), Some("Q12"), None, Some("Q14"), None, Some("Q16")];
    let mut corpus = Corpus::new();
    let n_discourses = rng.gen_range(1..=3);
    for di in 0..n_discourses {
        let mut documents = Vec::new();
        let n_docs = rng.gen_range(1..=3);
        for dj in 0..n_docs {
            let outlet = OUTLETS[rng.gen_range(0..OUTLETS.len())];
            let doc_id = format!("{di}{dj}_{outlet}");
            let mut b = DocBuilder::new(&doc_id, &di.to_string(), outlet);
            let mut ids = Vec::new();
            let n_mentions = rng.gen_range(1..=8);
            for mi in 0..n_mentions {
                let ni = rng.gen_range(0..names.len());
                let named = rng.gen_bool(0.6);
                let qid = if named && rng.gen_bool(0.5) { qids[ni] } else { None };
                let ty = TYPES[rng.gen_range(0..TYPES.len())];
                let id = b.mention(
                    &format!("{}{mi}", names[ni]),
                    ty,
                    named.then_some(names[ni]),
                    qid,
                );
                ids.push(id);
                if rng.gen_bool(0.5) {
                    b.words("filler words follow here.");
                }
            }
            let n_edges = rng.gen_range(0..=3.min(ids.len()));
            for _ in 0..n_edges {
                let s = rng.gen_range(0..ids.len());
                let t = rng.gen_range(0..ids.len());
                let label = LABELS[rng.gen_range(0..LABELS.len())];
                let (s, t) = (ids[s].clone(), ids[t].clone());
                b.edge(&s, &t, label);
            }
            let mut doc = b.build();
            // ids must be unique corpus-wide for the parser
            for m in &mut doc.mentions {
                m.id = format!("{doc_id}_{}", m.id);
            }
            for e in &mut doc.relations {
                e.source = format!("{doc_id}_{}", e.source);
                e.target = format!("{doc_id}_{}", e.target);
            }
            documents.push(doc);
        }
        corpus.discourses.push(Discourse {
            id: di.to_string(),
            documents,
        });
    }
    corpus.normalize();
    corpus
}

/// Random corpus for the entity-layer tests: every named cluster has two
/// mentions, and the name-to-URI map is fixed so grouping stays
/// well defined.
pub fn random_entity_corpus(rng: &mut impl Rng) -> Corpus {
    let names = ["Alder", "Birch", "Cedar", "Dogwood", "Elm", "Fir"];
    let qids = [Some("Q11"), Some("Q12"), None, Some("Q14"), None, Some("Q16")];
    let mut corpus = Corpus::new();
    for di in 0..rng.gen_range(1..=3) {
        let mut documents = Vec::new();
        for dj in 0..rng.gen_range(1..=3) {
            let outlet = OUTLETS[rng.gen_range(0..OUTLETS.len())];
            let doc_id = format!("{di}{dj}_{outlet}");
            let mut b = DocBuilder::new(&doc_id, &di.to_string(), outlet);
            for ni in 0..names.len() {
                if !rng.gen_bool(0.5) {
                    continue;
                }
                let with_qid = rng.gen_bool(0.5);
                let qid = if with_qid { qids[ni] } else { None };
                b.mention(names[ni], "ORG", Some(names[ni]), qid);
                b.words("and then");
                b.mention(names[ni], "ORG", Some(names[ni]), None);
                b.words("again.");
            }
            documents.push(b.build());
        }
        corpus.discourses.push(Discourse {
            id: di.to_string(),
            documents,
        });
    }
    corpus.normalize();
    corpus
}

// ---------------------------------------------------------------------
// Reference implementations (straight from the metric definitions,
// structured differently from the library code)
// ---------------------------------------------------------------------

pub fn f1_of(p: f64, r: f64) -> f64 {
    if p + r > 0.0 {
        2.0 * p * r / (p + r)
    } else {
        0.0
    }
}

fn safe_div(n: f64, d: f64) -> f64 {
    if d > 0.0 {
        n / d
    } else {
        0.0
    }
}

fn containing<'a>(clusters: &'a [Vec<usize>], m: usize) -> Option<&'a [usize]> {
    clusters
        .iter()
        .find(|c| c.contains(&m))
        .map(|c| c.as_slice())
}

fn intersection_size(a: &[usize], b: &[usize]) -> usize {
    a.iter().filter(|x| b.contains(x)).count()
}

fn muc_oracle_side(key: &[Vec<usize>], response: &[Vec<usize>]) -> f64 {
    // Vilain et al.: sum over key clusters of (|c| - |partition of c|)
    let mut num = 0.0;
    let mut den = 0.0;
    for c in key {
        if c.is_empty() {
            continue;
        }
        let touched: std::collections::BTreeSet<usize> = response
            .iter()
            .enumerate()
            .filter(|(_, r)| intersection_size(c, r) > 0)
            .map(|(i, _)| i)
            .collect();
        let unassigned = c
            .iter()
            .filter(|m| containing(response, **m).is_none())
            .count();
        let partitions = touched.len() + unassigned;
        num += (c.len() - partitions) as f64;
        den += (c.len() - 1) as f64;
    }
    safe_div(num, den)
}

pub fn muc_oracle(gold: &[Vec<usize>], sys: &[Vec<usize>]) -> (f64, f64, f64) {
    let r = muc_oracle_side(gold, sys);
    let p = muc_oracle_side(sys, gold);
    (p, r, f1_of(p, r))
}

fn b3_oracle_side(key: &[Vec<usize>], response: &[Vec<usize>]) -> f64 {
    let mentions: Vec<usize> = key.iter().flatten().copied().collect();
    if mentions.is_empty() {
        return 0.0;
    }
    let total: f64 = mentions
        .iter()
        .map(|&m| {
            let kc = containing(key, m).unwrap();
            match containing(response, m) {
                Some(rc) => intersection_size(kc, rc) as f64 / kc.len() as f64,
                None => 0.0,
            }
        })
        .sum();
    total / mentions.len() as f64
}

pub fn b3_oracle(gold: &[Vec<usize>], sys: &[Vec<usize>]) -> (f64, f64, f64) {
    let r = b3_oracle_side(gold, sys);
    let p = b3_oracle_side(sys, gold);
    (p, r, f1_of(p, r))
}

fn phi4_oracle(a: &[usize], b: &[usize]) -> f64 {
    if a.is_empty() && b.is_empty() {
        return 0.0;
    }
    2.0 * intersection_size(a, b) as f64 / (a.len() + b.len()) as f64
}

/// Exhaustive search over all one-to-one cluster assignments.
pub fn ceaf_phi4_sum_oracle(gold: &[Vec<usize>], sys: &[Vec<usize>]) -> f64 {
    fn best(gold: &[Vec<usize>], sys: &[Vec<usize>], gi: usize, used: &mut Vec<bool>) -> f64 {
        if gi == gold.len() {
            return 0.0;
        }
        // leaving gold[gi] unassigned is always an option
        let mut best_sum = best(gold, sys, gi + 1, used);
        for (si, s) in sys.iter().enumerate() {
            if used[si] {
                continue;
            }
            used[si] = true;
            let sum = phi4_oracle(&gold[gi], s) + best(gold, sys, gi + 1, used);
            used[si] = false;
            best_sum = best_sum.max(sum);
        }
        best_sum
    }
    best(gold, sys, 0, &mut vec![false; sys.len()])
}

pub fn ceaf_e_oracle(gold: &[Vec<usize>], sys: &[Vec<usize>]) -> (f64, f64, f64) {
    let total = ceaf_phi4_sum_oracle(gold, sys);
    let p = safe_div(total, sys.len() as f64);
    let r = safe_div(total, gold.len() as f64);
    (p, r, f1_of(p, r))
}

fn lea_oracle_side(key: &[Vec<usize>], response: &[Vec<usize>]) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    for c in key {
        if c.is_empty() {
            continue;
        }
        den += c.len() as f64;
        let resolution = if c.len() == 1 {
            let singleton_on_other = containing(response, c[0]).is_some_and(|rc| rc.len() == 1);
            if singleton_on_other {
                1.0
            } else {
                0.0
            }
        } else {
            let mut common = 0usize;
            let mut links = 0usize;
            for i in 0..c.len() {
                for j in i + 1..c.len() {
                    links += 1;
                    let same = match (containing(response, c[i]), containing(response, c[j])) {
                        (Some(a), Some(b)) => std::ptr::eq(a, b),
                        _ => false,
                    };
                    if same {
                        common += 1;
                    }
                }
            }
            common as f64 / links as f64
        };
        num += c.len() as f64 * resolution;
    }
    safe_div(num, den)
}

pub fn lea_oracle(gold: &[Vec<usize>], sys: &[Vec<usize>]) -> (f64, f64, f64) {
    let r = lea_oracle_side(gold, sys);
    let p = lea_oracle_side(sys, gold);
    (p, r, f1_of(p, r))
}

// ---------------------------------------------------------------------
// Discourse-entity grouping oracle: naive fixpoint merging
// ---------------------------------------------------------------------

fn clusters_linked(a: &LocalCluster, b: &LocalCluster) -> bool {
    let same_uri = matches!((&a.uri, &b.uri), (Some(x), Some(y)) if x == y);
    let name_link = a.name == b.name && (a.uri.is_none() || b.uri.is_none());
    same_uri || name_link
}

/// Groups one discourse's local clusters by repeatedly merging any two
/// groups that contain a linked pair, until nothing merges. Returns the
/// partition as sorted sets of (document id, cluster name) keys.
pub fn grouping_oracle(clusters: &[LocalCluster]) -> Vec<Vec<(String, String)>> {
    let mut groups: Vec<Vec<&LocalCluster>> = clusters.iter().map(|c| vec![c]).collect();
    loop {
        let mut merged = None;
        'search: for i in 0..groups.len() {
            for j in i + 1..groups.len() {
                let linked = groups[i]
                    .iter()
                    .any(|a| groups[j].iter().any(|b| clusters_linked(a, b)));
                if linked {
                    merged = Some((i, j));
                    break 'search;
                }
            }
        }
        match merged {
            Some((i, j)) => {
                let moved = groups.swap_remove(j);
                groups[i].extend(moved);
            }
            None => break,
        }
    }
    let mut result: Vec<Vec<(String, String)>> = groups
        .into_iter()
        .map(|g| {
            let mut keys: Vec<(String, String)> = g
                .into_iter()
                .map(|c| (c.document_id.clone(), c.name.clone()))
                .collect();
            keys.sort();
            keys
        })
        .collect();
    result.sort();
    result
}

pub fn fixture_path(name: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
}
