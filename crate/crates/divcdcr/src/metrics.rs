//! Scoring of two annotations of the same documents: mention detection,
//! identity-cluster metrics (MUC, B³, CEAF-e, LEA, CoNLL average),
//! per-label relation-edge P/R/F1, and entity-type kappa.
//!
//! The first corpus is the gold standard, the second the system (for
//! inter-annotator agreement, run both orders). Mentions align by exact
//! (document id, span) equality; the scheme mandates one correct maximum
//! span, so exact matching measures it. Mentions missing on one side
//! enter the cluster metrics as singletons there, which keeps all metrics
//! total. All 0/0 ratios resolve to 0 except the degenerate kappa case
//! documented at [`entity_type_kappa`].

use std::collections::BTreeMap;

use pathfinding::kuhn_munkres::kuhn_munkres;
use pathfinding::matrix::Matrix;
use serde::Serialize;
use thiserror::Error;

use crate::model::{
    derive_local_clusters_lenient, precedence_rank, Corpus, PrecedenceLabel, RelationType, Span,
};

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("document {0} has different text in the two corpora")]
    TextMismatch(String),
    #[error("no aligned mention pairs")]
    EmptyAlignment,
}

/// Precision, recall, and their harmonic mean.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PrF {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl PrF {
    pub fn new(precision: f64, recall: f64) -> PrF {
        let f1 = if precision + recall > 0.0 {
            2.0 * precision * recall / (precision + recall)
        } else {
            0.0
        };
        PrF {
            precision,
            recall,
            f1,
        }
    }

    fn from_ratios(p_num: f64, p_den: f64, r_num: f64, r_den: f64) -> PrF {
        let ratio = |n: f64, d: f64| if d > 0.0 { n / d } else { 0.0 };
        PrF::new(ratio(p_num, p_den), ratio(r_num, r_den))
    }

    pub const ZERO: PrF = PrF {
        precision: 0.0,
        recall: 0.0,
        f1: 0.0,
    };
}

/// A mention identified across the two corpora.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct MentionRef {
    pub document_id: String,
    pub mention_id: String,
    pub span: Span,
}

/// Exact-span pairing of the two corpora's mentions.
#[derive(Debug, Clone, Default, Serialize)]
pub struct MentionAlignment {
    pub pairs: Vec<(MentionRef, MentionRef)>,
    pub unmatched_a: Vec<MentionRef>,
    pub unmatched_b: Vec<MentionRef>,
}

/// Pairs mentions by exact (document id, span) equality. Documents present
/// in both corpora must have identical text; mentions of documents present
/// on one side only are unmatched.
pub fn align_mentions(a: &Corpus, b: &Corpus) -> Result<MentionAlignment, MetricsError> {
    for doc_a in a.documents() {
        if let Some(doc_b) = b.document(&doc_a.id) {
            if doc_a.text != doc_b.text {
                return Err(MetricsError::TextMismatch(doc_a.id.clone()));
            }
        }
    }
    let collect = |corpus: &Corpus| -> BTreeMap<(String, Span), Vec<MentionRef>> {
        let mut map: BTreeMap<(String, Span), Vec<MentionRef>> = BTreeMap::new();
        for doc in corpus.documents() {
            for m in &doc.mentions {
                map.entry((doc.id.clone(), m.span)).or_default().push(MentionRef {
                    document_id: doc.id.clone(),
                    mention_id: m.id.clone(),
                    span: m.span,
                });
            }
        }
        for refs in map.values_mut() {
            refs.sort();
        }
        map
    };
    let mut map_a = collect(a);
    let mut map_b = collect(b);

    let mut alignment = MentionAlignment::default();
    for (key, refs_a) in &mut map_a {
        let refs_b = map_b.remove(key).unwrap_or_default();
        let paired = refs_a.len().min(refs_b.len());
        let mut refs_b = refs_b.into_iter();
        for (i, ra) in refs_a.drain(..).enumerate() {
            if i < paired {
                alignment.pairs.push((ra, refs_b.next().unwrap()));
            } else {
                alignment.unmatched_a.push(ra);
            }
        }
        alignment.unmatched_b.extend(refs_b);
    }
    for refs_b in map_b.into_values() {
        alignment.unmatched_b.extend(refs_b);
    }
    alignment.unmatched_b.sort();
    Ok(alignment)
}

/// Mention-detection scores with the a-side as gold and the b-side as
/// system.
pub fn mention_detection_f1(alignment: &MentionAlignment) -> PrF {
    let matched = alignment.pairs.len() as f64;
    let gold = matched + alignment.unmatched_a.len() as f64;
    let sys = matched + alignment.unmatched_b.len() as f64;
    PrF::from_ratios(matched, sys, matched, gold)
}

/// A clustering of mention indices. Need not be a partition; indices
/// absent from every cluster count as unresolved.
pub type Clustering = Vec<Vec<usize>>;

fn cluster_index(clusters: &[Vec<usize>]) -> BTreeMap<usize, usize> {
    let mut map = BTreeMap::new();
    for (ci, cluster) in clusters.iter().enumerate() {
        for &m in cluster {
            map.insert(m, ci);
        }
    }
    map
}

fn muc_side(reference: &[Vec<usize>], other_index: &BTreeMap<usize, usize>) -> (f64, f64) {
    let mut num = 0.0;
    let mut den = 0.0;
    for cluster in reference {
        if cluster.is_empty() {
            continue;
        }
        let mut parts: Vec<Option<usize>> =
            cluster.iter().map(|m| other_index.get(m).copied()).collect();
        parts.sort();
        let mut distinct = 0usize;
        let mut unmapped = 0usize;
        let mut prev: Option<Option<usize>> = None;
        for p in parts {
            if p.is_none() {
                unmapped += 1;
            } else if prev != Some(p) {
                distinct += 1;
            }
            prev = Some(p);
        }
        num += (cluster.len() - (distinct + unmapped)) as f64;
        den += (cluster.len() - 1) as f64;
    }
    (num, den)
}

/// Link-based MUC metric.
pub fn muc(gold: &[Vec<usize>], sys: &[Vec<usize>]) -> PrF {
    let gold_index = cluster_index(gold);
    let sys_index = cluster_index(sys);
    let (r_num, r_den) = muc_side(gold, &sys_index);
    let (p_num, p_den) = muc_side(sys, &gold_index);
    PrF::from_ratios(p_num, p_den, r_num, r_den)
}

fn b_cubed_side(reference: &[Vec<usize>], other: &[Vec<usize>]) -> (f64, f64) {
    let other_index = cluster_index(other);
    let mut num = 0.0;
    let mut den = 0.0;
    for cluster in reference {
        for &m in cluster {
            den += 1.0;
            if let Some(&oi) = other_index.get(&m) {
                let overlap = cluster.iter().filter(|x| other[oi].contains(x)).count();
                num += overlap as f64 / cluster.len() as f64;
            }
        }
    }
    (num, den)
}

/// Mention-based B³ metric.
pub fn b_cubed(gold: &[Vec<usize>], sys: &[Vec<usize>]) -> PrF {
    let (r_num, r_den) = b_cubed_side(gold, sys);
    let (p_num, p_den) = b_cubed_side(sys, gold);
    PrF::from_ratios(p_num, p_den, r_num, r_den)
}

fn phi4(a: &[usize], b: &[usize]) -> f64 {
    if a.is_empty() && b.is_empty() {
        return 0.0;
    }
    let overlap = a.iter().filter(|x| b.contains(x)).count();
    2.0 * overlap as f64 / (a.len() + b.len()) as f64
}

/// Maximum Σφ4 over one-to-one cluster alignments, found with the
/// Kuhn-Munkres assignment algorithm on a scaled integer weight matrix.
/// The scale (2^40) is far below the smallest possible nonzero φ4-sum
/// difference for realistic cluster sizes, so the chosen assignment is
/// optimal; the reported sum is recomputed exactly in floating point.
pub fn optimal_phi4_sum(gold: &[Vec<usize>], sys: &[Vec<usize>]) -> f64 {
    if gold.is_empty() || sys.is_empty() {
        return 0.0;
    }
    const SCALE: f64 = (1u64 << 40) as f64;
    let n = gold.len().max(sys.len());
    let weights = Matrix::from_fn(n, n, |(i, j)| {
        if i < gold.len() && j < sys.len() {
            (phi4(&gold[i], &sys[j]) * SCALE).round() as i64
        } else {
            0
        }
    });
    let (_, assignment) = kuhn_munkres(&weights);
    assignment
        .iter()
        .enumerate()
        .filter(|&(i, &j)| i < gold.len() && j < sys.len())
        .map(|(i, &j)| phi4(&gold[i], &sys[j]))
        .sum()
}

/// Entity-based CEAF with the φ4 similarity.
pub fn ceaf_e(gold: &[Vec<usize>], sys: &[Vec<usize>]) -> PrF {
    let total = optimal_phi4_sum(gold, sys);
    PrF::from_ratios(total, sys.len() as f64, total, gold.len() as f64)
}

fn lea_side(reference: &[Vec<usize>], other: &[Vec<usize>]) -> (f64, f64) {
    let other_index = cluster_index(other);
    let links = |k: usize| (k * (k - 1) / 2) as f64;
    let mut num = 0.0;
    let mut den = 0.0;
    for cluster in reference {
        if cluster.is_empty() {
            continue;
        }
        den += cluster.len() as f64;
        let resolution = if cluster.len() == 1 {
            // singleton self-link: resolved iff also a singleton on the other side
            match other_index.get(&cluster[0]) {
                Some(&oi) if other[oi].len() == 1 => 1.0,
                _ => 0.0,
            }
        } else {
            let mut common = 0.0;
            for (i, a) in cluster.iter().enumerate() {
                for b in &cluster[i + 1..] {
                    if let (Some(ca), Some(cb)) = (other_index.get(a), other_index.get(b)) {
                        if ca == cb {
                            common += 1.0;
                        }
                    }
                }
            }
            common / links(cluster.len())
        };
        num += cluster.len() as f64 * resolution;
    }
    (num, den)
}

/// Link-based entity-aware LEA metric with the singleton self-link
/// convention.
pub fn lea(gold: &[Vec<usize>], sys: &[Vec<usize>]) -> PrF {
    let (r_num, r_den) = lea_side(gold, sys);
    let (p_num, p_den) = lea_side(sys, gold);
    PrF::from_ratios(p_num, p_den, r_num, r_den)
}

/// Arithmetic mean of the MUC, B³, and CEAF-e F1 values.
pub fn conll_average(muc: &PrF, b_cubed: &PrF, ceaf_e: &PrF) -> f64 {
    (muc.f1 + b_cubed.f1 + ceaf_e.f1) / 3.0
}

/// One cell of the label-confusion table: edges whose endpoints match but
/// whose labels differ, annotated with the distance between the labels'
/// precedence ranks.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConfusionCell {
    pub gold_label: String,
    pub sys_label: String,
    pub count: usize,
    pub precedence_distance: Option<u8>,
}

/// Relation-edge scores per label and micro-averaged.
#[derive(Debug, Clone, Serialize)]
pub struct EdgeScores {
    pub per_label: BTreeMap<String, PrF>,
    pub micro: PrF,
    pub confusion: Vec<ConfusionCell>,
}

/// Scores relation edges. An edge in the gold corpus matches a system
/// edge iff both endpoints are aligned pairwise (direction-sensitive) and
/// the labels are equal.
pub fn relation_edge_prf(a: &Corpus, b: &Corpus, alignment: &MentionAlignment) -> EdgeScores {
    // mentions aligned by exact span; an endpoint pair matches when the
    // (document, span, span) triple exists on both sides
    let aligned: std::collections::BTreeSet<(String, Span)> = alignment
        .pairs
        .iter()
        .map(|(ra, _)| (ra.document_id.clone(), ra.span))
        .collect();

    type EdgeKey = (String, Span, Span);
    let collect = |corpus: &Corpus| -> BTreeMap<EdgeKey, Vec<String>> {
        let mut map: BTreeMap<EdgeKey, Vec<String>> = BTreeMap::new();
        for doc in corpus.documents() {
            for edge in &doc.relations {
                let (Some(s), Some(t)) = (doc.mention(&edge.source), doc.mention(&edge.target))
                else {
                    continue;
                };
                map.entry((doc.id.clone(), s.span, t.span))
                    .or_default()
                    .push(edge.label.clone());
            }
        }
        for labels in map.values_mut() {
            labels.sort();
        }
        map
    };
    let edges_a = collect(a);
    let edges_b = collect(b);

    let mut gold_totals: BTreeMap<String, usize> = BTreeMap::new();
    let mut sys_totals: BTreeMap<String, usize> = BTreeMap::new();
    let mut matched: BTreeMap<String, usize> = BTreeMap::new();
    let mut confusion: BTreeMap<(String, String), usize> = BTreeMap::new();

    for labels in edges_a.values() {
        for l in labels {
            *gold_totals.entry(l.clone()).or_insert(0) += 1;
        }
    }
    for labels in edges_b.values() {
        for l in labels {
            *sys_totals.entry(l.clone()).or_insert(0) += 1;
        }
    }

    for (key, labels_a) in &edges_a {
        let endpoints_aligned =
            aligned.contains(&(key.0.clone(), key.1)) && aligned.contains(&(key.0.clone(), key.2));
        if !endpoints_aligned {
            continue;
        }
        let Some(labels_b) = edges_b.get(key) else {
            continue;
        };
        let mut remaining_b = labels_b.clone();
        let mut leftover_a = Vec::new();
        for l in labels_a {
            if let Some(pos) = remaining_b.iter().position(|x| x == l) {
                remaining_b.remove(pos);
                *matched.entry(l.clone()).or_insert(0) += 1;
            } else {
                leftover_a.push(l.clone());
            }
        }
        // endpoint-matched, label-mismatched edges feed the confusion table
        for (ga, sb) in leftover_a.into_iter().zip(remaining_b) {
            *confusion.entry((ga, sb)).or_insert(0) += 1;
        }
    }

    let mut per_label = BTreeMap::new();
    let mut labels: Vec<&String> = gold_totals.keys().chain(sys_totals.keys()).collect();
    labels.sort();
    labels.dedup();
    for label in labels {
        let m = *matched.get(label).unwrap_or(&0) as f64;
        let g = *gold_totals.get(label).unwrap_or(&0) as f64;
        let s = *sys_totals.get(label).unwrap_or(&0) as f64;
        per_label.insert(label.clone(), PrF::from_ratios(m, s, m, g));
    }
    let m_total: usize = matched.values().sum();
    let micro = PrF::from_ratios(
        m_total as f64,
        sys_totals.values().sum::<usize>() as f64,
        m_total as f64,
        gold_totals.values().sum::<usize>() as f64,
    );
    let confusion = confusion
        .into_iter()
        .map(|((gold_label, sys_label), count)| {
            let distance = match (
                gold_label.parse::<RelationType>(),
                sys_label.parse::<RelationType>(),
            ) {
                (Ok(g), Ok(s)) => Some(
                    precedence_rank(PrecedenceLabel::Near(g))
                        .abs_diff(precedence_rank(PrecedenceLabel::Near(s))),
                ),
                _ => None,
            };
            ConfusionCell {
                gold_label,
                sys_label,
                count,
                precedence_distance: distance,
            }
        })
        .collect();
    EdgeScores {
        per_label,
        micro,
        confusion,
    }
}

/// Cohen's kappa over the entity-type labels of aligned mention pairs.
///
/// When the chance agreement is 1 (degenerate marginals), kappa is 1 for
/// perfect observed agreement and 0 otherwise.
pub fn entity_type_kappa(
    alignment: &MentionAlignment,
    a: &Corpus,
    b: &Corpus,
) -> Result<f64, MetricsError> {
    if alignment.pairs.is_empty() {
        return Err(MetricsError::EmptyAlignment);
    }
    let label_of = |corpus: &Corpus, r: &MentionRef| -> String {
        corpus
            .document(&r.document_id)
            .and_then(|d| d.mention(&r.mention_id))
            .map(|m| m.entity_type.clone())
            .unwrap_or_default()
    };
    let mut marg_a: BTreeMap<String, f64> = BTreeMap::new();
    let mut marg_b: BTreeMap<String, f64> = BTreeMap::new();
    let mut agree = 0.0;
    let n = alignment.pairs.len() as f64;
    for (ra, rb) in &alignment.pairs {
        let la = label_of(a, ra);
        let lb = label_of(b, rb);
        if la == lb {
            agree += 1.0;
        }
        *marg_a.entry(la).or_insert(0.0) += 1.0;
        *marg_b.entry(lb).or_insert(0.0) += 1.0;
    }
    let po = agree / n;
    let pe: f64 = marg_a
        .iter()
        .map(|(l, ca)| (ca / n) * (marg_b.get(l).unwrap_or(&0.0) / n))
        .sum();
    if (1.0 - pe).abs() < f64::EPSILON {
        return Ok(if (1.0 - po).abs() < f64::EPSILON { 1.0 } else { 0.0 });
    }
    Ok((po - pe) / (1.0 - pe))
}

/// The full comparison of two annotations.
#[derive(Debug, Clone, Serialize)]
pub struct ScoreReport {
    pub mention_detection: PrF,
    pub muc: PrF,
    pub b_cubed: PrF,
    pub ceaf_e: PrF,
    pub lea: PrF,
    pub conll: f64,
    pub edges: EdgeScores,
    /// Absent when no mention pairs aligned.
    pub entity_type_kappa: Option<f64>,
}

/// Builds the shared mention universe from both corpora's local clusters
/// and computes every metric. Mentions outside any identity cluster
/// (third-pass mentions) take part in mention detection and edge scoring
/// but not in the cluster metrics.
pub fn score_corpora(gold: &Corpus, sys: &Corpus) -> Result<ScoreReport, MetricsError> {
    let alignment = align_mentions(gold, sys)?;

    let side_clusters = |corpus: &Corpus| -> Vec<Vec<(String, Span)>> {
        let mut out = Vec::new();
        for doc in corpus.documents() {
            for (cluster, _) in derive_local_clusters_lenient(doc) {
                out.push(
                    cluster
                        .mention_ids
                        .iter()
                        .filter_map(|id| doc.mention(id))
                        .map(|m| (doc.id.clone(), m.span))
                        .collect(),
                );
            }
        }
        out
    };
    let gold_keys = side_clusters(gold);
    let sys_keys = side_clusters(sys);

    let mut universe: BTreeMap<(String, Span), usize> = BTreeMap::new();
    for key in gold_keys.iter().chain(sys_keys.iter()).flatten() {
        let next = universe.len();
        universe.entry(key.clone()).or_insert(next);
    }
    let to_indices = |clusters: &[Vec<(String, Span)>]| -> Clustering {
        let mut indexed: Clustering = clusters
            .iter()
            .map(|c| {
                let mut ids: Vec<usize> = c.iter().map(|k| universe[k]).collect();
                ids.sort();
                ids.dedup();
                ids
            })
            .collect();
        // mentions clustered only on the other side become singletons here
        let covered: std::collections::BTreeSet<usize> =
            indexed.iter().flatten().copied().collect();
        for idx in universe.values() {
            if !covered.contains(idx) {
                indexed.push(vec![*idx]);
            }
        }
        indexed
    };
    let gold_clusters = to_indices(&gold_keys);
    let sys_clusters = to_indices(&sys_keys);

    let muc_score = muc(&gold_clusters, &sys_clusters);
    let b3_score = b_cubed(&gold_clusters, &sys_clusters);
    let ceaf_score = ceaf_e(&gold_clusters, &sys_clusters);
    let lea_score = lea(&gold_clusters, &sys_clusters);
    let conll = conll_average(&muc_score, &b3_score, &ceaf_score);
    let edges = relation_edge_prf(gold, sys, &alignment);
    let kappa = entity_type_kappa(&alignment, gold, sys).ok();

    Ok(ScoreReport {
        mention_detection: mention_detection_f1(&alignment),
        muc: muc_score,
        b_cubed: b3_score,
        ceaf_e: ceaf_score,
        lea: lea_score,
        conll,
        edges,
        entity_type_kappa: kappa,
    })
}
