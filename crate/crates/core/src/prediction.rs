//! Keyword prediction from communities.
//!
//! Each community is summarized by the most frequent keywords of its annotated
//! members. A keyword is predicted for an un-annotated member and counts as
//! confirmed when it appears as a whole phrase in the member's title or abstract.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generators::ColoredGraph;
use crate::graph::{Graph, NodeSet};
use crate::metrics::CommunitySet;

/// Text attached to one node.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    #[serde(default)]
    pub title: String,
    #[serde(default, rename = "abstract")]
    pub abstract_text: String,
    #[serde(default)]
    pub keywords: Vec<String>,
}

impl Document {
    pub fn is_annotated(&self) -> bool {
        !self.keywords.is_empty()
    }
}

/// A graph with one document per node.
#[derive(Debug, Clone)]
pub struct AttributedGraph {
    graph: Graph,
    docs: Vec<Document>,
}

impl AttributedGraph {
    pub fn new(graph: Graph, docs: Vec<Document>) -> Result<Self> {
        if docs.len() != graph.node_count() {
            return Err(Error::invalid(format!(
                "{} documents for {} nodes",
                docs.len(),
                graph.node_count()
            )));
        }
        Ok(AttributedGraph { graph, docs })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn docs(&self) -> &[Document] {
        &self.docs
    }

    pub fn annotated_count(&self) -> usize {
        self.docs.iter().filter(|d| d.is_annotated()).count()
    }
}

/// Splits text into lowercase tokens.
///
/// Tokens are whitespace-separated words with leading and trailing
/// non-alphanumeric characters removed; inner punctuation such as the hyphen in
/// `d-branes` is kept.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split_whitespace()
        .map(|w| w.trim_matches(|c: char| !c.is_alphanumeric()).to_lowercase())
        .filter(|w| !w.is_empty())
        .collect()
}

/// Canonical form of a keyword: its tokens joined by single spaces.
pub fn normalize_keyword(keyword: &str) -> String {
    tokenize(keyword).join(" ")
}

fn contains_phrase(haystack: &[String], phrase: &[String]) -> bool {
    !phrase.is_empty() && haystack.windows(phrase.len()).any(|w| w == phrase)
}

/// Whether `keyword` occurs as a contiguous token sequence in the title or the abstract.
pub fn confirm_keyword(doc: &Document, keyword: &str) -> bool {
    let phrase = tokenize(keyword);
    contains_phrase(&tokenize(&doc.title), &phrase)
        || contains_phrase(&tokenize(&doc.abstract_text), &phrase)
}

/// The `k` most frequent keywords among annotated members, ties broken lexicographically.
///
/// Keywords are normalized before counting and each member counts a keyword once.
pub fn top_k_keywords(ag: &AttributedGraph, community: &NodeSet, k: usize) -> Result<Vec<String>> {
    if k == 0 {
        return Err(Error::invalid("k must be at least 1"));
    }
    community.validate(&ag.graph)?;
    let mut counts: HashMap<String, usize> = HashMap::new();
    for v in community.iter() {
        let own: BTreeSet<String> = ag.docs[v]
            .keywords
            .iter()
            .map(|kw| normalize_keyword(kw))
            .filter(|kw| !kw.is_empty())
            .collect();
        for kw in own {
            *counts.entry(kw).or_default() += 1;
        }
    }
    let mut ranked: Vec<(String, usize)> = counts.into_iter().collect();
    ranked.sort_unstable_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    Ok(ranked.into_iter().take(k).map(|(kw, _)| kw).collect())
}

/// Confirmed predictions for one popularity cutoff `k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionResult {
    pub k: usize,
    /// Un-annotated nodes with at least one confirmed keyword.
    pub per_node_confirmed: BTreeMap<usize, Vec<String>>,
    /// `r` → number of nodes with exactly `r ≥ 1` confirmed keywords.
    pub histogram: BTreeMap<usize, usize>,
    pub total_covered: usize,
}

/// Per-node token lists, computed once per prediction run.
struct Tokens {
    title: Vec<Vec<String>>,
    abstract_text: Vec<Vec<String>>,
}

impl Tokens {
    fn new(ag: &AttributedGraph) -> Self {
        let (title, abstract_text) = ag
            .docs
            .par_iter()
            .map(|d| (tokenize(&d.title), tokenize(&d.abstract_text)))
            .unzip();
        Tokens {
            title,
            abstract_text,
        }
    }

    fn confirms(&self, v: usize, phrase: &[String]) -> bool {
        contains_phrase(&self.title[v], phrase) || contains_phrase(&self.abstract_text[v], phrase)
    }
}

/// A community's top keywords and, per un-annotated member, the ranks it confirms.
type CommunityHits = (Vec<String>, Vec<(usize, Vec<usize>)>);

/// For each community and un-annotated member, the ranks (0-based) of the confirmed top keywords.
fn confirmations(
    ag: &AttributedGraph,
    communities: &CommunitySet,
    k: usize,
) -> Result<Vec<CommunityHits>> {
    communities.validate(&ag.graph)?;
    let tokens = Tokens::new(ag);
    communities
        .as_slice()
        .par_iter()
        .map(|c| {
            let top = top_k_keywords(ag, c, k)?;
            let phrases: Vec<Vec<String>> = top.iter().map(|kw| tokenize(kw)).collect();
            let hits = c
                .iter()
                .filter(|&v| !ag.docs[v].is_annotated())
                .map(|v| {
                    let ranks = (0..phrases.len())
                        .filter(|&i| tokens.confirms(v, &phrases[i]))
                        .collect();
                    (v, ranks)
                })
                .collect();
            Ok((top, hits))
        })
        .collect()
}

/// Predicts the top-`k` keywords of every community for its un-annotated members.
///
/// A node in several communities receives the union of its confirmations.
pub fn predict(ag: &AttributedGraph, communities: &CommunitySet, k: usize) -> Result<PredictionResult> {
    if k == 0 {
        return Err(Error::invalid("k must be at least 1"));
    }
    let mut confirmed: BTreeMap<usize, BTreeSet<String>> = BTreeMap::new();
    for (top, hits) in confirmations(ag, communities, k)? {
        for (v, ranks) in hits {
            if !ranks.is_empty() {
                confirmed
                    .entry(v)
                    .or_default()
                    .extend(ranks.into_iter().map(|i| top[i].clone()));
            }
        }
    }
    let mut histogram = BTreeMap::new();
    for kws in confirmed.values() {
        *histogram.entry(kws.len()).or_default() += 1;
    }
    Ok(PredictionResult {
        k,
        total_covered: confirmed.len(),
        per_node_confirmed: confirmed
            .into_iter()
            .map(|(v, kws)| (v, kws.into_iter().collect()))
            .collect(),
        histogram,
    })
}

/// Number of covered nodes for every cutoff `k = 1..=k_max`.
///
/// The top-`k` list is a prefix of the top-`k_max` list, so a node is covered at
/// cutoff `k` exactly when its best confirmed rank is below `k`.
pub fn prediction_curve(
    ag: &AttributedGraph,
    communities: &CommunitySet,
    k_max: usize,
) -> Result<Vec<(usize, usize)>> {
    if k_max == 0 {
        return Err(Error::invalid("k_max must be at least 1"));
    }
    let mut best_rank: BTreeMap<usize, usize> = BTreeMap::new();
    for (_, hits) in confirmations(ag, communities, k_max)? {
        for (v, ranks) in hits {
            if let Some(&r) = ranks.first() {
                let entry = best_rank.entry(v).or_insert(r);
                *entry = (*entry).min(r);
            }
        }
    }
    let mut first_covered = vec![0usize; k_max];
    for &r in best_rank.values() {
        first_covered[r] += 1;
    }
    let curve: Vec<(usize, usize)> = first_covered
        .iter()
        .scan(0, |acc, &c| {
            *acc += c;
            Some(*acc)
        })
        .enumerate()
        .map(|(i, total)| (i + 1, total))
        .collect();
    debug_assert!(curve.windows(2).all(|w| w[0].1 <= w[1].1));
    Ok(curve)
}

/// Graphs whose nodes carry label sets.
pub trait Labeled {
    fn node_count(&self) -> usize;
    fn label_count(&self, v: usize) -> usize;
}

impl Labeled for AttributedGraph {
    fn node_count(&self) -> usize {
        self.graph.node_count()
    }

    fn label_count(&self, v: usize) -> usize {
        self.docs[v]
            .keywords
            .iter()
            .map(|kw| normalize_keyword(kw))
            .filter(|kw| !kw.is_empty())
            .collect::<BTreeSet<_>>()
            .len()
    }
}

impl Labeled for ColoredGraph {
    fn node_count(&self) -> usize {
        self.graph.node_count()
    }

    fn label_count(&self, _v: usize) -> usize {
        1
    }
}

/// Largest label-set size over all nodes.
pub fn dimension(g: &impl Labeled) -> usize {
    (0..g.node_count()).map(|v| g.label_count(v)).max().unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{gen_homophyly, HomophylyParams};
    use proptest::prelude::*;

    fn doc(title: &str, abs: &str, keywords: &[&str]) -> Document {
        Document {
            title: title.into(),
            abstract_text: abs.into(),
            keywords: keywords.iter().map(|s| s.to_string()).collect(),
        }
    }

    /// Ten disjoint communities of 10 nodes; the first half of each is annotated
    /// with `topic c` (two of them also with `common`), the second half mentions
    /// `topic c` in the abstract.
    pub(crate) fn planted() -> (AttributedGraph, CommunitySet) {
        let mut edges = Vec::new();
        let mut docs = Vec::new();
        let mut communities = Vec::new();
        for c in 0..10 {
            let base = c * 10;
            for i in 0..10 {
                for j in (i + 1)..10 {
                    edges.push((base + i, base + j));
                }
                let kw = format!("topic {c}");
                docs.push(if i < 2 {
                    doc("annotated", "", &[&kw, "common"])
                } else if i < 5 {
                    doc("annotated", "", &[&kw])
                } else {
                    doc("paper", &format!("we study {kw} in depth"), &[])
                });
            }
            communities.push(NodeSet::new(base..base + 10));
        }
        let g = Graph::from_edges(100, edges).unwrap();
        (AttributedGraph::new(g, docs).unwrap(), CommunitySet::new(communities))
    }

    #[test]
    fn tokenizer_rules() {
        assert_eq!(tokenize("  Lattice (gauge) theory, D-branes!  "), ["lattice", "gauge", "theory", "d-branes"]);
        assert_eq!(normalize_keyword(" Gauge   Theory "), "gauge theory");
    }

    #[test]
    fn confirm_examples() {
        let d = doc("On things", "results for lattice gauge theory at strong coupling", &[]);
        assert!(confirm_keyword(&d, "gauge theory"));
        assert!(confirm_keyword(&d, "Gauge  Theory"));
        assert!(!confirm_keyword(&d, "gauge coupling"));
        assert!(!confirm_keyword(&doc("Superstring dualities", "", &[]), "string"));
        assert!(confirm_keyword(&doc("D-branes and strings", "", &[]), "d-branes"));
        assert!(!confirm_keyword(&d, ""));
        // A phrase does not straddle title and abstract.
        assert!(!confirm_keyword(&doc("about gauge", "theory", &[]), "gauge theory"));
    }

    #[test]
    fn top_k_examples() {
        let docs = vec![
            doc("", "", &["x", "y"]),
            doc("", "", &["x"]),
            doc("", "", &["z"]),
            doc("", "", &[]),
        ];
        let ag = AttributedGraph::new(Graph::empty(4), docs).unwrap();
        assert_eq!(top_k_keywords(&ag, &NodeSet::new([0, 1, 2]), 2).unwrap(), ["x", "y"]);
        assert_eq!(top_k_keywords(&ag, &NodeSet::new([0, 1, 2]), 10).unwrap(), ["x", "y", "z"]);
        assert!(top_k_keywords(&ag, &NodeSet::new([3]), 3).unwrap().is_empty());
        assert!(top_k_keywords(&ag, &NodeSet::new([0]), 0).is_err());
    }

    #[test]
    fn planted_keywords_are_fully_recovered() {
        let (ag, communities) = planted();
        let r = predict(&ag, &communities, 1).unwrap();
        assert_eq!(r.total_covered, 50);
        assert_eq!(r.histogram, BTreeMap::from([(1, 50)]));
        for (v, kws) in &r.per_node_confirmed {
            assert!(!ag.docs()[*v].is_annotated());
            assert_eq!(kws, &[format!("topic {}", v / 10)]);
        }
        let curve = prediction_curve(&ag, &communities, 5).unwrap();
        assert_eq!(curve, vec![(1, 50), (2, 50), (3, 50), (4, 50), (5, 50)]);
        assert_eq!(prediction_curve(&ag, &communities, 1).unwrap(), vec![(1, 50)]);
    }

    #[test]
    fn nothing_to_predict_without_unannotated_nodes() {
        let ag = AttributedGraph::new(Graph::empty(2), vec![doc("a", "", &["a"]); 2]).unwrap();
        let r = predict(&ag, &CommunitySet::new(vec![NodeSet::new([0, 1])]), 3).unwrap();
        assert_eq!(r.total_covered, 0);
        assert!(r.histogram.is_empty());
    }

    #[test]
    fn overlapping_communities_take_the_union() {
        let docs = vec![
            doc("", "", &["alpha"]),
            doc("", "", &["beta"]),
            doc("alpha and beta", "", &[]),
        ];
        let ag = AttributedGraph::new(Graph::empty(3), docs).unwrap();
        let cs = CommunitySet::new(vec![NodeSet::new([0, 2]), NodeSet::new([1, 2])]);
        let r = predict(&ag, &cs, 1).unwrap();
        assert_eq!(r.per_node_confirmed[&2], ["alpha", "beta"]);
        assert_eq!(r.histogram, BTreeMap::from([(2, 1)]));
    }

    #[test]
    fn dimension_examples() {
        let cg = gen_homophyly(&HomophylyParams { n: 50, a: 1.5, d: 2, rng_seed: 0 }).unwrap();
        assert_eq!(dimension(&cg), 1);
        let ag = AttributedGraph::new(Graph::empty(2), vec![doc("", "", &[]); 2]).unwrap();
        assert_eq!(dimension(&ag), 0);
        let ag = AttributedGraph::new(
            Graph::empty(2),
            vec![doc("", "", &["a", "b", "c", "d", "e"]), doc("", "", &["a", "A"])],
        )
        .unwrap();
        assert_eq!(dimension(&ag), 5);
    }

    const WORDS: [&str; 6] = ["gauge", "theory", "string", "brane", "lattice", "field"];

    fn arb_text() -> impl Strategy<Value = String> {
        proptest::collection::vec(0..WORDS.len(), 0..8)
            .prop_map(|ix| ix.into_iter().map(|i| WORDS[i]).collect::<Vec<_>>().join(" "))
    }

    fn arb_instance() -> impl Strategy<Value = (AttributedGraph, CommunitySet)> {
        let docs = proptest::collection::vec(
            (arb_text(), arb_text(), proptest::collection::vec(0..WORDS.len(), 0..3)),
            12,
        );
        let comms = proptest::collection::vec(proptest::collection::btree_set(0usize..12, 1..6), 1..5);
        (docs, comms).prop_map(|(docs, comms)| {
            let docs = docs
                .into_iter()
                .map(|(t, a, k)| Document {
                    title: t,
                    abstract_text: a,
                    keywords: k.into_iter().map(|i| WORDS[i].to_string()).collect(),
                })
                .collect();
            let ag = AttributedGraph::new(Graph::empty(12), docs).unwrap();
            (ag, comms.into_iter().map(NodeSet::new).collect())
        })
    }

    proptest! {
        #[test]
        fn prediction_invariants((ag, cs) in arb_instance(), k_max in 1usize..6) {
            let curve = prediction_curve(&ag, &cs, k_max).unwrap();
            prop_assert_eq!(curve.len(), k_max);
            prop_assert!(curve.windows(2).all(|w| w[0].1 <= w[1].1));
            for &(k, covered) in &curve {
                let r = predict(&ag, &cs, k).unwrap();
                prop_assert_eq!(r.total_covered, covered);
                prop_assert_eq!(r.histogram.values().sum::<usize>(), r.total_covered);
                for (v, kws) in &r.per_node_confirmed {
                    prop_assert!(!ag.docs()[*v].is_annotated());
                    for kw in kws {
                        prop_assert!(confirm_keyword(&ag.docs()[*v], kw));
                        let in_some_top = cs.iter().filter(|c| c.contains(*v)).any(|c| {
                            top_k_keywords(&ag, c, k).unwrap().contains(kw)
                        });
                        prop_assert!(in_some_top);
                    }
                }
            }
        }
    }
}
