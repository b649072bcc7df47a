#![allow(dead_code)]

use std::collections::BTreeMap;

use citerank::corpus::Polarity;
use citerank::ranking::CitationGraph;
use rand::Rng;

/// Recomputes the M-index of every cited paper from scratch, scanning the
/// raw edge list once per paper the way the reference pseudocode does: sum the
/// incoming polarity scores, clamp to {2, 1, -1}, then accumulate
/// score × source reliability over each paper's incoming edges.
pub fn brute_force_m_index(edges: &[(String, String, Polarity)]) -> BTreeMap<String, f64> {
    let ps = |p: Polarity| match p {
        Polarity::Positive => 1.0,
        Polarity::Neutral => 0.5,
        Polarity::Negative => -0.5,
    };
    let mut papers: Vec<&String> = edges.iter().flat_map(|(s, t, _)| [s, t]).collect();
    papers.sort();
    papers.dedup();

    let mut relscore: BTreeMap<&String, f64> = BTreeMap::new();
    for paper in &papers {
        let mut raw = 0.0;
        for (_, t, p) in edges {
            if t == *paper {
                raw += ps(*p);
            }
        }
        let norm = if raw > 1.0 {
            2.0
        } else if raw < 0.0 {
            -1.0
        } else {
            1.0
        };
        relscore.insert(paper, norm);
    }

    let mut mscore = BTreeMap::new();
    for (s, t, p) in edges {
        *mscore.entry(t.clone()).or_insert(0.0) += relscore[s] * ps(*p);
    }
    mscore
}

pub fn random_edges<R: Rng>(rng: &mut R, max_nodes: usize, max_edges: usize) -> Vec<(String, String, Polarity)> {
    let nodes = rng.gen_range(1..=max_nodes);
    let edges = rng.gen_range(0..=max_edges);
    (0..edges)
        .map(|_| {
            (
                format!("N{}", rng.gen_range(0..nodes)),
                format!("N{}", rng.gen_range(0..nodes)),
                Polarity::ALL[rng.gen_range(0..3)],
            )
        })
        .collect()
}

pub fn graph_of(edges: &[(String, String, Polarity)]) -> CitationGraph {
    let mut g = CitationGraph::new();
    for (s, t, p) in edges {
        g.add_edge(s, t, *p);
    }
    g
}
