//! Seeded random graph constructions: Erdős–Rényi, preferential attachment and
//! the homophyly model.
//!
//! Every generator is a pure function of its parameters and a 64-bit seed; the
//! same inputs always yield the same edge list in the same order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeSet};
use crate::metrics::{CommunitySet, Partition};

/// Parameters of the homophyly model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HomophylyParams {
    /// Final node count.
    pub n: usize,
    /// Homophyly exponent; seeds appear at step `t` with probability `min(1, 1/ln(t)^a)`.
    pub a: f64,
    /// Edges contributed by every new node.
    pub d: usize,
    pub rng_seed: u64,
}

impl HomophylyParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.a > 1.0) || !self.a.is_finite() {
            return Err(Error::invalid(format!(
                "homophyly exponent must be > 1, got {}",
                self.a
            )));
        }
        if self.d < 1 {
            return Err(Error::invalid("d must be at least 1"));
        }
        if self.n < 2 {
            return Err(Error::invalid("n must be at least 2"));
        }
        Ok(())
    }

    /// Probability that the node created at step `t` is a seed.
    pub fn seed_probability(&self, t: usize) -> f64 {
        (1.0 / (t as f64).ln().powf(self.a)).min(1.0)
    }
}

/// A graph whose nodes carry a color, a seed flag and the step that created them.
#[derive(Debug, Clone, PartialEq)]
pub struct ColoredGraph {
    pub graph: Graph,
    pub color: Vec<usize>,
    pub is_seed: Vec<bool>,
    pub creation_time: Vec<usize>,
}

impl ColoredGraph {
    /// Assembles a colored graph from parts, checking only that lengths agree.
    ///
    /// Hand-built graphs used in tests need not satisfy the homophyly invariants.
    pub fn from_parts(
        graph: Graph,
        color: Vec<usize>,
        is_seed: Vec<bool>,
        creation_time: Vec<usize>,
    ) -> Result<Self> {
        let n = graph.node_count();
        if color.len() != n || is_seed.len() != n || creation_time.len() != n {
            return Err(Error::invalid(format!(
                "colored graph attribute lengths ({}, {}, {}) differ from node count {n}",
                color.len(),
                is_seed.len(),
                creation_time.len()
            )));
        }
        Ok(ColoredGraph {
            graph,
            color,
            is_seed,
            creation_time,
        })
    }

    pub fn node_count(&self) -> usize {
        self.graph.node_count()
    }

    /// Number of distinct colors.
    pub fn color_count(&self) -> usize {
        let mut colors = self.color.clone();
        colors.sort_unstable();
        colors.dedup();
        colors.len()
    }

    pub fn seed_count(&self) -> usize {
        self.is_seed.iter().filter(|&&s| s).count()
    }
}

/// Erdős–Rényi `G(n, p)`: every unordered pair is an edge independently with probability `p`.
///
/// Uses geometric skipping over the pair sequence, so the expected running time
/// is linear in `n + m`.
pub fn gen_er(n: usize, p: f64, rng_seed: u64) -> Result<Graph> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::invalid(format!("edge probability {p} outside [0, 1]")));
    }
    if p == 0.0 || n < 2 {
        return Ok(Graph::empty(n));
    }
    let mut edges = Vec::new();
    if p == 1.0 {
        for v in 1..n {
            for w in 0..v {
                edges.push((v, w));
            }
        }
        return Graph::from_edges(n, edges);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let log_q = (1.0 - p).ln();
    // Pairs (v, w) with w < v in row-major order; `w` is advanced by geometric jumps.
    let mut v: usize = 1;
    let mut w: i64 = -1;
    while v < n {
        let r: f64 = rng.random();
        let skip = ((1.0 - r).ln() / log_q).floor();
        w += 1 + skip.min(i64::MAX as f64 / 2.0) as i64;
        while w >= v as i64 && v < n {
            w -= v as i64;
            v += 1;
        }
        if v < n {
            edges.push((v, w as usize));
        }
    }
    Graph::from_edges(n, edges)
}

/// Preferential attachment: two nodes joined by `d` parallel edges, then every new
/// node draws `d` endpoints independently with probability proportional to degree.
pub fn gen_pa(n: usize, d: usize, rng_seed: u64) -> Result<Graph> {
    if n < 2 {
        return Err(Error::invalid("n must be at least 2"));
    }
    if d < 1 {
        return Err(Error::invalid("d must be at least 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut edges = Vec::with_capacity(d * (n - 1));
    // Each node appears once per incident edge endpoint.
    let mut endpoints = Vec::with_capacity(2 * d * (n - 1));
    for _ in 0..d {
        edges.push((1, 0));
        endpoints.extend([0, 1]);
    }
    let mut targets = Vec::with_capacity(d);
    for v in 2..n {
        targets.clear();
        targets.extend((0..d).map(|_| endpoints[rng.random_range(0..endpoints.len())]));
        for &u in &targets {
            edges.push((v, u));
            endpoints.extend([v, u]);
        }
    }
    Graph::from_edges(n, edges)
}

/// The homophyly model.
///
/// Nodes 0 and 1 are seeds of two distinct colors joined by `d` parallel edges
/// (steps 1 and 2). At each later step `t = 3..=n` the new node becomes a seed
/// with probability `min(1, 1/ln(t)^a)`, taking a fresh color and linking `d`
/// times degree-proportionally over the whole graph; otherwise it adopts a
/// uniformly random existing color and links `d` times degree-proportionally
/// among nodes of that color. Targets are drawn from the graph as it stood at
/// the end of the previous step.
pub fn gen_homophyly(params: &HomophylyParams) -> Result<ColoredGraph> {
    params.validate()?;
    let HomophylyParams { n, d, .. } = *params;
    let mut rng = ChaCha8Rng::seed_from_u64(params.rng_seed);

    let mut edges = Vec::with_capacity(d * (n - 1));
    let mut color = Vec::with_capacity(n);
    let mut is_seed = Vec::with_capacity(n);
    let mut creation_time = Vec::with_capacity(n);
    let mut endpoints: Vec<usize> = Vec::with_capacity(2 * d * (n - 1));
    // Per color, each member appears once per incident edge endpoint.
    let mut color_endpoints: Vec<Vec<usize>> = vec![Vec::new(), Vec::new()];

    for v in 0..2 {
        color.push(v);
        is_seed.push(true);
        creation_time.push(v + 1);
    }
    for _ in 0..d {
        edges.push((1, 0));
        endpoints.extend([0, 1]);
        color_endpoints[0].push(0);
        color_endpoints[1].push(1);
    }

    let mut targets = Vec::with_capacity(d);
    for v in 2..n {
        let t = v + 1;
        targets.clear();
        let c = if rng.random_bool(params.seed_probability(t)) {
            let c = color_endpoints.len();
            color_endpoints.push(Vec::new());
            targets.extend((0..d).map(|_| endpoints[rng.random_range(0..endpoints.len())]));
            is_seed.push(true);
            c
        } else {
            let c = rng.random_range(0..color_endpoints.len());
            let pool = &color_endpoints[c];
            targets.extend((0..d).map(|_| pool[rng.random_range(0..pool.len())]));
            is_seed.push(false);
            c
        };
        color.push(c);
        creation_time.push(t);
        for &u in &targets {
            edges.push((v, u));
            endpoints.extend([v, u]);
            color_endpoints[c].push(v);
            color_endpoints[color[u]].push(u);
        }
    }

    let graph = Graph::from_edges(n, edges)?;
    ColoredGraph::from_parts(graph, color, is_seed, creation_time)
}

/// Members of every color, ordered by color id. Colors without members are skipped.
pub fn homochromatic_sets(cg: &ColoredGraph) -> CommunitySet {
    let max = cg.color.iter().copied().max().map_or(0, |c| c + 1);
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); max];
    for (v, &c) in cg.color.iter().enumerate() {
        members[c].push(v);
    }
    CommunitySet::new(
        members
            .into_iter()
            .filter(|m| !m.is_empty())
            .map(NodeSet::new)
            .collect(),
    )
}

/// The color classes as a partition of the node set.
pub fn homochromatic_partition(cg: &ColoredGraph) -> Partition {
    Partition::from_assignment(cg.color.clone())
}
