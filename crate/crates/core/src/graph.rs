//! Undirected multigraph with dense node ids and the primitive set quantities
//! (volume, cut, conductance, induced connectivity, distances) built on it.
//!
//! Invariants:
//! - node ids are `0..n`; creation order doubles as time order for generated graphs,
//! - parallel edges are allowed and counted with multiplicity everywhere,
//! - self-loops are rejected at construction.

use std::collections::VecDeque;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Immutable undirected multigraph stored as an edge list plus CSR adjacency.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    offsets: Vec<usize>,
    targets: Vec<usize>,
}

impl Graph {
    /// Builds a graph on `n` nodes. Parallel edges are kept; self-loops and
    /// out-of-range endpoints are rejected.
    pub fn from_edges(n: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        let mut degree = vec![0usize; n];
        for &(u, v) in &edges {
            if u >= n {
                return Err(Error::NodeOutOfRange { node: u, n });
            }
            if v >= n {
                return Err(Error::NodeOutOfRange { node: v, n });
            }
            if u == v {
                return Err(Error::invalid(format!("self-loop on node {u}")));
            }
            degree[u] += 1;
            degree[v] += 1;
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut cursor = offsets[..n].to_vec();
        let mut targets = vec![0usize; 2 * edges.len()];
        for &(u, v) in &edges {
            targets[cursor[u]] = v;
            cursor[u] += 1;
            targets[cursor[v]] = u;
            cursor[v] += 1;
        }
        Ok(Graph {
            n,
            edges,
            offsets,
            targets,
        })
    }

    /// A graph with `n` nodes and no edges.
    pub fn empty(n: usize) -> Self {
        Graph {
            n,
            edges: Vec::new(),
            offsets: vec![0; n + 1],
            targets: Vec::new(),
        }
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    #[inline]
    pub fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    /// Neighbors of `v`, repeated once per parallel edge.
    #[inline]
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.targets[self.offsets[v]..self.offsets[v + 1]]
    }

    pub fn degrees(&self) -> Vec<usize> {
        (0..self.n).map(|v| self.degree(v)).collect()
    }

    /// `2m`, the volume of the whole vertex set.
    pub fn total_volume(&self) -> usize {
        2 * self.edges.len()
    }

    pub fn check_node(&self, v: usize) -> Result<()> {
        if v < self.n {
            Ok(())
        } else {
            Err(Error::NodeOutOfRange { node: v, n: self.n })
        }
    }

    /// Returns the same graph with node `v` renamed to `perm[v]`.
    pub fn relabeled(&self, perm: &[usize]) -> Result<Graph> {
        if perm.len() != self.n {
            return Err(Error::invalid("permutation length differs from node count"));
        }
        let edges = self.edges.iter().map(|&(u, v)| (perm[u], perm[v])).collect();
        Graph::from_edges(self.n, edges)
    }
}

/// Sorted, duplicate-free set of node ids.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeSet(Vec<usize>);

impl NodeSet {
    pub fn new(ids: impl IntoIterator<Item = usize>) -> Self {
        let mut v: Vec<usize> = ids.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        NodeSet(v)
    }

    /// All nodes `0..n`.
    pub fn all(n: usize) -> Self {
        NodeSet((0..n).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    #[inline]
    pub fn contains(&self, v: usize) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    pub fn complement(&self, n: usize) -> NodeSet {
        NodeSet((0..n).filter(|&v| !self.contains(v)).collect())
    }

    /// Checks every member is a node of `g`.
    pub fn validate(&self, g: &Graph) -> Result<()> {
        match self.0.last() {
            Some(&v) => g.check_node(v),
            None => Ok(()),
        }
    }

    pub fn into_vec(self) -> Vec<usize> {
        self.0
    }
}

impl FromIterator<usize> for NodeSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        NodeSet::new(iter)
    }
}

/// Sum of degrees of the members of `s`.
pub fn volume(g: &Graph, s: &NodeSet) -> Result<usize> {
    s.validate(g)?;
    Ok(s.iter().map(|v| g.degree(v)).sum())
}

/// Number of edges, with multiplicity, having exactly one endpoint in `s`.
pub fn cut_size(g: &Graph, s: &NodeSet) -> Result<usize> {
    s.validate(g)?;
    Ok(cut_unchecked(g, s))
}

fn cut_unchecked(g: &Graph, s: &NodeSet) -> usize {
    s.iter()
        .flat_map(|v| g.neighbors(v))
        .filter(|&&w| !s.contains(w))
        .count()
}

/// Number of edges with both endpoints in `s`.
pub fn intra_edge_count(g: &Graph, s: &NodeSet) -> Result<usize> {
    s.validate(g)?;
    let internal_endpoints = s
        .iter()
        .flat_map(|v| g.neighbors(v))
        .filter(|&&w| s.contains(w))
        .count();
    Ok(internal_endpoints / 2)
}

/// `cut(S) / min(vol(S), vol(V \ S))`.
///
/// Fails with [`Error::UndefinedConductance`] when either side has zero volume,
/// which includes the empty set and the whole vertex set.
pub fn conductance(g: &Graph, s: &NodeSet) -> Result<f64> {
    s.validate(g)?;
    let vol: usize = s.iter().map(|v| g.degree(v)).sum();
    conductance_from_parts(cut_unchecked(g, s), vol, g.total_volume())
}

pub(crate) fn conductance_from_parts(cut: usize, vol: usize, total: usize) -> Result<f64> {
    let denom = vol.min(total - vol);
    if denom == 0 {
        return Err(Error::UndefinedConductance);
    }
    Ok(cut as f64 / denom as f64)
}

/// Whether the subgraph induced by `s` is connected.
pub fn is_connected_induced(g: &Graph, s: &NodeSet) -> Result<bool> {
    s.validate(g)?;
    let first = s
        .as_slice()
        .first()
        .copied()
        .ok_or_else(|| Error::invalid("connectivity of an empty set"))?;
    let dist = induced_bfs(g, s, first);
    Ok(dist.iter().all(|d| d.is_some()))
}

/// BFS restricted to `s`; distances indexed by position in `s`.
fn induced_bfs(g: &Graph, s: &NodeSet, source: usize) -> Vec<Option<usize>> {
    let members = s.as_slice();
    let pos = |v: usize| members.binary_search(&v).ok();
    let mut dist = vec![None; members.len()];
    let mut queue = VecDeque::new();
    dist[pos(source).expect("source in set")] = Some(0);
    queue.push_back(source);
    while let Some(u) = queue.pop_front() {
        let du = dist[pos(u).unwrap()].unwrap();
        for &w in g.neighbors(u) {
            if let Some(i) = pos(w) {
                if dist[i].is_none() {
                    dist[i] = Some(du + 1);
                    queue.push_back(w);
                }
            }
        }
    }
    dist
}

/// Largest shortest-path length between members of `s` inside the induced
/// subgraph; `None` when the induced subgraph is disconnected.
pub fn subgraph_diameter(g: &Graph, s: &NodeSet) -> Result<Option<usize>> {
    s.validate(g)?;
    if s.is_empty() {
        return Err(Error::invalid("diameter of an empty set"));
    }
    let mut diameter = 0;
    for v in s.iter() {
        for d in induced_bfs(g, s, v) {
            match d {
                Some(d) => diameter = diameter.max(d),
                None => return Ok(None),
            }
        }
    }
    Ok(Some(diameter))
}

/// Component label per node, labels dense in discovery order.
pub fn connected_components(g: &Graph) -> Vec<usize> {
    let mut label = vec![usize::MAX; g.node_count()];
    let mut queue = VecDeque::new();
    let mut next = 0;
    for start in 0..g.node_count() {
        if label[start] != usize::MAX {
            continue;
        }
        label[start] = next;
        queue.push_back(start);
        while let Some(u) = queue.pop_front() {
            for &w in g.neighbors(u) {
                if label[w] == usize::MAX {
                    label[w] = next;
                    queue.push_back(w);
                }
            }
        }
        next += 1;
    }
    label
}

/// Members of the largest connected component (smallest label wins ties).
pub fn largest_component(g: &Graph) -> NodeSet {
    let label = connected_components(g);
    let count = label.iter().max().map_or(0, |&l| l + 1);
    let mut sizes = vec![0usize; count];
    for &l in &label {
        sizes[l] += 1;
    }
    let Some(best) = (0..count).max_by_key(|&l| (sizes[l], std::cmp::Reverse(l))) else {
        return NodeSet::default();
    };
    NodeSet((0..g.node_count()).filter(|&v| label[v] == best).collect())
}

/// Unweighted single-source distances over the whole graph.
pub fn bfs_distances(g: &Graph, source: usize) -> Vec<Option<usize>> {
    let mut dist = vec![None; g.node_count()];
    let mut queue = VecDeque::new();
    dist[source] = Some(0);
    queue.push_back(source);
    while let Some(u) = queue.pop_front() {
        let du = dist[u].unwrap();
        for &w in g.neighbors(u) {
            if dist[w].is_none() {
                dist[w] = Some(du + 1);
                queue.push_back(w);
            }
        }
    }
    dist
}

/// Mean shortest-path distance between node pairs of the largest connected component.
///
/// When `sample_pairs` is at least the number of unordered pairs in the component
/// every pair is measured exactly; otherwise pairs are drawn uniformly with a
/// generator seeded by `rng_seed`.
pub fn avg_distance_estimate(g: &Graph, sample_pairs: usize, rng_seed: u64) -> Result<f64> {
    if sample_pairs == 0 {
        return Err(Error::invalid("sample_pairs must be at least 1"));
    }
    let lcc = largest_component(g);
    let k = lcc.len();
    if k < 2 {
        return Err(Error::InsufficientData(
            "largest component has fewer than two nodes".into(),
        ));
    }
    let total_pairs = k * (k - 1) / 2;
    if sample_pairs >= total_pairs {
        let mut sum = 0usize;
        for u in lcc.iter() {
            let dist = bfs_distances(g, u);
            sum += lcc
                .iter()
                .filter(|&v| v > u)
                .map(|v| dist[v].expect("same component"))
                .sum::<usize>();
        }
        return Ok(sum as f64 / total_pairs as f64);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let members = lcc.as_slice();
    let mut pairs: Vec<(usize, usize)> = (0..sample_pairs)
        .map(|_| {
            let i = rng.random_range(0..k);
            let mut j = rng.random_range(0..k - 1);
            if j >= i {
                j += 1;
            }
            (members[i], members[j])
        })
        .collect();
    // Group by source so each BFS serves several pairs.
    pairs.sort_unstable();
    let mut sum = 0usize;
    let mut i = 0;
    while i < pairs.len() {
        let src = pairs[i].0;
        let dist = bfs_distances(g, src);
        while i < pairs.len() && pairs[i].0 == src {
            sum += dist[pairs[i].1].expect("same component");
            i += 1;
        }
    }
    Ok(sum as f64 / sample_pairs as f64)
}

/// A uniformly random permutation of `0..n`, for relabeling-invariance checks.
pub fn random_permutation(n: usize, rng_seed: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(&mut rng);
    perm
}
