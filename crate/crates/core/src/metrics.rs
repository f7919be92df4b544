//! Community-structure ratios: modularity (σ), entropy ratio (τ) and
//! conductance ratio (θ), the empirical criterion that combines them, and an
//! exhaustive optimizer for tiny graphs used as a test oracle.

use log::warn;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{conductance_from_parts, is_connected_induced, Graph, NodeSet};

/// Total assignment of nodes to modules with dense module ids `0..L`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    assignment: Vec<usize>,
    module_count: usize,
}

impl Partition {
    /// Builds a partition from arbitrary labels, renumbering them densely in
    /// first-seen order.
    pub fn from_assignment(labels: Vec<usize>) -> Self {
        let mut map = std::collections::HashMap::new();
        let mut assignment = Vec::with_capacity(labels.len());
        for l in labels {
            let next = map.len();
            assignment.push(*map.entry(l).or_insert(next));
        }
        Partition {
            module_count: map.len(),
            assignment,
        }
    }

    pub fn singletons(n: usize) -> Self {
        Partition {
            assignment: (0..n).collect(),
            module_count: n,
        }
    }

    pub fn single_module(n: usize) -> Self {
        Partition {
            assignment: vec![0; n],
            module_count: usize::from(n > 0),
        }
    }

    /// Builds a partition of `0..n` from disjoint modules that cover every node.
    pub fn from_modules(n: usize, modules: &CommunitySet) -> Result<Self> {
        let mut labels = vec![usize::MAX; n];
        for (j, module) in modules.iter().enumerate() {
            if module.is_empty() {
                return Err(Error::invalid(format!("module {j} is empty")));
            }
            for v in module.iter() {
                if v >= n {
                    return Err(Error::NodeOutOfRange { node: v, n });
                }
                if labels[v] != usize::MAX {
                    return Err(Error::invalid(format!("node {v} appears in two modules")));
                }
                labels[v] = j;
            }
        }
        if let Some(v) = labels.iter().position(|&l| l == usize::MAX) {
            return Err(Error::invalid(format!("node {v} is not assigned to any module")));
        }
        Ok(Partition::from_assignment(labels))
    }

    pub fn len(&self) -> usize {
        self.assignment.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }

    pub fn module_count(&self) -> usize {
        self.module_count
    }

    #[inline]
    pub fn module_of(&self, v: usize) -> usize {
        self.assignment[v]
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    /// Members of each module, indexed by module id.
    pub fn modules(&self) -> Vec<NodeSet> {
        let mut members = vec![Vec::new(); self.module_count];
        for (v, &l) in self.assignment.iter().enumerate() {
            members[l].push(v);
        }
        members.into_iter().map(NodeSet::new).collect()
    }

    pub fn to_community_set(&self) -> CommunitySet {
        CommunitySet::new(self.modules())
    }

    fn check_for(&self, g: &Graph) -> Result<()> {
        if self.len() != g.node_count() {
            return Err(Error::invalid(format!(
                "partition covers {} nodes, graph has {}",
                self.len(),
                g.node_count()
            )));
        }
        Ok(())
    }
}

/// A list of node sets; overlap between sets is permitted.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CommunitySet(Vec<NodeSet>);

impl CommunitySet {
    pub fn new(communities: Vec<NodeSet>) -> Self {
        CommunitySet(communities)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, NodeSet> {
        self.0.iter()
    }

    pub fn push(&mut self, community: NodeSet) {
        self.0.push(community);
    }

    pub fn as_slice(&self) -> &[NodeSet] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<NodeSet> {
        self.0
    }

    /// Every community is nonempty and refers only to nodes of `g`.
    pub fn validate(&self, g: &Graph) -> Result<()> {
        for (i, c) in self.0.iter().enumerate() {
            if c.is_empty() {
                return Err(Error::invalid(format!("community {i} is empty")));
            }
            c.validate(g)?;
        }
        Ok(())
    }
}

impl FromIterator<NodeSet> for CommunitySet {
    fn from_iter<I: IntoIterator<Item = NodeSet>>(iter: I) -> Self {
        CommunitySet(iter.into_iter().collect())
    }
}

/// σ, τ and θ of one graph together with the empirical verdict.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatioReport {
    pub sigma: f64,
    pub tau: f64,
    pub theta: f64,
    pub criterion_met: bool,
}

impl RatioReport {
    pub fn new(sigma: f64, tau: f64, theta: f64) -> Self {
        RatioReport {
            sigma,
            tau,
            theta,
            criterion_met: empirical_criterion(tau, sigma, theta),
        }
    }
}

/// Per-module intra-edge counts, volumes and the number of crossing edges.
struct ModuleStats {
    intra: Vec<usize>,
    volume: Vec<usize>,
    crossing: usize,
}

fn module_stats(g: &Graph, p: &Partition) -> ModuleStats {
    let mut intra = vec![0usize; p.module_count()];
    let mut volume = vec![0usize; p.module_count()];
    let mut crossing = 0;
    for v in 0..g.node_count() {
        volume[p.module_of(v)] += g.degree(v);
    }
    for &(u, v) in g.edges() {
        let (a, b) = (p.module_of(u), p.module_of(v));
        if a == b {
            intra[a] += 1;
        } else {
            crossing += 1;
        }
    }
    ModuleStats {
        intra,
        volume,
        crossing,
    }
}

fn require_edges(g: &Graph) -> Result<f64> {
    match g.edge_count() {
        0 => Err(Error::UndefinedMetric("graph has no edges")),
        m => Ok(m as f64),
    }
}

/// Modularity `Σ_l [k_l/m − (V_l/2m)²]` under the configuration null model.
pub fn modularity(g: &Graph, p: &Partition) -> Result<f64> {
    p.check_for(g)?;
    let m = require_edges(g)?;
    let stats = module_stats(g, p);
    Ok(stats
        .intra
        .iter()
        .zip(&stats.volume)
        .map(|(&k, &vol)| {
            let share = vol as f64 / (2.0 * m);
            k as f64 / m - share * share
        })
        .sum())
}

/// `-x log2 x` with `0 log 0 = 0`.
#[inline]
fn plogp(x: f64) -> f64 {
    if x > 0.0 {
        -x * x.log2()
    } else {
        0.0
    }
}

/// Entropy in bits of the random walk's stationary distribution `d_i / 2m`.
pub fn entropy_uniform(g: &Graph) -> Result<f64> {
    let two_m = 2.0 * require_edges(g)?;
    Ok((0..g.node_count())
        .map(|v| plogp(g.degree(v) as f64 / two_m))
        .sum())
}

/// Average code length per walk step under a two-level module/node code.
///
/// A node's in-module codeword is weighted by its full degree relative to its
/// module's volume; crossing edges additionally pay the module-index entropy.
pub fn entropy_partition(g: &Graph, p: &Partition) -> Result<f64> {
    p.check_for(g)?;
    let m = require_edges(g)?;
    let two_m = 2.0 * m;
    let stats = module_stats(g, p);
    let within: f64 = (0..g.node_count())
        .map(|v| {
            let d = g.degree(v) as f64;
            if d == 0.0 {
                return 0.0;
            }
            let vol = stats.volume[p.module_of(v)] as f64;
            -(d / two_m) * (d / vol).log2()
        })
        .sum();
    let module_entropy: f64 = stats
        .volume
        .iter()
        .map(|&vol| plogp(vol as f64 / two_m))
        .sum();
    Ok(within + (stats.crossing as f64 / m) * module_entropy)
}

/// `τ = 1 − L^P / L^U`.
pub fn entropy_ratio(g: &Graph, p: &Partition) -> Result<f64> {
    let uniform = entropy_uniform(g)?;
    if uniform <= 0.0 {
        return Err(Error::UndefinedMetric("uniform entropy is zero"));
    }
    Ok(1.0 - entropy_partition(g, p)? / uniform)
}

/// Inclusive size bounds for a possible community in a graph of `n` nodes.
///
/// `⌈ln n⌉ ..= ⌊√n⌋` for `n >= 32`; the relaxed `2 ..= n/2` below that, where
/// the logarithmic bounds are empty or degenerate.
pub fn possible_community_bounds(n: usize) -> (usize, usize) {
    if n >= 32 {
        let lo = (n as f64).ln().ceil() as usize;
        let mut hi = (n as f64).sqrt() as usize;
        while (hi + 1) * (hi + 1) <= n {
            hi += 1;
        }
        while hi * hi > n {
            hi -= 1;
        }
        (lo, hi)
    } else {
        (2, n / 2)
    }
}

/// A connected induced subgraph whose size lies within [`possible_community_bounds`].
pub fn is_possible_community(g: &Graph, s: &NodeSet) -> Result<bool> {
    s.validate(g)?;
    let (lo, hi) = possible_community_bounds(g.node_count());
    if s.len() < lo || s.len() > hi || s.is_empty() {
        return Ok(false);
    }
    is_connected_induced(g, s)
}

/// θ together with how many input communities were scored and how many were dropped.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThetaScore {
    pub theta: f64,
    pub accepted: usize,
    pub dropped: usize,
}

/// Conductance ratio: the mean over all nodes of the average `1 − Φ(X)` across
/// the possible communities `X` containing the node (0 for uncovered nodes).
///
/// Communities that are not possible communities, or whose conductance is
/// undefined, are dropped and counted.
pub fn conductance_ratio(g: &Graph, x: &CommunitySet) -> Result<ThetaScore> {
    x.validate(g)?;
    let n = g.node_count();
    let total = g.total_volume();
    let scored: Vec<Option<f64>> = x
        .as_slice()
        .par_iter()
        .map(|c| {
            if !is_possible_community(g, c).ok()? {
                return None;
            }
            let vol: usize = c.iter().map(|v| g.degree(v)).sum();
            let cut = c
                .iter()
                .flat_map(|v| g.neighbors(v))
                .filter(|&&w| !c.contains(w))
                .count();
            conductance_from_parts(cut, vol, total).ok()
        })
        .collect();

    let mut sum = vec![0.0f64; n];
    let mut count = vec![0usize; n];
    let mut accepted = 0;
    for (c, phi) in x.iter().zip(&scored) {
        if let Some(phi) = phi {
            accepted += 1;
            for v in c.iter() {
                sum[v] += 1.0 - phi;
                count[v] += 1;
            }
        }
    }
    let dropped = x.len() - accepted;
    if dropped > 0 {
        warn!("conductance ratio: dropped {dropped} of {} communities failing the possible-community rule", x.len());
    }
    let theta = if n == 0 {
        0.0
    } else {
        sum.iter()
            .zip(&count)
            .filter(|(_, &c)| c > 0)
            .map(|(&s, &c)| s / c as f64)
            // An empty float sum is -0.0; start from +0.0 instead.
            .fold(0.0, |acc, x| acc + x)
            / n as f64
    };
    Ok(ThetaScore {
        theta,
        accepted,
        dropped,
    })
}

/// A network has community structure when `τ > 0`, `σ > 0.3` and `θ > 0.3`.
pub fn empirical_criterion(tau: f64, sigma: f64, theta: f64) -> bool {
    tau > 0.0 && sigma > 0.3 && theta > 0.3
}

/// Partition objectives that can be maximized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Objective {
    Modularity,
    EntropyRatio,
}

impl Objective {
    pub fn evaluate(self, g: &Graph, p: &Partition) -> Result<f64> {
        match self {
            Objective::Modularity => modularity(g, p),
            Objective::EntropyRatio => entropy_ratio(g, p),
        }
    }
}

pub const BRUTE_FORCE_MAX_NODES: usize = 10;

/// Exact maximizer of `objective` over every set partition of the nodes.
///
/// Partitions are enumerated as restricted growth strings; among equal values
/// the first enumerated wins.
pub fn brute_force_best_partition(g: &Graph, objective: Objective) -> Result<(Partition, f64)> {
    let n = g.node_count();
    if n > BRUTE_FORCE_MAX_NODES {
        return Err(Error::SizeLimit {
            what: "node count",
            actual: n,
            limit: BRUTE_FORCE_MAX_NODES,
        });
    }
    let mut labels = vec![0usize; n];
    let mut best: Option<(Vec<usize>, f64)> = None;
    loop {
        let p = Partition::from_assignment(labels.clone());
        let value = objective.evaluate(g, &p)?;
        if best.as_ref().is_none_or(|(_, b)| value > *b + 1e-12) {
            best = Some((labels.clone(), value));
        }
        if !next_restricted_growth(&mut labels) {
            break;
        }
    }
    let (labels, value) = best.expect("at least one partition");
    Ok((Partition::from_assignment(labels), value))
}

/// Advances `labels` to the next restricted growth string; false when exhausted.
fn next_restricted_growth(labels: &mut [usize]) -> bool {
    let n = labels.len();
    for i in (1..n).rev() {
        let max_before = labels[..i].iter().copied().max().unwrap_or(0);
        if labels[i] <= max_before {
            labels[i] += 1;
            for l in &mut labels[i + 1..] {
                *l = 0;
            }
            return true;
        }
    }
    false
}
