//! Community detection.
//!
//! - Algorithm C: approximate personalized PageRank by residual pushing, a sweep
//!   over `p(u)/deg(u)`, and a size-aware stopping rule on prefix conductance.
//!   [`detect_all_c`] covers the graph by reseeding from uncovered hubs.
//! - Algorithm M: greedy agglomerative modularity maximization.
//! - Algorithm E: greedy agglomerative maximization of the entropy ratio.

use std::cmp::{Ordering, Reverse};
use std::collections::{BinaryHeap, HashMap, VecDeque};

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{connected_components, Graph, NodeSet};
use crate::metrics::{is_possible_community, CommunitySet, Partition};

/// Teleportation and approximation parameters for personalized PageRank.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PprParams {
    pub kappa: f64,
    pub epsilon: f64,
}

impl Default for PprParams {
    fn default() -> Self {
        PprParams {
            kappa: 0.15,
            epsilon: 1e-5,
        }
    }
}

impl PprParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.kappa > 0.0 && self.kappa <= 1.0) {
            return Err(Error::invalid(format!("kappa must lie in (0, 1], got {}", self.kappa)));
        }
        if !(self.epsilon > 0.0) {
            return Err(Error::invalid(format!("epsilon must be positive, got {}", self.epsilon)));
        }
        Ok(())
    }
}

/// Stopping rule `Φ(S_i) <= alpha / i^beta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StopParams {
    pub alpha: f64,
    pub beta: f64,
}

impl Default for StopParams {
    fn default() -> Self {
        StopParams {
            alpha: 1.0,
            beta: 0.2,
        }
    }
}

impl StopParams {
    /// `beta = (a − 1) / (4(a + 1))` for homophyly networks with exponent `a`.
    pub fn for_homophyly(a: f64) -> Self {
        StopParams {
            alpha: 1.0,
            beta: (a - 1.0) / (4.0 * (a + 1.0)),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0) {
            return Err(Error::invalid(format!("alpha must be positive, got {}", self.alpha)));
        }
        if !(self.beta > 0.0 && self.beta < 1.0) {
            return Err(Error::invalid(format!("beta must lie in (0, 1), got {}", self.beta)));
        }
        Ok(())
    }

    pub fn threshold(&self, size: usize) -> f64 {
        self.alpha / (size as f64).powf(self.beta)
    }
}

/// Nonnegative node weights; absent nodes weigh 0. Entries are sorted by node id.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SparseVector(Vec<(usize, f64)>);

impl SparseVector {
    /// Keeps strictly positive entries; later duplicates overwrite earlier ones.
    pub fn from_entries(entries: impl IntoIterator<Item = (usize, f64)>) -> Self {
        let map: std::collections::BTreeMap<usize, f64> = entries.into_iter().collect();
        SparseVector(map.into_iter().filter(|&(_, x)| x > 0.0).collect())
    }

    pub fn indicator(v: usize) -> Self {
        SparseVector(vec![(v, 1.0)])
    }

    pub fn get(&self, v: usize) -> f64 {
        self.0
            .binary_search_by_key(&v, |&(u, _)| u)
            .map_or(0.0, |i| self.0[i].1)
    }

    pub fn entries(&self) -> &[(usize, f64)] {
        &self.0
    }

    /// Number of nonzero entries.
    pub fn support_len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn l1_norm(&self) -> f64 {
        self.0.iter().map(|&(_, x)| x).sum()
    }
}

/// Reusable dense scratch space for pushes and sweeps, reset lazily via a touched list.
struct Workspace {
    p: Vec<f64>,
    r: Vec<f64>,
    queued: Vec<bool>,
    in_set: Vec<bool>,
    touched: Vec<usize>,
}

impl Workspace {
    fn new(n: usize) -> Self {
        Workspace {
            p: vec![0.0; n],
            r: vec![0.0; n],
            queued: vec![false; n],
            in_set: vec![false; n],
            touched: Vec::new(),
        }
    }

    fn touch(&mut self, u: usize) {
        if self.p[u] == 0.0 && self.r[u] == 0.0 {
            self.touched.push(u);
        }
    }

    fn clear(&mut self) {
        for &u in &self.touched {
            self.p[u] = 0.0;
            self.r[u] = 0.0;
            self.queued[u] = false;
            self.in_set[u] = false;
        }
        self.touched.clear();
    }
}

fn check_seed(g: &Graph, v: usize) -> Result<()> {
    g.check_node(v)?;
    if g.degree(v) == 0 {
        return Err(Error::invalid(format!("seed node {v} is isolated")));
    }
    Ok(())
}

/// Largest graph for which [`exact_ppr`] will build a dense system.
pub const EXACT_PPR_MAX_NODES: usize = 500;

/// Personalized PageRank `p = κχ_v + (1 − κ) p W` with lazy walk `W = (I + D⁻¹A)/2`,
/// solved densely. Intended as a reference for small graphs.
pub fn exact_ppr(g: &Graph, v: usize, kappa: f64) -> Result<SparseVector> {
    exact_ppr_from(g, &SparseVector::indicator(v), kappa)
}

/// Personalized PageRank for an arbitrary nonnegative start vector `s`.
///
/// Only the connected components touched by `s` are solved; every other node is 0.
pub fn exact_ppr_from(g: &Graph, s: &SparseVector, kappa: f64) -> Result<SparseVector> {
    let n = g.node_count();
    if n > EXACT_PPR_MAX_NODES {
        return Err(Error::SizeLimit {
            what: "node count for dense pagerank",
            actual: n,
            limit: EXACT_PPR_MAX_NODES,
        });
    }
    PprParams { kappa, epsilon: 1.0 }.validate()?;
    for &(u, _) in s.entries() {
        check_seed(g, u)?;
    }
    if s.is_empty() {
        return Ok(SparseVector::default());
    }
    let label = connected_components(g);
    let mut wanted = vec![false; label.len()];
    for &(u, _) in s.entries() {
        wanted[label[u]] = true;
    }
    let nodes: Vec<usize> = (0..n).filter(|&u| wanted[label[u]]).collect();
    let index: HashMap<usize, usize> = nodes.iter().enumerate().map(|(i, &u)| (u, i)).collect();
    let k = nodes.len();

    // Row-vector equation p (I − (1−κ)W) = κ s, solved as its transpose.
    let mut system = DMatrix::<f64>::identity(k, k);
    for (i, &u) in nodes.iter().enumerate() {
        let du = g.degree(u) as f64;
        // Column i of the transpose holds row i of W.
        system[(i, i)] -= (1.0 - kappa) * 0.5;
        for &w in g.neighbors(u) {
            system[(index[&w], i)] -= (1.0 - kappa) * 0.5 / du;
        }
    }
    let mut rhs = DVector::<f64>::zeros(k);
    for &(u, x) in s.entries() {
        rhs[index[&u]] = kappa * x;
    }
    let solution = system
        .lu()
        .solve(&rhs)
        .ok_or(Error::UndefinedMetric("singular pagerank system"))?;
    Ok(SparseVector::from_entries(
        nodes.iter().enumerate().map(|(i, &u)| (u, solution[i].max(0.0))),
    ))
}

/// Approximate personalized PageRank by residual pushing.
///
/// Starting from `p = 0, r = χ_v`, any node with `r(u) >= ε·deg(u)` is pushed:
/// `κ·r(u)` moves to `p(u)`, half of the remainder stays at `u` and the other
/// half spreads evenly over `u`'s incident edges. Nodes are processed FIFO.
/// On return `r(u) < ε·deg(u)` for every node and `p = pr_κ(χ_v − r)`.
pub fn approximate_ppr(
    g: &Graph,
    v: usize,
    params: &PprParams,
) -> Result<(SparseVector, SparseVector)> {
    params.validate()?;
    check_seed(g, v)?;
    let mut ws = Workspace::new(g.node_count());
    push(g, v, params, &mut ws);
    let p = SparseVector::from_entries(ws.touched.iter().map(|&u| (u, ws.p[u])));
    let r = SparseVector::from_entries(ws.touched.iter().map(|&u| (u, ws.r[u])));
    Ok((p, r))
}

fn push(g: &Graph, v: usize, params: &PprParams, ws: &mut Workspace) {
    let PprParams { kappa, epsilon } = *params;
    let mut queue = VecDeque::new();
    ws.touch(v);
    ws.r[v] = 1.0;
    if ws.r[v] >= epsilon * g.degree(v) as f64 {
        queue.push_back(v);
        ws.queued[v] = true;
    }
    while let Some(u) = queue.pop_front() {
        ws.queued[u] = false;
        let du = g.degree(u) as f64;
        let ru = ws.r[u];
        if ru < epsilon * du {
            continue;
        }
        ws.p[u] += kappa * ru;
        ws.r[u] = (1.0 - kappa) * ru * 0.5;
        let share = (1.0 - kappa) * ru * 0.5 / du;
        for &w in g.neighbors(u) {
            ws.touch(w);
            ws.r[w] += share;
            if !ws.queued[w] && ws.r[w] >= epsilon * g.degree(w) as f64 {
                ws.queued[w] = true;
                queue.push_back(w);
            }
        }
        if !ws.queued[u] && ws.r[u] >= epsilon * du {
            ws.queued[u] = true;
            queue.push_back(u);
        }
    }
}

/// Prefix conductances of the sweep order.
#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    /// Support nodes ordered by `p(u)/deg(u)` descending, ties by id ascending.
    pub order: Vec<usize>,
    /// `conductance[i]` is `Φ` of the first `i + 1` nodes; `None` when undefined
    /// because the prefix holds all of the graph's volume.
    pub conductance: Vec<Option<f64>>,
    /// Cut size of each prefix.
    pub cut: Vec<usize>,
}

impl Sweep {
    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// The prefix `S_size`.
    pub fn prefix(&self, size: usize) -> NodeSet {
        NodeSet::new(self.order[..size].iter().copied())
    }

    /// `(prefix size, conductance)` for every prefix.
    pub fn prefixes(&self) -> impl Iterator<Item = (usize, Option<f64>)> + '_ {
        self.conductance.iter().enumerate().map(|(i, &c)| (i + 1, c))
    }
}

/// Orders the support of `p` by `p(u)/deg(u)` and computes every prefix
/// conductance incrementally in `O(vol(support))`.
pub fn sweep(g: &Graph, p: &SparseVector) -> Result<Sweep> {
    if p.is_empty() {
        return Err(Error::invalid("sweep over an empty vector"));
    }
    for &(u, _) in p.entries() {
        g.check_node(u)?;
        if g.degree(u) == 0 {
            return Err(Error::invalid(format!("sweep support contains isolated node {u}")));
        }
    }
    let mut in_set = std::collections::HashSet::new();
    Ok(sweep_order(g, p.entries(), &mut in_set))
}

/// Membership marks used while a sweep grows its prefix.
trait Marks {
    fn mark(&mut self, u: usize);
    fn is_marked(&self, u: usize) -> bool;
}

impl Marks for Vec<bool> {
    fn mark(&mut self, u: usize) {
        self[u] = true;
    }
    fn is_marked(&self, u: usize) -> bool {
        self[u]
    }
}

impl Marks for std::collections::HashSet<usize> {
    fn mark(&mut self, u: usize) {
        self.insert(u);
    }
    fn is_marked(&self, u: usize) -> bool {
        self.contains(&u)
    }
}

fn sweep_order(g: &Graph, entries: &[(usize, f64)], marks: &mut impl Marks) -> Sweep {
    let mut keyed: Vec<(f64, usize)> = entries
        .iter()
        .map(|&(u, x)| (x / g.degree(u) as f64, u))
        .collect();
    keyed.sort_unstable_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    let total = g.total_volume();
    let mut order = Vec::with_capacity(keyed.len());
    let mut conductance = Vec::with_capacity(keyed.len());
    let mut cuts = Vec::with_capacity(keyed.len());
    let mut vol = 0usize;
    let mut cut = 0isize;
    for (_, u) in keyed {
        let du = g.degree(u);
        let inside = g.neighbors(u).iter().filter(|&&w| marks.is_marked(w)).count();
        marks.mark(u);
        vol += du;
        cut += du as isize - 2 * inside as isize;
        order.push(u);
        cuts.push(cut as usize);
        let denom = vol.min(total - vol);
        conductance.push((denom > 0).then(|| cut as f64 / denom as f64));
    }
    Sweep {
        order,
        conductance,
        cut: cuts,
    }
}

/// Picks the first prefix `S_i` with `Φ(S_i) <= α/i^β` and `Φ(S_i) < Φ(S_{i+1})`.
///
/// A prefix whose successor would absorb all remaining volume (undefined
/// conductance) compares as if the successor were infinitely bad. The final
/// prefix has no successor and is only eligible when it has no cut edges,
/// i.e. the sweep exhausted a whole component.
pub fn select_prefix(sweep: &Sweep, stop: &StopParams) -> Option<usize> {
    let s = sweep.len();
    (1..=s).find(|&i| {
        let Some(phi) = sweep.conductance[i - 1] else {
            return false;
        };
        if phi > stop.threshold(i) {
            return false;
        }
        if i == s {
            return sweep.cut[i - 1] == 0;
        }
        match sweep.conductance[i] {
            Some(next) => phi < next,
            None => true,
        }
    })
}

/// Runs approximate PageRank from `v`, sweeps, and returns the first prefix
/// satisfying the stopping rule, if any.
pub fn find_community(
    g: &Graph,
    v: usize,
    ppr: &PprParams,
    stop: &StopParams,
) -> Result<Option<NodeSet>> {
    ppr.validate()?;
    stop.validate()?;
    check_seed(g, v)?;
    let mut ws = Workspace::new(g.node_count());
    Ok(find_in(g, v, ppr, stop, &mut ws))
}

fn find_in(g: &Graph, v: usize, ppr: &PprParams, stop: &StopParams, ws: &mut Workspace) -> Option<NodeSet> {
    push(g, v, ppr, ws);
    let entries: Vec<(usize, f64)> = ws
        .touched
        .iter()
        .filter(|&&u| ws.p[u] > 0.0)
        .map(|&u| (u, ws.p[u]))
        .collect();
    let result = if entries.is_empty() {
        None
    } else {
        let sweep = sweep_order(g, &entries, &mut ws.in_set);
        // Nodes entering the sweep were all touched by the push, so `clear` resets them.
        select_prefix(&sweep, stop).map(|i| sweep.prefix(i))
    };
    ws.clear();
    result
}

/// Covers the graph with algorithm C.
///
/// Nodes are tried in order of degree (descending, ties by id). A node already
/// covered by an accepted community is skipped. Each tried node runs
/// [`find_community`]; the result is accepted if it is a possible community,
/// and accepted communities may overlap. Isolated nodes are never seeds.
///
/// Seeds are evaluated speculatively in parallel batches and committed in
/// order, so the output equals the sequential procedure's.
pub fn detect_all_c(g: &Graph, ppr: &PprParams, stop: &StopParams) -> Result<CommunitySet> {
    ppr.validate()?;
    stop.validate()?;
    let n = g.node_count();
    let mut candidates: Vec<usize> = (0..n).filter(|&v| g.degree(v) > 0).collect();
    candidates.sort_by_key(|&v| (Reverse(g.degree(v)), v));

    let mut covered = vec![false; n];
    let mut found = CommunitySet::default();
    let batch = (rayon::current_num_threads() * 4).max(1);
    let mut next = 0;
    while next < candidates.len() {
        let mut seeds = Vec::with_capacity(batch);
        while next < candidates.len() && seeds.len() < batch {
            let v = candidates[next];
            next += 1;
            if !covered[v] {
                seeds.push(v);
            }
        }
        let results: Vec<Option<NodeSet>> = seeds
            .par_iter()
            .map_init(
                || Workspace::new(n),
                |ws, &v| {
                    let s = find_in(g, v, ppr, stop, ws)?;
                    is_possible_community(g, &s).ok()?.then_some(s)
                },
            )
            .collect();
        for (&v, result) in seeds.iter().zip(results) {
            if covered[v] {
                continue;
            }
            if let Some(s) = result {
                for u in s.iter() {
                    covered[u] = true;
                }
                found.push(s);
            }
        }
    }
    Ok(found)
}

/// Module-level multigraph shared by the agglomerative detectors.
#[derive(Clone)]
struct ModuleGraph {
    /// Edge multiplicity between distinct live modules.
    adj: Vec<HashMap<usize, usize>>,
    volume: Vec<usize>,
    /// Current module id of every node, through merge forwarding.
    parent: Vec<usize>,
    alive: Vec<bool>,
}

impl ModuleGraph {
    fn singletons(g: &Graph) -> Self {
        let n = g.node_count();
        let mut adj = vec![HashMap::new(); n];
        for &(u, v) in g.edges() {
            *adj[u].entry(v).or_insert(0) += 1;
            *adj[v].entry(u).or_insert(0) += 1;
        }
        ModuleGraph {
            adj,
            volume: g.degrees(),
            parent: (0..n).collect(),
            alive: vec![true; n],
        }
    }

    /// Merges module `k` into module `j`.
    fn merge(&mut self, j: usize, k: usize) {
        if self.adj[k].len() > self.adj[j].len() {
            self.adj.swap(j, k);
        }
        let absorbed = std::mem::take(&mut self.adj[k]);
        for (l, e) in absorbed {
            *self.adj[j].entry(l).or_insert(0) += e;
        }
        self.adj[j].remove(&j);
        self.adj[j].remove(&k);
        let neighbors: Vec<(usize, usize)> = self.adj[j].iter().map(|(&l, &e)| (l, e)).collect();
        for (l, e) in neighbors {
            let row = &mut self.adj[l];
            row.remove(&k);
            row.insert(j, e);
        }
        self.volume[j] += self.volume[k];
        self.volume[k] = 0;
        self.alive[k] = false;
        self.parent[k] = j;
    }

    fn find(&self, mut v: usize) -> usize {
        while self.parent[v] != v {
            v = self.parent[v];
        }
        v
    }

    fn partition(&self) -> Partition {
        Partition::from_assignment((0..self.parent.len()).map(|v| self.find(v)).collect())
    }
}

/// Heap entry for greedy modularity: larger gain first, then the smaller pair.
#[derive(Debug, PartialEq, Eq)]
struct MergeCandidate {
    /// `2m² · Δσ = 2m·e_jk − V_j·V_k`, kept in exact integer arithmetic.
    gain: i128,
    j: usize,
    k: usize,
    version_j: u64,
    version_k: u64,
}

impl Ord for MergeCandidate {
    fn cmp(&self, other: &Self) -> Ordering {
        self.gain
            .cmp(&other.gain)
            .then_with(|| other.j.cmp(&self.j))
            .then_with(|| other.k.cmp(&self.k))
    }
}

impl PartialOrd for MergeCandidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Greedy agglomerative modularity maximization.
///
/// Starting from singletons, repeatedly merges the pair of adjacent modules with
/// the largest positive modularity gain (ties: smallest module-id pair) until no
/// merge improves modularity. The merged module keeps the smaller id.
pub fn detect_m(g: &Graph) -> Result<Partition> {
    if g.edge_count() == 0 {
        return Err(Error::UndefinedMetric("graph has no edges"));
    }
    let two_m = g.total_volume() as i128;
    let mut mg = ModuleGraph::singletons(g);
    let mut version = vec![0u64; g.node_count()];
    let gain = |mg: &ModuleGraph, j: usize, k: usize, e: usize| {
        two_m * e as i128 - mg.volume[j] as i128 * mg.volume[k] as i128
    };
    let mut heap = BinaryHeap::new();
    for j in 0..g.node_count() {
        for (&k, &e) in &mg.adj[j] {
            if j < k {
                heap.push(MergeCandidate {
                    gain: gain(&mg, j, k, e),
                    j,
                    k,
                    version_j: 0,
                    version_k: 0,
                });
            }
        }
    }
    while let Some(top) = heap.pop() {
        let MergeCandidate { gain: delta, j, k, version_j, version_k } = top;
        if !mg.alive[j] || !mg.alive[k] || version[j] != version_j || version[k] != version_k {
            continue;
        }
        if delta <= 0 {
            break;
        }
        mg.merge(j, k);
        version[j] += 1;
        for (&l, &e) in &mg.adj[j] {
            let (a, b) = (j.min(l), j.max(l));
            heap.push(MergeCandidate {
                gain: gain(&mg, a, b, e),
                j: a,
                k: b,
                version_j: version[a],
                version_k: version[b],
            });
        }
    }
    Ok(mg.partition())
}

#[inline]
fn xlog2x(x: f64) -> f64 {
    if x > 0.0 {
        x * x.log2()
    } else {
        0.0
    }
}

/// Heap entry for greedy entropy: smaller code-length change first, then the smaller pair.
#[derive(Debug)]
struct EntropyCandidate {
    delta: f64,
    j: usize,
    k: usize,
    version_j: u64,
    version_k: u64,
    /// Merge count at which `delta` was evaluated.
    epoch: usize,
}

impl EntropyCandidate {
    fn key(&self) -> (f64, usize, usize) {
        (self.delta, self.j, self.k)
    }
}

impl PartialEq for EntropyCandidate {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for EntropyCandidate {}

impl Ord for EntropyCandidate {
    fn cmp(&self, other: &Self) -> Ordering {
        // BinaryHeap is a max-heap; reverse so the smallest key surfaces.
        cmp_candidates(&other.key(), &self.key())
    }
}

impl PartialOrd for EntropyCandidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn cmp_candidates(a: &(f64, usize, usize), b: &(f64, usize, usize)) -> Ordering {
    a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2))
}

/// Greedy agglomerative maximization of the entropy ratio.
///
/// Same merge skeleton as [`detect_m`], scoring each adjacent pair by the change
/// in two-level code length and stopping when no merge shortens it.
///
/// The change for a pair `(j, k)` with `e` edges between them is
/// `A/2m · (1 − (m_g − e)/m) − e·H/m`, where `A = f(V_j + V_k) − f(V_j) − f(V_k)`,
/// `f(x) = x log2 x`, `m_g` is the crossing-edge count and `H` the module
/// entropy. Merges only ever decrease `m_g` and `H`, so a pair's change can only
/// grow over time: stale heap entries are lower bounds and are re-evaluated
/// lazily when they reach the top.
pub fn detect_e(g: &Graph) -> Result<Partition> {
    if g.edge_count() == 0 {
        return Err(Error::UndefinedMetric("graph has no edges"));
    }
    let mut mg = ModuleGraph::singletons(g);
    let mut state = EntropyState::new(g, &mg);
    let mut version = vec![0u64; g.node_count()];
    let mut epoch = 0usize;

    let mut heap = BinaryHeap::new();
    for j in 0..g.node_count() {
        for &k in mg.adj[j].keys() {
            if j < k {
                heap.push(EntropyCandidate {
                    delta: state.delta(&mg, j, k),
                    j,
                    k,
                    version_j: 0,
                    version_k: 0,
                    epoch,
                });
            }
        }
    }
    while let Some(top) = heap.pop() {
        let (j, k) = (top.j, top.k);
        if !mg.alive[j] || !mg.alive[k] || version[j] != top.version_j || version[k] != top.version_k {
            continue;
        }
        if top.epoch != epoch {
            heap.push(EntropyCandidate {
                delta: state.delta(&mg, j, k),
                epoch,
                ..top
            });
            continue;
        }
        if top.delta >= -ENTROPY_TOLERANCE {
            break;
        }
        state.merge(&mut mg, j, k);
        version[j] += 1;
        epoch += 1;
        for &l in mg.adj[j].keys() {
            let (a, b) = (j.min(l), j.max(l));
            heap.push(EntropyCandidate {
                delta: state.delta(&mg, a, b),
                j: a,
                k: b,
                version_j: version[a],
                version_k: version[b],
                epoch,
            });
        }
    }
    Ok(mg.partition())
}

/// Code-length changes smaller than this are rounding noise.
const ENTROPY_TOLERANCE: f64 = 1e-12;

/// Global quantities of the greedy entropy search, updated merge by merge.
struct EntropyState {
    m: f64,
    /// Number of edges between distinct modules.
    crossing: f64,
    /// Entropy of the module volume distribution.
    entropy: f64,
}

impl EntropyState {
    fn new(g: &Graph, mg: &ModuleGraph) -> Self {
        let m = g.edge_count() as f64;
        EntropyState {
            m,
            crossing: m,
            entropy: mg.volume.iter().map(|&v| -xlog2x(v as f64 / (2.0 * m))).sum(),
        }
    }

    fn superadditivity(mg: &ModuleGraph, j: usize, k: usize) -> f64 {
        let (vj, vk) = (mg.volume[j] as f64, mg.volume[k] as f64);
        xlog2x(vj + vk) - xlog2x(vj) - xlog2x(vk)
    }

    /// Change in code length if modules `j` and `k` merged.
    fn delta(&self, mg: &ModuleGraph, j: usize, k: usize) -> f64 {
        let e = mg.adj[j][&k] as f64;
        let a = Self::superadditivity(mg, j, k);
        a / (2.0 * self.m) * (1.0 - (self.crossing - e) / self.m) - e * self.entropy / self.m
    }

    fn merge(&mut self, mg: &mut ModuleGraph, j: usize, k: usize) {
        self.crossing -= mg.adj[j][&k] as f64;
        self.entropy -= Self::superadditivity(mg, j, k) / (2.0 * self.m);
        mg.merge(j, k);
    }
}
