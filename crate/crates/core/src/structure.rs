//! Empirical checks of the structural properties of homophyly networks:
//! power-law degrees, community sizes and diameters, degree priority, widths,
//! inclusion of non-seed nodes and dominant seed degrees.

use std::collections::{BTreeMap, HashMap, HashSet};

use log::debug;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generators::{homochromatic_sets, ColoredGraph};
use crate::graph::{avg_distance_estimate, subgraph_diameter, Graph, NodeSet};

/// Minimum number of samples at or above `x_min` for a power-law fit.
pub const MIN_POWERLAW_SAMPLES: usize = 50;

/// Hurwitz zeta `ζ(s, q) = Σ_{k≥0} (k + q)^{-s}` for `s > 1`, `q > 0`.
///
/// Direct summation of the first terms followed by an Euler–Maclaurin tail.
pub fn hurwitz_zeta(s: f64, q: f64) -> f64 {
    const DIRECT: usize = 16;
    // B_2j / (2j)!
    const BERNOULLI: [f64; 6] = [
        1.0 / 12.0,
        -1.0 / 720.0,
        1.0 / 30240.0,
        -1.0 / 1209600.0,
        1.0 / 47900160.0,
        -691.0 / 1307674368000.0,
    ];
    let mut sum: f64 = (0..DIRECT).map(|k| (k as f64 + q).powf(-s)).sum();
    let x = q + DIRECT as f64;
    sum += x.powf(1.0 - s) / (s - 1.0) + 0.5 * x.powf(-s);
    // term_j = s (s+1) ... (s+2j-2) x^{-s-2j+1}
    let mut rising = s;
    let mut power = x.powf(-s - 1.0);
    for (j, b) in BERNOULLI.iter().enumerate() {
        sum += b * rising * power;
        let k = 2.0 * j as f64;
        rising *= (s + k + 1.0) * (s + k + 2.0);
        power /= x * x;
    }
    sum
}

/// Discrete maximum-likelihood power-law exponent for the values `≥ x_min`.
///
/// Maximizes `−α Σ ln x_i − N ln ζ(α, x_min)` over `α ∈ (1, 20]` by golden-section
/// search; the log-likelihood is concave in `α`.
pub fn fit_powerlaw_exponent(values: &[usize], x_min: usize) -> Result<f64> {
    if x_min < 1 {
        return Err(Error::invalid("x_min must be at least 1"));
    }
    let tail: Vec<usize> = values.iter().copied().filter(|&x| x >= x_min).collect();
    if tail.len() < MIN_POWERLAW_SAMPLES {
        return Err(Error::InsufficientData(format!(
            "{} samples ≥ {x_min}, need {MIN_POWERLAW_SAMPLES}",
            tail.len()
        )));
    }
    if tail.iter().all(|&x| x == tail[0]) {
        return Err(Error::InsufficientData(
            "all samples equal; exponent estimate diverges".into(),
        ));
    }
    let count = tail.len() as f64;
    let log_sum: f64 = tail.iter().map(|&x| (x as f64).ln()).sum();
    let q = x_min as f64;
    let neg_ll = |alpha: f64| alpha * log_sum + count * hurwitz_zeta(alpha, q).ln();

    let (mut lo, mut hi) = (1.0 + 1e-6, 20.0);
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - ratio * (hi - lo);
    let mut x2 = lo + ratio * (hi - lo);
    let (mut f1, mut f2) = (neg_ll(x1), neg_ll(x2));
    while hi - lo > 1e-9 {
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - ratio * (hi - lo);
            f1 = neg_ll(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + ratio * (hi - lo);
            f2 = neg_ll(x2);
        }
    }
    let alpha = 0.5 * (lo + hi);
    if alpha > 19.9 {
        return Err(Error::InsufficientData(
            "exponent estimate diverges; tail too concentrated at x_min".into(),
        ));
    }
    Ok(alpha)
}

/// Degree profile of one node: incident edges grouped by the neighbor's color.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeProfile {
    pub node: usize,
    pub degree: usize,
    /// `(color, edge count)` sorted by count descending, then color ascending.
    pub per_color: Vec<(usize, usize)>,
}

impl DegreeProfile {
    /// Number of distinct neighbor colors.
    pub fn length(&self) -> usize {
        self.per_color.len()
    }

    /// The `j`-th degree (1-based); zero past the length.
    pub fn jth_degree(&self, j: usize) -> usize {
        j.checked_sub(1)
            .and_then(|i| self.per_color.get(i))
            .map_or(0, |&(_, c)| c)
    }
}

pub fn degree_profile(cg: &ColoredGraph, v: usize) -> Result<DegreeProfile> {
    cg.graph.check_node(v)?;
    let mut counts: HashMap<usize, usize> = HashMap::new();
    for &u in cg.graph.neighbors(v) {
        *counts.entry(cg.color[u]).or_default() += 1;
    }
    let mut per_color: Vec<(usize, usize)> = counts.into_iter().collect();
    per_color.sort_unstable_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    Ok(DegreeProfile {
        node: v,
        degree: cg.graph.degree(v),
        per_color,
    })
}

fn check_homochromatic(cg: &ColoredGraph, x: &NodeSet) -> Result<usize> {
    x.validate(&cg.graph)?;
    let first = x
        .iter()
        .next()
        .ok_or_else(|| Error::invalid("community is empty"))?;
    let color = cg.color[first];
    if let Some(v) = x.iter().find(|&v| cg.color[v] != color) {
        return Err(Error::invalid(format!(
            "set is not homochromatic: node {first} has color {color}, node {v} has color {}",
            cg.color[v]
        )));
    }
    Ok(color)
}

fn neighbor_color_count(cg: &ColoredGraph, v: usize) -> usize {
    let mut colors: Vec<usize> = cg.graph.neighbors(v).iter().map(|&u| cg.color[u]).collect();
    colors.sort_unstable();
    colors.dedup();
    colors.len()
}

/// Number of members of a homochromatic set whose neighbors span at least two colors.
pub fn community_width(cg: &ColoredGraph, x: &NodeSet) -> Result<usize> {
    check_homochromatic(cg, x)?;
    Ok(x.iter().filter(|&v| neighbor_color_count(cg, v) > 1).count())
}

/// Number of foreign colors whose non-seed members are adjacent to `x`.
pub fn node_width(cg: &ColoredGraph, x: usize) -> Result<usize> {
    cg.graph.check_node(x)?;
    let own = cg.color[x];
    let foreign: HashSet<usize> = cg
        .graph
        .neighbors(x)
        .iter()
        .filter(|&&y| cg.color[y] != own && !cg.is_seed[y])
        .map(|&y| cg.color[y])
        .collect();
    Ok(foreign.len())
}

/// Seed degree divided by the largest degree of the other members.
///
/// `None` for a singleton community or when every other member has degree zero.
pub fn king_amplifier(cg: &ColoredGraph, x: &NodeSet) -> Result<Option<f64>> {
    check_homochromatic(cg, x)?;
    let seed = x
        .iter()
        .find(|&v| cg.is_seed[v])
        .ok_or_else(|| Error::invalid("community contains no seed node"))?;
    let runner_up = x
        .iter()
        .filter(|&v| v != seed)
        .map(|v| cg.graph.degree(v))
        .max();
    Ok(match runner_up {
        Some(r) if r > 0 => Some(cg.graph.degree(seed) as f64 / r as f64),
        _ => None,
    })
}

/// Which communities enter the per-community power-law fits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HolographicConfig {
    /// Communities smaller than this are skipped.
    pub min_size: usize,
    /// Fewer qualifying communities than this is an error.
    pub min_communities: usize,
    pub x_min: usize,
}

impl Default for HolographicConfig {
    fn default() -> Self {
        HolographicConfig {
            min_size: 50,
            min_communities: 5,
            x_min: 5,
        }
    }
}

/// Power-law exponents measured globally, within communities and within induced subgraphs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HolographicReport {
    pub global_exponent: f64,
    /// Fit on the full degrees of members of qualifying communities, pooled.
    pub community_exponent: f64,
    /// Fit on degrees inside each qualifying community's induced subgraph, pooled.
    pub induced_exponent: f64,
    pub max_gap: f64,
    pub qualifying_communities: usize,
    pub skipped_communities: usize,
}

/// Fits the three degree exponents and reports their largest pairwise difference.
///
/// Single communities rarely hold enough nodes for a stable fit, so the degrees
/// of all qualifying communities are pooled; each community follows the same law.
pub fn holographic_check(cg: &ColoredGraph, config: &HolographicConfig) -> Result<HolographicReport> {
    let sets = homochromatic_sets(cg);
    let (qualifying, skipped): (Vec<&NodeSet>, Vec<&NodeSet>) =
        sets.iter().partition(|s| s.len() >= config.min_size);
    if qualifying.is_empty() || qualifying.len() < config.min_communities {
        return Err(Error::InsufficientData(format!(
            "{} communities of size ≥ {}, need {}",
            qualifying.len(),
            config.min_size,
            config.min_communities.max(1)
        )));
    }
    let g = &cg.graph;
    let mut full = Vec::new();
    let mut induced = Vec::new();
    for s in &qualifying {
        for v in s.iter() {
            full.push(g.degree(v));
            induced.push(g.neighbors(v).iter().filter(|&&u| cg.color[u] == cg.color[v]).count());
        }
    }
    let global_exponent = fit_powerlaw_exponent(&g.degrees(), config.x_min)?;
    let community_exponent = fit_powerlaw_exponent(&full, config.x_min)?;
    let induced_exponent = fit_powerlaw_exponent(&induced, config.x_min)?;
    let all = [global_exponent, community_exponent, induced_exponent];
    let max = all.iter().copied().fold(f64::MIN, f64::max);
    let min = all.iter().copied().fold(f64::MAX, f64::min);
    Ok(HolographicReport {
        global_exponent,
        community_exponent,
        induced_exponent,
        max_gap: max - min,
        qualifying_communities: qualifying.len(),
        skipped_communities: skipped.len(),
    })
}

/// Thresholds and model parameters for [`verify_structure`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StructureConfig {
    /// Homophyly exponent; seed-count and size checks are skipped without it.
    pub a: Option<f64>,
    /// Edges per new node; the seed-width check is skipped without it.
    pub d: Option<usize>,
    /// Lower cutoff of the global power-law fit; defaults to `d`, else the minimum positive degree.
    pub x_min: Option<usize>,
    pub holographic: HolographicConfig,
    /// Late communities are those whose seed appears after step `N / ln(N)^c`.
    pub late_exponent_c: f64,
    /// Multiplier of `ln ln n` bounding community diameters.
    pub diameter_constant: f64,
    /// Multiplier of `ln ln n` bounding the median width of late communities.
    pub width_constant: f64,
    /// Multiplier of `ln n` bounding the length of degrees (informative).
    pub length_constant: f64,
    /// Required fraction of nodes with second degree at most one.
    pub degree_priority_fraction: f64,
    /// Required mean king amplifier over communities of size `≥ ⌈ln n⌉`.
    pub amplifier_threshold: f64,
    pub distance_samples: usize,
    pub rng_seed: u64,
}

impl Default for StructureConfig {
    fn default() -> Self {
        StructureConfig {
            a: None,
            d: None,
            x_min: None,
            holographic: HolographicConfig::default(),
            late_exponent_c: 1.0,
            diameter_constant: 6.0,
            width_constant: 4.0,
            length_constant: 4.0,
            degree_priority_fraction: 0.99,
            amplifier_threshold: 1.5,
            distance_samples: 2000,
            rng_seed: 0,
        }
    }
}

impl StructureConfig {
    /// Defaults for a homophyly graph with known parameters.
    ///
    /// At `n = 10⁴` the largest colors hold about 50 nodes, so the holographic
    /// fits admit communities of size 30 and up.
    pub fn for_homophyly(a: f64, d: usize) -> Self {
        StructureConfig {
            a: Some(a),
            d: Some(d),
            holographic: HolographicConfig {
                min_size: 30,
                min_communities: 5,
                x_min: d,
            },
            ..Default::default()
        }
    }
}

/// Outcome of every structural check. Flags are `None` when the check could not run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StructureReport {
    pub schema_version: u32,
    pub node_count: usize,
    pub edge_count: usize,
    pub seed_count: usize,
    pub color_count: usize,
    pub seed_count_matches_colors: bool,
    pub seed_lower_bound: Option<f64>,
    pub seed_upper_bound: Option<f64>,
    pub seed_bounds_ok: Option<bool>,

    pub max_community_size: usize,
    pub size_bound: Option<f64>,
    pub size_bound_ok: Option<bool>,

    pub powerlaw_x_min: usize,
    pub powerlaw_exponent: Option<f64>,
    pub community_exponent: Option<f64>,
    pub induced_exponent: Option<f64>,
    pub holographic_gap: Option<f64>,
    pub holographic_note: Option<String>,

    pub max_community_diameter: usize,
    pub disconnected_communities: usize,
    pub diameter_bound: f64,
    pub diameters_ok: bool,

    /// Informative only.
    pub avg_distance: Option<f64>,

    pub second_degree_median: usize,
    pub second_degree_p99: usize,
    pub second_degree_max: usize,
    pub second_degree_at_most_one_fraction: f64,
    pub degree_priority_ok: bool,

    pub late_community_threshold: f64,
    pub late_community_count: usize,
    pub late_width_median: Option<f64>,
    pub late_width_bound: f64,
    pub late_width_ok: Option<bool>,

    pub non_seed_max_width: usize,
    pub non_seed_width_zero: bool,
    pub seed_max_width: usize,
    pub seed_width_ok: Option<bool>,

    /// Informative only.
    pub length_max: usize,
    pub length_p99: usize,
    pub length_bound: f64,
    pub length_ok: bool,

    pub amplifier_communities: usize,
    pub amplifier_mean: Option<f64>,
    pub amplifier_threshold: f64,
    pub amplifier_ok: Option<bool>,
}

fn quantile(sorted: &[usize], q: f64) -> usize {
    if sorted.is_empty() {
        return 0;
    }
    let idx = ((sorted.len() - 1) as f64 * q).round() as usize;
    sorted[idx]
}

fn median(mut values: Vec<usize>) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    values.sort_unstable();
    let mid = values.len() / 2;
    Some(if values.len() % 2 == 1 {
        values[mid] as f64
    } else {
        (values[mid - 1] + values[mid]) as f64 / 2.0
    })
}

fn min_positive_degree(g: &Graph) -> usize {
    g.degrees().into_iter().filter(|&d| d > 0).min().unwrap_or(1)
}

/// Runs every structural check on a colored graph.
pub fn verify_structure(cg: &ColoredGraph, config: &StructureConfig) -> Result<StructureReport> {
    let g = &cg.graph;
    let n = g.node_count();
    if n < 3 {
        return Err(Error::invalid("structure checks need at least 3 nodes"));
    }
    let ln_n = (n as f64).ln();
    let ln_ln_n = ln_n.ln();
    let sets = homochromatic_sets(cg);
    let seed_count = cg.seed_count();
    let color_count = sets.len();

    let (seed_lower_bound, seed_upper_bound, seed_bounds_ok) = match config.a {
        Some(a) => {
            let lo = n as f64 / (2.0 * ln_n.powf(a));
            let hi = 2.0 * n as f64 / ln_n.powf(a);
            let s = seed_count as f64;
            (Some(lo), Some(hi), Some(lo <= s && s <= hi))
        }
        None => (None, None, None),
    };

    let max_community_size = sets.iter().map(NodeSet::len).max().unwrap_or(0);
    let size_bound = config.a.map(|a| 8.0 * ln_n.powf(a + 1.0));
    let size_bound_ok = size_bound.map(|b| max_community_size as f64 <= b);

    let powerlaw_x_min = config
        .x_min
        .or(config.d)
        .unwrap_or_else(|| min_positive_degree(g));
    let powerlaw_exponent = fit_powerlaw_exponent(&g.degrees(), powerlaw_x_min).ok();
    let (community_exponent, induced_exponent, holographic_gap, holographic_note) =
        match holographic_check(cg, &config.holographic) {
            Ok(h) => (
                Some(h.community_exponent),
                Some(h.induced_exponent),
                Some(h.max_gap),
                Some(format!(
                    "{} qualifying communities, {} skipped",
                    h.qualifying_communities, h.skipped_communities
                )),
            ),
            Err(e) => (None, None, None, Some(e.to_string())),
        };

    let diameters: Vec<Option<usize>> = sets
        .as_slice()
        .par_iter()
        .map(|s| subgraph_diameter(g, s))
        .collect::<Result<_>>()?;
    let max_community_diameter = diameters.iter().flatten().copied().max().unwrap_or(0);
    let disconnected_communities = diameters.iter().filter(|d| d.is_none()).count();
    let diameter_bound = config.diameter_constant * ln_ln_n;
    let diameters_ok =
        disconnected_communities == 0 && max_community_diameter as f64 <= diameter_bound;

    let avg_distance = avg_distance_estimate(g, config.distance_samples, config.rng_seed).ok();

    let profiles: Vec<DegreeProfile> = (0..n)
        .into_par_iter()
        .map(|v| degree_profile(cg, v))
        .collect::<Result<_>>()?;
    let mut second: Vec<usize> = profiles.iter().map(|p| p.jth_degree(2)).collect();
    second.sort_unstable();
    let at_most_one = second.iter().filter(|&&d| d <= 1).count() as f64 / n as f64;
    let mut lengths: Vec<usize> = profiles.iter().map(DegreeProfile::length).collect();
    lengths.sort_unstable();
    let length_bound = config.length_constant * ln_n;

    let late_community_threshold = {
        let big_n = seed_count.max(2) as f64;
        big_n / big_n.ln().powf(config.late_exponent_c)
    };
    let late_widths: Vec<usize> = sets
        .iter()
        .filter(|s| {
            s.iter()
                .find(|&v| cg.is_seed[v])
                .is_some_and(|seed| cg.creation_time[seed] as f64 > late_community_threshold)
        })
        .map(|s| s.iter().filter(|&v| profiles[v].length() > 1).count())
        .collect();
    let late_community_count = late_widths.len();
    let late_width_median = median(late_widths);
    let late_width_bound = config.width_constant * ln_ln_n;
    let late_width_ok = late_width_median.map(|m| m <= late_width_bound);

    let widths: Vec<usize> = (0..n)
        .into_par_iter()
        .map(|v| node_width(cg, v))
        .collect::<Result<_>>()?;
    let non_seed_max_width = (0..n).filter(|&v| !cg.is_seed[v]).map(|v| widths[v]).max().unwrap_or(0);
    let seed_max_width = (0..n).filter(|&v| cg.is_seed[v]).map(|v| widths[v]).max().unwrap_or(0);

    let size_floor = ln_n.ceil() as usize;
    let amplifiers: Vec<f64> = sets
        .iter()
        .filter(|s| s.len() >= size_floor)
        .filter_map(|s| king_amplifier(cg, s).ok().flatten())
        .collect();
    let amplifier_mean = if amplifiers.is_empty() {
        None
    } else {
        Some(amplifiers.iter().sum::<f64>() / amplifiers.len() as f64)
    };
    debug!(
        "structure: {} colors, {} amplifier communities",
        color_count,
        amplifiers.len()
    );

    Ok(StructureReport {
        schema_version: crate::io::SCHEMA_VERSION,
        node_count: n,
        edge_count: g.edge_count(),
        seed_count,
        color_count,
        seed_count_matches_colors: seed_count == color_count,
        seed_lower_bound,
        seed_upper_bound,
        seed_bounds_ok,
        max_community_size,
        size_bound,
        size_bound_ok,
        powerlaw_x_min,
        powerlaw_exponent,
        community_exponent,
        induced_exponent,
        holographic_gap,
        holographic_note,
        max_community_diameter,
        disconnected_communities,
        diameter_bound,
        diameters_ok,
        avg_distance,
        second_degree_median: quantile(&second, 0.5),
        second_degree_p99: quantile(&second, 0.99),
        second_degree_max: second.last().copied().unwrap_or(0),
        second_degree_at_most_one_fraction: at_most_one,
        degree_priority_ok: at_most_one >= config.degree_priority_fraction,
        late_community_threshold,
        late_community_count,
        late_width_median,
        late_width_bound,
        late_width_ok,
        non_seed_max_width,
        non_seed_width_zero: non_seed_max_width == 0,
        seed_max_width,
        seed_width_ok: config.d.map(|d| seed_max_width <= d),
        length_max: lengths.last().copied().unwrap_or(0),
        length_p99: quantile(&lengths, 0.99),
        length_bound,
        length_ok: lengths.last().is_none_or(|&l| l as f64 <= length_bound),
        amplifier_communities: amplifiers.len(),
        amplifier_mean,
        amplifier_threshold: config.amplifier_threshold,
        amplifier_ok: amplifier_mean.map(|m| m >= config.amplifier_threshold),
    })
}

/// Histogram of homochromatic set sizes, size → count.
pub fn community_size_histogram(cg: &ColoredGraph) -> BTreeMap<usize, usize> {
    let mut hist = BTreeMap::new();
    for s in homochromatic_sets(cg).iter() {
        *hist.entry(s.len()).or_default() += 1;
    }
    hist
}
