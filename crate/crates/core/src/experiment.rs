//! Batch experiments producing plot-ready CSV files and a run manifest.
//!
//! Each experiment expands into jobs (grid point × replicate). Jobs run on the
//! rayon pool; rows are handed to a single writer that emits them in job order,
//! so the output is byte-identical regardless of thread count. A failing job
//! still yields a row, with the failure recorded in its `error` column.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::mpsc;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use log::info;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::detection::{detect_all_c, detect_e, detect_m, PprParams, StopParams};
use crate::error::{Error, Result};
use crate::generators::{gen_er, gen_homophyly, gen_pa, homochromatic_partition, ColoredGraph, HomophylyParams};
use crate::graph::Graph;
use crate::io::{read_communities, read_graph, read_metadata, sha256_file, write_json, SCHEMA_VERSION};
use crate::metrics::{conductance_ratio, empirical_criterion, entropy_ratio, modularity, CommunitySet};
use crate::prediction::{predict, prediction_curve, AttributedGraph};
use crate::structure::fit_powerlaw_exponent;

/// Derives an independent 64-bit seed for stream `stream` of `master` (SplitMix64).
pub fn split_seed(master: u64, stream: u64) -> u64 {
    let mut z = master.wrapping_add(stream.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExperimentId {
    /// Ratios of Erdős–Rényi graphs across edge probabilities.
    Fig1,
    /// Ratios of preferential-attachment graphs across `d`.
    Fig2,
    /// Degree distribution of a homophyly graph.
    Fig3,
    /// Ratios of homophyly graphs across `d`, with ground truth.
    Fig4,
    /// Ratios of real networks.
    Table1,
    /// Conductance ratios of real networks per detector.
    Table3,
    /// Keyword prediction curve.
    Fig5,
    /// Keyword prediction histograms.
    Table4,
}

impl ExperimentId {
    pub const ALL: [ExperimentId; 8] = [
        ExperimentId::Fig1,
        ExperimentId::Fig2,
        ExperimentId::Fig3,
        ExperimentId::Fig4,
        ExperimentId::Table1,
        ExperimentId::Table3,
        ExperimentId::Fig5,
        ExperimentId::Table4,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentId::Fig1 => "fig1",
            ExperimentId::Fig2 => "fig2",
            ExperimentId::Fig3 => "fig3",
            ExperimentId::Fig4 => "fig4",
            ExperimentId::Table1 => "table1",
            ExperimentId::Table3 => "table3",
            ExperimentId::Fig5 => "fig5",
            ExperimentId::Table4 => "table4",
        }
    }
}

impl fmt::Display for ExperimentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExperimentId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ExperimentId::ALL
            .into_iter()
            .find(|id| id.name() == s)
            .ok_or_else(|| Error::invalid(format!("unknown experiment {s:?}")))
    }
}

/// One point of an experiment's parameter grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum GridPoint {
    Er { n: usize, p: f64 },
    Pa { n: usize, d: usize },
    Homophyly { n: usize, a: f64, d: usize },
    Dataset { name: String, path: PathBuf },
    Attributed {
        graph: PathBuf,
        meta: PathBuf,
        /// Detected with the C detector when absent.
        communities: Option<PathBuf>,
        k_max: usize,
    },
}

impl GridPoint {
    /// Whether the point involves randomness and is therefore replicated per seed.
    fn is_random(&self) -> bool {
        matches!(self, GridPoint::Er { .. } | GridPoint::Pa { .. } | GridPoint::Homophyly { .. })
    }

    fn input_paths(&self) -> Vec<&Path> {
        match self {
            GridPoint::Dataset { path, .. } => vec![path],
            GridPoint::Attributed {
                graph,
                meta,
                communities,
                ..
            } => {
                let mut v = vec![graph.as_path(), meta.as_path()];
                v.extend(communities.as_deref());
                v
            }
            _ => vec![],
        }
    }
}

/// Full description of an experiment run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub experiment: ExperimentId,
    pub grid: Vec<GridPoint>,
    /// Replicate seeds; each random grid point runs once per seed.
    pub seeds: Vec<u64>,
    pub out_dir: PathBuf,
    pub ppr: PprParams,
    /// Stopping rule for the C detector; homophyly points default to the model's β.
    pub stop: Option<StopParams>,
}

/// Scale of the built-in grids.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scale {
    /// Small graphs that finish in minutes on a laptop.
    Desk,
    /// The published sizes.
    Full,
}

impl ExperimentSpec {
    /// Built-in grid for the synthetic experiments (`fig1` to `fig4`).
    ///
    /// Desk scale uses `n = 2000` for ER and PA and keeps `n = 10000` for homophyly
    /// graphs, whose detectors are fast.
    pub fn builtin(experiment: ExperimentId, scale: Scale, seeds: Vec<u64>, out_dir: PathBuf) -> Result<Self> {
        let grid = match (experiment, scale) {
            (ExperimentId::Fig1, Scale::Desk) => {
                let n = 2000;
                [1.0, 2.0, 3.0, 5.0, 10.0, 20.0, 30.0, 40.0, 50.0]
                    .iter()
                    .map(|c| GridPoint::Er { n, p: c / (n - 1) as f64 })
                    .collect()
            }
            (ExperimentId::Fig1, Scale::Full) => (1..=50)
                .map(|i| GridPoint::Er {
                    n: 10_000,
                    p: 1e-4 * i as f64,
                })
                .collect(),
            (ExperimentId::Fig2, Scale::Desk) => [1, 2, 3, 5, 10, 20, 30, 40, 50]
                .iter()
                .map(|&d| GridPoint::Pa { n: 2000, d })
                .collect(),
            (ExperimentId::Fig2, Scale::Full) => (1..=50).map(|d| GridPoint::Pa { n: 10_000, d }).collect(),
            (ExperimentId::Fig3, _) => vec![GridPoint::Homophyly {
                n: 10_000,
                a: 1.2,
                d: 5,
            }],
            (ExperimentId::Fig4, Scale::Desk) => (1..=10)
                .map(|d| GridPoint::Homophyly { n: 10_000, a: 1.2, d })
                .collect(),
            (ExperimentId::Fig4, Scale::Full) => (1..=30)
                .map(|d| GridPoint::Homophyly { n: 10_000, a: 1.2, d })
                .collect(),
            (id, _) => {
                return Err(Error::invalid(format!(
                    "{id} has no built-in grid; it needs input files"
                )))
            }
        };
        Ok(ExperimentSpec {
            experiment,
            grid,
            seeds,
            out_dir,
            ppr: PprParams::default(),
            stop: None,
        })
    }

    pub fn validate(&self) -> Result<()> {
        if self.grid.is_empty() {
            return Err(Error::invalid("experiment grid is empty"));
        }
        if self.seeds.is_empty() {
            return Err(Error::invalid("at least one seed is required"));
        }
        self.ppr.validate()?;
        if let Some(stop) = &self.stop {
            stop.validate()?;
        }
        let compatible = |p: &GridPoint| match self.experiment {
            ExperimentId::Fig3 => matches!(p, GridPoint::Homophyly { .. }),
            ExperimentId::Fig5 | ExperimentId::Table4 => matches!(p, GridPoint::Attributed { .. }),
            _ => !matches!(p, GridPoint::Attributed { .. }),
        };
        if let Some(p) = self.grid.iter().find(|p| !compatible(p)) {
            return Err(Error::invalid(format!(
                "grid point {p:?} does not fit experiment {}",
                self.experiment
            )));
        }
        Ok(())
    }

    /// Jobs in output order: grid points outermost, replicates innermost.
    fn jobs(&self) -> Vec<Job<'_>> {
        let mut jobs = Vec::new();
        for (index, point) in self.grid.iter().enumerate() {
            let replicates: Vec<(usize, u64)> = if point.is_random() {
                self.seeds.iter().copied().enumerate().collect()
            } else {
                vec![(0, self.seeds[0])]
            };
            for (replicate, seed) in replicates {
                jobs.push(Job {
                    point,
                    replicate,
                    graph_seed: split_seed(seed, index as u64),
                });
            }
        }
        jobs
    }
}

struct Job<'a> {
    point: &'a GridPoint,
    replicate: usize,
    graph_seed: u64,
}

/// One scored graph. Ratio columns are empty when the corresponding run failed.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ScoreRow {
    pub experiment: String,
    pub model: String,
    pub n: Option<usize>,
    pub p: Option<f64>,
    pub d: Option<usize>,
    pub a: Option<f64>,
    pub dataset: Option<String>,
    pub replicate: usize,
    pub graph_seed: Option<u64>,
    pub nodes: Option<usize>,
    pub edges: Option<usize>,
    pub sigma_m: Option<f64>,
    pub sigma_e: Option<f64>,
    pub tau_m: Option<f64>,
    pub tau_e: Option<f64>,
    pub theta_c: Option<f64>,
    pub theta_m: Option<f64>,
    pub theta_e: Option<f64>,
    pub sigma_max: Option<f64>,
    pub tau_max: Option<f64>,
    pub theta_max: Option<f64>,
    pub criterion: Option<bool>,
    pub sigma_truth: Option<f64>,
    pub tau_truth: Option<f64>,
    pub theta_truth: Option<f64>,
    pub error: Option<String>,
}

fn max_of(values: &[Option<f64>]) -> Option<f64> {
    values.iter().flatten().copied().reduce(f64::max)
}

/// Runs the three detectors on `g` and fills the ratio columns of `row`.
///
/// Detector failures are appended to `row.error`; the remaining columns are still filled.
pub fn score_graph(
    row: &mut ScoreRow,
    g: &Graph,
    truth: Option<&ColoredGraph>,
    ppr: &PprParams,
    stop: &StopParams,
) {
    let mut errors: Vec<String> = Vec::new();
    let mut note = |what: &str, e: Error| errors.push(format!("{what}: {e}"));
    row.nodes = Some(g.node_count());
    row.edges = Some(g.edge_count());

    match detect_m(g) {
        Ok(p) => {
            row.sigma_m = modularity(g, &p).map_err(|e| note("sigma_m", e)).ok();
            row.tau_m = entropy_ratio(g, &p).map_err(|e| note("tau_m", e)).ok();
            row.theta_m = conductance_ratio(g, &p.to_community_set())
                .map(|t| t.theta)
                .map_err(|e| note("theta_m", e))
                .ok();
        }
        Err(e) => note("detect_m", e),
    }
    match detect_e(g) {
        Ok(p) => {
            row.sigma_e = modularity(g, &p).map_err(|e| note("sigma_e", e)).ok();
            row.tau_e = entropy_ratio(g, &p).map_err(|e| note("tau_e", e)).ok();
            row.theta_e = conductance_ratio(g, &p.to_community_set())
                .map(|t| t.theta)
                .map_err(|e| note("theta_e", e))
                .ok();
        }
        Err(e) => note("detect_e", e),
    }
    match detect_all_c(g, ppr, stop).and_then(|c| conductance_ratio(g, &c)) {
        Ok(t) => row.theta_c = Some(t.theta),
        Err(e) => note("detect_c", e),
    }
    row.sigma_max = max_of(&[row.sigma_m, row.sigma_e]);
    row.tau_max = max_of(&[row.tau_m, row.tau_e]);
    row.theta_max = max_of(&[row.theta_c, row.theta_m, row.theta_e]);
    if let (Some(s), Some(t), Some(th)) = (row.sigma_max, row.tau_max, row.theta_max) {
        row.criterion = Some(empirical_criterion(t, s, th));
    }

    if let Some(cg) = truth {
        let p = homochromatic_partition(cg);
        row.sigma_truth = modularity(g, &p).map_err(|e| note("sigma_truth", e)).ok();
        row.tau_truth = entropy_ratio(g, &p).map_err(|e| note("tau_truth", e)).ok();
        row.theta_truth = conductance_ratio(g, &p.to_community_set())
            .map(|t| t.theta)
            .map_err(|e| note("theta_truth", e))
            .ok();
    }
    if !errors.is_empty() {
        row.error = Some(errors.join("; "));
    }
}

fn score_job(spec: &ExperimentSpec, job: &Job<'_>) -> ScoreRow {
    let mut row = ScoreRow {
        experiment: spec.experiment.name().to_string(),
        replicate: job.replicate,
        ..Default::default()
    };
    let stop_default = spec.stop.unwrap_or_default();
    let built: Result<(Graph, Option<ColoredGraph>, StopParams)> = match job.point {
        GridPoint::Er { n, p } => {
            row.model = "er".into();
            (row.n, row.p, row.graph_seed) = (Some(*n), Some(*p), Some(job.graph_seed));
            gen_er(*n, *p, job.graph_seed).map(|g| (g, None, stop_default))
        }
        GridPoint::Pa { n, d } => {
            row.model = "pa".into();
            (row.n, row.d, row.graph_seed) = (Some(*n), Some(*d), Some(job.graph_seed));
            gen_pa(*n, *d, job.graph_seed).map(|g| (g, None, stop_default))
        }
        GridPoint::Homophyly { n, a, d } => {
            row.model = "homophyly".into();
            (row.n, row.a, row.d, row.graph_seed) = (Some(*n), Some(*a), Some(*d), Some(job.graph_seed));
            let params = HomophylyParams {
                n: *n,
                a: *a,
                d: *d,
                rng_seed: job.graph_seed,
            };
            let stop = spec.stop.unwrap_or_else(|| StopParams::for_homophyly(*a));
            gen_homophyly(&params).map(|cg| (cg.graph.clone(), Some(cg), stop))
        }
        GridPoint::Dataset { name, path } => {
            row.model = "dataset".into();
            row.dataset = Some(name.clone());
            read_graph(path).map(|(g, _)| (g, None, stop_default))
        }
        GridPoint::Attributed { .. } => Err(Error::invalid("attributed point in a scoring experiment")),
    };
    match built {
        Ok((g, truth, stop)) => {
            row.n = Some(g.node_count());
            score_graph(&mut row, &g, truth.as_ref(), &spec.ppr, &stop);
        }
        Err(e) => row.error = Some(e.to_string()),
    }
    row
}

/// Everything needed to reproduce a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub schema_version: u32,
    pub tool_version: String,
    pub spec: ExperimentSpec,
    /// `(grid index, replicate, graph seed)` for every random job.
    pub job_seeds: Vec<(usize, usize, u64)>,
    pub input_digests: BTreeMap<String, String>,
    pub outputs: Vec<String>,
    pub rows: usize,
    pub failed_rows: usize,
    pub started_unix: u64,
    pub wall_clock_seconds: f64,
}

/// Result of [`run_experiment`].
#[derive(Debug, Clone)]
pub struct ExperimentOutcome {
    pub manifest: RunManifest,
    pub manifest_path: PathBuf,
}

/// Streams rows from worker threads to one CSV writer in job order.
fn run_rows<R, F>(path: &Path, count: usize, make: F) -> Result<(usize, usize)>
where
    R: Serialize + Send + HasError,
    F: Fn(usize) -> Vec<R> + Sync,
{
    let mut writer = csv::Writer::from_path(path)?;
    let (tx, rx) = mpsc::channel::<(usize, Vec<R>)>();
    let mut written = 0;
    let mut failed = 0;
    let make = &make;
    let result: Result<()> = std::thread::scope(|scope| {
        scope.spawn(move || {
            (0..count).into_par_iter().for_each_with(tx, |tx, i| {
                // The receiver only disappears after a write error, which is reported below.
                let _ = tx.send((i, make(i)));
            });
        });
        let mut pending: BTreeMap<usize, Vec<R>> = BTreeMap::new();
        let mut next = 0;
        for (i, rows) in rx {
            pending.insert(i, rows);
            while let Some(rows) = pending.remove(&next) {
                for row in rows {
                    failed += usize::from(row.has_error());
                    writer.serialize(&row)?;
                    written += 1;
                }
                writer.flush().map_err(|e| Error::io(path, e))?;
                next += 1;
            }
        }
        Ok(())
    });
    result?;
    Ok((written, failed))
}

trait HasError {
    fn has_error(&self) -> bool;
}

impl HasError for ScoreRow {
    fn has_error(&self) -> bool {
        self.error.is_some()
    }
}

#[derive(Debug, Serialize)]
struct DegreeRow {
    replicate: usize,
    graph_seed: u64,
    degree: usize,
    count: usize,
    exponent: Option<f64>,
    error: Option<String>,
}

impl HasError for DegreeRow {
    fn has_error(&self) -> bool {
        self.error.is_some()
    }
}

fn degree_rows(job: &Job<'_>) -> Vec<DegreeRow> {
    let GridPoint::Homophyly { n, a, d } = job.point else {
        unreachable!("validated grid")
    };
    let params = HomophylyParams {
        n: *n,
        a: *a,
        d: *d,
        rng_seed: job.graph_seed,
    };
    let cg = match gen_homophyly(&params) {
        Ok(cg) => cg,
        Err(e) => {
            return vec![DegreeRow {
                replicate: job.replicate,
                graph_seed: job.graph_seed,
                degree: 0,
                count: 0,
                exponent: None,
                error: Some(e.to_string()),
            }]
        }
    };
    let degrees = cg.graph.degrees();
    let exponent = fit_powerlaw_exponent(&degrees, *d).ok();
    let mut hist: BTreeMap<usize, usize> = BTreeMap::new();
    for k in degrees {
        *hist.entry(k).or_default() += 1;
    }
    hist.into_iter()
        .map(|(degree, count)| DegreeRow {
            replicate: job.replicate,
            graph_seed: job.graph_seed,
            degree,
            count,
            exponent,
            error: None,
        })
        .collect()
}

/// Histogram columns for `r = 1..=10`, with larger counts pooled into `r_more`.
#[derive(Debug, Default, Serialize)]
struct PredictionRow {
    k: String,
    r1: usize,
    r2: usize,
    r3: usize,
    r4: usize,
    r5: usize,
    r6: usize,
    r7: usize,
    r8: usize,
    r9: usize,
    r10: usize,
    r_more: usize,
    total: usize,
    error: Option<String>,
}

impl HasError for PredictionRow {
    fn has_error(&self) -> bool {
        self.error.is_some()
    }
}

#[derive(Debug, Default, Serialize)]
struct CurveRow {
    k: Option<usize>,
    total_covered: Option<usize>,
    error: Option<String>,
}

impl HasError for CurveRow {
    fn has_error(&self) -> bool {
        self.error.is_some()
    }
}

fn load_attributed(point: &GridPoint, ppr: &PprParams, stop: &StopParams) -> Result<(AttributedGraph, CommunitySet, usize)> {
    let GridPoint::Attributed {
        graph,
        meta,
        communities,
        k_max,
    } = point
    else {
        return Err(Error::invalid("expected an attributed grid point"));
    };
    let (g, ids) = read_graph(graph)?;
    let docs = read_metadata(meta, &ids)?;
    let cs = match communities {
        Some(path) => read_communities(path)?,
        None => detect_all_c(&g, ppr, stop)?,
    };
    Ok((AttributedGraph::new(g, docs)?, cs, *k_max))
}

fn curve_rows(spec: &ExperimentSpec, job: &Job<'_>) -> Vec<CurveRow> {
    let stop = spec.stop.unwrap_or_default();
    let curve = load_attributed(job.point, &spec.ppr, &stop)
        .and_then(|(ag, cs, k_max)| prediction_curve(&ag, &cs, k_max));
    match curve {
        Ok(points) => points
            .into_iter()
            .map(|(k, total)| CurveRow {
                k: Some(k),
                total_covered: Some(total),
                error: None,
            })
            .collect(),
        Err(e) => vec![CurveRow {
            error: Some(e.to_string()),
            ..Default::default()
        }],
    }
}

/// One row per cutoff `k = 5, 10, ..., k_max` plus a row for all keywords.
fn histogram_rows(spec: &ExperimentSpec, job: &Job<'_>) -> Vec<PredictionRow> {
    let stop = spec.stop.unwrap_or_default();
    let run = || -> Result<Vec<PredictionRow>> {
        let (ag, cs, k_max) = load_attributed(job.point, &spec.ppr, &stop)?;
        let mut cutoffs: Vec<usize> = (5..=k_max).step_by(5).collect();
        cutoffs.push(usize::MAX);
        let mut rows = Vec::new();
        for k in cutoffs {
            let r = predict(&ag, &cs, k)?;
            let mut row = PredictionRow {
                k: if k == usize::MAX { "all".into() } else { k.to_string() },
                total: r.total_covered,
                ..Default::default()
            };
            for (&count, &nodes) in &r.histogram {
                let slot = match count {
                    1 => &mut row.r1,
                    2 => &mut row.r2,
                    3 => &mut row.r3,
                    4 => &mut row.r4,
                    5 => &mut row.r5,
                    6 => &mut row.r6,
                    7 => &mut row.r7,
                    8 => &mut row.r8,
                    9 => &mut row.r9,
                    10 => &mut row.r10,
                    _ => &mut row.r_more,
                };
                *slot += nodes;
            }
            rows.push(row);
        }
        Ok(rows)
    };
    run().unwrap_or_else(|e| {
        vec![PredictionRow {
            error: Some(e.to_string()),
            ..Default::default()
        }]
    })
}

/// Runs an experiment and writes `<id>.csv` plus `<id>_manifest.json` into the output directory.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentOutcome> {
    spec.validate()?;
    let started = Instant::now();
    let started_unix = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    fs::create_dir_all(&spec.out_dir).map_err(|e| Error::io(&spec.out_dir, e))?;

    let mut input_digests = BTreeMap::new();
    for point in &spec.grid {
        for path in point.input_paths() {
            input_digests.insert(path.display().to_string(), sha256_file(path)?);
        }
    }

    let id = spec.experiment;
    let csv_path = spec.out_dir.join(format!("{id}.csv"));
    let jobs = spec.jobs();
    info!("{id}: {} jobs", jobs.len());
    let (rows, failed_rows) = match id {
        ExperimentId::Fig3 => run_rows(&csv_path, jobs.len(), |i| degree_rows(&jobs[i]))?,
        ExperimentId::Fig5 => run_rows(&csv_path, jobs.len(), |i| curve_rows(spec, &jobs[i]))?,
        ExperimentId::Table4 => run_rows(&csv_path, jobs.len(), |i| histogram_rows(spec, &jobs[i]))?,
        _ => run_rows(&csv_path, jobs.len(), |i| vec![score_job(spec, &jobs[i])])?,
    };

    let job_seeds = spec
        .grid
        .iter()
        .enumerate()
        .flat_map(|(index, point)| {
            let seeds = if point.is_random() { spec.seeds.as_slice() } else { &[] };
            seeds
                .iter()
                .enumerate()
                .map(move |(r, &s)| (index, r, split_seed(s, index as u64)))
        })
        .collect();
    let manifest = RunManifest {
        schema_version: SCHEMA_VERSION,
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        spec: spec.clone(),
        job_seeds,
        input_digests,
        outputs: vec![csv_path.display().to_string()],
        rows,
        failed_rows,
        started_unix,
        wall_clock_seconds: started.elapsed().as_secs_f64(),
    };
    let manifest_path = spec.out_dir.join(format!("{id}_manifest.json"));
    write_json(&manifest_path, &manifest)?;
    Ok(ExperimentOutcome {
        manifest,
        manifest_path,
    })
}

/// Reads the score rows of a finished scoring experiment.
pub fn read_score_rows(path: &Path) -> Result<Vec<ScoreRow>> {
    let mut reader = csv::Reader::from_path(path)?;
    reader
        .deserialize()
        .map(|r| r.map_err(Error::from))
        .collect()
}
