//! Poisson point sampling and random-connection graph construction.
//!
//! A trial is identified by `(master_seed, trial_index)`. Points come from
//! [`STREAM_POINTS`], edge decisions from [`STREAM_EDGES`], and thinning
//! passes from a caller-chosen stream tag; each decision about a pair is a
//! pure function of the key and the two indices.

use std::io::{BufRead, Write};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geometry::{distance, distance_sq, Metric, Point2};
use crate::models::{connection_radius, ConnectionModel};
use crate::rng::{self, StreamKey, STREAM_BOUNDARY_THINNING, STREAM_EDGES, STREAM_POINTS};

/// How candidate pairs are enumerated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum GraphMode {
    /// Bucket grid with cells at least `r * cutoff` wide; only 3x3
    /// neighbourhoods are scanned.
    #[default]
    Grid,
    /// All `n (n - 1) / 2` pairs. Lifts the reach restriction on the square.
    Exact,
}

#[derive(Clone, Debug)]
pub struct SampleParams {
    rho: f64,
    b: f64,
    model: Arc<ConnectionModel>,
    metric: Metric,
    master_seed: u64,
    trial_index: u64,
    mode: GraphMode,
    r: f64,
}

impl SampleParams {
    pub fn new(
        rho: f64,
        b: f64,
        model: Arc<ConnectionModel>,
        metric: Metric,
        master_seed: u64,
        trial_index: u64,
    ) -> Result<Self> {
        model.ensure_usable()?;
        let r = connection_radius(model.c(), rho, b)?;
        if metric == Metric::Torus && r > 0.5 {
            return Err(Error::Parameter(format!(
                "connection radius {r} exceeds half the torus period"
            )));
        }
        Ok(Self {
            rho,
            b,
            model,
            metric,
            master_seed,
            trial_index,
            mode: GraphMode::Grid,
            r,
        })
    }

    pub fn with_trial(&self, trial_index: u64) -> Self {
        Self {
            trial_index,
            ..self.clone()
        }
    }

    pub fn with_metric(&self, metric: Metric) -> Result<Self> {
        Self::new(
            self.rho,
            self.b,
            self.model.clone(),
            metric,
            self.master_seed,
            self.trial_index,
        )
        .map(|p| p.with_mode(self.mode))
    }

    pub fn with_mode(mut self, mode: GraphMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }
    pub fn b(&self) -> f64 {
        self.b
    }
    pub fn model(&self) -> &ConnectionModel {
        &self.model
    }
    pub fn model_arc(&self) -> &Arc<ConnectionModel> {
        &self.model
    }
    pub fn metric(&self) -> Metric {
        self.metric
    }
    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }
    pub fn trial_index(&self) -> u64 {
        self.trial_index
    }
    pub fn mode(&self) -> GraphMode {
        self.mode
    }

    /// The connection length scale `r_rho`.
    pub fn r(&self) -> f64 {
        self.r
    }

    /// Largest distance at which a connection can occur: `r * cutoff`.
    pub fn reach(&self) -> f64 {
        self.r * self.model.cutoff()
    }

    pub fn stream(&self, tag: u64) -> StreamKey {
        StreamKey::new(self.master_seed, self.trial_index, tag)
    }

    /// Connection probability for two points at distance `d`.
    #[inline]
    pub fn connection_probability(&self, d: f64) -> f64 {
        self.model.g(d / self.r)
    }
}

/// Edge as a pair of point indices with `i < j`.
pub type Edge = (u32, u32);

#[derive(Clone, Debug)]
pub struct NetworkSample {
    pub params: SampleParams,
    pub points: Vec<Point2>,
    /// Sorted, unique, `i < j`.
    pub edges: Vec<Edge>,
}

impl NetworkSample {
    pub fn n_points(&self) -> usize {
        self.points.len()
    }

    pub fn r(&self) -> f64 {
        self.params.r()
    }

    pub fn degrees(&self) -> Vec<u32> {
        let mut deg = vec![0u32; self.points.len()];
        for &(i, j) in &self.edges {
            deg[i as usize] += 1;
            deg[j as usize] += 1;
        }
        deg
    }

    pub fn edge_distance(&self, (i, j): Edge) -> f64 {
        distance(
            self.params.metric(),
            self.points[i as usize],
            self.points[j as usize],
        )
    }
}

#[derive(Clone, Debug)]
pub struct CoupledSample {
    pub torus_graph: NetworkSample,
    /// Same points as `torus_graph`, edges a subset of its edges.
    pub square_graph: NetworkSample,
    pub removed_edges: Vec<Edge>,
}

/// `N ~ Poisson(rho)` uniform points on `[-1/2, 1/2)^2`.
pub fn sample_points(params: &SampleParams) -> Vec<Point2> {
    let mut rng = params.stream(STREAM_POINTS).sequence();
    let n = rng::poisson(&mut rng, params.rho());
    (0..n)
        .map(|_| {
            let x = rng.next_f64() - 0.5;
            let y = rng.next_f64() - 0.5;
            Point2::new(x, y).expect("unit draws land in the cell")
        })
        .collect()
}

pub fn sample_network(params: &SampleParams) -> Result<NetworkSample> {
    let points = sample_points(params);
    build_graph(params, points)
}

/// Connects each pair independently with probability `g(d / r)`.
pub fn build_graph(params: &SampleParams, points: Vec<Point2>) -> Result<NetworkSample> {
    if points.len() > u32::MAX as usize {
        return Err(Error::Parameter("too many points for 32-bit edge indices".into()));
    }
    let reach = params.reach();
    let needs_grid_bound = params.metric() == Metric::Torus || params.mode() == GraphMode::Grid;
    if needs_grid_bound && reach > 0.5 {
        let hint = match params.metric() {
            Metric::Square => "use the exact all-pairs mode",
            Metric::Torus => "the torus needs a smaller reach; use the square metric with the exact all-pairs mode",
        };
        return Err(Error::Parameter(format!(
            "connection reach r * cutoff = {reach} exceeds 1/2: {hint}"
        )));
    }

    let key = params.stream(STREAM_EDGES);
    let mut edges = Vec::new();
    // Loose prefilter; the kernel itself returns 0 beyond the cutoff.
    let reach_sq = reach * reach * (1.0 + 1e-9);
    let mut consider = |i: usize, j: usize| {
        let d2 = distance_sq(params.metric(), points[i], points[j]);
        if d2 > reach_sq {
            return;
        }
        let p = params.connection_probability(d2.sqrt());
        if p >= 1.0 || (p > 0.0 && key.pair_uniform(i as u64, j as u64) < p) {
            edges.push((i as u32, j as u32));
        }
    };

    match params.mode() {
        GraphMode::Exact => {
            for i in 0..points.len() {
                for j in i + 1..points.len() {
                    consider(i, j);
                }
            }
        }
        GraphMode::Grid => {
            let grid = BucketGrid::new(&points, reach, params.metric());
            for cell in 0..grid.n * grid.n {
                let here = grid.members(cell);
                for &nb in &grid.neighbours(cell) {
                    let there = grid.members(nb);
                    for &i in here {
                        for &j in there {
                            if i < j {
                                consider(i as usize, j as usize);
                            }
                        }
                    }
                }
            }
        }
    }
    edges.sort_unstable();
    Ok(NetworkSample {
        params: params.clone(),
        points,
        edges,
    })
}

struct BucketGrid {
    n: usize,
    wrap: bool,
    offsets: Vec<usize>,
    items: Vec<u32>,
}

impl BucketGrid {
    fn new(points: &[Point2], reach: f64, metric: Metric) -> Self {
        // Cells strictly wider than the reach; capped so that sparse
        // instances do not allocate huge empty grids.
        let by_reach = if reach > 0.0 {
            (1.0 / (reach * (1.0 + 1e-9))).floor()
        } else {
            f64::INFINITY
        };
        let by_count = 2.0 * (points.len() as f64).sqrt() + 1.0;
        let n = by_reach.min(by_count).clamp(1.0, 4096.0) as usize;
        let cell_of = |p: &Point2| {
            let cx = (((p.x() + 0.5) * n as f64) as usize).min(n - 1);
            let cy = (((p.y() + 0.5) * n as f64) as usize).min(n - 1);
            cy * n + cx
        };
        let mut offsets = vec![0usize; n * n + 1];
        for p in points {
            offsets[cell_of(p) + 1] += 1;
        }
        for c in 0..n * n {
            offsets[c + 1] += offsets[c];
        }
        let mut fill = offsets.clone();
        let mut items = vec![0u32; points.len()];
        for (idx, p) in points.iter().enumerate() {
            let c = cell_of(p);
            items[fill[c]] = idx as u32;
            fill[c] += 1;
        }
        Self {
            n,
            wrap: metric == Metric::Torus,
            offsets,
            items,
        }
    }

    fn members(&self, cell: usize) -> &[u32] {
        &self.items[self.offsets[cell]..self.offsets[cell + 1]]
    }

    fn neighbours(&self, cell: usize) -> Vec<usize> {
        let n = self.n as isize;
        let cx = (cell % self.n) as isize;
        let cy = (cell / self.n) as isize;
        let mut out = Vec::with_capacity(9);
        for dy in -1..=1 {
            for dx in -1..=1 {
                let (mut x, mut y) = (cx + dx, cy + dy);
                if self.wrap {
                    x = x.rem_euclid(n);
                    y = y.rem_euclid(n);
                } else if x < 0 || y < 0 || x >= n || y >= n {
                    continue;
                }
                out.push((y * n + x) as usize);
            }
        }
        // Small tori wrap onto the same cell more than once.
        out.sort_unstable();
        out.dedup();
        out
    }
}

/// Keeps each edge independently with probability `keep_ratio(i, j)`.
///
/// `stream_tag` must differ from the tags used to build the graph.
pub fn thin_edges<F>(sample: &NetworkSample, keep_ratio: F, stream_tag: u64) -> Result<NetworkSample>
where
    F: Fn(u32, u32) -> f64,
{
    let key = sample.params.stream(stream_tag);
    let mut kept = Vec::with_capacity(sample.edges.len());
    for &(i, j) in &sample.edges {
        let k = keep_ratio(i, j);
        if !(0.0..=1.0).contains(&k) {
            return Err(Error::Model(format!(
                "keep probability {k} for edge ({i}, {j}) is outside [0, 1]"
            )));
        }
        if k >= 1.0 || (k > 0.0 && key.pair_uniform(i as u64, j as u64) < k) {
            kept.push((i, j));
        }
    }
    Ok(NetworkSample {
        params: sample.params.clone(),
        points: sample.points.clone(),
        edges: kept,
    })
}

/// Builds the torus graph, then removes each edge with probability
/// `1 - g(d_euclid / r) / g(d_torus / r)`, which yields the square graph on
/// the same points.
pub fn couple_torus_to_square(params: &SampleParams) -> Result<CoupledSample> {
    let torus_params = params.with_metric(Metric::Torus)?;
    let square_params = params.with_metric(Metric::Square)?;
    let torus_graph = sample_network(&torus_params)?;
    let pts = &torus_graph.points;
    let keep = |i: u32, j: u32| {
        let (p, q) = (pts[i as usize], pts[j as usize]);
        let on_torus = torus_params.connection_probability(distance(Metric::Torus, p, q));
        let on_square = torus_params.connection_probability(distance(Metric::Square, p, q));
        on_square / on_torus
    };
    let mut square_graph = thin_edges(&torus_graph, keep, STREAM_BOUNDARY_THINNING)?;
    square_graph.params = square_params;

    let removed_edges = sorted_difference(&torus_graph.edges, &square_graph.edges);
    Ok(CoupledSample {
        torus_graph,
        square_graph,
        removed_edges,
    })
}

fn sorted_difference(all: &[Edge], kept: &[Edge]) -> Vec<Edge> {
    let mut out = Vec::with_capacity(all.len() - kept.len());
    let mut k = kept.iter().peekable();
    for e in all {
        if k.peek() == Some(&e) {
            k.next();
        } else {
            out.push(*e);
        }
    }
    out
}

/// Expected number of pairs per trial that the cutoff silently drops:
/// `(rho^2 r^2 / 2) * ∫_cutoff^inf 2 pi x g(x) dx`.
pub fn truncation_bias(model: &ConnectionModel, rho: f64, b: f64) -> Result<f64> {
    truncation_bias_beyond(model, rho, b, model.cutoff())
}

/// [`truncation_bias`] for an arbitrary cutoff.
pub fn truncation_bias_beyond(model: &ConnectionModel, rho: f64, b: f64, cutoff: f64) -> Result<f64> {
    model.ensure_usable()?;
    let r = connection_radius(model.c(), rho, b)?;
    let tail = model.tail_integral(cutoff)?;
    Ok((0.5 * rho * rho * r * r * tail.value).max(0.0))
}

/// Header of the edge-list dump.
#[derive(Clone, Debug, PartialEq)]
pub struct EdgeListHeader {
    pub n_points: usize,
    pub rho: f64,
    pub b: f64,
    pub model: String,
    pub metric: Metric,
    pub seed: u64,
    pub trial: u64,
}

/// Writes `n_points rho b model metric seed trial` followed by one
/// `i j d` line per edge.
pub fn write_edge_list<W: Write>(sample: &NetworkSample, mut out: W) -> std::io::Result<()> {
    let p = &sample.params;
    writeln!(
        out,
        "{} {} {} {} {} {} {}",
        sample.n_points(),
        fmt_real(p.rho()),
        fmt_real(p.b()),
        p.model().kind().label(),
        p.metric(),
        p.master_seed(),
        p.trial_index()
    )?;
    for &e in &sample.edges {
        writeln!(out, "{} {} {}", e.0, e.1, fmt_real(sample.edge_distance(e)))?;
    }
    Ok(())
}

pub fn read_edge_list<R: BufRead>(input: R) -> Result<(EdgeListHeader, Vec<(Edge, f64)>)> {
    let mut lines = input.lines();
    let header_line = lines
        .next()
        .ok_or_else(|| Error::Parse("empty edge list".into()))?
        .map_err(|e| Error::Parse(e.to_string()))?;
    let f: Vec<&str> = header_line.split_whitespace().collect();
    if f.len() != 7 {
        return Err(Error::Parse(format!(
            "edge list header needs 7 fields, found {}",
            f.len()
        )));
    }
    let bad = |what: &str| Error::Parse(format!("edge list header: bad {what}"));
    let header = EdgeListHeader {
        n_points: f[0].parse().map_err(|_| bad("n_points"))?,
        rho: f[1].parse().map_err(|_| bad("rho"))?,
        b: f[2].parse().map_err(|_| bad("b"))?,
        model: f[3].to_string(),
        metric: f[4].parse()?,
        seed: f[5].parse().map_err(|_| bad("seed"))?,
        trial: f[6].parse().map_err(|_| bad("trial"))?,
    };
    let mut edges = Vec::new();
    for (n, line) in lines.enumerate() {
        let line = line.map_err(|e| Error::Parse(e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split_whitespace().collect();
        let parsed = (f.len() == 3)
            .then(|| Some(((f[0].parse().ok()?, f[1].parse().ok()?), f[2].parse().ok()?)))
            .flatten();
        match parsed {
            Some(item) => edges.push(item),
            None => return Err(Error::Parse(format!("edge list line {}: {line:?}", n + 2))),
        }
    }
    Ok((header, edges))
}

/// Reals written with 17 significant digits.
pub fn fmt_real(x: f64) -> String {
    format!("{x:.16e}")
}
