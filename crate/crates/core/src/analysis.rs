//! Per-trial graph statistics.

use serde::{Deserialize, Serialize};

use crate::sampler::{CoupledSample, Edge, NetworkSample};

/// Disjoint sets with path compression (halving) and union by size.
#[derive(Clone, Debug)]
pub struct UnionFind {
    parent: Vec<u32>,
    size: Vec<u32>,
    sets: usize,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        Self {
            parent: (0..n as u32).collect(),
            size: vec![1; n],
            sets: n,
        }
    }

    pub fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let grand = self.parent[self.parent[x as usize] as usize];
            self.parent[x as usize] = grand;
            x = grand;
        }
        x
    }

    /// Returns `true` if the two elements were in different sets.
    pub fn union(&mut self, a: u32, b: u32) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra as usize] < self.size[rb as usize] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb as usize] = ra;
        self.size[ra as usize] += self.size[rb as usize];
        self.sets -= 1;
        true
    }

    pub fn n_sets(&self) -> usize {
        self.sets
    }
}

pub fn degrees(n: usize, edges: &[Edge]) -> Vec<u32> {
    let mut deg = vec![0u32; n];
    for &(i, j) in edges {
        deg[i as usize] += 1;
        deg[j as usize] += 1;
    }
    deg
}

pub fn isolated_in(n: usize, edges: &[Edge]) -> usize {
    degrees(n, edges).iter().filter(|&&d| d == 0).count()
}

/// `(n_components, connected)`; graphs with at most one node are connected.
pub fn components_in(n: usize, edges: &[Edge]) -> (usize, bool) {
    let mut uf = UnionFind::new(n);
    for &(i, j) in edges {
        uf.union(i, j);
    }
    let k = uf.n_sets();
    (k, k <= 1)
}

pub fn isolated_count(sample: &NetworkSample) -> usize {
    isolated_in(sample.n_points(), &sample.edges)
}

pub fn components(sample: &NetworkSample) -> (usize, bool) {
    components_in(sample.n_points(), &sample.edges)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial_index: u64,
    pub n_points: usize,
    pub n_edges: usize,
    pub isolated: usize,
    pub n_components: usize,
    pub connected: bool,
    pub mean_degree: f64,
    pub isolated_torus: Option<usize>,
    pub isolated_square: Option<usize>,
    pub isolated_boundary: Option<usize>,
}

impl TrialRecord {
    pub fn from_graph(trial_index: u64, n: usize, edges: &[Edge]) -> Self {
        let (n_components, connected) = components_in(n, edges);
        Self {
            trial_index,
            n_points: n,
            n_edges: edges.len(),
            isolated: isolated_in(n, edges),
            n_components,
            connected,
            mean_degree: if n == 0 {
                0.0
            } else {
                2.0 * edges.len() as f64 / n as f64
            },
            isolated_torus: None,
            isolated_square: None,
            isolated_boundary: None,
        }
    }

    pub fn is_coupled(&self) -> bool {
        self.isolated_torus.is_some()
    }
}

pub fn trial_statistics(sample: &NetworkSample) -> TrialRecord {
    TrialRecord::from_graph(sample.params.trial_index(), sample.n_points(), &sample.edges)
}

/// Statistics of the square graph plus the torus / square / boundary split.
///
/// The boundary count is the number of nodes isolated on the square but not
/// on the torus, counted directly rather than by subtraction.
pub fn coupled_statistics(sample: &CoupledSample) -> TrialRecord {
    let n = sample.square_graph.n_points();
    let mut rec = trial_statistics(&sample.square_graph);
    let deg_t = degrees(n, &sample.torus_graph.edges);
    let deg_s = degrees(n, &sample.square_graph.edges);
    let boundary = deg_t
        .iter()
        .zip(&deg_s)
        .filter(|&(&t, &s)| t > 0 && s == 0)
        .count();
    rec.isolated_torus = Some(deg_t.iter().filter(|&&d| d == 0).count());
    rec.isolated_square = Some(rec.isolated);
    rec.isolated_boundary = Some(boundary);
    rec
}
