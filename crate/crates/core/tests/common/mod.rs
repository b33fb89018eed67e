//! Test-side oracles shared by the integration test targets.
#![allow(dead_code)]

use std::collections::VecDeque;

use rcm::campaign::{CampaignConfig, CampaignMetric, ModelSpec, OutputFormat};
use rcm::rng::STREAM_EDGES;
use rcm::sampler::{Edge, SampleParams};
use rcm::{distance, Point2};

/// All-pairs edge set using the sampler's per-pair uniforms.
pub fn brute_force_edges(params: &SampleParams, points: &[Point2]) -> Vec<Edge> {
    let key = params.stream(STREAM_EDGES);
    let r = params.r();
    let model = params.model();
    let mut out = Vec::new();
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            let d = distance(params.metric(), points[i], points[j]);
            let p = model.g(d / r);
            if p >= 1.0 || (p > 0.0 && key.pair_uniform(i as u64, j as u64) < p) {
                out.push((i as u32, j as u32));
            }
        }
    }
    out
}

/// Component labels by breadth-first search.
pub fn bfs_components(n: usize, edges: &[Edge]) -> Vec<usize> {
    let mut adj = vec![Vec::new(); n];
    for &(i, j) in edges {
        adj[i as usize].push(j as usize);
        adj[j as usize].push(i as usize);
    }
    let mut label = vec![usize::MAX; n];
    let mut next = 0;
    for s in 0..n {
        if label[s] != usize::MAX {
            continue;
        }
        label[s] = next;
        let mut q = VecDeque::from([s]);
        while let Some(u) = q.pop_front() {
            for &v in &adj[u] {
                if label[v] == usize::MAX {
                    label[v] = next;
                    q.push_back(v);
                }
            }
        }
        next += 1;
    }
    label
}

pub fn bfs_component_count(n: usize, edges: &[Edge]) -> usize {
    bfs_components(n, edges).into_iter().max().map_or(0, |m| m + 1)
}

/// Nodes with no incident edge, counted from the edge list.
pub fn isolated_by_scan(n: usize, edges: &[Edge]) -> usize {
    let mut touched = vec![false; n];
    for &(i, j) in edges {
        touched[i as usize] = true;
        touched[j as usize] = true;
    }
    touched.iter().filter(|t| !**t).count()
}

pub fn config(
    model: ModelSpec,
    rho: &[f64],
    b: &[f64],
    metric: CampaignMetric,
    trials: u64,
    seed: u64,
) -> CampaignConfig {
    CampaignConfig {
        model,
        rho_list: rho.to_vec(),
        b_list: b.to_vec(),
        metric,
        trials,
        master_seed: seed,
        epsilon: 0.25,
        output_path: "results".into(),
        format: OutputFormat::Csv,
        theory: false,
        base_dir: ".".into(),
    }
}
