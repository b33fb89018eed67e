mod common;

use std::sync::Arc;

use proptest::prelude::*;

use rcm::analysis::{components_in, isolated_in, trial_statistics};
use rcm::rng::{poisson, StreamKey};
use rcm::sampler::{
    build_graph, read_edge_list, sample_network, sample_points, write_edge_list, GraphMode,
    SampleParams,
};
use rcm::theory::{
    chen_stein_tv_bound, expected_isolated, pair_correlation_factor, poisson_pmf, tv_distance,
    DiscreteDistribution,
};
use rcm::{ConnectionModel, Metric};

use common::{brute_force_edges, isolated_by_scan};

fn models() -> Vec<Arc<ConnectionModel>> {
    vec![
        Arc::new(ConnectionModel::unit_disk()),
        Arc::new(ConnectionModel::gaussian()),
        Arc::new(ConnectionModel::table(vec![(0.0, 1.0), (0.6, 0.9), (1.4, 0.0)]).unwrap()),
    ]
}

fn distribution() -> impl Strategy<Value = DiscreteDistribution> {
    prop::collection::vec(0.0f64..1.0, 1..12).prop_map(|w| {
        let total: f64 = w.iter().sum::<f64>() + 1e-9;
        let pmf = w.iter().map(|x| x / total).collect::<Vec<_>>();
        let tail = (1.0 - pmf.iter().sum::<f64>()).max(0.0);
        DiscreteDistribution::new(pmf, tail).unwrap()
    })
}

proptest! {
    #[test]
    fn grid_and_exact_modes_agree(mi in 0usize..3, rho in 20.0f64..400.0, b in -1.0f64..3.0, seed: u64) {
        let ms = models();
        let p = SampleParams::new(rho, b, ms[mi].clone(), Metric::Square, seed, 0).unwrap();
        prop_assume!(p.reach() <= 0.5);
        let grid = sample_network(&p).unwrap();
        let exact = sample_network(&p.clone().with_mode(GraphMode::Exact)).unwrap();
        prop_assert_eq!(&grid.edges, &exact.edges);
        prop_assert_eq!(grid.edges, brute_force_edges(&p, &exact.points));
    }

    #[test]
    fn edges_are_nested_in_b(mi in 0usize..3, rho in 50.0f64..400.0, lo in -1.0f64..2.0, step in 0.0f64..2.0, seed: u64, trial in 0u64..100) {
        let ms = models();
        let a = SampleParams::new(rho, lo, ms[mi].clone(), Metric::Square, seed, trial).unwrap();
        let bp = SampleParams::new(rho, lo + step, ms[mi].clone(), Metric::Square, seed, trial).unwrap();
        prop_assume!(bp.reach() <= 0.5);
        let small = sample_network(&a).unwrap();
        let big = sample_network(&bp).unwrap();
        prop_assert_eq!(&small.points, &big.points);
        prop_assert!(small.edges.iter().all(|e| big.edges.binary_search(e).is_ok()));
    }

    #[test]
    fn isolated_counts_agree_and_connected_means_none(rho in 5.0f64..300.0, b in -1.0f64..4.0, seed: u64) {
        let ud = Arc::new(ConnectionModel::unit_disk());
        let p = SampleParams::new(rho, b, ud, Metric::Torus, seed, 1).unwrap();
        let s = sample_network(&p).unwrap();
        let n = s.n_points();
        let rec = trial_statistics(&s);
        prop_assert_eq!(rec.isolated, isolated_by_scan(n, &s.edges));
        prop_assert_eq!(rec.isolated, s.degrees().iter().filter(|&&d| d == 0).count());
        prop_assert_eq!(isolated_in(n, &s.edges), rec.isolated);
        if rec.connected && n >= 2 {
            prop_assert_eq!(rec.isolated, 0);
        }
        prop_assert_eq!(components_in(n, &s.edges).0, rec.n_components);
    }

    #[test]
    fn tv_is_a_metric(p in distribution(), q in distribution(), s in distribution()) {
        let d = tv_distance(&p, &q);
        prop_assert!((0.0..=1.0).contains(&d));
        prop_assert!((d - tv_distance(&q, &p)).abs() < 1e-15);
        prop_assert!(tv_distance(&p, &p) < 1e-15);
        prop_assert!(d <= tv_distance(&p, &s) + tv_distance(&s, &q) + 1e-12);
    }

    #[test]
    fn tv_bound_is_monotone(b1 in 0.0f64..2.0, b2 in 0.0f64..2.0, b3 in 0.0f64..2.0, extra in 0.0f64..1.0, lambda in 0.01f64..20.0) {
        let base = chen_stein_tv_bound(b1, b2, b3, lambda).unwrap();
        prop_assert!(chen_stein_tv_bound(b1 + extra, b2, b3, lambda).unwrap() >= base);
        prop_assert!(chen_stein_tv_bound(b1, b2 + extra, b3, lambda).unwrap() >= base);
        prop_assert!(chen_stein_tv_bound(b1, b2, b3 + extra, lambda).unwrap() >= base);
    }

    #[test]
    fn pair_uniform_is_symmetric(seed: u64, trial: u64, tag in 0u64..3, i: u64, j: u64) {
        let k = StreamKey::new(seed, trial, tag);
        let u = k.pair_uniform(i, j);
        prop_assert_eq!(u, k.pair_uniform(j, i));
        prop_assert!((0.0..1.0).contains(&u));
    }

    #[test]
    fn edge_list_round_trips(rho in 5.0f64..200.0, b in -1.0f64..2.0, seed: u64, metric in prop_oneof![Just(Metric::Torus), Just(Metric::Square)]) {
        let ud = Arc::new(ConnectionModel::unit_disk());
        let p = SampleParams::new(rho, b, ud, metric, seed, 3).unwrap();
        let s = sample_network(&p).unwrap();
        let mut buf = Vec::new();
        write_edge_list(&s, &mut buf).unwrap();
        let (h, edges) = read_edge_list(buf.as_slice()).unwrap();
        prop_assert_eq!(h.n_points, s.n_points());
        prop_assert_eq!(h.rho, rho);
        prop_assert_eq!(h.b, b);
        prop_assert_eq!(h.metric, metric);
        prop_assert_eq!((h.seed, h.trial), (seed, 3));
        prop_assert_eq!(edges.len(), s.edges.len());
        for ((e, d), want) in edges.iter().zip(&s.edges) {
            prop_assert_eq!(e, want);
            prop_assert_eq!(*d, s.edge_distance(*want));
        }
    }
}

#[test]
fn exact_mode_handles_long_reach_on_the_square() {
    let ln = Arc::new(ConnectionModel::log_normal(4.0, 2.0).unwrap());
    let p = SampleParams::new(80.0, 0.0, ln, Metric::Square, 9, 0).unwrap();
    assert!(p.reach() > 0.5);
    assert!(sample_network(&p).is_err());
    let exact = p.with_mode(GraphMode::Exact);
    let pts = sample_points(&exact);
    let want = brute_force_edges(&exact, &pts);
    assert_eq!(build_graph(&exact, pts).unwrap().edges, want);
}

#[test]
fn poisson_sampler_matches_pmf() {
    // Chi-square goodness of fit on both sides of the inversion / PTRS switch.
    for (lambda, seed) in [(0.7, 1u64), (12.0, 2), (29.5, 3), (30.5, 4), (400.0, 5)] {
        let n = 100_000;
        let mut rng = StreamKey::new(seed, 0, 0).sequence();
        let mut counts = std::collections::BTreeMap::<u64, f64>::new();
        for _ in 0..n {
            *counts.entry(poisson(&mut rng, lambda)).or_default() += 1.0;
        }
        let pmf = poisson_pmf(lambda, 4 * lambda as usize + 50).unwrap();
        // Bins with expected count >= 20, plus the two tails lumped.
        let mut chi2 = 0.0;
        let mut bins = 0;
        let (mut lo_obs, mut lo_exp, mut hi_obs, mut hi_exp) = (0.0, 0.0, 0.0, 0.0);
        let mode = lambda.floor() as usize;
        for k in 0..pmf.pmf().len() {
            let e = pmf.prob(k) * n as f64;
            let o = counts.get(&(k as u64)).copied().unwrap_or(0.0);
            if e >= 20.0 {
                chi2 += (o - e).powi(2) / e;
                bins += 1;
            } else if k < mode {
                lo_obs += o;
                lo_exp += e;
            } else {
                hi_obs += o;
                hi_exp += e;
            }
        }
        hi_obs += counts.range(pmf.pmf().len() as u64..).map(|(_, c)| c).sum::<f64>();
        hi_exp += pmf.tail_mass() * n as f64;
        for (o, e) in [(lo_obs, lo_exp), (hi_obs, hi_exp)] {
            if e > 0.0 {
                chi2 += (o - e).powi(2) / e;
                bins += 1;
            }
        }
        // Mean + 5 sd of a chi-square with `bins - 1` degrees of freedom.
        let df = (bins - 1) as f64;
        assert!(chi2 < df + 5.0 * (2.0 * df).sqrt(), "lambda {lambda}: chi2 {chi2} on {df} df");
    }
}

#[test]
fn pair_correlation_is_one_beyond_twice_the_reach() {
    for m in [ConnectionModel::unit_disk(), ConnectionModel::gaussian()] {
        let (rho, b) = (1e4, 0.0);
        let r = rcm::connection_radius(m.c(), rho, b).unwrap();
        for factor in [2.0 * (1.0 + 1e-9), 3.0, 4.0] {
            let f = pair_correlation_factor(&m, rho, b, factor * r * m.cutoff()).unwrap();
            assert!((f - 1.0).abs() < 1e-6, "{factor}: {f}");
        }
    }
    // Unit-disk neighbours are never both isolated.
    let ud = ConnectionModel::unit_disk();
    let r = rcm::connection_radius(ud.c(), 1e4, 0.0).unwrap();
    assert_eq!(pair_correlation_factor(&ud, 1e4, 0.0, 0.5 * r).unwrap(), 0.0);
}

#[test]
fn boundary_excess_is_non_negative_and_shrinks() {
    let ud = ConnectionModel::unit_disk();
    let excess = |rho: f64, b: f64| {
        expected_isolated(&ud, rho, b, Metric::Square).unwrap().value
            - expected_isolated(&ud, rho, b, Metric::Torus).unwrap().value
    };
    for rho in [200.0, 2e3, 2e4] {
        for b in [-1.0, 0.0, 2.0] {
            assert!(excess(rho, b) >= 0.0, "rho {rho} b {b}");
        }
    }
    assert!(excess(1e5, 0.0) < excess(1e3, 0.0));
}
