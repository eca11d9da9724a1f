mod common;

use hcstab_core::{
    distortion, gh_bounds, gh_exact, gh_lower_bound, gh_upper_from, interval_space, random_metric, random_ultrametric,
    Correspondence, FiniteMetricSpace, DEFAULT_GH_BUDGET,
};
use proptest::prelude::*;

fn exact(x: &FiniteMetricSpace, y: &FiniteMetricSpace) -> f64 {
    let g = gh_exact(x, y, DEFAULT_GH_BUDGET);
    assert!(g.exact);
    g.value
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn matches_subset_enumeration(n in 1usize..=3, m in 1usize..=4, s in any::<u64>(), t in any::<u64>()) {
        let (x, y) = (random_metric(n, s), random_metric(m, t));
        let g = gh_exact(&x, &y, DEFAULT_GH_BUDGET);
        prop_assert!(g.exact);
        prop_assert_eq!(g.value, common::gh_subsets(&x, &y));
    }

    #[test]
    fn matches_map_enumeration(n in 1usize..=4, m in 1usize..=4, s in any::<u64>(), t in any::<u64>()) {
        let (x, y) = (random_metric(n, s), random_metric(m, t));
        prop_assert_eq!(exact(&x, &y), common::gh_maps(&x, &y));
    }

    #[test]
    fn matches_map_enumeration_on_ultrametrics(n in 2usize..=4, m in 2usize..=4, s in any::<u64>(), t in any::<u64>()) {
        let (x, y) = (random_ultrametric(n, 3, s), random_ultrametric(m, 3, t));
        prop_assert_eq!(exact(&x, &y), common::gh_maps(&x, &y));
    }

    #[test]
    fn witness_realizes_the_value(n in 1usize..=7, m in 1usize..=7, s in any::<u64>(), t in any::<u64>()) {
        let (x, y) = (random_metric(n, s), random_metric(m, t));
        let g = gh_exact(&x, &y, DEFAULT_GH_BUDGET);
        let pairs = g
            .witness
            .iter()
            .map(|(a, b)| (x.index_of(a).unwrap(), y.index_of(b).unwrap()))
            .collect();
        let tau = Correspondence::new(pairs, &x, &y).unwrap();
        prop_assert_eq!(distortion(&tau, &x, &y) / 2.0, g.value);
        prop_assert_eq!(gh_upper_from(&tau, &x, &y), g.value);
    }

    #[test]
    fn symmetric(n in 1usize..=6, m in 1usize..=6, s in any::<u64>(), t in any::<u64>()) {
        let (x, y) = (random_metric(n, s), random_metric(m, t));
        prop_assert_eq!(exact(&x, &y), exact(&y, &x));
    }

    #[test]
    fn triangle(n in 1usize..=5, m in 1usize..=5, k in 1usize..=5, s in any::<u64>()) {
        let (x, y, z) = (random_metric(n, s), random_metric(m, s ^ 1), random_metric(k, s ^ 2));
        let (xy, yz, xz) = (exact(&x, &y), exact(&y, &z), exact(&x, &z));
        prop_assert!(xz <= xy + yz + 1e-12 * (xy + yz).max(1.0));
    }

    #[test]
    fn zero_on_isometric_copies(n in 1usize..=7, s in any::<u64>(), rot in 0usize..7) {
        let x = random_metric(n, s);
        let perm: Vec<usize> = (0..n).map(|i| (i + rot) % n).collect();
        prop_assert_eq!(exact(&x, &common::permuted(&x, &perm)), 0.0);
    }

    #[test]
    fn scaled_copies_sit_at_half_the_diameter_change(n in 2usize..=6, s in any::<u64>(), bump in 0.01f64..0.5) {
        let x = random_metric(n, s);
        let y = x.scale(1.0 + bump).unwrap();
        let g = exact(&x, &y);
        prop_assert!(g > 0.0);
        prop_assert!(close(g, (y.diameter() - x.diameter()) / 2.0));
    }

    #[test]
    fn positive_between_non_isometric_spaces(n in 2usize..=6, s in any::<u64>(), t in any::<u64>()) {
        let (x, y) = (random_metric(n, s), random_metric(n, t));
        let mut dx: Vec<f64> = x.to_rows().concat();
        let mut dy: Vec<f64> = y.to_rows().concat();
        dx.sort_by(f64::total_cmp);
        dy.sort_by(f64::total_cmp);
        prop_assume!(dx != dy);
        prop_assert!(exact(&x, &y) > 0.0);
    }

    #[test]
    fn bounds_bracket_the_value(n in 1usize..=5, m in 1usize..=5, s in any::<u64>(), t in any::<u64>()) {
        let (x, y) = (random_metric(n, s), random_metric(m, t));
        let v = exact(&x, &y);
        let (lo, hi) = gh_bounds(&x, &y);
        prop_assert!(lo <= v * (1.0 + 1e-12) + 1e-300, "lower {} exact {}", lo, v);
        prop_assert!(v <= hi);
        prop_assert_eq!(gh_lower_bound(&x, &y), lo);
    }

    #[test]
    fn truncated_search_still_brackets(n in 4usize..=7, m in 4usize..=7, s in any::<u64>(), t in any::<u64>()) {
        let (x, y) = (random_metric(n, s), random_metric(m, t));
        let v = exact(&x, &y);
        let g = gh_exact(&x, &y, 3);
        prop_assert!(g.lower <= v * (1.0 + 1e-12));
        prop_assert!(g.upper >= v);
        prop_assert!(g.exact || g.nodes >= 3);
    }
}

#[test]
fn two_point_spaces() {
    let delta = 0.375;
    let x = interval_space(&[1.0]).unwrap();
    let y = interval_space(&[1.0 + delta]).unwrap();
    assert_eq!(exact(&x, &y), delta / 2.0);
    assert_eq!(common::gh_subsets(&x, &y), delta / 2.0);
    assert_eq!(gh_lower_bound(&interval_space(&[1.0]).unwrap(), &interval_space(&[3.0]).unwrap()), 1.0);
}

#[test]
fn perturbed_three_point_interval() {
    let delta = 0.25;
    let x = interval_space(&[1.0, 1.0]).unwrap();
    let y = interval_space(&[1.0, 1.0 + delta]).unwrap();
    let oracle = common::gh_subsets(&x, &y);
    assert_eq!(exact(&x, &y), oracle);
    assert_eq!(oracle, delta / 2.0);
    let id = Correspondence::identity(&x, &y).unwrap();
    assert_eq!(distortion(&id, &x, &y), delta);
}

#[test]
fn single_point_against_a_space() {
    let p = FiniteMetricSpace::new(vec!["p"], vec![vec![0.0]]).unwrap();
    for n in 1..=6 {
        let x = random_metric(n, n as u64);
        assert_eq!(exact(&p, &x), x.diameter() / 2.0);
    }
}
