mod common;

use hcstab_core::{
    cross_simplex_max_dim, interval_space, prop_bridge_space, random_metric, rips_block_dim, run_almost_standard,
    run_standard, sl_alpha, unchaining_threshold, Always, BuiltinLinkage, FiniteMetricSpace, MatrixFile, PAlpha,
    Unchaining, Validation,
};
use proptest::prelude::*;

fn graph(n: usize, bits: &[bool]) -> FiniteMetricSpace {
    let mut adj = vec![vec![false; n]; n];
    let mut k = 0;
    for i in 0..n {
        for j in i + 1..n {
            adj[i][j] = bits[k];
            adj[j][i] = bits[k];
            k += 1;
        }
    }
    common::graph_space(&adj)
}

fn graph_strategy() -> impl Strategy<Value = (usize, Vec<bool>)> {
    (1usize..=12).prop_flat_map(|n| (Just(n), proptest::collection::vec(proptest::bool::weighted(0.6), n * (n - 1) / 2)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn rips_dimension_is_the_largest_clique((n, bits) in graph_strategy()) {
        let g = graph(n, &bits);
        let all: Vec<usize> = (0..n).collect();
        prop_assert_eq!(rips_block_dim(&all, 1.0, &g).unwrap() + 1, common::clique_oracle(&g, &all, 1.0, None));
        prop_assert_eq!(rips_block_dim(&all, 0.5, &g).unwrap(), 0);
        prop_assert_eq!(rips_block_dim(&all, 2.0, &g).unwrap(), n - 1);
    }

    #[test]
    fn cross_simplex_is_the_largest_meeting_clique((n, bits) in graph_strategy(), split in 1usize..12) {
        prop_assume!(n >= 2);
        let g = graph(n, &bits);
        let cut = 1 + split % (n - 1);
        let (a, b): (Vec<usize>, Vec<usize>) = ((0..cut).collect(), (cut..n).collect());
        let all: Vec<usize> = (0..n).collect();
        let oracle = common::clique_oracle(&g, &all, 1.0, Some((&a, &b)));
        let got = cross_simplex_max_dim(&a, &b, 1.0, &g).unwrap();
        prop_assert_eq!(got.map(|d| d + 1).unwrap_or(0), oracle);
    }

    #[test]
    fn p_alpha_matches_its_definition((n, bits) in graph_strategy(), split in 1usize..12, alpha in 1.0f64..4.0) {
        prop_assume!(n >= 2);
        let g = graph(n, &bits);
        let cut = 1 + split % (n - 1);
        let (a, b): (Vec<usize>, Vec<usize>) = ((0..cut).collect(), (cut..n).collect());
        let all: Vec<usize> = (0..n).collect();
        let cross = common::clique_oracle(&g, &all, 1.0, Some((&a, &b)));
        let da = common::clique_oracle(&g, &a, 1.0, None) - 1;
        let db = common::clique_oracle(&g, &b, 1.0, None) - 1;
        let want = cross >= 2 && alpha * (cross - 1) as f64 >= da.min(db) as f64;
        prop_assert_eq!(PAlpha::new(alpha).unwrap().satisfied(&a, &b, 1.0, &g).unwrap(), want);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn large_alpha_is_single_linkage(n in 1usize..=14, seed in any::<u64>()) {
        let m = random_metric(n, seed);
        let sl = run_standard(&m, &BuiltinLinkage::Sl).unwrap().0;
        let alpha = n.max(1) as f64;
        prop_assert_eq!(&sl_alpha(&m, alpha).unwrap().0, &sl);
        let p = PAlpha::new(alpha).unwrap();
        prop_assert_eq!(&run_almost_standard(&m, &BuiltinLinkage::Sl, &p).unwrap().0, &sl);
    }

    #[test]
    fn always_is_the_standard_method(n in 1usize..=14, seed in any::<u64>()) {
        let m = random_metric(n, seed);
        for l in [BuiltinLinkage::Sl, BuiltinLinkage::Cl, BuiltinLinkage::Al] {
            prop_assert_eq!(run_almost_standard(&m, &l, &Always).unwrap().0, run_standard(&m, &l).unwrap().0);
        }
    }

    #[test]
    fn sl_alpha_blocks_are_connected_and_nested(n in 2usize..=14, seed in any::<u64>(), alpha in 1usize..=3) {
        let m = random_metric(n, seed);
        let (d, _) = sl_alpha(&m, alpha as f64).unwrap();
        for w in d.partitions().windows(2) {
            prop_assert!(w[0].refines(&w[1]));
        }
        for (t, p) in d.breakpoints().iter().zip(d.partitions()) {
            for b in p.blocks() {
                prop_assert!(m.is_t_connected(b, *t));
            }
        }
        // Never coarser than single linkage.
        let sl = run_standard(&m, &BuiltinLinkage::Sl).unwrap().0;
        for &t in m.distance_set().values() {
            prop_assert!(d.partition_at(t).refines(sl.partition_at(t)));
        }
    }
}

#[test]
fn bridge_space_dimensions() {
    for alpha in 1..=4 {
        let (s, b1, b2) = prop_bridge_space(alpha, 0.5).unwrap();
        assert_eq!(s.len(), 2 * alpha + 4);
        assert_eq!(rips_block_dim(&b1, 2.0, &s).unwrap(), alpha + 1);
        assert_eq!(rips_block_dim(&b2, 2.0, &s).unwrap(), alpha + 1);
        assert_eq!(cross_simplex_max_dim(&b1, &b2, 2.0, &s).unwrap(), Some(1));
        let p = PAlpha::new(alpha as f64).unwrap();
        assert!(!p.satisfied(&b1, &b2, 2.0, &s).unwrap());
        // Above 2 + gap every cross pair is an edge and the whole space is a clique.
        assert!(p.satisfied(&b1, &b2, 2.5, &s).unwrap());
        assert_eq!(unchaining_threshold(&p, &b1, &b2, &s).unwrap(), 2.5);
    }
}

#[test]
fn sl_alpha_on_the_bridge_space() {
    let (s, b1, b2) = prop_bridge_space(1, 0.5).unwrap();
    for (d, trace) in [
        sl_alpha(&s, 1.0).unwrap(),
        run_almost_standard(&s, &BuiltinLinkage::Sl, &PAlpha::new(1.0).unwrap()).unwrap(),
    ] {
        assert_eq!(d.breakpoints(), &[0.0, 1.0, 2.5]);
        let at_two = d.partition_at(2.0);
        assert_eq!(at_two.blocks(), &[b1.clone(), b2.clone()]);
        assert!(trace.rounds.iter().any(|r| r.level == 2.0 && r.edges.is_empty()));
    }
    let sl = run_standard(&s, &BuiltinLinkage::Sl).unwrap().0;
    assert_eq!(sl.breakpoints(), &[0.0, 1.0, 2.0]);
}

#[test]
fn sl_alpha_is_ordinary() {
    for (delta, r) in [(0.25, 1.0), (1.0, 1.0), (0.5, 3.0), (2.0, 0.5)] {
        for lengths in [vec![r], vec![delta, r], vec![delta, r, delta]] {
            let x = interval_space(&lengths).unwrap();
            let sl = run_standard(&x, &BuiltinLinkage::Sl).unwrap().0;
            for alpha in [1.0, 2.0, 3.0] {
                assert_eq!(sl_alpha(&x, alpha).unwrap().0, sl);
                let p = PAlpha::new(alpha).unwrap();
                assert_eq!(run_almost_standard(&x, &BuiltinLinkage::Sl, &p).unwrap().0, sl);
            }
        }
    }
}

/// The ordered sweep tests every distance; the three-case recursion only
/// tests linkage values. Here the two 3-blocks first satisfy `P_1` at
/// 12.2514 = d(x1, x2), which is not a single-linkage value between them.
#[test]
fn ordered_sweep_and_recursion_can_disagree() {
    let text = r#"{"labels":["x0","x1","x2","x3","x4","x5","x6"],"dist":[[0.0,4.3460235595703125,10.773651123046875,13.23187255859375,17.3900146484375,7.52349853515625,18.108139038085938],[4.3460235595703125,0.0,12.251419067382812,14.709640502929688,18.867782592773438,4.9005889892578125,18.046478271484375],[10.773651123046875,12.251419067382812,0.0,4.1376953125,8.88568115234375,12.587738037109375,25.733627319335938],[13.23187255859375,14.709640502929688,4.1376953125,0.0,6.826446533203125,12.537506103515625,25.683395385742188],[17.3900146484375,18.867782592773438,8.88568115234375,6.826446533203125,0.0,15.142303466796875,18.856948852539062],[7.52349853515625,4.9005889892578125,12.587738037109375,12.537506103515625,15.142303466796875,0.0,13.145889282226562],[18.108139038085938,18.046478271484375,25.733627319335938,25.683395385742188,18.856948852539062,13.145889282226562,0.0]]}"#;
    let m = serde_json::from_str::<MatrixFile>(text).unwrap().into_space(&Validation::strict()).unwrap();
    let (ordered, _) = sl_alpha(&m, 1.0).unwrap();
    let (formal, trace) = run_almost_standard(&m, &BuiltinLinkage::Sl, &PAlpha::new(1.0).unwrap()).unwrap();
    let split = m.indices_of(&["x0", "x1", "x5"]).unwrap();
    let other = m.indices_of(&["x2", "x3", "x4"]).unwrap();
    assert_eq!(trace.levels(), vec![4.1376953125, 4.3460235595703125, 4.9005889892578125, 6.826446533203125, 10.773651123046875, 13.145889282226562]);
    assert!(!PAlpha::new(1.0).unwrap().satisfied(&split, &other, 10.773651123046875, &m).unwrap());
    assert!(PAlpha::new(1.0).unwrap().satisfied(&split, &other, 12.251419067382812, &m).unwrap());
    assert_eq!(ordered.partition_at(12.251419067382812).len(), 2);
    assert_eq!(formal.partition_at(12.251419067382812).len(), 3);
    assert_eq!(ordered.partition_at(13.145889282226562), formal.partition_at(13.145889282226562));
}

