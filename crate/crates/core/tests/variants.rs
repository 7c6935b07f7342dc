use aflab::engine::{run, single, Configuration, VertexSet};
use aflab::graph::{connected_graphs, Gadget, Graph, Msg};
use aflab::variants::{
    enumerate_leaf_paths, is_p_balanced, is_p_balanced_bounded, parrot_cap, parrot_quiesces_within, parrot_step, random_cap, run_variant, PBalanceChecker,
    Protocol, RandomMode, RandomSource, Runner, VariantError, VariantTable,
};
use proptest::prelude::*;

fn cfg(ms: &[Msg]) -> Configuration {
    ms.iter().copied().collect()
}

fn gadget(s: &str) -> Graph {
    s.parse::<Gadget>().unwrap().build().unwrap()
}

#[test]
fn protocol_names_roundtrip() {
    for p in [Protocol::Af, Protocol::Parrot, Protocol::OneBit, Protocol::Neighbourhood2, Protocol::Random] {
        assert_eq!(p.to_string().parse::<Protocol>().unwrap(), p);
    }
    assert!(matches!("gossip".parse::<Protocol>(), Err(VariantError::UnknownProtocol(_))));
}

#[test]
fn parrot_steps() {
    let p2 = gadget("path:2");
    assert_eq!(parrot_step(&p2, &cfg(&[(0, 1)]), &VertexSet::new()).unwrap(), cfg(&[(1, 0)]));
    assert_eq!(parrot_step(&p2, &cfg(&[]), &VertexSet::new()).unwrap(), cfg(&[]));

    let star = gadget("star:3");
    let r1 = parrot_step(&star, &cfg(&[]), &VertexSet::from([0])).unwrap();
    assert_eq!(r1, cfg(&[(0, 1), (0, 2), (0, 3)]));
    let r2 = parrot_step(&star, &r1, &VertexSet::new()).unwrap();
    assert_eq!(r2, cfg(&[(1, 0), (2, 0), (3, 0)]));
    assert_eq!(parrot_step(&star, &r2, &VertexSet::new()).unwrap(), cfg(&[]));
}

#[test]
fn leaf_paths() {
    // the through path plus the two three-vertex bounces
    let p3: Vec<_> = enumerate_leaf_paths(&gadget("path:3"), 6).into_iter().map(|p| p.walk).collect();
    assert_eq!(p3, vec![vec![0, 1, 0], vec![0, 1, 2], vec![2, 1, 2]]);
    assert!(enumerate_leaf_paths(&gadget("cycle:5"), 10).is_empty());
    let paw = enumerate_leaf_paths(&gadget("paw"), 8);
    let walks: Vec<_> = paw.iter().map(|p| p.walk.clone()).collect();
    assert!(walks.contains(&vec![3, 2, 0, 1, 2, 3]) || walks.contains(&vec![3, 2, 1, 0, 2, 3]), "{walks:?}");
    for w in &walks {
        assert_eq!((w[0], *w.last().unwrap()), (3, 3));
    }
}

#[test]
fn p_balance_examples() {
    assert!(is_p_balanced(&gadget("paw"), &cfg(&[])).unwrap());
    let p3 = gadget("path:3");
    let s = cfg(&[(1, 0), (1, 2)]);
    assert!(is_p_balanced(&p3, &s).unwrap());
    assert!(parrot_quiesces_within(&p3, &s, parrot_cap(&p3)).unwrap().is_some());
    let p2 = gadget("path:2");
    assert!(!is_p_balanced(&p2, &cfg(&[(0, 1)])).unwrap());
    assert!(parrot_quiesces_within(&p2, &cfg(&[(0, 1)]), parrot_cap(&p2)).unwrap().is_none());
}

#[test]
fn neighbourhood2_on_a_star() {
    let star = gadget("star:4");
    let t = run_variant(Protocol::Neighbourhood2, &star, 0, None, 20).unwrap();
    assert_eq!(t.rounds[0], cfg(&[(0, 1), (0, 2), (0, 3), (0, 4)]));
    assert_eq!(t.terminated_at, Some(2));
    assert!(t.broadcast);
}

#[test]
fn one_bit_from_a_leaf_is_flooding() {
    let star = gadget("star:4");
    for leaf in 1..=4 {
        let ob = run_variant(Protocol::OneBit, &star, leaf, None, 20).unwrap();
        let af = run(&star, &single(leaf), 20).unwrap();
        assert_eq!(ob.rounds, af.rounds);
    }
}

#[test]
fn random_flooding_on_a_triangle() {
    let g = gadget("cycle:3");
    assert_eq!(random_cap(&g, RandomMode::Shared), 10 * (1 + 1) * 64);
    assert_eq!(random_cap(&g, RandomMode::PerNode), (10 * (1 + 1) * 64) << 2);
    let cap = random_cap(&g, RandomMode::Shared);
    let mut done = 0;
    for seed in 0..1000 {
        let mut rng = RandomSource::new(seed, RandomMode::PerNode);
        let t = run_variant(Protocol::Random, &g, 0, Some(&mut rng), cap).unwrap();
        for (v, d) in g.distances(0) {
            assert!(t.informed[&v] <= d + 1);
        }
        done += t.terminated() as u32;
    }
    assert!(done >= 999, "{done}/1000");
}

#[test]
fn random_needs_a_source() {
    assert!(matches!(Runner::new(Protocol::Random, &gadget("path:2"), 0, None), Err(VariantError::MissingRng)));
}

#[test]
fn seeded_randomness_is_reproducible() {
    let g = gadget("complete:4");
    let run_once = |seed| {
        let mut rng = RandomSource::new(seed, RandomMode::Shared);
        run_variant(Protocol::Random, &g, 0, Some(&mut rng), 200).unwrap()
    };
    assert_eq!(run_once(5), run_once(5));
}

#[test]
fn parrot_from_non_leaves_terminates() {
    for n in 2..=6 {
        for g in connected_graphs(n) {
            for &v in g.vertices().iter().filter(|&&v| g.degree(v) >= 2) {
                let s = Runner::new(Protocol::Parrot, &g, v, None).unwrap().summary(parrot_cap(&g));
                assert!(s.terminated_at.is_some() && s.broadcast_round.is_some(), "{:?} from {v}", g.edges());
            }
        }
    }
}

fn leafed() -> impl Strategy<Value = Graph> {
    (3usize..=6, any::<u64>()).prop_map(|(n, seed)| {
        // random connected graph with a pendant vertex attached
        let g = Gadget::RandomConnected { n, p: 0.5, seed }.build().unwrap();
        let mut e = g.edges();
        e.push((0, n as u32));
        Graph::from_edges(&e).unwrap()
    })
}

proptest! {
    #[test]
    fn p_balance_checker_matches_paths_and_simulation(g in leafed(), bits in any::<u64>()) {
        let arcs = g.all_messages();
        let s: Configuration = arcs.iter().enumerate().filter(|(i, _)| bits >> (i % 64) & 1 == 1).map(|(_, &m)| m).take(3).collect();
        let fast = PBalanceChecker::new(&g).unwrap().check(&s).unwrap();
        prop_assert_eq!(fast, parrot_quiesces_within(&g, &s, parrot_cap(&g)).unwrap().is_some());
        if g.m() <= 6 && s.len() <= 2 {
            prop_assert_eq!(fast, is_p_balanced_bounded(&g, &s, 2 * g.m()).unwrap());
        }
    }

    #[test]
    fn bitmask_parrot_matches_set_parrot(g in leafed(), bits in any::<u64>()) {
        let vt = VariantTable::new(&g).unwrap();
        let s: Configuration = g.all_messages().into_iter().enumerate().filter(|(i, _)| bits >> (i % 64) & 1 == 1).map(|(_, m)| m).collect();
        let m = vt.table.mask_of(&s).unwrap();
        prop_assert_eq!(vt.table.config_of(vt.parrot(m)), parrot_step(&g, &s, &VertexSet::new()).unwrap());
    }
}
