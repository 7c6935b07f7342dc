use std::collections::BTreeSet;

use aflab::engine::export::{round_records, summarize, to_jsonl};
use aflab::engine::{
    af_step, default_cap, empties_within, find_recurrent_message, history_length, reconstruct_history, reverse, run, single, sinks, step_back, ArcTable,
    Configuration, EngineError, VertexSet,
};
use aflab::graph::{connected_graphs, generate, Gadget, Graph, Msg};
use proptest::prelude::*;

fn cfg(ms: &[Msg]) -> Configuration {
    ms.iter().copied().collect()
}

fn none() -> VertexSet {
    VertexSet::new()
}

fn c(n: usize) -> Graph {
    generate("cycle", &[n as f64]).unwrap()
}

fn p(n: usize) -> Graph {
    generate("path", &[n as f64]).unwrap()
}

#[test]
fn step_definition() {
    let g = c(3);
    assert_eq!(af_step(&g, &cfg(&[]), &none()).unwrap(), cfg(&[]));
    assert_eq!(af_step(&g, &cfg(&[]), &VertexSet::from([0])).unwrap(), cfg(&[(0, 1), (0, 2)]));
    assert_eq!(af_step(&g, &cfg(&[(0, 1), (0, 2)]), &none()).unwrap(), cfg(&[(1, 2), (2, 1)]));
    assert_eq!(af_step(&c(4), &cfg(&[(0, 2)]), &none()), Err(EngineError::NoEdge(0, 2)));
    assert_eq!(af_step(&g, &cfg(&[]), &VertexSet::from([9])), Err(EngineError::UnknownVertex(9)));
}

#[test]
fn triangle_run() {
    let t = run(&c(3), &single(0), 100).unwrap();
    assert_eq!(t.rounds[..3], [cfg(&[(0, 1), (0, 2)]), cfg(&[(1, 2), (2, 1)]), cfg(&[(1, 0), (2, 0)])]);
    assert_eq!(t.terminated_at, Some(4));
    assert_eq!(t.sending_rounds(), 3);
    assert!(t.broadcast);
}

#[test]
fn edge_run() {
    let t = run(&p(2), &single(0), 100).unwrap();
    assert_eq!(t.rounds[0], cfg(&[(0, 1)]));
    assert_eq!(t.round(2), Some(&cfg(&[])));
    assert_eq!(t.terminated_at, Some(2));
    assert_eq!(t.informed.keys().copied().collect::<Vec<_>>(), vec![0, 1]);
}

#[test]
fn single_sources_on_the_atlas_finish_by_two_diameters() {
    for n in 2..=6 {
        for g in connected_graphs(n) {
            let d = g.diameter();
            for &v in g.vertices() {
                let t = run(&g, &single(v), 2 * d + 2).unwrap();
                assert!(t.terminated() && t.broadcast, "{:?} from {v}", g.edges());
                assert!(t.sending_rounds() <= 2 * d + 1);
            }
        }
    }
}

#[test]
fn reversal_and_sinks() {
    assert_eq!(reverse(&cfg(&[])), cfg(&[]));
    assert_eq!(reverse(&cfg(&[(0, 1)])), cfg(&[(1, 0)]));
    assert_eq!(sinks(&p(2), &cfg(&[(1, 0)])), VertexSet::from([0]));
    assert_eq!(sinks(&c(3), &cfg(&[(1, 0), (2, 0)])), VertexSet::from([0]));
    assert_eq!(sinks(&c(5), &cfg(&[])), none());
}

#[test]
fn stepping_back() {
    let g = p(2);
    let (prev, init) = step_back(&g, &cfg(&[(0, 1)])).unwrap();
    assert_eq!((prev.clone(), init.clone()), (cfg(&[]), VertexSet::from([0])));
    assert_eq!(af_step(&g, &prev, &init).unwrap(), cfg(&[(0, 1)]));
    assert_eq!(step_back(&c(4), &cfg(&[])).unwrap(), (cfg(&[]), none()));
}

#[test]
fn history_reconstruction() {
    assert_eq!(reconstruct_history(&c(4), &cfg(&[]), 1).unwrap(), vec![none()]);
    let g = c(4);
    let round2 = run(&g, &single(0), 10).unwrap().rounds[1].clone();
    assert_eq!(reconstruct_history(&g, &round2, 2).unwrap(), vec![VertexSet::from([0]), none()]);
    assert_eq!(history_length(&g, &round2, 10).unwrap(), Some(2));
    match reconstruct_history(&c(3), &cfg(&[(0, 1)]), 3) {
        Err(EngineError::ReconstructionIncomplete { k: 3, residual }) => assert!(!residual.is_empty()),
        other => panic!("{other:?}"),
    }
    assert_eq!(reconstruct_history(&g, &cfg(&[]), 0), Err(EngineError::BadCap));
}

#[test]
fn recurrent_messages() {
    let g = c(3);
    let path = find_recurrent_message(&g, &cfg(&[(0, 1)]), 2 * g.m()).unwrap().expect("lone message circulates");
    assert_eq!(path.walk, vec![0, 1, 2, 0, 1]);
    assert_eq!(path.repeated, (0, 1));
    assert_eq!(find_recurrent_message(&g, &cfg(&[(0, 1), (0, 2)]), 2 * g.m()).unwrap(), None);
    assert_eq!(find_recurrent_message(&g, &cfg(&[]), 6).unwrap(), None);
}

#[test]
fn records_and_summary() {
    let g = c(5);
    let t = run(&g, &single(0), default_cap(&g, &single(0))).unwrap();
    let recs = round_records(&t);
    assert_eq!(recs.len(), t.rounds.len());
    assert_eq!(recs[0].sent, vec![[0, 1], [0, 4]]);
    assert_eq!(recs[0].informed, vec![0, 1, 4]);
    assert_eq!(to_jsonl(&t).lines().count(), recs.len());
    let s = summarize(&g, &t);
    assert_eq!((s.terminated_at, s.broadcast_round, s.informed), (Some(6), Some(2), 5));
}

fn arb_case() -> impl Strategy<Value = (Graph, Configuration)> {
    (2usize..=7, any::<u64>(), any::<u128>()).prop_map(|(n, seed, bits)| {
        let g = Gadget::RandomConnected { n, p: 0.5, seed }.build().unwrap();
        let s = g.all_messages().into_iter().enumerate().filter(|(i, _)| bits >> i & 1 == 1).map(|(_, m)| m).collect();
        (g, s)
    })
}

proptest! {
    #[test]
    fn double_reversal_is_identity((_g, s) in arb_case()) {
        prop_assert_eq!(reverse(&reverse(&s)), s);
    }

    #[test]
    fn replaying_a_step_back_restores((g, s) in arb_case()) {
        let (prev, init) = step_back(&g, &s).unwrap();
        prop_assert_eq!(af_step(&g, &prev, &init).unwrap(), s);
    }

    #[test]
    fn bitmask_step_matches_set_step((g, s) in arb_case(), init_bits in any::<u8>()) {
        let t = ArcTable::new(&g).unwrap();
        let init: VertexSet = g.vertices().iter().copied().filter(|&v| init_bits >> v & 1 == 1).collect();
        let m = t.mask_of(&s).unwrap();
        let im = t.vmask_of(init.iter().copied()).unwrap();
        prop_assert_eq!(t.config_of(t.step(m, im)), af_step(&g, &s, &init).unwrap());
        prop_assert_eq!(t.config_of(t.reverse(m)), reverse(&s));
        prop_assert_eq!(t.empties_within(m, 2 * g.m()), empties_within(&g, &s, 2 * g.m()).unwrap());
    }

    #[test]
    fn informed_rounds_follow_distances(n in 2usize..=7, seed in any::<u64>()) {
        let g = Gadget::RandomConnected { n, p: 0.5, seed }.build().unwrap();
        let v = g.vertices()[0];
        let t = run(&g, &single(v), default_cap(&g, &single(v))).unwrap();
        // a vertex at distance d first holds the message in round d
        for (u, d) in g.distances(v) {
            if u != v {
                prop_assert_eq!(t.informed[&u], d);
            }
        }
        let seen: BTreeSet<_> = t.informed.keys().copied().collect();
        prop_assert_eq!(seen.len(), g.n());
    }
}
