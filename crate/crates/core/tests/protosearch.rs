use aflab::engine::{run, single};
use aflab::graph::{generate, Gadget, Graph};
use aflab::protosearch::{
    af_table, check_protocol, exhaustive_search, forbidden_digraph_check, labelled_suite, labellings, necessary_conditions, set_of, simulate_protocol,
    Failure, Key, LabelledCase, ProtoError, ProtocolTable, SearchProfile,
};
use proptest::prelude::*;

fn gadget(s: &str) -> Graph {
    s.parse::<Gadget>().unwrap().build().unwrap()
}

#[test]
fn flooding_table_entries() {
    let t = af_table(8, 2).unwrap();
    assert_eq!(t.f(5, &[1, 2], &[1]), Some(set_of(&[2])));
    assert_eq!(t.f(5, &[1, 2], &[]), Some(0));
    assert_eq!(t.b(3, &[7]), Some(set_of(&[7])));
    assert!(matches!(af_table(9, 2), Err(ProtoError::Universe(9))));
    assert!(matches!(af_table(4, 0), Err(ProtoError::DegreeBound)));
}

#[test]
fn flooding_table_reproduces_the_engine() {
    let t = af_table(6, 3).unwrap();
    for g in [gadget("paw"), gadget("cycle:5"), gadget("star:3"), gadget("diamond")] {
        for l in labellings(&g, 6).into_iter().take(20) {
            for &v in g.vertices() {
                let a = simulate_protocol(&t, &g, &l, v, 50).unwrap();
                let b = run(&g, &single(v), 50).unwrap();
                assert_eq!(a.rounds, b.rounds);
                assert_eq!(a.terminated_at, b.terminated_at);
            }
        }
    }
}

#[test]
fn leaf_echo_ping_pongs() {
    let mut t = af_table(2, 1).unwrap();
    t.set(Key::f(1, &[0], &[0]), set_of(&[0])).unwrap();
    t.set(Key::f(0, &[1], &[1]), set_of(&[1])).unwrap();
    let g = generate("path", &[2.0]).unwrap();
    let l = [(0, 0), (1, 1)].into_iter().collect();
    let tr = simulate_protocol(&t, &g, &l, 0, 40).unwrap();
    assert!(!tr.terminated());
    let r = check_protocol(&t, &labelled_suite(&[g], 2), 40).unwrap();
    assert!(!r.terminating);
    assert_eq!(r.counterexample.unwrap().failure, Failure::Repeats);
}

#[test]
fn silent_initiator_informs_nobody() {
    let t = ProtocolTable::from_fn(4, 2, |k| if k.is_initial() { 0 } else { k.neighbours & !k.received }).unwrap();
    for g in [generate("path", &[2.0]).unwrap(), generate("path", &[4.0]).unwrap(), generate("cycle", &[4.0]).unwrap()] {
        let r = check_protocol(&t, &labelled_suite(&[g], 4), 20).unwrap();
        assert!(!r.correct);
        assert_eq!(r.counterexample.unwrap().failure, Failure::Uninformed);
    }
}

#[test]
fn flooding_passes_small_paths_cycles_and_stars() {
    let mut graphs: Vec<Graph> = (2..=6).map(|n| generate("path", &[n as f64]).unwrap()).collect();
    graphs.extend((3..=6).map(|n| generate("cycle", &[n as f64]).unwrap()));
    graphs.extend((2..=5).map(|k| generate("star", &[k as f64]).unwrap()));
    let suite = labelled_suite(&graphs, 6);
    let r = check_protocol(&af_table(6, 5).unwrap(), &suite, 20).unwrap();
    assert!(r.correct && r.terminating, "{:?}", r.counterexample);
}

#[test]
fn turning_back_at_the_middle_breaks_correctness() {
    // the middle of P_3 answers its sender instead of forwarding
    let t = ProtocolTable::from_fn(3, 2, |k| if k.neighbours.count_ones() == 2 && k.received.count_ones() == 1 { k.received } else { k.neighbours & !k.received })
        .unwrap();
    let r = check_protocol(&t, &labelled_suite(&[generate("path", &[3.0]).unwrap()], 3), 20).unwrap();
    assert!(!r.correct);
}

#[test]
fn single_edge_survivors_echo_at_most_one_way() {
    let rep = exhaustive_search(&SearchProfile::single_edge()).unwrap();
    let survivors = rep.representative_survivors();
    assert!(!survivors.is_empty());
    for t in &survivors {
        let echoes = |a: u8, b: u8| t.f(a, &[b], &[b]) != Some(0);
        assert!(!(echoes(0, 1) && echoes(1, 0)));
        assert!(necessary_conditions(t).is_empty());
    }
    assert!(survivors.iter().any(|t| t.f(1, &[0], &[0]) == Some(set_of(&[0]))));
}

#[test]
fn three_path_survivors_go_quiet_when_hit_from_both_sides() {
    let rep = exhaustive_search(&SearchProfile::three_path()).unwrap();
    assert!(rep.survivor_count > 0);
    for t in rep.representative_survivors() {
        for v in 0..3u8 {
            let others: Vec<u8> = (0..3).filter(|&x| x != v).collect();
            if let Some(s) = t.f(v, &others, &others) {
                assert_eq!(s, 0, "vertex {v}");
            }
        }
    }
}

#[test]
fn facing_echo_triples_cannot_terminate() {
    let rep = exhaustive_search(&SearchProfile::facing_triples(true)).unwrap();
    assert_eq!(rep.survivor_count, 0);
}

#[test]
fn echo_digraph_patterns() {
    assert!(forbidden_digraph_check(&af_table(6, 2).unwrap()));
    let echo = |u| ProtocolTable::from_fn(u, 2, |k| k.neighbours).unwrap();
    assert!(!forbidden_digraph_check(&echo(6)));
    assert!(forbidden_digraph_check(&echo(5)));
}

#[test]
fn tables_serialise_canonically() {
    let t = af_table(3, 2).unwrap();
    let j = serde_json::to_string(&t).unwrap();
    let back: ProtocolTable = serde_json::from_str(&j).unwrap();
    assert_eq!(back, t);
    assert_eq!(serde_json::to_string(&back).unwrap(), j);
}

#[test]
fn simulation_errors() {
    let t = af_table(3, 2).unwrap();
    let g = generate("path", &[3.0]).unwrap();
    let l = [(0, 0), (1, 1), (2, 1)].into_iter().collect();
    assert!(matches!(simulate_protocol(&t, &g, &l, 0, 10), Err(ProtoError::NotInjective(1))));
    let l = [(0, 0), (1, 1)].into_iter().collect();
    assert!(matches!(simulate_protocol(&t, &g, &l, 0, 10), Err(ProtoError::Unlabelled(2))));
    let star = generate("star", &[3.0]).unwrap();
    let l = [(0, 0), (1, 1), (2, 2), (3, 3)].into_iter().collect();
    assert!(simulate_protocol(&af_table(4, 2).unwrap(), &star, &l, 0, 10).is_err());
    let l = [(0, 0), (1, 1), (2, 2)].into_iter().collect();
    assert!(matches!(simulate_protocol(&t, &g, &l, 0, 0), Err(ProtoError::BadCap)));
}

proptest! {
    #[test]
    fn flooding_table_matches_engine_on_random_graphs(n in 2usize..=6, seed in any::<u64>(), pick in any::<usize>(), src in 0u32..6) {
        let g = Gadget::RandomConnected { n, p: 0.5, seed }.build().unwrap();
        let ls = labellings(&g, 6);
        let l = &ls[pick % ls.len()];
        let v = src % n as u32;
        let t = af_table(6, 5).unwrap();
        prop_assert_eq!(simulate_protocol(&t, &g, l, v, 40).unwrap().rounds, run(&g, &single(v), 40).unwrap().rounds);
        let case = LabelledCase { graph: g.clone(), labelling: l.clone(), source: v };
        let r = check_protocol(&t, &[case], 40).unwrap();
        prop_assert!(r.correct && r.terminating);
    }
}
