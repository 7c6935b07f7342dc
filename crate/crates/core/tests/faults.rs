use std::collections::BTreeMap;

use aflab::engine::{single, Configuration, VertexSet};
use aflab::faults::{
    bad_source, byzantine_capability, classify_drop, exhaustive_byzantine, fault_cap, find_breaking_edge, mixed_cycle_check, run_with_fault, BlockRecipe,
    Certificate, FaultError, FaultSpec, Occurrence, Recipe, Termination,
};
use aflab::graph::{connected_graphs, enumerate_fecs, Gadget, Graph, Msg};
use proptest::prelude::*;

fn cfg(ms: &[Msg]) -> Configuration {
    ms.iter().copied().collect()
}

fn gadget(s: &str) -> Graph {
    s.parse::<Gadget>().unwrap().build().unwrap()
}

fn drop(messages: &[Msg], round: usize) -> FaultSpec {
    FaultSpec::Drop { messages: messages.to_vec(), round }
}

fn set(vs: &[u32]) -> VertexSet {
    vs.iter().copied().collect()
}

#[test]
fn drop_on_a_square_loops() {
    let g = gadget("cycle:4");
    let (_, v) = run_with_fault(&g, &single(0), &drop(&[(0, 1)], 1), 40).unwrap();
    assert!(!v.terminated);
    assert!(matches!(v.termination, Termination::NonTerminating { certificate: Certificate::Imbalance { .. } }));
    assert!(v.broadcast_ok);
    assert_eq!(v.first_violation_round, Some(1));
}

#[test]
fn bridge_drop_cuts_off_the_far_side() {
    let g = gadget("path:3");
    let (t, v) = run_with_fault(&g, &single(0), &drop(&[(1, 2)], 2), 20).unwrap();
    assert!(v.terminated && !v.broadcast_ok);
    assert_eq!(v.uninformed, vec![2]);
    assert!(!t.informed.contains_key(&2));
}

#[test]
fn odd_cycle_reactivates_the_bridge() {
    let g = gadget("paw");
    let (_, v) = run_with_fault(&g, &single(0), &drop(&[(2, 3)], 2), 30).unwrap();
    assert!(v.broadcast_ok && v.terminated);
    assert!(!v.is_bad());
}

#[test]
fn late_drop_is_a_no_op() {
    let g = gadget("path:3");
    let (_, v) = run_with_fault(&g, &single(0), &drop(&[(1, 2)], 9), 20).unwrap();
    assert!(v.no_op && v.terminated && v.broadcast_ok);
    assert_eq!(v.first_violation_round, None);
}

#[test]
fn fault_errors() {
    let g = gadget("cycle:4");
    assert_eq!(run_with_fault(&g, &single(0), &drop(&[(0, 1)], 0), 20).unwrap_err(), FaultError::BadRound);
    assert_eq!(run_with_fault(&g, &single(0), &drop(&[(1, 0)], 1), 20).unwrap_err(), FaultError::NotSent(1, 0, 1));
    let byz = |vertices: Vec<u32>, horizon, strategy| FaultSpec::Byzantine { vertices, horizon, strategy };
    assert!(matches!(run_with_fault(&g, &single(0), &byz(vec![1], 1, BTreeMap::new()), 20), Err(FaultError::ShortHorizon { .. })));
    assert_eq!(run_with_fault(&g, &single(0), &byz(vec![0], 4, BTreeMap::new()), 20).unwrap_err(), FaultError::ByzantineInitiator(0));
    let bad_target = BTreeMap::from([(2, BTreeMap::from([(1, vec![3])]))]);
    assert_eq!(run_with_fault(&g, &single(0), &byz(vec![1], 4, bad_target), 20).unwrap_err(), FaultError::BadTarget(1, 3));
}

#[test]
fn drop_predictions() {
    let sq = gadget("cycle:4");
    for m in sq.all_messages() {
        if let Ok(p) = classify_drop(&sq, 0, m, Occurrence::First) {
            assert!(p.non_termination, "{m:?}");
        }
    }
    let p3 = gadget("path:3");
    let p = classify_drop(&p3, 0, (1, 2), Occurrence::First).unwrap();
    assert!(p.non_broadcast && !p.non_termination && p.first_use_of_edge);
    assert!(matches!(classify_drop(&p3, 0, (2, 1), Occurrence::First), Err(FaultError::Inapplicable(_))));

    let fec = gadget("fec:1,2,1");
    let f = &enumerate_fecs(&fec)[0];
    for (u, v) in f.path_edges() {
        for (a, b) in [(u, v), (v, u)] {
            for &src in fec.vertices() {
                if let Ok(p) = classify_drop(&fec, src, (a, b), Occurrence::First) {
                    assert!(p.non_termination);
                }
            }
        }
    }
}

#[test]
fn breaking_edges() {
    let tree = gadget("path:4");
    for &src in tree.vertices() {
        let b = find_breaking_edge(&tree, &set(&[src])).unwrap();
        assert_eq!(b.recipe, Recipe::Bridge);
        assert!(!b.verdict.broadcast_ok);
    }
    let tri = gadget("cycle:3");
    let b = find_breaking_edge(&tri, &set(&[0])).unwrap();
    assert!(!b.verdict.terminated && b.verdict.is_bad());
    assert!(matches!(find_breaking_edge(&tri, &set(&[])), Err(FaultError::EmptySchedule)));
}

#[test]
fn mixed_cycles() {
    let tri = gadget("cycle:3");
    assert!(mixed_cycle_check(&tri, &[(2, 1)], &cfg(&[(1, 2)])));
    assert!(!mixed_cycle_check(&tri, &[(2, 1)], &cfg(&[(2, 1)])));
    assert!(!mixed_cycle_check(&tri, &[(2, 1)], &cfg(&[])));
    let sq = gadget("cycle:4");
    assert!(!mixed_cycle_check(&sq, &[], &cfg(&[(0, 1)])));
}

#[test]
fn every_failure_has_a_bad_source() {
    for g in connected_graphs(4) {
        for m in g.all_messages() {
            assert!(bad_source(&g, &[m]).unwrap().is_some(), "{:?} failing {m:?}", g.edges());
        }
    }
}

#[test]
fn byzantine_examples() {
    let p3 = gadget("path:3");
    let c = byzantine_capability(&p3, &set(&[0]), &set(&[1]), None).unwrap();
    assert!(c.can_block_broadcast && !c.can_block_termination && c.validated);
    assert_eq!(c.broadcast_recipe, Some(BlockRecipe::Silence));

    let tri = gadget("cycle:3");
    let c = byzantine_capability(&tri, &set(&[0]), &set(&[1]), None).unwrap();
    assert!(!c.can_block_broadcast && c.can_block_termination && c.validated);
    let FaultSpec::Byzantine { .. } = c.termination_strategy.clone().unwrap() else { panic!() };
    let (_, v) = run_with_fault(&tri, &single(0), c.termination_strategy.as_ref().unwrap(), 40).unwrap();
    assert!(!v.terminated);

    for g in [gadget("paw"), gadget("cycle:5"), gadget("star:3")] {
        let c = byzantine_capability(&g, &set(&[0]), &set(&[]), None).unwrap();
        assert!(!c.can_block_broadcast && !c.can_block_termination);
    }
}

#[test]
fn byzantine_search_agrees_on_small_graphs() {
    for g in [gadget("path:3"), gadget("cycle:3"), gadget("paw"), gadget("cycle:4")] {
        let h = 2 * g.diameter();
        for j in [set(&[1]), set(&[2]), set(&[1, 2])] {
            let c = byzantine_capability(&g, &set(&[0]), &j, Some(h)).unwrap();
            let e = exhaustive_byzantine(&g, &set(&[0]), &j, h).unwrap();
            assert_eq!((c.can_block_broadcast, c.can_block_termination), (e.can_block_broadcast, e.can_block_termination), "{:?} J={j:?}", g.edges());
        }
    }
}

#[test]
fn fault_specs_serialise_with_a_type_tag() {
    let f = drop(&[(1, 2)], 2);
    let j = serde_json::to_value(&f).unwrap();
    assert_eq!(j["type"], "drop");
    assert_eq!(serde_json::from_value::<FaultSpec>(j).unwrap(), f);
    let u = FaultSpec::Unidirectional { arcs: vec![(2, 1)] };
    assert_eq!(serde_json::to_value(&u).unwrap()["type"], "unidirectional");
}

#[test]
fn caps_cover_the_fault() {
    let g = gadget("cycle:4");
    assert_eq!(fault_cap(&g, &single(0), &drop(&[(0, 1)], 1)), 4 * 4 + 2);
    assert_eq!(fault_cap(&g, &single(0), &drop(&[(0, 1)], 30)), 31);
}

proptest! {
    #[test]
    fn verdicts_are_internally_consistent(n in 3usize..=6, seed in any::<u64>(), pick in any::<usize>(), src in 0u32..6) {
        let g = Gadget::RandomConnected { n, p: 0.5, seed }.build().unwrap();
        let src = src % n as u32;
        let arcs = g.all_messages();
        let a = arcs[pick % arcs.len()];
        let fault = FaultSpec::Unidirectional { arcs: vec![a] };
        let (t, v) = run_with_fault(&g, &single(src), &fault, fault_cap(&g, &single(src), &fault)).unwrap();
        prop_assert_eq!(v.terminated, matches!(v.termination, Termination::Terminated { .. }));
        prop_assert_eq!(v.broadcast_ok, v.uninformed.is_empty());
        for x in &v.uninformed {
            prop_assert!(!t.informed.contains_key(x));
        }
        // no message ever crosses the failed direction
        prop_assert!(t.rounds.iter().all(|s| !s.contains(&a)));
    }
}
