use aflab::balance::{
    cycle_balanced, even_cycle_rep, is_balanced, lift_configuration, lift_message, quiescence_exact, terminates_oracle, BalanceChecker, BalanceError,
    Witness,
};
use aflab::engine::{run, single, Configuration};
use aflab::graph::{enumerate_cycles, enumerate_fecs, Cycle, Gadget, Graph, Msg};
use proptest::prelude::*;

fn cfg(ms: &[Msg]) -> Configuration {
    ms.iter().copied().collect()
}

fn gadget(s: &str) -> Graph {
    s.parse::<Gadget>().unwrap().build().unwrap()
}

#[test]
fn unrolled_lengths() {
    // 2(x + y + z + 1): both cycles, both endpoint copies, two connector copies
    let f = &enumerate_fecs(&gadget("fec:1,2,1"))[0];
    assert_eq!(even_cycle_rep(f).len(), 10);
    for (x, y, z) in [(1, 1, 1), (2, 3, 1), (1, 0, 2), (2, 0, 2)] {
        let f = &enumerate_fecs(&gadget(&format!("fec:{x},{y},{z}")))[0];
        assert_eq!(even_cycle_rep(f).len(), 2 * (x + y + z + 1), "fec({x},{y},{z})");
    }
    let bowtie = &enumerate_fecs(&gadget("fec:1,0,1"))[0];
    assert_eq!(even_cycle_rep(bowtie).len(), 6);
}

#[test]
fn lifting() {
    let f = &enumerate_fecs(&gadget("fec:1,2,1"))[0];
    assert!(lift_configuration(f, &cfg(&[])).is_empty());
    let (a0, a2) = (f.a[0], f.a[2]);
    assert_eq!(lift_message(f, (a2, a0)), vec![((a2, 0), (a0, 1))]);

    let f3 = &enumerate_fecs(&gadget("fec:1,3,1"))[0];
    let (b1, b2) = (f3.path[1], f3.path[2]);
    assert_eq!(lift_message(f3, (b1, b2)), vec![((b1, 0), (b2, 0)), ((b1, 1), (b2, 1))]);
    // messages off the FEC are dropped
    let mut edges = gadget("fec:1,3,1").edges();
    edges.push((f3.a[1], 99));
    let g = Graph::from_edges(&edges).unwrap();
    let f = enumerate_fecs(&g).into_iter().find(|f| f.y == 3).unwrap();
    assert!(lift_configuration(&f, &cfg(&[(f3.a[1], 99), (99, f3.a[1])])).is_empty());
}

#[test]
fn cycle_balance_examples() {
    let tri = Cycle::canonical(&[0, 1, 2]);
    assert!(!cycle_balanced(&tri, &cfg(&[(0, 1)])));
    let sq = Cycle::canonical(&[0, 1, 2, 3]);
    assert!(cycle_balanced(&sq, &cfg(&[(0, 1), (2, 1)])));
    assert!(cycle_balanced(&sq, &cfg(&[])));
    assert!(cycle_balanced(&tri, &cfg(&[])));
}

#[test]
fn balance_examples() {
    let tree = gadget("path:5");
    for m in tree.all_messages() {
        assert!(is_balanced(&tree, &cfg(&[m])).unwrap().balanced);
    }
    let sq = gadget("cycle:4");
    let v = is_balanced(&sq, &cfg(&[(0, 1), (2, 3)])).unwrap();
    assert!(!v.balanced);
    assert!(matches!(v.witness, Some(Witness::Cycle { .. })));
    let c5 = gadget("cycle:5");
    let round2 = run(&c5, &single(0), 10).unwrap().rounds[1].clone();
    assert!(is_balanced(&c5, &round2).unwrap().balanced);
    assert!(is_balanced(&sq, &cfg(&[(0, 2)])).is_err());
}

#[test]
fn oracle_examples() {
    let tri = gadget("cycle:3");
    assert!(terminates_oracle(&tri, &cfg(&[])).unwrap());
    assert!(!terminates_oracle(&tri, &cfg(&[(0, 1)])).unwrap());
    let g = gadget("fec:1,1,1");
    for &v in g.vertices() {
        let round1 = run(&g, &single(v), 1).unwrap().rounds[0].clone();
        assert!(terminates_oracle(&g, &round1).unwrap());
        assert!(is_balanced(&g, &round1).unwrap().balanced);
    }
}

#[test]
fn fec_witness_on_bowtie() {
    // each triangle balanced, the pair not: one message per triangle, both
    // pointing into the shared vertex 0 from the same side parity
    let g = gadget("fec:1,0,1");
    let checker = BalanceChecker::new(&g).unwrap();
    let mut found = false;
    for a in g.all_messages() {
        for b in g.all_messages() {
            let s = cfg(&[a, b]);
            let v = checker.check(&s).unwrap();
            let cycles_ok = enumerate_cycles(&g, g.n()).iter().all(|c| cycle_balanced(c, &s));
            if cycles_ok && !v.balanced {
                assert!(matches!(v.witness, Some(Witness::Fec { .. })));
                assert!(!terminates_oracle(&g, &s).unwrap());
                found = true;
            }
        }
    }
    assert!(found, "some configuration is cycle-balanced yet FEC-imbalanced");
}

#[test]
fn enumeration_bound() {
    let big = gadget("cycle:13");
    assert!(matches!(is_balanced(&big, &cfg(&[])), Err(BalanceError::TooLarge { n: 13, .. })));
    assert!(terminates_oracle(&big, &cfg(&[])).unwrap());
}

fn arb_case() -> impl Strategy<Value = (Graph, Configuration)> {
    (2usize..=6, any::<u64>(), any::<u64>()).prop_map(|(n, seed, bits)| {
        let g = Gadget::RandomConnected { n, p: 0.5, seed }.build().unwrap();
        let s = g.all_messages().into_iter().enumerate().filter(|(i, _)| bits >> (i % 64) & 1 == 1).map(|(_, m)| m).collect();
        (g, s)
    })
}

proptest! {
    #[test]
    fn checker_equals_definition_and_oracle((g, s) in arb_case()) {
        let checker = BalanceChecker::new(&g).unwrap();
        let fast = checker.balanced_mask(checker.table.mask_of(&s).unwrap());
        let literal = checker.structures().check(&s).balanced;
        prop_assert_eq!(fast, literal);
        prop_assert_eq!(fast, terminates_oracle(&g, &s).unwrap());
        prop_assert_eq!(fast, quiescence_exact(&g, &s).unwrap().is_some());
    }

    #[test]
    fn witnesses_are_imbalanced_restrictions((g, s) in arb_case()) {
        let v = is_balanced(&g, &s).unwrap();
        match v.witness {
            None => prop_assert!(v.balanced),
            Some(Witness::Cycle { cycle, restriction }) => {
                prop_assert!(!cycle_balanced(&cycle, &restriction.into_iter().collect()));
            }
            Some(Witness::Fec { fec, restriction }) => {
                prop_assert!(!aflab::balance::fec_balanced(&fec, &restriction.into_iter().collect()));
            }
        }
    }

    #[test]
    fn reachable_configurations_are_balanced(n in 2usize..=6, seed in any::<u64>(), src in 0u32..6, k in 1usize..12) {
        let g = Gadget::RandomConnected { n, p: 0.5, seed }.build().unwrap();
        let v = src % n as u32;
        let t = run(&g, &single(v), k).unwrap();
        if let Some(s) = t.rounds.last() {
            prop_assert!(is_balanced(&g, s).unwrap().balanced);
        }
    }
}
