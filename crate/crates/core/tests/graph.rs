use std::collections::BTreeSet;

use aflab::graph::io::{parse_any, parse_edge_list, parse_json, to_dot, to_edge_list, to_json};
use aflab::graph::{
    connected_graphs, enumerate_cycles, enumerate_fecs, generate, random_connected_sample, structural_query, Answer, Gadget, Graph, GraphError, Query,
};
use proptest::prelude::*;

fn edge_set(g: &Graph) -> BTreeSet<(u32, u32)> {
    g.edges().into_iter().collect()
}

#[test]
fn triangle() {
    let g = generate("cycle", &[3.0]).unwrap();
    assert_eq!(g.vertices(), &[0, 1, 2]);
    assert_eq!(edge_set(&g), BTreeSet::from([(0, 1), (0, 2), (1, 2)]));
}

#[test]
fn short_cycle_is_a_parameter_error() {
    assert!(matches!(generate("cycle", &[2.0]), Err(GraphError::Param(_))));
    assert!(matches!(generate("cycle", &[]), Err(GraphError::Param(_))));
    assert!(matches!(generate("cycle", &[3.5]), Err(GraphError::Param(_))));
    assert!(matches!("nosuch:3".parse::<Gadget>(), Err(GraphError::Param(_))));
}

#[test]
fn fec_gadget_shape() {
    let g = generate("fec", &[1.0, 2.0, 1.0]).unwrap();
    assert_eq!(g.n(), 7);
    // two triangles plus a two-edge connector
    assert_eq!(g.m(), 8);
    let fecs = enumerate_fecs(&g);
    assert_eq!(fecs.len(), 1);
    assert_eq!((fecs[0].x, fecs[0].y, fecs[0].z), (1, 2, 1));
}

#[test]
fn paw_shape() {
    let g = generate("paw", &[]).unwrap();
    assert_eq!(edge_set(&g), BTreeSet::from([(0, 1), (0, 2), (1, 2), (2, 3)]));
}

#[test]
fn gadget_specs_roundtrip() {
    for s in ["path:4", "cycle:5", "star:3", "complete:4", "complete_bipartite:2,3", "paw", "extended_paw:2", "fec:1,0,2", "diamond", "h_graph"] {
        let g: Gadget = s.parse().unwrap();
        assert_eq!(g.to_string(), s);
        let again: Gadget = g.to_string().parse().unwrap();
        assert_eq!(again, g);
        assert!(g.build().is_ok(), "{s}");
    }
}

#[test]
fn cycle_counts() {
    let tri = generate("cycle", &[3.0]).unwrap();
    assert_eq!(enumerate_cycles(&tri, 3).len(), 1);
    let k4 = generate("complete", &[4.0]).unwrap();
    let cycles = enumerate_cycles(&k4, 4);
    assert_eq!(cycles.len(), 7);
    assert_eq!(cycles.iter().filter(|c| c.len() == 3).count(), 4);
    assert_eq!(enumerate_cycles(&k4, 3).len(), 4);
    let tree = generate("path", &[6.0]).unwrap();
    assert!(enumerate_cycles(&tree, 6).is_empty());
}

#[test]
fn fec_counts() {
    let bip = generate("complete_bipartite", &[2.0, 3.0]).unwrap();
    assert!(enumerate_fecs(&bip).is_empty());
    let bowtie = generate("fec", &[1.0, 0.0, 1.0]).unwrap();
    assert_eq!(bowtie.n(), 5);
    let fecs = enumerate_fecs(&bowtie);
    assert_eq!(fecs.len(), 1);
    assert_eq!(fecs[0].y, 0);
}

#[test]
fn structural_queries() {
    let paw = generate("paw", &[]).unwrap();
    assert_eq!(structural_query(&paw, &Query::IsBridge { u: 2, v: 3 }).unwrap(), Answer::Bool(true));
    assert_eq!(structural_query(&paw, &Query::IsBridge { u: 0, v: 1 }).unwrap(), Answer::Bool(false));
    assert!(matches!(structural_query(&paw, &Query::IsBridge { u: 0, v: 3 }), Err(GraphError::NoEdge(0, 3))));

    let fec = generate("fec", &[1.0, 2.0, 1.0]).unwrap();
    let f = &enumerate_fecs(&fec)[0];
    for (u, v) in f.path_edges() {
        assert_eq!(structural_query(&fec, &Query::OnOddCyclePath { u, v }).unwrap(), Answer::Bool(true));
    }
    let (u, v) = (f.a[0], f.a[1]);
    assert_eq!(structural_query(&fec, &Query::OnOddCyclePath { u, v }).unwrap(), Answer::Bool(false));

    let p3 = generate("path", &[3.0]).unwrap();
    assert_eq!(structural_query(&p3, &Query::IsCutSet { vertices: vec![1] }).unwrap(), Answer::Bool(true));
    assert_eq!(structural_query(&p3, &Query::IsCutSet { vertices: vec![0] }).unwrap(), Answer::Bool(false));
    assert_eq!(structural_query(&p3, &Query::Diameter).unwrap(), Answer::Number(2));
    assert!(structural_query(&p3, &Query::IsCutSet { vertices: vec![7] }).is_err());
}

#[test]
fn atlas_counts() {
    // connected graphs up to isomorphism on 2..=7 vertices
    let expected = [1, 2, 6, 21, 112, 853];
    for (n, &k) in (2..=7).zip(expected.iter()) {
        assert_eq!(connected_graphs(n).len(), k, "n = {n}");
    }
}

#[test]
fn random_sample_is_seeded_and_connected() {
    let a = random_connected_sample(6, 10, 3);
    let b = random_connected_sample(6, 10, 3);
    assert_eq!(a, b);
    assert!(a.iter().all(|g| g.n() == 6));
}

#[test]
fn malformed_inputs() {
    assert!(matches!(parse_edge_list("0 1\n1 x\n"), Err(GraphError::Parse(_))));
    assert!(matches!(parse_edge_list("0 1\n2 3\n"), Err(GraphError::Disconnected)));
    assert!(matches!(parse_edge_list("0 1\n1 1\n"), Err(GraphError::SelfLoop(1))));
    assert!(parse_json("{\"vertices\": [0, 1], \"edges\": [[0, 2]]}").is_err());
    assert!(parse_json("{").is_err());
}

#[test]
fn dot_highlights_messages() {
    let g = generate("path", &[3.0]).unwrap();
    let d = to_dot(&g, "p", &[(0, 1)]);
    assert!(d.contains("0 -> 1") || d.contains("0->1"), "{d}");
}

fn arb_graph() -> impl Strategy<Value = Graph> {
    (2usize..=7, any::<u64>()).prop_map(|(n, seed)| Gadget::RandomConnected { n, p: 0.5, seed }.build().unwrap())
}

proptest! {
    #[test]
    fn serialisation_roundtrips(g in arb_graph()) {
        let e = parse_edge_list(&to_edge_list(&g)).unwrap();
        prop_assert_eq!(&e, &g);
        let j = parse_json(&to_json(&g)).unwrap();
        prop_assert_eq!(&j, &g);
        prop_assert_eq!(parse_any(&to_json(&g)).unwrap(), g.clone());
        prop_assert_eq!(to_edge_list(&e), to_edge_list(&g));
    }

    #[test]
    fn cycles_are_closed_simple_walks(g in arb_graph()) {
        for c in enumerate_cycles(&g, g.n()) {
            let vs = &c.vertices;
            prop_assert!(vs.len() >= 3);
            prop_assert_eq!(vs.iter().collect::<BTreeSet<_>>().len(), vs.len());
            for i in 0..vs.len() {
                prop_assert!(g.has_edge(vs[i], vs[(i + 1) % vs.len()]));
            }
        }
    }

    #[test]
    fn bipartite_iff_no_odd_cycle(g in arb_graph()) {
        let odd = enumerate_cycles(&g, g.n()).iter().any(|c| c.is_odd());
        prop_assert_eq!(g.is_bipartite(), !odd);
        prop_assert_eq!(enumerate_fecs(&g).is_empty() || !g.is_bipartite(), true);
    }

    #[test]
    fn fecs_are_two_odd_cycles_and_a_path(g in arb_graph()) {
        for f in enumerate_fecs(&g) {
            prop_assert!(f.cycle_a.is_odd() && f.cycle_c.is_odd());
            prop_assert_eq!(f.a.len(), 2 * f.x + 1);
            prop_assert_eq!(f.c.len(), 2 * f.z + 1);
            prop_assert_eq!(f.path.len(), f.y + 1);
            for (u, v) in f.edges() {
                prop_assert!(g.has_edge(u, v));
            }
            // vertex-disjoint apart from the connector endpoints
            let total = f.a.len() + f.c.len() + f.path.len().saturating_sub(2);
            let expect = if f.y == 0 { total - 1 } else { total };
            prop_assert_eq!(f.vertices().len(), expect);
        }
    }
}
