//! Exhaustive protocol searches at desk scale.

use super::{Check, SuiteReport, Tally};
use crate::protosearch::{
    exhaustive_search, forbidden_digraph_check, forbidden_pattern_search, ids, Key, SearchProfile, SearchReport,
};

/// Largest identifier set allowed to deviate from flooding.
pub const MAX_EXCEPTIONS: usize = 3;

fn profile_checks(r: &SearchReport, tag: &str) -> Vec<Check> {
    let mut out = Vec::new();
    let mut violations = Tally::default();
    let v = r.necessary_violations();
    violations.record(v.is_empty(), || format!("{} violations, first {:?}", v.len(), v.first()));
    let mut c = violations.check(&format!("{tag}: survivors meet the necessary conditions"));
    c.facts.insert("survivors".into(), r.survivor_count.to_string());
    c.facts.insert("flooding_survivors".into(), r.flooding_count().to_string());
    out.push(c);

    let mut free = Tally::default();
    for t in r.local_tables() {
        free.record(forbidden_digraph_check(&t), || format!("{t:?}"));
    }
    out.push(free.check(&format!("{tag}: behaviour digraphs free of the forbidden pattern")));

    let mut few = Tally::default();
    let sets = r.exception_sets();
    for (set, n) in &sets {
        few.record(set.len() <= MAX_EXCEPTIONS, || format!("{n} survivors need exceptions {set:?}"));
    }
    few.record(r.flooding_count() >= 1, || "flooding itself did not survive".into());
    let mut c = few.check(&format!("{tag}: survivors are flooding outside at most three identifiers"));
    c.facts.insert("largest_exception_set".into(), sets.keys().map(Vec::len).max().unwrap_or(0).to_string());
    out.push(c);
    out
}

pub fn uniqueness() -> SuiteReport {
    let mut checks = Vec::new();

    let edge = exhaustive_search(&SearchProfile::single_edge()).expect("small profile");
    let mut echo = Tally::default();
    for t in edge.representative_survivors() {
        let (a, b) = (Key::f(0, &[1], &[1]), Key::f(1, &[0], &[0]));
        echo.record(!(t.get(a) == Some(0b10) && t.get(b) == Some(0b01)), || format!("{a} and {b} both echo"));
    }
    let mut c = echo.check("single edge: the two leaves never both echo");
    c.facts.insert("survivors".into(), edge.survivor_count.to_string());
    checks.push(c);

    let three = exhaustive_search(&SearchProfile::three_path()).expect("small profile");
    let mut silent = Tally::default();
    for t in three.representative_survivors() {
        for v in 0..3u8 {
            let others: Vec<u8> = (0..3).filter(|&w| w != v).collect();
            let k = Key::f(v, &others, &others);
            silent.record(t.get(k).map_or(true, |x| x == 0), || format!("{k} = {:?}", t.get(k)));
        }
    }
    let mut c = silent.check("three-vertex path: a vertex hearing both neighbours stays silent");
    c.facts.insert("survivors".into(), three.survivor_count.to_string());
    checks.push(c);

    let gadgets = exhaustive_search(&SearchProfile::gadgets(4)).expect("desk-scale profile");
    checks.extend(profile_checks(&gadgets, "gadgets on four identifiers"));

    let mut facing = Tally::default();
    for oriented in [true, false] {
        let p = SearchProfile::facing_triples(oriented);
        let r = exhaustive_search(&p).expect("desk-scale profile");
        facing.record(r.survivor_count == 0, || format!("{}: {} survivors", p.name, r.survivor_count));
    }
    for placement in forbidden_pattern_search(&SearchProfile::all_paths(6)).expect("desk-scale profile") {
        facing.record(placement.survivors == 0, || format!("pattern at {:?}: {} survivors", placement.placement, placement.survivors));
    }
    checks.push(facing.check("no terminating protocol realises two facing echo triples"));

    let paw_profile = SearchProfile::extended_paw(1);
    let paw = exhaustive_search(&paw_profile).expect("desk-scale profile");
    let mut forward = Tally::default();
    for t in paw.representative_survivors() {
        for (k, v) in t.assigned() {
            if paw_profile.free >> k.id & 1 == 1 && k.neighbours.count_ones() == 2 && k.received.count_ones() == 1 {
                forward.record(v == k.neighbours & !k.received, || format!("{k} = {:?}", ids(v).collect::<Vec<_>>()));
            }
        }
    }
    let mut c = forward.check("extended paw: degree-2 vertices forward away from the sender");
    c.facts.insert("survivors".into(), paw.survivor_count.to_string());
    checks.push(c);

    SuiteReport::new("uniqueness", checks)
}
