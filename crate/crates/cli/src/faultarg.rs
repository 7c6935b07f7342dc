//! The `--fault` grammar:
//!
//! * `drop:u-v[,u-v...]@k` removes the listed messages from round `k`.
//! * `unidir:u-v[,u-v...]` fails each link `u -> v` in every round.
//! * `byz:v1,v2@h[:file]` hands `v1, v2` to the adversary for rounds
//!   `2..=h`; the strategy is read from `file` (JSON, round -> vertex ->
//!   targets), and without one the vertices stay silent.

use std::collections::BTreeMap;
use std::path::Path;

use aflab::faults::{FaultSpec, Strategy};
use aflab::graph::{Msg, Vertex};

fn vertex(s: &str) -> Result<Vertex, String> {
    s.trim().parse().map_err(|_| format!("bad vertex {s:?}"))
}

pub fn message(s: &str) -> Result<Msg, String> {
    let (u, v) = s.split_once('-').ok_or_else(|| format!("bad message {s:?}, expected u-v"))?;
    Ok((vertex(u)?, vertex(v)?))
}

pub fn messages(s: &str) -> Result<Vec<Msg>, String> {
    s.split(',').filter(|p| !p.trim().is_empty()).map(message).collect()
}

/// Initiator sets separated by `;`, e.g. `0,1;;2` (nobody initiates round 2).
pub fn schedule(s: &str) -> Result<Vec<std::collections::BTreeSet<Vertex>>, String> {
    s.split(';')
        .map(|r| r.split(',').filter(|v| !v.trim().is_empty()).map(vertex).collect())
        .collect()
}

fn silence(vertices: &[Vertex], horizon: usize) -> Strategy {
    let quiet: BTreeMap<Vertex, Vec<Vertex>> = vertices.iter().map(|&b| (b, Vec::new())).collect();
    (2..=horizon).map(|r| (r, quiet.clone())).collect()
}

/// Relative strategy paths resolve against `base`.
pub fn parse_fault(text: &str, base: &Path) -> Result<FaultSpec, String> {
    let (kind, body) = text.split_once(':').ok_or_else(|| format!("bad fault {text:?}, expected kind:arguments"))?;
    match kind.trim() {
        "drop" => {
            let (msgs, round) = body.rsplit_once('@').ok_or("drop needs @round")?;
            let round = round.trim().parse().map_err(|_| format!("bad round {round:?}"))?;
            let messages = messages(msgs)?;
            if messages.is_empty() {
                return Err("drop needs at least one message".into());
            }
            Ok(FaultSpec::Drop { messages, round })
        }
        "unidir" => {
            let arcs = messages(body)?;
            if arcs.is_empty() {
                return Err("unidir needs at least one link".into());
            }
            Ok(FaultSpec::Unidirectional { arcs })
        }
        "byz" => {
            let (vs, rest) = body.split_once('@').ok_or("byz needs @horizon")?;
            let (h, file) = match rest.split_once(':') {
                Some((h, f)) => (h, Some(f)),
                None => (rest, None),
            };
            let horizon: usize = h.trim().parse().map_err(|_| format!("bad horizon {h:?}"))?;
            let vertices = vs.split(',').map(vertex).collect::<Result<Vec<_>, _>>()?;
            let strategy = match file {
                None => silence(&vertices, horizon),
                Some(f) => {
                    let path = base.join(f.trim());
                    let raw = std::fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?;
                    serde_json::from_str(&raw).map_err(|e| format!("{}: {e}", path.display()))?
                }
            };
            Ok(FaultSpec::Byzantine { vertices, horizon, strategy })
        }
        other => Err(format!("unknown fault kind {other:?}, expected drop, unidir or byz")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn drop_grammar() {
        let f = parse_fault("drop:1-2,0-1@2", Path::new(".")).unwrap();
        assert_eq!(f, FaultSpec::Drop { messages: vec![(1, 2), (0, 1)], round: 2 });
        assert!(parse_fault("drop:1-2", Path::new(".")).is_err());
        assert!(parse_fault("drop:@3", Path::new(".")).is_err());
    }

    #[test]
    fn unidir_grammar() {
        let f = parse_fault("unidir:2-1", Path::new(".")).unwrap();
        assert_eq!(f, FaultSpec::Unidirectional { arcs: vec![(2, 1)] });
        assert!(parse_fault("unidir:2", Path::new(".")).is_err());
    }

    #[test]
    fn byzantine_defaults_to_silence() {
        let FaultSpec::Byzantine { vertices, horizon, strategy } = parse_fault("byz:3@4", Path::new(".")).unwrap() else {
            panic!("not byzantine");
        };
        assert_eq!((vertices, horizon), (vec![3], 4));
        assert_eq!(strategy.keys().copied().collect::<Vec<_>>(), vec![2, 3, 4]);
        assert!(strategy.values().all(|m| m[&3].is_empty()));
    }

    #[test]
    fn schedules() {
        let s = schedule("0,1;;2").unwrap();
        assert_eq!(s.len(), 3);
        assert!(s[1].is_empty());
        assert!(schedule("x").is_err());
    }

    #[test]
    fn unknown_kind() {
        assert!(parse_fault("melt:1-2", Path::new(".")).is_err());
        assert!(parse_fault("drop", Path::new(".")).is_err());
    }
}
