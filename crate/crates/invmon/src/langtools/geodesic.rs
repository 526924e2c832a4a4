use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use super::fsa::Fsa;
use crate::geometry::{disc_type, disc_type_equiv, DiscType};
use crate::graphs::{InvWordGraph, Vertex};
use crate::stephen::missing_paths;
use crate::words::{Letter, Presentation};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeodesicError {
    #[error("base vertex {0} is too close to the unfinished part of the graph; materialise further")]
    BaseUntrusted(Vertex),
    #[error("vertices {a} and {b} share a disc type but disagree on label {label}; materialise further")]
    Inconsistent { a: Vertex, b: Vertex, label: Letter },
    #[error("no vertex of the class of {0} has all its geodesic successors far from the unfinished part; materialise further")]
    Unresolved(Vertex),
}

/// Automaton of geodesic words from `x0`: states are vertices of the
/// geodesic digraph, with vertices farther than `delta` from `x0`
/// identified when their coloured `(delta + K)`-discs agree.
///
/// `g` may be a truncation of an infinite graph: vertices within
/// `delta + K + 1` of a vertex where some relation of `p` is still missing
/// are not trusted, and every class needs a trusted member whose geodesic
/// successors are all trusted.
pub fn geodesic_automaton(
    g: &InvWordGraph,
    x0: Vertex,
    delta: usize,
    p: &Presentation,
) -> Result<Fsa, GeodesicError> {
    let radius = delta + p.k();
    let dist = g.bfs([x0], None);
    let frontier: BTreeSet<Vertex> = missing_paths(g, p).into_iter().map(|(u, _, _)| u).collect();
    let from_frontier = g.bfs(frontier.iter().copied(), None);
    let trusted = |v: Vertex| from_frontier[v].map_or(true, |d| d > radius + 1) && dist[v].is_some();
    if !trusted(x0) {
        return Err(GeodesicError::BaseUntrusted(x0));
    }

    // classes, in BFS order from x0 so numbering is deterministic
    let mut order: Vec<Vertex> = g.vertices().filter(|&v| trusted(v)).collect();
    order.sort_by_key(|&v| (dist[v], v));
    let mut class: BTreeMap<Vertex, usize> = BTreeMap::new();
    let mut reps: Vec<(Vertex, Option<DiscType>)> = Vec::new();
    for &v in &order {
        let d = dist[v].unwrap();
        if d <= delta {
            class.insert(v, reps.len());
            reps.push((v, None));
            continue;
        }
        let t = disc_type(g, x0, v, radius);
        let found = reps
            .iter()
            .position(|(_, rt)| rt.as_ref().map_or(false, |rt| disc_type_equiv(rt, &t)));
        match found {
            Some(c) => {
                class.insert(v, c);
            }
            None => {
                class.insert(v, reps.len());
                reps.push((v, Some(t)));
            }
        }
    }

    let mut out: BTreeMap<(usize, Letter), (usize, Vertex)> = BTreeMap::new();
    let mut complete: Vec<Option<(Vertex, BTreeSet<Letter>)>> = vec![None; reps.len()];
    let mut labels_of: Vec<Vec<(Vertex, BTreeSet<Letter>)>> = vec![Vec::new(); reps.len()];
    for &u in &order {
        let cu = class[&u];
        let du = dist[u].unwrap();
        let mut ok = true;
        let mut labels = BTreeSet::new();
        for &(l, v) in g.out(u) {
            if dist[v] != Some(du + 1) {
                continue;
            }
            labels.insert(l);
            let Some(&cv) = class.get(&v) else {
                ok = false;
                continue;
            };
            match out.get(&(cu, l)) {
                Some(&(c, w)) if c != cv => {
                    return Err(GeodesicError::Inconsistent { a: w, b: u, label: l });
                }
                Some(_) => {}
                None => {
                    out.insert((cu, l), (cv, u));
                }
            }
        }
        if ok && complete[cu].is_none() {
            complete[cu] = Some((u, labels.clone()));
        }
        labels_of[cu].push((u, labels));
    }
    for (c, members) in labels_of.iter().enumerate() {
        let Some((rep, want)) = &complete[c] else {
            return Err(GeodesicError::Unresolved(reps[c].0));
        };
        // a trusted member may miss untrusted successors but never have
        // extra or fewer labels among complete members
        for (v, labels) in members {
            let all_trusted = g
                .out(*v)
                .iter()
                .filter(|(_, t)| dist[*t] == dist[*v].map(|d| d + 1))
                .all(|(_, t)| class.contains_key(t));
            if all_trusted && labels != want {
                let label = *labels.symmetric_difference(want).next().unwrap();
                return Err(GeodesicError::Inconsistent { a: *rep, b: *v, label });
            }
        }
    }
    let mut f = Fsa::new(reps.len(), class[&x0]);
    for (&(c, l), &(t, _)) in &out {
        f.add(c, l, t);
    }
    f.terminal = (0..reps.len()).collect();
    Ok(f)
}
