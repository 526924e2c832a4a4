use std::collections::{BTreeMap, VecDeque};

use super::{BirootedAutomaton, InvWordGraph, Vertex, VertexSet};

/// Extends `a0 ↦ b0` along edges of two deterministic graphs. Returns the
/// forced map on the component of `a0` if it is a label-preserving
/// bijection onto the component of `b0` with matching degrees, and `accept`
/// approves every mapped pair.
pub fn anchored_map(
    a: &InvWordGraph,
    b: &InvWordGraph,
    a0: Vertex,
    b0: Vertex,
    mut accept: impl FnMut(Vertex, Vertex) -> bool,
) -> Option<Vec<Option<Vertex>>> {
    let mut fwd: Vec<Option<Vertex>> = vec![None; a.vertex_count()];
    let mut back: Vec<Option<Vertex>> = vec![None; b.vertex_count()];
    fwd[a0] = Some(b0);
    back[b0] = Some(a0);
    if !accept(a0, b0) {
        return None;
    }
    let mut queue = VecDeque::from([a0]);
    while let Some(u) = queue.pop_front() {
        let u2 = fwd[u].unwrap();
        if a.degree(u) != b.degree(u2) {
            return None;
        }
        for &(l, v) in a.out(u) {
            let v2 = b.step(u2, l)?;
            match (fwd[v], back[v2]) {
                (None, None) => {
                    if !accept(v, v2) {
                        return None;
                    }
                    fwd[v] = Some(v2);
                    back[v2] = Some(v);
                    queue.push_back(v);
                }
                (Some(x), Some(y)) if x == v2 && y == v => {}
                _ => return None,
            }
        }
    }
    Some(fwd)
}

/// Label-, start- and end-preserving isomorphism of connected deterministic
/// automata, by parallel traversal from the start vertices.
pub fn rooted_iso(a: &BirootedAutomaton, b: &BirootedAutomaton) -> bool {
    if a.graph.vertex_count() != b.graph.vertex_count() {
        return false;
    }
    match anchored_map(&a.graph, &b.graph, a.start, b.start, |_, _| true) {
        Some(m) => m.iter().all(Option::is_some) && m[a.end] == Some(b.end),
        None => false,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Color {
    Red,
    Blue,
}

/// A vertex-coloured ball around a marked centre subgraph.
///
/// `theta`, when present, holds `d(y, x₀) − d(x, x₀)` for the centre `x`, so
/// compatible balls must agree on it exactly.
#[derive(Clone, Debug)]
pub struct ColoredBall {
    pub graph: InvWordGraph,
    /// Local ids of the centre subgraph.
    pub center: VertexSet,
    pub colors: Vec<Color>,
    pub theta: Option<Vec<i64>>,
    /// Local id → id in the graph the ball was cut from.
    pub origin: Vec<Vertex>,
}

impl ColoredBall {
    fn signature(&self, v: Vertex) -> (Color, usize, bool, i64) {
        (
            self.colors[v],
            self.graph.degree(v),
            self.center.contains(&v),
            self.theta.as_ref().map_or(0, |t| t[v]),
        )
    }

    /// Translates a local-to-local isomorphism into origin coordinates.
    pub fn to_origin_map(&self, other: &ColoredBall, iso: &[Vertex]) -> BTreeMap<Vertex, Vertex> {
        iso.iter()
            .enumerate()
            .map(|(i, &j)| (self.origin[i], other.origin[j]))
            .collect()
    }
}

/// A colour-, centre- and theta-preserving labelled isomorphism `a → b`
/// (as a local-id map), or `None`.
pub fn colored_iso(a: &ColoredBall, b: &ColoredBall) -> Option<Vec<Vertex>> {
    let n = a.graph.vertex_count();
    if n != b.graph.vertex_count()
        || a.center.len() != b.center.len()
        || a.theta.is_some() != b.theta.is_some()
    {
        return None;
    }
    if n == 0 {
        return Some(Vec::new());
    }
    // Anchor on the rarest signature of `a`; it must go to the same signature.
    let mut freq: BTreeMap<_, usize> = BTreeMap::new();
    for v in a.graph.vertices() {
        *freq.entry(a.signature(v)).or_default() += 1;
    }
    let anchor = a
        .graph
        .vertices()
        .min_by_key(|&v| (freq[&a.signature(v)], v))
        .unwrap();
    let sig = a.signature(anchor);
    for cand in b.graph.vertices().filter(|&v| b.signature(v) == sig) {
        let found = anchored_map(&a.graph, &b.graph, anchor, cand, |x, y| {
            a.signature(x) == b.signature(y)
        });
        if let Some(m) = found {
            if m.iter().all(Option::is_some) {
                return Some(m.into_iter().map(Option::unwrap).collect());
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::super::testing::*;
    use super::*;
    use crate::stephen::munn_tree;

    fn mt(s: &str) -> BirootedAutomaton {
        munn_tree(&s.parse().unwrap())
    }

    /// Ball of radius `r` around `c` in `g`, red on vertices `> c`.
    fn line_ball(g: &InvWordGraph, c: Vertex, r: usize) -> ColoredBall {
        let set = g.neighborhood(&[c].into(), r);
        let sub = g.induced(&set);
        ColoredBall {
            colors: sub.host.iter().map(|&v| if v > c { Color::Red } else { Color::Blue }).collect(),
            center: [sub.local[&c]].into(),
            theta: None,
            origin: sub.host.clone(),
            graph: sub.graph,
        }
    }

    #[test]
    fn rooted_iso_examples() {
        let c = cycle(5);
        let mut renamed = InvWordGraph::with_vertices(5);
        for (u, l, v) in c.edges() {
            renamed.add_edge(4 - u, l, 4 - v);
        }
        assert!(rooted_iso(
            &BirootedAutomaton { graph: c.clone(), start: 0, end: 2 },
            &BirootedAutomaton { graph: renamed, start: 4, end: 2 },
        ));
        assert!(!rooted_iso(&mt("a b b'"), &mt("a")));
        assert!(rooted_iso(&mt("a a' a"), &mt("a")));
    }

    #[test]
    fn colored_iso_examples() {
        let line = ray(8);
        let x = line_ball(&line, 3, 2);
        assert!(colored_iso(&x, &x).is_some());
        let mut recolored = x.clone();
        let red = recolored.colors.iter().position(|&c| c == Color::Red).unwrap();
        recolored.colors[red] = Color::Blue;
        assert!(colored_iso(&x, &recolored).is_none());
        // Shift: every anchor choice is tried exhaustively by the oracle below.
        let y = line_ball(&line, 5, 2);
        let iso = colored_iso(&x, &y).unwrap();
        let shifted = x.to_origin_map(&y, &iso);
        assert!(shifted.iter().all(|(&p, &q)| q == p + 2));
        let mut oracle_hits = 0;
        for a0 in x.graph.vertices() {
            for b0 in y.graph.vertices() {
                if let Some(m) = anchored_map(&x.graph, &y.graph, a0, b0, |p, q| {
                    x.colors[p] == y.colors[q] && x.center.contains(&p) == y.center.contains(&q)
                }) {
                    if m.iter().all(Option::is_some) {
                        oracle_hits += 1;
                    }
                }
            }
        }
        assert_eq!(oracle_hits, 5);
        // Near the end of the ray the ball is smaller.
        assert!(colored_iso(&x, &line_ball(&line, 7, 2)).is_none());
    }
}
