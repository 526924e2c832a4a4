use super::{InvWordGraph, Vertex};
use crate::words::Letter;

/// Result of folding: the deterministic quotient and where each original
/// vertex went.
#[derive(Clone, Debug)]
pub struct Folding {
    pub graph: InvWordGraph,
    pub map: Vec<Vertex>,
}

struct Dsu {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl Dsu {
    fn new(n: usize) -> Self {
        Dsu {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns `(root, absorbed)` or `None` if already joined.
    fn union(&mut self, a: usize, b: usize) -> Option<(usize, usize)> {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return None;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
        Some((ra, rb))
    }
}

fn merge(dsu: &mut Dsu, adj: &mut [Vec<(Letter, Vertex)>], work: &mut Vec<Vertex>, a: Vertex, b: Vertex) {
    if let Some((root, gone)) = dsu.union(a, b) {
        let moved = std::mem::take(&mut adj[gone]);
        adj[root].extend(moved);
        work.push(root);
    }
}

/// Identifies same-label edges with a common source until the graph is
/// deterministic. Since edges come in inverse pairs this also covers a
/// common target.
pub fn fold(g: &InvWordGraph) -> InvWordGraph {
    fold_with(g, &[]).graph
}

/// Folds `g` after first identifying each pair in `identify`.
pub fn fold_with(g: &InvWordGraph, identify: &[(Vertex, Vertex)]) -> Folding {
    let n = g.vertex_count();
    let mut dsu = Dsu::new(n);
    let mut adj: Vec<Vec<(Letter, Vertex)>> = g.adj.clone();
    let mut work: Vec<Vertex> = (0..n).rev().collect();

    for &(a, b) in identify {
        merge(&mut dsu, &mut adj, &mut work, a, b);
    }

    while let Some(v) = work.pop() {
        if dsu.find(v) != v {
            continue;
        }
        // Normalise targets, then look for two distinct targets per label.
        let mut list = std::mem::take(&mut adj[v]);
        for e in list.iter_mut() {
            e.1 = dsu.find(e.1);
        }
        list.sort_unstable();
        list.dedup();
        let clash = list
            .windows(2)
            .find(|w| w[0].0 == w[1].0)
            .map(|w| (w[0].1, w[1].1));
        adj[v] = list;
        if let Some((x, y)) = clash {
            merge(&mut dsu, &mut adj, &mut work, x, y);
            // v itself may have been absorbed or still hold stale entries.
            let rv = dsu.find(v);
            work.push(rv);
        }
    }

    // Dense renumbering in order of first appearance.
    let mut index = vec![usize::MAX; n];
    let mut count = 0;
    let mut map = vec![0; n];
    for v in 0..n {
        let r = dsu.find(v);
        if index[r] == usize::MAX {
            index[r] = count;
            count += 1;
        }
        map[v] = index[r];
    }
    let mut graph = InvWordGraph::with_vertices(count);
    for v in 0..n {
        if dsu.find(v) != v {
            continue;
        }
        let mut list: Vec<(Letter, Vertex)> = adj[v].iter().map(|&(l, t)| (l, map[t])).collect();
        list.sort_unstable();
        list.dedup();
        graph.adj[map[v]] = list;
    }
    Folding { graph, map }
}

#[cfg(test)]
mod tests {
    use super::super::testing::*;
    use super::super::{rooted_iso, BirootedAutomaton};
    use super::*;
    use proptest::prelude::*;

    /// Naive oracle: perform single folds in the order chosen by `pick`,
    /// rebuilding the graph from scratch each time.
    fn fold_naive(g: &InvWordGraph, mut pick: impl FnMut(usize) -> usize) -> (InvWordGraph, Vec<Vertex>) {
        let mut g = g.clone();
        let mut map: Vec<Vertex> = (0..g.vertex_count()).collect();
        loop {
            let mut sites = Vec::new();
            for v in g.vertices() {
                let out = g.out(v);
                for i in 0..out.len() {
                    for j in i + 1..out.len() {
                        if out[i].0 == out[j].0 && out[i].1 != out[j].1 {
                            sites.push((out[i].1, out[j].1));
                        }
                    }
                }
            }
            if sites.is_empty() {
                return (g, map);
            }
            let (x, y) = sites[pick(sites.len()) % sites.len()];
            let (keep, drop) = (x.min(y), x.max(y));
            let relabel = |v: Vertex| {
                let v = if v == drop { keep } else { v };
                if v > drop { v - 1 } else { v }
            };
            let mut h = InvWordGraph::with_vertices(g.vertex_count() - 1);
            for (u, l, v) in g.edges() {
                h.add_edge(relabel(u), l, relabel(v));
            }
            for m in map.iter_mut() {
                *m = relabel(*m);
            }
            g = h;
        }
    }

    fn star(k: usize) -> InvWordGraph {
        let mut g = InvWordGraph::with_vertices(k + 1);
        for i in 1..=k {
            g.add_edge(0, a(), i);
        }
        g
    }

    #[test]
    fn single_fold() {
        let f = fold(&star(2));
        assert_eq!(f.vertex_count(), 2);
        assert_eq!(f.edge_count(), 1);
        assert!(f.is_deterministic());
    }

    #[test]
    fn deterministic_is_fixed_point() {
        let g = cycle(6);
        assert_eq!(fold(&g), g);
    }

    #[test]
    fn star_all_orders() {
        let g = star(3);
        let ours = fold(&g);
        for first in 0..3 {
            for second in 0..3 {
                let mut seq = [first, second].into_iter();
                let (h, _) = fold_naive(&g, |_| seq.next().unwrap_or(0));
                assert!(rooted_iso(
                    &BirootedAutomaton { graph: ours.clone(), start: 0, end: 0 },
                    &BirootedAutomaton { graph: h, start: 0, end: 0 },
                ));
            }
        }
        assert_eq!(ours.edge_count(), 1);
    }

    #[test]
    fn identify_then_fold() {
        // two a-rays from different roots collapse when roots are identified
        let mut g = ray(2);
        let off = g.append(&ray(3));
        let f = fold_with(&g, &[(0, off)]);
        assert_eq!(f.graph.vertex_count(), 4);
        assert_eq!(f.map[2], f.map[off + 2]);
    }

    #[test]
    fn loop_folding_collapses_cycle() {
        // a-cycle of length 3 plus an a-loop at 0 folds to a single loop
        let mut g = InvWordGraph::with_vertices(3);
        for i in 0..3 {
            g.add_edge(i, a(), (i + 1) % 3);
        }
        g.add_edge(0, a(), 0);
        let f = fold(&g);
        assert_eq!(f.vertex_count(), 1);
        assert_eq!(f.edge_count(), 1);
    }

    fn arb_graph() -> impl Strategy<Value = InvWordGraph> {
        (1..=12usize)
            .prop_flat_map(|n| {
                (
                    Just(n),
                    prop::collection::vec(
                        (any::<prop::sample::Index>(), any::<bool>(), any::<prop::sample::Index>()),
                        0..16,
                    ),
                )
            })
            .prop_map(|(n, es)| {
                let mut g = InvWordGraph::with_vertices(n);
                for (u, which, v) in es {
                    g.add_edge(u.index(n), if which { a() } else { b() }, v.index(n));
                }
                g
            })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]

        #[test]
        fn fold_matches_any_naive_order(g in arb_graph(), seed in any::<u64>()) {
            let f = fold_with(&g, &[]);
            prop_assert!(f.graph.is_deterministic());
            prop_assert_eq!(fold(&f.graph), f.graph.clone());
            let mut state = seed;
            let (h, hmap) = fold_naive(&g, |n| {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                (state >> 33) as usize % n
            });
            prop_assert_eq!(h.vertex_count(), f.graph.vertex_count());
            // Same vertex partition.
            for u in g.vertices() {
                for v in g.vertices() {
                    prop_assert_eq!(f.map[u] == f.map[v], hmap[u] == hmap[v]);
                }
            }
            // Same edges under the induced bijection.
            let mut bij = vec![usize::MAX; h.vertex_count()];
            for v in g.vertices() {
                bij[hmap[v]] = f.map[v];
            }
            let mut mapped: Vec<_> = h.edges().into_iter().map(|(u, l, v)| (bij[u], l, bij[v])).collect();
            mapped.sort();
            prop_assert_eq!(mapped, f.graph.edges());
        }
    }
}
