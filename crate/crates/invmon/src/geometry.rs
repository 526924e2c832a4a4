//! Finite-graph verifiers for tree-likeness: the four-point Gromov constant,
//! cones and the cone-separation form of polygon hyperbolicity, strong tree
//! decompositions, disc types, and trees of hyperbolic blocks.
//!
//! ```
//! use invmon::geometry::{gromov_delta, strong_tree_check};
//! use invmon::graphs::InvWordGraph;
//! use invmon::words::Letter;
//!
//! let a: Letter = "a".parse().unwrap();
//! let mut c4 = InvWordGraph::with_vertices(4);
//! for i in 0..4 {
//!     c4.add_edge(i, a, (i + 1) % 4);
//! }
//! assert_eq!(gromov_delta(&c4).unwrap(), num_rational::Rational64::from_integer(1));
//! let blocks = vec![[0, 1].into(), [2, 3].into()];
//! assert!(strong_tree_check(&c4, &blocks, 1).unwrap());
//! ```

use std::collections::BTreeMap;

use num_rational::Rational64;
use thiserror::Error;

use crate::graphs::{colored_iso, components_rel, Color, ColoredBall, InvWordGraph, Vertex, VertexSet};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeometryError {
    #[error("graph is not connected")]
    Disconnected,
    #[error("vertex {0} is not covered by the blocks")]
    Uncovered(Vertex),
    #[error("vertex {0} lies in more than one block")]
    Overlap(Vertex),
    #[error("block {0} is empty or names a missing vertex")]
    BadBlock(usize),
}

/// All-pairs distances; fails on disconnected graphs.
pub fn distance_matrix(g: &InvWordGraph) -> Result<Vec<Vec<usize>>, GeometryError> {
    g.vertices()
        .map(|v| {
            g.bfs([v], None)
                .into_iter()
                .collect::<Option<Vec<usize>>>()
                .ok_or(GeometryError::Disconnected)
        })
        .collect()
}

fn four_point(d: &[Vec<usize>], x: usize, y: usize, z: usize, w: usize) -> usize {
    let mut s = [d[x][y] + d[z][w], d[x][z] + d[y][w], d[x][w] + d[y][z]];
    s.sort_unstable();
    s[2] - s[1]
}

/// The least `δ` for which the four-point condition holds: the maximum over
/// vertex quadruples of half the gap between the two largest of the three
/// pair sums.
pub fn gromov_delta(g: &InvWordGraph) -> Result<Rational64, GeometryError> {
    let d = distance_matrix(g)?;
    let n = d.len();
    let mut best = 0;
    for x in 0..n {
        for y in x + 1..n {
            for z in y + 1..n {
                for w in z + 1..n {
                    best = best.max(four_point(&d, x, y, z, w));
                }
            }
        }
    }
    Ok(Rational64::new(best as i64, 2))
}

/// The four-point constant with the basepoint fixed at `base`; the exact
/// constant is the maximum of this over all bases and is at most twice any
/// single value.
pub fn gromov_delta_at(g: &InvWordGraph, base: Vertex) -> Result<Rational64, GeometryError> {
    let d = distance_matrix(g)?;
    let n = d.len();
    let mut best = 0;
    for x in 0..n {
        for y in x..n {
            for z in y..n {
                best = best.max(four_point(&d, x, y, z, base));
            }
        }
    }
    Ok(Rational64::new(best as i64, 2))
}

/// `{y : d(x₀,y) = d(x₀,x) + d(x,y)}`.
pub fn cone(g: &InvWordGraph, x0: Vertex, x: Vertex) -> VertexSet {
    let from0 = g.bfs([x0], None);
    let fromx = g.bfs([x], None);
    let Some(dx) = from0[x] else {
        return VertexSet::new();
    };
    g.vertices()
        .filter(|&y| matches!((from0[y], fromx[y]), (Some(a), Some(b)) if a == dx + b))
        .collect()
}

/// For every `x` farther than `δ` from `x₀`, removing the ball `D_δ(x)`
/// separates `x₀` from the whole cone of `x`.
pub fn polygon_hyperbolic_check(g: &InvWordGraph, x0: Vertex, delta: usize) -> bool {
    polygon_violation(g, x0, delta).is_none()
}

/// A witness `(x, y)` where `y ∈ C(x₀,x)` is reachable from `x₀` around `D_δ(x)`.
pub fn polygon_violation(g: &InvWordGraph, x0: Vertex, delta: usize) -> Option<(Vertex, Vertex)> {
    let from0 = g.bfs([x0], None);
    for x in g.vertices() {
        match from0[x] {
            Some(d) if d > delta => {}
            _ => continue,
        }
        let ball = g.neighborhood(&[x].into(), delta);
        let outside: VertexSet = g.vertices().filter(|v| !ball.contains(v)).collect();
        let reach = g.component(x0, &outside);
        if let Some(&y) = cone(g, x0, x).iter().find(|y| reach.contains(y)) {
            return Some((x, y));
        }
    }
    None
}

/// Smallest `δ` passing [`polygon_hyperbolic_check`] at `x₀`.
pub fn min_polygon_delta(g: &InvWordGraph, x0: Vertex) -> usize {
    (0..).find(|&d| polygon_hyperbolic_check(g, x0, d)).unwrap()
}

/// A vertex partition with its maximal block diameter.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeDecomposition {
    pub blocks: Vec<VertexSet>,
    pub width: usize,
}

impl TreeDecomposition {
    /// Fails unless `blocks` partition `V(g)`; disconnected blocks make the
    /// width undefined and are rejected as well.
    pub fn new(g: &InvWordGraph, blocks: Vec<VertexSet>) -> Result<Option<TreeDecomposition>, GeometryError> {
        block_index(g, &blocks)?;
        let mut width = 0;
        for b in &blocks {
            match g.diameter(b) {
                Some(d) => width = width.max(d),
                None => return Ok(None),
            }
        }
        Ok(Some(TreeDecomposition { blocks, width }))
    }
}

/// Block number of every vertex.
pub fn block_index(g: &InvWordGraph, blocks: &[VertexSet]) -> Result<Vec<usize>, GeometryError> {
    let mut owner = vec![usize::MAX; g.vertex_count()];
    for (i, b) in blocks.iter().enumerate() {
        if b.is_empty() {
            return Err(GeometryError::BadBlock(i));
        }
        for &v in b {
            if v >= owner.len() {
                return Err(GeometryError::BadBlock(i));
            }
            if owner[v] != usize::MAX {
                return Err(GeometryError::Overlap(v));
            }
            owner[v] = i;
        }
    }
    if let Some(v) = owner.iter().position(|&o| o == usize::MAX) {
        return Err(GeometryError::Uncovered(v));
    }
    Ok(owner)
}

/// The simple quotient `Γ/𝒫`: for each unordered pair of distinct blocks
/// joined by some edge, the number of crossing inverse pairs.
pub fn quotient_graph(
    g: &InvWordGraph,
    blocks: &[VertexSet],
) -> Result<BTreeMap<(usize, usize), usize>, GeometryError> {
    let owner = block_index(g, blocks)?;
    let mut q = BTreeMap::new();
    for (u, _, v) in g.edges() {
        let (a, b) = (owner[u], owner[v]);
        if a != b {
            *q.entry((a.min(b), a.max(b))).or_insert(0) += 1;
        }
    }
    Ok(q)
}

fn quotient_is_tree(n: usize, q: &BTreeMap<(usize, usize), usize>) -> bool {
    if n == 0 {
        return true;
    }
    if q.len() + 1 != n {
        return false;
    }
    let mut t = InvWordGraph::with_vertices(n);
    let l = crate::words::Letter::pos(crate::words::Symbol::new("e"));
    for &(a, b) in q.keys() {
        t.add_edge(a, l, b);
    }
    t.is_connected()
}

/// Quotient is a tree, every block is connected with induced diameter `≤ m`.
pub fn strong_tree_check(g: &InvWordGraph, blocks: &[VertexSet], m: usize) -> Result<bool, GeometryError> {
    let q = quotient_graph(g, blocks)?;
    if !quotient_is_tree(blocks.len(), &q) {
        return Ok(false);
    }
    Ok(blocks
        .iter()
        .all(|b| g.diameter(b).map_or(false, |d| d <= m)))
}

/// A coloured ball `D_r(x)` with `θ_x(y) = d(y,x₀) − d(x,x₀)`; red marks the
/// part cut off from `x₀` by `x`.
#[derive(Clone, Debug)]
pub struct DiscType {
    pub ball: ColoredBall,
    pub center: Vertex,
}

pub fn disc_type(g: &InvWordGraph, x0: Vertex, x: Vertex, radius: usize) -> DiscType {
    let from0 = g.bfs([x0], None);
    let set = g.neighborhood(&[x].into(), radius);
    let sub = g.induced(&set);
    let red = if x == x0 {
        VertexSet::new()
    } else {
        components_rel(g, &[x].into(), x0).expect("x differs from x0").1
    };
    let dx = from0[x].map_or(0, |d| d as i64);
    let theta = sub
        .host
        .iter()
        .map(|&v| from0[v].map_or(i64::MAX, |d| d as i64 - dx))
        .collect();
    let colors = sub
        .host
        .iter()
        .map(|v| if red.contains(v) { Color::Red } else { Color::Blue })
        .collect();
    let center = sub.local[&x];
    DiscType {
        ball: ColoredBall {
            graph: sub.graph,
            center: [center].into(),
            colors,
            theta: Some(theta),
            origin: sub.host,
        },
        center,
    }
}

pub fn disc_type_equiv(t1: &DiscType, t2: &DiscType) -> bool {
    colored_iso(&t1.ball, &t2.ball).is_some()
}

/// Outcome of checking one finite instance of the tree-of-hyperbolic-blocks
/// theorem.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeOfHyperbolicReport {
    /// (a) at most one edge between any two blocks
    pub single_transitions: bool,
    /// (b) the quotient is a tree
    pub quotient_tree: bool,
    /// (c) per block four-point constant; `None` for a disconnected block
    pub block_deltas: Vec<Option<Rational64>>,
    pub blocks_hyperbolic: bool,
    /// (d) the four-point constant of the whole graph
    pub delta: Rational64,
    pub conclusion: bool,
}

impl TreeOfHyperbolicReport {
    pub fn applicable(&self) -> bool {
        self.single_transitions && self.quotient_tree && self.blocks_hyperbolic
    }

    /// Hypotheses hold but the conclusion fails.
    pub fn counterexample(&self) -> bool {
        self.applicable() && !self.conclusion
    }
}

pub fn tree_of_hyperbolic_verify(
    g: &InvWordGraph,
    blocks: &[VertexSet],
    delta: Rational64,
) -> Result<TreeOfHyperbolicReport, GeometryError> {
    let q = quotient_graph(g, blocks)?;
    let single_transitions = q.values().all(|&c| c <= 1);
    let quotient_tree = quotient_is_tree(blocks.len(), &q);
    let block_deltas: Vec<Option<Rational64>> = blocks
        .iter()
        .map(|b| gromov_delta(&g.induced(b).graph).ok())
        .collect();
    let blocks_hyperbolic = block_deltas.iter().all(|d| d.map_or(false, |d| d <= delta));
    let whole = gromov_delta(g)?;
    Ok(TreeOfHyperbolicReport {
        single_transitions,
        quotient_tree,
        block_deltas,
        blocks_hyperbolic,
        delta: whole,
        conclusion: whole <= delta,
    })
}
