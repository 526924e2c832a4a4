//! Saplings: finite pieces of a Schützenberger graph `𝒮(w)` together with
//! subgraph pairs `(Xᵢ, Yᵢ)` from which the whole graph regrows.
//!
//! For a vertex set `X` avoiding the base vertex `x₀`, `Γ(x₀,X)` is the
//! component of `S ∖ X` containing `x₀` and `Γᶜ(x₀,X)` the rest of `S ∖ X`.
//! A sapling satisfies:
//!
//! 1. `⋂ᵢ Γ(x₀,Yᵢ)` is relatively P-complete in `S`;
//! 2. `Γᶜ(x₀,Yᵢ) ⊆ Yᵢ^{+K}`;
//! 3. `d(Γᶜ(x₀,Yᵢ) ∪ Yᵢ, Γᶜ(x₀,Yⱼ) ∪ Yⱼ) ≥ 2` for `i ≠ j`;
//! 4. `Xᵢ^{+K} ⊆ ⋂ⱼ Γ(x₀,Yⱼ)` and `Xᵢ^{+K}` is isomorphic to `Yᵢ^{+K}` as a
//!    red/blue coloured graph, via some `φᵢ` with `φᵢ(Xᵢ) = Yᵢ`;
//! 5. `Xᵢ ∪ Γᶜ(x₀,Xᵢ)` embeds in `exp_k(Xᵢ^{+K})`, fixing `Xᵢ`.
//!
//! Conditions 1–4 make a *candidate*; condition 5 fixes the bound `k`.

mod grow;
mod io;
mod search;

pub use grow::{grow, materialize, tree_partition, width_bound, GrowError};
pub use io::{SaplingDoc, SaplingIoError};
pub use search::{find_sapling, SaplingSearch, SearchOutcome};

use std::collections::BTreeMap;

use thiserror::Error;

use crate::graphs::{
    colored_iso, components_rel, Color, ColoredBall, InvWordGraph, Subgraph, Vertex,
    VertexSet,
};
use crate::stephen::{expand_graph, relative_p_violation, ApproxAutomaton};
use crate::words::Presentation;

/// One `(Xᵢ, Yᵢ)` pair with its coloured isomorphism `φᵢ: Xᵢ^{+K} → Yᵢ^{+K}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubgraphPair {
    pub y: VertexSet,
    pub x: VertexSet,
    pub phi: BTreeMap<Vertex, Vertex>,
}

/// A graph with pairs satisfying conditions 1–4.
#[derive(Clone, Debug)]
pub struct SaplingCandidate {
    pub approx: ApproxAutomaton,
    pub pairs: Vec<SubgraphPair>,
}

/// Ancestry of the `Y` sets across growth steps, used to rebuild the tree
/// decomposition of a materialised sapling.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lineage {
    /// `levels[0]` are the `Y`s of the original sapling; each later level
    /// holds the `Y`s introduced by one growth, with the index of the
    /// previous-level `Y` they hang below.
    pub levels: Vec<Vec<(VertexSet, Option<usize>)>>,
    /// `max_j diam Γᶜ(x₀,Xⱼ) + Σ_{Yₗ ⊆ Γᶜ(x₀,Xⱼ)} (diam Yₗ + 1)` on the
    /// original sapling.
    pub branch_width: usize,
}

#[derive(Clone, Debug)]
pub struct Sapling {
    pub approx: ApproxAutomaton,
    pub pairs: Vec<SubgraphPair>,
    pub k: usize,
    pub lineage: Lineage,
}

impl Sapling {
    pub fn graph(&self) -> &InvWordGraph {
        self.approx.graph()
    }

    pub fn x0(&self) -> Vertex {
        self.approx.start()
    }

    pub fn presentation(&self) -> &Presentation {
        &self.approx.presentation
    }

    pub fn big_k(&self) -> usize {
        self.presentation().k()
    }

    pub fn ys(&self) -> Vec<VertexSet> {
        self.pairs.iter().map(|p| p.y.clone()).collect()
    }

    pub fn xs(&self) -> Vec<VertexSet> {
        self.pairs.iter().map(|p| p.x.clone()).collect()
    }

    /// `Γᶜ(x₀,Xᵢ)` for every pair.
    pub fn x_complements(&self) -> Vec<VertexSet> {
        self.pairs
            .iter()
            .map(|p| components_rel(self.graph(), &p.x, self.x0()).expect("x₀ ∉ X").1)
            .collect()
    }

    /// `Γᶜ(x₀,Yᵢ)` for every pair.
    pub fn y_complements(&self) -> Vec<VertexSet> {
        self.pairs
            .iter()
            .map(|p| components_rel(self.graph(), &p.y, self.x0()).expect("x₀ ∉ Y").1)
            .collect()
    }

    pub fn candidate(&self) -> SaplingCandidate {
        SaplingCandidate {
            approx: self.approx.clone(),
            pairs: self.pairs.clone(),
        }
    }

    /// Fresh lineage with the current `Y`s as the first level.
    pub fn reset_lineage(&mut self) {
        self.lineage = initial_lineage(&self.approx, &self.pairs);
    }
}

pub(crate) fn initial_lineage(approx: &ApproxAutomaton, pairs: &[SubgraphPair]) -> Lineage {
    let g = approx.graph();
    let x0 = approx.start();
    let mut branch_width = 0;
    for p in pairs {
        let gc = components_rel(g, &p.x, x0).expect("x₀ ∉ X").1;
        let diam_gc = set_diameter(g, &gc);
        let below: usize = pairs
            .iter()
            .filter(|q| q.y.is_subset(&gc))
            .map(|q| set_diameter(g, &q.y) + 1)
            .sum();
        branch_width = branch_width.max(diam_gc + below);
    }
    Lineage {
        levels: vec![pairs.iter().map(|p| (p.y.clone(), None)).collect()],
        branch_width,
    }
}

/// Diameter of a vertex set in the metric of the whole graph.
pub(crate) fn set_diameter(g: &InvWordGraph, set: &VertexSet) -> usize {
    set.iter()
        .map(|&v| {
            let d = g.bfs([v], None);
            set.iter().filter_map(|&u| d[u]).max().unwrap_or(0)
        })
        .max()
        .unwrap_or(0)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ColorError {
    #[error("the subgraph is empty")]
    Empty,
    #[error("the subgraph is not connected")]
    Disconnected,
    #[error("the subgraph contains the base vertex")]
    ContainsBase,
    #[error("the subgraph meets the path of the defining word")]
    MeetsWordPath,
}

/// `X^{+K}` coloured red on `Γᶜ(x₀,X)` and blue elsewhere, with `X` marked.
pub fn color_neighborhood(
    g: &InvWordGraph,
    x: &VertexSet,
    x0: Vertex,
    k: usize,
    word_path: &VertexSet,
) -> Result<ColoredBall, ColorError> {
    if x.is_empty() {
        return Err(ColorError::Empty);
    }
    if x.contains(&x0) {
        return Err(ColorError::ContainsBase);
    }
    if !x.is_disjoint(word_path) {
        return Err(ColorError::MeetsWordPath);
    }
    if !g.is_connected_set(x) {
        return Err(ColorError::Disconnected);
    }
    let red = components_rel(g, x, x0).expect("x₀ ∉ X").1;
    Ok(colored_ball(g, x, &red, k))
}

pub(crate) fn colored_ball(g: &InvWordGraph, x: &VertexSet, red: &VertexSet, k: usize) -> ColoredBall {
    let sub = g.induced(&g.neighborhood(x, k));
    ColoredBall {
        colors: sub
            .host
            .iter()
            .map(|v| if red.contains(v) { Color::Red } else { Color::Blue })
            .collect(),
        center: x.iter().map(|v| sub.local[v]).collect(),
        theta: None,
        origin: sub.host.clone(),
        graph: sub.graph,
    }
}

/// The first failed requirement of a sapling candidate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Violation {
    #[error("pair {index}: {reason}")]
    Shape { index: usize, reason: ColorError },
    #[error("X and Y lists differ in length")]
    Arity,
    #[error("condition 1: relation path {relation} at vertex {vertex} has no parallel path")]
    RelativeCompleteness { vertex: Vertex, relation: String },
    #[error("condition 2: vertex {vertex} of Γᶜ(x₀,Y{index}) is farther than K from Y{index}")]
    FarComplement { index: usize, vertex: Vertex },
    #[error("condition 3: pairs {i} and {j} are closer than 2")]
    TooClose { i: usize, j: usize },
    #[error("condition 4: X{index}^{{+K}} leaves the common component at vertex {vertex}")]
    NeighborhoodEscapes { index: usize, vertex: Vertex },
    #[error("condition 4: X{index}^{{+K}} and Y{index}^{{+K}} are not isomorphic as coloured graphs")]
    NotIsomorphic { index: usize },
}

impl Violation {
    /// The numbered condition that failed (0 for shape requirements).
    pub fn condition(&self) -> u8 {
        match self {
            Violation::Shape { .. } | Violation::Arity => 0,
            Violation::RelativeCompleteness { .. } => 1,
            Violation::FarComplement { .. } => 2,
            Violation::TooClose { .. } => 3,
            Violation::NeighborhoodEscapes { .. } | Violation::NotIsomorphic { .. } => 4,
        }
    }
}

/// Common data for conditions 1–4 over a fixed `Y` system.
pub(crate) struct YSystem {
    pub complements: Vec<VertexSet>,
    pub inter: VertexSet,
}

pub(crate) fn check_y_system(
    approx: &ApproxAutomaton,
    ys: &[VertexSet],
) -> Result<YSystem, Violation> {
    let g = approx.graph();
    let x0 = approx.start();
    let k = approx.presentation.k();
    let path = approx.word_path();
    let mut complements = Vec::with_capacity(ys.len());
    let mut inter = g.all_vertices();
    for (index, y) in ys.iter().enumerate() {
        color_neighborhood(g, y, x0, 0, &path).map_err(|reason| Violation::Shape { index, reason })?;
        let (gam, gc) = components_rel(g, y, x0).expect("checked");
        inter = inter.intersection(&gam).copied().collect();
        complements.push(gc);
    }
    if let Some((vertex, s, t)) = relative_p_violation(&inter, g, &approx.presentation) {
        return Err(Violation::RelativeCompleteness {
            vertex,
            relation: format!("{s} = {t}"),
        });
    }
    for (index, (y, gc)) in ys.iter().zip(&complements).enumerate() {
        let ball = g.neighborhood(y, k);
        if let Some(&vertex) = gc.iter().find(|v| !ball.contains(v)) {
            return Err(Violation::FarComplement { index, vertex });
        }
    }
    let closed: Vec<VertexSet> = ys
        .iter()
        .zip(&complements)
        .map(|(y, gc)| y.union(gc).copied().collect())
        .collect();
    for i in 0..ys.len() {
        for j in i + 1..ys.len() {
            if g.set_distance(&closed[i], &closed[j]).map_or(false, |d| d < 2) {
                return Err(Violation::TooClose { i, j });
            }
        }
    }
    Ok(YSystem { complements, inter })
}

/// Condition 4 for one pair: returns `φ` on success.
pub(crate) fn check_pair(
    approx: &ApproxAutomaton,
    sys: &YSystem,
    index: usize,
    y: &VertexSet,
    x: &VertexSet,
) -> Result<BTreeMap<Vertex, Vertex>, Violation> {
    let g = approx.graph();
    let x0 = approx.start();
    let k = approx.presentation.k();
    let path = approx.word_path();
    let xb = color_neighborhood(g, x, x0, k, &path).map_err(|reason| Violation::Shape { index, reason })?;
    if let Some(&vertex) = xb.origin.iter().find(|v| !sys.inter.contains(v)) {
        return Err(Violation::NeighborhoodEscapes { index, vertex });
    }
    let yb = colored_ball(g, y, &sys.complements[index], k);
    let iso = colored_iso(&xb, &yb).ok_or(Violation::NotIsomorphic { index })?;
    Ok(xb.to_origin_map(&yb, &iso))
}

/// Checks conditions 1–4 and returns the candidate with the `φᵢ` found.
pub fn candidate_check(
    approx: &ApproxAutomaton,
    ys: &[VertexSet],
    xs: &[VertexSet],
) -> Result<SaplingCandidate, Violation> {
    if ys.len() != xs.len() {
        return Err(Violation::Arity);
    }
    let sys = check_y_system(approx, ys)?;
    let mut pairs = Vec::with_capacity(ys.len());
    for (index, (y, x)) in ys.iter().zip(xs).enumerate() {
        let phi = check_pair(approx, &sys, index, y, x)?;
        pairs.push(SubgraphPair {
            y: y.clone(),
            x: x.clone(),
            phi,
        });
    }
    Ok(SaplingCandidate {
        approx: approx.clone(),
        pairs,
    })
}

/// Every `X` in `S` that can serve as partner of `Y` (condition 4), found by
/// anchoring `Y^{+K}` at each vertex of the common component.
pub(crate) fn partners(
    approx: &ApproxAutomaton,
    sys: &YSystem,
    index: usize,
    y: &VertexSet,
) -> Vec<SubgraphPair> {
    let g = approx.graph();
    let k = approx.presentation.k();
    let yball = g.induced(&g.neighborhood(y, k));
    let y0 = yball.local[y.iter().next().unwrap()];
    let mut out = Vec::new();
    let mut seen: Vec<VertexSet> = Vec::new();
    for &c in &sys.inter {
        let Some(img) = embed_into_host(&yball, g, y0, c) else {
            continue;
        };
        let x: VertexSet = y.iter().map(|v| img[yball.local[v]]).collect();
        if seen.contains(&x) {
            continue;
        }
        seen.push(x.clone());
        if let Ok(phi) = check_pair(approx, sys, index, y, &x) {
            out.push(SubgraphPair {
                y: y.clone(),
                x,
                phi,
            });
        }
    }
    out
}

/// Label-preserving injective map of the (connected) subgraph into `host`
/// sending local `a0` to host vertex `b0`; returns host images.
fn embed_into_host(sub: &Subgraph, host: &InvWordGraph, a0: Vertex, b0: Vertex) -> Option<Vec<Vertex>> {
    let n = sub.graph.vertex_count();
    let mut img: Vec<Option<Vertex>> = vec![None; n];
    let mut used = std::collections::BTreeSet::new();
    img[a0] = Some(b0);
    used.insert(b0);
    let mut stack = vec![a0];
    while let Some(u) = stack.pop() {
        let hu = img[u].unwrap();
        for &(l, v) in sub.graph.out(u) {
            let hv = host.step(hu, l)?;
            match img[v] {
                Some(t) if t == hv => {}
                Some(_) => return None,
                None => {
                    if !used.insert(hv) {
                        return None;
                    }
                    img[v] = Some(hv);
                    stack.push(v);
                }
            }
        }
    }
    img.into_iter().collect()
}

/// Incremental `exp_l(X^{+K})` for condition 5.
#[derive(Clone, Debug)]
pub struct ExpansionProbe {
    graph: InvWordGraph,
    /// `X` vertex (host id) → vertex of `exp_l`
    anchors: BTreeMap<Vertex, Vertex>,
    pub level: usize,
}

impl ExpansionProbe {
    pub fn new(g: &InvWordGraph, x: &VertexSet, k: usize) -> ExpansionProbe {
        let sub = g.induced(&g.neighborhood(x, k));
        ExpansionProbe {
            anchors: x.iter().map(|v| (*v, sub.local[v])).collect(),
            graph: sub.graph,
            level: 0,
        }
    }

    pub fn advance(&mut self, p: &Presentation) {
        let (graph, map) = expand_graph(&self.graph, p);
        self.graph = graph;
        for v in self.anchors.values_mut() {
            *v = map[*v];
        }
        self.level += 1;
    }

    pub fn expansion(&self) -> &InvWordGraph {
        &self.graph
    }

    /// Whether `X ∪ gc` of `g` embeds into the current expansion with `X`
    /// sent to its own image.
    pub fn embeds(&self, g: &InvWordGraph, x: &VertexSet, gc: &VertexSet) -> bool {
        let mut img: BTreeMap<Vertex, Vertex> = BTreeMap::new();
        let mut used = std::collections::BTreeSet::new();
        for (&v, &t) in &self.anchors {
            if !used.insert(t) {
                return false;
            }
            img.insert(v, t);
        }
        let mut stack: Vec<Vertex> = x.iter().copied().collect();
        while let Some(u) = stack.pop() {
            let hu = img[&u];
            for &(l, v) in g.out(u) {
                if !x.contains(&v) && !gc.contains(&v) {
                    continue;
                }
                let Some(hv) = self.graph.step(hu, l) else {
                    return false;
                };
                match img.get(&v) {
                    Some(&t) if t == hv => {}
                    Some(_) => return false,
                    None => {
                        if !used.insert(hv) {
                            return false;
                        }
                        img.insert(v, hv);
                        stack.push(v);
                    }
                }
            }
        }
        img.len() == x.len() + gc.len()
    }
}

/// Condition 5 with bound `k`: returns the sapling or `None` ("not yet").
pub fn sapling_check(c: &SaplingCandidate, k: usize) -> Option<Sapling> {
    let g = c.approx.graph();
    let x0 = c.approx.start();
    let big_k = c.approx.presentation.k();
    for pair in &c.pairs {
        let gc = components_rel(g, &pair.x, x0).expect("x₀ ∉ X").1;
        let mut probe = ExpansionProbe::new(g, &pair.x, big_k);
        for _ in 0..k {
            probe.advance(&c.approx.presentation);
        }
        if !probe.embeds(g, &pair.x, &gc) {
            return None;
        }
    }
    Some(Sapling {
        lineage: initial_lineage(&c.approx, &c.pairs),
        approx: c.approx.clone(),
        pairs: c.pairs.clone(),
        k,
    })
}

/// Re-verifies all five conditions; `Err` names the first failure
/// (condition 5 is reported as `None` inside `Ok`).
pub fn verify(s: &Sapling) -> Result<bool, Violation> {
    candidate_check(&s.approx, &s.ys(), &s.xs())?;
    for (index, pair) in s.pairs.iter().enumerate() {
        check_phi(s, index, pair)?;
    }
    Ok(sapling_check(&s.candidate(), s.k).is_some())
}

/// The stored `φ` is a coloured isomorphism `X^{+K} → Y^{+K}` with `φ(X) = Y`.
fn check_phi(s: &Sapling, index: usize, pair: &SubgraphPair) -> Result<(), Violation> {
    let g = s.graph();
    let k = s.big_k();
    let bad = || Violation::NotIsomorphic { index };
    let xball = g.neighborhood(&pair.x, k);
    let yball = g.neighborhood(&pair.y, k);
    let xs: VertexSet = pair.phi.keys().copied().collect();
    let ys: VertexSet = pair.phi.values().copied().collect();
    if xs != xball || ys != yball {
        return Err(bad());
    }
    let mapped_x: VertexSet = pair.x.iter().map(|v| pair.phi[v]).collect();
    if mapped_x != pair.y {
        return Err(bad());
    }
    let xred = components_rel(g, &pair.x, s.x0()).expect("x₀ ∉ X").1;
    let yred = components_rel(g, &pair.y, s.x0()).expect("x₀ ∉ Y").1;
    for (&u, &fu) in &pair.phi {
        if xred.contains(&u) != yred.contains(&fu) {
            return Err(bad());
        }
        for &(l, v) in g.out(u) {
            if xball.contains(&v) && g.step(fu, l) != Some(pair.phi[&v]) {
                return Err(bad());
            }
        }
    }
    Ok(())
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;
    use crate::stephen::expand;
    use crate::words::InvWord;

    pub fn bicyclic() -> Presentation {
        "letters: a\nrel: a a' = 1\n".parse().unwrap()
    }

    pub fn integers() -> Presentation {
        "letters: a\nrel: a a' = 1\nrel: a' a = 1\n".parse().unwrap()
    }

    pub fn w(s: &str) -> InvWord {
        s.parse().unwrap()
    }

    pub fn set(v: &[Vertex]) -> VertexSet {
        v.iter().copied().collect()
    }

    /// `exp_7(MT(1))` for the bicyclic monoid: the ray `a⁰ … a⁷`, with the
    /// vertex reached by `aⁿ` returned at index `n`.
    pub fn bicyclic_ray(m: usize) -> (ApproxAutomaton, Vec<Vertex>) {
        let a = expand(&w("1"), &bicyclic(), m);
        let mut ids = vec![a.start()];
        for _ in 0..m {
            let next = a.graph().step(*ids.last().unwrap(), w("a").letters()[0]).unwrap();
            ids.push(next);
        }
        (a, ids)
    }
}
