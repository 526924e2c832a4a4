//! Inverse word graphs: finite edge-labelled graphs whose edges come in
//! inverse pairs `(u, x, v)` / `(v, x⁻¹, u)`.
//!
//! Vertices are dense indices `0..n`. All structural equality claims are up
//! to isomorphism; use [`rooted_iso`] or [`colored_iso`] to compare.

mod fold;
mod io;
mod iso;

pub use fold::{fold, fold_with, Folding};
pub use io::{export_dot, export_json, import_json, EdgeDoc, GraphDoc, GraphIoError, Marks};
pub use iso::{anchored_map, colored_iso, rooted_iso, Color, ColoredBall};

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use thiserror::Error;

use crate::words::{InvWord, Letter};

pub type Vertex = usize;
pub type VertexSet = BTreeSet<Vertex>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("base vertex {0} lies inside the separating set")]
    BaseInSet(Vertex),
    #[error("vertex {0} is out of range")]
    NoSuchVertex(Vertex),
}

#[derive(Clone, Default)]
pub struct InvWordGraph {
    adj: Vec<Vec<(Letter, Vertex)>>,
}

/// A walk: `vertices[i] --labels[i]--> vertices[i + 1]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Path {
    pub vertices: Vec<Vertex>,
    pub labels: Vec<Letter>,
}

impl Path {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn label(&self) -> InvWord {
        self.labels.iter().copied().collect()
    }
}

/// An induced subgraph together with the embedding into its host.
#[derive(Clone, Debug)]
pub struct Subgraph {
    pub graph: InvWordGraph,
    /// local vertex → host vertex
    pub host: Vec<Vertex>,
    /// host vertex → local vertex
    pub local: BTreeMap<Vertex, Vertex>,
}

impl InvWordGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_vertices(n: usize) -> Self {
        InvWordGraph {
            adj: vec![Vec::new(); n],
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    pub fn vertices(&self) -> std::ops::Range<Vertex> {
        0..self.adj.len()
    }

    pub fn all_vertices(&self) -> VertexSet {
        self.vertices().collect()
    }

    pub fn add_vertex(&mut self) -> Vertex {
        self.adj.push(Vec::new());
        self.adj.len() - 1
    }

    /// Adds `u --l--> v` and its inverse `v --l⁻¹--> u`; an already present
    /// edge is not duplicated.
    pub fn add_edge(&mut self, u: Vertex, l: Letter, v: Vertex) {
        if self.adj[u].contains(&(l, v)) {
            return;
        }
        self.adj[u].push((l, v));
        self.adj[v].push((l.inverse(), u));
    }

    /// Adds a fresh simple path labelled `word` from `u` to `v`. The word
    /// must be nonempty.
    pub fn add_path(&mut self, u: Vertex, word: &InvWord, v: Vertex) {
        let letters = word.letters();
        assert!(!letters.is_empty(), "cannot add an empty path");
        let mut cur = u;
        for (i, &l) in letters.iter().enumerate() {
            let next = if i + 1 == letters.len() {
                v
            } else {
                self.add_vertex()
            };
            self.add_edge(cur, l, next);
            cur = next;
        }
    }

    /// Outgoing edges of `v`, inverse edges included.
    pub fn out(&self, v: Vertex) -> &[(Letter, Vertex)] {
        &self.adj[v]
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.adj[v].len()
    }

    /// Target of some `l`-edge leaving `v` (the unique one when deterministic).
    pub fn step(&self, v: Vertex, l: Letter) -> Option<Vertex> {
        self.adj[v].iter().find(|e| e.0 == l).map(|e| e.1)
    }

    pub fn is_deterministic(&self) -> bool {
        self.adj.iter().all(|out| {
            let mut seen = BTreeSet::new();
            out.iter().all(|(l, _)| seen.insert(*l))
        })
    }

    /// Each inverse pair once, as its positively labelled member; sorted.
    pub fn edges(&self) -> Vec<(Vertex, Letter, Vertex)> {
        let mut out: Vec<_> = self
            .adj
            .iter()
            .enumerate()
            .flat_map(|(u, es)| {
                es.iter()
                    .filter(|(l, _)| l.is_positive())
                    .map(move |&(l, v)| (u, l, v))
            })
            .collect();
        out.sort();
        out
    }

    pub fn edge_count(&self) -> usize {
        self.adj
            .iter()
            .map(|es| es.iter().filter(|(l, _)| l.is_positive()).count())
            .sum()
    }

    pub fn letters(&self) -> BTreeSet<Letter> {
        self.adj.iter().flatten().map(|e| e.0).collect()
    }

    /// Endpoint of the path labelled `u` from `v`, if every step exists.
    pub fn read_word(&self, v: Vertex, u: &InvWord) -> Option<Vertex> {
        u.letters().iter().try_fold(v, |cur, &l| self.step(cur, l))
    }

    /// Like [`read_word`](Self::read_word) but records the visited vertices.
    pub fn read_path(&self, v: Vertex, u: &InvWord) -> Option<Vec<Vertex>> {
        let mut out = vec![v];
        let mut cur = v;
        for &l in u.letters() {
            cur = self.step(cur, l)?;
            out.push(cur);
        }
        Some(out)
    }

    /// Reads `u` from `v` using only vertices of `within`.
    pub fn read_word_within(&self, v: Vertex, u: &InvWord, within: &VertexSet) -> Option<Vertex> {
        if !within.contains(&v) {
            return None;
        }
        u.letters().iter().try_fold(v, |cur, &l| {
            self.step(cur, l).filter(|t| within.contains(t))
        })
    }

    /// Multi-source BFS distances; `within` restricts to an induced subgraph.
    pub fn bfs(
        &self,
        sources: impl IntoIterator<Item = Vertex>,
        within: Option<&VertexSet>,
    ) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.adj.len()];
        let mut queue = VecDeque::new();
        for s in sources {
            if within.map_or(true, |w| w.contains(&s)) && dist[s].is_none() {
                dist[s] = Some(0);
                queue.push_back(s);
            }
        }
        while let Some(u) = queue.pop_front() {
            let d = dist[u].unwrap();
            for &(_, v) in &self.adj[u] {
                if dist[v].is_none() && within.map_or(true, |w| w.contains(&v)) {
                    dist[v] = Some(d + 1);
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    /// `None` means infinity.
    pub fn distance(&self, u: Vertex, v: Vertex) -> Option<usize> {
        self.bfs([u], None)[v]
    }

    /// Distance between vertex sets (`None` if either is empty or they are
    /// disconnected).
    pub fn set_distance(&self, a: &VertexSet, b: &VertexSet) -> Option<usize> {
        let d = self.bfs(a.iter().copied(), None);
        b.iter().filter_map(|&v| d[v]).min()
    }

    /// One shortest path from `u` to `v`.
    pub fn geodesic(&self, u: Vertex, v: Vertex) -> Option<Path> {
        let mut parent: Vec<Option<(Vertex, Letter)>> = vec![None; self.adj.len()];
        let mut seen = vec![false; self.adj.len()];
        let mut queue = VecDeque::from([u]);
        seen[u] = true;
        while let Some(x) = queue.pop_front() {
            if x == v {
                break;
            }
            for &(l, y) in &self.adj[x] {
                if !seen[y] {
                    seen[y] = true;
                    parent[y] = Some((x, l));
                    queue.push_back(y);
                }
            }
        }
        if !seen[v] {
            return None;
        }
        let mut vertices = vec![v];
        let mut labels = Vec::new();
        let mut cur = v;
        while let Some((p, l)) = parent[cur] {
            vertices.push(p);
            labels.push(l);
            cur = p;
        }
        vertices.reverse();
        labels.reverse();
        Some(Path { vertices, labels })
    }

    /// Vertex set of `X^{+r}`.
    pub fn neighborhood(&self, x: &VertexSet, r: usize) -> VertexSet {
        self.bfs(x.iter().copied(), None)
            .into_iter()
            .enumerate()
            .filter(|(_, d)| d.map_or(false, |d| d <= r))
            .map(|(v, _)| v)
            .collect()
    }

    /// The induced subgraph on `set`, with vertices renumbered in increasing
    /// host order.
    pub fn induced(&self, set: &VertexSet) -> Subgraph {
        let host: Vec<Vertex> = set.iter().copied().collect();
        let local: BTreeMap<Vertex, Vertex> =
            host.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let mut graph = InvWordGraph::with_vertices(host.len());
        for (i, &v) in host.iter().enumerate() {
            for &(l, t) in &self.adj[v] {
                if let Some(&j) = local.get(&t) {
                    graph.adj[i].push((l, j));
                }
            }
        }
        Subgraph { graph, host, local }
    }

    /// The connected component of `v` inside the induced subgraph on `within`.
    pub fn component(&self, v: Vertex, within: &VertexSet) -> VertexSet {
        self.bfs([v], Some(within))
            .into_iter()
            .enumerate()
            .filter(|(_, d)| d.is_some())
            .map(|(u, _)| u)
            .collect()
    }

    /// Connected components of the induced subgraph on `within`, ordered by
    /// smallest vertex.
    pub fn components(&self, within: &VertexSet) -> Vec<VertexSet> {
        let mut left = within.clone();
        let mut out = Vec::new();
        while let Some(&v) = left.iter().next() {
            let c = self.component(v, within);
            for u in &c {
                left.remove(u);
            }
            out.push(c);
        }
        out
    }

    pub fn is_connected_set(&self, set: &VertexSet) -> bool {
        match set.iter().next() {
            None => true,
            Some(&v) => self.component(v, set).len() == set.len(),
        }
    }

    pub fn is_connected(&self) -> bool {
        self.is_connected_set(&self.all_vertices())
    }

    /// Diameter of the induced subgraph on `set`; `None` if it is disconnected.
    /// The empty set has diameter 0.
    pub fn diameter(&self, set: &VertexSet) -> Option<usize> {
        let mut best = 0;
        for &v in set {
            let d = self.bfs([v], Some(set));
            for &u in set {
                best = best.max(d[u]?);
            }
        }
        Some(best)
    }

    /// Acyclic as an undirected graph (loops and parallel pairs are cycles).
    pub fn is_forest(&self) -> bool {
        let comps = self.components(&self.all_vertices()).len();
        self.edge_count() + comps == self.vertex_count()
    }

    /// Appends a disjoint copy of `other`; returns the offset of its vertices.
    pub fn append(&mut self, other: &InvWordGraph) -> Vertex {
        let off = self.adj.len();
        for es in &other.adj {
            self.adj
                .push(es.iter().map(|&(l, v)| (l, v + off)).collect());
        }
        off
    }

    fn canonical(&self) -> (usize, Vec<(Vertex, Letter, Vertex)>) {
        (self.vertex_count(), self.edges())
    }
}

impl PartialEq for InvWordGraph {
    /// Equality of labelled graphs on the same vertex ids (not isomorphism).
    fn eq(&self, other: &Self) -> bool {
        self.canonical() == other.canonical()
    }
}

impl Eq for InvWordGraph {}

impl std::fmt::Debug for InvWordGraph {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "InvWordGraph({} vertices; ", self.vertex_count())?;
        for (i, (u, l, v)) in self.edges().into_iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{u}-{l}->{v}")?;
        }
        write!(f, ")")
    }
}

/// `(Γ(x₀,X), Γᶜ(x₀,X))`: the component of `g ∖ X` containing `x0`, and the
/// rest of `g ∖ X`.
pub fn components_rel(
    g: &InvWordGraph,
    x: &VertexSet,
    x0: Vertex,
) -> Result<(VertexSet, VertexSet), GraphError> {
    if x0 >= g.vertex_count() {
        return Err(GraphError::NoSuchVertex(x0));
    }
    if x.contains(&x0) {
        return Err(GraphError::BaseInSet(x0));
    }
    let outside: VertexSet = g.vertices().filter(|v| !x.contains(v)).collect();
    let inner = g.component(x0, &outside);
    let rest = outside.difference(&inner).copied().collect();
    Ok((inner, rest))
}

/// A graph with an initial and a terminal vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BirootedAutomaton {
    pub graph: InvWordGraph,
    pub start: Vertex,
    pub end: Vertex,
}

impl BirootedAutomaton {
    pub fn accepts(&self, u: &InvWord) -> bool {
        self.graph.read_word(self.start, u) == Some(self.end)
    }
}
