use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::InvWordGraph;
use crate::words::Letter;

/// Free-form vertex annotations (roots, colours, ...).
pub type Marks = BTreeMap<String, serde_json::Value>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeDoc {
    pub src: usize,
    pub label: String,
    pub dst: usize,
}

/// On-disk graph document. Only one edge of each inverse pair is stored.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphDoc {
    pub vertices: Vec<usize>,
    pub edges: Vec<EdgeDoc>,
    #[serde(default)]
    pub marks: Marks,
}

#[derive(Debug, Error)]
pub enum GraphIoError {
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("vertex ids must be exactly 0..{0} without repetition")]
    VertexIds(usize),
    #[error("edge refers to unknown vertex {0}")]
    UnknownVertex(usize),
    #[error("bad edge label {0:?}")]
    Label(String),
}

impl GraphDoc {
    pub fn from_graph(g: &InvWordGraph, marks: Marks) -> GraphDoc {
        GraphDoc {
            vertices: g.vertices().collect(),
            edges: g
                .edges()
                .into_iter()
                .map(|(src, l, dst)| EdgeDoc {
                    src,
                    label: l.to_string(),
                    dst,
                })
                .collect(),
            marks,
        }
    }

    pub fn to_graph(&self) -> Result<InvWordGraph, GraphIoError> {
        let n = self.vertices.len();
        let mut seen = vec![false; n];
        for &v in &self.vertices {
            if v >= n || std::mem::replace(&mut seen[v], true) {
                return Err(GraphIoError::VertexIds(n));
            }
        }
        let mut g = InvWordGraph::with_vertices(n);
        for e in &self.edges {
            for v in [e.src, e.dst] {
                if v >= n {
                    return Err(GraphIoError::UnknownVertex(v));
                }
            }
            let l: Letter = e
                .label
                .parse()
                .map_err(|_| GraphIoError::Label(e.label.clone()))?;
            g.add_edge(e.src, l, e.dst);
        }
        Ok(g)
    }
}

pub fn export_json(g: &InvWordGraph, marks: &Marks) -> String {
    serde_json::to_string_pretty(&GraphDoc::from_graph(g, marks.clone())).expect("graph serialises")
}

pub fn import_json(text: &str) -> Result<(InvWordGraph, Marks), GraphIoError> {
    let doc: GraphDoc = serde_json::from_str(text)?;
    Ok((doc.to_graph()?, doc.marks))
}

/// Graphviz rendering, one arc per inverse pair.
pub fn export_dot(g: &InvWordGraph) -> String {
    let mut out = String::from("digraph G {\n  node [shape=circle];\n");
    for v in g.vertices() {
        let _ = writeln!(out, "  {v};");
    }
    for (u, l, v) in g.edges() {
        let _ = writeln!(out, "  {u} -> {v} [label=\"{l}\"];");
    }
    out.push_str("}\n");
    out
}
