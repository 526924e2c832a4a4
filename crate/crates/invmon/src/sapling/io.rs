use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{initial_lineage, Sapling, SubgraphPair};
use crate::graphs::{BirootedAutomaton, EdgeDoc, GraphDoc, GraphIoError, Marks, VertexSet};
use crate::stephen::ApproxAutomaton;
use crate::words::ParseError;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhiEntry {
    pub pair: usize,
    pub from: usize,
    pub to: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Roots {
    pub start: usize,
    pub end: usize,
}

/// On-disk sapling: the graph schema plus the pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SaplingDoc {
    pub vertices: Vec<usize>,
    pub edges: Vec<EdgeDoc>,
    #[serde(default)]
    pub marks: Marks,
    #[serde(rename = "Y")]
    pub y: Vec<Vec<usize>>,
    #[serde(rename = "X")]
    pub x: Vec<Vec<usize>>,
    pub phi: Vec<PhiEntry>,
    pub k: usize,
    #[serde(rename = "K")]
    pub big_k: usize,
    pub roots: Roots,
    pub presentation: String,
    pub word: String,
    #[serde(default)]
    pub stage: usize,
}

#[derive(Debug, Error)]
pub enum SaplingIoError {
    #[error(transparent)]
    Graph(#[from] GraphIoError),
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("inconsistent sapling document: {0}")]
    Shape(String),
}

impl SaplingDoc {
    pub fn from_sapling(s: &Sapling) -> SaplingDoc {
        let g = GraphDoc::from_graph(s.graph(), Marks::new());
        SaplingDoc {
            vertices: g.vertices,
            edges: g.edges,
            marks: g.marks,
            y: s.pairs.iter().map(|p| p.y.iter().copied().collect()).collect(),
            x: s.pairs.iter().map(|p| p.x.iter().copied().collect()).collect(),
            phi: s
                .pairs
                .iter()
                .enumerate()
                .flat_map(|(i, p)| {
                    p.phi.iter().map(move |(&from, &to)| PhiEntry { pair: i, from, to })
                })
                .collect(),
            k: s.k,
            big_k: s.big_k(),
            roots: Roots {
                start: s.x0(),
                end: s.approx.end(),
            },
            presentation: s.presentation().to_string(),
            word: s.approx.word.to_string(),
            stage: s.approx.stage,
        }
    }

    pub fn to_sapling(&self) -> Result<Sapling, SaplingIoError> {
        let graph = GraphDoc {
            vertices: self.vertices.clone(),
            edges: self.edges.clone(),
            marks: Marks::new(),
        }
        .to_graph()?;
        let presentation = self.presentation.parse::<crate::words::Presentation>()?;
        let word = presentation.word(&self.word)?;
        let n = graph.vertex_count();
        let bad = |m: &str| SaplingIoError::Shape(m.to_string());
        if self.roots.start >= n || self.roots.end >= n {
            return Err(bad("root out of range"));
        }
        if self.x.len() != self.y.len() {
            return Err(bad("X and Y differ in length"));
        }
        if self.big_k != presentation.k() {
            return Err(bad("K does not match the presentation"));
        }
        let mut pairs: Vec<SubgraphPair> = self
            .y
            .iter()
            .zip(&self.x)
            .map(|(y, x)| SubgraphPair {
                y: y.iter().copied().collect::<VertexSet>(),
                x: x.iter().copied().collect::<VertexSet>(),
                phi: BTreeMap::new(),
            })
            .collect();
        for e in &self.phi {
            let p = pairs.get_mut(e.pair).ok_or_else(|| bad("phi entry for unknown pair"))?;
            if e.from >= n || e.to >= n {
                return Err(bad("phi vertex out of range"));
            }
            p.phi.insert(e.from, e.to);
        }
        if pairs.iter().any(|p| p.x.iter().chain(&p.y).any(|&v| v >= n)) {
            return Err(bad("X/Y vertex out of range"));
        }
        let approx = ApproxAutomaton {
            auto: BirootedAutomaton {
                graph,
                start: self.roots.start,
                end: self.roots.end,
            },
            presentation,
            stage: self.stage,
            word,
        };
        Ok(Sapling {
            lineage: initial_lineage(&approx, &pairs),
            approx,
            pairs,
            k: self.k,
        })
    }
}

impl Sapling {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&SaplingDoc::from_sapling(self)).expect("sapling serialises")
    }

    pub fn from_json(text: &str) -> Result<Sapling, SaplingIoError> {
        serde_json::from_str::<SaplingDoc>(text)?.to_sapling()
    }
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::*;
    use super::super::{candidate_check, sapling_check, verify};
    use super::*;

    #[test]
    fn json_round_trip() {
        let (a, r) = bicyclic_ray(7);
        let c = candidate_check(&a, &[set(&[r[5]])], &[set(&[r[2]])]).unwrap();
        let s = sapling_check(&c, 3).unwrap();
        let text = s.to_json();
        let back = Sapling::from_json(&text).unwrap();
        assert_eq!(back.pairs, s.pairs);
        assert_eq!(back.graph(), s.graph());
        assert_eq!(back.k, 3);
        assert_eq!(verify(&back), Ok(true));
        assert_eq!(back.to_json(), text);
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["K"], 2);
        assert_eq!(v["Y"][0].as_array().unwrap().len(), 1);
    }

    #[test]
    fn rejects_bad_documents() {
        let (a, r) = bicyclic_ray(7);
        let c = candidate_check(&a, &[set(&[r[5]])], &[set(&[r[2]])]).unwrap();
        let mut doc = SaplingDoc::from_sapling(&sapling_check(&c, 3).unwrap());
        doc.big_k = 5;
        assert!(matches!(doc.to_sapling(), Err(SaplingIoError::Shape(_))));
        assert!(Sapling::from_json("{").is_err());
    }
}
