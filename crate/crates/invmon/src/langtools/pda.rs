use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graphs::Vertex;
use crate::sapling::Sapling;
use crate::words::Letter;

/// Stack symbols: the bottom marker `Z` and one symbol per sapling pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum StackSym {
    Bottom,
    Pair(usize),
}

impl fmt::Display for StackSym {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StackSym::Bottom => write!(f, "Z"),
            StackSym::Pair(i) => write!(f, "{}", i + 1),
        }
    }
}

impl FromStr for StackSym {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "Z" {
            return Ok(StackSym::Bottom);
        }
        match s.parse::<usize>() {
            Ok(i) if i >= 1 => Ok(StackSym::Pair(i - 1)),
            _ => Err(format!("bad stack symbol {s:?}")),
        }
    }
}

/// `from --input, pop → push--> to`; `push` is listed top first.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct PdaTransition {
    pub from: usize,
    pub input: Option<Letter>,
    pub pop: StackSym,
    pub push: Vec<StackSym>,
    pub to: usize,
}

/// Pushdown automaton accepting by final state, starting with `Z`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pda {
    pub states: usize,
    /// How many pair symbols the stack alphabet has.
    pub pairs: usize,
    pub initial: usize,
    pub terminal: usize,
    pub transitions: Vec<PdaTransition>,
}

impl Pda {
    pub fn stack_alphabet(&self) -> Vec<StackSym> {
        std::iter::once(StackSym::Bottom)
            .chain((0..self.pairs).map(StackSym::Pair))
            .collect()
    }

    pub fn has_stack_moves(&self) -> bool {
        self.transitions.iter().any(|t| t.push != [t.pop])
    }
}

/// The pushdown automaton of a sapling: `S₀`, one copy `ψᵢ` of each
/// `Γᶜ(x₀,Xᵢ)`, and a terminal state `f`. The stack records which copies
/// the run has descended into.
pub fn build_pda(s: &Sapling) -> Pda {
    let g = s.graph();
    let n0 = g.vertex_count();
    let k = s.big_k();
    let x0 = s.x0();
    let complements = s.x_complements();
    let mut psi: Vec<BTreeMap<Vertex, usize>> = Vec::new();
    let mut next = n0;
    for gc in &complements {
        psi.push(
            gc.iter()
                .map(|&v| {
                    next += 1;
                    (v, next - 1)
                })
                .collect(),
        );
    }
    let f = next;
    let syms: Vec<StackSym> = std::iter::once(StackSym::Bottom)
        .chain((0..s.pairs.len()).map(StackSym::Pair))
        .collect();
    let mut ts = Vec::new();
    ts.push(PdaTransition {
        from: s.approx.end(),
        input: None,
        pop: StackSym::Bottom,
        push: vec![StackSym::Bottom],
        to: f,
    });
    let inherit = |ts: &mut Vec<PdaTransition>, u: usize, l: Letter, v: usize| {
        for &sym in &syms {
            ts.push(PdaTransition {
                from: u,
                input: Some(l),
                pop: sym,
                push: vec![sym],
                to: v,
            });
        }
    };
    for (u, l, v) in g.edges() {
        inherit(&mut ts, u, l, v);
        inherit(&mut ts, v, l.inverse(), u);
    }
    for (i, gc) in complements.iter().enumerate() {
        for (u, l, v) in g.edges() {
            if let (Some(&a), Some(&b)) = (psi[i].get(&u), psi[i].get(&v)) {
                inherit(&mut ts, a, l, b);
                inherit(&mut ts, b, l.inverse(), a);
            }
        }
        let pair = &s.pairs[i];
        let overlap: Vec<Vertex> = g
            .neighborhood(&pair.x, k)
            .into_iter()
            .filter(|v| gc.contains(v))
            .collect();
        let me = StackSym::Pair(i);
        for &u in &overlap {
            let there = psi[i][&u];
            let here = pair.phi[&u];
            stack_pair(&mut ts, &syms, here, there, me);
        }
        // descending from copy i into copy j where Yⱼ lies beyond Xᵢ
        for (j, other) in s.pairs.iter().enumerate() {
            if !other.y.is_subset(gc) {
                continue;
            }
            let gcj = &complements[j];
            let overlap_j = g.neighborhood(&other.x, k).into_iter().filter(|v| gcj.contains(v));
            for u in overlap_j {
                if let Some(&here) = psi[i].get(&other.phi[&u]) {
                    stack_pair(&mut ts, &syms, here, psi[j][&u], StackSym::Pair(j));
                }
            }
        }
    }
    ts.sort();
    ts.dedup();
    Pda {
        states: f + 1,
        pairs: s.pairs.len(),
        initial: x0,
        terminal: f,
        transitions: ts,
    }
}

/// `here →(ε, k→ik) there` for every `k`, and `there →(ε, i→ε) here`.
fn stack_pair(ts: &mut Vec<PdaTransition>, syms: &[StackSym], here: usize, there: usize, i: StackSym) {
    for &k in syms {
        ts.push(PdaTransition {
            from: here,
            input: None,
            pop: k,
            push: vec![i, k],
            to: there,
        });
    }
    ts.push(PdaTransition {
        from: there,
        input: None,
        pop: i,
        push: vec![],
        to: here,
    });
}

#[derive(Debug, Error)]
pub enum PdaIoError {
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Field(String),
}

#[derive(Serialize, Deserialize)]
struct PdaDoc {
    states: Vec<usize>,
    stack: Vec<String>,
    initial: usize,
    #[serde(rename = "final")]
    terminal: usize,
    transitions: Vec<PdaEdge>,
}

#[derive(Serialize, Deserialize)]
struct PdaEdge {
    from: usize,
    input: Option<String>,
    pop: String,
    push: Vec<String>,
    to: usize,
}

impl Pda {
    pub fn to_json(&self) -> String {
        let doc = PdaDoc {
            states: (0..self.states).collect(),
            stack: self.stack_alphabet().iter().map(|s| s.to_string()).collect(),
            initial: self.initial,
            terminal: self.terminal,
            transitions: self
                .transitions
                .iter()
                .map(|t| PdaEdge {
                    from: t.from,
                    input: t.input.map(|l| l.to_string()),
                    pop: t.pop.to_string(),
                    push: t.push.iter().map(|s| s.to_string()).collect(),
                    to: t.to,
                })
                .collect(),
        };
        serde_json::to_string_pretty(&doc).expect("automaton serialises")
    }

    pub fn from_json(text: &str) -> Result<Pda, PdaIoError> {
        let doc: PdaDoc = serde_json::from_str(text)?;
        let n = doc.states.len();
        let state = |q: usize| {
            if q < n {
                Ok(q)
            } else {
                Err(PdaIoError::Field(format!("state {q} out of range")))
            }
        };
        let stack: Vec<StackSym> = doc
            .stack
            .iter()
            .map(|s| s.parse().map_err(PdaIoError::Field))
            .collect::<Result<_, _>>()?;
        let pairs = stack.iter().filter(|s| matches!(s, StackSym::Pair(_))).count();
        let sym = |s: &str| -> Result<StackSym, PdaIoError> {
            let v: StackSym = s.parse().map_err(PdaIoError::Field)?;
            if stack.contains(&v) {
                Ok(v)
            } else {
                Err(PdaIoError::Field(format!("stack symbol {s} not declared")))
            }
        };
        let mut transitions = Vec::with_capacity(doc.transitions.len());
        for e in &doc.transitions {
            transitions.push(PdaTransition {
                from: state(e.from)?,
                input: match &e.input {
                    None => None,
                    Some(s) => Some(s.parse().map_err(|_| PdaIoError::Field(format!("bad label {s:?}")))?),
                },
                pop: sym(&e.pop)?,
                push: e.push.iter().map(|s| sym(s)).collect::<Result<_, _>>()?,
                to: state(e.to)?,
            });
        }
        Ok(Pda {
            states: n,
            pairs,
            initial: state(doc.initial)?,
            terminal: state(doc.terminal)?,
            transitions,
        })
    }
}
