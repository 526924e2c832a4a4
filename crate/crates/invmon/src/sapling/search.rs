use std::collections::BTreeSet;

use super::{check_y_system, initial_lineage, partners, ExpansionProbe, Sapling, SubgraphPair};
use crate::graphs::{components_rel, BirootedAutomaton, InvWordGraph, Vertex, VertexSet};
use crate::stephen::{exp_step, ApproxAutomaton};
use crate::words::{InvWord, Presentation};
use crate::Budget;

/// Caps keeping a single search round bounded on graphs with many
/// connected subsets.
const MAX_Y_SETS: usize = 4000;
const MAX_SYSTEMS: usize = 20000;

#[derive(Clone, Debug)]
pub enum SearchOutcome {
    Sapling(Box<Sapling>),
    /// Some `exp_m(MT(w))` is already P-complete: `𝒮(w)` is finite.
    Finite(ApproxAutomaton),
    /// Budget spent; `m` is the deepest approximation built and `list_len`
    /// the number of candidates still being watched.
    Exhausted { m: usize, list_len: usize },
}

struct Option_ {
    pair: SubgraphPair,
    complement: VertexSet,
    probe: ExpansionProbe,
}

struct Entry {
    approx: ApproxAutomaton,
    options: Vec<Vec<Option_>>,
}

/// Resumable dovetailed search. Round `t` builds `exp_t(MT(w))`, adds every
/// candidate from `(m, D, N)` with `m + D + N = t` (approximation depth,
/// maximal diameter of the `Y`s, number of `Y`s), and checks each watched
/// candidate against one more expansion level.
pub struct SaplingSearch {
    presentation: Presentation,
    exps: Vec<ApproxAutomaton>,
    round: usize,
    entries: Vec<Entry>,
    tried: BTreeSet<(usize, Vec<VertexSet>)>,
    y_sets: Vec<Vec<Vec<VertexSet>>>,
}

impl SaplingSearch {
    pub fn new(w: &InvWord, p: &Presentation) -> SaplingSearch {
        SaplingSearch {
            presentation: p.clone(),
            exps: vec![ApproxAutomaton::new(w, p)],
            round: 0,
            entries: Vec::new(),
            tried: BTreeSet::new(),
            y_sets: Vec::new(),
        }
    }

    /// Deepest approximation built so far.
    pub fn stage(&self) -> usize {
        self.exps.len() - 1
    }

    pub fn list_len(&self) -> usize {
        self.entries.len()
    }

    /// The deepest approximation `exp_m(MT(w))` built so far.
    pub fn latest(&self) -> &ApproxAutomaton {
        self.exps.last().unwrap()
    }

    pub fn rounds(&self) -> usize {
        self.round
    }

    pub fn exhausted(&self) -> SearchOutcome {
        SearchOutcome::Exhausted {
            m: self.stage(),
            list_len: self.list_len(),
        }
    }

    /// Runs one round; `Some` once the search has concluded.
    pub fn step(&mut self) -> Option<SearchOutcome> {
        let t = self.round;
        self.round += 1;
        while self.exps.len() <= t {
            let next = exp_step(self.exps.last().unwrap());
            self.exps.push(next);
        }
        if self.exps[t].is_p_complete() {
            return Some(SearchOutcome::Finite(self.exps[t].clone()));
        }
        for n in 1..=t {
            for d in 0..=t - n {
                self.add_entries(t - n - d, d, n);
            }
        }
        for e in &mut self.entries {
            if let Some(s) = check_entry(e) {
                return Some(SearchOutcome::Sapling(Box::new(s)));
            }
            for opts in &mut e.options {
                for o in opts.iter_mut() {
                    o.probe.advance(&self.presentation);
                }
            }
        }
        None
    }

    fn y_candidates(&mut self, m: usize, d: usize) -> &[VertexSet] {
        while self.y_sets.len() <= m {
            self.y_sets.push(Vec::new());
        }
        while self.y_sets[m].len() <= d {
            let dd = self.y_sets[m].len();
            let sets = connected_sets(&self.exps[m], dd);
            self.y_sets[m].push(sets);
        }
        &self.y_sets[m][d]
    }

    fn add_entries(&mut self, m: usize, d: usize, n: usize) {
        let pool = self.y_candidates(m, d).to_vec();
        let g = self.exps[m].graph().clone();
        let mut systems = Vec::new();
        choose(&g, &pool, n, 0, &mut Vec::new(), &mut systems);
        for idx in systems {
            let mut ys: Vec<VertexSet> = idx.iter().map(|&i| pool[i].clone()).collect();
            ys.sort();
            if !self.tried.insert((m, ys.clone())) {
                continue;
            }
            if let Some(e) = make_entry(&self.exps[m], &ys) {
                self.entries.push(e);
            }
        }
    }
}

/// Connected vertex sets avoiding the word path, of induced diameter at
/// most `d`, in order of size.
fn connected_sets(a: &ApproxAutomaton, d: usize) -> Vec<VertexSet> {
    let g = a.graph();
    let path = a.word_path();
    let mut out: BTreeSet<(usize, VertexSet)> = BTreeSet::new();
    for v in g.vertices().filter(|v| !path.contains(v)) {
        let dist = g.bfs([v], None);
        let allowed: VertexSet = g
            .vertices()
            .filter(|&u| u >= v && !path.contains(&u) && dist[u].map_or(false, |x| x <= d))
            .collect();
        let mut seen: BTreeSet<VertexSet> = BTreeSet::new();
        let mut stack = vec![VertexSet::from([v])];
        while let Some(s) = stack.pop() {
            if !seen.insert(s.clone()) || seen.len() > MAX_Y_SETS {
                continue;
            }
            if g.diameter(&s).map_or(false, |x| x <= d) {
                out.insert((s.len(), s.clone()));
            }
            for &u in &s {
                for &(_, t) in g.out(u) {
                    if allowed.contains(&t) && !s.contains(&t) {
                        let mut bigger = s.clone();
                        bigger.insert(t);
                        if !seen.contains(&bigger) {
                            stack.push(bigger);
                        }
                    }
                }
            }
        }
    }
    out.into_iter().map(|(_, s)| s).take(MAX_Y_SETS).collect()
}

/// `n`-element index sets of pairwise disjoint, non-adjacent sets.
fn choose(
    g: &InvWordGraph,
    pool: &[VertexSet],
    n: usize,
    from: usize,
    cur: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    if out.len() >= MAX_SYSTEMS {
        return;
    }
    if cur.len() == n {
        out.push(cur.clone());
        return;
    }
    for i in from..pool.len() {
        let ok = cur.iter().all(|&j| {
            g.set_distance(&pool[i], &pool[j]).map_or(true, |x| x >= 2)
        });
        if ok {
            cur.push(i);
            choose(g, pool, n, i + 1, cur, out);
            cur.pop();
        }
    }
}

/// Trims `exp_m` to the base component of `⋂ Γ(x₀,Yᵢ) ∪ ⋃ Yᵢ^{+K}` and
/// collects the partners of every `Yᵢ`.
fn make_entry(a: &ApproxAutomaton, ys: &[VertexSet]) -> Option<Entry> {
    let g = a.graph();
    let x0 = a.start();
    let k = a.presentation.k();
    let mut keep = g.all_vertices();
    for y in ys {
        let gam = components_rel(g, y, x0).ok()?.0;
        keep = keep.intersection(&gam).copied().collect();
    }
    for y in ys {
        keep.extend(g.neighborhood(y, k));
    }
    let comp = g.component(x0, &keep);
    let sub = g.induced(&comp);
    let local = |v: &Vertex| sub.local.get(v).copied();
    let ys: Vec<VertexSet> = ys
        .iter()
        .map(|y| y.iter().map(local).collect::<Option<VertexSet>>())
        .collect::<Option<_>>()?;
    let approx = ApproxAutomaton {
        auto: BirootedAutomaton {
            graph: sub.graph,
            start: local(&x0)?,
            end: local(&a.end())?,
        },
        ..a.clone()
    };
    let sys = check_y_system(&approx, &ys).ok()?;
    let mut options = Vec::with_capacity(ys.len());
    for (i, y) in ys.iter().enumerate() {
        let found: Vec<Option_> = partners(&approx, &sys, i, y)
            .into_iter()
            .map(|pair| Option_ {
                complement: components_rel(approx.graph(), &pair.x, approx.start())
                    .expect("x₀ ∉ X")
                    .1,
                probe: ExpansionProbe::new(approx.graph(), &pair.x, k),
                pair,
            })
            .collect();
        if found.is_empty() {
            return None;
        }
        options.push(found);
    }
    Some(Entry { approx, options })
}

fn check_entry(e: &Entry) -> Option<Sapling> {
    let g = e.approx.graph();
    let mut pairs = Vec::with_capacity(e.options.len());
    let mut level = 0;
    for opts in &e.options {
        let o = opts
            .iter()
            .find(|o| o.probe.embeds(g, &o.pair.x, &o.complement))?;
        level = o.probe.level;
        pairs.push(o.pair.clone());
    }
    Some(Sapling {
        lineage: initial_lineage(&e.approx, &pairs),
        approx: e.approx.clone(),
        pairs,
        k: level,
    })
}

/// Searches for a sapling of `𝒮(w)` for up to `budget` rounds.
pub fn find_sapling(w: &InvWord, p: &Presentation, budget: impl Into<Budget>) -> SearchOutcome {
    let budget = budget.into();
    let mut search = SaplingSearch::new(w, p);
    for _ in 0..budget.limit {
        if budget.cancelled() {
            break;
        }
        if let Some(out) = search.step() {
            return out;
        }
    }
    search.exhausted()
}
