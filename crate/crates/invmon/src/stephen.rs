//! Munn trees and Stephen's procedure.
//!
//! `exp_i(MT(w))` is obtained from the Munn tree of `w` by `i` rounds of
//! "adjoin every missing relation path, then fold". Every stage is an
//! approximate automaton: it accepts `w` and only words `u` with `uτ ≥ wτ`.
//!
//! ```
//! use invmon::stephen::expand;
//! use invmon::words::Presentation;
//!
//! let p: Presentation = "letters: a\nrel: a a' = 1\n".parse().unwrap();
//! let a3 = expand(&p.word("1").unwrap(), &p, 3);
//! assert_eq!(a3.graph().edge_count(), 3); // a ray 1 - a - a² - a³
//! assert!(a3.accepts(&p.word("a a a' a'").unwrap()));
//! ```

use std::collections::BTreeSet;

use thiserror::Error;

use crate::graphs::{fold_with, rooted_iso, BirootedAutomaton, InvWordGraph, Vertex, VertexSet};
use crate::words::{InvWord, Letter, Presentation, Symbol};
use crate::Budget;

/// The Munn tree of `w`: free-group prefixes of `w`, birooted at `1` and the
/// reduced form of `w`.
pub fn munn_tree(w: &InvWord) -> BirootedAutomaton {
    let mut graph = InvWordGraph::with_vertices(1);
    let mut cur = 0;
    for &l in w.letters() {
        cur = match graph.step(cur, l) {
            Some(v) => v,
            None => {
                let v = graph.add_vertex();
                graph.add_edge(cur, l, v);
                v
            }
        };
    }
    BirootedAutomaton {
        graph,
        start: 0,
        end: cur,
    }
}

/// Equality in the free inverse monoid.
pub fn fim_equal(u: &InvWord, w: &InvWord) -> bool {
    rooted_iso(&munn_tree(u), &munn_tree(w))
}

/// A full P-expansion before folding. Relations with an empty side cannot be
/// realised as a fresh path; their instances are listed in `identify`
/// instead, to be glued by the subsequent fold.
#[derive(Clone, Debug)]
pub struct Expansion {
    pub graph: InvWordGraph,
    pub identify: Vec<(Vertex, Vertex)>,
}

/// Every relation instance `u --s--> v` (either orientation) lacking a
/// parallel `t`-path, as `(u, t, v)`. Scans `g` only.
pub fn missing_paths(g: &InvWordGraph, p: &Presentation) -> Vec<(Vertex, InvWord, Vertex)> {
    missing_paths_from(g, p, g.vertices())
}

fn missing_paths_from(
    g: &InvWordGraph,
    p: &Presentation,
    from: impl IntoIterator<Item = Vertex> + Clone,
) -> Vec<(Vertex, InvWord, Vertex)> {
    let mut out = Vec::new();
    let mut seen = BTreeSet::new();
    for (s, t) in p.oriented() {
        for u in from.clone() {
            if let Some(v) = g.read_word(u, &s) {
                if g.read_word(u, &t) != Some(v) && seen.insert((u, t.clone(), v)) {
                    out.push((u, t.clone(), v));
                }
            }
        }
    }
    out
}

pub fn full_p_expansion(g: &InvWordGraph, p: &Presentation) -> Expansion {
    let mut graph = g.clone();
    let mut identify = Vec::new();
    for (u, t, v) in missing_paths(g, p) {
        if t.is_empty() {
            identify.push((u, v));
        } else {
            graph.add_path(u, &t, v);
        }
    }
    Expansion { graph, identify }
}

/// One round of expansion followed by folding; returns the new graph and
/// the image of every old vertex.
pub fn expand_graph(g: &InvWordGraph, p: &Presentation) -> (InvWordGraph, Vec<Vertex>) {
    let e = full_p_expansion(g, p);
    let f = fold_with(&e.graph, &e.identify);
    let map = f.map[..g.vertex_count()].to_vec();
    (f.graph, map)
}

/// `exp_i(MT(w))` together with its provenance.
#[derive(Clone, Debug)]
pub struct ApproxAutomaton {
    pub auto: BirootedAutomaton,
    pub presentation: Presentation,
    pub stage: usize,
    pub word: InvWord,
}

impl ApproxAutomaton {
    pub fn new(w: &InvWord, p: &Presentation) -> ApproxAutomaton {
        ApproxAutomaton {
            auto: munn_tree(w),
            presentation: p.clone(),
            stage: 0,
            word: w.clone(),
        }
    }

    pub fn graph(&self) -> &InvWordGraph {
        &self.auto.graph
    }

    pub fn start(&self) -> Vertex {
        self.auto.start
    }

    pub fn end(&self) -> Vertex {
        self.auto.end
    }

    pub fn accepts(&self, u: &InvWord) -> bool {
        self.auto.accepts(u)
    }

    /// Vertices of the path labelled by the defining word, from the start.
    pub fn word_path(&self) -> VertexSet {
        self.graph()
            .read_path(self.start(), &self.word)
            .expect("an approximate automaton accepts its own word")
            .into_iter()
            .collect()
    }

    pub fn is_p_complete(&self) -> bool {
        is_p_complete(self.graph(), &self.presentation)
    }
}

pub fn exp_step(a: &ApproxAutomaton) -> ApproxAutomaton {
    let (graph, map) = expand_graph(a.graph(), &a.presentation);
    ApproxAutomaton {
        auto: BirootedAutomaton {
            graph,
            start: map[a.start()],
            end: map[a.end()],
        },
        presentation: a.presentation.clone(),
        stage: a.stage + 1,
        word: a.word.clone(),
    }
}

/// `exp_n(MT(w))`.
pub fn expand(w: &InvWord, p: &Presentation, n: usize) -> ApproxAutomaton {
    let mut a = ApproxAutomaton::new(w, p);
    for _ in 0..n {
        a = exp_step(&a);
    }
    a
}

pub fn is_p_complete(g: &InvWordGraph, p: &Presentation) -> bool {
    missing_paths(g, p).is_empty()
}

/// Every relation path that stays inside `sub` has a parallel path in `g`.
pub fn is_relatively_p_complete(sub: &VertexSet, g: &InvWordGraph, p: &Presentation) -> bool {
    relative_p_violation(sub, g, p).is_none()
}

/// First `(u, s, t)` with an `s`-path from `u` inside `sub` but no parallel
/// `t`-path in `g`.
pub fn relative_p_violation(
    sub: &VertexSet,
    g: &InvWordGraph,
    p: &Presentation,
) -> Option<(Vertex, InvWord, InvWord)> {
    for (s, t) in p.oriented() {
        for &u in sub {
            if let Some(v) = g.read_word_within(u, &s, sub) {
                if g.read_word(u, &t) != Some(v) {
                    return Some((u, s, t));
                }
            }
        }
    }
    None
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Acceptance {
    Yes,
    Unknown,
}

/// `Yes` if `exp_n(MT(w_target))` accepts `u`, which proves `uτ ≥ w_targetτ`.
pub fn approx_accepts(w_target: &InvWord, u: &InvWord, p: &Presentation, n: usize) -> Acceptance {
    if expand(w_target, p, n).accepts(u) {
        Acceptance::Yes
    } else {
        Acceptance::Unknown
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SemiDecision {
    Equal,
    Exhausted,
}

/// Tries stages `0..=budget` in both directions; `Equal` as soon as each
/// word is accepted by an approximation of the other's automaton.
pub fn decide_semi(u: &InvWord, v: &InvWord, p: &Presentation, budget: impl Into<Budget>) -> SemiDecision {
    let budget = budget.into();
    let mut au = ApproxAutomaton::new(u, p);
    let mut av = ApproxAutomaton::new(v, p);
    let (mut v_in_u, mut u_in_v) = (false, false);
    for n in 0..=budget.limit {
        if budget.cancelled() {
            break;
        }
        if n > 0 {
            if !v_in_u {
                au = exp_step(&au);
            }
            if !u_in_v {
                av = exp_step(&av);
            }
        }
        v_in_u = v_in_u || au.accepts(v);
        u_in_v = u_in_v || av.accepts(u);
        if v_in_u && u_in_v {
            return SemiDecision::Equal;
        }
    }
    SemiDecision::Exhausted
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EWordError {
    #[error("the letter {0} is reserved for the new generator")]
    ReservedLetter(String),
    #[error(transparent)]
    Alphabet(#[from] crate::words::ParseError),
}

/// `e(u₁,…,u_m) = u₁u₁⁻¹ u₂u₂⁻¹ … u_mu_m⁻¹`.
pub fn e_word(factors: &[InvWord]) -> InvWord {
    factors
        .iter()
        .fold(InvWord::empty(), |acc, u| acc.concat(u).concat(&u.inverse()))
}

/// `Inv⟨A, t | e·r₁ = 1, r₂ = 1, …⟩` with
/// `e = e(a₁,…,aₙ, t w₁ t⁻¹, …, t w_k t⁻¹, a₁⁻¹,…,aₙ⁻¹)`. With no relators
/// the single relation `e = 1` is used.
pub fn build_e_presentation(
    alphabet: &BTreeSet<Symbol>,
    group_relators: &[InvWord],
    subgroup_words: &[InvWord],
) -> Result<Presentation, EWordError> {
    let t = Symbol::new("t");
    if alphabet.contains(&t)
        || group_relators
            .iter()
            .chain(subgroup_words)
            .any(|w| w.symbols().contains(&t))
    {
        return Err(EWordError::ReservedLetter("t".into()));
    }
    for w in group_relators.iter().chain(subgroup_words) {
        w.check_alphabet(alphabet)?;
    }
    let mut factors: Vec<InvWord> = alphabet
        .iter()
        .map(|&a| InvWord::from_letters(vec![Letter::pos(a)]))
        .collect();
    for w in subgroup_words {
        let mut f = InvWord::from_letters(vec![Letter::pos(t)]);
        f = f.concat(w);
        f.push(Letter::neg(t));
        factors.push(f);
    }
    factors.extend(
        alphabet
            .iter()
            .map(|&a| InvWord::from_letters(vec![Letter::neg(a)])),
    );
    let e = e_word(&factors);
    let mut relations = Vec::new();
    match group_relators.split_first() {
        None => relations.push((e, InvWord::empty())),
        Some((r1, rest)) => {
            relations.push((e.concat(r1), InvWord::empty()));
            relations.extend(rest.iter().map(|r| (r.clone(), InvWord::empty())));
        }
    }
    let mut full = alphabet.clone();
    full.insert(t);
    Ok(Presentation::new(full, relations)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::words_up_to;
    use proptest::prelude::*;

    fn bicyclic() -> Presentation {
        "letters: a\nrel: a a' = 1\n".parse().unwrap()
    }

    fn w(s: &str) -> InvWord {
        s.parse().unwrap()
    }

    /// Oracle: a ray `0 -a-> 1 -a-> … -a-> n` rooted at 0.
    fn is_a_ray(a: &BirootedAutomaton, n: usize) -> bool {
        let mut ray = InvWordGraph::with_vertices(n + 1);
        for i in 0..n {
            ray.add_edge(i, Letter::pos(Symbol::new("a")), i + 1);
        }
        rooted_iso(a, &BirootedAutomaton { graph: ray, start: 0, end: 0 })
    }

    #[test]
    fn munn_examples() {
        let t = munn_tree(&w("a b b'"));
        assert_eq!(t.graph.vertex_count(), 3);
        assert_eq!(t.graph.read_word(t.start, &w("a")), Some(t.end));
        let e = munn_tree(&w("1"));
        assert_eq!((e.graph.vertex_count(), e.start, e.end), (1, 0, 0));
        let aa = munn_tree(&w("a a'"));
        assert_eq!((aa.graph.vertex_count(), aa.start, aa.end), (2, 0, 0));
    }

    #[test]
    fn fim_examples() {
        assert!(fim_equal(&w("a a' a"), &w("a")));
        assert!(!fim_equal(&w("a b b'"), &w("a")));
        assert!(fim_equal(&w("a a' b b'"), &w("b b' a a'")));
    }

    #[test]
    fn p_expansion_examples() {
        let p = bicyclic();
        let mt = munn_tree(&w("a a'"));
        let e = full_p_expansion(&mt.graph, &p);
        // Only vertex `a` lacks an aa⁻¹ loop. The fresh path a·a⁻¹ is
        // a -a-> x -a⁻¹-> a, whose second edge coincides with the first.
        assert_eq!(e.graph.vertex_count(), 3);
        assert_eq!(e.graph.edge_count(), 2);
        assert_eq!(e.graph.read_word(1, &w("a a'")), Some(1));
        assert!(e.identify.is_empty());

        let free = Presentation::free([Symbol::new("a")]);
        assert_eq!(full_p_expansion(&mt.graph, &free).graph, mt.graph);

        let ab: Presentation = "letters: a b\nrel: a = b\n".parse().unwrap();
        let one = munn_tree(&w("a"));
        let e = full_p_expansion(&one.graph, &ab);
        assert_eq!(e.graph.vertex_count(), 2);
        assert_eq!(e.graph.edge_count(), 2);
    }

    #[test]
    fn exp_step_examples() {
        let p = bicyclic();
        let e1 = expand(&w("a a'"), &p, 1);
        assert!(is_a_ray(&e1.auto, 2));
        assert_eq!(e1.start(), e1.end());

        let free = Presentation::free([Symbol::new("a"), Symbol::new("b")]);
        let m = expand(&w("a b' a"), &free, 0);
        assert!(rooted_iso(&expand(&w("a b' a"), &free, 3).auto, &m.auto));

        let ab: Presentation = "letters: a b\nrel: a = b\n".parse().unwrap();
        let s = expand(&w("a"), &ab, 1);
        assert_eq!(s.graph().vertex_count(), 2);
        assert_eq!(s.graph().step(s.start(), w("b").letters()[0]), Some(s.end()));
    }

    #[test]
    fn bicyclic_rays() {
        let p = bicyclic();
        for i in 0..=6 {
            assert!(is_a_ray(&expand(&w("1"), &p, i).auto, i), "exp_{i}(MT(1))");
            assert!(is_a_ray(&expand(&w("a a'"), &p, i).auto, i + 1), "exp_{i}(MT(aa'))");
        }
    }

    #[test]
    fn p_completeness() {
        let p = bicyclic();
        for i in 0..=5 {
            let a = expand(&w("1"), &p, i);
            assert!(!a.is_p_complete());
            // ray minus its tip
            let sub: VertexSet = a
                .graph()
                .vertices()
                .filter(|&v| a.graph().read_word(v, &w("a")).is_some())
                .collect();
            assert!(is_relatively_p_complete(&sub, a.graph(), &p));
        }
        let free = Presentation::free([Symbol::new("a")]);
        assert!(is_p_complete(&munn_tree(&w("a a")).graph, &free));
    }

    #[test]
    fn approx_accepts_examples() {
        let p = bicyclic();
        assert_eq!(approx_accepts(&w("1"), &w("a a'"), &p, 1), Acceptance::Yes);
        for n in 0..=6 {
            assert_eq!(approx_accepts(&w("1"), &w("a' a"), &p, n), Acceptance::Unknown);
        }
        assert_eq!(approx_accepts(&w("a' a b"), &w("a' a b"), &p, 0), Acceptance::Yes);
    }

    #[test]
    fn decide_semi_examples() {
        let p = bicyclic();
        assert_eq!(decide_semi(&w("a a'"), &w("1"), &p, 2), SemiDecision::Equal);
        let free = Presentation::free([Symbol::new("a"), Symbol::new("b")]);
        assert_eq!(decide_semi(&w("a"), &w("a b b'"), &free, 5), SemiDecision::Exhausted);
        assert_eq!(decide_semi(&w("a' b"), &w("a' b"), &p, 0), SemiDecision::Equal);
    }

    #[test]
    fn cancelled_budget_stops() {
        use std::sync::atomic::AtomicBool;
        use std::sync::Arc;
        let flag = Arc::new(AtomicBool::new(true));
        let b = Budget::new(100).with_cancel(flag);
        assert_eq!(decide_semi(&w("a a'"), &w("1"), &bicyclic(), b), SemiDecision::Exhausted);
    }

    #[test]
    fn language_monotone_in_stage() {
        let presentations = [
            bicyclic(),
            "letters: a\nrel: a a' = 1\nrel: a' a = 1\n".parse().unwrap(),
            "letters: a b\nrel: a b = b a\n".parse::<Presentation>().unwrap(),
        ];
        for p in &presentations {
            let words = words_up_to(&p.alphabet, 5);
            let mut prev = expand(&w("a a'"), p, 0);
            for _ in 0..4 {
                let next = exp_step(&prev);
                for u in &words {
                    assert!(!prev.accepts(u) || next.accepts(u), "{u} lost at stage {}", next.stage);
                }
                prev = next;
            }
        }
    }

    #[test]
    fn e_presentation_examples() {
        let a = Symbol::new("a");
        let alpha: BTreeSet<Symbol> = [a].into();
        let p = build_e_presentation(&alpha, &[], &[]).unwrap();
        assert_eq!(p.relations, vec![(w("a a' a' a"), InvWord::empty())]);
        assert!(p.alphabet.contains(&Symbol::new("t")));

        let p = build_e_presentation(&alpha, &[], &[w("a")]).unwrap();
        assert_eq!(p.relations[0].0, w("a a' t a t' t a' t' a' a"));

        let p = build_e_presentation(&alpha, &[w("a a"), w("a a a")], &[]).unwrap();
        assert_eq!(p.relations[0].0, w("a a' a' a a a"));
        assert_eq!(p.relations[1].0, w("a a a"));

        assert!(matches!(
            build_e_presentation(&alpha, &[w("t")], &[]),
            Err(EWordError::ReservedLetter(_))
        ));
    }

    fn arb_word(max: usize) -> impl Strategy<Value = InvWord> {
        prop::collection::vec((any::<bool>(), any::<bool>()), 0..=max).prop_map(|v| {
            v.into_iter()
                .map(|(b, inv)| Letter {
                    base: Symbol::new(if b { "a" } else { "b" }),
                    inverted: inv,
                })
                .collect()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn fim_agrees_with_decide_semi(u in arb_word(8), v in arb_word(8)) {
            let free = Presentation::free([Symbol::new("a"), Symbol::new("b")]);
            let semi = decide_semi(&u, &v, &free, 1);
            prop_assert_eq!(semi == SemiDecision::Equal, fim_equal(&u, &v));
        }

        #[test]
        fn e_word_is_idempotent(ws in prop::collection::vec(arb_word(5), 0..4)) {
            let alpha: BTreeSet<Symbol> = [Symbol::new("a"), Symbol::new("b")].into();
            let p = build_e_presentation(&alpha, &[], &ws).unwrap();
            prop_assert!(p.relations[0].0.free_reduce().is_empty());
            prop_assert_eq!(p.relations[0].0.len(), 8 + ws.iter().map(|u| 2 * (u.len() + 2)).sum::<usize>());
        }

        #[test]
        fn idempotent_absorption(wt in arb_word(4), u in arb_word(3)) {
            let p = bicyclic_ab();
            let probe = u.concat(&u.inverse()).concat(&wt);
            for n in 0..4 {
                let a = expand(&wt, &p, n);
                if a.graph().read_word(a.start(), &u).is_some() {
                    prop_assert!(a.accepts(&probe));
                }
            }
        }

        #[test]
        fn trees_stay_trees(wt in arb_word(6)) {
            let p: Presentation = "letters: a b\nrel: a b b' a' = a a'\nrel: b b' = 1\n".parse().unwrap();
            for n in 0..=4 {
                prop_assert!(expand(&wt, &p, n).graph().is_forest());
            }
        }
    }

    fn bicyclic_ab() -> Presentation {
        "letters: a b\nrel: a a' = 1\n".parse().unwrap()
    }
}
