//! Language-level outputs: finite automata, the pushdown automaton of a
//! sapling, geodesic automata and the uniform word problem.

mod fsa;
mod geodesic;
mod grammar;
mod pda;

pub use fsa::{fsa_difference_witness, fsa_equal, fsa_language_upto, Fsa, FsaIoError};
pub use geodesic::{geodesic_automaton, GeodesicError};
pub use grammar::{pda_accepts, PdaGrammar};
pub use pda::{build_pda, Pda, PdaIoError, PdaTransition, StackSym};

use crate::sapling::{SaplingSearch, SearchOutcome};
use crate::stephen::ApproxAutomaton;
use crate::words::{InvWord, Presentation};
use crate::Budget;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WordProblemAnswer {
    Equal,
    Unequal,
    Exhausted,
}

/// An exact recogniser for `L(𝒜(w))`.
pub enum Recognizer {
    Finite(ApproxAutomaton),
    Pushdown(Box<PdaGrammar>),
}

impl Recognizer {
    pub fn accepts(&self, u: &InvWord) -> bool {
        match self {
            Recognizer::Finite(a) => a.accepts(u),
            Recognizer::Pushdown(g) => g.accepts(u),
        }
    }

    fn from_outcome(o: SearchOutcome) -> Option<Recognizer> {
        match o {
            SearchOutcome::Sapling(s) => Some(Recognizer::Pushdown(Box::new(PdaGrammar::new(&build_pda(&s))))),
            SearchOutcome::Finite(a) => Some(Recognizer::Finite(a)),
            SearchOutcome::Exhausted { .. } => None,
        }
    }
}

struct Side {
    search: SaplingSearch,
    exact: Option<Recognizer>,
}

impl Side {
    fn new(w: &InvWord, p: &Presentation) -> Side {
        Side {
            search: SaplingSearch::new(w, p),
            exact: None,
        }
    }

    fn step(&mut self) {
        if self.exact.is_none() {
            self.exact = self.search.step().and_then(Recognizer::from_outcome);
        }
    }

    /// Semidecision from the current approximation.
    fn surely_accepts(&self, u: &InvWord) -> bool {
        match &self.exact {
            Some(r) => r.accepts(u),
            None => self.search.latest().accepts(u),
        }
    }
}

/// Decides `u = v` in `Inv⟨A | R⟩`: searches saplings for both words
/// (one round each per budget unit) while watching the Stephen
/// approximations for an early proof of equality. Once both Schützenberger
/// graphs have exact recognisers the answer is `u ∈ L(𝒜(v)) ∧ v ∈ L(𝒜(u))`.
pub fn word_problem(u: &InvWord, v: &InvWord, p: &Presentation, budget: impl Into<Budget>) -> WordProblemAnswer {
    word_problem_with_progress(u, v, p, budget, |_, _| {})
}

/// As [`word_problem`], reporting `(stage, watched candidates)` after every
/// round.
pub fn word_problem_with_progress(
    u: &InvWord,
    v: &InvWord,
    p: &Presentation,
    budget: impl Into<Budget>,
    mut progress: impl FnMut(usize, usize),
) -> WordProblemAnswer {
    let budget = budget.into();
    let mut su = Side::new(u, p);
    let mut sv = Side::new(v, p);
    for _ in 0..budget.limit {
        if budget.cancelled() {
            break;
        }
        su.step();
        sv.step();
        progress(
            su.search.stage().max(sv.search.stage()),
            su.search.list_len() + sv.search.list_len(),
        );
        if su.surely_accepts(v) && sv.surely_accepts(u) {
            return WordProblemAnswer::Equal;
        }
        if su.exact.is_some() && sv.exact.is_some() {
            return WordProblemAnswer::Unequal;
        }
    }
    WordProblemAnswer::Exhausted
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::{InvWordGraph, Vertex};
    use crate::sapling::{find_sapling, materialize, Sapling};
    use crate::stephen::{expand, fim_equal};
    use crate::words::{words_up_to, Letter};
    use proptest::prelude::*;
    use std::collections::BTreeSet;

    fn bicyclic() -> Presentation {
        "letters: a\nrel: a a' = 1\n".parse().unwrap()
    }

    fn integers() -> Presentation {
        "letters: a\nrel: a a' = 1\nrel: a' a = 1\n".parse().unwrap()
    }

    fn w(s: &str) -> InvWord {
        s.parse().unwrap()
    }

    fn sapling(word: &str, p: &Presentation) -> Sapling {
        match find_sapling(&w(word), p, 30) {
            SearchOutcome::Sapling(s) => *s,
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn bicyclic_pda_shape_and_examples() {
        let s = sapling("1", &bicyclic());
        let pda = build_pda(&s);
        let gc: usize = s.x_complements().iter().map(|c| c.len()).sum();
        assert_eq!(pda.states, s.graph().vertex_count() + gc + 1);
        assert_eq!(pda.states, 14);
        let g = PdaGrammar::new(&pda);
        assert!(g.accepts(&w("a a'")));
        assert!(!g.accepts(&w("a' a")));
        assert!(g.accepts(&w("1")));
        for n in 0..=12 {
            let mut u = InvWord::empty();
            for _ in 0..n {
                u.push(w("a").letters()[0]);
            }
            let back = u.concat(&u.inverse());
            assert!(g.accepts(&back), "a^{n} a'^{n}");
            assert!(!g.accepts(&back.concat(&w("a'"))));
        }
    }

    #[test]
    fn pda_matches_expansion_on_short_words() {
        for (word, p) in [("1", bicyclic()), ("a a'", integers()), ("a' a", bicyclic())] {
            let s = sapling(word, &p);
            let g = PdaGrammar::new(&build_pda(&s));
            let e = expand(&w(word), &p, 12);
            let m = materialize(&s, 3).unwrap();
            for u in words_up_to(&p.alphabet, 6) {
                let want = e.accepts(&u);
                assert_eq!(g.accepts(&u), want, "{word}: {u}");
                assert_eq!(m.approx.accepts(&u), want, "{word}: {u}");
            }
        }
    }

    #[test]
    fn pda_json_round_trip() {
        let pda = build_pda(&sapling("1", &bicyclic()));
        let back = Pda::from_json(&pda.to_json()).unwrap();
        assert_eq!(back, pda);
        assert!(Pda::from_json(r#"{"states":[0],"stack":["Z"],"initial":0,"final":4,"transitions":[]}"#).is_err());
    }

    #[test]
    fn empty_complements_give_finite_automaton() {
        let s = sapling("1", &bicyclic());
        let tip = s.graph().vertices().find(|&v| s.graph().degree(v) == 1 && v != s.x0()).unwrap();
        let mut flat = s.clone();
        flat.pairs = vec![crate::sapling::SubgraphPair {
            y: [tip].into(),
            x: [tip].into(),
            phi: Default::default(),
        }];
        let pda = build_pda(&flat);
        assert!(!pda.has_stack_moves());
        assert_eq!(pda.states, s.graph().vertex_count() + 1);
    }

    /// `aⁿbⁿ` recogniser, independent of saplings.
    fn anbn() -> Pda {
        let a: Letter = "a".parse().unwrap();
        let b: Letter = "b".parse().unwrap();
        let x = StackSym::Pair(0);
        let z = StackSym::Bottom;
        let t = |from, input, pop, push: Vec<StackSym>, to| PdaTransition { from, input, pop, push, to };
        Pda {
            states: 3,
            pairs: 1,
            initial: 0,
            terminal: 2,
            transitions: vec![
                t(0, Some(a), z, vec![x, z], 0),
                t(0, Some(a), x, vec![x, x], 0),
                t(0, None, z, vec![z], 1),
                t(0, None, x, vec![x], 1),
                t(1, Some(b), x, vec![], 1),
                t(1, None, z, vec![z], 2),
            ],
        }
    }

    #[test]
    fn grammar_membership_on_anbn() {
        let g = PdaGrammar::new(&anbn());
        let alphabet = "letters: a b\n".parse::<Presentation>().unwrap().alphabet;
        for u in words_up_to(&alphabet, 6) {
            let text = u.to_string();
            let n = u.len() / 2;
            let want = u.is_empty()
                || (u.len() % 2 == 0 && text == vec!["a"; n].into_iter().chain(vec!["b"; n]).collect::<Vec<_>>().join(" "));
            assert_eq!(g.accepts(&u), want, "{text}");
        }
    }

    #[test]
    fn grammar_handles_epsilon_push_loops() {
        // unbounded ε-pushes must not hang; they let b's outnumber a's
        let mut p = anbn();
        p.transitions.push(PdaTransition {
            from: 1,
            input: None,
            pop: StackSym::Pair(0),
            push: vec![StackSym::Pair(0), StackSym::Pair(0)],
            to: 1,
        });
        assert!(pda_accepts(&p, &w("a a b b")));
        assert!(pda_accepts(&p, &w("a b b b")));
        assert!(!pda_accepts(&p, &w("b a")));
        assert!(!pda_accepts(&p, &w("b")));
    }

    fn geodesic_words(g: &InvWordGraph, x0: Vertex, max_len: usize, alphabet: &Presentation) -> BTreeSet<InvWord> {
        let dist = g.bfs([x0], None);
        words_up_to(&alphabet.alphabet, max_len)
            .into_iter()
            .filter(|u| {
                g.read_path(x0, u)
                    .map_or(false, |p| p.iter().enumerate().all(|(i, &v)| dist[v] == Some(i)))
            })
            .collect()
    }

    #[test]
    fn bicyclic_geodesics_are_a_star() {
        let s = materialize(&sapling("1", &bicyclic()), 4).unwrap();
        let f = geodesic_automaton(s.graph(), s.x0(), 0, &bicyclic()).unwrap();
        let mut star = Fsa::new(1, 0);
        star.add(0, "a".parse().unwrap(), 0);
        star.terminal.insert(0);
        assert!(fsa_equal(&f, &star));
        assert_eq!(
            fsa_language_upto(&f, 8),
            geodesic_words(s.graph(), s.x0(), 8, &bicyclic())
                .into_iter()
                .collect::<BTreeSet<_>>()
        );
    }

    #[test]
    fn shallow_materialisation_is_reported() {
        let s = sapling("1", &bicyclic());
        assert!(geodesic_automaton(s.graph(), s.x0(), 3, &bicyclic()).is_err());
    }

    #[test]
    fn truncated_irregular_tree_geodesics() {
        let p: Presentation = "letters: a b c\nrel: a a' b c c' b' = a a'\nrel: a a' b b b b c c' b' b' b' b' = a a'\n"
            .parse()
            .unwrap();
        let a = match find_sapling(&w("a a'"), &p, 10) {
            SearchOutcome::Finite(a) => a,
            other => panic!("{other:?}"),
        };
        let f = geodesic_automaton(a.graph(), a.start(), 6, &p).unwrap();
        for (u, member) in [
            ("1", true),
            ("a", true),
            ("b", true),
            ("b b", true),
            ("b c", true),
            ("b b b b", true),
            ("b b b b c", true),
            ("b b c", false),
            ("b b b c", false),
            ("a b", false),
            ("c", false),
        ] {
            assert_eq!(f.accepts(&w(u)), member, "{u}");
        }
        assert_eq!(
            fsa_language_upto(&f, 8),
            geodesic_words(a.graph(), a.start(), 8, &p)
        );
    }

    #[test]
    fn word_problem_examples() {
        let b = bicyclic();
        assert_eq!(word_problem(&w("a a'"), &w("1"), &b, 40), WordProblemAnswer::Equal);
        assert_eq!(word_problem(&w("a' a"), &w("1"), &b, 40), WordProblemAnswer::Unequal);
        assert_eq!(word_problem(&w("a a'"), &w("1"), &b, 0), WordProblemAnswer::Exhausted);
        let z = integers();
        assert_eq!(word_problem(&w("a a a' a'"), &w("1"), &z, 40), WordProblemAnswer::Equal);
        assert_eq!(word_problem(&w("a a"), &w("a"), &z, 40), WordProblemAnswer::Unequal);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn free_word_problem_matches_munn_trees(u in "[ab]{0,4}", v in "[ab]{0,4}", inv in any::<u8>()) {
            let p: Presentation = "letters: a b\n".parse().unwrap();
            let word = |s: &str, mask: u8| -> InvWord {
                let text: Vec<String> = s
                    .chars()
                    .enumerate()
                    .map(|(i, c)| if mask >> i & 1 == 1 { format!("{c}'") } else { c.to_string() })
                    .collect();
                if text.is_empty() { w("1") } else { w(&text.join(" ")) }
            };
            let (u, v) = (word(&u, inv), word(&v, inv >> 4));
            let want = if fim_equal(&u, &v) { WordProblemAnswer::Equal } else { WordProblemAnswer::Unequal };
            prop_assert_eq!(word_problem(&u, &v, &p, 3), want);
        }

        #[test]
        fn wagner_reduction_preserves_acceptance(u in "[aA]{0,5}", at in 0usize..6, x in "[aA]{1,2}") {
            let word = |s: &str| -> InvWord {
                s.chars().map(|c| if c == 'a' { "a".parse::<Letter>().unwrap() } else { "a'".parse().unwrap() }).collect()
            };
            let g = PdaGrammar::new(&build_pda(&sapling("1", &bicyclic())));
            let (u, x) = (word(&u), word(&x));
            let at = at.min(u.len());
            let (pre, post) = u.letters().split_at(at);
            let pre = InvWord::from_letters(pre.to_vec());
            let post = InvWord::from_letters(post.to_vec());
            let long = pre.concat(&x).concat(&x.inverse()).concat(&x).concat(&post);
            let short = pre.concat(&x).concat(&post);
            prop_assert_eq!(g.accepts(&long), g.accepts(&short));
        }
    }
}
