//! Algorithms for finitely presented inverse monoids `Inv⟨A | R⟩`.
//!
//! * [`words`] — letters, words with formal inverses, presentations.
//! * [`graphs`] — inverse word graphs, folding, metric, isomorphism.
//! * [`stephen`] — Munn trees and Stephen's iterated P-expansion.
//! * [`geometry`] — hyperbolicity and tree-decomposition verifiers.
//! * [`sapling`] — finite certificates that regrow a tree-like
//!   Schützenberger graph, and the search that finds them.
//! * [`langtools`] — pushdown and geodesic automata, the uniform word
//!   problem.
//!
//! ```
//! use invmon::words::Presentation;
//! use invmon::langtools::{word_problem, WordProblemAnswer};
//!
//! let bicyclic: Presentation = "letters: a\nrel: a a' = 1\n".parse().unwrap();
//! let u = bicyclic.word("a' a").unwrap();
//! let one = bicyclic.word("1").unwrap();
//! assert_eq!(word_problem(&u, &one, &bicyclic, 40), WordProblemAnswer::Unequal);
//! ```

pub mod cli;
pub mod geometry;
pub mod graphs;
pub mod langtools;
pub mod sapling;
pub mod stephen;
pub mod words;

use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;

/// Iteration limit for the semidecision loops, with an optional shared
/// cancellation flag polled once per iteration.
#[derive(Clone, Debug, Default)]
pub struct Budget {
    pub limit: usize,
    pub cancel: Option<Arc<AtomicBool>>,
}

impl Budget {
    pub fn new(limit: usize) -> Budget {
        Budget { limit, cancel: None }
    }

    pub fn with_cancel(mut self, flag: Arc<AtomicBool>) -> Budget {
        self.cancel = Some(flag);
        self
    }

    pub fn cancelled(&self) -> bool {
        self.cancel
            .as_ref()
            .map_or(false, |f| f.load(Ordering::Relaxed))
    }
}

impl From<usize> for Budget {
    fn from(limit: usize) -> Budget {
        Budget::new(limit)
    }
}

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/intro.md")]
    mod intro {}
    #[doc = include_str!("../../../book/src/words.md")]
    mod words {}
    #[doc = include_str!("../../../book/src/stephen.md")]
    mod stephen {}
    #[doc = include_str!("../../../book/src/geometry.md")]
    mod geometry {}
    #[doc = include_str!("../../../book/src/saplings.md")]
    mod saplings {}
    #[doc = include_str!("../../../book/src/languages.md")]
    mod languages {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
