//! Letters over a doubled alphabet `A ∪ A⁻¹`, words with formal inverses,
//! and the text formats for words and presentations.
//!
//! Inverse letters carry a trailing apostrophe (`a'`) and the empty word is
//! the single token `1`.
//!
//! ```
//! use invmon::words::InvWord;
//!
//! let w: InvWord = "a b b' a'".parse().unwrap();
//! assert!(w.free_reduce().is_empty());
//! assert_eq!(w.inverse().to_string(), "a b b' a'");
//! ```

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;
use std::sync::{Mutex, OnceLock};

use thiserror::Error;

/// An interned base symbol. Ordering is by name, so it does not depend on
/// the order in which symbols were first seen.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Symbol(u32);

struct Interner {
    names: Vec<&'static str>,
    ids: HashMap<&'static str, u32>,
}

fn interner() -> &'static Mutex<Interner> {
    static INTERNER: OnceLock<Mutex<Interner>> = OnceLock::new();
    INTERNER.get_or_init(|| {
        Mutex::new(Interner {
            names: Vec::new(),
            ids: HashMap::new(),
        })
    })
}

impl Symbol {
    /// Interns `name`. The caller is responsible for it being a valid
    /// identifier; use [`parse_word`] for checked input.
    pub fn new(name: &str) -> Symbol {
        let mut table = interner().lock().expect("symbol table poisoned");
        if let Some(&id) = table.ids.get(name) {
            return Symbol(id);
        }
        let leaked: &'static str = Box::leak(name.to_owned().into_boxed_str());
        let id = table.names.len() as u32;
        table.names.push(leaked);
        table.ids.insert(leaked, id);
        Symbol(id)
    }

    pub fn as_str(self) -> &'static str {
        interner().lock().expect("symbol table poisoned").names[self.0 as usize]
    }
}

impl Ord for Symbol {
    fn cmp(&self, other: &Self) -> Ordering {
        if self.0 == other.0 {
            Ordering::Equal
        } else {
            self.as_str().cmp(other.as_str())
        }
    }
}

impl PartialOrd for Symbol {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A letter of `A ∪ A⁻¹`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub base: Symbol,
    pub inverted: bool,
}

impl Letter {
    pub fn pos(base: Symbol) -> Letter {
        Letter { base, inverted: false }
    }

    pub fn neg(base: Symbol) -> Letter {
        Letter { base, inverted: true }
    }

    pub fn inverse(self) -> Letter {
        Letter {
            base: self.base,
            inverted: !self.inverted,
        }
    }

    pub fn is_positive(self) -> bool {
        !self.inverted
    }

    /// `+1` or `-1`.
    pub fn sign(self) -> i8 {
        if self.inverted {
            -1
        } else {
            1
        }
    }
}

impl fmt::Debug for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.inverted {
            write!(f, "{}'", self.base)
        } else {
            write!(f, "{}", self.base)
        }
    }
}

impl FromStr for Letter {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let w = parse_word(s)?;
        match w.letters() {
            [l] => Ok(*l),
            _ => Err(ParseError::Syntax {
                position: 0,
                message: format!("expected a single letter, got {s:?}"),
            }),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at byte {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("letter {letter} is not in the alphabet")]
    UnknownLetter { letter: String },
    #[error("line {line}: {message}")]
    Line { line: usize, message: String },
}

/// A word over `A ∪ A⁻¹`, not necessarily reduced.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct InvWord(Vec<Letter>);

impl InvWord {
    pub fn empty() -> InvWord {
        InvWord(Vec::new())
    }

    pub fn from_letters(letters: Vec<Letter>) -> InvWord {
        InvWord(letters)
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn push(&mut self, l: Letter) {
        self.0.push(l);
    }

    /// `(x₁…xₙ)⁻¹ = xₙ⁻¹…x₁⁻¹`.
    pub fn inverse(&self) -> InvWord {
        InvWord(self.0.iter().rev().map(|l| l.inverse()).collect())
    }

    /// Free-group normal form.
    pub fn free_reduce(&self) -> InvWord {
        let mut out: Vec<Letter> = Vec::with_capacity(self.0.len());
        for &l in &self.0 {
            if out.last() == Some(&l.inverse()) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        InvWord(out)
    }

    pub fn concat(&self, other: &InvWord) -> InvWord {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        InvWord(v)
    }

    /// Base symbols occurring in the word.
    pub fn symbols(&self) -> BTreeSet<Symbol> {
        self.0.iter().map(|l| l.base).collect()
    }

    /// Fails with [`ParseError::UnknownLetter`] if a letter is outside `alphabet`.
    pub fn check_alphabet(&self, alphabet: &BTreeSet<Symbol>) -> Result<(), ParseError> {
        match self.0.iter().find(|l| !alphabet.contains(&l.base)) {
            Some(l) => Err(ParseError::UnknownLetter {
                letter: l.base.to_string(),
            }),
            None => Ok(()),
        }
    }
}

impl fmt::Debug for InvWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "InvWord({self})")
    }
}

impl fmt::Display for InvWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

impl FromStr for InvWord {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_word(s)
    }
}

impl FromIterator<Letter> for InvWord {
    fn from_iter<I: IntoIterator<Item = Letter>>(iter: I) -> Self {
        InvWord(iter.into_iter().collect())
    }
}

pub fn free_reduce(u: &InvWord) -> InvWord {
    u.free_reduce()
}

pub fn invert_word(u: &InvWord) -> InvWord {
    u.inverse()
}

pub fn format_word(u: &InvWord) -> String {
    u.to_string()
}

/// Parses space-separated tokens: identifiers with an optional single
/// trailing `'`, or `1` for the identity.
pub fn parse_word(text: &str) -> Result<InvWord, ParseError> {
    let mut letters = Vec::new();
    let bytes = text.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        if bytes[i].is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        while i < bytes.len() && !bytes[i].is_ascii_whitespace() {
            i += 1;
        }
        let token = &text[start..i];
        if token == "1" {
            continue;
        }
        letters.push(parse_token(token, start)?);
    }
    Ok(InvWord(letters))
}

fn parse_token(token: &str, offset: usize) -> Result<Letter, ParseError> {
    let (name, inverted) = match token.strip_suffix('\'') {
        Some(rest) => (rest, true),
        None => (token, false),
    };
    let err = |pos: usize, message: String| ParseError::Syntax {
        position: offset + pos,
        message,
    };
    let mut chars = name.char_indices();
    match chars.next() {
        Some((_, c)) if c.is_ascii_alphabetic() => {}
        Some((p, c)) => return Err(err(p, format!("unexpected character {c:?} in {token:?}"))),
        None => return Err(err(0, format!("dangling inverse mark in {token:?}"))),
    }
    for (p, c) in chars {
        if !(c.is_ascii_alphanumeric() || c == '_') {
            return Err(err(p, format!("unexpected character {c:?} in {token:?}")));
        }
    }
    Ok(Letter {
        base: Symbol::new(name),
        inverted,
    })
}

/// `Inv⟨A | R⟩` with a finite relation list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Presentation {
    pub alphabet: BTreeSet<Symbol>,
    pub relations: Vec<(InvWord, InvWord)>,
}

impl Presentation {
    pub fn new(
        alphabet: impl IntoIterator<Item = Symbol>,
        relations: Vec<(InvWord, InvWord)>,
    ) -> Result<Presentation, ParseError> {
        let alphabet: BTreeSet<Symbol> = alphabet.into_iter().collect();
        for (r, s) in &relations {
            r.check_alphabet(&alphabet)?;
            s.check_alphabet(&alphabet)?;
        }
        Ok(Presentation { alphabet, relations })
    }

    /// The presentation with no relations.
    pub fn free(alphabet: impl IntoIterator<Item = Symbol>) -> Presentation {
        Presentation {
            alphabet: alphabet.into_iter().collect(),
            relations: Vec::new(),
        }
    }

    /// `K = max(2, |r|, |s|)` over all relations.
    pub fn k(&self) -> usize {
        self.relations
            .iter()
            .flat_map(|(r, s)| [r.len(), s.len()])
            .fold(2, usize::max)
    }

    /// Both orientations of every relation, duplicates removed.
    pub fn oriented(&self) -> Vec<(InvWord, InvWord)> {
        let mut out: Vec<(InvWord, InvWord)> = Vec::new();
        for (r, s) in &self.relations {
            for pair in [(r.clone(), s.clone()), (s.clone(), r.clone())] {
                if pair.0 != pair.1 && !out.contains(&pair) {
                    out.push(pair);
                }
            }
        }
        out
    }

    /// Parses and checks a word against the alphabet.
    pub fn word(&self, text: &str) -> Result<InvWord, ParseError> {
        let w = parse_word(text)?;
        w.check_alphabet(&self.alphabet)?;
        Ok(w)
    }

    pub fn parse(text: &str) -> Result<Presentation, ParseError> {
        let mut alphabet: Option<BTreeSet<Symbol>> = None;
        let mut relations = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let at_line = |e: ParseError| ParseError::Line {
                line: line_no,
                message: e.to_string(),
            };
            if let Some(rest) = line.strip_prefix("letters:") {
                if alphabet.is_some() {
                    return Err(ParseError::Line {
                        line: line_no,
                        message: "duplicate letters line".into(),
                    });
                }
                let w = parse_word(rest).map_err(at_line)?;
                if w.letters().iter().any(|l| l.inverted) {
                    return Err(ParseError::Line {
                        line: line_no,
                        message: "alphabet letters must be positive".into(),
                    });
                }
                alphabet = Some(w.symbols());
            } else if let Some(rest) = line.strip_prefix("rel:") {
                let Some(alpha) = alphabet.as_ref() else {
                    return Err(ParseError::Line {
                        line: line_no,
                        message: "relation before letters line".into(),
                    });
                };
                let mut parts = rest.split('=');
                let (Some(lhs), Some(rhs), None) = (parts.next(), parts.next(), parts.next()) else {
                    return Err(ParseError::Line {
                        line: line_no,
                        message: "expected exactly one '='".into(),
                    });
                };
                let r = parse_word(lhs).map_err(at_line)?;
                let s = parse_word(rhs).map_err(at_line)?;
                r.check_alphabet(alpha).map_err(at_line)?;
                s.check_alphabet(alpha).map_err(at_line)?;
                relations.push((r, s));
            } else {
                return Err(ParseError::Line {
                    line: line_no,
                    message: format!("unrecognised line {line:?}"),
                });
            }
        }
        let alphabet = alphabet.ok_or(ParseError::Line {
            line: 0,
            message: "missing letters line".into(),
        })?;
        Ok(Presentation { alphabet, relations })
    }
}

impl fmt::Display for Presentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "letters:")?;
        for s in &self.alphabet {
            write!(f, " {s}")?;
        }
        writeln!(f)?;
        for (r, s) in &self.relations {
            writeln!(f, "rel: {r} = {s}")?;
        }
        Ok(())
    }
}

impl FromStr for Presentation {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Presentation::parse(s)
    }
}

/// All words of length exactly `n` over the letters of `alphabet`.
pub fn words_of_length(alphabet: &BTreeSet<Symbol>, n: usize) -> Vec<InvWord> {
    let letters: Vec<Letter> = alphabet
        .iter()
        .flat_map(|&s| [Letter::pos(s), Letter::neg(s)])
        .collect();
    let mut out = vec![InvWord::empty()];
    for _ in 0..n {
        let mut next = Vec::with_capacity(out.len() * letters.len());
        for w in &out {
            for &l in &letters {
                let mut v = w.clone();
                v.push(l);
                next.push(v);
            }
        }
        out = next;
    }
    out
}

/// All words of length `≤ n`, shortest first.
pub fn words_up_to(alphabet: &BTreeSet<Symbol>, n: usize) -> Vec<InvWord> {
    (0..=n).flat_map(|k| words_of_length(alphabet, k)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn w(s: &str) -> InvWord {
        s.parse().unwrap()
    }

    #[test]
    fn reduce_examples() {
        assert_eq!(w("a a' a").free_reduce(), w("a"));
        assert_eq!(w("1").free_reduce(), w("1"));
        assert!(w("a b b' a'").free_reduce().is_empty());
    }

    #[test]
    fn invert_examples() {
        assert_eq!(w("a b").inverse(), w("b' a'"));
        assert_eq!(w("1").inverse(), InvWord::empty());
        assert_eq!(w("a'").inverse(), w("a"));
    }

    #[test]
    fn parse_examples() {
        let a = Symbol::new("a");
        let b = Symbol::new("b");
        assert_eq!(
            w("a b' a").letters(),
            &[Letter::pos(a), Letter::neg(b), Letter::pos(a)]
        );
        assert!(w("1").is_empty());
        assert!(matches!(parse_word("a''"), Err(ParseError::Syntax { .. })));
        assert!(matches!(parse_word("x 3a"), Err(ParseError::Syntax { position: 2, .. })));
        assert!(parse_word("'").is_err());
        assert_eq!(w("a1 w_3'").to_string(), "a1 w_3'");
    }

    #[test]
    fn presentation_file() {
        let p = Presentation::parse("# bicyclic\nletters: a\nrel: a a' = 1\n").unwrap();
        assert_eq!(p.relations.len(), 1);
        assert_eq!(p.k(), 2);
        assert_eq!(Presentation::parse(&p.to_string()).unwrap(), p);
        let e = Presentation::parse("letters: a\nrel: a b = 1\n").unwrap_err();
        assert!(matches!(e, ParseError::Line { line: 2, .. }));
        assert!(Presentation::parse("rel: a = a\n").is_err());
        let long = Presentation::parse("letters: a b\nrel: a b a b a = b\n").unwrap();
        assert_eq!(long.k(), 5);
    }

    #[test]
    fn symbol_order_is_by_name() {
        let z = Symbol::new("zz_order");
        let y = Symbol::new("yy_order");
        assert!(y < z);
    }

    fn arb_word(max: usize) -> impl Strategy<Value = InvWord> {
        prop::collection::vec((0..3usize, any::<bool>()), 0..=max).prop_map(|v| {
            let names = ["a", "b", "c"];
            v.into_iter()
                .map(|(i, inv)| Letter {
                    base: Symbol::new(names[i]),
                    inverted: inv,
                })
                .collect()
        })
    }

    proptest! {
        #[test]
        fn reduce_idempotent(u in arb_word(50)) {
            let r = u.free_reduce();
            prop_assert_eq!(r.free_reduce(), r);
        }

        #[test]
        fn u_uinv_reduces_to_empty(u in arb_word(30)) {
            prop_assert!(u.concat(&u.inverse()).free_reduce().is_empty());
        }

        #[test]
        fn round_trip(u in arb_word(30)) {
            prop_assert_eq!(parse_word(&format_word(&u)).unwrap(), u);
        }

        #[test]
        fn inverse_antihomomorphism(u in arb_word(10), v in arb_word(10)) {
            prop_assert_eq!(u.concat(&v).inverse(), v.inverse().concat(&u.inverse()));
            prop_assert_eq!(u.inverse().inverse(), u);
        }
    }
}
