//! Membership for [`Pda`] languages through the classical triple
//! construction: the nonterminal `[p X q]` derives exactly the inputs that
//! take `p` with `X` on top to `q` with `X` popped.

use std::collections::{BTreeMap, HashMap};

use super::pda::{Pda, StackSym};
use crate::words::{InvWord, Letter};

#[derive(Clone, Debug)]
struct Rule {
    lhs: usize,
    term: Option<Letter>,
    body: Vec<usize>,
}

/// Context-free grammar for `L(P)`, restricted to nonterminals reachable
/// from the start symbol and productive.
#[derive(Clone, Debug)]
pub struct PdaGrammar {
    start: Option<usize>,
    nonterminals: usize,
    rules: Vec<Rule>,
    first: Vec<Vec<usize>>,
    second: Vec<Vec<usize>>,
}

impl PdaGrammar {
    pub fn new(p: &Pda) -> PdaGrammar {
        let q = p.states;
        // Final-state acceptance becomes empty-stack acceptance: `f` may
        // clear the bottom marker.
        let mut by_key: BTreeMap<(usize, StackSym), Vec<(Option<Letter>, Vec<StackSym>, usize)>> = BTreeMap::new();
        for t in &p.transitions {
            by_key
                .entry((t.from, t.pop))
                .or_default()
                .push((t.input, t.push.clone(), t.to));
        }
        by_key
            .entry((p.terminal, StackSym::Bottom))
            .or_default()
            .push((None, vec![], p.terminal));

        let mut ids: HashMap<(usize, StackSym, usize), usize> = HashMap::new();
        let mut queue: Vec<(usize, StackSym, usize)> = Vec::new();
        let mut intern = |key: (usize, StackSym, usize), queue: &mut Vec<_>| -> usize {
            let n = ids.len();
            *ids.entry(key).or_insert_with(|| {
                queue.push(key);
                n
            })
        };
        let start = intern((p.initial, StackSym::Bottom, p.terminal), &mut queue);
        let mut rules = Vec::new();
        let mut head = 0;
        while head < queue.len() {
            let (from, pop, to) = queue[head];
            let lhs = head;
            head += 1;
            let Some(moves) = by_key.get(&(from, pop)) else {
                continue;
            };
            for (input, push, r) in moves {
                if push.is_empty() {
                    if *r == to {
                        rules.push(Rule { lhs, term: *input, body: vec![] });
                    }
                    continue;
                }
                // [r y₁ s₁][s₁ y₂ s₂]…[s_{L−1} y_L to] over all intermediate states
                let mut partial: Vec<(usize, Vec<usize>)> = vec![(*r, Vec::new())];
                for (idx, y) in push.iter().enumerate() {
                    let last = idx + 1 == push.len();
                    let mut grown = Vec::new();
                    for (c, body) in partial {
                        let targets = if last { to..to + 1 } else { 0..q };
                        for s in targets {
                            let mut b = body.clone();
                            b.push(intern((c, *y, s), &mut queue));
                            grown.push((s, b));
                        }
                    }
                    partial = grown;
                }
                for (_, body) in partial {
                    rules.push(Rule { lhs, term: *input, body });
                }
            }
        }
        let mut nonterminals = ids.len();
        let rules = binarize(rules, &mut nonterminals);
        let productive = productive(&rules, nonterminals);
        let rules: Vec<Rule> = rules
            .into_iter()
            .filter(|r| productive[r.lhs] && r.body.iter().all(|&b| productive[b]))
            .collect();
        let mut first = vec![Vec::new(); nonterminals];
        let mut second = vec![Vec::new(); nonterminals];
        for (i, r) in rules.iter().enumerate() {
            if let Some(&b) = r.body.first() {
                first[b].push(i);
            }
            if let Some(&c) = r.body.get(1) {
                second[c].push(i);
            }
        }
        PdaGrammar {
            start: productive[start].then_some(start),
            nonterminals,
            rules,
            first,
            second,
        }
    }

    pub fn rule_count(&self) -> usize {
        self.rules.len()
    }

    /// Whether the language is empty.
    pub fn is_empty(&self) -> bool {
        self.start.is_none()
    }

    pub fn accepts(&self, u: &InvWord) -> bool {
        let Some(start) = self.start else {
            return false;
        };
        let w = u.letters();
        let n = w.len();
        let nt = self.nonterminals;
        let idx = |i: usize, j: usize, a: usize| (i * (n + 1) + j) * nt + a;
        let mut chart = vec![false; (n + 1) * (n + 1) * nt];
        let mut work: Vec<(usize, usize, usize)> = Vec::new();
        let add = |chart: &mut Vec<bool>, work: &mut Vec<_>, a: usize, i: usize, j: usize| {
            let k = idx(i, j, a);
            if !chart[k] {
                chart[k] = true;
                work.push((a, i, j));
            }
        };
        for r in self.rules.iter().filter(|r| r.body.is_empty()) {
            match r.term {
                None => (0..=n).for_each(|i| add(&mut chart, &mut work, r.lhs, i, i)),
                Some(l) => {
                    for i in (0..n).filter(|&i| w[i] == l) {
                        add(&mut chart, &mut work, r.lhs, i, i + 1);
                    }
                }
            }
        }
        // Where a rule starting at `i` must begin once its terminal is read.
        let before = |r: &Rule, i: usize| -> Option<usize> {
            match r.term {
                None => Some(i),
                Some(l) => (i > 0 && w[i - 1] == l).then(|| i - 1),
            }
        };
        while let Some((b, i, m)) = work.pop() {
            for &ri in &self.first[b] {
                let r = &self.rules[ri];
                let Some(s) = before(r, i) else { continue };
                match r.body.as_slice() {
                    [_] => add(&mut chart, &mut work, r.lhs, s, m),
                    [_, c] => {
                        for j in m..=n {
                            if chart[idx(m, j, *c)] {
                                add(&mut chart, &mut work, r.lhs, s, j);
                            }
                        }
                    }
                    _ => unreachable!("binarized"),
                }
            }
            for &ri in &self.second[b] {
                let r = &self.rules[ri];
                let d = r.body[0];
                for i2 in 0..=i {
                    if chart[idx(i2, i, d)] {
                        if let Some(s) = before(r, i2) {
                            add(&mut chart, &mut work, r.lhs, s, m);
                        }
                    }
                }
            }
        }
        chart[idx(0, n, start)]
    }
}

/// Splits bodies longer than two with fresh nonterminals.
fn binarize(rules: Vec<Rule>, next: &mut usize) -> Vec<Rule> {
    let mut out = Vec::with_capacity(rules.len());
    for mut r in rules {
        while r.body.len() > 2 {
            let tail = r.body.split_off(1);
            let fresh = *next;
            *next += 1;
            r.body.push(fresh);
            out.push(r);
            r = Rule { lhs: fresh, term: None, body: tail };
        }
        out.push(r);
    }
    out
}

fn productive(rules: &[Rule], n: usize) -> Vec<bool> {
    let mut good = vec![false; n];
    let mut missing: Vec<usize> = rules.iter().map(|r| r.body.len()).collect();
    let mut occurs: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, r) in rules.iter().enumerate() {
        for &b in &r.body {
            occurs[b].push(i);
        }
    }
    let mut queue: Vec<usize> = Vec::new();
    for (i, r) in rules.iter().enumerate() {
        if missing[i] == 0 && !good[r.lhs] {
            good[r.lhs] = true;
            queue.push(r.lhs);
        }
    }
    while let Some(a) = queue.pop() {
        for &ri in &occurs[a] {
            missing[ri] -= 1;
            let lhs = rules[ri].lhs;
            if missing[ri] == 0 && !good[lhs] {
                good[lhs] = true;
                queue.push(lhs);
            }
        }
    }
    good
}

/// One-off membership test; build a [`PdaGrammar`] to test many words.
pub fn pda_accepts(p: &Pda, u: &InvWord) -> bool {
    PdaGrammar::new(p).accepts(u)
}
