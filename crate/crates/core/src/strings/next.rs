use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::cfg::{Cfg, GSym, Terminal};
use super::nfa::{intersect_cfg_nfa, Nfa};

/// The first component of a lookahead pair: the next symbol or the end marker ◁.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Ahead<T> {
    End,
    Sym(T),
}

impl<T: fmt::Display> fmt::Display for Ahead<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ahead::End => f.write_str("<|"),
            Ahead::Sym(t) => write!(f, "{t}"),
        }
    }
}

/// A symbol paired with its successor, printed `(next,cur)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Lookahead<T> {
    pub next: Ahead<T>,
    pub cur: T,
}

impl<T: fmt::Display> fmt::Display for Lookahead<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.next, self.cur)
    }
}

/// A CFG for π2⁻¹(L(g)) over (Σ ∪ {◁}) × Σ, with Σ the terminals of `g`.
pub fn inverse_projection<T: Terminal>(g: &Cfg<T>) -> Cfg<Lookahead<T>> {
    let sigma = g.terminals();
    let mut out: Cfg<Lookahead<T>> = g.map_terminals(|t| Lookahead {
        next: Ahead::End,
        cur: t.clone(),
    });
    let mut class: BTreeMap<T, usize> = BTreeMap::new();
    for t in &sigma {
        let n = out.nt(&out.fresh_name(&format!("{{{t}}}")));
        class.insert(t.clone(), n);
        let firsts = std::iter::once(Ahead::End).chain(sigma.iter().cloned().map(Ahead::Sym));
        for x in firsts {
            out.add_rule(
                n,
                vec![GSym::T(Lookahead {
                    next: x,
                    cur: t.clone(),
                })],
            );
        }
    }
    let original = g.rules.len();
    for r in out.rules.iter_mut().take(original) {
        for s in r.body.iter_mut() {
            if let GSym::T(l) = s {
                *s = GSym::N(class[&l.cur]);
            }
        }
    }
    out
}

/// The automaton accepting well-chained strings ⟨σ2,σ1⟩⋯⟨◁,σn⟩.
///
/// State `i < |Σ|` stands for the i-th symbol of Σ and the last state for ◁.
/// Only the states of Σ are initial.
pub fn next_nfa<T: Terminal>(sigma: &BTreeSet<T>) -> Nfa<Lookahead<T>> {
    let syms: Vec<&T> = sigma.iter().collect();
    let end = syms.len();
    let mut names: Vec<String> = syms.iter().map(|s| s.to_string()).collect();
    names.push("<|".into());
    let mut delta = Vec::new();
    for (i, s) in syms.iter().enumerate() {
        for (j, t) in syms.iter().enumerate() {
            delta.push((
                i,
                Lookahead {
                    next: Ahead::Sym((*t).clone()),
                    cur: (*s).clone(),
                },
                j,
            ));
        }
        delta.push((
            i,
            Lookahead {
                next: Ahead::End,
                cur: (*s).clone(),
            },
            end,
        ));
    }
    Nfa {
        names,
        delta,
        initial: (0..end).collect(),
        finals: BTreeSet::from([end]),
    }
}

/// A CFG for Next(L(g)).
pub fn build_next_cfg<T: Terminal>(g: &Cfg<T>) -> Cfg<Lookahead<T>> {
    let sigma = g.terminals();
    intersect_cfg_nfa(&inverse_projection(g), &next_nfa(&sigma))
}
