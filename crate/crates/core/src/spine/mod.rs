//! Simple monadic context-free tree grammars with a spine direction.

mod enumerate;
mod generators;
mod normal;
mod parse;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::trees::{Position, RankedAlphabet, Symbol, Tree};

pub use enumerate::{enumerate_trees, spinal_trees};
pub use generators::{is_normalized, normalize_generators};
pub use normal::{
    classify_normal_form, remove_collapsing_and_unit, to_normal_form, NormalFormReport, ProdKind,
};
pub use parse::{format_spine_grammar, parse_spine_grammar};

/// Spine direction: the child index (1 or 2) through which spines pass.
pub type Direction = BTreeMap<Symbol, u8>;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Production {
    pub lhs: Symbol,
    pub rhs: Tree,
}

impl fmt::Display for Production {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} -> {}",
            self.lhs,
            crate::trees::format_term(&self.rhs)
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpineGrammar {
    pub nt0: BTreeSet<Symbol>,
    pub nt1: BTreeSet<Symbol>,
    /// Terminals; `symbols1` stays empty.
    pub terminals: RankedAlphabet,
    pub start: Symbol,
    pub productions: Vec<Production>,
    pub direction: Direction,
}

/// One hole-path constraint `d(σ) = i` and where it came from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DirectionWitness {
    pub production: usize,
    pub position: Position,
    pub symbol: Symbol,
    pub child: u8,
}

impl fmt::Display for DirectionWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "production {} at {} needs {}:{}",
            self.production, self.position, self.symbol, self.child
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DirectionConflict {
    pub first: DirectionWitness,
    pub second: DirectionWitness,
}

impl fmt::Display for DirectionConflict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} but {}", self.first, self.second)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub problems: Vec<String>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.problems.is_empty()
    }
}

impl SpineGrammar {
    pub fn is_nt0(&self, s: &str) -> bool {
        self.nt0.contains(s)
    }

    pub fn is_nt1(&self, s: &str) -> bool {
        self.nt1.contains(s)
    }

    pub fn productions_of<'a>(&'a self, n: &'a str) -> impl Iterator<Item = &'a Production> + 'a {
        self.productions.iter().filter(move |p| p.lhs.as_str() == n)
    }

    pub fn dir(&self, sigma: &str) -> u8 {
        self.direction.get(sigma).copied().unwrap_or(1)
    }

    /// Report every violated invariant; an empty report means `self` is a
    /// spine grammar under its direction map.
    pub fn validate(&self) -> ValidationReport {
        let mut problems = self.terminals.problems();
        if !self.terminals.symbols1.is_empty() {
            problems.push("unary terminals are not allowed".into());
        }
        for n in self.nt0.iter().chain(&self.nt1) {
            if self.terminals.rank_of(n.as_str()).is_some() {
                problems.push(format!("`{n}` is both a terminal and a nonterminal"));
            }
            if n.is_hole() {
                problems.push("the hole `_` cannot be a nonterminal".into());
            }
        }
        for n in self.nt0.intersection(&self.nt1) {
            problems.push(format!("`{n}` declared both nullary and unary"));
        }
        if !self.nt0.contains(&self.start) {
            problems.push(format!(
                "start `{}` is not a nullary nonterminal",
                self.start
            ));
        }
        for (sigma, d) in &self.direction {
            if !self.terminals.symbols2.contains(sigma) {
                problems.push(format!("direction given for non-binary `{sigma}`"));
            }
            if !matches!(d, 1 | 2) {
                problems.push(format!("direction of `{sigma}` must be 1 or 2"));
            }
        }
        for (i, p) in self.productions.iter().enumerate() {
            let unary = if self.nt1.contains(&p.lhs) {
                true
            } else if self.nt0.contains(&p.lhs) {
                false
            } else {
                problems.push(format!("production {i}: `{}` is not a nonterminal", p.lhs));
                continue;
            };
            self.check_rhs(&p.rhs, &mut |m| {
                problems.push(format!("production {i} ({p}): {m}"))
            });
            let holes = p.rhs.hole_count();
            if unary && holes != 1 {
                problems.push(format!("production {i} ({p}): expected exactly one hole"));
            }
            if !unary && holes != 0 {
                problems.push(format!(
                    "production {i} ({p}): nullary production with a hole"
                ));
            }
            if unary && holes == 1 {
                for w in spine_constraints(i, &p.rhs) {
                    if self.direction.get(&w.symbol) != Some(&w.child) {
                        problems.push(format!("spine direction violated: {w}"));
                    }
                }
            }
        }
        ValidationReport { problems }
    }

    fn check_rhs(&self, t: &Tree, report: &mut impl FnMut(String)) {
        let l = t.label();
        let expected = if l.is_hole() || self.nt0.contains(l) {
            Some(0)
        } else if self.nt1.contains(l) {
            Some(1)
        } else {
            match self.terminals.rank_of(l.as_str()) {
                Some(1) | None => None,
                r => r,
            }
        };
        match expected {
            None => report(format!("undeclared symbol `{l}`")),
            Some(r) if r != t.arity() => report(format!("`{l}` used with {} children", t.arity())),
            _ => {}
        }
        for c in t.children() {
            self.check_rhs(c, report);
        }
    }

    /// One-step successors of a sentential form.
    pub fn derive_step(&self, t: &Tree) -> BTreeSet<Tree> {
        let mut out = BTreeSet::new();
        for w in t.positions() {
            let sub = t.subtree(&w).expect("own position");
            let l = sub.label();
            if self.nt0.contains(l) && sub.is_leaf() {
                for p in self.productions_of(l.as_str()) {
                    out.insert(t.substitute(&w, p.rhs.clone()).expect("own position"));
                }
            } else if self.nt1.contains(l) && sub.arity() == 1 {
                let arg = &sub.children()[0];
                for p in self.productions_of(l.as_str()) {
                    let r = p.rhs.fill_hole(arg);
                    out.insert(t.substitute(&w, r).expect("own position"));
                }
            }
        }
        out
    }

    /// Drop nonterminals that are unproductive or unreachable from the start.
    pub fn reduce(&self) -> SpineGrammar {
        let mut productive: BTreeSet<Symbol> = BTreeSet::new();
        loop {
            let before = productive.len();
            for p in &self.productions {
                if !productive.contains(&p.lhs) && self.only_uses(&p.rhs, &productive) {
                    productive.insert(p.lhs.clone());
                }
            }
            if productive.len() == before {
                break;
            }
        }
        let prods: Vec<&Production> = self
            .productions
            .iter()
            .filter(|p| productive.contains(&p.lhs) && self.only_uses(&p.rhs, &productive))
            .collect();
        let mut reach = BTreeSet::from([self.start.clone()]);
        let mut stack = vec![self.start.clone()];
        while let Some(n) = stack.pop() {
            for p in prods.iter().filter(|p| p.lhs == n) {
                for l in p.rhs.labels() {
                    if (self.nt0.contains(&l) || self.nt1.contains(&l)) && reach.insert(l.clone()) {
                        stack.push(l);
                    }
                }
            }
        }
        let mut out = self.clone();
        out.productions = prods
            .into_iter()
            .filter(|p| reach.contains(&p.lhs))
            .cloned()
            .collect();
        out.nt0.retain(|n| reach.contains(n) || *n == self.start);
        out.nt1.retain(|n| reach.contains(n));
        out
    }

    fn only_uses(&self, t: &Tree, ok: &BTreeSet<Symbol>) -> bool {
        let l = t.label();
        let nt = self.nt0.contains(l) || self.nt1.contains(l);
        (!nt || ok.contains(l)) && t.children().iter().all(|c| self.only_uses(c, ok))
    }

    /// A nonterminal name not yet used by `self`.
    pub(crate) fn fresh(&self, base: &str) -> Symbol {
        let taken = |s: &str| {
            self.nt0.contains(s) || self.nt1.contains(s) || self.terminals.rank_of(s).is_some()
        };
        if !taken(base) {
            return Symbol::new(base);
        }
        (1..)
            .map(|i| format!("{base}{i}"))
            .find(|s| !taken(s))
            .map(Symbol::from)
            .expect("unbounded supply")
    }
}

/// The direction constraints imposed by the hole path of one context.
fn spine_constraints(production: usize, rhs: &Tree) -> Vec<DirectionWitness> {
    let Some(hole) = rhs.hole_position() else {
        return Vec::new();
    };
    let mut out = Vec::new();
    let mut t = rhs;
    let mut w = Position::root();
    for &i in &hole.0 {
        if t.arity() == 2 {
            out.push(DirectionWitness {
                production,
                position: w.clone(),
                symbol: t.label().clone(),
                child: i,
            });
        }
        t = &t.children()[usize::from(i) - 1];
        w = w.child(i);
    }
    out
}

/// Read the spine direction off the hole paths of all unary productions.
/// Binary terminals that never lie on a spine default to 1.
pub fn infer_spine_direction(
    g: &SpineGrammar,
) -> std::result::Result<Direction, DirectionConflict> {
    let mut seen: BTreeMap<Symbol, DirectionWitness> = BTreeMap::new();
    for (i, p) in g.productions.iter().enumerate() {
        if !g.nt1.contains(&p.lhs) {
            continue;
        }
        for w in spine_constraints(i, &p.rhs) {
            match seen.get(&w.symbol) {
                Some(prev) if prev.child != w.child => {
                    return Err(DirectionConflict {
                        first: prev.clone(),
                        second: w,
                    })
                }
                Some(_) => {}
                None => {
                    seen.insert(w.symbol.clone(), w);
                }
            }
        }
    }
    Ok(g.terminals
        .symbols2
        .iter()
        .map(|s| (s.clone(), seen.get(s).map_or(1, |w| w.child)))
        .collect())
}

/// Validate, reporting structural problems as [`Error::Grammar`].
pub fn validate(g: &SpineGrammar) -> Result<()> {
    let r = g.validate();
    if r.is_valid() {
        Ok(())
    } else {
        Err(Error::Grammar(r.problems.join("; ")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::trees::parse_term;

    #[test]
    fn running_example_is_valid_with_expected_directions() {
        let g = fixtures::ex41();
        assert!(g.validate().is_valid(), "{:?}", g.validate());
        let d = infer_spine_direction(&g).unwrap();
        let want = [("alpha2", 2), ("beta2", 1), ("gamma2", 1), ("eta2", 2)];
        for (s, i) in want {
            assert_eq!(d[s], i);
        }
    }

    #[test]
    fn conflicting_direction_has_witness() {
        let mut g = fixtures::gmin();
        g.nt1.insert("c".into());
        g.productions.push(Production {
            lhs: "c".into(),
            rhs: parse_term("sigma(_,u)").unwrap(),
        });
        let c = infer_spine_direction(&g).unwrap_err();
        assert_eq!((c.first.child, c.second.child), (2, 1));
        assert!(!g.validate().is_valid());
    }

    #[test]
    fn unconstrained_defaults_to_one() {
        let mut g = fixtures::gmin();
        g.terminals.symbols2.insert("tau".into());
        assert_eq!(infer_spine_direction(&g).unwrap()["tau"], 1);
        assert_eq!(infer_spine_direction(&g).unwrap()["sigma"], 2);
    }

    #[test]
    fn empty_production_set_is_valid() {
        let mut g = fixtures::gmin();
        g.productions.clear();
        assert!(g.validate().is_valid());
        assert!(enumerate_trees(&g, 5).is_empty());
    }

    #[test]
    fn derive_step_on_gmin() {
        let g = fixtures::gmin();
        let s: BTreeSet<String> = g
            .derive_step(&Tree::sym("s"))
            .iter()
            .map(|t| t.to_string())
            .collect();
        assert_eq!(s, BTreeSet::from(["(b alpha)".to_string()]));
        let next: Vec<String> = g
            .derive_step(&parse_term("b(alpha)").unwrap())
            .iter()
            .map(|t| t.to_string())
            .collect();
        assert_eq!(next, ["(sigma u alpha)"]);
        assert!(g
            .derive_step(&parse_term("sigma(beta,alpha)").unwrap())
            .is_empty());
    }
}
