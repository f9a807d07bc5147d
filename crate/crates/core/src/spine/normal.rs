use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::{Production, SpineGrammar};
use crate::error::{Error, Result};
use crate::trees::{Symbol, Tree};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ProdKind {
    Start,
    Chain,
    Terminal,
    Other,
}

impl fmt::Display for ProdKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ProdKind::Start => "start",
            ProdKind::Chain => "chain",
            ProdKind::Terminal => "terminal",
            ProdKind::Other => "other",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalFormReport {
    /// One tag per production, in order.
    pub kinds: Vec<ProdKind>,
    /// The start nonterminal occurs on no right-hand side.
    pub start_isolated: bool,
}

impl NormalFormReport {
    pub fn is_normal_form(&self) -> bool {
        self.start_isolated && !self.kinds.contains(&ProdKind::Other)
    }

    pub fn others(&self) -> Vec<usize> {
        (0..self.kinds.len())
            .filter(|&i| self.kinds[i] == ProdKind::Other)
            .collect()
    }
}

fn kind_of(g: &SpineGrammar, p: &Production) -> ProdKind {
    let r = &p.rhs;
    let t0 = |t: &Tree| t.is_leaf() && g.terminals.symbols0.contains(t.label());
    let hole = |t: &Tree| t.is_leaf() && t.label().is_hole();
    let n1 = |t: &Tree| t.arity() == 1 && g.nt1.contains(t.label());
    let gen = |t: &Tree| t.is_leaf() && g.nt0.contains(t.label()) && *t.label() != g.start;
    if g.nt0.contains(&p.lhs) {
        if t0(r) || (n1(r) && t0(&r.children()[0])) {
            return ProdKind::Start;
        }
    } else if g.nt1.contains(&p.lhs) {
        if n1(r) && n1(&r.children()[0]) && hole(&r.children()[0].children()[0]) {
            return ProdKind::Chain;
        }
        if r.arity() == 2 && g.terminals.symbols2.contains(r.label()) {
            let (a, b) = (&r.children()[0], &r.children()[1]);
            if (hole(a) && gen(b)) || (gen(a) && hole(b)) {
                return ProdKind::Terminal;
            }
        }
    }
    ProdKind::Other
}

pub fn classify_normal_form(g: &SpineGrammar) -> NormalFormReport {
    NormalFormReport {
        kinds: g.productions.iter().map(|p| kind_of(g, p)).collect(),
        start_isolated: !g.productions.iter().any(|p| p.rhs.contains_label(&g.start)),
    }
}

impl SpineGrammar {
    pub fn is_normal_form(&self) -> bool {
        classify_normal_form(self).is_normal_form()
    }
}

/// Unary nonterminals along a chain `b1(...(bm(x)))`, and the bottom `x`.
fn chain_of(g: &SpineGrammar, t: &Tree) -> (Vec<Symbol>, Tree) {
    let mut out = Vec::new();
    let mut cur = t;
    while cur.arity() == 1 && g.nt1.contains(cur.label()) {
        out.push(cur.label().clone());
        cur = &cur.children()[0];
    }
    (out, cur.clone())
}

fn build_chain(chain: &[Symbol], bottom: Tree) -> Tree {
    chain
        .iter()
        .rev()
        .fold(bottom, |t, b| Tree::unary(b.clone(), t))
}

/// Check that every production has one of the shapes the conversion handles.
fn check_pre_form(g: &SpineGrammar) -> Result<()> {
    for p in &g.productions {
        let (chain, bottom) = chain_of(g, &p.rhs);
        let ok = if g.nt0.contains(&p.lhs) {
            bottom.is_leaf()
                && (g.terminals.symbols0.contains(bottom.label())
                    || (chain.len() == 1 && g.nt0.contains(bottom.label())))
        } else if g.nt1.contains(&p.lhs) {
            let side = |t: &Tree| t.is_leaf() && g.nt0.contains(t.label());
            let hole = |t: &Tree| t.is_leaf() && t.label().is_hole();
            if hole(&bottom) {
                true
            } else {
                chain.is_empty()
                    && bottom.arity() == 2
                    && g.terminals.symbols2.contains(bottom.label())
                    && ((hole(&bottom.children()[0]) && side(&bottom.children()[1]))
                        || (side(&bottom.children()[0]) && hole(&bottom.children()[1])))
            }
        } else {
            false
        };
        if !ok {
            return Err(Error::Unsupported(p.to_string()));
        }
    }
    Ok(())
}

/// Bring a grammar into normal form.
///
/// Accepted input: nullary productions `n -> α`, `n -> b(α)`, `n -> b(a)`;
/// unary productions `b -> b1(...(bm(_)))` for any `m >= 0` and
/// `b -> σ(_,a)`, `b -> σ(a,_)`. The start nonterminal may occur on right-hand
/// sides. Spinal self-occurrence is handled separately by
/// [`super::normalize_generators`].
pub fn to_normal_form(g: &SpineGrammar) -> Result<SpineGrammar> {
    check_pre_form(g)?;
    let g = isolate_start(g);
    let g = split_chains(&g);
    let g = guess_bottom(&g);
    Ok(remove_collapsing_and_unit(&g).reduce())
}

fn isolate_start(g: &SpineGrammar) -> SpineGrammar {
    if !g.productions.iter().any(|p| p.rhs.contains_label(&g.start)) {
        return g.clone();
    }
    let mut out = g.clone();
    let s = g.fresh(&format!("{}0", g.start));
    out.nt0.insert(s.clone());
    for p in g.productions_of(g.start.as_str()) {
        out.productions.push(Production {
            lhs: s.clone(),
            rhs: p.rhs.clone(),
        });
    }
    out.start = s;
    out
}

/// Split `b1(b2(...bm(_)))` with `m >= 3` into left-nested binary chains.
fn split_chains(g: &SpineGrammar) -> SpineGrammar {
    let mut out = g.clone();
    out.productions.clear();
    for p in &g.productions {
        let (chain, bottom) = chain_of(g, &p.rhs);
        if !g.nt1.contains(&p.lhs) || chain.len() < 3 || !bottom.label().is_hole() {
            out.productions.push(p.clone());
            continue;
        }
        let mut acc = chain[0].clone();
        for (i, b) in chain.iter().enumerate().skip(1) {
            let lhs = if i + 1 == chain.len() {
                p.lhs.clone()
            } else {
                let x = out.fresh(&format!("{}_{}", p.lhs, i));
                out.nt1.insert(x.clone());
                x
            };
            out.productions.push(Production {
                lhs: lhs.clone(),
                rhs: build_chain(&[acc, b.clone()], Tree::hole()),
            });
            acc = lhs;
        }
    }
    out
}

/// Replace `n -> b(a)` by guessing the terminal at the bottom of the spine
/// of `a`: `n -> <n,α>(α)`, `<n,α> -> b(<a,α>(_))`, and `<a,α> -> _` for
/// `a -> α`, `<a,α> -> c(_)` for `a -> c(α)`.
fn guess_bottom(g: &SpineGrammar) -> SpineGrammar {
    let is_pair = |p: &Production| {
        let (chain, bottom) = chain_of(g, &p.rhs);
        g.nt0.contains(&p.lhs) && chain.len() == 1 && g.nt0.contains(bottom.label())
    };
    if !g.productions.iter().any(is_pair) {
        return g.clone();
    }
    let mut out = g.clone();
    out.productions.retain(|p| !is_pair(p));
    let mut names: BTreeMap<(Symbol, Symbol), Symbol> = BTreeMap::new();
    let mut name = |out: &mut SpineGrammar, n: &Symbol, a: &Symbol| {
        names
            .entry((n.clone(), a.clone()))
            .or_insert_with(|| {
                let x = out.fresh(&format!("{n}~{a}"));
                out.nt1.insert(x.clone());
                x
            })
            .clone()
    };
    for p in g.productions.iter().filter(|p| is_pair(p)) {
        let b = p.rhs.label().clone();
        let a = p.rhs.children()[0].label().clone();
        for alpha in &g.terminals.symbols0 {
            let na = name(&mut out, &p.lhs, alpha);
            let aa = name(&mut out, &a, alpha);
            out.productions.push(Production {
                lhs: p.lhs.clone(),
                rhs: Tree::unary(na.clone(), Tree::leaf(alpha.clone())),
            });
            out.productions.push(Production {
                lhs: na,
                rhs: build_chain(&[b.clone(), aa], Tree::hole()),
            });
        }
    }
    for ((a, alpha), aa) in names.clone() {
        for q in g.productions_of(a.as_str()) {
            let (chain, bottom) = chain_of(g, &q.rhs);
            if *bottom.label() == alpha {
                out.productions.push(Production {
                    lhs: aa.clone(),
                    rhs: build_chain(&chain, Tree::hole()),
                });
            }
        }
    }
    out
}

/// All ways of deleting nullable unary nonterminals from `t`.
fn drop_nullable(t: &Tree, nullable: &BTreeSet<Symbol>, nt1: &BTreeSet<Symbol>) -> Vec<Tree> {
    if t.arity() == 1 && nt1.contains(t.label()) {
        let inner = drop_nullable(&t.children()[0], nullable, nt1);
        let mut out: Vec<Tree> = inner
            .iter()
            .map(|c| Tree::unary(t.label().clone(), c.clone()))
            .collect();
        if nullable.contains(t.label()) {
            out.extend(inner);
        }
        return out;
    }
    match t.children() {
        [] => vec![t.clone()],
        [c] => drop_nullable(c, nullable, nt1)
            .into_iter()
            .map(|c| Tree::unary(t.label().clone(), c))
            .collect(),
        [a, b] => {
            let (xs, ys) = (
                drop_nullable(a, nullable, nt1),
                drop_nullable(b, nullable, nt1),
            );
            let mut out = Vec::new();
            for x in &xs {
                for y in &ys {
                    out.push(Tree::binary(t.label().clone(), x.clone(), y.clone()));
                }
            }
            out
        }
        _ => unreachable!("binary trees only"),
    }
}

/// Remove collapsing productions `b -> _` and unit productions `b -> c(_)`.
pub fn remove_collapsing_and_unit(g: &SpineGrammar) -> SpineGrammar {
    let mut nullable: BTreeSet<Symbol> = BTreeSet::new();
    loop {
        let before = nullable.len();
        for p in g.productions.iter().filter(|p| g.nt1.contains(&p.lhs)) {
            let (chain, bottom) = chain_of(g, &p.rhs);
            if bottom.label().is_hole() && chain.iter().all(|b| nullable.contains(b)) {
                nullable.insert(p.lhs.clone());
            }
        }
        if nullable.len() == before {
            break;
        }
    }
    let mut prods: BTreeSet<Production> = BTreeSet::new();
    for p in &g.productions {
        for rhs in drop_nullable(&p.rhs, &nullable, &g.nt1) {
            if !(rhs.is_leaf() && rhs.label().is_hole()) {
                prods.insert(Production {
                    lhs: p.lhs.clone(),
                    rhs,
                });
            }
        }
    }
    let unit_target = |p: &Production| {
        let r = &p.rhs;
        (g.nt1.contains(&p.lhs)
            && r.arity() == 1
            && g.nt1.contains(r.label())
            && r.children()[0].label().is_hole())
        .then(|| r.label().clone())
    };
    let mut reach: BTreeMap<Symbol, BTreeSet<Symbol>> = g
        .nt1
        .iter()
        .map(|b| (b.clone(), BTreeSet::from([b.clone()])))
        .collect();
    loop {
        let mut changed = false;
        for p in &prods {
            if let Some(c) = unit_target(p) {
                let add: Vec<Symbol> = reach[&c].iter().cloned().collect();
                let set = reach.get_mut(&p.lhs).expect("unary lhs");
                for x in add {
                    changed |= set.insert(x);
                }
            }
        }
        if !changed {
            break;
        }
    }
    let mut out = g.clone();
    let mut seen = BTreeSet::new();
    out.productions.clear();
    for p in &g.productions {
        // Keep the original order where possible, then the derived ones.
        if prods.contains(p) && unit_target(p).is_none() && seen.insert(p.clone()) {
            out.productions.push(p.clone());
        }
    }
    for p in &prods {
        if unit_target(p).is_some() {
            continue;
        }
        let lhss: Vec<Symbol> = if g.nt1.contains(&p.lhs) {
            reach
                .iter()
                .filter(|(_, s)| s.contains(&p.lhs))
                .map(|(b, _)| b.clone())
                .collect()
        } else {
            vec![p.lhs.clone()]
        };
        for lhs in lhss {
            let q = Production {
                lhs,
                rhs: p.rhs.clone(),
            };
            if seen.insert(q.clone()) {
                out.productions.push(q);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::spine::{enumerate_trees, parse_spine_grammar};

    #[test]
    fn running_example_is_normal_form() {
        let r = classify_normal_form(&fixtures::ex41());
        assert!(r.is_normal_form());
        assert!(r.others().is_empty());
        let count = |k| r.kinds.iter().filter(|&&x| x == k).count();
        assert_eq!(
            (
                count(ProdKind::Start),
                count(ProdKind::Chain),
                count(ProdKind::Terminal)
            ),
            (6, 4, 4)
        );
    }

    fn pair_grammar() -> SpineGrammar {
        parse_spine_grammar(
            "@spine-grammar\nstart s\nterm0 alpha beta\nterm2 sigma\nnt0 s a u\nnt1 b\n\
             prod s -> b(a)\nprod a -> alpha\nprod a -> b(beta)\nprod b -> sigma(u,_)\nprod u -> beta\n",
        )
        .unwrap()
    }

    #[test]
    fn nullary_argument_is_other() {
        let g = pair_grammar();
        let r = classify_normal_form(&g);
        assert_eq!(r.kinds[0], ProdKind::Other);
        assert_eq!(r.others(), [0]);
    }

    #[test]
    fn terminal_producing_start_is_other() {
        let mut g = fixtures::gmin();
        g.productions[1].rhs = crate::trees::parse_term("sigma(s,_)").unwrap();
        let r = classify_normal_form(&g);
        assert_eq!(r.kinds[1], ProdKind::Other);
        assert!(!r.start_isolated);
    }

    #[test]
    fn guessing_bottom_terminal_preserves_language() {
        let g = pair_grammar();
        let n = to_normal_form(&g).unwrap();
        assert!(
            n.is_normal_form(),
            "{}",
            crate::spine::format_spine_grammar(&n)
        );
        for k in 1..=7 {
            assert_eq!(enumerate_trees(&g, k), enumerate_trees(&n, k), "bound {k}");
        }
        let shown = crate::spine::format_spine_grammar(&n);
        assert!(shown.contains("prod s -> s~alpha(alpha)"), "{shown}");
    }

    #[test]
    fn already_normal_is_unchanged() {
        let g = fixtures::ex41();
        let n = to_normal_form(&g).unwrap();
        assert_eq!(n.productions, g.productions);
    }

    #[test]
    fn collapsing_productions_fold_away() {
        let g = parse_spine_grammar(
            "@spine-grammar\nstart s\nterm0 alpha beta\nterm2 sigma\nnt0 s u\nnt1 n a b\n\
             prod s -> n(alpha)\nprod n -> a(b(_))\nprod a -> _\nprod a -> b(_)\n\
             prod b -> sigma(u,_)\nprod u -> beta\n",
        )
        .unwrap();
        let n = remove_collapsing_and_unit(&g);
        assert!(n.productions.iter().all(|p| !p.rhs.label().is_hole()));
        assert!(n.is_normal_form());
        for k in 1..=7 {
            assert_eq!(enumerate_trees(&g, k), enumerate_trees(&n, k));
        }
    }

    #[test]
    fn unsupported_shape_is_named() {
        let mut g = fixtures::gmin();
        g.productions[0].rhs = crate::trees::parse_term("sigma(alpha,beta)").unwrap();
        let e = to_normal_form(&g).unwrap_err();
        assert_eq!(e, Error::Unsupported("s -> sigma(alpha,beta)".into()));
    }
}
