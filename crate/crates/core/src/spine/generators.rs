use std::collections::{BTreeMap, BTreeSet};

use super::{Production, SpineGrammar};
use crate::error::{Error, Result};
use crate::trees::{Symbol, Tree};

/// For every productive unary nonterminal, the nullary nonterminals that
/// occur in some terminal context it derives with unary productions only.
fn occurrences(g: &SpineGrammar) -> BTreeMap<Symbol, BTreeSet<Symbol>> {
    let mut occ: BTreeMap<Symbol, BTreeSet<Symbol>> = BTreeMap::new();
    loop {
        let mut changed = false;
        for p in g.productions.iter().filter(|p| g.nt1.contains(&p.lhs)) {
            let mut found = BTreeSet::new();
            if !collect(g, &p.rhs, &occ, &mut found) {
                continue;
            }
            changed |= !occ.contains_key(&p.lhs);
            let set = occ.entry(p.lhs.clone()).or_default();
            for a in found {
                changed |= set.insert(a);
            }
        }
        if !changed {
            return occ;
        }
    }
}

/// Gather nullary nonterminals of `t`; false if `t` uses an unproductive
/// unary nonterminal.
fn collect(
    g: &SpineGrammar,
    t: &Tree,
    occ: &BTreeMap<Symbol, BTreeSet<Symbol>>,
    out: &mut BTreeSet<Symbol>,
) -> bool {
    let l = t.label();
    if g.nt1.contains(l) {
        match occ.get(l) {
            Some(s) => out.extend(s.iter().cloned()),
            None => return false,
        }
    } else if t.is_leaf() && g.nt0.contains(l) {
        out.insert(l.clone());
    }
    t.children().iter().all(|c| collect(g, c, occ, out))
}

/// Normal form, and no nullary nonterminal occurs in its own spinal trees.
pub fn is_normalized(g: &SpineGrammar) -> bool {
    if !g.is_normal_form() {
        return false;
    }
    let occ = occurrences(g);
    g.productions
        .iter()
        .filter(|p| g.nt0.contains(&p.lhs))
        .all(|p| {
            let mut found = BTreeSet::new();
            !collect(g, &p.rhs, &occ, &mut found) || !found.contains(&p.lhs)
        })
}

/// Make spine generators disjoint from their spinal trees by keeping two
/// copies of every nonterminal: copy `i` attaches copy `1 - i` on the
/// non-spinal side. The tree language is unchanged, as only nonterminals
/// are renamed.
pub fn normalize_generators(g: &SpineGrammar) -> Result<SpineGrammar> {
    if !g.is_normal_form() {
        return Err(Error::Precondition("grammar is not in normal form".into()));
    }
    let mut taken: BTreeSet<Symbol> = g
        .terminals
        .symbols0
        .iter()
        .chain(&g.terminals.symbols2)
        .cloned()
        .collect();
    let mut copy: BTreeMap<(Symbol, u8), Symbol> = BTreeMap::new();
    for n in g.nt0.iter().chain(&g.nt1) {
        for i in 0..2u8 {
            let mut name = format!("{n}^{i}");
            while taken.contains(name.as_str()) {
                name.push('\'');
            }
            let s = Symbol::from(name);
            taken.insert(s.clone());
            copy.insert((n.clone(), i), s);
        }
    }
    let rename = |t: &Tree, i: u8| -> Tree {
        t.map(&mut |l: &Symbol| {
            if g.nt1.contains(l) {
                copy[&(l.clone(), i)].clone()
            } else if g.nt0.contains(l) {
                copy[&(l.clone(), 1 - i)].clone()
            } else {
                l.clone()
            }
        })
    };
    let mut out = g.clone();
    out.nt0 = g
        .nt0
        .iter()
        .flat_map(|n| [copy[&(n.clone(), 0)].clone(), copy[&(n.clone(), 1)].clone()])
        .collect();
    out.nt1 = g
        .nt1
        .iter()
        .flat_map(|n| [copy[&(n.clone(), 0)].clone(), copy[&(n.clone(), 1)].clone()])
        .collect();
    out.start = copy[&(g.start.clone(), 0)].clone();
    out.productions = (0..2u8)
        .flat_map(|i| g.productions.iter().map(move |p| (i, p)))
        .map(|(i, p)| Production {
            lhs: copy[&(p.lhs.clone(), i)].clone(),
            rhs: rename(&p.rhs, i),
        })
        .collect();
    Ok(out.reduce())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::spine::{enumerate_trees, parse_spine_grammar, spinal_trees};

    #[test]
    fn running_example_is_normalized() {
        assert!(is_normalized(&fixtures::ex41()));
        assert!(is_normalized(&fixtures::gmin()));
    }

    fn self_attaching() -> SpineGrammar {
        parse_spine_grammar(
            "@spine-grammar\nstart s\nterm0 alpha beta\nterm2 sigma:2\nnt0 s a\nnt1 b\n\
             prod s -> b(alpha)\nprod a -> b(beta)\nprod a -> beta\nprod b -> sigma(a,_)\n",
        )
        .unwrap()
    }

    #[test]
    fn copies_alternate() {
        let g = self_attaching();
        assert!(g.is_normal_form());
        assert!(!is_normalized(&g));
        let n = normalize_generators(&g).unwrap();
        assert!(is_normalized(&n));
        for k in 1..=7 {
            assert_eq!(enumerate_trees(&g, k), enumerate_trees(&n, k));
        }
        for a in &n.nt0 {
            for t in spinal_trees(&n, a.as_str(), 10) {
                assert!(!t.contains_label(a));
            }
        }
    }

    #[test]
    fn not_normal_form_is_rejected() {
        let mut g = fixtures::gmin();
        g.productions[0].rhs = crate::trees::parse_term("b(u)").unwrap();
        assert!(matches!(
            normalize_generators(&g),
            Err(Error::Precondition(_))
        ));
    }
}
