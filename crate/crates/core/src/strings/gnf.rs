use std::collections::{BTreeMap, BTreeSet, HashMap};

use super::cfg::{Cfg, GSym, Rule, Terminal};
use super::nfa::binarize;
use crate::error::{Error, Result};

fn remove_epsilon<T: Terminal>(g: &Cfg<T>) -> Cfg<T> {
    let nullable = g.nullable();
    let mut out = g.clone();
    out.rules.clear();
    for r in &g.rules {
        let mut variants: Vec<Vec<GSym<T>>> = vec![Vec::new()];
        for s in &r.body {
            let drop = matches!(s, GSym::N(n) if nullable[*n]);
            let mut next = Vec::with_capacity(variants.len() * 2);
            for v in &variants {
                let mut with = v.clone();
                with.push(s.clone());
                next.push(with);
                if drop {
                    next.push(v.clone());
                }
            }
            variants = next;
        }
        for v in variants.into_iter().filter(|v| !v.is_empty()) {
            out.rules.push(Rule {
                lhs: r.lhs,
                body: v,
            });
        }
    }
    out
}

fn remove_units<T: Terminal>(g: &Cfg<T>) -> Cfg<T> {
    let n = g.nonterminal_count();
    let unit = |r: &Rule<T>| match r.body.as_slice() {
        [GSym::N(b)] => Some(*b),
        _ => None,
    };
    let mut succ: Vec<Vec<usize>> = vec![Vec::new(); n];
    for r in &g.rules {
        if let Some(b) = unit(r) {
            succ[r.lhs].push(b);
        }
    }
    let mut by_lhs: Vec<Vec<&Rule<T>>> = vec![Vec::new(); n];
    for r in g.rules.iter().filter(|r| unit(r).is_none()) {
        by_lhs[r.lhs].push(r);
    }
    let mut out = g.clone();
    out.rules.clear();
    for a in 0..n {
        let mut seen = BTreeSet::from([a]);
        let mut stack = vec![a];
        while let Some(b) = stack.pop() {
            for r in &by_lhs[b] {
                out.rules.push(Rule {
                    lhs: a,
                    body: r.body.clone(),
                });
            }
            for &c in &succ[b] {
                if seen.insert(c) {
                    stack.push(c);
                }
            }
        }
    }
    out
}

/// Whether every rule has shape `A -> a`, `A -> a B` or `A -> a B C`.
pub fn is_quadratic_gnf<T: Terminal>(g: &Cfg<T>) -> bool {
    g.rules.iter().all(|r| {
        matches!(r.body.first(), Some(GSym::T(_)))
            && r.body.len() <= 3
            && r.body[1..].iter().all(|s| matches!(s, GSym::N(_)))
    })
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum Item {
    Whole(usize),
    /// Rest of the first nonterminal after the second was recognised as its left corner.
    Rest(usize, usize),
}

/// Quadratic Greibach normal form via the left-corner transform of a
/// Chomsky normal form grammar, followed by substitution of the leading
/// nonterminal of every remainder.
pub fn to_quadratic_gnf<T: Terminal>(g: &Cfg<T>) -> Result<Cfg<T>> {
    let g = g.reduce();
    if g.rules.is_empty() {
        return Ok(g);
    }
    if g.nullable()[g.start] {
        return Err(Error::EmptyString);
    }
    let c = binarize(&remove_units(&remove_epsilon(&g)).reduce()).reduce();
    let n = c.nonterminal_count();
    let mut terms: Vec<Vec<T>> = vec![Vec::new(); n];
    let mut parents: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    for r in &c.rules {
        match r.body.as_slice() {
            [GSym::T(a)] => terms[r.lhs].push(a.clone()),
            [GSym::N(j), GSym::N(k)] => parents[*j].push((r.lhs, *k)),
            _ => unreachable!("Chomsky normal form"),
        }
    }
    // lc[i]: nonterminals reachable from i along left children, reflexively.
    let mut lc: Vec<Option<BTreeSet<usize>>> = vec![None; n];
    let mut children: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (j, ps) in parents.iter().enumerate() {
        for &(l, _) in ps {
            children[l].push(j);
        }
    }
    let mut left_corners = |i: usize| -> BTreeSet<usize> {
        lc[i]
            .get_or_insert_with(|| {
                let mut seen = BTreeSet::from([i]);
                let mut stack = vec![i];
                while let Some(x) = stack.pop() {
                    for &j in &children[x] {
                        if seen.insert(j) {
                            stack.push(j);
                        }
                    }
                }
                seen
            })
            .clone()
    };
    let mut out: Cfg<T> = Cfg::new(c.name(c.start));
    let mut ids: HashMap<Item, usize> = HashMap::from([(Item::Whole(c.start), out.start)]);
    let mut queue = vec![Item::Whole(c.start)];
    let mut id = |it: Item, out: &mut Cfg<T>, queue: &mut Vec<Item>| -> usize {
        *ids.entry(it).or_insert_with(|| {
            queue.push(it);
            let name = match it {
                Item::Whole(i) => c.name(i).to_string(),
                Item::Rest(i, j) => format!("{}\\{}", c.name(i), c.name(j)),
            };
            out.nt(&out.fresh_name(&name))
        })
    };
    let mut rules: Vec<(Item, T, Vec<Item>)> = Vec::new();
    while let Some(it) = queue.pop() {
        rules.clear();
        match it {
            Item::Whole(i) => {
                for j in left_corners(i) {
                    for a in &terms[j] {
                        rules.push((it, a.clone(), vec![Item::Rest(i, j)]));
                        if j == i {
                            rules.push((it, a.clone(), Vec::new()));
                        }
                    }
                }
            }
            Item::Rest(i, j) => {
                let lci = left_corners(i);
                for &(l, k) in &parents[j] {
                    if !lci.contains(&l) {
                        continue;
                    }
                    for m in left_corners(k) {
                        for a in &terms[m] {
                            let mut heads = vec![vec![Item::Rest(k, m)]];
                            if m == k {
                                heads.push(Vec::new());
                            }
                            for h in heads {
                                let mut body = h.clone();
                                body.push(Item::Rest(i, l));
                                rules.push((it, a.clone(), body));
                                if l == i {
                                    rules.push((it, a.clone(), h));
                                }
                            }
                        }
                    }
                }
            }
        }
        let lhs = id(it, &mut out, &mut queue);
        for (_, a, rest) in rules.drain(..) {
            let mut body = vec![GSym::T(a)];
            for r in rest {
                body.push(GSym::N(id(r, &mut out, &mut queue)));
            }
            out.rules.push(Rule { lhs, body });
        }
    }
    let out = out.reduce();
    debug_assert!(is_quadratic_gnf(&out));
    Ok(out)
}

/// Nonterminals grouped by rule count, for size reports.
pub fn rule_histogram<T: Terminal>(g: &Cfg<T>) -> BTreeMap<usize, usize> {
    let mut per: BTreeMap<usize, usize> = BTreeMap::new();
    for r in &g.rules {
        *per.entry(r.lhs).or_default() += 1;
    }
    let mut out = BTreeMap::new();
    for c in per.values() {
        *out.entry(*c).or_default() += 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::strings::cfg::parse_cfg;

    #[test]
    fn ab_becomes_terminal_initial() {
        let g = parse_cfg("@cfg\nstart S\nprod S -> a b\n").unwrap();
        let q = to_quadratic_gnf(&g).unwrap();
        assert!(is_quadratic_gnf(&q));
        assert_eq!(q.rules.len(), 2);
        assert_eq!(q.enumerate(4), g.enumerate(4));
    }

    #[test]
    fn left_recursion() {
        let g = parse_cfg("@cfg\nstart S\nprod S -> S a\nprod S -> a\n").unwrap();
        let q = to_quadratic_gnf(&g).unwrap();
        assert!(is_quadratic_gnf(&q));
        assert_eq!(q.enumerate(6), g.enumerate(6));
    }

    #[test]
    fn empty_word_is_rejected() {
        let g = parse_cfg("@cfg\nstart S\nprod S -> a S\nprod S ->\n").unwrap();
        assert_eq!(to_quadratic_gnf(&g).unwrap_err(), Error::EmptyString);
    }

    #[test]
    fn nullable_inner_symbols() {
        let g = parse_cfg(
            "@cfg\nstart S\nprod S -> A S B\nprod S -> c\nprod A -> a\nprod A ->\nprod B -> S\nprod B -> b\n",
        )
        .unwrap();
        let q = to_quadratic_gnf(&g).unwrap();
        assert!(is_quadratic_gnf(&q));
        assert_eq!(q.enumerate(6), g.enumerate(6));
    }
}
