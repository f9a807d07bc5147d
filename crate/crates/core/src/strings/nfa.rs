use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use super::cfg::{Cfg, GSym, Rule, Terminal};

/// A nondeterministic finite automaton with states `0..names.len()`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Nfa<T> {
    pub names: Vec<String>,
    pub delta: Vec<(usize, T, usize)>,
    pub initial: BTreeSet<usize>,
    pub finals: BTreeSet<usize>,
}

impl<T: Terminal> Nfa<T> {
    /// δ̂(q, w)
    pub fn run(&self, q: usize, w: &[T]) -> BTreeSet<usize> {
        let mut cur = BTreeSet::from([q]);
        for a in w {
            cur = self
                .delta
                .iter()
                .filter(|(p, b, _)| cur.contains(p) && b == a)
                .map(|&(_, _, r)| r)
                .collect();
        }
        cur
    }

    pub fn accepts(&self, w: &[T]) -> bool {
        self.initial
            .iter()
            .any(|&q| self.run(q, w).iter().any(|r| self.finals.contains(r)))
    }
}

/// `nfa_run(a, q, w)`.
pub fn nfa_run<T: Terminal>(a: &Nfa<T>, q: usize, w: &[T]) -> BTreeSet<usize> {
    a.run(q, w)
}

/// Rewrite to bodies of length at most two, with terminals only in
/// bodies of length one.
pub(crate) fn binarize<T: Terminal>(g: &Cfg<T>) -> Cfg<T> {
    let mut out = g.clone();
    out.rules.clear();
    let mut term_nt: BTreeMap<T, usize> = BTreeMap::new();
    let mut pair_nt: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for r in &g.rules {
        if r.body.len() <= 1 {
            out.rules.push(r.clone());
            continue;
        }
        let mut ids: Vec<usize> = Vec::new();
        for s in &r.body {
            ids.push(match s {
                GSym::N(n) => *n,
                GSym::T(t) => match term_nt.get(t) {
                    Some(&n) => n,
                    None => {
                        let n = out.nt(&out.fresh_name(&format!("<{t}>")));
                        out.rules.push(Rule {
                            lhs: n,
                            body: vec![GSym::T(t.clone())],
                        });
                        term_nt.insert(t.clone(), n);
                        n
                    }
                },
            });
        }
        while ids.len() > 2 {
            let b = ids.pop().expect("len > 2");
            let a = ids.pop().expect("len > 2");
            let n = match pair_nt.get(&(a, b)) {
                Some(&n) => n,
                None => {
                    let name = out.fresh_name(&format!("<{}.{}>", out.name(a), out.name(b)));
                    let n = out.nt(&name);
                    out.rules.push(Rule {
                        lhs: n,
                        body: vec![GSym::N(a), GSym::N(b)],
                    });
                    pair_nt.insert((a, b), n);
                    n
                }
            };
            ids.push(n);
        }
        out.add_rule(r.lhs, ids.into_iter().map(GSym::N).collect());
    }
    out
}

/// Triple construction for L(g) ∩ L(a), followed by reduction.
pub fn intersect_cfg_nfa<T: Terminal>(g: &Cfg<T>, a: &Nfa<T>) -> Cfg<T> {
    let b = binarize(g);
    let n_states = a.names.len();
    type Item = (usize, usize, usize);
    let mut items: HashSet<Item> = HashSet::new();
    let mut by_start: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
    let mut by_end: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
    let mut agenda: Vec<Item> = Vec::new();
    let mut unit_of: HashMap<usize, Vec<usize>> = HashMap::new();
    let mut first_of: HashMap<usize, Vec<(usize, usize)>> = HashMap::new();
    let mut second_of: HashMap<usize, Vec<(usize, usize)>> = HashMap::new();
    let mut push = |it: Item, agenda: &mut Vec<Item>| {
        if items.insert(it) {
            agenda.push(it);
        }
    };
    for r in &b.rules {
        match r.body.as_slice() {
            [] => {
                for p in 0..n_states {
                    push((p, r.lhs, p), &mut agenda);
                }
            }
            [GSym::T(t)] => {
                for (p, s, q) in &a.delta {
                    if s == t {
                        push((*p, r.lhs, *q), &mut agenda);
                    }
                }
            }
            [GSym::N(x)] => unit_of.entry(*x).or_default().push(r.lhs),
            [GSym::N(x), GSym::N(y)] => {
                first_of.entry(*x).or_default().push((r.lhs, *y));
                second_of.entry(*y).or_default().push((r.lhs, *x));
            }
            _ => unreachable!("binarized"),
        }
    }
    while let Some((p, x, q)) = agenda.pop() {
        by_start.entry((x, p)).or_default().push(q);
        by_end.entry((x, q)).or_default().push(p);
        let mut found = Vec::new();
        for &lhs in unit_of.get(&x).into_iter().flatten() {
            found.push((p, lhs, q));
        }
        for &(lhs, y) in first_of.get(&x).into_iter().flatten() {
            for &r in by_start.get(&(y, q)).into_iter().flatten() {
                found.push((p, lhs, r));
            }
        }
        for &(lhs, w) in second_of.get(&x).into_iter().flatten() {
            for &o in by_end.get(&(w, p)).into_iter().flatten() {
                found.push((o, lhs, q));
            }
        }
        for it in found {
            push(it, &mut agenda);
        }
    }
    // Emit rules top-down from the start so that only useful triples appear.
    let mut out = Cfg::new(&b.fresh_name("S'"));
    let mut ids: HashMap<Item, usize> = HashMap::new();
    let mut queue: Vec<Item> = Vec::new();
    let names = |it: Item| format!("[{},{},{}]", a.names[it.0], b.name(it.1), a.names[it.2]);
    fn id_of(
        it: Item,
        ids: &mut HashMap<Item, usize>,
        out: &mut Cfg<impl Terminal>,
        queue: &mut Vec<Item>,
        name: impl Fn(Item) -> String,
    ) -> usize {
        *ids.entry(it).or_insert_with(|| {
            queue.push(it);
            out.nt(&name(it))
        })
    }
    for &p in &a.initial {
        for &q in &a.finals {
            if items.contains(&(p, b.start, q)) {
                let n = id_of((p, b.start, q), &mut ids, &mut out, &mut queue, names);
                let s = out.start;
                out.add_rule(s, vec![GSym::N(n)]);
            }
        }
    }
    let mut rules_of: HashMap<usize, Vec<&Rule<T>>> = HashMap::new();
    for r in &b.rules {
        rules_of.entry(r.lhs).or_default().push(r);
    }
    while let Some((p, x, q)) = queue.pop() {
        let lhs = ids[&(p, x, q)];
        for r in rules_of.get(&x).into_iter().flatten() {
            match r.body.as_slice() {
                [] => {
                    if p == q {
                        out.add_rule(lhs, Vec::new());
                    }
                }
                [GSym::T(t)] => {
                    if a.delta.iter().any(|(s, u, e)| *s == p && u == t && *e == q) {
                        out.add_rule(lhs, vec![GSym::T(t.clone())]);
                    }
                }
                [GSym::N(y)] => {
                    if items.contains(&(p, *y, q)) {
                        let n = id_of((p, *y, q), &mut ids, &mut out, &mut queue, names);
                        out.add_rule(lhs, vec![GSym::N(n)]);
                    }
                }
                [GSym::N(y), GSym::N(z)] => {
                    for &m in by_start.get(&(*y, p)).into_iter().flatten() {
                        if items.contains(&(m, *z, q)) {
                            let l = id_of((p, *y, m), &mut ids, &mut out, &mut queue, names);
                            let r = id_of((m, *z, q), &mut ids, &mut out, &mut queue, names);
                            out.add_rule(lhs, vec![GSym::N(l), GSym::N(r)]);
                        }
                    }
                }
                _ => unreachable!("binarized"),
            }
        }
    }
    out.reduce()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::strings::cfg::parse_cfg;
    use crate::strings::cfg::tests::words;
    use crate::trees::Symbol;

    fn only_ab() -> Nfa<Symbol> {
        Nfa {
            names: vec!["0".into(), "1".into(), "2".into()],
            delta: vec![(0, "a".into(), 1), (1, "b".into(), 2)],
            initial: BTreeSet::from([0]),
            finals: BTreeSet::from([2]),
        }
    }

    #[test]
    fn run_empty_word_is_identity() {
        assert_eq!(nfa_run(&only_ab(), 1, &[]), BTreeSet::from([1]));
        assert_eq!(nfa_run(&only_ab(), 0, &["a".into()]), BTreeSet::from([1]));
        assert!(nfa_run(&only_ab(), 0, &["b".into()]).is_empty());
    }

    #[test]
    fn intersection_filters() {
        let g = parse_cfg("@cfg\nstart S\nprod S -> a b\nprod S -> b a\n").unwrap();
        let i = intersect_cfg_nfa(&g, &only_ab());
        assert_eq!(cfg_enumerate_all(&i), words(&["ab"]));
    }

    fn cfg_enumerate_all(g: &Cfg<Symbol>) -> BTreeSet<Vec<Symbol>> {
        g.enumerate(6)
    }

    #[test]
    fn binarize_preserves_language() {
        let g =
            parse_cfg("@cfg\nstart S\nprod S -> a S b S\nprod S ->\nprod S -> c c c\n").unwrap();
        let b = binarize(&g);
        assert!(b.rules.iter().all(|r| r.body.len() <= 2));
        assert_eq!(g.enumerate(6), b.enumerate(6));
    }
}
