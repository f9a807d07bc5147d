//! Seeded random grammars and brute-force oracles shared by the
//! integration tests.
#![allow(dead_code)]

use std::collections::{BTreeSet, HashSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use spineccg_core::spine::{enumerate_trees, is_normalized, parse_spine_grammar};
use spineccg_core::strings::{Cfg, GSym};
use spineccg_core::{SpineGrammar, Symbol, Tree};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A normalized spine grammar with at most four nullary and four unary
/// nonterminals and a nonempty language at `bound` leaves.
pub fn random_normalized(r: &mut impl Rng, bound: usize) -> SpineGrammar {
    loop {
        let src = random_spine_source(r);
        let Ok(g) = parse_spine_grammar(&src) else {
            continue;
        };
        if is_normalized(&g) && !enumerate_trees(&g, bound).is_empty() {
            return g;
        }
    }
}

/// Source text of a normal-form grammar over `alpha`, `beta`, `sigma:1`
/// and `kappa:2`.
pub fn random_spine_source(r: &mut impl Rng) -> String {
    let n0 = r.gen_range(2..=4);
    let n1 = r.gen_range(1..=4);
    let side: Vec<String> = (1..n0).map(|i| format!("a{i}")).collect();
    let unary: Vec<String> = (1..=n1).map(|i| format!("b{i}")).collect();
    let leaf = |r: &mut dyn rand::RngCore| ["alpha", "beta"][r.gen_range(0..2)];
    let mut prods = Vec::new();
    for n in std::iter::once("s".to_string()).chain(side.iter().cloned()) {
        for _ in 0..r.gen_range(1..=2) {
            let t = leaf(r);
            if r.gen_bool(0.6) {
                prods.push(format!("{n} -> {}({t})", unary.choose(r).unwrap()));
            } else {
                prods.push(format!("{n} -> {t}"));
            }
        }
    }
    for b in &unary {
        for _ in 0..r.gen_range(1..=2) {
            if r.gen_bool(0.25) {
                let (x, y) = (unary.choose(r).unwrap(), unary.choose(r).unwrap());
                prods.push(format!("{b} -> {x}({y}(_))"));
            } else {
                let a = side.choose(r).unwrap();
                if r.gen_bool(0.5) {
                    prods.push(format!("{b} -> sigma(_,{a})"));
                } else {
                    prods.push(format!("{b} -> kappa({a},_)"));
                }
            }
        }
    }
    prods.sort();
    prods.dedup();
    let mut src =
        String::from("@spine-grammar\nstart s\nterm0 alpha beta\nterm2 sigma:1 kappa:2\n");
    src.push_str(&format!(
        "nt0 s {}\nnt1 {}\n",
        side.join(" "),
        unary.join(" ")
    ));
    for p in prods {
        src.push_str(&format!("prod {p}\n"));
    }
    src
}

/// A small CFG over `a`, `b`, `c` whose start symbol is not nullable.
/// Other nonterminals may have ε-rules, unit rules and cycles.
pub fn random_cfg(r: &mut impl Rng) -> Cfg<Symbol> {
    loop {
        let n = r.gen_range(1..=3);
        let names = ["S", "A", "B"];
        let mut g = Cfg::new("S");
        for name in &names[1..n] {
            g.nt(name);
        }
        for lhs in 0..n {
            for _ in 0..r.gen_range(1..=3) {
                let min = usize::from(lhs == 0);
                let len = r.gen_range(min..=3);
                let body = (0..len)
                    .map(|_| {
                        if r.gen_bool(0.5) {
                            GSym::T(Symbol::new(["a", "b", "c"][r.gen_range(0..3)]))
                        } else {
                            GSym::N(r.gen_range(0..n))
                        }
                    })
                    .collect();
                g.add_rule(lhs, body);
            }
        }
        if !g.nullable()[g.start] && !cfg_oracle(&g, 6).is_empty() {
            return g;
        }
    }
}

/// Membership by span saturation: `table[A][i][j]` holds when `A`
/// derives `w[i..j]`. Handles ε-rules and cycles by iterating to a fixpoint.
pub fn cfg_member(g: &Cfg<Symbol>, w: &[Symbol]) -> bool {
    let n = w.len();
    let k = g.nonterminal_count();
    let mut table = vec![vec![vec![false; n + 1]; n + 1]; k];
    loop {
        let mut changed = false;
        for rule in &g.rules {
            for i in 0..=n {
                // reach[j]: the body prefix processed so far derives w[i..j].
                let mut reach = vec![false; n + 1];
                reach[i] = true;
                for s in &rule.body {
                    let mut next = vec![false; n + 1];
                    for j in i..=n {
                        if !reach[j] {
                            continue;
                        }
                        match s {
                            GSym::T(a) => {
                                if j < n && w[j] == *a {
                                    next[j + 1] = true;
                                }
                            }
                            GSym::N(b) => {
                                for l in j..=n {
                                    if table[*b][j][l] {
                                        next[l] = true;
                                    }
                                }
                            }
                        }
                    }
                    reach = next;
                }
                for j in i..=n {
                    if reach[j] && !table[rule.lhs][i][j] {
                        table[rule.lhs][i][j] = true;
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            return table[g.start][0][n];
        }
    }
}

/// All nonempty words of length at most `max_len` over the grammar's
/// terminals, filtered by [`cfg_member`].
pub fn cfg_oracle(g: &Cfg<Symbol>, max_len: usize) -> BTreeSet<Vec<Symbol>> {
    let sigma: Vec<Symbol> = g.terminals().into_iter().collect();
    let mut out = BTreeSet::new();
    let mut layer: Vec<Vec<Symbol>> = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &layer {
            for a in &sigma {
                let mut v = w.clone();
                v.push(a.clone());
                if cfg_member(g, &v) {
                    out.insert(v.clone());
                }
                next.push(v);
            }
        }
        layer = next;
    }
    out
}

/// Trees of a normal-form spine grammar by exhaustive rewriting of
/// sentential forms. A form is pruned once its leaves plus its unary
/// nonterminals exceed `bound`, as every productive unary nonterminal
/// contributes at least one leaf.
pub fn tree_oracle(g: &SpineGrammar, bound: usize) -> BTreeSet<Tree> {
    let is_nt = |s: &Symbol| g.nt0.contains(s) || g.nt1.contains(s);
    let measure =
        |t: &Tree| t.labels().iter().filter(|l| g.nt1.contains(*l)).count() + t.leaf_count();
    let mut seen: HashSet<Tree> = HashSet::new();
    let mut todo = vec![Tree::leaf(g.start.clone())];
    let mut out = BTreeSet::new();
    while let Some(t) = todo.pop() {
        if !seen.insert(t.clone()) {
            continue;
        }
        match first_nt(&t, &is_nt) {
            None => {
                out.insert(t);
            }
            Some((path, n, arg)) => {
                for p in g.productions.iter().filter(|p| p.lhs == n) {
                    let rep = match &arg {
                        Some(a) => p.rhs.fill_hole(a),
                        None => p.rhs.clone(),
                    };
                    let u = replace(&t, &path, rep);
                    if measure(&u) <= bound {
                        todo.push(u);
                    }
                }
            }
        }
    }
    out
}

/// Leftmost nonterminal occurrence: its path, label and unary argument.
fn first_nt(
    t: &Tree,
    is_nt: &dyn Fn(&Symbol) -> bool,
) -> Option<(Vec<usize>, Symbol, Option<Tree>)> {
    if is_nt(t.label()) {
        return Some((Vec::new(), t.label().clone(), t.children().first().cloned()));
    }
    for (i, c) in t.children().iter().enumerate() {
        if let Some((mut p, n, a)) = first_nt(c, is_nt) {
            p.insert(0, i);
            return Some((p, n, a));
        }
    }
    None
}

fn replace(t: &Tree, path: &[usize], rep: Tree) -> Tree {
    match path.split_first() {
        None => rep,
        Some((&i, rest)) => {
            let mut kids = t.children().to_vec();
            kids[i] = replace(&kids[i], rest, rep);
            Tree::new(t.label().clone(), kids)
        }
    }
}

pub fn words(t: &BTreeSet<Tree>) -> BTreeSet<Vec<String>> {
    t.iter()
        .map(|x| x.yield_of().iter().map(|s| s.to_string()).collect())
        .collect()
}
