use std::collections::{BTreeMap, BTreeSet};

use proptest::prelude::*;

use spineccg_core::ccg::{
    enumerate_derivations, from_rule_tree, parse_ccg, recognize, to_rule_tree, Category, Ccg, Slash,
};
use spineccg_core::fixtures::EX21_SRC;
use spineccg_core::Tree;

fn ex21() -> Ccg {
    parse_ccg(EX21_SRC).unwrap()
}

/// Forward and backward composition of degree at most 2 written out
/// directly for first-order categories.
fn combine_oracle(l: &Category, r: &Category) -> BTreeSet<Category> {
    let mut out = BTreeSet::new();
    let mut try_dir = |dir: Slash, primary: &Category, secondary: &Category| {
        let Some((s, arg)) = primary.args.last() else {
            return;
        };
        if *s != dir || !arg.is_atomic() || secondary.target != arg.target || secondary.arity() > 2
        {
            return;
        }
        let mut c = primary.clone();
        c.args.pop();
        c.args.extend(secondary.args.iter().cloned());
        out.insert(c);
    };
    try_dir(Slash::Fwd, l, r);
    try_dir(Slash::Bwd, r, l);
    out
}

fn category_text() -> impl Strategy<Value = String> {
    let atom = prop::sample::select(vec!["⊥", "a", "b", "c", "d", "e"]);
    let arg = (prop::sample::select(vec!["/", "\\"]), atom.clone());
    (atom, prop::collection::vec(arg, 0..=3)).prop_map(|(t, args)| {
        args.iter()
            .fold(t.to_string(), |s, (sl, a)| format!("{s}{sl}{a}"))
    })
}

fn yields(g: &Ccg, max_leaves: usize) -> BTreeSet<Vec<String>> {
    let owner: BTreeMap<&Category, &str> = g
        .lexicon
        .iter()
        .flat_map(|(k, cs)| cs.iter().map(move |c| (c, k.as_str())))
        .collect();
    enumerate_derivations(g, max_leaves)
        .iter()
        .map(|t| t.yield_of().iter().map(|c| owner[c].to_string()).collect())
        .collect()
}

#[test]
fn derivations_validate_and_round_trip() {
    let g = ex21();
    let words = yields(&g, 7);
    let fig1: Vec<String> = ["alpha", "alpha", "delta", "gamma", "gamma", "beta", "beta"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    assert!(words.contains(&fig1));
    // Composition also yields words outside alpha^n delta gamma^n beta^m.
    let odd: Vec<String> = ["delta", "gamma", "alpha", "alpha", "gamma", "beta"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    assert!(words.contains(&odd));
    for t in enumerate_derivations(&g, 7) {
        assert!(g.validate_derivation(&t, None).is_accepted());
        let rt = to_rule_tree(&t).unwrap();
        assert!(from_rule_tree(&rt).as_ref() == Some(&t));
    }
}

proptest! {
    #[test]
    fn combine_matches_the_composition_oracle(l in category_text(), r in category_text()) {
        let mut g = ex21();
        let (lc, rc) = (g.parse_category(&l).unwrap(), g.parse_category(&r).unwrap());
        let got: BTreeSet<Category> = g.combine(&lc, &rc).into_iter().map(|(c, _)| c).collect();
        prop_assert_eq!(got, combine_oracle(&lc, &rc));
    }

    #[test]
    fn combined_nodes_validate_over_lexical_leaves(i in 0usize..9, j in 0usize..9) {
        let g = ex21();
        let lex: Vec<&Category> = g.lexicon.values().flatten().collect();
        let (l, r) = (lex[i], lex[j]);
        for (c, _) in g.combine(l, r) {
            let t = Tree::binary(c, Tree::leaf(l.clone()), Tree::leaf(r.clone()));
            prop_assert!(g.validate_derivation(&t, None).is_valid());
        }
    }

    #[test]
    fn recognition_matches_enumeration(w in prop::collection::vec(
        prop::sample::select(vec!["alpha", "beta", "gamma", "delta"]), 0..=7)) {
        let g = ex21();
        let cap = g.max_lexicon_arity() + w.len();
        let owned: Vec<String> = w.iter().map(|s| s.to_string()).collect();
        prop_assert_eq!(recognize(&g, &w, cap), yields(&g, 7).contains(&owned));
    }
}
