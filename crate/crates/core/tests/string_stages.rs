mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;

use spineccg_core::pushdown::{cfg_to_pda, pda_to_mpda, pop_normalize};
use spineccg_core::strings::{
    build_next_cfg, cfg_enumerate, intersect_cfg_nfa, inverse_projection, next_nfa, parse_cfg,
    to_quadratic_gnf, Ahead,
};

#[test]
fn membership_oracle_on_a_known_language() {
    // a^n b^n with n >= 1.
    let g = parse_cfg("@cfg\nstart S\nprod S -> a S b\nprod S -> a b\n").unwrap();
    let got = common::cfg_oracle(&g, 6);
    let want: BTreeSet<Vec<String>> = ["ab", "aabb", "aaabbb"]
        .iter()
        .map(|w| w.chars().map(|c| c.to_string()).collect())
        .collect();
    let got: BTreeSet<Vec<String>> = got
        .iter()
        .map(|w| w.iter().map(|s| s.to_string()).collect())
        .collect();
    assert_eq!(got, want);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn every_stage_keeps_the_language(seed in any::<u64>()) {
        let g = common::random_cfg(&mut common::rng(seed));
        let want = common::cfg_oracle(&g, 5);
        prop_assert_eq!(&cfg_enumerate(&g, 5), &want);
        let gnf = to_quadratic_gnf(&g).unwrap();
        prop_assert_eq!(&cfg_enumerate(&gnf, 5), &want);
        let pda = cfg_to_pda(&gnf).unwrap();
        prop_assert_eq!(&pda.enumerate(5), &want);
        for w in &want {
            prop_assert!(pda.accepts(w));
        }
        let long: BTreeSet<_> = want.iter().filter(|w| w.len() >= 2).cloned().collect();
        let mpda = pda_to_mpda(&pda).unwrap();
        prop_assert_eq!(&mpda.enumerate(5), &long);
        let (pn, ret) = pop_normalize(&mpda);
        prop_assert!(pn.is_pop_normalized());
        prop_assert_eq!(&pn.enumerate(5), &long);
        prop_assert_eq!(pn.return_map().unwrap(), ret);
    }

    #[test]
    fn lookahead_language_decorates_each_word(seed in any::<u64>()) {
        let g = common::random_cfg(&mut common::rng(seed));
        let base = common::cfg_oracle(&g, 4);
        let next = cfg_enumerate(&build_next_cfg(&g), 4);
        prop_assert_eq!(next.len(), base.len());
        for w in &next {
            let cur: Vec<_> = w.iter().map(|x| x.cur.clone()).collect();
            prop_assert!(base.contains(&cur));
            for (i, x) in w.iter().enumerate() {
                match w.get(i + 1) {
                    Some(y) => prop_assert_eq!(&x.next, &Ahead::Sym(y.cur.clone())),
                    None => prop_assert_eq!(&x.next, &Ahead::End),
                }
            }
        }
        let sigma = g.terminals();
        let product = intersect_cfg_nfa(&inverse_projection(&g), &next_nfa(&sigma));
        prop_assert_eq!(cfg_enumerate(&product, 4), next);
    }
}
