//! Built-in example grammars and the trees drawn for them.

use crate::spine::{parse_spine_grammar, SpineGrammar};
use crate::trees::{parse_sexpr, Tree};

pub const EX41_SRC: &str = include_str!("../../../data/ex41.sg");
pub const GMIN_SRC: &str = include_str!("../../../data/gmin.sg");
pub const EX21_SRC: &str = include_str!("../../../data/ex21.ccg");

/// The running example: yields `alpha^n delta gamma^n beta^m`.
pub fn ex41() -> SpineGrammar {
    parse_spine_grammar(EX41_SRC).expect("bundled grammar parses")
}

/// `s -> b(alpha)`, `b -> sigma(u,_)`, `u -> beta`.
pub fn gmin() -> SpineGrammar {
    parse_spine_grammar(GMIN_SRC).expect("bundled grammar parses")
}

/// A generated tree of [`ex41`] with yield `alpha alpha delta gamma gamma beta beta`.
pub fn generated_tree() -> Tree {
    parse_sexpr(
        "(alpha2 alpha (alpha2 alpha (beta2 (gamma2 (gamma2 delta gamma) gamma) (eta2 beta beta))))",
    )
    .expect("fixture parses")
}

/// The spinal tree of the main spine of [`generated_tree`].
pub fn spinal_tree() -> Tree {
    parse_sexpr("(alpha2 abar (alpha2 abar (beta2 (gamma2 (gamma2 delta cbar) cbar) bbar)))")
        .expect("fixture parses")
}

/// [`generated_tree`] reassembled from annotated spines.
pub fn reassembled_tree() -> Tree {
    parse_sexpr(
        "(alpha2[abar,s] alpha[abar] (alpha2[abar,s] alpha[abar] \
         (beta2[s,bbar] (gamma2[s,cbar] (gamma2[s,cbar] delta[s] gamma[cbar]) gamma[cbar]) \
         (eta2[ebar,bbar] beta[ebar] beta[bbar]))))",
    )
    .expect("fixture parses")
}

/// The sample pop-normalized MPDA drawn for [`ex41`]: a main-spine part
/// `q0 … q3'` and a side-spine part `p0 … p1'`, with stack symbols
/// `υ`, `ω` and `χ` returning to `q3`, `q3'` and `p1'`.
pub fn figure4_machine() -> crate::pushdown::NextMachine {
    use crate::pushdown::{Move, Mpda, NextMachine, Op, PopMap};
    use crate::strings::{extract_l1, Ahead, Lookahead, SpineSym};
    use crate::trees::Symbol;

    let bin = |s: &str, a: &str, b: &str| {
        SpineSym::Binary(Symbol::new(s), Symbol::new(a), Symbol::new(b))
    };
    let gamma2 = bin("gamma2", "s", "cbar");
    let beta2 = bin("beta2", "s", "bbar");
    let alpha2 = bin("alpha2", "abar", "s");
    let eta2 = bin("eta2", "ebar", "bbar");
    let delta = SpineSym::Leaf(Symbol::new("delta"), Symbol::new("s"));
    let beta = SpineSym::Leaf(Symbol::new("beta"), Symbol::new("bbar"));
    let pair = |next: Option<&SpineSym>, cur: &SpineSym| Lookahead {
        next: next.map_or(Ahead::End, |n| Ahead::Sym(n.clone())),
        cur: cur.clone(),
    };
    let states = ["q0", "q1", "q1'", "q2", "q3", "q3'", "p0", "p1", "p1'"];
    let output = vec![
        pair(Some(&gamma2), &delta),
        pair(Some(&gamma2), &gamma2),
        pair(Some(&beta2), &gamma2),
        pair(Some(&alpha2), &beta2),
        pair(Some(&alpha2), &alpha2),
        pair(None, &alpha2),
        pair(Some(&eta2), &beta),
        pair(Some(&eta2), &eta2),
        pair(None, &eta2),
    ];
    let q = |s: &str| states.iter().position(|x| *x == s).expect("known state");
    let (upsilon, omega, chi) = (0, 1, 2);
    let mv = |from: &str, op: Op, to: &str| Move {
        from: q(from),
        op,
        to: q(to),
    };
    let delta_moves = vec![
        mv("q0", Op::Skip, "q1"),
        mv("q0", Op::Skip, "q1'"),
        mv("q1", Op::Push(upsilon), "q1"),
        mv("q1", Op::Push(upsilon), "q1'"),
        mv("q1'", Op::Skip, "q2"),
        mv("q2", Op::Pop(upsilon), "q3"),
        mv("q3", Op::Pop(upsilon), "q3"),
        mv("q3", Op::Pop(omega), "q3'"),
        mv("q2", Op::Pop(omega), "q3'"),
        mv("p0", Op::Skip, "p1"),
        mv("p0", Op::Pop(chi), "p1'"),
        mv("p1", Op::Skip, "p1"),
        mv("p1", Op::Pop(chi), "p1'"),
    ];
    let mpda = Mpda {
        states: states.iter().map(|s| s.to_string()).collect(),
        output,
        stack: ["υ", "ω", "χ"].iter().map(|s| s.to_string()).collect(),
        delta: delta_moves,
        initial: [q("q0"), q("p0")].into(),
        finals: [q("q3'"), q("p1'")].into(),
    };
    let ret = PopMap([(upsilon, q("q3")), (omega, q("q3'")), (chi, q("p1'"))].into());
    NextMachine {
        mpda,
        ret,
        l1: extract_l1(&ex41()),
    }
}
