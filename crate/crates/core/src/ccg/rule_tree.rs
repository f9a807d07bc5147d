//! Rule trees: derivations labeled by ground rules instead of categories.

use super::category::{Atom, Category, Slash};
use super::grammar::Ccg;
use crate::trees::Tree;

/// A rule `a x y / (a x|b , b y)` with its context `x` left open: the
/// primary target `a`, the argument `b` and the secondary arguments `y`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GroundRule {
    pub dir: Slash,
    pub target: Atom,
    pub arg: Category,
    pub y: Vec<(Slash, Category)>,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RuleNode {
    Lex(Category),
    Rule(GroundRule),
}

pub type RuleTree = Tree<RuleNode>;

/// The partial type map: lexical leaves have their own category; a rule
/// applies when the primary child has target `a` and last argument `|b`
/// and the secondary child is exactly `b y`.
pub fn rule_tree_type(t: &RuleTree) -> Option<Category> {
    match (t.label(), t.children()) {
        (RuleNode::Lex(c), []) => Some(c.clone()),
        (RuleNode::Rule(r), [l, rt]) => {
            let (pt, st) = match r.dir {
                Slash::Fwd => (rule_tree_type(l)?, rule_tree_type(rt)?),
                Slash::Bwd => (rule_tree_type(rt)?, rule_tree_type(l)?),
            };
            let (s, b) = pt.last()?;
            if pt.target != r.target || *s != r.dir || *b != r.arg {
                return None;
            }
            let k = r.y.len();
            if !st.has_head(k, &r.arg) || st.args[st.args.len() - k..] != r.y[..] {
                return None;
            }
            let mut out = pt.head(1);
            out.args.extend(r.y.iter().cloned());
            Some(out)
        }
        _ => None,
    }
}

/// Whether the type of `t` is defined and an initial atom.
pub fn is_rule_tree(g: &Ccg, t: &RuleTree) -> bool {
    rule_tree_type(t).is_some_and(|c| c.is_atomic() && g.initial.contains(&c.target))
}

fn ground(
    dir: Slash,
    primary: &Category,
    secondary: &Category,
    out: &Category,
) -> Option<GroundRule> {
    let (s, b) = primary.last()?;
    if *s != dir || secondary.arity() < b.arity() {
        return None;
    }
    let k = secondary.arity() - b.arity();
    if !secondary.has_head(k, b) {
        return None;
    }
    let y = secondary.args[b.arity()..].to_vec();
    let mut o = primary.head(1);
    o.args.extend(y.iter().cloned());
    (o == *out).then(|| GroundRule {
        dir,
        target: primary.target,
        arg: b.clone(),
        y,
    })
}

/// The rule tree of a derivation tree; forward readings are tried first.
pub fn to_rule_tree(t: &Tree<Category>) -> Option<RuleTree> {
    match t.children() {
        [] => Some(Tree::leaf(RuleNode::Lex(t.label().clone()))),
        [l, r] => {
            let rule = ground(Slash::Fwd, l.label(), r.label(), t.label())
                .or_else(|| ground(Slash::Bwd, r.label(), l.label(), t.label()))?;
            Some(Tree::binary(
                RuleNode::Rule(rule),
                to_rule_tree(l)?,
                to_rule_tree(r)?,
            ))
        }
        _ => None,
    }
}

/// The derivation tree of a rule tree, labeling every node by its type.
pub fn from_rule_tree(t: &RuleTree) -> Option<Tree<Category>> {
    let c = rule_tree_type(t)?;
    let children = t
        .children()
        .iter()
        .map(from_rule_tree)
        .collect::<Option<Vec<_>>>()?;
    Some(Tree::new(c, children))
}
