//! Combinatory categorial grammars: categories, rule schemas, grammars,
//! derivation trees and rule trees.

mod category;
mod chart;
mod grammar;
mod rule_tree;
mod rules;

pub use category::{parse_category, Atom, Atoms, Category, Comp, ShowCategory, Slash, BOTTOM, EPS};
pub use chart::{
    category_relabel, derive, enumerate_derivations, enumerate_relabeled, recognize, Chart,
};
pub use grammar::{parse_ccg, Audit, Ccg, Validation};
pub use rule_tree::{
    from_rule_tree, is_rule_tree, rule_tree_type, to_rule_tree, GroundRule, RuleNode, RuleTree,
};
pub use rules::{all_rules, parse_rule, AtomPat, CompPat, RuleSchema, ShowRule, SlashPat, Slot};
