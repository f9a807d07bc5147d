use std::collections::{BTreeMap, BTreeSet};

use super::SpineGrammar;
use crate::trees::{Symbol, Tree};

/// Least fixpoint of the productions, restricted to trees with at most
/// `max_leaves` leaves. Contexts are bounded by `max_leaves - 1` non-hole
/// leaves, since the hole is always filled by a tree with at least one leaf.
struct Evaluator<'g> {
    g: &'g SpineGrammar,
    expand_nullary: bool,
    max_leaves: usize,
    trees: BTreeMap<Symbol, BTreeSet<Tree>>,
    contexts: BTreeMap<Symbol, BTreeSet<Tree>>,
}

impl<'g> Evaluator<'g> {
    fn new(g: &'g SpineGrammar, expand_nullary: bool, max_leaves: usize) -> Self {
        Evaluator {
            g,
            expand_nullary,
            max_leaves,
            trees: BTreeMap::new(),
            contexts: BTreeMap::new(),
        }
    }

    fn limit(&self, has_hole: bool) -> usize {
        if has_hole {
            self.max_leaves.saturating_sub(1)
        } else {
            self.max_leaves
        }
    }

    fn eval(&self, t: &Tree, limit: usize) -> Vec<Tree> {
        let l = t.label();
        if t.is_leaf() {
            if self.expand_nullary && self.g.nt0.contains(l) {
                return self
                    .trees
                    .get(l)
                    .map_or_else(Vec::new, |s| s.iter().cloned().collect());
            }
            return if l.is_hole() || limit >= 1 {
                vec![t.clone()]
            } else {
                Vec::new()
            };
        }
        if self.g.nt1.contains(l) {
            let Some(ctxs) = self.contexts.get(l) else {
                return Vec::new();
            };
            let args = self.eval(&t.children()[0], limit);
            let mut out = Vec::new();
            for c in ctxs {
                let cw = c.weight();
                if cw > limit {
                    continue;
                }
                for a in &args {
                    if cw + a.weight() <= limit {
                        out.push(c.fill_hole(a));
                    }
                }
            }
            return out;
        }
        let kids: Vec<Vec<Tree>> = t.children().iter().map(|c| self.eval(c, limit)).collect();
        if t.arity() == 1 {
            return kids[0]
                .iter()
                .map(|c| Tree::unary(l.clone(), c.clone()))
                .collect();
        }
        let mut out = Vec::new();
        for a in &kids[0] {
            let aw = a.weight();
            for b in &kids[1] {
                if aw + b.weight() <= limit {
                    out.push(Tree::binary(l.clone(), a.clone(), b.clone()));
                }
            }
        }
        out
    }

    /// Iterate the productions whose left side satisfies `use_lhs` to a fixpoint.
    fn saturate(&mut self, use_lhs: impl Fn(&Symbol) -> bool) {
        loop {
            let mut changed = false;
            for p in &self.g.productions {
                if !use_lhs(&p.lhs) {
                    continue;
                }
                let unary = self.g.nt1.contains(&p.lhs);
                let found = self.eval(&p.rhs, self.limit(unary));
                let slot = if unary {
                    self.contexts.entry(p.lhs.clone()).or_default()
                } else {
                    self.trees.entry(p.lhs.clone()).or_default()
                };
                for t in found {
                    changed |= slot.insert(t);
                }
            }
            if !changed {
                break;
            }
        }
    }
}

/// All trees of T(G) with at most `max_leaves` leaves.
pub fn enumerate_trees(g: &SpineGrammar, max_leaves: usize) -> BTreeSet<Tree> {
    let mut ev = Evaluator::new(g, true, max_leaves);
    let known = |n: &Symbol| g.nt0.contains(n) || g.nt1.contains(n);
    ev.saturate(known);
    ev.trees.remove(&g.start).unwrap_or_default()
}

/// The spinal trees I(n): one step from `n`, then unary productions only.
/// Nullary nonterminals stay as leaves and count towards `max_leaves`.
pub fn spinal_trees(g: &SpineGrammar, n: &str, max_leaves: usize) -> BTreeSet<Tree> {
    let mut ev = Evaluator::new(g, false, max_leaves);
    ev.saturate(|lhs| g.nt1.contains(lhs));
    g.productions_of(n)
        .flat_map(|p| ev.eval(&p.rhs, ev.limit(false)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::trees::parse_term;

    #[test]
    fn gmin_has_single_tree() {
        let g = fixtures::gmin();
        let ts = enumerate_trees(&g, 2);
        assert_eq!(ts.len(), 1);
        assert_eq!(ts.iter().next().unwrap().to_string(), "(sigma beta alpha)");
        assert!(enumerate_trees(&g, 1).is_empty());
    }

    #[test]
    fn gmin_spinal_tree() {
        let g = fixtures::gmin();
        let ts: Vec<String> = spinal_trees(&g, "s", 5)
            .iter()
            .map(|t| t.to_string())
            .collect();
        assert_eq!(ts, ["(sigma u alpha)"]);
        assert!(spinal_trees(&g, "nothing", 5).is_empty());
    }

    #[test]
    fn running_example_contains_generated_tree() {
        let g = fixtures::ex41();
        let ts = enumerate_trees(&g, 7);
        assert!(ts.contains(&fixtures::generated_tree()));
        let spinal = spinal_trees(&g, "s", 7);
        assert!(spinal.contains(&fixtures::spinal_tree()));
    }

    #[test]
    fn leaf_bound_is_respected() {
        let g = fixtures::ex41();
        for k in 1..=7 {
            for t in enumerate_trees(&g, k) {
                assert!(t.leaf_count() <= k);
            }
        }
        let smallest = parse_term("alpha2(alpha,beta2(gamma2(delta,gamma),beta))").unwrap();
        assert!(enumerate_trees(&g, 4).contains(&smallest));
        assert!(enumerate_trees(&g, 3).is_empty());
    }
}
