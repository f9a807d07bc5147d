//! Reassembling trees from annotated spines.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::spine::Direction;
use crate::strings::{Lookahead, SpineSym};
use crate::trees::{Symbol, Tree};

pub type SpineTree = Tree<SpineSym>;

/// The nonterminal annotated in spine direction.
pub fn gen_of<'a>(s: &'a SpineSym, d: &Direction) -> &'a Symbol {
    s.gen(d)
}

fn spine_child(s: &Symbol, d: &Direction) -> usize {
    usize::from(d.get(s).copied().unwrap_or(1))
}

fn check_shape(w: &[SpineSym]) -> Result<()> {
    match w.split_first() {
        Some((first, rest)) if first.is_leaf() && rest.iter().all(|s| !s.is_leaf()) => Ok(()),
        _ => Err(Error::Precondition(format!(
            "malformed spine string `{}`",
            w.iter()
                .map(|s| s.to_string())
                .collect::<Vec<_>>()
                .join(" ")
        ))),
    }
}

/// Trees of `t` indexed by root generator and leaf count.
struct Index<'a> {
    by_gen: BTreeMap<&'a Symbol, BTreeMap<usize, Vec<&'a SpineTree>>>,
}

impl<'a> Index<'a> {
    fn new(t: &'a BTreeSet<SpineTree>, d: &Direction) -> Self {
        let mut by_gen: BTreeMap<&Symbol, BTreeMap<usize, Vec<&SpineTree>>> = BTreeMap::new();
        for x in t {
            by_gen
                .entry(x.label().gen(d))
                .or_default()
                .entry(x.leaf_count())
                .or_default()
                .push(x);
        }
        Index { by_gen }
    }

    fn with_gen(&self, n: &Symbol, max_leaves: usize) -> impl Iterator<Item = &'a SpineTree> + '_ {
        self.by_gen
            .get(n)
            .into_iter()
            .flat_map(move |m| m.range(..=max_leaves).flat_map(|(_, v)| v.iter().copied()))
    }
}

fn attach_bounded(
    idx: &Index<'_>,
    w: &[SpineSym],
    d: &Direction,
    max_leaves: usize,
) -> BTreeSet<SpineTree> {
    let mut cur: BTreeSet<SpineTree> = BTreeSet::from([Tree::leaf(w[0].clone())]);
    for s in &w[1..] {
        let SpineSym::Binary(sigma, n1, n2) = s else {
            unreachable!("shape checked")
        };
        let dir = spine_child(sigma, d);
        let side = if dir == 1 { n2 } else { n1 };
        let mut next = BTreeSet::new();
        for t in &cur {
            let room = max_leaves.saturating_sub(t.leaf_count());
            for u in idx.with_gen(side, room) {
                let (l, r) = if dir == 1 {
                    (t.clone(), u.clone())
                } else {
                    (u.clone(), t.clone())
                };
                next.insert(Tree::binary(s.clone(), l, r));
            }
        }
        cur = next;
        if cur.is_empty() {
            break;
        }
    }
    cur
}

/// `attach_T(w)`: the spine of `w` from the bottom up, with trees of `t`
/// whose generator matches hung off the non-spinal side.
pub fn attach(
    t: &BTreeSet<SpineTree>,
    w: &[SpineSym],
    d: &Direction,
) -> Result<BTreeSet<SpineTree>> {
    check_shape(w)?;
    Ok(attach_bounded(&Index::new(t, d), w, d, usize::MAX))
}

/// The least tree language closed under `attach` for every string of `l`,
/// restricted to trees with at most `max_leaves` leaves.
pub fn assemble_f(
    l: &BTreeSet<Vec<SpineSym>>,
    d: &Direction,
    max_leaves: usize,
) -> Result<BTreeSet<SpineTree>> {
    for w in l {
        check_shape(w)?;
    }
    // A spine of length m contributes m-1 attached trees of at least one leaf each.
    let useful: Vec<&Vec<SpineSym>> = l.iter().filter(|w| w.len() <= max_leaves).collect();
    let mut t: BTreeSet<SpineTree> = BTreeSet::new();
    loop {
        let idx = Index::new(&t, d);
        let mut found = BTreeSet::new();
        for w in &useful {
            found.extend(attach_bounded(&idx, w, d, max_leaves));
        }
        let before = t.len();
        drop(idx);
        t.extend(found);
        if t.len() == before {
            return Ok(t);
        }
    }
}

/// `T_n`: the trees whose root has `n` annotated in spine direction.
pub fn slice_by_generator(
    t: &BTreeSet<SpineTree>,
    n: &Symbol,
    d: &Direction,
) -> BTreeSet<SpineTree> {
    t.iter()
        .filter(|x| x.label().gen(d) == n)
        .cloned()
        .collect()
}

/// π: drop the annotations.
pub fn project(t: &SpineTree) -> Tree {
    t.map(&mut |s: &SpineSym| s.base().clone())
}

/// The second components of a lookahead-decorated spine string.
pub fn strip_lookahead(w: &[Lookahead<SpineSym>]) -> Vec<SpineSym> {
    w.iter().map(|x| x.cur.clone()).collect()
}
