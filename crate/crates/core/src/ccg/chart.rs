//! Bounded enumeration of derivation trees and CYK recognition.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::rc::Rc;

use super::category::{Atom, Category, Slash, EPS};
use super::grammar::Ccg;
use crate::error::{Error, Result};
use crate::trees::Tree;

#[derive(Clone, Copy, Debug)]
enum Back {
    Leaf,
    /// Left child in the cell `split` (or span) and its index, right child index.
    Pair {
        split: usize,
        l: usize,
        r: usize,
    },
}

#[derive(Default)]
struct Cell {
    cats: Vec<Category>,
    ids: HashMap<Category, usize>,
    by_target: HashMap<Atom, Vec<usize>>,
    back: Vec<Vec<Back>>,
}

impl Cell {
    fn add(&mut self, c: Category, b: Back) {
        let i = match self.ids.get(&c) {
            Some(&i) => i,
            None => {
                let i = self.cats.len();
                self.by_target.entry(c.target).or_default().push(i);
                self.ids.insert(c.clone(), i);
                self.cats.push(c);
                self.back.push(Vec::new());
                i
            }
        };
        self.back[i].push(b);
    }

    fn with_target(&self, a: Atom) -> &[usize] {
        self.by_target.get(&a).map_or(&[], Vec::as_slice)
    }
}

/// All combinations of a category in `left` with one in `right`, keeping
/// outputs of arity at most `cap`.
fn join(
    g: &Ccg,
    left: &Cell,
    right: &Cell,
    cap: usize,
    mut emit: impl FnMut(Category, usize, usize),
) {
    let mut out = Vec::new();
    for (i, p) in left.cats.iter().enumerate() {
        if let Some((Slash::Fwd, c)) = p.last() {
            for &j in right.with_target(c.target) {
                out.clear();
                g.combine_dir(Slash::Fwd, p, &right.cats[j], &mut out);
                for (o, _) in out.drain(..) {
                    if o.arity() <= cap {
                        emit(o, i, j);
                    }
                }
            }
        }
    }
    for (j, p) in right.cats.iter().enumerate() {
        if let Some((Slash::Bwd, c)) = p.last() {
            for &i in left.with_target(c.target) {
                out.clear();
                g.combine_dir(Slash::Bwd, p, &left.cats[i], &mut out);
                for (o, _) in out.drain(..) {
                    if o.arity() <= cap {
                        emit(o, i, j);
                    }
                }
            }
        }
    }
}

fn lexical(g: &Ccg) -> impl Iterator<Item = (&str, &Category)> {
    g.lexicon
        .iter()
        .filter(|(a, _)| a.as_str() != EPS)
        .flat_map(|(a, cs)| cs.iter().map(move |c| (a.as_str(), c)))
}

/// The largest arity worth keeping for a category that covers `used` of
/// `total` leaves. In a first-order grammar every argument is removed by
/// its own combination, each of which adds at least one leaf.
fn arity_cap(first_order: bool, used: usize, total: usize, cap: usize) -> usize {
    if first_order {
        cap.min(total - used)
    } else {
        cap
    }
}

/// Derivation charts by leaf count: `cells[n]` holds every category with a
/// derivation of `n` leaves.
pub struct Chart<'g> {
    g: &'g Ccg,
    cells: Vec<Cell>,
}

impl<'g> Chart<'g> {
    pub fn build(g: &'g Ccg, max_leaves: usize) -> Self {
        let cap = g.max_lexicon_arity() + max_leaves;
        let fo = g.is_first_order();
        let mut cells: Vec<Cell> = Vec::with_capacity(max_leaves + 1);
        cells.push(Cell::default());
        if max_leaves >= 1 {
            let mut leaf = Cell::default();
            for (_, c) in lexical(g) {
                if c.arity() <= arity_cap(fo, 1, max_leaves, cap) {
                    leaf.add(c.clone(), Back::Leaf);
                }
            }
            cells.push(leaf);
        }
        for n in 2..=max_leaves {
            let mut cell = Cell::default();
            let cap_n = arity_cap(fo, n, max_leaves, cap);
            for n1 in 1..n {
                join(g, &cells[n1], &cells[n - n1], cap_n, |o, l, r| {
                    cell.add(o, Back::Pair { split: n1, l, r })
                });
            }
            cells.push(cell);
        }
        Chart { g, cells }
    }

    /// Number of (category, leaf count) items.
    pub fn len(&self) -> usize {
        self.cells.iter().map(|c| c.cats.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn roots(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.cells.iter().enumerate().flat_map(move |(n, cell)| {
            cell.cats
                .iter()
                .enumerate()
                .filter(|(_, c)| c.is_atomic() && self.g.initial.contains(&c.target))
                .map(move |(i, _)| (n, i))
        })
    }

    /// The trees of every root-accepted derivation, relabeled node-wise by
    /// `f`. Duplicates are merged bottom-up.
    pub fn relabeled<L: Ord + Clone>(
        &self,
        f: &dyn Fn(&Category) -> Option<L>,
    ) -> Result<BTreeSet<Tree<L>>> {
        let mut memo: HashMap<(usize, usize), Rc<BTreeSet<Tree<L>>>> = HashMap::new();
        let mut out = BTreeSet::new();
        for (n, i) in self.roots() {
            out.extend(self.unpack(n, i, f, &mut memo)?.iter().cloned());
        }
        Ok(out)
    }

    fn unpack<L: Ord + Clone>(
        &self,
        n: usize,
        i: usize,
        f: &dyn Fn(&Category) -> Option<L>,
        memo: &mut HashMap<(usize, usize), Rc<BTreeSet<Tree<L>>>>,
    ) -> Result<Rc<BTreeSet<Tree<L>>>> {
        if let Some(s) = memo.get(&(n, i)) {
            return Ok(Rc::clone(s));
        }
        let c = &self.cells[n].cats[i];
        let label = f(c).ok_or_else(|| Error::Unmapped(c.show(&self.g.atoms).to_string()))?;
        let mut set = BTreeSet::new();
        for b in &self.cells[n].back[i] {
            match *b {
                Back::Leaf => {
                    set.insert(Tree::leaf(label.clone()));
                }
                Back::Pair { split, l, r } => {
                    let ls = self.unpack(split, l, f, memo)?;
                    let rs = self.unpack(n - split, r, f, memo)?;
                    for x in ls.iter() {
                        for y in rs.iter() {
                            set.insert(Tree::binary(label.clone(), x.clone(), y.clone()));
                        }
                    }
                }
            }
        }
        let set = Rc::new(set);
        memo.insert((n, i), Rc::clone(&set));
        Ok(set)
    }
}

/// All derivation trees with at most `max_leaves` leaves whose root is an
/// initial atom.
pub fn enumerate_derivations(g: &Ccg, max_leaves: usize) -> BTreeSet<Tree<Category>> {
    Chart::build(g, max_leaves)
        .relabeled(&|c: &Category| Some(c.clone()))
        .expect("identity labels are total")
}

/// [`enumerate_derivations`] followed by a node-wise relabeling.
pub fn enumerate_relabeled<L: Ord + Clone>(
    g: &Ccg,
    max_leaves: usize,
    f: &dyn Fn(&Category) -> Option<L>,
) -> Result<BTreeSet<Tree<L>>> {
    Chart::build(g, max_leaves).relabeled(f)
}

/// CYK over spans: `spans[(i, len)]` holds the categories deriving `w[i..i+len]`.
struct Cyk<'g> {
    spans: BTreeMap<(usize, usize), Cell>,
    g: &'g Ccg,
}

impl<'g> Cyk<'g> {
    fn run(g: &'g Ccg, w: &[&str], cap: usize) -> Self {
        let fo = g.is_first_order();
        let n = w.len();
        let mut spans = BTreeMap::new();
        for (i, a) in w.iter().enumerate() {
            let mut cell = Cell::default();
            for c in g.lexicon.get(*a).into_iter().flatten() {
                if *a != EPS && c.arity() <= arity_cap(fo, 1, n, cap) {
                    cell.add(c.clone(), Back::Leaf);
                }
            }
            spans.insert((i, 1), cell);
        }
        for len in 2..=n {
            let cap_len = arity_cap(fo, len, n, cap);
            for i in 0..=n - len {
                let mut cell = Cell::default();
                for k in 1..len {
                    join(
                        g,
                        &spans[&(i, k)],
                        &spans[&(i + k, len - k)],
                        cap_len,
                        |o, l, r| cell.add(o, Back::Pair { split: k, l, r }),
                    );
                }
                spans.insert((i, len), cell);
            }
        }
        Cyk { spans, g }
    }

    fn root(&self, n: usize) -> Option<usize> {
        let cell = self.spans.get(&(0, n))?;
        cell.cats
            .iter()
            .position(|c| c.is_atomic() && self.g.initial.contains(&c.target))
    }

    fn tree(&self, i: usize, len: usize, idx: usize) -> Tree<Category> {
        let cell = &self.spans[&(i, len)];
        let c = cell.cats[idx].clone();
        match cell.back[idx][0] {
            Back::Leaf => Tree::leaf(c),
            Back::Pair { split, l, r } => Tree::binary(
                c,
                self.tree(i, split, l),
                self.tree(i + split, len - split, r),
            ),
        }
    }
}

/// Whether some initial atom derives `w`, with category arities capped.
pub fn recognize(g: &Ccg, w: &[&str], arity_cap: usize) -> bool {
    !w.is_empty() && Cyk::run(g, w, arity_cap).root(w.len()).is_some()
}

/// One derivation of `w` rooted in an initial atom, if any.
pub fn derive(g: &Ccg, w: &[&str], arity_cap: usize) -> Option<Tree<Category>> {
    if w.is_empty() {
        return None;
    }
    let cyk = Cyk::run(g, w, arity_cap);
    cyk.root(w.len()).map(|r| cyk.tree(0, w.len(), r))
}

/// Apply an explicit category relabeling after checking that it is
/// constant on categories sharing target and last argument.
pub fn category_relabel<L: Clone + PartialEq>(
    g: &Ccg,
    spec: &BTreeMap<Category, L>,
    t: &Tree<Category>,
) -> Result<Tree<L>> {
    type Key<'a> = (Atom, Option<&'a (Slash, Category)>);
    let mut seen: BTreeMap<Key, (&Category, &L)> = BTreeMap::new();
    for (c, l) in spec {
        match seen.get(&(c.target, c.last())) {
            Some((d, m)) if *m != l => {
                return Err(Error::Relabeling(format!(
                    "{} and {} share target and last argument but are mapped differently",
                    d.show(&g.atoms),
                    c.show(&g.atoms)
                )))
            }
            _ => {
                seen.insert((c.target, c.last()), (c, l));
            }
        }
    }
    t.try_map(&mut |c: &Category| {
        spec.get(c)
            .cloned()
            .ok_or_else(|| Error::Unmapped(c.show(&g.atoms).to_string()))
    })
}
