//! Ranked binary trees, Gorn positions, contexts and relabelings.
//!
//! Trees are immutable and cheap to clone; subtrees are shared behind an
//! `Arc`, so enumeration code can keep large sets of overlapping trees.

use std::borrow::Borrow;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Reserved label of the hole in a context.
pub const HOLE: &str = "_";

/// An interned-by-refcount symbol name.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Symbol(Arc<str>);

impl Symbol {
    pub fn new(s: &str) -> Self {
        Symbol(Arc::from(s))
    }

    pub fn hole() -> Self {
        Symbol::new(HOLE)
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn is_hole(&self) -> bool {
        &*self.0 == HOLE
    }
}

impl From<&str> for Symbol {
    fn from(s: &str) -> Self {
        Symbol::new(s)
    }
}

impl From<String> for Symbol {
    fn from(s: String) -> Self {
        Symbol(Arc::from(s))
    }
}

impl Borrow<str> for Symbol {
    fn borrow(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", &*self.0)
    }
}

/// A ranked alphabet Σ = Σ0 ∪ Σ1 ∪ Σ2.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RankedAlphabet {
    pub symbols0: BTreeSet<Symbol>,
    pub symbols1: BTreeSet<Symbol>,
    pub symbols2: BTreeSet<Symbol>,
}

impl RankedAlphabet {
    pub fn rank_of(&self, s: &str) -> Option<usize> {
        if self.symbols0.contains(s) {
            Some(0)
        } else if self.symbols1.contains(s) {
            Some(1)
        } else if self.symbols2.contains(s) {
            Some(2)
        } else {
            None
        }
    }

    /// Violated invariants, empty when the alphabet is well-formed.
    pub fn problems(&self) -> Vec<String> {
        let mut out = Vec::new();
        let sets = [&self.symbols0, &self.symbols1, &self.symbols2];
        for (i, a) in sets.iter().enumerate() {
            for b in sets.iter().skip(i + 1) {
                for s in a.intersection(b) {
                    out.push(format!("symbol `{s}` has two ranks"));
                }
            }
            for s in a.iter() {
                if s.as_str().is_empty() || s.as_str().chars().any(char::is_whitespace) {
                    out.push(format!("bad symbol name {s:?}"));
                }
            }
        }
        out
    }

    /// True iff every node label is declared with a rank equal to its arity.
    pub fn admits(&self, t: &Tree) -> bool {
        self.rank_of(t.label().as_str()) == Some(t.arity())
            && t.children().iter().all(|c| self.admits(c))
    }
}

/// A Gorn address: a string over {1,2}.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Position(pub Vec<u8>);

impl Position {
    pub fn root() -> Self {
        Position(Vec::new())
    }

    pub fn child(&self, i: u8) -> Self {
        let mut v = self.0.clone();
        v.push(i);
        Position(v)
    }

    pub fn is_prefix_of(&self, other: &Position) -> bool {
        other.0.starts_with(&self.0)
    }

    pub fn parse(s: &str) -> Result<Self> {
        if s == "e" || s.is_empty() {
            return Ok(Position::root());
        }
        s.chars()
            .map(|c| match c {
                '1' => Ok(1),
                '2' => Ok(2),
                _ => Err(Error::PositionOutOfRange(s.to_string())),
            })
            .collect::<Result<Vec<u8>>>()
            .map(Position)
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("e");
        }
        for d in &self.0 {
            write!(f, "{d}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(PartialEq, Eq, PartialOrd, Ord, Hash)]
struct Node<L> {
    label: L,
    children: Vec<Tree<L>>,
}

/// An immutable ranked tree; the derived order is label first, then children.
#[derive(PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Tree<L = Symbol>(Arc<Node<L>>);

impl<L> Clone for Tree<L> {
    fn clone(&self) -> Self {
        Tree(Arc::clone(&self.0))
    }
}

impl<L> Tree<L> {
    pub fn new(label: L, children: Vec<Tree<L>>) -> Self {
        debug_assert!(children.len() <= 2);
        Tree(Arc::new(Node { label, children }))
    }

    pub fn leaf(label: L) -> Self {
        Tree::new(label, Vec::new())
    }

    pub fn unary(label: L, child: Tree<L>) -> Self {
        Tree::new(label, vec![child])
    }

    pub fn binary(label: L, left: Tree<L>, right: Tree<L>) -> Self {
        Tree::new(label, vec![left, right])
    }

    pub fn label(&self) -> &L {
        &self.0.label
    }

    pub fn children(&self) -> &[Tree<L>] {
        &self.0.children
    }

    pub fn arity(&self) -> usize {
        self.0.children.len()
    }

    pub fn is_leaf(&self) -> bool {
        self.0.children.is_empty()
    }

    /// All positions in preorder.
    pub fn positions(&self) -> Vec<Position> {
        let mut out = Vec::new();
        self.collect_positions(&mut Vec::new(), &mut out);
        out
    }

    fn collect_positions(&self, prefix: &mut Vec<u8>, out: &mut Vec<Position>) {
        out.push(Position(prefix.clone()));
        for (i, c) in self.children().iter().enumerate() {
            prefix.push(i as u8 + 1);
            c.collect_positions(prefix, out);
            prefix.pop();
        }
    }

    /// Leaf positions: those w with w1 absent.
    pub fn leaf_positions(&self) -> Vec<Position> {
        self.positions()
            .into_iter()
            .filter(|w| self.subtree(w).is_some_and(Tree::is_leaf))
            .collect()
    }

    pub fn subtree(&self, w: &Position) -> Option<&Tree<L>> {
        let mut t = self;
        for &d in &w.0 {
            t = t.children().get(usize::from(d).checked_sub(1)?)?;
        }
        Some(t)
    }

    pub fn label_at(&self, w: &Position) -> Option<&L> {
        self.subtree(w).map(Tree::label)
    }

    pub fn size(&self) -> usize {
        1 + self.children().iter().map(Tree::size).sum::<usize>()
    }

    pub fn leaf_count(&self) -> usize {
        if self.is_leaf() {
            1
        } else {
            self.children().iter().map(Tree::leaf_count).sum()
        }
    }

    pub fn depth(&self) -> usize {
        1 + self.children().iter().map(Tree::depth).max().unwrap_or(0)
    }
}

impl<L: Clone> Tree<L> {
    /// t[s]_w
    pub fn substitute(&self, w: &Position, s: Tree<L>) -> Result<Tree<L>> {
        self.replace_at(&w.0, s)
            .ok_or_else(|| Error::PositionOutOfRange(w.to_string()))
    }

    fn replace_at(&self, w: &[u8], s: Tree<L>) -> Option<Tree<L>> {
        let Some((&d, rest)) = w.split_first() else {
            return Some(s);
        };
        let i = usize::from(d).checked_sub(1)?;
        let child = self.children().get(i)?.replace_at(rest, s)?;
        let mut children = self.children().to_vec();
        children[i] = child;
        Some(Tree::new(self.label().clone(), children))
    }

    /// Left-to-right leaf labels.
    pub fn yield_of(&self) -> Vec<L> {
        let mut out = Vec::new();
        self.collect_yield(&mut out);
        out
    }

    fn collect_yield(&self, out: &mut Vec<L>) {
        if self.is_leaf() {
            out.push(self.label().clone());
        }
        for c in self.children() {
            c.collect_yield(out);
        }
    }

    pub fn labels(&self) -> Vec<L> {
        let mut out = vec![self.label().clone()];
        for c in self.children() {
            out.extend(c.labels());
        }
        out
    }

    pub fn map<M>(&self, f: &mut impl FnMut(&L) -> M) -> Tree<M> {
        let label = f(self.label());
        Tree::new(label, self.children().iter().map(|c| c.map(f)).collect())
    }

    pub fn try_map<M, E>(
        &self,
        f: &mut impl FnMut(&L) -> std::result::Result<M, E>,
    ) -> std::result::Result<Tree<M>, E> {
        let label = f(self.label())?;
        let children = self
            .children()
            .iter()
            .map(|c| c.try_map(f))
            .collect::<std::result::Result<Vec<_>, E>>()?;
        Ok(Tree::new(label, children))
    }
}

impl<L: PartialEq> Tree<L> {
    pub fn count_label(&self, l: &L) -> usize {
        usize::from(self.label() == l)
            + self
                .children()
                .iter()
                .map(|c| c.count_label(l))
                .sum::<usize>()
    }

    pub fn contains_label(&self, l: &L) -> bool {
        self.label() == l || self.children().iter().any(|c| c.contains_label(l))
    }
}

impl Tree<Symbol> {
    pub fn sym(s: &str) -> Self {
        Tree::leaf(Symbol::new(s))
    }

    pub fn hole() -> Self {
        Tree::leaf(Symbol::hole())
    }

    pub fn hole_count(&self) -> usize {
        if self.is_leaf() {
            usize::from(self.label().is_hole())
        } else {
            self.children().iter().map(Tree::hole_count).sum()
        }
    }

    pub fn hole_position(&self) -> Option<Position> {
        self.leaf_positions()
            .into_iter()
            .find(|w| self.label_at(w).is_some_and(Symbol::is_hole))
    }

    /// Replace the (first) hole by `t`; returns `self` unchanged without a hole.
    pub fn fill_hole(&self, t: &Tree) -> Tree {
        if self.is_leaf() {
            return if self.label().is_hole() {
                t.clone()
            } else {
                self.clone()
            };
        }
        match self.children().iter().position(|c| c.hole_count() > 0) {
            None => self.clone(),
            Some(i) => {
                let mut children = self.children().to_vec();
                children[i] = children[i].fill_hole(t);
                Tree::new(self.label().clone(), children)
            }
        }
    }

    /// Number of leaves that are not the hole.
    pub fn weight(&self) -> usize {
        self.leaf_count() - self.hole_count()
    }
}

impl<L: fmt::Display> fmt::Display for Tree<L> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_leaf() {
            return write!(f, "{}", self.label());
        }
        write!(f, "({}", self.label())?;
        for c in self.children() {
            write!(f, " {c}")?;
        }
        f.write_str(")")
    }
}

impl<L: fmt::Display> fmt::Debug for Tree<L> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A tree in which the hole occurs exactly once.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Context(Tree);

impl Context {
    pub fn new(t: Tree) -> Result<Self> {
        match t.hole_count() {
            1 => Ok(Context(t)),
            n => Err(Error::Grammar(format!(
                "context `{t}` has {n} holes, expected exactly one"
            ))),
        }
    }

    pub fn hole_position(&self) -> Position {
        self.0.hole_position().expect("context has a hole")
    }

    /// C[t]
    pub fn fill(&self, t: &Tree) -> Tree {
        self.0.fill_hole(t)
    }

    pub fn as_tree(&self) -> &Tree {
        &self.0
    }

    pub fn into_tree(self) -> Tree {
        self.0
    }
}

impl fmt::Display for Context {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

/// A rank-preserving symbol map (ρ0, ρ1, ρ2).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Relabeling<A: Ord, B> {
    pub map0: BTreeMap<A, B>,
    pub map1: BTreeMap<A, B>,
    pub map2: BTreeMap<A, B>,
}

impl<A: Ord, B> Default for Relabeling<A, B> {
    fn default() -> Self {
        Relabeling {
            map0: BTreeMap::new(),
            map1: BTreeMap::new(),
            map2: BTreeMap::new(),
        }
    }
}

impl<A: Ord + Clone + fmt::Display, B: Clone> Relabeling<A, B> {
    pub fn insert(&mut self, rank: usize, from: A, to: B) {
        match rank {
            0 => self.map0.insert(from, to),
            1 => self.map1.insert(from, to),
            _ => self.map2.insert(from, to),
        };
    }

    fn rank_map(&self, rank: usize) -> &BTreeMap<A, B> {
        match rank {
            0 => &self.map0,
            1 => &self.map1,
            _ => &self.map2,
        }
    }

    pub fn apply(&self, t: &Tree<A>) -> Result<Tree<B>> {
        let label = self
            .rank_map(t.arity())
            .get(t.label())
            .cloned()
            .ok_or_else(|| Error::Unmapped(t.label().to_string()))?;
        let children = t
            .children()
            .iter()
            .map(|c| self.apply(c))
            .collect::<Result<Vec<_>>>()?;
        Ok(Tree::new(label, children))
    }
}

impl Relabeling<Symbol, Symbol> {
    pub fn identity(alphabet: &RankedAlphabet) -> Self {
        let id = |s: &BTreeSet<Symbol>| s.iter().map(|x| (x.clone(), x.clone())).collect();
        Relabeling {
            map0: id(&alphabet.symbols0),
            map1: id(&alphabet.symbols1),
            map2: id(&alphabet.symbols2),
        }
    }
}

fn is_sexpr_delim(c: char) -> bool {
    c.is_whitespace() || c == '(' || c == ')'
}

/// Parse `(label child1 child2)`, with bare `label` for leaves.
pub fn parse_sexpr(input: &str) -> Result<Tree> {
    let mut p = SexprParser { s: input, pos: 0 };
    let t = p.tree()?;
    p.skip_ws();
    if p.pos < p.s.len() {
        return Err(Error::parse(
            1,
            format!("trailing input `{}`", &p.s[p.pos..]),
        ));
    }
    Ok(t)
}

struct SexprParser<'a> {
    s: &'a str,
    pos: usize,
}

impl SexprParser<'_> {
    fn skip_ws(&mut self) {
        while let Some(c) = self.s[self.pos..].chars().next() {
            if !c.is_whitespace() {
                break;
            }
            self.pos += c.len_utf8();
        }
    }

    fn atom(&mut self) -> Result<Symbol> {
        let start = self.pos;
        while let Some(c) = self.s[self.pos..].chars().next() {
            if is_sexpr_delim(c) {
                break;
            }
            self.pos += c.len_utf8();
        }
        if start == self.pos {
            return Err(Error::parse(1, format!("expected a label at byte {start}")));
        }
        Ok(Symbol::new(&self.s[start..self.pos]))
    }

    fn tree(&mut self) -> Result<Tree> {
        self.skip_ws();
        if self.s[self.pos..].starts_with('(') {
            self.pos += 1;
            self.skip_ws();
            let label = self.atom()?;
            let mut children = Vec::new();
            loop {
                self.skip_ws();
                if self.s[self.pos..].starts_with(')') {
                    self.pos += 1;
                    break;
                }
                if self.pos >= self.s.len() {
                    return Err(Error::parse(1, "unbalanced parenthesis"));
                }
                children.push(self.tree()?);
            }
            if children.len() > 2 {
                return Err(Error::parse(
                    1,
                    format!("`{label}` has more than two children"),
                ));
            }
            Ok(Tree::new(label, children))
        } else {
            Ok(Tree::leaf(self.atom()?))
        }
    }
}

/// Parse the functional syntax `sym(child,child)` used in grammar files.
pub fn parse_term(input: &str) -> Result<Tree> {
    let s: Vec<char> = input.chars().filter(|c| !c.is_whitespace()).collect();
    let mut pos = 0;
    let t = term(&s, &mut pos)?;
    if pos != s.len() {
        let rest: String = s[pos..].iter().collect();
        return Err(Error::parse(1, format!("trailing input `{rest}`")));
    }
    Ok(t)
}

fn term(s: &[char], pos: &mut usize) -> Result<Tree> {
    let start = *pos;
    while *pos < s.len() && !matches!(s[*pos], '(' | ')' | ',') {
        *pos += 1;
    }
    if start == *pos {
        return Err(Error::parse(1, "expected a symbol"));
    }
    let label: String = s[start..*pos].iter().collect();
    let mut children = Vec::new();
    if *pos < s.len() && s[*pos] == '(' {
        *pos += 1;
        loop {
            children.push(term(s, pos)?);
            match s.get(*pos) {
                Some(',') => *pos += 1,
                Some(')') => {
                    *pos += 1;
                    break;
                }
                _ => return Err(Error::parse(1, "expected `,` or `)`")),
            }
        }
    }
    if children.len() > 2 {
        return Err(Error::parse(
            1,
            format!("`{label}` has more than two children"),
        ));
    }
    Ok(Tree::new(Symbol::from(label), children))
}

/// Print a tree in the functional syntax accepted by [`parse_term`].
pub fn format_term<L: fmt::Display>(t: &Tree<L>) -> String {
    if t.is_leaf() {
        return t.label().to_string();
    }
    let kids: Vec<String> = t.children().iter().map(format_term).collect();
    format!("{}({})", t.label(), kids.join(","))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sb() -> Tree {
        parse_sexpr("(sigma beta alpha)").unwrap()
    }

    #[test]
    fn positions_of_leaf_and_binary() {
        assert_eq!(Tree::sym("a").positions(), vec![Position::root()]);
        let ps: Vec<String> = sb().positions().iter().map(|p| p.to_string()).collect();
        assert_eq!(ps, ["e", "1", "2"]);
        assert_eq!(sb().leaf_positions().len(), 2);
    }

    #[test]
    fn substitute_examples() {
        let t = sb();
        let one = Position::parse("1").unwrap();
        let two = Position::parse("2").unwrap();
        assert_eq!(t.substitute(&one, Tree::sym("beta")).unwrap(), t);
        assert_eq!(
            t.substitute(&two, sb()).unwrap().to_string(),
            "(sigma beta (sigma beta alpha))"
        );
        let bad = Position::parse("21").unwrap();
        assert!(matches!(
            t.substitute(&bad, sb()),
            Err(Error::PositionOutOfRange(_))
        ));
    }

    #[test]
    fn context_fill_removes_hole() {
        let c = Context::new(parse_term("sigma(u,_)").unwrap()).unwrap();
        assert_eq!(c.as_tree().hole_count(), 1);
        assert_eq!(c.hole_position().to_string(), "2");
        let filled = c.fill(&Tree::sym("alpha"));
        assert_eq!(filled.hole_count(), 0);
        assert!(Context::new(Tree::sym("a")).is_err());
    }

    #[test]
    fn yield_left_to_right() {
        let y: Vec<String> = sb().yield_of().iter().map(|s| s.to_string()).collect();
        assert_eq!(y, ["beta", "alpha"]);
    }

    #[test]
    fn relabel_identity_and_missing() {
        let mut a = RankedAlphabet::default();
        a.symbols0.insert("alpha".into());
        a.symbols0.insert("beta".into());
        a.symbols2.insert("sigma".into());
        assert!(a.admits(&sb()));
        let id = Relabeling::identity(&a);
        assert_eq!(id.apply(&sb()).unwrap(), sb());
        let mut partial = Relabeling::<Symbol, Symbol>::default();
        partial.insert(0, "beta".into(), "b".into());
        assert!(matches!(partial.apply(&sb()), Err(Error::Unmapped(_))));
    }

    #[test]
    fn parsers_round_trip() {
        let t = parse_term("alpha2(alpha, beta2(_, bbar))").unwrap();
        assert_eq!(t.to_string(), "(alpha2 alpha (beta2 _ bbar))");
        assert_eq!(parse_sexpr(&t.to_string()).unwrap(), t);
        assert_eq!(parse_term(&format_term(&t)).unwrap(), t);
        assert!(parse_sexpr("(a b c d)").is_err());
        assert!(parse_term("a(b").is_err());
    }

    fn arb_tree() -> impl Strategy<Value = Tree> {
        let leaf = prop_oneof![Just("a"), Just("b"), Just("c")].prop_map(Tree::sym);
        leaf.prop_recursive(5, 32, 2, |inner| {
            prop_oneof![
                (inner.clone(), inner.clone()).prop_map(|(l, r)| Tree::binary(
                    Symbol::new("s"),
                    l,
                    r
                )),
                inner.prop_map(|c| Tree::unary(Symbol::new("u"), c)),
            ]
        })
    }

    proptest! {
        #[test]
        fn substitute_own_subtree_is_identity(t in arb_tree()) {
            for w in t.positions() {
                let sub = t.subtree(&w).unwrap().clone();
                prop_assert_eq!(t.substitute(&w, sub).unwrap(), t.clone());
            }
        }

        #[test]
        fn relabeling_preserves_positions(t in arb_tree()) {
            let mut r = Relabeling::<Symbol, Symbol>::default();
            for s in ["a", "b", "c"] { r.insert(0, s.into(), "x".into()); }
            r.insert(1, "u".into(), "v".into());
            r.insert(2, "s".into(), "t".into());
            let image = r.apply(&t).unwrap();
            prop_assert_eq!(image.positions(), t.positions());
            prop_assert_eq!(image.yield_of().len(), t.yield_of().len());
        }

        #[test]
        fn sexpr_round_trip(t in arb_tree()) {
            prop_assert_eq!(parse_sexpr(&t.to_string()).unwrap(), t);
        }
    }
}
