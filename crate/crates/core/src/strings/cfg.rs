use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::trees::Symbol;

/// Bounds shared by every terminal type used in the string models.
pub trait Terminal: Clone + Ord + std::hash::Hash + fmt::Debug + fmt::Display {}
impl<T: Clone + Ord + std::hash::Hash + fmt::Debug + fmt::Display> Terminal for T {}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GSym<T> {
    T(T),
    N(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rule<T> {
    pub lhs: usize,
    pub body: Vec<GSym<T>>,
}

/// A context-free grammar with nonterminals numbered densely from 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cfg<T> {
    names: Vec<String>,
    index: BTreeMap<String, usize>,
    pub start: usize,
    pub rules: Vec<Rule<T>>,
}

impl<T: Terminal> Cfg<T> {
    pub fn new(start: &str) -> Self {
        let mut g = Cfg {
            names: Vec::new(),
            index: BTreeMap::new(),
            start: 0,
            rules: Vec::new(),
        };
        g.start = g.nt(start);
        g
    }

    /// The nonterminal called `name`, created on first use.
    pub fn nt(&mut self, name: &str) -> usize {
        if let Some(&i) = self.index.get(name) {
            return i;
        }
        self.names.push(name.to_string());
        self.index.insert(name.to_string(), self.names.len() - 1);
        self.names.len() - 1
    }

    pub fn lookup(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn name(&self, n: usize) -> &str {
        &self.names[n]
    }

    pub fn nonterminal_count(&self) -> usize {
        self.names.len()
    }

    pub fn add_rule(&mut self, lhs: usize, body: Vec<GSym<T>>) {
        let r = Rule { lhs, body };
        if !self.rules.contains(&r) {
            self.rules.push(r);
        }
    }

    pub fn terminals(&self) -> BTreeSet<T> {
        self.rules
            .iter()
            .flat_map(|r| r.body.iter())
            .filter_map(|s| match s {
                GSym::T(t) => Some(t.clone()),
                GSym::N(_) => None,
            })
            .collect()
    }

    /// A nonterminal name that is not yet taken, derived from `base`.
    pub fn fresh_name(&self, base: &str) -> String {
        if !self.index.contains_key(base) {
            return base.to_string();
        }
        (1..)
            .map(|i| format!("{base}#{i}"))
            .find(|s| !self.index.contains_key(s))
            .expect("unbounded supply")
    }

    /// Nonterminals deriving some terminal string.
    pub fn productive(&self) -> Vec<bool> {
        let mut ok = vec![false; self.names.len()];
        loop {
            let mut changed = false;
            for r in &self.rules {
                if !ok[r.lhs]
                    && r.body.iter().all(|s| match s {
                        GSym::T(_) => true,
                        GSym::N(n) => ok[*n],
                    })
                {
                    ok[r.lhs] = true;
                    changed = true;
                }
            }
            if !changed {
                return ok;
            }
        }
    }

    pub fn nullable(&self) -> Vec<bool> {
        let mut ok = vec![false; self.names.len()];
        loop {
            let mut changed = false;
            for r in &self.rules {
                if !ok[r.lhs] && r.body.iter().all(|s| matches!(s, GSym::N(n) if ok[*n])) {
                    ok[r.lhs] = true;
                    changed = true;
                }
            }
            if !changed {
                return ok;
            }
        }
    }

    /// Keep only the rules whose nonterminals are productive and reachable,
    /// renumbering nonterminals in order of first reach.
    pub fn reduce(&self) -> Cfg<T> {
        let productive = self.productive();
        let useful = |r: &Rule<T>| {
            productive[r.lhs]
                && r.body.iter().all(|s| match s {
                    GSym::T(_) => true,
                    GSym::N(n) => productive[*n],
                })
        };
        let mut by_lhs: Vec<Vec<&Rule<T>>> = vec![Vec::new(); self.names.len()];
        for r in self.rules.iter().filter(|r| useful(r)) {
            by_lhs[r.lhs].push(r);
        }
        let mut out = Cfg::new(&self.names[self.start]);
        let mut map: BTreeMap<usize, usize> = BTreeMap::from([(self.start, out.start)]);
        let mut queue = std::collections::VecDeque::from([self.start]);
        while let Some(n) = queue.pop_front() {
            for r in &by_lhs[n] {
                let body = r
                    .body
                    .iter()
                    .map(|s| match s {
                        GSym::T(t) => GSym::T(t.clone()),
                        GSym::N(m) => GSym::N(*map.entry(*m).or_insert_with(|| {
                            queue.push_back(*m);
                            out.nt(&self.names[*m])
                        })),
                    })
                    .collect();
                out.rules.push(Rule { lhs: map[&n], body });
            }
        }
        out
    }

    /// All strings of length at most `max_len`, by a least fixpoint over
    /// per-nonterminal string sets.
    pub fn enumerate(&self, max_len: usize) -> BTreeSet<Vec<T>> {
        let mut lang: Vec<BTreeSet<Vec<T>>> = vec![BTreeSet::new(); self.names.len()];
        loop {
            let mut changed = false;
            for r in &self.rules {
                let mut partial: BTreeSet<Vec<T>> = BTreeSet::from([Vec::new()]);
                for s in &r.body {
                    let mut next = BTreeSet::new();
                    match s {
                        GSym::T(t) => {
                            for p in &partial {
                                if p.len() < max_len {
                                    let mut q = p.clone();
                                    q.push(t.clone());
                                    next.insert(q);
                                }
                            }
                        }
                        GSym::N(n) => {
                            for p in &partial {
                                for w in &lang[*n] {
                                    if p.len() + w.len() <= max_len {
                                        let mut q = p.clone();
                                        q.extend(w.iter().cloned());
                                        next.insert(q);
                                    }
                                }
                            }
                        }
                    }
                    partial = next;
                    if partial.is_empty() {
                        break;
                    }
                }
                for w in partial {
                    changed |= lang[r.lhs].insert(w);
                }
            }
            if !changed {
                break;
            }
        }
        std::mem::take(&mut lang[self.start])
    }

    /// Apply `f` to every terminal.
    pub fn map_terminals<U: Terminal>(&self, mut f: impl FnMut(&T) -> U) -> Cfg<U> {
        Cfg {
            names: self.names.clone(),
            index: self.index.clone(),
            start: self.start,
            rules: self
                .rules
                .iter()
                .map(|r| Rule {
                    lhs: r.lhs,
                    body: r
                        .body
                        .iter()
                        .map(|s| match s {
                            GSym::T(t) => GSym::T(f(t)),
                            GSym::N(n) => GSym::N(*n),
                        })
                        .collect(),
                })
                .collect(),
        }
    }
}

/// `cfg_enumerate(g, k)`.
pub fn cfg_enumerate<T: Terminal>(g: &Cfg<T>, max_len: usize) -> BTreeSet<Vec<T>> {
    g.enumerate(max_len)
}

impl<T: Terminal> fmt::Display for Cfg<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "@cfg")?;
        writeln!(f, "start {}", self.names[self.start])?;
        for r in &self.rules {
            write!(f, "prod {} ->", self.names[r.lhs])?;
            for s in &r.body {
                match s {
                    GSym::T(t) => write!(f, " {t}")?,
                    GSym::N(n) => write!(f, " {}", self.names[*n])?,
                }
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Parse the `@cfg` format; symbols never used as a left-hand side are terminals.
pub fn parse_cfg(src: &str) -> Result<Cfg<Symbol>> {
    let mut lines = src
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());
    match lines.next() {
        Some((_, "@cfg")) => {}
        Some((n, _)) => return Err(Error::parse(n, "expected `@cfg`")),
        None => return Err(Error::parse(1, "empty input")),
    }
    let mut start = None;
    let mut prods: Vec<(String, Vec<String>)> = Vec::new();
    for (n, line) in lines {
        if let Some(rest) = line.strip_prefix("start ") {
            start = Some(rest.trim().to_string());
        } else if let Some(rest) = line.strip_prefix("prod ") {
            let (lhs, rhs) = rest
                .split_once("->")
                .ok_or_else(|| Error::parse(n, "expected `lhs -> body`"))?;
            let lhs = lhs.trim();
            if lhs.is_empty() || lhs.contains(char::is_whitespace) {
                return Err(Error::parse(n, "bad left-hand side"));
            }
            prods.push((
                lhs.into(),
                rhs.split_whitespace().map(String::from).collect(),
            ));
        } else {
            return Err(Error::parse(n, format!("unknown line `{line}`")));
        }
    }
    let start = start.ok_or_else(|| Error::parse(1, "missing `start`"))?;
    let mut g = Cfg::new(&start);
    let lhs: BTreeSet<&str> = prods.iter().map(|(l, _)| l.as_str()).collect();
    for (l, body) in &prods {
        let id = g.nt(l);
        let body = body
            .iter()
            .map(|s| {
                if lhs.contains(s.as_str()) {
                    GSym::N(g.nt(s))
                } else {
                    GSym::T(Symbol::new(s))
                }
            })
            .collect();
        g.add_rule(id, body);
    }
    Ok(g)
}
