use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use super::category::{parse_category, Atom, Atoms, Category, Comp, Slash, EPS};
use super::rules::{
    all_rules, apply_schema, parse_rule, same_gen, AtomPat, CompPat, RuleSchema, Slot,
};
use crate::error::{Error, Result};
use crate::trees::Tree;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum ArgKey {
    Atom(Atom),
    First(Comp),
    Any,
}

fn arg_key(s: &Slot) -> ArgKey {
    match s {
        Slot::Atom(AtomPat::Plain(a)) => ArgKey::Atom(*a),
        Slot::Atom(AtomPat::Triple([CompPat::Lit(c), _, _])) => ArgKey::First(*c),
        _ => ArgKey::Any,
    }
}

/// A CCG `(Σ, A, R, I, L)`. Σ is the lexicon's domain. Atoms whose names
/// are triples may carry generator and label tables for their components,
/// which drive `samegen` rules and the relabeling [`Ccg::rho`].
#[derive(Clone, Debug, Default)]
pub struct Ccg {
    pub atoms: Atoms,
    pub initial: BTreeSet<Atom>,
    pub lexicon: BTreeMap<String, BTreeSet<Category>>,
    all: Option<usize>,
    rules: Vec<RuleSchema>,
    gen: BTreeMap<Comp, String>,
    labels: BTreeMap<Comp, String>,
    active: Vec<RuleSchema>,
    index: HashMap<(Slash, ArgKey), Vec<usize>>,
    gen_ids: Vec<Option<u32>>,
    gen_names: HashMap<String, u32>,
}

/// The four statistics of [`Ccg::audit`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub struct Audit {
    pub max_rule_degree: usize,
    pub first_order: bool,
    pub epsilon_entries: bool,
    pub max_lexicon_arity: usize,
}

/// Outcome of [`Ccg::validate_derivation`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Validation {
    pub violation: Option<String>,
    pub root_initial: bool,
}

impl Validation {
    pub fn is_valid(&self) -> bool {
        self.violation.is_none()
    }

    pub fn is_accepted(&self) -> bool {
        self.is_valid() && self.root_initial
    }
}

impl Ccg {
    pub fn new() -> Self {
        Ccg::default()
    }

    /// Enable every rule of degree at most `k` in both directions.
    pub fn set_all_rules(&mut self, k: usize) {
        self.all = Some(k);
        self.reindex();
    }

    pub fn all_rules_degree(&self) -> Option<usize> {
        self.all
    }

    pub fn add_rule(&mut self, r: RuleSchema) -> usize {
        if let Some(i) = self.rules.iter().position(|x| *x == r) {
            return i;
        }
        self.rules.push(r);
        self.reindex();
        self.rules.len() - 1
    }

    /// The explicitly listed rules.
    pub fn rules(&self) -> &[RuleSchema] {
        &self.rules
    }

    /// All schemas in force, the expansion of `rules all k` first.
    pub fn schemas(&self) -> &[RuleSchema] {
        &self.active
    }

    fn reindex(&mut self) {
        self.active = self.all.map(all_rules).unwrap_or_default();
        self.active.extend(self.rules.iter().cloned());
        self.index.clear();
        for (i, r) in self.active.iter().enumerate() {
            self.index
                .entry((r.dir, arg_key(&r.arg)))
                .or_default()
                .push(i);
        }
    }

    pub fn add_lexical(&mut self, sym: &str, c: Category) {
        self.lexicon.entry(sym.to_string()).or_default().insert(c);
    }

    pub fn set_gen(&mut self, c: Comp, nt: &str) {
        let n = self.gen_names.len() as u32;
        let id = *self.gen_names.entry(nt.to_string()).or_insert(n);
        let i = c.0 as usize;
        if self.gen_ids.len() <= i {
            self.gen_ids.resize(i + 1, None);
        }
        self.gen_ids[i] = Some(id);
        self.gen.insert(c, nt.to_string());
    }

    pub fn set_label(&mut self, c: Comp, label: &str) {
        self.labels.insert(c, label.to_string());
    }

    pub fn gen(&self, c: Comp) -> Option<&str> {
        self.gen.get(&c).map(String::as_str)
    }

    pub fn label(&self, c: Comp) -> Option<&str> {
        self.labels.get(&c).map(String::as_str)
    }

    fn gen_id(&self, c: Comp) -> Option<u32> {
        self.gen_ids.get(c.0 as usize).copied().flatten()
    }

    /// Every output of `left , right` with the index of the schema used.
    pub fn combine(&self, left: &Category, right: &Category) -> Vec<(Category, usize)> {
        let mut out = Vec::new();
        self.combine_dir(Slash::Fwd, left, right, &mut out);
        self.combine_dir(Slash::Bwd, right, left, &mut out);
        out
    }

    /// The outputs of rules in direction `dir` with the given primary.
    pub(crate) fn combine_dir(
        &self,
        dir: Slash,
        primary: &Category,
        secondary: &Category,
        out: &mut Vec<(Category, usize)>,
    ) {
        let Some((s, c)) = primary.last() else {
            return;
        };
        if *s != dir {
            return;
        }
        let mut keys = vec![ArgKey::Any];
        if c.is_atomic() {
            keys.push(ArgKey::Atom(c.target));
            if let Some(cs) = self.atoms.components(c.target) {
                keys.push(ArgKey::First(cs[0]));
            }
        }
        let gen = |x: Comp| self.gen_id(x);
        for k in keys {
            for &i in self.index.get(&(dir, k)).into_iter().flatten() {
                if let Some(o) =
                    apply_schema(&self.active[i], primary, secondary, &self.atoms, &gen)
                {
                    out.push((o, i));
                }
            }
        }
    }

    /// Whether `ax|b` is primary: gen of a's third component equals gen of
    /// b's first.
    pub fn is_primary(&self, c: &Category) -> bool {
        match c.last() {
            Some((_, b)) => same_gen(c.target, b, &self.atoms, &|x| self.gen_id(x)),
            None => false,
        }
    }

    /// ρ: the label of the last argument's first component for primary
    /// categories, otherwise the label of the target's third component.
    pub fn rho(&self, c: &Category) -> Option<&str> {
        if self.is_primary(c) {
            let b = c.last_atom()?;
            return self.label(self.atoms.components(b)?[0]);
        }
        self.label(self.atoms.components(c.target)?[2])
    }

    pub fn max_lexicon_arity(&self) -> usize {
        self.lexicon
            .values()
            .flatten()
            .map(Category::arity)
            .max()
            .unwrap_or(0)
    }

    pub fn is_first_order(&self) -> bool {
        self.lexicon
            .values()
            .flatten()
            .all(Category::is_first_order)
            && self.active.iter().all(|r| {
                std::iter::once(&r.arg)
                    .chain(r.sec.iter().map(|(_, s)| s))
                    .all(|s| !matches!(s, Slot::Cat(c) if !c.is_atomic()))
            })
    }

    pub fn lexicon_size(&self) -> usize {
        self.lexicon.values().map(BTreeSet::len).sum()
    }

    pub fn audit(&self) -> Audit {
        Audit {
            max_rule_degree: self
                .active
                .iter()
                .map(RuleSchema::degree)
                .max()
                .unwrap_or(0),
            first_order: self.is_first_order(),
            epsilon_entries: self.lexicon.get(EPS).is_some_and(|s| !s.is_empty()),
            max_lexicon_arity: self.max_lexicon_arity(),
        }
    }

    /// Check every inner node against [`Ccg::combine`] and every leaf
    /// against the lexicon, for the given symbols if `input` is supplied.
    pub fn validate_derivation(&self, t: &Tree<Category>, input: Option<&[&str]>) -> Validation {
        let mut leaves = Vec::new();
        let violation = self.first_violation(t, &mut leaves).or_else(|| {
            let input = input?;
            if input.len() != leaves.len() {
                return Some(format!(
                    "{} leaves for {} input symbols",
                    leaves.len(),
                    input.len()
                ));
            }
            input.iter().zip(&leaves).find_map(|(a, c)| {
                let ok = self.lexicon.get(*a).is_some_and(|s| s.contains(*c));
                (!ok).then(|| format!("`{a}` is not assigned {}", c.show(&self.atoms)))
            })
        });
        Validation {
            violation,
            root_initial: t.label().is_atomic() && self.initial.contains(&t.label().target),
        }
    }

    fn first_violation<'a>(
        &self,
        t: &'a Tree<Category>,
        leaves: &mut Vec<&'a Category>,
    ) -> Option<String> {
        let c = t.label();
        match t.children() {
            [] => {
                leaves.push(c);
                let known = self.lexicon.values().any(|s| s.contains(c));
                (!known).then(|| format!("leaf {} is not a lexical category", c.show(&self.atoms)))
            }
            [l, r] => {
                if let Some(v) = self
                    .first_violation(l, leaves)
                    .or_else(|| self.first_violation(r, leaves))
                {
                    return Some(v);
                }
                let licensed = self
                    .combine(l.label(), r.label())
                    .iter()
                    .any(|(o, _)| o == c);
                (!licensed).then(|| {
                    format!(
                        "no rule yields {} from {} , {}",
                        c.show(&self.atoms),
                        l.label().show(&self.atoms),
                        r.label().show(&self.atoms)
                    )
                })
            }
            _ => Some(format!("node {} is not binary", c.show(&self.atoms))),
        }
    }

    pub fn parse_category(&mut self, s: &str) -> Result<Category> {
        parse_category(s, &mut self.atoms)
    }

    pub fn show<'a>(&'a self, c: &'a Category) -> impl fmt::Display + 'a {
        c.show(&self.atoms)
    }

    /// Render a derivation tree as an s-expression over categories.
    pub fn show_tree(&self, t: &Tree<Category>) -> String {
        t.map(&mut |c: &Category| c.show(&self.atoms).to_string())
            .to_string()
    }
}

/// Parse the `@ccg` format.
pub fn parse_ccg(src: &str) -> Result<Ccg> {
    let mut g = Ccg::new();
    let mut declared: Option<usize> = None;
    let mut saw_header = false;
    for (n, raw) in src.lines().enumerate() {
        let line = raw.trim();
        let lineno = n + 1;
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let at = |e: Error| match e {
            Error::Parse { msg, .. } => Error::parse(lineno, msg),
            e => e,
        };
        if !saw_header {
            if line != "@ccg" {
                return Err(Error::parse(lineno, "expected `@ccg` header"));
            }
            saw_header = true;
            continue;
        }
        let (kw, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        let rest = rest.trim();
        let before = g.atoms.len();
        match kw {
            "atoms" => {
                for a in rest.split_whitespace() {
                    g.atoms.intern(a).map_err(at)?;
                }
                declared = Some(g.atoms.len());
                continue;
            }
            "initial" => {
                for a in rest.split_whitespace() {
                    let a = g.atoms.intern(a).map_err(at)?;
                    g.initial.insert(a);
                }
            }
            "rules" => {
                let k = rest
                    .strip_prefix("all")
                    .and_then(|k| k.trim().parse().ok())
                    .ok_or_else(|| Error::parse(lineno, "expected `rules all <k>`"))?;
                g.set_all_rules(k);
            }
            "rule" => {
                let r = parse_rule(rest, &mut g.atoms).map_err(at)?;
                g.add_rule(r);
            }
            "gen" | "label" => {
                let (c, v) = rest.split_once(char::is_whitespace).ok_or_else(|| {
                    Error::parse(lineno, format!("expected `{kw} <component> <value>`"))
                })?;
                let c = g.atoms.comp(c);
                if kw == "gen" {
                    g.set_gen(c, v.trim());
                } else {
                    g.set_label(c, v.trim());
                }
            }
            _ => {
                let (sym, cat) = line
                    .split_once(" : ")
                    .ok_or_else(|| Error::parse(lineno, format!("unrecognised line `{line}`")))?;
                let c = g.parse_category(cat).map_err(at)?;
                g.add_lexical(sym.trim(), c);
            }
        }
        if let Some(d) = declared {
            if g.atoms.len() > d {
                let a = g.atoms.name(Atom(d as u32)).to_string();
                return Err(Error::parse(lineno, format!("undeclared atom `{a}`")));
            }
        } else if g.atoms.len() > before {
            return Err(Error::parse(lineno, "atoms must be declared before use"));
        }
    }
    if !saw_header {
        return Err(Error::parse(0, "empty input"));
    }
    Ok(g)
}

impl fmt::Display for Ccg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "@ccg")?;
        let atoms: Vec<&str> = self.atoms.iter().map(|a| self.atoms.name(a)).collect();
        writeln!(f, "atoms {}", atoms.join(" "))?;
        let initial: Vec<&str> = self.initial.iter().map(|a| self.atoms.name(*a)).collect();
        writeln!(f, "initial {}", initial.join(" "))?;
        if let Some(k) = self.all {
            writeln!(f, "rules all {k}")?;
        }
        for r in &self.rules {
            writeln!(f, "rule {}", r.show(&self.atoms))?;
        }
        for (c, n) in &self.gen {
            writeln!(f, "gen {} {n}", self.atoms.comp_name(*c))?;
        }
        for (c, l) in &self.labels {
            writeln!(f, "label {} {l}", self.atoms.comp_name(*c))?;
        }
        for (sym, cats) in &self.lexicon {
            for c in cats {
                writeln!(f, "{sym} : {}", c.show(&self.atoms))?;
            }
        }
        Ok(())
    }
}
