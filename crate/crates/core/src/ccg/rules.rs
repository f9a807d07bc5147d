use std::collections::HashMap;
use std::fmt::{self, Write as _};

use super::category::{parse_category, Atom, Atoms, Category, Comp, Reader, Slash};
use crate::error::{Error, Result};

/// One component of a triple pattern.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CompPat {
    Any,
    Lit(Comp),
    Var(u8),
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AtomPat {
    Plain(Atom),
    Triple([CompPat; 3]),
}

/// A category position in a schema.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Slot {
    /// Any category; equal indices must bind equal categories.
    Var(u8),
    Cat(Category),
    /// An atomic category matching the pattern.
    Atom(AtomPat),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SlashPat {
    Exact(Slash),
    Any,
}

impl SlashPat {
    fn matches(self, s: Slash) -> bool {
        match self {
            SlashPat::Any => true,
            SlashPat::Exact(t) => t == s,
        }
    }
}

/// A rule of degree `sec.len()`. Forward: `ax/c , c|1c1…|kck → ax|1c1…|kck`;
/// backward has the primary `ax\c` on the right. With `samegen` the rule
/// only applies when the generator of the primary target's third component
/// equals that of its last argument's first component.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RuleSchema {
    pub dir: Slash,
    pub arg: Slot,
    pub sec: Vec<(SlashPat, Slot)>,
    pub samegen: bool,
}

impl RuleSchema {
    pub fn degree(&self) -> usize {
        self.sec.len()
    }
}

#[derive(Default)]
struct Bindings {
    comps: Vec<Option<Comp>>,
    cats: Vec<Option<Category>>,
}

impl Bindings {
    fn comp(&mut self, v: u8, c: Comp) -> bool {
        let i = usize::from(v);
        if self.comps.len() <= i {
            self.comps.resize(i + 1, None);
        }
        match self.comps[i] {
            Some(b) => b == c,
            None => {
                self.comps[i] = Some(c);
                true
            }
        }
    }

    fn cat(&mut self, v: u8, c: &Category) -> bool {
        let i = usize::from(v);
        if self.cats.len() <= i {
            self.cats.resize(i + 1, None);
        }
        match &self.cats[i] {
            Some(b) => b == c,
            None => {
                self.cats[i] = Some(c.clone());
                true
            }
        }
    }
}

fn match_atom(p: &AtomPat, a: Atom, atoms: &Atoms, b: &mut Bindings) -> bool {
    match p {
        AtomPat::Plain(x) => *x == a,
        AtomPat::Triple(ps) => {
            let Some(cs) = atoms.components(a) else {
                return false;
            };
            ps.iter().zip(cs).all(|(p, c)| match *p {
                CompPat::Any => true,
                CompPat::Lit(l) => l == c,
                CompPat::Var(v) => b.comp(v, c),
            })
        }
    }
}

fn match_slot(s: &Slot, c: &Category, atoms: &Atoms, b: &mut Bindings) -> bool {
    match s {
        Slot::Var(v) => b.cat(*v, c),
        Slot::Cat(x) => x == c,
        Slot::Atom(p) => c.is_atomic() && match_atom(p, c.target, atoms, b),
    }
}

/// The output of a schema on a primary and a secondary, if it applies.
/// `gen` supplies the generator of a triple component for `samegen`.
pub(crate) fn apply_schema(
    r: &RuleSchema,
    primary: &Category,
    secondary: &Category,
    atoms: &Atoms,
    gen: &dyn Fn(Comp) -> Option<u32>,
) -> Option<Category> {
    let (s, c) = primary.last()?;
    let k = r.sec.len();
    if *s != r.dir || !secondary.has_head(k, c) {
        return None;
    }
    let mut b = Bindings::default();
    if !match_slot(&r.arg, c, atoms, &mut b) {
        return None;
    }
    let tail = &secondary.args[secondary.args.len() - k..];
    for ((sp, slot), (s, x)) in r.sec.iter().zip(tail) {
        if !sp.matches(*s) || !match_slot(slot, x, atoms, &mut b) {
            return None;
        }
    }
    if r.samegen && !same_gen(primary.target, c, atoms, gen) {
        return None;
    }
    let mut out = primary.head(1);
    out.args.extend(tail.iter().cloned());
    Some(out)
}

/// gen of the target's third component equals gen of the argument's first.
pub(crate) fn same_gen(
    target: Atom,
    arg: &Category,
    atoms: &Atoms,
    gen: &dyn Fn(Comp) -> Option<u32>,
) -> bool {
    if !arg.is_atomic() {
        return false;
    }
    match (atoms.components(target), atoms.components(arg.target)) {
        (Some(a), Some(b)) => matches!((gen(a[2]), gen(b[0])), (Some(x), Some(y)) if x == y),
        _ => false,
    }
}

// ---- text format ----

struct Names {
    comps: HashMap<String, u8>,
    cats: HashMap<String, u8>,
}

impl Names {
    fn index(map: &mut HashMap<String, u8>, name: &str) -> u8 {
        let n = map.len() as u8;
        *map.entry(name.to_string()).or_insert(n)
    }
}

fn var_name(r: &mut Reader<'_>) -> String {
    let start = r.pos;
    while let Some(c) = r.peek() {
        if c.is_alphanumeric() || c == '_' {
            r.pos += c.len_utf8();
        } else {
            break;
        }
    }
    r.s[start..r.pos].to_string()
}

fn parse_slot(r: &mut Reader<'_>, atoms: &mut Atoms, names: &mut Names) -> Result<Slot> {
    r.skip_ws();
    if r.eat('$') {
        let n = var_name(r);
        if n.is_empty() {
            return Err(r.err("empty variable name"));
        }
        return Ok(Slot::Var(Names::index(&mut names.cats, &n)));
    }
    if r.eat('(') {
        let start = r.pos;
        let mut depth = 1;
        while let Some(c) = r.peek() {
            r.pos += c.len_utf8();
            match c {
                '(' => depth += 1,
                ')' => {
                    depth -= 1;
                    if depth == 0 {
                        let inner = &r.s[start..r.pos - 1];
                        return Ok(Slot::Cat(parse_category(inner, atoms)?));
                    }
                }
                _ => {}
            }
        }
        return Err(r.err("expected `)`"));
    }
    let text = r.atom_text()?;
    if let Some(inner) = text.strip_prefix('<').and_then(|s| s.strip_suffix('>')) {
        let parts: Vec<&str> = inner.split(',').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(r.err("triple pattern needs three components"));
        }
        if parts.iter().all(|p| *p != "*" && !p.starts_with('$')) {
            return Ok(Slot::Atom(AtomPat::Plain(atoms.intern(text)?)));
        }
        let mut ps = [CompPat::Any; 3];
        for (p, part) in ps.iter_mut().zip(&parts) {
            *p = match *part {
                "*" => CompPat::Any,
                v if v.starts_with('$') => CompPat::Var(Names::index(&mut names.comps, &v[1..])),
                lit => CompPat::Lit(atoms.comp(lit)),
            };
        }
        return Ok(Slot::Atom(AtomPat::Triple(ps)));
    }
    Ok(Slot::Atom(AtomPat::Plain(atoms.intern(text)?)))
}

fn parse_slash_pat(r: &mut Reader<'_>) -> Option<SlashPat> {
    if r.eat('|') {
        Some(SlashPat::Any)
    } else {
        r.slash().map(SlashPat::Exact)
    }
}

/// A pattern category: `$a$x` or a slot, followed by argument slots.
struct Pattern {
    context: bool,
    head: Option<Slot>,
    args: Vec<(SlashPat, Slot)>,
}

fn parse_pattern(s: &str, atoms: &mut Atoms, names: &mut Names) -> Result<Pattern> {
    let mut r = Reader::new(s);
    r.skip_ws();
    let context = r.s[r.pos..].starts_with("$a$x");
    let head = if context {
        r.pos += 4;
        None
    } else {
        Some(parse_slot(&mut r, atoms, names)?)
    };
    let mut args = Vec::new();
    while let Some(sp) = parse_slash_pat(&mut r) {
        args.push((sp, parse_slot(&mut r, atoms, names)?));
    }
    if !r.at_end() {
        return Err(r.err("trailing input in pattern"));
    }
    Ok(Pattern {
        context,
        head,
        args,
    })
}

fn split_top_comma(s: &str) -> Option<(&str, &str)> {
    let mut depth = 0i32;
    for (i, c) in s.char_indices() {
        match c {
            '(' | '<' => depth += 1,
            ')' | '>' => depth -= 1,
            ',' if depth == 0 => return Some((&s[..i], &s[i + 1..])),
            _ => {}
        }
    }
    None
}

/// Parse `out <- left , right [if samegen]`.
pub fn parse_rule(line: &str, atoms: &mut Atoms) -> Result<RuleSchema> {
    let bad = |m: &str| Error::parse(0, format!("{m} in rule `{line}`"));
    let (body, samegen) = match line.trim().strip_suffix("if samegen") {
        Some(b) => (b, true),
        None => (line, false),
    };
    let (out, inputs) = body.split_once("<-").ok_or_else(|| bad("missing `<-`"))?;
    let (left, right) = split_top_comma(inputs).ok_or_else(|| bad("missing `,`"))?;
    let mut names = Names {
        comps: HashMap::new(),
        cats: HashMap::new(),
    };
    let out = parse_pattern(out, atoms, &mut names)?;
    let left = parse_pattern(left, atoms, &mut names)?;
    let right = parse_pattern(right, atoms, &mut names)?;
    let (dir, primary, secondary) = match (left.context, right.context) {
        (true, false) => (Slash::Fwd, left, right),
        (false, true) => (Slash::Bwd, right, left),
        _ => return Err(bad("exactly one input must start with `$a$x`")),
    };
    let [(ps, arg)] = &primary.args[..] else {
        return Err(bad("the primary takes one argument"));
    };
    if *ps != SlashPat::Exact(dir) {
        return Err(bad("primary slash does not match its side"));
    }
    if secondary.head.as_ref() != Some(arg) {
        return Err(bad("secondary head differs from the primary argument"));
    }
    if !out.context || out.args != secondary.args {
        return Err(bad(
            "output is not `$a$x` followed by the secondary arguments",
        ));
    }
    Ok(RuleSchema {
        dir,
        arg: arg.clone(),
        sec: secondary.args,
        samegen,
    }
    .canonical())
}

impl RuleSchema {
    /// Renumber variables in order of appearance: argument first, then the
    /// secondary arguments.
    fn canonical(mut self) -> Self {
        let mut cats: HashMap<u8, u8> = HashMap::new();
        let mut comps: HashMap<u8, u8> = HashMap::new();
        let mut fix = |s: &mut Slot| match s {
            Slot::Var(v) => {
                let n = cats.len() as u8;
                *v = *cats.entry(*v).or_insert(n);
            }
            Slot::Atom(AtomPat::Triple(ps)) => {
                for p in ps {
                    if let CompPat::Var(v) = p {
                        let n = comps.len() as u8;
                        *v = *comps.entry(*v).or_insert(n);
                    }
                }
            }
            _ => {}
        };
        fix(&mut self.arg);
        for (_, s) in &mut self.sec {
            fix(s);
        }
        self
    }
}

fn write_slot(f: &mut String, s: &Slot, atoms: &Atoms) {
    match s {
        Slot::Var(0) => f.push_str("$y"),
        Slot::Var(v) => {
            let _ = write!(f, "$y{v}");
        }
        Slot::Cat(c) if c.is_atomic() => {
            let _ = write!(f, "{}", c.show(atoms));
        }
        Slot::Cat(c) => {
            let _ = write!(f, "({})", c.show(atoms));
        }
        Slot::Atom(AtomPat::Plain(a)) => f.push_str(atoms.name(*a)),
        Slot::Atom(AtomPat::Triple(ps)) => {
            f.push('<');
            for (i, p) in ps.iter().enumerate() {
                if i > 0 {
                    f.push(',');
                }
                match p {
                    CompPat::Any => f.push('*'),
                    CompPat::Lit(c) => f.push_str(atoms.comp_name(*c)),
                    CompPat::Var(0) => f.push_str("$g"),
                    CompPat::Var(v) => {
                        let _ = write!(f, "$g{v}");
                    }
                }
            }
            f.push('>');
        }
    }
}

fn write_args(f: &mut String, args: &[(SlashPat, Slot)], atoms: &Atoms) {
    for (sp, slot) in args {
        f.push(match sp {
            SlashPat::Any => '|',
            SlashPat::Exact(s) => s.as_char(),
        });
        write_slot(f, slot, atoms);
    }
}

pub struct ShowRule<'a> {
    r: &'a RuleSchema,
    atoms: &'a Atoms,
}

impl RuleSchema {
    pub fn show<'a>(&'a self, atoms: &'a Atoms) -> ShowRule<'a> {
        ShowRule { r: self, atoms }
    }
}

impl fmt::Display for ShowRule<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (r, atoms) = (self.r, self.atoms);
        let mut out = String::from("$a$x");
        write_args(&mut out, &r.sec, atoms);
        let mut primary = format!("$a$x{}", r.dir);
        write_slot(&mut primary, &r.arg, atoms);
        let mut secondary = String::new();
        write_slot(&mut secondary, &r.arg, atoms);
        write_args(&mut secondary, &r.sec, atoms);
        let (l, rt) = match r.dir {
            Slash::Fwd => (primary, secondary),
            Slash::Bwd => (secondary, primary),
        };
        write!(f, "{out} <- {l} , {rt}")?;
        if r.samegen {
            f.write_str(" if samegen")?;
        }
        Ok(())
    }
}

/// The schemas of "all rules up to degree k" in both directions.
pub fn all_rules(k: usize) -> Vec<RuleSchema> {
    let mut out = Vec::new();
    for dir in [Slash::Fwd, Slash::Bwd] {
        for d in 0..=k {
            out.push(RuleSchema {
                dir,
                arg: Slot::Var(0),
                sec: (1..=d)
                    .map(|i| (SlashPat::Any, Slot::Var(i as u8)))
                    .collect(),
                samegen: false,
            });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn no_gen(_: Comp) -> Option<u32> {
        None
    }

    #[test]
    fn composition_instance_from_the_running_ccg() {
        let mut atoms = Atoms::default();
        let p = parse_category("⊥\\a/c", &mut atoms).unwrap();
        let s = parse_category("c\\a/c", &mut atoms).unwrap();
        let want = parse_category("⊥\\a\\a/c", &mut atoms).unwrap();
        let r = &all_rules(2)[2];
        assert_eq!(apply_schema(r, &p, &s, &atoms, &no_gen), Some(want));
        assert_eq!(
            apply_schema(&all_rules(2)[0], &p, &s, &atoms, &no_gen),
            None
        );
    }

    #[test]
    fn application() {
        let mut atoms = Atoms::default();
        let p = parse_category("a/b", &mut atoms).unwrap();
        let s = parse_category("b", &mut atoms).unwrap();
        let a = parse_category("a", &mut atoms).unwrap();
        assert_eq!(
            apply_schema(&all_rules(0)[0], &p, &s, &atoms, &no_gen),
            Some(a)
        );
        assert_eq!(
            apply_schema(&all_rules(0)[1], &p, &s, &atoms, &no_gen),
            None
        );
    }

    #[test]
    fn rule_text_round_trip() {
        let mut atoms = Atoms::default();
        for line in [
            "$a$x <- $a$x/$y , $y",
            "$a$x|$y1|$y2 <- $y|$y1|$y2 , $a$x\\$y",
            "$a$x|<q1,$g,*> <- $a$x/<q0,$g,*> , <q0,$g,*>|<q1,$g,*> if samegen",
            "$a$x <- <q2,g1,*> , $a$x\\<q2,g1,*> if samegen",
            "$a$x/b <- $a$x/(a\\b) , (a\\b)/b",
        ] {
            let r = parse_rule(line, &mut atoms).unwrap();
            assert_eq!(r.show(&atoms).to_string(), line);
        }
    }

    #[test]
    fn malformed_rules() {
        let mut atoms = Atoms::default();
        for line in [
            "$a$x <- $a$x/$y",
            "$a$x <- $a$x/$y , $z",
            "$a$x <- $y , $y",
            "$a$x|$y1 <- $a$x/$y , $y",
            "$a$x <- $a$x\\$y , $y",
        ] {
            assert!(parse_rule(line, &mut atoms).is_err(), "{line}");
        }
    }

    #[test]
    fn component_variables_must_agree() {
        let mut atoms = Atoms::default();
        let r = parse_rule(
            "$a$x|<q1,$g,*> <- $a$x/<q0,$g,*> , <q0,$g,*>|<q1,$g,*>",
            &mut atoms,
        )
        .unwrap();
        let p = parse_category("<⊥,eps,f>/<q0,u,f>", &mut atoms).unwrap();
        let good = parse_category("<q0,u,f>/<q1,u,f2>", &mut atoms).unwrap();
        let bad = parse_category("<q0,u,f>/<q1,v,f2>", &mut atoms).unwrap();
        assert!(apply_schema(&r, &p, &good, &atoms, &no_gen).is_some());
        assert!(apply_schema(&r, &p, &bad, &atoms, &no_gen).is_none());
    }
}
