use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize)]
pub enum Slash {
    Fwd,
    Bwd,
}

impl Slash {
    pub fn as_char(self) -> char {
        match self {
            Slash::Fwd => '/',
            Slash::Bwd => '\\',
        }
    }
}

impl fmt::Display for Slash {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

/// An interned atom.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Atom(pub u32);

/// An interned triple component.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Comp(pub u32);

pub const BOTTOM: &str = "⊥";
pub const EPS: &str = "eps";

/// Atom and component interner. Triple atoms are named `<c1,c2,c3>`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Atoms {
    names: Vec<String>,
    index: HashMap<String, Atom>,
    triples: Vec<Option<[Comp; 3]>>,
    comp_names: Vec<String>,
    comp_index: HashMap<String, Comp>,
}

fn canonical_comp(s: &str) -> &str {
    match s.trim() {
        "bot" => BOTTOM,
        "ε" => EPS,
        t => t,
    }
}

impl Atoms {
    pub fn comp(&mut self, name: &str) -> Comp {
        let name = canonical_comp(name);
        if let Some(&c) = self.comp_index.get(name) {
            return c;
        }
        let c = Comp(self.comp_names.len() as u32);
        self.comp_names.push(name.to_string());
        self.comp_index.insert(name.to_string(), c);
        c
    }

    pub fn lookup_comp(&self, name: &str) -> Option<Comp> {
        self.comp_index.get(canonical_comp(name)).copied()
    }

    pub fn comp_name(&self, c: Comp) -> &str {
        &self.comp_names[c.0 as usize]
    }

    pub fn triple(&mut self, c: [Comp; 3]) -> Atom {
        let name = format!(
            "<{},{},{}>",
            self.comp_name(c[0]),
            self.comp_name(c[1]),
            self.comp_name(c[2])
        );
        if let Some(&a) = self.index.get(&name) {
            return a;
        }
        self.push(name, Some(c))
    }

    fn push(&mut self, name: String, triple: Option<[Comp; 3]>) -> Atom {
        let a = Atom(self.names.len() as u32);
        self.index.insert(name.clone(), a);
        self.names.push(name);
        self.triples.push(triple);
        a
    }

    /// Intern a bare name or a `<c1,c2,c3>` triple.
    pub fn intern(&mut self, name: &str) -> Result<Atom> {
        let name = name.trim();
        if let Some(inner) = name.strip_prefix('<').and_then(|s| s.strip_suffix('>')) {
            let parts: Vec<&str> = inner.split(',').collect();
            if parts.len() != 3 || parts.iter().any(|p| p.trim().is_empty()) {
                return Err(Error::parse(0, format!("bad atom `{name}`")));
            }
            let c = [
                self.comp(parts[0]),
                self.comp(parts[1]),
                self.comp(parts[2]),
            ];
            return Ok(self.triple(c));
        }
        if name.is_empty() || name.contains(|c: char| "/\\()<>,|$ \t".contains(c)) {
            return Err(Error::parse(0, format!("bad atom `{name}`")));
        }
        let name = canonical_comp(name);
        if let Some(&a) = self.index.get(name) {
            return Ok(a);
        }
        Ok(self.push(name.to_string(), None))
    }

    pub fn lookup(&self, name: &str) -> Option<Atom> {
        self.index.get(canonical_comp(name)).copied()
    }

    pub fn name(&self, a: Atom) -> &str {
        &self.names[a.0 as usize]
    }

    pub fn components(&self, a: Atom) -> Option<[Comp; 3]> {
        self.triples[a.0 as usize]
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = Atom> {
        (0..self.names.len() as u32).map(Atom)
    }
}

/// `a |1 c1 ⋯ |k ck`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Category {
    pub target: Atom,
    pub args: Vec<(Slash, Category)>,
}

impl Category {
    pub fn atom(a: Atom) -> Self {
        Category {
            target: a,
            args: Vec::new(),
        }
    }

    pub fn arity(&self) -> usize {
        self.args.len()
    }

    pub fn is_atomic(&self) -> bool {
        self.args.is_empty()
    }

    pub fn is_first_order(&self) -> bool {
        self.args.iter().all(|(_, c)| c.is_atomic())
    }

    pub fn last(&self) -> Option<&(Slash, Category)> {
        self.args.last()
    }

    /// The atom of the last argument, for first-order categories.
    pub fn last_atom(&self) -> Option<Atom> {
        match self.args.last() {
            Some((_, c)) if c.is_atomic() => Some(c.target),
            _ => None,
        }
    }

    /// The category without its last `k` arguments.
    pub fn head(&self, k: usize) -> Category {
        Category {
            target: self.target,
            args: self.args[..self.args.len() - k].to_vec(),
        }
    }

    /// Whether removing the last `k` arguments leaves exactly `c`.
    pub fn has_head(&self, k: usize, c: &Category) -> bool {
        self.target == c.target
            && self.args.len() == c.args.len() + k
            && self.args[..c.args.len()] == c.args[..]
    }

    pub fn with(mut self, s: Slash, c: Category) -> Self {
        self.args.push((s, c));
        self
    }

    pub fn show<'a>(&'a self, atoms: &'a Atoms) -> ShowCategory<'a> {
        ShowCategory { c: self, atoms }
    }
}

pub struct ShowCategory<'a> {
    c: &'a Category,
    atoms: &'a Atoms,
}

impl fmt::Display for ShowCategory<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.atoms.name(self.c.target))?;
        for (s, c) in &self.c.args {
            if c.is_atomic() {
                write!(f, "{s}{}", c.show(self.atoms))?;
            } else {
                write!(f, "{s}({})", c.show(self.atoms))?;
            }
        }
        Ok(())
    }
}

/// A recursive-descent reader shared by the category and pattern parsers.
pub(crate) struct Reader<'a> {
    pub s: &'a str,
    pub pos: usize,
}

impl<'a> Reader<'a> {
    pub fn new(s: &'a str) -> Self {
        Reader { s, pos: 0 }
    }

    pub fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    pub fn peek(&self) -> Option<char> {
        self.s[self.pos..].chars().next()
    }

    pub fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    pub fn at_end(&mut self) -> bool {
        self.skip_ws();
        self.pos == self.s.len()
    }

    pub fn err(&self, msg: &str) -> Error {
        Error::parse(0, format!("{msg} at offset {} in `{}`", self.pos, self.s))
    }

    /// A `<…>` triple or a bare name.
    pub fn atom_text(&mut self) -> Result<&'a str> {
        self.skip_ws();
        let start = self.pos;
        if self.peek() == Some('<') {
            match self.s[start..].find('>') {
                Some(end) => {
                    self.pos = start + end + 1;
                    return Ok(&self.s[start..self.pos]);
                }
                None => return Err(self.err("unclosed `<`")),
            }
        }
        while let Some(c) = self.peek() {
            if c.is_whitespace() || "/\\()<>,|".contains(c) {
                break;
            }
            self.pos += c.len_utf8();
        }
        if self.pos == start {
            return Err(self.err("expected an atom"));
        }
        Ok(&self.s[start..self.pos])
    }

    pub fn slash(&mut self) -> Option<Slash> {
        if self.eat('/') {
            Some(Slash::Fwd)
        } else if self.eat('\\') {
            Some(Slash::Bwd)
        } else {
            None
        }
    }
}

fn primary(r: &mut Reader<'_>, atoms: &mut Atoms) -> Result<Category> {
    if r.eat('(') {
        let c = category(r, atoms)?;
        if !r.eat(')') {
            return Err(r.err("expected `)`"));
        }
        return Ok(c);
    }
    let text = r.atom_text()?;
    Ok(Category::atom(
        atoms.intern(text).map_err(|_| r.err("bad atom"))?,
    ))
}

fn category(r: &mut Reader<'_>, atoms: &mut Atoms) -> Result<Category> {
    let mut c = primary(r, atoms)?;
    while let Some(s) = r.slash() {
        let arg = primary(r, atoms)?;
        c.args.push((s, arg));
    }
    Ok(c)
}

/// Parse a category; slashes are left-associative.
pub fn parse_category(s: &str, atoms: &mut Atoms) -> Result<Category> {
    let mut r = Reader::new(s);
    let c = category(&mut r, atoms)?;
    if !r.at_end() {
        return Err(r.err("trailing input"));
    }
    Ok(c)
}
