use std::collections::BTreeSet;
use std::fmt::Write as _;

use super::{infer_spine_direction, Direction, Production, SpineGrammar};
use crate::error::{Error, Result};
use crate::trees::{format_term, parse_term, RankedAlphabet, Symbol};

const HEADER: &str = "@spine-grammar";

/// Parse the line-oriented spine-grammar format.
///
/// Binary terminals declared without `:dir` get their direction from the
/// hole paths of the unary productions.
pub fn parse_spine_grammar(src: &str) -> Result<SpineGrammar> {
    let mut lines = src
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());
    match lines.next() {
        Some((_, HEADER)) => {}
        Some((n, _)) => return Err(Error::parse(n, format!("expected `{HEADER}`"))),
        None => return Err(Error::parse(1, "empty input")),
    }
    let mut start = None;
    let mut terminals = RankedAlphabet::default();
    let mut declared = Direction::new();
    let mut nt0 = BTreeSet::new();
    let mut nt1 = BTreeSet::new();
    let mut productions = Vec::new();
    for (n, line) in lines {
        let (kw, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        let names = || rest.split_whitespace().map(Symbol::new);
        match kw {
            "start" => {
                let mut it = rest.split_whitespace();
                match (it.next(), it.next()) {
                    (Some(s), None) => start = Some(Symbol::new(s)),
                    _ => return Err(Error::parse(n, "`start` takes one name")),
                }
            }
            "term0" => terminals.symbols0.extend(names()),
            "nt0" => nt0.extend(names()),
            "nt1" => nt1.extend(names()),
            "term2" => {
                for item in rest.split_whitespace() {
                    let (name, dir) = match item.split_once(':') {
                        Some((name, "1")) => (name, Some(1)),
                        Some((name, "2")) => (name, Some(2)),
                        Some(_) => {
                            return Err(Error::parse(n, format!("bad direction in `{item}`")))
                        }
                        None => (item, None),
                    };
                    terminals.symbols2.insert(Symbol::new(name));
                    if let Some(d) = dir {
                        declared.insert(Symbol::new(name), d);
                    }
                }
            }
            "prod" => {
                let (lhs, rhs) = rest
                    .split_once("->")
                    .ok_or_else(|| Error::parse(n, "expected `lhs -> rhs`"))?;
                let lhs = lhs.trim();
                if lhs.is_empty() || lhs.contains(char::is_whitespace) {
                    return Err(Error::parse(n, "bad left-hand side"));
                }
                let rhs = parse_term(rhs).map_err(|e| match e {
                    Error::Parse { msg, .. } => Error::parse(n, msg),
                    e => e,
                })?;
                productions.push(Production {
                    lhs: Symbol::new(lhs),
                    rhs,
                });
            }
            _ => return Err(Error::parse(n, format!("unknown directive `{kw}`"))),
        }
    }
    let start = start.ok_or_else(|| Error::parse(1, "missing `start`"))?;
    let mut g = SpineGrammar {
        nt0,
        nt1,
        terminals,
        start,
        productions,
        direction: Direction::new(),
    };
    let inferred = infer_spine_direction(&g).unwrap_or_default();
    g.direction = g
        .terminals
        .symbols2
        .iter()
        .map(|s| {
            let d = declared
                .get(s)
                .or_else(|| inferred.get(s))
                .copied()
                .unwrap_or(1);
            (s.clone(), d)
        })
        .collect();
    Ok(g)
}

/// Inverse of [`parse_spine_grammar`].
pub fn format_spine_grammar(g: &SpineGrammar) -> String {
    let join = |s: &BTreeSet<Symbol>| {
        s.iter()
            .map(Symbol::to_string)
            .collect::<Vec<_>>()
            .join(" ")
    };
    let mut out = String::new();
    let _ = writeln!(out, "{HEADER}");
    let _ = writeln!(out, "start {}", g.start);
    let _ = writeln!(out, "term0 {}", join(&g.terminals.symbols0));
    let dirs: Vec<String> = g
        .terminals
        .symbols2
        .iter()
        .map(|s| format!("{s}:{}", g.dir(s.as_str())))
        .collect();
    let _ = writeln!(out, "term2 {}", dirs.join(" "));
    let _ = writeln!(out, "nt0 {}", join(&g.nt0));
    let _ = writeln!(out, "nt1 {}", join(&g.nt1));
    for p in &g.productions {
        let _ = writeln!(out, "prod {} -> {}", p.lhs, format_term(&p.rhs));
    }
    out
}
