use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::cfg::{Cfg, GSym};
use super::next::{Ahead, Lookahead};
use crate::error::{Error, Result};
use crate::spine::{Direction, SpineGrammar};
use crate::trees::Symbol;

/// A symbol of a spine string: `α_n` or `σ` annotated with both children.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SpineSym {
    Leaf(Symbol, Symbol),
    Binary(Symbol, Symbol, Symbol),
}

impl SpineSym {
    /// The terminal without its annotation.
    pub fn base(&self) -> &Symbol {
        match self {
            SpineSym::Leaf(a, _) | SpineSym::Binary(a, _, _) => a,
        }
    }

    /// The nonterminal in spine direction.
    pub fn gen(&self, d: &Direction) -> &Symbol {
        match self {
            SpineSym::Leaf(_, n) => n,
            SpineSym::Binary(s, n1, n2) => match d.get(s).copied().unwrap_or(1) {
                1 => n1,
                _ => n2,
            },
        }
    }

    pub fn is_leaf(&self) -> bool {
        matches!(self, SpineSym::Leaf(..))
    }

    pub fn parse(s: &str) -> Option<SpineSym> {
        let (base, rest) = s.split_once('[')?;
        let inner = rest.strip_suffix(']')?;
        if base.is_empty() {
            return None;
        }
        match inner.split(',').collect::<Vec<_>>().as_slice() {
            [n] if !n.is_empty() => Some(SpineSym::Leaf(base.into(), (*n).into())),
            [a, b] if !a.is_empty() && !b.is_empty() => {
                Some(SpineSym::Binary(base.into(), (*a).into(), (*b).into()))
            }
            _ => None,
        }
    }
}

impl fmt::Display for SpineSym {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpineSym::Leaf(a, n) => write!(f, "{a}[{n}]"),
            SpineSym::Binary(s, a, b) => write!(f, "{s}[{a},{b}]"),
        }
    }
}

/// The CFG whose language S(G) lists every spine bottom-up with its
/// generator and the generators attached on the non-spinal side.
pub fn build_spines_cfg(g: &SpineGrammar) -> Result<Cfg<SpineSym>> {
    if !g.is_normal_form() {
        return Err(Error::Precondition(
            "spine grammar is not in normal form".into(),
        ));
    }
    let mut cfg: Cfg<SpineSym> = Cfg::new("⊤");
    let top = cfg.start;
    let mut pair: BTreeMap<(Symbol, Symbol), usize> = BTreeMap::new();
    let mut nt = |cfg: &mut Cfg<SpineSym>, n: &Symbol, gen: &Symbol| -> usize {
        *pair.entry((n.clone(), gen.clone())).or_insert_with(|| {
            let name = cfg.fresh_name(&format!("{n}_{gen}"));
            cfg.nt(&name)
        })
    };
    for p in &g.productions {
        let r = &p.rhs;
        if g.nt0.contains(&p.lhs) {
            if r.is_leaf() {
                let leaf = SpineSym::Leaf(r.label().clone(), p.lhs.clone());
                cfg.add_rule(top, vec![GSym::T(leaf)]);
            } else {
                let alpha = r.children()[0].label().clone();
                let b = nt(&mut cfg, r.label(), &p.lhs);
                cfg.add_rule(
                    top,
                    vec![GSym::T(SpineSym::Leaf(alpha, p.lhs.clone())), GSym::N(b)],
                );
            }
            continue;
        }
        // Spine generators are nullary nonterminals; other annotations are useless.
        for gen in &g.nt0 {
            let lhs = nt(&mut cfg, &p.lhs, gen);
            if r.arity() == 1 {
                let outer = r.label();
                let inner = r.children()[0].label();
                let (i, o) = (nt(&mut cfg, inner, gen), nt(&mut cfg, outer, gen));
                cfg.add_rule(lhs, vec![GSym::N(i), GSym::N(o)]);
            } else {
                let (c1, c2) = (&r.children()[0], &r.children()[1]);
                let sym = if c1.label().is_hole() {
                    SpineSym::Binary(r.label().clone(), gen.clone(), c2.label().clone())
                } else {
                    SpineSym::Binary(r.label().clone(), c1.label().clone(), gen.clone())
                };
                cfg.add_rule(lhs, vec![GSym::T(sym)]);
            }
        }
    }
    Ok(cfg.reduce())
}

/// L1: the length-one strings of Next(S(G)), one per production `n -> α`.
pub fn extract_l1(g: &SpineGrammar) -> BTreeSet<Lookahead<SpineSym>> {
    g.productions
        .iter()
        .filter(|p| g.nt0.contains(&p.lhs) && p.rhs.is_leaf())
        .map(|p| Lookahead {
            next: Ahead::End,
            cur: SpineSym::Leaf(p.rhs.label().clone(), p.lhs.clone()),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn show(ws: &BTreeSet<Vec<SpineSym>>) -> BTreeSet<String> {
        ws.iter()
            .map(|w| {
                w.iter()
                    .map(|s| s.to_string())
                    .collect::<Vec<_>>()
                    .join(" ")
            })
            .collect()
    }

    #[test]
    fn start_production_row() {
        let cfg = build_spines_cfg(&fixtures::ex41()).unwrap();
        let text = cfg.to_string();
        assert!(text.contains("prod ⊤ -> delta[s] t_s\n"), "{text}");
        assert!(text.contains("prod a_s -> alpha2[abar,s]\n"));
        assert!(text.contains("prod t_s -> b'_s a_s\n"));
    }

    #[test]
    fn gmin_spines() {
        let cfg = build_spines_cfg(&fixtures::gmin()).unwrap();
        let got = show(&cfg.enumerate(4));
        let want: BTreeSet<String> = ["alpha[s] sigma[u,s]", "beta[u]"].map(String::from).into();
        assert_eq!(got, want);
    }

    #[test]
    fn l1_of_examples() {
        let shown: Vec<String> = extract_l1(&fixtures::ex41())
            .iter()
            .map(|l| l.to_string())
            .collect();
        assert_eq!(
            shown,
            [
                "(<|,alpha[abar])",
                "(<|,beta[bbar])",
                "(<|,beta[ebar])",
                "(<|,gamma[cbar])"
            ]
        );
        let g: Vec<String> = extract_l1(&fixtures::gmin())
            .iter()
            .map(|l| l.to_string())
            .collect();
        assert_eq!(g, ["(<|,beta[u])"]);
    }

    #[test]
    fn not_normal_form_is_rejected() {
        let mut g = fixtures::gmin();
        g.productions[0].rhs = crate::trees::parse_term("b(u)").unwrap();
        assert!(build_spines_cfg(&g).is_err());
    }

    #[test]
    fn parse_display_round_trip() {
        for s in ["alpha[abar]", "alpha2[abar,s]"] {
            assert_eq!(SpineSym::parse(s).unwrap().to_string(), s);
        }
        assert!(SpineSym::parse("alpha").is_none());
        assert!(SpineSym::parse("a[b,c,d]").is_none());
    }
}
