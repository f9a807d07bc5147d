use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::strings::{is_quadratic_gnf, Cfg, GSym, Terminal};

/// Stack symbol id of ⊥ in every [`Pda`].
pub const BOTTOM: usize = 0;

/// `(from, input, pop, push, to)`; `pop` may be ⊥, `push` may not.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PdaMove<T> {
    pub from: usize,
    pub input: T,
    pub pop: Option<usize>,
    pub push: Option<usize>,
    pub to: usize,
}

/// An ε-free push-down automaton. Stack symbol [`BOTTOM`] is ⊥.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pda<T> {
    pub states: Vec<String>,
    pub stack: Vec<String>,
    pub delta: Vec<PdaMove<T>>,
    pub initial: BTreeSet<usize>,
    pub finals: BTreeSet<usize>,
}

impl<T: Terminal> Pda<T> {
    /// Transitions that violate the shape of a PDA move.
    pub fn malformed(&self) -> Vec<&PdaMove<T>> {
        self.delta
            .iter()
            .filter(|m| (m.pop.is_some() && m.push.is_some()) || m.push == Some(BOTTOM))
            .collect()
    }

    fn moves_from(&self) -> Vec<Vec<&PdaMove<T>>> {
        let mut out = vec![Vec::new(); self.states.len()];
        for m in &self.delta {
            out[m.from].push(m);
        }
        out
    }

    pub fn accepts(&self, w: &[T]) -> bool {
        if w.is_empty() {
            return false;
        }
        let from = self.moves_from();
        self.initial
            .iter()
            .any(|&q| accept_from(self, &from, q, w, &mut vec![BOTTOM]))
    }

    /// Every accepted string of length at most `max_len`.
    pub fn enumerate(&self, max_len: usize) -> BTreeSet<Vec<T>> {
        let from = self.moves_from();
        let mut out = BTreeSet::new();
        let mut word = Vec::new();
        for &q in &self.initial {
            collect(
                self,
                &from,
                q,
                &mut vec![BOTTOM],
                &mut word,
                max_len,
                &mut out,
            );
        }
        out
    }
}

fn step(stack: &mut Vec<usize>, m: &PdaMove<impl Terminal>) -> Option<Option<usize>> {
    if stack.is_empty() {
        return None;
    }
    match m.pop {
        Some(g) if stack.last() != Some(&g) => None,
        Some(_) => Some(stack.pop()),
        None => {
            if let Some(g) = m.push {
                stack.push(g);
            }
            Some(None)
        }
    }
}

fn undo(stack: &mut Vec<usize>, m: &PdaMove<impl Terminal>, popped: Option<usize>) {
    match popped {
        Some(g) => stack.push(g),
        None => {
            if m.push.is_some() {
                stack.pop();
            }
        }
    }
}

fn accept_from<T: Terminal>(
    a: &Pda<T>,
    from: &[Vec<&PdaMove<T>>],
    q: usize,
    w: &[T],
    stack: &mut Vec<usize>,
) -> bool {
    let Some((x, rest)) = w.split_first() else {
        return stack.is_empty() && a.finals.contains(&q);
    };
    // Every stack symbol needs its own pop.
    if stack.len() > w.len() {
        return false;
    }
    for m in &from[q] {
        if &m.input != x {
            continue;
        }
        let Some(popped) = step(stack, m) else {
            continue;
        };
        let ok = accept_from(a, from, m.to, rest, stack);
        undo(stack, m, popped);
        if ok {
            return true;
        }
    }
    false
}

fn collect<T: Terminal>(
    a: &Pda<T>,
    from: &[Vec<&PdaMove<T>>],
    q: usize,
    stack: &mut Vec<usize>,
    word: &mut Vec<T>,
    max_len: usize,
    out: &mut BTreeSet<Vec<T>>,
) {
    if stack.is_empty() {
        if a.finals.contains(&q) && !word.is_empty() {
            out.insert(word.clone());
        }
        return;
    }
    if stack.len() > max_len - word.len() {
        return;
    }
    for m in &from[q] {
        let Some(popped) = step(stack, m) else {
            continue;
        };
        word.push(m.input.clone());
        collect(a, from, m.to, stack, word, max_len, out);
        word.pop();
        undo(stack, m, popped);
    }
}

/// `pda_accepts(a, w)`.
pub fn pda_accepts<T: Terminal>(a: &Pda<T>, w: &[T]) -> bool {
    a.accepts(w)
}

/// `pda_enumerate(a, k)`.
pub fn pda_enumerate<T: Terminal>(a: &Pda<T>, max_len: usize) -> BTreeSet<Vec<T>> {
    a.enumerate(max_len)
}

/// The held-top construction: the state names the nonterminal still to be
/// expanded and the stack holds the pending right siblings.
pub fn cfg_to_pda<T: Terminal>(g: &Cfg<T>) -> Result<Pda<T>> {
    if !is_quadratic_gnf(g) {
        let bad = g
            .rules
            .iter()
            .find(|r| !is_quadratic_gnf(&single(g, r)))
            .map(|r| display_rule(g, r))
            .unwrap_or_default();
        return Err(Error::NotGnf(bad));
    }
    let n = g.nonterminal_count();
    let iota = n;
    let phi = n + 1;
    let mut states: Vec<String> = (0..n).map(|i| g.name(i).to_string()).collect();
    states.push("ι".into());
    states.push("φ".into());
    let mut stack = vec!["⊥".to_string()];
    stack.extend((0..n).map(|i| g.name(i).to_string()));
    let sym = |x: usize| x + 1;
    let mut delta = BTreeSet::new();
    let mut add = |from, input: &T, pop, push, to| {
        delta.insert(PdaMove {
            from,
            input: input.clone(),
            pop,
            push,
            to,
        });
    };
    for r in &g.rules {
        let GSym::T(a) = &r.body[0] else {
            unreachable!("checked GNF")
        };
        let nts: Vec<usize> = r.body[1..]
            .iter()
            .map(|s| match s {
                GSym::N(x) => *x,
                GSym::T(_) => unreachable!("checked GNF"),
            })
            .collect();
        let mut sources = vec![r.lhs];
        if r.lhs == g.start {
            sources.push(iota);
        }
        for from in sources {
            match nts.as_slice() {
                [] if from == iota => add(from, a, Some(BOTTOM), None, phi),
                [] => {
                    for c in 0..n {
                        add(from, a, Some(sym(c)), None, c);
                    }
                    add(from, a, Some(BOTTOM), None, phi);
                }
                [b] => add(from, a, None, None, *b),
                [b, c] => add(from, a, None, Some(sym(*c)), *b),
                _ => unreachable!("checked GNF"),
            }
        }
    }
    Ok(Pda {
        states,
        stack,
        delta: delta.into_iter().collect(),
        initial: BTreeSet::from([iota]),
        finals: BTreeSet::from([phi]),
    })
}

fn single<T: Terminal>(g: &Cfg<T>, r: &crate::strings::Rule<T>) -> Cfg<T> {
    let mut h = g.clone();
    h.rules = vec![r.clone()];
    h
}

fn display_rule<T: Terminal>(g: &Cfg<T>, r: &crate::strings::Rule<T>) -> String {
    let body: Vec<String> = r
        .body
        .iter()
        .map(|s| match s {
            GSym::T(t) => t.to_string(),
            GSym::N(n) => g.name(*n).to_string(),
        })
        .collect();
    format!("{} -> {}", g.name(r.lhs), body.join(" "))
}

impl<T: Terminal> fmt::Display for Pda<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = |s: &BTreeSet<usize>| {
            s.iter()
                .map(|&q| self.states[q].as_str())
                .collect::<Vec<_>>()
                .join(" ")
        };
        writeln!(f, "I {}", names(&self.initial))?;
        writeln!(f, "F {}", names(&self.finals))?;
        for m in &self.delta {
            let pop = m.pop.map_or("eps", |g| self.stack[g].as_str());
            let push = m.push.map_or("eps", |g| self.stack[g].as_str());
            writeln!(
                f,
                "{} , {} , {} , {} -> {}",
                self.states[m.from], m.input, pop, push, self.states[m.to]
            )?;
        }
        Ok(())
    }
}

/// Transitions whose presence breaks the preconditions of the Moore
/// conversion, described for error messages.
pub(crate) fn precondition_violations<T: Terminal>(a: &Pda<T>) -> Vec<String> {
    let mut bad: BTreeSet<String> = BTreeSet::new();
    let show = |m: &PdaMove<T>| format!("{} --{}--> {}", a.states[m.from], m.input, a.states[m.to]);
    for m in &a.delta {
        if a.initial.contains(&m.to) {
            bad.insert(format!("{} enters an initial state", show(m)));
        }
        if a.finals.contains(&m.from) {
            bad.insert(format!("{} leaves a final state", show(m)));
        }
        if a.finals.contains(&m.to) && m.pop != Some(BOTTOM) {
            bad.insert(format!(
                "{} enters a final state without popping ⊥",
                show(m)
            ));
        }
    }
    for m in a.malformed() {
        bad.insert(format!("{} both pops and pushes", show(m)));
    }
    bad.into_iter().collect()
}
