use std::collections::{BTreeMap, BTreeSet, HashMap};

use super::mpda::{Move, Mpda, Op, PopMap};
use super::pda::{precondition_violations, Pda, BOTTOM};
use crate::error::{Error, Result};
use crate::strings::Terminal;

/// `⟨q, a, stored, flag⟩`: PDA state, last input read, the symbol pushed
/// by the first move while it still sits above ⊥, and whether the MPDA
/// stack holds only its marked bottom symbol.
type Key<T> = (usize, T, Option<usize>, bool);

/// The Mealy-to-Moore conversion: the input of each PDA move becomes the
/// output of its target state and the first move is folded into the
/// initial states. Only states reachable from the initial ones are built.
pub fn pda_to_mpda<T: Terminal>(a: &Pda<T>) -> Result<Mpda<T>> {
    let bad = precondition_violations(a);
    if !bad.is_empty() {
        return Err(Error::Precondition(bad.join("; ")));
    }
    let mut from: Vec<Vec<usize>> = vec![Vec::new(); a.states.len()];
    for (i, m) in a.delta.iter().enumerate() {
        from[m.from].push(i);
    }
    let mut ids: HashMap<Key<T>, usize> = HashMap::new();
    let mut keys: Vec<Key<T>> = Vec::new();
    let mut stack_ids: BTreeMap<(usize, bool), usize> = BTreeMap::new();
    let mut stack_names: Vec<String> = Vec::new();
    let mut delta: BTreeSet<Move> = BTreeSet::new();
    let mut initial = BTreeSet::new();
    let mut state = |k: Key<T>, keys: &mut Vec<Key<T>>| -> usize {
        *ids.entry(k.clone()).or_insert_with(|| {
            keys.push(k);
            keys.len() - 1
        })
    };
    let mut sym = |g: usize, b: bool| -> usize {
        *stack_ids.entry((g, b)).or_insert_with(|| {
            stack_names.push(format!("({},{})", a.stack[g], u8::from(b)));
            stack_names.len() - 1
        })
    };
    for &q in &a.initial {
        for &i in &from[q] {
            let m = &a.delta[i];
            initial.insert(state((m.to, m.input.clone(), m.push, true), &mut keys));
        }
    }
    // The marked bottom every run of the PDA starts from.
    sym(BOTTOM, true);
    let mut next = 0;
    while next < keys.len() {
        let (q, _, stored, b) = keys[next].clone();
        let src = next;
        next += 1;
        for &i in &from[q] {
            let m = &a.delta[i];
            let a2 = m.input.clone();
            match (m.pop, m.push) {
                (None, None) => {
                    let to = state((m.to, a2, stored, b), &mut keys);
                    delta.insert(Move {
                        from: src,
                        op: Op::Skip,
                        to,
                    });
                }
                (None, Some(g)) => {
                    let to = state((m.to, a2, stored, false), &mut keys);
                    delta.insert(Move {
                        from: src,
                        op: Op::Push(sym(g, b)),
                        to,
                    });
                }
                (Some(g), None) if !b => {
                    for b2 in [false, true] {
                        let to = state((m.to, a2.clone(), stored, b2), &mut keys);
                        delta.insert(Move {
                            from: src,
                            op: Op::Pop(sym(g, b2)),
                            to,
                        });
                    }
                }
                (Some(g), None) => match stored {
                    Some(s) if s == g => {
                        let to = state((m.to, a2, None, true), &mut keys);
                        delta.insert(Move {
                            from: src,
                            op: Op::Skip,
                            to,
                        });
                    }
                    Some(_) => {}
                    None => {
                        let to = state((m.to, a2, None, true), &mut keys);
                        delta.insert(Move {
                            from: src,
                            op: Op::Pop(sym(g, true)),
                            to,
                        });
                    }
                },
                (Some(_), Some(_)) => unreachable!("checked preconditions"),
            }
        }
    }
    let finals = keys
        .iter()
        .enumerate()
        .filter(|(_, (q, _, stored, b))| a.finals.contains(q) && stored.is_none() && *b)
        .map(|(i, _)| i)
        .collect();
    let states = keys
        .iter()
        .map(|(q, x, stored, b)| {
            let s = stored.map_or("eps", |g| a.stack[g].as_str());
            format!("<{}|{}|{}|{}>", a.states[*q], x, s, u8::from(*b))
        })
        .collect();
    Ok(Mpda {
        states,
        output: keys.into_iter().map(|(_, x, _, _)| x).collect(),
        stack: stack_names,
        delta: delta.into_iter().collect(),
        initial,
        finals,
    })
}

/// Pair every stack symbol with the state its pop enters; pushes guess
/// that state among the targets of pops of the pushed symbol. The result
/// is trimmed.
pub fn pop_normalize<T: Terminal>(a: &Mpda<T>) -> (Mpda<T>, PopMap) {
    let mut returns: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
    for m in &a.delta {
        if let Op::Pop(g) = m.op {
            returns.entry(g).or_default().insert(m.to);
        }
    }
    let mut ids: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for (&g, qs) in &returns {
        for &q in qs {
            let n = ids.len();
            ids.insert((g, q), n);
        }
    }
    let mut stack = vec![String::new(); ids.len()];
    let mut ret = BTreeMap::new();
    for (&(g, q), &i) in &ids {
        stack[i] = format!("[{},{}]", a.stack[g], a.states[q]);
        ret.insert(i, q);
    }
    let mut delta = Vec::new();
    for m in &a.delta {
        match m.op {
            Op::Skip => delta.push(*m),
            Op::Pop(g) => delta.push(Move {
                op: Op::Pop(ids[&(g, m.to)]),
                ..*m
            }),
            Op::Push(g) => {
                for &r in returns.get(&g).into_iter().flatten() {
                    delta.push(Move {
                        op: Op::Push(ids[&(g, r)]),
                        ..*m
                    });
                }
            }
        }
    }
    let full = Mpda {
        states: a.states.clone(),
        output: a.output.clone(),
        stack,
        delta,
        initial: a.initial.clone(),
        finals: a.finals.clone(),
    };
    let trimmed = full.trim();
    // Trimming keeps stack symbols in order, so their returns follow along.
    let kept: Vec<usize> = {
        let names: BTreeMap<&str, usize> = full
            .stack
            .iter()
            .enumerate()
            .map(|(i, s)| (s.as_str(), i))
            .collect();
        trimmed.stack.iter().map(|s| names[s.as_str()]).collect()
    };
    let state_of: BTreeMap<&str, usize> = trimmed
        .states
        .iter()
        .enumerate()
        .map(|(i, s)| (s.as_str(), i))
        .collect();
    let map = kept
        .iter()
        .enumerate()
        .filter_map(|(i, g)| state_of.get(full.states[ret[g]].as_str()).map(|&q| (i, q)))
        .collect();
    (trimmed, PopMap(map))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pushdown::cfg_to_pda;
    use crate::strings::{parse_cfg, to_quadratic_gnf};
    use crate::trees::Symbol;

    fn anbn() -> Pda<Symbol> {
        let g = parse_cfg("@cfg\nstart S\nprod S -> a B\nprod S -> a S B\nprod B -> b\n").unwrap();
        cfg_to_pda(&g).unwrap()
    }

    fn at_least_two(ws: BTreeSet<Vec<Symbol>>) -> BTreeSet<Vec<Symbol>> {
        ws.into_iter().filter(|w| w.len() >= 2).collect()
    }

    #[test]
    fn moore_conversion_preserves_long_strings() {
        let p = anbn();
        let m = pda_to_mpda(&p).unwrap();
        for k in 2..=8 {
            assert_eq!(m.enumerate(k), at_least_two(p.enumerate(k)), "k = {k}");
        }
    }

    #[test]
    fn marked_bottom_is_popped_last() {
        // Pops from states below the marked bottom also name it; no run uses them.
        let m = pda_to_mpda(&anbn()).unwrap().trim();
        let bottom = m.stack.iter().position(|s| s == "(⊥,1)").unwrap();
        // The marked bottom is popped only once the stored symbol is gone.
        for t in &m.delta {
            if t.op == Op::Pop(bottom) {
                assert!(
                    m.states[t.from].ends_with("|eps|1>"),
                    "{}",
                    m.states[t.from]
                );
            }
        }
        let w: Vec<Symbol> = "aabb"
            .chars()
            .map(|c| Symbol::new(&c.to_string()))
            .collect();
        assert!(m.accepts(&w));
    }

    #[test]
    fn length_one_is_never_accepted() {
        let g = parse_cfg("@cfg\nstart S\nprod S -> a\nprod S -> a B\nprod B -> b\n").unwrap();
        let m = pda_to_mpda(&cfg_to_pda(&g).unwrap()).unwrap();
        assert_eq!(
            m.enumerate(4)
                .into_iter()
                .map(|w| w.len())
                .collect::<Vec<_>>(),
            vec![2]
        );
    }

    #[test]
    fn precondition_violation_is_an_error() {
        let mut p = anbn();
        let i = *p.initial.iter().next().unwrap();
        p.delta[0].to = i;
        assert!(matches!(pda_to_mpda(&p), Err(Error::Precondition(_))));
    }

    #[test]
    fn pop_normalization_keeps_language() {
        let g = parse_cfg(
            "@cfg\nstart S\nprod S -> S S\nprod S -> a S b\nprod S -> a b\nprod S -> c\n",
        )
        .unwrap();
        let m = pda_to_mpda(&cfg_to_pda(&to_quadratic_gnf(&g).unwrap()).unwrap()).unwrap();
        let (n, ret) = pop_normalize(&m);
        assert!(n.is_pop_normalized());
        for t in &n.delta {
            if let Op::Pop(g) = t.op {
                assert_eq!(ret.get(g), Some(t.to));
            }
        }
        assert_eq!(n.enumerate(6), m.enumerate(6));
        assert_eq!(n.enumerate(6), at_least_two(g.enumerate(6)));
    }
}
