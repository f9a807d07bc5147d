use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;

use crate::strings::Terminal;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Op {
    Skip,
    Push(usize),
    Pop(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Move {
    pub from: usize,
    pub op: Op,
    pub to: usize,
}

/// A Moore push-down automaton: every state outputs one symbol.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mpda<T> {
    pub states: Vec<String>,
    pub output: Vec<T>,
    pub stack: Vec<String>,
    pub delta: Vec<Move>,
    pub initial: BTreeSet<usize>,
    pub finals: BTreeSet<usize>,
}

/// `return`: the unique state entered when a stack symbol is popped.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PopMap(pub BTreeMap<usize, usize>);

impl PopMap {
    pub fn get(&self, g: usize) -> Option<usize> {
        self.0.get(&g).copied()
    }
}

/// Two pops of the same stack symbol that land in different states.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReturnConflict {
    pub symbol: usize,
    pub states: (usize, usize),
}

/// `Sum(p, γ, q)`: from `⟨p, γα⟩` the machine can reach `⟨q, α⟩`, popping
/// `γ` in the last move and leaving `α` untouched.
pub type Summary = (usize, usize, usize);

impl<T: Terminal> Mpda<T> {
    /// The return map, or the first stack symbol popped into two states.
    pub fn return_map(&self) -> Result<PopMap, ReturnConflict> {
        let mut map = BTreeMap::new();
        for m in &self.delta {
            if let Op::Pop(g) = m.op {
                match map.insert(g, m.to) {
                    Some(q) if q != m.to => {
                        return Err(ReturnConflict {
                            symbol: g,
                            states: (q, m.to),
                        })
                    }
                    _ => {}
                }
            }
        }
        Ok(PopMap(map))
    }

    pub fn is_pop_normalized(&self) -> bool {
        self.return_map().is_ok()
    }

    fn moves_from(&self) -> Vec<Vec<Move>> {
        let mut out = vec![Vec::new(); self.states.len()];
        for m in &self.delta {
            out[m.from].push(*m);
        }
        out
    }

    /// Outputs of all accepting runs with at most `max_len` configurations.
    pub fn enumerate(&self, max_len: usize) -> BTreeSet<Vec<T>> {
        let from = self.moves_from();
        let mut out = BTreeSet::new();
        let mut word = Vec::new();
        for &q in &self.initial {
            for g in 0..self.stack.len() {
                word.push(self.output[q].clone());
                self.collect(&from, q, &mut vec![g], &mut word, max_len, &mut out);
                word.pop();
            }
        }
        out
    }

    fn collect(
        &self,
        from: &[Vec<Move>],
        q: usize,
        stack: &mut Vec<usize>,
        word: &mut Vec<T>,
        max_len: usize,
        out: &mut BTreeSet<Vec<T>>,
    ) {
        if stack.is_empty() {
            if self.finals.contains(&q) {
                out.insert(word.clone());
            }
            return;
        }
        if word.len() + stack.len() > max_len {
            return;
        }
        for m in &from[q] {
            match m.op {
                Op::Skip => {}
                Op::Push(g) => stack.push(g),
                Op::Pop(g) => {
                    if stack.last() != Some(&g) {
                        continue;
                    }
                    stack.pop();
                }
            }
            word.push(self.output[m.to].clone());
            self.collect(from, m.to, stack, word, max_len, out);
            word.pop();
            match m.op {
                Op::Skip => {}
                Op::Push(_) => {
                    stack.pop();
                }
                Op::Pop(g) => stack.push(g),
            }
        }
    }

    /// Whether some accepting run outputs `w`.
    pub fn accepts(&self, w: &[T]) -> bool {
        if w.len() < 2 {
            return false;
        }
        let from = self.moves_from();
        let mut seen = HashSet::new();
        self.initial.iter().any(|&q| {
            self.output[q] == w[0]
                && (0..self.stack.len())
                    .any(|g| self.accept_from(&from, q, &mut vec![g], &w[1..], &mut seen))
        })
    }

    fn accept_from(
        &self,
        from: &[Vec<Move>],
        q: usize,
        stack: &mut Vec<usize>,
        rest: &[T],
        dead: &mut HashSet<(usize, Vec<usize>, usize)>,
    ) -> bool {
        if stack.is_empty() {
            return rest.is_empty() && self.finals.contains(&q);
        }
        if stack.len() > rest.len() || dead.contains(&(q, stack.clone(), rest.len())) {
            return false;
        }
        for m in &from[q] {
            if self.output[m.to] != rest[0] {
                continue;
            }
            let ok = match m.op {
                Op::Skip => self.accept_from(from, m.to, stack, &rest[1..], dead),
                Op::Push(g) => {
                    stack.push(g);
                    let ok = self.accept_from(from, m.to, stack, &rest[1..], dead);
                    stack.pop();
                    ok
                }
                Op::Pop(g) if stack.last() == Some(&g) => {
                    stack.pop();
                    let ok = self.accept_from(from, m.to, stack, &rest[1..], dead);
                    stack.push(g);
                    ok
                }
                Op::Pop(_) => false,
            };
            if ok {
                return true;
            }
        }
        dead.insert((q, stack.clone(), rest.len()));
        false
    }

    /// All summaries, by saturation.
    pub fn summaries(&self) -> HashSet<Summary> {
        Saturation::new(self).run().sums
    }

    /// Pairs `(q, γ)` with `q` initial from which an accepting run starts,
    /// each with the final states it can end in.
    pub fn heads(&self) -> BTreeMap<(usize, usize), BTreeSet<usize>> {
        let sums = self.summaries();
        let mut out: BTreeMap<(usize, usize), BTreeSet<usize>> = BTreeMap::new();
        for &(p, g, q) in &sums {
            if self.initial.contains(&p) && self.finals.contains(&q) {
                out.entry((p, g)).or_default().insert(q);
            }
        }
        out
    }

    /// Keep only the transitions used by some accepting run and renumber
    /// states and stack symbols in their original order.
    pub fn trim(&self) -> Mpda<T> {
        let sat = Saturation::new(self).run();
        let mut need: HashSet<Summary> = HashSet::new();
        let mut queue: Vec<Summary> = Vec::new();
        let mut starts = BTreeSet::new();
        let mut ends = BTreeSet::new();
        for &(p, g, q) in &sat.sums {
            if self.initial.contains(&p) && self.finals.contains(&q) {
                starts.insert(p);
                ends.insert(q);
                if need.insert((p, g, q)) {
                    queue.push((p, g, q));
                }
            }
        }
        let from = self.moves_from();
        let mut used: HashSet<Move> = HashSet::new();
        let demand = |s: Summary, need: &mut HashSet<Summary>, queue: &mut Vec<Summary>| {
            if need.insert(s) {
                queue.push(s);
            }
        };
        while let Some((p, g, q)) = queue.pop() {
            for m in &from[p] {
                match m.op {
                    Op::Pop(h) => {
                        if h == g && m.to == q {
                            used.insert(*m);
                        }
                    }
                    Op::Skip => {
                        if sat.sums.contains(&(m.to, g, q)) {
                            used.insert(*m);
                            demand((m.to, g, q), &mut need, &mut queue);
                        }
                    }
                    Op::Push(h) => {
                        for &r in sat.targets.get(&(m.to, h)).into_iter().flatten() {
                            if sat.sums.contains(&(r, g, q)) {
                                used.insert(*m);
                                demand((m.to, h, r), &mut need, &mut queue);
                                demand((r, g, q), &mut need, &mut queue);
                            }
                        }
                    }
                }
            }
        }
        let mut keep_q: BTreeSet<usize> = starts.iter().chain(ends.iter()).copied().collect();
        let mut keep_g: BTreeSet<usize> = need.iter().map(|&(_, g, _)| g).collect();
        for m in &used {
            keep_q.insert(m.from);
            keep_q.insert(m.to);
            if let Op::Push(g) | Op::Pop(g) = m.op {
                keep_g.insert(g);
            }
        }
        let qmap: BTreeMap<usize, usize> =
            keep_q.iter().enumerate().map(|(i, &q)| (q, i)).collect();
        let gmap: BTreeMap<usize, usize> =
            keep_g.iter().enumerate().map(|(i, &g)| (g, i)).collect();
        let mut delta: Vec<Move> = used
            .into_iter()
            .map(|m| Move {
                from: qmap[&m.from],
                op: match m.op {
                    Op::Skip => Op::Skip,
                    Op::Push(g) => Op::Push(gmap[&g]),
                    Op::Pop(g) => Op::Pop(gmap[&g]),
                },
                to: qmap[&m.to],
            })
            .collect();
        delta.sort();
        Mpda {
            states: keep_q.iter().map(|&q| self.states[q].clone()).collect(),
            output: keep_q.iter().map(|&q| self.output[q].clone()).collect(),
            stack: keep_g.iter().map(|&g| self.stack[g].clone()).collect(),
            delta,
            initial: starts.iter().map(|q| qmap[q]).collect(),
            finals: ends.iter().map(|q| qmap[q]).collect(),
        }
    }

    /// Replace names by `q0, q1, …` and `g0, g1, …`.
    pub fn renamed(&self) -> Mpda<T> {
        let mut out = self.clone();
        out.states = (0..self.states.len()).map(|i| format!("q{i}")).collect();
        out.stack = (0..self.stack.len()).map(|i| format!("g{i}")).collect();
        out
    }

    /// Graphviz rendering; push edges are labelled `↓γ`, pops `↑γ`.
    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph mpda {\n  rankdir=LR;\n");
        for (i, name) in self.states.iter().enumerate() {
            let shape = if self.finals.contains(&i) {
                "doublecircle"
            } else {
                "circle"
            };
            s.push_str(&format!(
                "  {i} [shape={shape}, label=\"{}\\n{}\"];\n",
                escape(name),
                escape(&self.output[i].to_string())
            ));
            if self.initial.contains(&i) {
                s.push_str(&format!("  start{i} [shape=point];\n  start{i} -> {i};\n"));
            }
        }
        for m in &self.delta {
            let label = match m.op {
                Op::Skip => String::new(),
                Op::Push(g) => format!("↓{}", escape(&self.stack[g])),
                Op::Pop(g) => format!("↑{}", escape(&self.stack[g])),
            };
            s.push_str(&format!("  {} -> {} [label=\"{label}\"];\n", m.from, m.to));
        }
        s.push_str("}\n");
        s
    }

    pub fn sizes(&self) -> MpdaSizes {
        let count = |f: fn(&Op) -> bool| self.delta.iter().filter(|m| f(&m.op)).count();
        MpdaSizes {
            states: self.states.len(),
            stack_symbols: self.stack.len(),
            skips: count(|o| matches!(o, Op::Skip)),
            pushes: count(|o| matches!(o, Op::Push(_))),
            pops: count(|o| matches!(o, Op::Pop(_))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub struct MpdaSizes {
    pub states: usize,
    pub stack_symbols: usize,
    pub skips: usize,
    pub pushes: usize,
    pub pops: usize,
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

impl<T: Terminal> fmt::Display for Mpda<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = |s: &BTreeSet<usize>| {
            s.iter()
                .map(|&q| self.states[q].as_str())
                .collect::<Vec<_>>()
                .join(" ")
        };
        writeln!(f, "I {}", names(&self.initial))?;
        writeln!(f, "F {}", names(&self.finals))?;
        for (q, out) in self.output.iter().enumerate() {
            writeln!(f, "tau {} {}", self.states[q], out)?;
        }
        for m in &self.delta {
            let op = match m.op {
                Op::Skip => "skip".to_string(),
                Op::Push(g) => format!("push {}", self.stack[g]),
                Op::Pop(g) => format!("pop {}", self.stack[g]),
            };
            writeln!(f, "{} , {op} -> {}", self.states[m.from], self.states[m.to])?;
        }
        Ok(())
    }
}

/// Worklist saturation of the summary relation.
struct Saturation<'a, T> {
    a: &'a Mpda<T>,
    sums: HashSet<Summary>,
    /// `(p, γ) ↦ q` for every summary.
    targets: HashMap<(usize, usize), Vec<usize>>,
    /// `r ↦ (γ, q)` for every summary starting in `r`.
    by_start: HashMap<usize, Vec<(usize, usize)>>,
    /// `Comp(p, r)`: a push from `p` whose pushed symbol is popped into `r`.
    comps: HashSet<(usize, usize)>,
    comp_into: HashMap<usize, Vec<usize>>,
}

impl<'a, T: Terminal> Saturation<'a, T> {
    fn new(a: &'a Mpda<T>) -> Self {
        Saturation {
            a,
            sums: HashSet::new(),
            targets: HashMap::new(),
            by_start: HashMap::new(),
            comps: HashSet::new(),
            comp_into: HashMap::new(),
        }
    }

    fn run(mut self) -> Self {
        let n = self.a.states.len();
        let mut skips_into: Vec<Vec<usize>> = vec![Vec::new(); n];
        let mut pushes_into: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
        let mut agenda: Vec<Summary> = Vec::new();
        for m in &self.a.delta {
            match m.op {
                Op::Skip => skips_into[m.to].push(m.from),
                Op::Push(g) => pushes_into.entry((m.to, g)).or_default().push(m.from),
                Op::Pop(g) => agenda.push((m.from, g, m.to)),
            }
        }
        let mut comp_agenda: Vec<(usize, usize)> = Vec::new();
        loop {
            if let Some((p, r)) = comp_agenda.pop() {
                let cont: Vec<(usize, usize)> = self.by_start.get(&r).cloned().unwrap_or_default();
                for (g, q) in cont {
                    agenda.push((p, g, q));
                }
                continue;
            }
            let Some(s) = agenda.pop() else { break };
            if !self.sums.insert(s) {
                continue;
            }
            let (p, g, q) = s;
            self.targets.entry((p, g)).or_default().push(q);
            self.by_start.entry(p).or_default().push((g, q));
            for &o in &skips_into[p] {
                agenda.push((o, g, q));
            }
            // As the inner part of a push.
            for &o in pushes_into.get(&(p, g)).into_iter().flatten() {
                if self.comps.insert((o, q)) {
                    self.comp_into.entry(q).or_default().push(o);
                    comp_agenda.push((o, q));
                }
            }
            // As the continuation after a completed push.
            for &o in self.comp_into.get(&p).into_iter().flatten() {
                agenda.push((o, g, q));
            }
        }
        self
    }
}

/// `mpda_enumerate(a, k)`.
pub fn mpda_enumerate<T: Terminal>(a: &Mpda<T>, max_len: usize) -> BTreeSet<Vec<T>> {
    a.enumerate(max_len)
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    /// q0 pops its start symbol into q1; τ = a, b.
    pub fn two_state() -> Mpda<char> {
        Mpda {
            states: vec!["q0".into(), "q1".into()],
            output: vec!['a', 'b'],
            stack: vec!["g".into()],
            delta: vec![Move {
                from: 0,
                op: Op::Pop(0),
                to: 1,
            }],
            initial: BTreeSet::from([0]),
            finals: BTreeSet::from([1]),
        }
    }

    /// a^n b^n for n ≥ 1 with a pushed counter.
    pub fn counter() -> Mpda<char> {
        // q0 -a-> push; qa loops pushing; then pops into qb.
        Mpda {
            states: vec!["q0".into(), "qa".into(), "qb".into(), "x".into()],
            output: vec!['a', 'a', 'b', 'b'],
            stack: vec!["z".into(), "u".into()],
            delta: vec![
                Move {
                    from: 0,
                    op: Op::Pop(0),
                    to: 2,
                },
                Move {
                    from: 0,
                    op: Op::Push(1),
                    to: 1,
                },
                Move {
                    from: 1,
                    op: Op::Push(1),
                    to: 1,
                },
                Move {
                    from: 1,
                    op: Op::Pop(1),
                    to: 2,
                },
                Move {
                    from: 2,
                    op: Op::Pop(1),
                    to: 2,
                },
                Move {
                    from: 2,
                    op: Op::Pop(0),
                    to: 3,
                },
                Move {
                    from: 3,
                    op: Op::Skip,
                    to: 3,
                },
            ],
            initial: BTreeSet::from([0]),
            finals: BTreeSet::from([2, 3]),
        }
    }

    fn words(ws: &[&str]) -> BTreeSet<Vec<char>> {
        ws.iter().map(|w| w.chars().collect()).collect()
    }

    #[test]
    fn two_state_outputs_ab() {
        let a = two_state();
        assert_eq!(mpda_enumerate(&a, 5), words(&["ab"]));
        assert!(a.accepts(&['a', 'b']));
        assert!(!a.accepts(&['a']));
        assert_eq!(a.return_map().unwrap().get(0), Some(1));
    }

    #[test]
    fn counter_language() {
        let a = counter();
        assert_eq!(a.enumerate(6), words(&["ab", "aabb", "aaabbb"]));
        for w in ["ab", "aabb"] {
            assert!(a.accepts(&w.chars().collect::<Vec<_>>()));
        }
        assert!(!a.accepts(&"aab".chars().collect::<Vec<_>>()));
    }

    #[test]
    fn trim_drops_dead_parts() {
        let a = counter();
        let t = a.trim();
        assert_eq!(t.states.len(), 4);
        assert_eq!(t.enumerate(8), a.enumerate(8));
        assert!(!t.delta.iter().any(|m| m.op == Op::Skip));
    }

    #[test]
    fn heads_of_counter() {
        let h = counter().heads();
        assert_eq!(h.keys().copied().collect::<Vec<_>>(), vec![(0, 0), (0, 1)]);
        assert_eq!(h[&(0, 0)], BTreeSet::from([2, 3]));
        assert_eq!(h[&(0, 1)], BTreeSet::from([2]));
    }

    #[test]
    fn return_conflict_is_reported() {
        let a = counter();
        let err = a.return_map().unwrap_err();
        assert_eq!(err.symbol, 0);
    }

    #[test]
    fn dump_and_dot() {
        let a = two_state();
        assert_eq!(
            a.to_string(),
            "I q0\nF q1\ntau q0 a\ntau q1 b\nq0 , pop g -> q1\n"
        );
        assert!(a.to_dot().contains("label=\"↑g\""));
    }
}
