//! End-to-end orchestration: the bounded strong-equivalence checker.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::build::{build_from_machine, normalize, BuiltCcg};
use crate::ccg::{enumerate_relabeled, Category};
use crate::error::{Error, Result};
use crate::pushdown::{mpda_for_next, MpdaSizes, NextMachine};
use crate::reassembly::{assemble_f, project, slice_by_generator, strip_lookahead};
use crate::spine::{enumerate_trees, SpineGrammar};
use crate::trees::Tree;

/// Largest bound accepted by [`check_equivalence`].
pub const DEFAULT_SAFETY_CAP: usize = 9;
/// Bound used when none is given.
pub const DEFAULT_BOUND: usize = 9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Equal,
    Unequal,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Sizes {
    pub grammar_trees: usize,
    pub reassembled_trees: usize,
    pub ccg_trees: usize,
    pub atoms: usize,
    pub rules: usize,
    pub lexicon_entries: usize,
    pub mpda: Option<MpdaSizes>,
}

/// One pairwise comparison against the grammar's own trees.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Difference {
    pub left_only: Vec<String>,
    pub right_only: Vec<String>,
}

impl Difference {
    fn of(left: &BTreeSet<Tree>, right: &BTreeSet<Tree>) -> Self {
        let show = |a: &BTreeSet<Tree>, b: &BTreeSet<Tree>| {
            a.difference(b).map(|t| t.to_string()).collect()
        };
        Difference {
            left_only: show(left, right),
            right_only: show(right, left),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.left_only.is_empty() && self.right_only.is_empty()
    }
}

/// Result of [`check_equivalence`]. The top-level `left_only`/`right_only`
/// compare the grammar (left) with the CCG (right); `reassembly` compares
/// the grammar with the trees reassembled from the machine's spines.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EquivalenceReport {
    pub bound: usize,
    pub verdict: Verdict,
    pub left_only: Vec<String>,
    pub right_only: Vec<String>,
    pub reassembly: Difference,
    pub sizes: Sizes,
}

impl EquivalenceReport {
    pub fn is_equal(&self) -> bool {
        self.verdict == Verdict::Equal
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// The three tree sets compared by [`check_equivalence`].
#[derive(Clone, Debug, Default)]
pub struct ThreeSets {
    pub grammar: BTreeSet<Tree>,
    pub reassembled: BTreeSet<Tree>,
    pub ccg: BTreeSet<Tree>,
}

/// `(b)`: π of F(Next(S(G)) ∪ L1) with the lookahead dropped, sliced by the start symbol.
pub fn reassembled_trees(
    m: &NextMachine,
    g: &SpineGrammar,
    bound: usize,
) -> Result<BTreeSet<Tree>> {
    let mut spines: BTreeSet<_> = m
        .mpda
        .enumerate(bound)
        .iter()
        .map(|w| strip_lookahead(w))
        .collect();
    spines.extend(m.l1.iter().map(|x| vec![x.cur.clone()]));
    let f = assemble_f(&spines, &g.direction, bound)?;
    Ok(slice_by_generator(&f, &g.start, &g.direction)
        .iter()
        .map(project)
        .collect())
}

/// `(c)`: π∘ρ of the derivations of the built CCG.
pub fn ccg_trees(b: &BuiltCcg, bound: usize) -> Result<BTreeSet<Tree>> {
    enumerate_relabeled(&b.ccg, bound, &|c: &Category| b.project(c))
}

/// The three sets, computed concurrently, together with the built CCG.
/// A grammar with an empty language yields three empty sets and no CCG.
pub fn three_sets(g: &SpineGrammar, bound: usize) -> Result<(ThreeSets, Option<BuiltCcg>)> {
    let reduced = g.reduce();
    if reduced.productions.is_empty() {
        return Ok((ThreeSets::default(), None));
    }
    let built = normalize(g)
        .map_err(|e| e.in_stage("normalize"))
        .and_then(|n| Ok((mpda_for_next(&n)?, n)))
        .and_then(|(m, n)| build_from_machine(m, n).map_err(|e| e.in_stage("build")))?;
    let sets = std::thread::scope(|s| {
        let grammar = s.spawn(|| enumerate_trees(g, bound));
        let reassembled = s.spawn(|| {
            reassembled_trees(&built.machine, &built.grammar, bound)
                .map_err(|e| e.in_stage("reassembly"))
        });
        let ccg = ccg_trees(&built, bound).map_err(|e| e.in_stage("derivations"));
        let reassembled = reassembled.join().expect("reassembly thread");
        let grammar = grammar.join().expect("enumeration thread");
        Ok::<_, Error>(ThreeSets {
            grammar,
            reassembled: reassembled?,
            ccg: ccg?,
        })
    })?;
    Ok((sets, Some(built)))
}

/// Bounded strong-equivalence check of `g` against its reassembly and its CCG.
pub fn check_equivalence(g: &SpineGrammar, bound: usize) -> Result<EquivalenceReport> {
    check_equivalence_capped(g, bound, DEFAULT_SAFETY_CAP)
}

pub fn check_equivalence_capped(
    g: &SpineGrammar,
    bound: usize,
    cap: usize,
) -> Result<EquivalenceReport> {
    if bound > cap {
        return Err(Error::Precondition(format!(
            "bound {bound} exceeds the safety cap {cap}"
        )));
    }
    let (sets, built) = three_sets(g, bound)?;
    let main = Difference::of(&sets.grammar, &sets.ccg);
    let reassembly = Difference::of(&sets.grammar, &sets.reassembled);
    let verdict = if main.is_empty() && reassembly.is_empty() {
        Verdict::Equal
    } else {
        Verdict::Unequal
    };
    let sizes = Sizes {
        grammar_trees: sets.grammar.len(),
        reassembled_trees: sets.reassembled.len(),
        ccg_trees: sets.ccg.len(),
        atoms: built.as_ref().map_or(0, |b| b.ccg.atoms.len()),
        rules: built.as_ref().map_or(0, |b| b.ccg.rules().len()),
        lexicon_entries: built.as_ref().map_or(0, |b| b.ccg.lexicon_size()),
        mpda: built.as_ref().map(|b| b.machine.mpda.sizes()),
    };
    Ok(EquivalenceReport {
        bound,
        verdict,
        left_only: main.left_only,
        right_only: main.right_only,
        reassembly,
        sizes,
    })
}
