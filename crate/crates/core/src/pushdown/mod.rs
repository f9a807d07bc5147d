//! Push-down automata, their Moore variant and the construction of a
//! pop-normalized Moore machine for the lookahead spine language.

mod convert;
mod mpda;
mod pda;

use std::collections::BTreeSet;

pub use convert::{pda_to_mpda, pop_normalize};
pub use mpda::{mpda_enumerate, Move, Mpda, MpdaSizes, Op, PopMap, ReturnConflict, Summary};
pub use pda::{cfg_to_pda, pda_accepts, pda_enumerate, Pda, PdaMove, BOTTOM};

use crate::error::Result;
use crate::spine::SpineGrammar;
use crate::strings::{
    build_next_cfg, build_spines_cfg, extract_l1, to_quadratic_gnf, Lookahead, SpineSym,
};

/// The output alphabet of the machines built for spine grammars.
pub type Delta = Lookahead<SpineSym>;

/// A pop-normalized machine for Next(S(G)) restricted to length ≥ 2, with
/// the length-one strings kept apart.
#[derive(Clone, Debug)]
pub struct NextMachine {
    pub mpda: Mpda<Delta>,
    pub ret: PopMap,
    pub l1: BTreeSet<Delta>,
}

/// `mpda_for_next(g)`: spines, lookahead, Greibach form, PDA, Moore
/// conversion and pop-normalization. States and stack symbols are renamed
/// `q0, q1, …` and `g0, g1, …`.
pub fn mpda_for_next(g: &SpineGrammar) -> Result<NextMachine> {
    let spines = build_spines_cfg(g).map_err(|e| e.in_stage("spines"))?;
    let next = build_next_cfg(&spines);
    let gnf = to_quadratic_gnf(&next).map_err(|e| e.in_stage("gnf"))?;
    let pda = cfg_to_pda(&gnf).map_err(|e| e.in_stage("pda"))?;
    let moore = pda_to_mpda(&pda).map_err(|e| e.in_stage("mpda"))?;
    let (mpda, ret) = pop_normalize(&moore);
    Ok(NextMachine {
        mpda: mpda.renamed(),
        ret,
        l1: extract_l1(g),
    })
}
