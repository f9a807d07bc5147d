//! String-level models: context-free grammars, finite automata, the spine
//! language of a spine grammar and its lookahead decoration.

mod cfg;
mod gnf;
mod next;
mod nfa;
mod spines;

pub use cfg::{cfg_enumerate, parse_cfg, Cfg, GSym, Rule, Terminal};
pub use gnf::{is_quadratic_gnf, rule_histogram, to_quadratic_gnf};
pub use next::{build_next_cfg, inverse_projection, next_nfa, Ahead, Lookahead};
pub use nfa::{intersect_cfg_nfa, nfa_run, Nfa};
pub use spines::{build_spines_cfg, extract_l1, SpineSym};
