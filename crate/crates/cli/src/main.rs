use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use spineccg_core::build::{build_ccg, normalize};
use spineccg_core::ccg::{derive, enumerate_derivations, parse_ccg};
use spineccg_core::pipeline::{check_equivalence_capped, DEFAULT_BOUND, DEFAULT_SAFETY_CAP};
use spineccg_core::pushdown::mpda_for_next;
use spineccg_core::spine::{
    enumerate_trees, format_spine_grammar, infer_spine_direction, parse_spine_grammar,
};
use spineccg_core::strings::{build_next_cfg, build_spines_cfg};
use spineccg_core::SpineGrammar;

#[derive(Parser)]
#[command(
    name = "spineccg",
    version,
    about = "Spine grammars to combinatory categorial grammars"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a spine grammar for structural problems and direction conflicts.
    Validate { file: PathBuf },
    /// Print the normalized grammar.
    Normalize { file: PathBuf },
    /// Print the CFG of the grammar's spines.
    Spines { file: PathBuf },
    /// Print the CFG of the lookahead-decorated spines.
    Next { file: PathBuf },
    /// Print the pop-normalized Moore machine.
    Mpda {
        file: PathBuf,
        /// Also write a Graphviz rendering.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Build the CCG, with a provenance report for every rule.
    BuildCcg {
        file: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the trees or derivations up to a number of leaves.
    Enumerate {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        max_leaves: usize,
    },
    /// Bounded strong-equivalence check of a grammar against its CCG.
    Check {
        file: PathBuf,
        #[arg(long, default_value_t = DEFAULT_BOUND)]
        max_leaves: usize,
        /// Largest accepted bound.
        #[arg(long, default_value_t = DEFAULT_SAFETY_CAP)]
        cap: usize,
        #[arg(long)]
        json: bool,
    },
    /// Recognize a whitespace-separated input and print one derivation.
    Derive {
        #[arg(long)]
        ccg: PathBuf,
        input: String,
    },
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct Source {
    #[arg(long)]
    grammar: Option<PathBuf>,
    #[arg(long)]
    ccg: Option<PathBuf>,
}

/// Input problems, reported with exit code 2.
struct InputError(String);

impl<E: std::fmt::Display> From<E> for InputError {
    fn from(e: E) -> Self {
        InputError(e.to_string())
    }
}

fn read(path: &Path) -> Result<String, InputError> {
    fs::read_to_string(path).map_err(|e| InputError(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), InputError> {
    fs::write(path, text).map_err(|e| InputError(format!("{}: {e}", path.display())))
}

fn grammar(path: &Path) -> Result<SpineGrammar, InputError> {
    let g = parse_spine_grammar(&read(path)?)?;
    if let Err(c) = infer_spine_direction(&g) {
        return Err(InputError(format!("inconsistent spine direction: {c}")));
    }
    let report = g.validate();
    if !report.is_valid() {
        return Err(InputError(report.problems.join("\n")));
    }
    Ok(g)
}

fn run(cli: Cli) -> Result<bool, InputError> {
    match cli.command {
        Command::Validate { file } => {
            let g = grammar(&file)?;
            println!(
                "ok: {} productions, {} nullary and {} unary nonterminals",
                g.productions.len(),
                g.nt0.len(),
                g.nt1.len()
            );
            println!("normal form: {}", g.is_normal_form());
        }
        Command::Normalize { file } => {
            print!("{}", format_spine_grammar(&normalize(&grammar(&file)?)?));
        }
        Command::Spines { file } => {
            print!("{}", build_spines_cfg(&grammar(&file)?)?);
        }
        Command::Next { file } => {
            print!("{}", build_next_cfg(&build_spines_cfg(&grammar(&file)?)?));
        }
        Command::Mpda { file, dot } => {
            let m = mpda_for_next(&normalize(&grammar(&file)?)?)?;
            print!("{}", m.mpda);
            for (g, q) in &m.ret.0 {
                println!("ret {} {}", m.mpda.stack[*g], m.mpda.states[*q]);
            }
            for x in &m.l1 {
                println!("L1 {x}");
            }
            if let Some(path) = dot {
                write(&path, &m.mpda.to_dot())?;
            }
        }
        Command::BuildCcg { file, out } => {
            let b = build_ccg(&grammar(&file)?)?;
            let mut text = b.ccg.to_string();
            text.push_str("# provenance\n");
            for line in b.provenance_report().lines() {
                text.push_str(&format!("# {line}\n"));
            }
            match out {
                Some(path) => {
                    write(&path, &text)?;
                    print!("{}", b.provenance_report());
                }
                None => print!("{text}"),
            }
        }
        Command::Enumerate { source, max_leaves } => {
            if let Some(path) = source.grammar {
                for t in enumerate_trees(&grammar(&path)?, max_leaves) {
                    println!("{t}");
                }
            } else if let Some(path) = source.ccg {
                let g = parse_ccg(&read(&path)?)?;
                for t in enumerate_derivations(&g, max_leaves) {
                    println!("{}", g.show_tree(&t));
                }
            }
        }
        Command::Check {
            file,
            max_leaves,
            cap,
            json,
        } => {
            let r = check_equivalence_capped(&grammar(&file)?, max_leaves, cap)?;
            if json {
                println!("{}", r.to_json());
            } else {
                println!(
                    "bound {}: {} grammar trees, {} reassembled, {} from the CCG",
                    r.bound, r.sizes.grammar_trees, r.sizes.reassembled_trees, r.sizes.ccg_trees
                );
                println!(
                    "ccg: {} atoms, {} rules, {} lexicon entries",
                    r.sizes.atoms, r.sizes.rules, r.sizes.lexicon_entries
                );
                for t in r.left_only.iter().chain(&r.reassembly.left_only) {
                    println!("missing: {t}");
                }
                for t in r.right_only.iter().chain(&r.reassembly.right_only) {
                    println!("extra: {t}");
                }
                println!(
                    "verdict: {}",
                    if r.is_equal() { "equal" } else { "unequal" }
                );
            }
            return Ok(r.is_equal());
        }
        Command::Derive { ccg, input } => {
            let g = parse_ccg(&read(&ccg)?)?;
            let w: Vec<&str> = input.split_whitespace().collect();
            let cap = g.max_lexicon_arity() + w.len();
            match derive(&g, &w, cap) {
                Some(t) => {
                    println!("accepted");
                    println!("{}", g.show_tree(&t));
                }
                None => {
                    println!("rejected");
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(InputError(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
