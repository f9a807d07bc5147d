use std::path::PathBuf;
use std::process::{Command, Output};

fn data(name: &str) -> String {
    format!("{}/../../data/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spineccg"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn scratch(name: &str, text: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("spineccg-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn check_running_example_exits_zero() {
    let o = run(&["check", &data("ex41.sg"), "--max-leaves", "7"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("verdict: equal"));
}

#[test]
fn json_report_is_byte_identical_across_runs() {
    let args = ["check", &data("ex41.sg"), "--max-leaves", "6", "--json"];
    let (a, b) = (run(&args), run(&args));
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["verdict"], "equal");
}

#[test]
fn bound_over_the_cap_is_an_input_error() {
    assert_eq!(
        run(&["check", &data("gmin.sg"), "--max-leaves", "10"])
            .status
            .code(),
        Some(2)
    );
    let o = run(&[
        "check",
        &data("gmin.sg"),
        "--max-leaves",
        "10",
        "--cap",
        "10",
    ]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn direction_conflict_is_reported_with_a_witness() {
    let p = scratch(
        "conflict.sg",
        "@spine-grammar\nstart s\nterm0 alpha\nterm2 sigma\nnt0 s a\nnt1 b c\n\
         prod s -> b(alpha)\nprod b -> sigma(_,a)\nprod c -> sigma(a,_)\nprod a -> alpha\n",
    );
    let o = run(&["validate", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("direction") && err.contains("sigma"), "{err}");
}

#[test]
fn missing_file_and_bad_syntax_exit_two() {
    assert_eq!(
        run(&["validate", "/nonexistent/g.sg"]).status.code(),
        Some(2)
    );
    let p = scratch("bad.sg", "not a grammar\n");
    assert_eq!(run(&["spines", p.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(
        run(&["enumerate", "--max-leaves", "3"]).status.code(),
        Some(2)
    );
}

#[test]
fn mpda_dot_uses_push_and_pop_arrows() {
    let dot = std::env::temp_dir().join(format!("spineccg-{}.dot", std::process::id()));
    let o = run(&["mpda", &data("ex41.sg"), "--dot", dot.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(&dot).unwrap();
    assert!(text.starts_with("digraph"));
    assert!(text.contains('↓') && text.contains('↑'));
    assert!(stdout(&o).lines().any(|l| l.starts_with("tau ")));
}

#[test]
fn built_ccg_file_parses_and_derives() {
    let out = std::env::temp_dir().join(format!("spineccg-{}.ccg", std::process::id()));
    let o = run(&[
        "build-ccg",
        &data("gmin.sg"),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("rule "));
    let o = run(&[
        "enumerate",
        "--ccg",
        out.to_str().unwrap(),
        "--max-leaves",
        "2",
    ]);
    assert_eq!(stdout(&o).lines().count(), 1);
    let o = run(&[
        "derive",
        "--ccg",
        out.to_str().unwrap(),
        "(<|,beta[u]) (sigma[u,s],alpha[s])",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("accepted"));
}

#[test]
fn derive_on_the_small_ccg() {
    let o = run(&[
        "derive",
        "--ccg",
        &data("ex21.ccg"),
        "alpha alpha delta gamma gamma beta beta",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("(⊥ a"));
    assert_eq!(
        run(&["derive", "--ccg", &data("ex21.ccg"), "delta"])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn text_stages_print_their_formats() {
    assert!(stdout(&run(&["spines", &data("ex41.sg")])).starts_with("@cfg"));
    assert!(stdout(&run(&["next", &data("gmin.sg")])).contains("(<|,"));
    let n = stdout(&run(&["normalize", &data("ex41.sg")]));
    assert!(n.starts_with("@spine-grammar"));
    let trees = stdout(&run(&[
        "enumerate",
        "--grammar",
        &data("ex41.sg"),
        "--max-leaves",
        "5",
    ]));
    assert_eq!(trees.lines().count(), 2);
}
