mod common;

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use explorable::constructions::multiple_dpda;
use explorable::dot::export_dot;
use explorable::game::StrategyTable;
use explorable::pda::Pda;

fn bin(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_explorable")).args(args).current_dir(dir).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn construct(dir: &Path, args: &[&str], file: &str) -> PathBuf {
    let mut full = vec!["construct"];
    full.extend_from_slice(args);
    full.extend_from_slice(&["--out", file]);
    let o = bin(&full, dir);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    dir.join(file)
}

#[test]
fn member_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    construct(dir.path(), &["block"], "block.json");
    let o = bin(&["member", "block.json", "aaa#aaaaa#aa#bbbbb"], dir.path());
    assert_eq!((code(&o), stdout(&o).trim()), (0, "accept"));
    construct(dir.path(), &["multiple", "--i", "1"], "d1.json");
    let o = bin(&["member", "d1.json", "abb"], dir.path());
    assert_eq!((code(&o), stdout(&o).trim()), (1, "reject"));
    let o = bin(&["member", "d1.json", "abc"], dir.path());
    assert_eq!(code(&o), 2);
    std::fs::write(dir.path().join("bad.json"), "{\n  \"states\": [\n").unwrap();
    let o = bin(&["member", "bad.json", "a"], dir.path());
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3"));
    assert_eq!(code(&bin(&["member", "missing.json", "a"], dir.path())), 2);
}

#[test]
fn game_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    construct(dir.path(), &["union", "--k", "1"], "u1.json");
    let o = bin(&["game", "u1.json", "--tokens", "1", "--horizon", "3"], dir.path());
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("witness=\"abb\""));
    let o = bin(&["game", "u1.json", "--tokens", "2", "--horizon", "8", "--strategy-out", "s.json"], dir.path());
    assert_eq!(code(&o), 0);
    let u1 = Pda::from_json(&std::fs::read_to_string(dir.path().join("u1.json")).unwrap()).unwrap();
    let table = StrategyTable::from_json(&u1, &std::fs::read_to_string(dir.path().join("s.json")).unwrap()).unwrap();
    assert_eq!(table.tokens, 2);
    let o = bin(&["game", "u1.json", "--tokens", "1", "--horizon", "0"], dir.path());
    assert_eq!(code(&o), 0);
    let o = bin(&["game", "u1.json", "--tokens-fn", "linear", "--horizon", "2"], dir.path());
    assert_eq!(code(&o), 0);
    // a 0-step ε-budget truncates the branch choice
    let o = bin(&["game", "u1.json", "--tokens", "1", "--horizon", "3", "--eps-budget", "0"], dir.path());
    assert_eq!(code(&o), 3);
    assert_eq!(code(&bin(&["game", "u1.json", "--horizon", "3"], dir.path())), 2);
    assert_eq!(code(&bin(&["game", "u1.json", "--tokens", "1", "--tokens-fn", "linear", "--horizon", "3"], dir.path())), 2);
    assert_eq!(code(&bin(&["game", "u1.json", "--tokens-fn", "cubic", "--horizon", "3"], dir.path())), 2);
}

#[test]
fn strict_checkpoint_changes_the_verdict() {
    let dir = tempfile::tempdir().unwrap();
    construct(dir.path(), &["multiple", "--i", "1"], "d1.json");
    // acceptance after a^n b^n happens on an ε-step, which a strict
    // checkpoint never sees
    let relaxed = bin(&["game", "d1.json", "--tokens", "1", "--horizon", "2"], dir.path());
    let strict = bin(&["game", "d1.json", "--tokens", "1", "--horizon", "2", "--strict-checkpoint"], dir.path());
    assert_eq!((code(&relaxed), code(&strict)), (0, 1));
}

#[test]
fn interactive_session_over_stdin() {
    use std::io::Write;
    use std::process::Stdio;
    let dir = tempfile::tempdir().unwrap();
    construct(dir.path(), &["union", "--k", "1"], "u1.json");
    let mut child = Command::new(env!("CARGO_BIN_EXE_explorable"))
        .args(["game", "u1.json", "--tokens", "1", "--horizon", "3", "--interactive", "spoiler"])
        .current_dir(dir.path())
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(b"a\nx\nb\nb\n").unwrap();
    let o = child.wait_with_output().unwrap();
    let text = stdout(&o);
    assert_eq!(code(&o), 0);
    assert!(text.contains("not in the alphabet"));
    assert!(text.contains("Determiner loses: \"abb\""));
}

#[test]
fn construct_round_trips_and_counter_loads_110() {
    let dir = tempfile::tempdir().unwrap();
    let path = construct(dir.path(), &["suffix_one", "--n", "8"], "s8.json");
    let text = std::fs::read_to_string(&path).unwrap();
    let p = Pda::from_json(&text).unwrap();
    assert_eq!(p.to_json().trim(), text.trim());
    // load 6 = 110: pushes 1, then 1, then 0, so the stack reads 0 1 1 ⊥ from the top
    let mut c = p.initial_configuration();
    let t = p.enabled(&c).iter().copied().find(|&t| p.state_name(p.transition(t).to) == "g1_load1").unwrap();
    c = c.apply(p.transition(t));
    while p.state_name(c.state) != "g1_cnt" {
        let next = p.enabled(&c)[0];
        c = c.apply(p.transition(next));
    }
    let stack: Vec<&str> = c.stack_word().into_iter().map(|x| p.symbol_name(x)).collect();
    assert_eq!(stack, ["0", "1", "1", "⊥"]);

    construct(dir.path(), &["multiple", "--i", "1"], "d1.json");
    let o = bin(&["validate", "d1.json"], dir.path());
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("deterministic=true"));
    assert_eq!(code(&bin(&["construct", "nope"], dir.path())), 2);
    assert_eq!(code(&bin(&["construct", "union"], dir.path())), 2);
}

#[test]
fn construct_invalc_with_machine_file() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("tm.json"), explorable::turing::demo_tm().to_json()).unwrap();
    let path = construct(dir.path(), &["invalc", "--tm", "tm.json"], "inv.json");
    let p = Pda::from_json(&std::fs::read_to_string(path).unwrap()).unwrap();
    assert_eq!(p, explorable::invalc::invalc_pda(&explorable::turing::demo_tm()).unwrap());
}

#[test]
fn export_dot_matches_library() {
    let dir = tempfile::tempdir().unwrap();
    construct(dir.path(), &["multiple", "--i", "1"], "d1.json");
    let o = bin(&["export-dot", "d1.json"], dir.path());
    assert_eq!(code(&o), 0);
    let d1 = multiple_dpda(1).unwrap();
    assert_eq!(stdout(&o), export_dot(&d1));
    assert_eq!(stdout(&o).matches(" [shape=").count(), d1.states().len());
}

#[test]
fn experiment_output_and_errors() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("union.json"),
        r#"{"family": "union", "params": [1, 2], "tokens": ["param", "param+1", "param+2"], "horizons": [6], "output": "union.csv"}"#,
    )
    .unwrap();
    assert_eq!(code(&bin(&["experiment", "union.json"], dir.path())), 0);
    let csv = std::fs::read_to_string(dir.path().join("union.csv")).unwrap();
    let verdicts: Vec<&str> = csv.lines().skip(1).map(|l| l.rsplit(',').next().unwrap()).collect();
    assert_eq!(verdicts, ["spoiler", "determiner", "determiner", "spoiler", "determiner", "determiner"]);

    std::fs::write(dir.path().join("sweep.json"), r#"{"family": "suffix_one", "params": [2, 4, 8, 16], "tokens": ["1"], "horizons": [0]}"#)
        .unwrap();
    let o = bin(&["experiment", "sweep.json"], dir.path());
    let states: Vec<usize> = stdout(&o).lines().skip(1).map(|l| l.split(',').nth(3).unwrap().parse().unwrap()).collect();
    assert!(states.windows(2).all(|p| p[0] <= p[1]), "{states:?}");

    std::fs::write(dir.path().join("empty.json"), r#"{"family": "union", "params": [], "tokens": ["1"], "horizons": [1]}"#).unwrap();
    assert_eq!(code(&bin(&["experiment", "empty.json"], dir.path())), 2);
}

#[test]
fn runs_lists_each_run() {
    let dir = tempfile::tempdir().unwrap();
    construct(dir.path(), &["union", "--k", "1"], "u1.json");
    let o = bin(&["runs", "u1.json", "ab"], dir.path());
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert!(text.lines().any(|l| l.ends_with("accepting")));
    assert!(text.trim_end().ends_with("3 runs"));
}
