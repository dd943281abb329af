use std::path::PathBuf;
use std::process::{Command, Output};

fn pldl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pldl")).args(args).output().expect("binary runs")
}

fn system(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "systems", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn mc_on_responsive_system() {
    let o = pldl(&["mc", "--system", &system("rr.ts"), "--formula", "[tt*](req -> <tt*>{<=x} resp)"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("alpha: x="), "{}", stdout(&o));
}

#[test]
fn mc_tighten_finds_one_step() {
    let o = pldl(&["mc", "--system", &system("rr.ts"), "--formula", "[tt*](req -> <tt*>{<=x} resp)", "--tighten"]);
    assert!(stdout(&o).contains("alpha: x=1\n"), "{}", stdout(&o));
}

#[test]
fn mc_reports_counterexample() {
    let o = pldl(&["mc", "--system", &system("silent.ts"), "--formula", "[tt*](req -> <tt*>{<=x} resp)"]);
    assert_eq!(o.status.code(), Some(1));
    let out = stdout(&o);
    assert!(out.starts_with("violated"));
    assert!(out.contains("trace:"));
}

#[test]
fn mc_with_fixed_valuation() {
    let ring = system("ring3.ts");
    let check = |a: &str| pldl(&["mc", "--system", &ring, "--formula", "[tt*]<tt*>{<=x} p", "--alpha", a]).status.code();
    assert_eq!(check("x=1"), Some(1));
    assert_eq!(check("x=2"), Some(0));
}

#[test]
fn mc_warns_on_parameter_in_box_test() {
    let o = pldl(&["mc", "--system", &system("const_p.ts"), "--formula", "[(<tt>{<=y} p)?] p"]);
    assert!(String::from_utf8_lossy(&o.stderr).contains("warning"));
}

#[test]
fn eval_example() {
    let o = pldl(&["eval", "--word", "{p} $ {}", "--formula", "<tt*>p", "--alpha", ""]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "true");
}

#[test]
fn parse_rejects_shared_variable() {
    let o = pldl(&["parse", "--formula", "<r>{<=x} p & [r]{<=x} q"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("not well-formed"));
}

#[test]
fn syntax_error_exits_two() {
    let o = pldl(&["parse", "--formula", "<tt*"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error:"));
}

#[test]
fn bad_system_file() {
    let dir = std::env::temp_dir().join(format!("pldl-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("bad.ts");
    std::fs::write(&path, "state a init {p}\nstate b {}\nedge a b\n").unwrap();
    let o = pldl(&["mc", "--system", path.to_str().unwrap(), "--formula", "<tt*>p"]);
    assert_eq!(o.status.code(), Some(2));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn realize_examples() {
    let o = pldl(&["realize", "--formula", "[tt*](req -> <tt*>{<=x} resp)", "--inputs", "req", "--outputs", "resp"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.starts_with("realizable"));
    assert!(out.contains("transducer states="));
    let o = pldl(&["realize", "--formula", "[tt*]<tt*>{<=x} q", "--inputs", "q", "--outputs", ""]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stdout(&o).trim(), "unrealizable");
}

#[test]
fn realize_json_lines() {
    let o = pldl(&["realize", "--formula", "<tt*>{<=x} resp", "--inputs", "", "--outputs", "resp", "--format", "json-lines"]);
    let v: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["verdict"], "realizable");
}

#[test]
fn compile_reports_nba() {
    let o = pldl(&["compile", "--formula", "<tt*>{cp} p", "--stage", "nba"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(!stdout(&o).is_empty());
}

#[test]
fn selftest_passes() {
    let o = pldl(&["selftest", "--seed", "3", "--cases", "20"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert_eq!(stdout(&o).lines().filter(|l| l.starts_with("pass")).count(), 5);
}
