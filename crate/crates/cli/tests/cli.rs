use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use petrisep_core::format::{automaton_from_json, automaton_to_json};

const CONSUMER: &str = r#"{
  "places": ["q"],
  "alphabet": ["a"],
  "transitions": [{"name": "s_a", "label": "a", "pre": {"q": 1}}],
  "initial": {"q": 2},
  "final": {"q": 1}
}
"#;

const COVER_TWO: &str = r#"{
  "places": ["p"],
  "alphabet": ["a"],
  "transitions": [{"name": "t_a", "label": "a", "post": {"p": 1}}],
  "final": {"p": 2}
}
"#;

fn petrisep(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_petrisep"))
        .args(args)
        .env_remove("PETRISEP_CONFIG")
        .env("RUST_LOG", "warn")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

struct Worked {
    _dir: tempfile::TempDir,
    root: PathBuf,
    n1: String,
    n2: String,
}

fn worked() -> Worked {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path().to_path_buf();
    fs::write(root.join("n1.json"), COVER_TWO).unwrap();
    fs::write(root.join("n2.json"), CONSUMER).unwrap();
    let s = |p: &Path| p.to_str().unwrap().to_string();
    Worked { n1: s(&root.join("n1.json")), n2: s(&root.join("n2.json")), root, _dir: dir }
}

#[test]
fn disjointness_verdicts() {
    let w = worked();
    let o = petrisep(&["disjoint", &w.n1, &w.n2]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).trim(), "DISJOINT");
    let o = petrisep(&["disjoint", &w.n1, &w.n1]);
    assert_eq!(code(&o), 1);
    assert_eq!(stdout(&o).trim(), "NOT DISJOINT");
}

#[test]
fn coverability_verdicts() {
    let w = worked();
    let o = petrisep(&["cover", &w.n1]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).starts_with("COVERABLE"));
    assert!(stdout(&o).contains("witness: t_a t_a"));
    let drained = w.root.join("drained.json");
    fs::write(&drained, CONSUMER.replace("\"q\": 2", "\"q\": 0")).unwrap();
    let o = petrisep(&["cover", drained.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).starts_with("NOT COVERABLE"));
}

#[test]
fn separate_with_verification_writes_every_artifact() {
    let w = worked();
    let out = w.root.join("out");
    let o = petrisep(&["separate", &w.n1, &w.n2, "-o", out.to_str().unwrap(), "--verify"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    for f in ["a_t2.json", "a_bar.json", "b_sigma.json", "provenance.json", "separator.json"] {
        assert!(out.join(f).exists(), "{f}");
    }
    let sep = out.join("separator.json");
    assert_eq!(code(&petrisep(&["verify", &w.n1, &w.n2, sep.to_str().unwrap()])), 0);
    assert_eq!(code(&petrisep(&["verify", &w.n2, &w.n1, sep.to_str().unwrap()])), 1);

    let o = petrisep(&["separate", &w.n1, &w.n2, "-o", out.to_str().unwrap(), "--level", "t2", "--verify"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let o = petrisep(&["separate", &w.n1, &w.n2, "-o", out.to_str().unwrap(), "--contain", "first", "--verify"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert_eq!(code(&petrisep(&["verify", &w.n2, &w.n1, sep.to_str().unwrap()])), 0);

    let dot = w.root.join("dot");
    let o = petrisep(&["separate", &w.n1, &w.n2, "-o", dot.to_str().unwrap(), "--format", "dot"]);
    assert_eq!(code(&o), 0);
    assert!(fs::read_to_string(dot.join("separator.dot")).unwrap().starts_with("digraph"));
}

#[test]
fn overlapping_nets_are_refused() {
    let w = worked();
    let out = w.root.join("self");
    let o = petrisep(&["separate", &w.n1, &w.n1, "-o", out.to_str().unwrap()]);
    assert_eq!(code(&o), 3);
}

#[test]
fn outputs_are_deterministic_and_round_trip() {
    let w = worked();
    let (a, b) = (w.root.join("a"), w.root.join("b"));
    for out in [&a, &b] {
        assert_eq!(code(&petrisep(&["separate", &w.n1, &w.n2, "-o", out.to_str().unwrap()])), 0);
    }
    for f in ["a_t2.json", "a_bar.json", "b_sigma.json", "provenance.json", "separator.json"] {
        let (x, y) = (fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap());
        assert_eq!(x, y, "{f}");
        if f != "provenance.json" {
            let text = String::from_utf8(x).unwrap();
            let (aut, prov) = automaton_from_json(&text).unwrap();
            assert_eq!(automaton_to_json(&aut, prov.as_ref()), text, "{f}");
        }
    }
}

#[test]
fn malformed_input_exits_with_two() {
    let w = worked();
    let bad = w.root.join("bad.json");
    fs::write(&bad, "{\"places\": [\"p\"]}").unwrap();
    assert_eq!(code(&petrisep(&["cover", bad.to_str().unwrap()])), 2);
    assert_eq!(code(&petrisep(&["cover", "/nonexistent/net.json"])), 2);
    assert_eq!(code(&petrisep(&["frobnicate"])), 2);
    assert_eq!(code(&petrisep(&["sample", &w.n1, "--max-len", "11"])), 2);
    assert_eq!(code(&petrisep(&["gen-lastletter", "--bit", "0", "--k", "11", "-o", bad.to_str().unwrap()])), 2);
}

#[test]
fn invariant_and_sample_output() {
    let w = worked();
    let o = petrisep(&["invariant", &w.n1, &w.n2]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    for line in ["(0,2)", "(1,1)", "(w,0)", "contains initial: true", "within bounds: true"] {
        assert!(text.contains(line), "{line}\n{text}");
    }
    let o = petrisep(&["sample", &w.n1, "--max-len", "4"]);
    assert_eq!(stdout(&o), "a a\na a a\na a a a\n");
    let o = petrisep(&["sample", &w.n2, "--max-len", "4"]);
    assert_eq!(stdout(&o), "ε\na\n");
}

#[test]
fn generators_and_config() {
    let w = worked();
    let k3 = w.root.join("k3.json");
    let k3b = w.root.join("k3b.json");
    assert_eq!(code(&petrisep(&["gen-lastletter", "--bit", "0", "--k", "3", "-o", k3.to_str().unwrap()])), 0);
    assert_eq!(code(&petrisep(&["gen-lastletter", "--bit", "1", "--k", "3", "-o", k3b.to_str().unwrap()])), 0);
    let o = petrisep(&["disjoint", k3.to_str().unwrap(), k3b.to_str().unwrap()]);
    assert_eq!(stdout(&o).trim(), "DISJOINT");

    let cfg = w.root.join("cfg.toml");
    fs::write(&cfg, "last_letter_cap = 2\nmax_len = 3\n").unwrap();
    let c = cfg.to_str().unwrap();
    assert_eq!(code(&petrisep(&["--config", c, "gen-lastletter", "--bit", "0", "--k", "3", "-o", k3.to_str().unwrap()])), 2);
    assert_eq!(code(&petrisep(&["--config", c, "sample", &w.n1, "--max-len", "4"])), 2);
    let via_env = Command::new(env!("CARGO_BIN_EXE_petrisep"))
        .args(["sample", &w.n1, "--max-len", "4"])
        .env("PETRISEP_CONFIG", c)
        .output()
        .unwrap();
    assert_eq!(code(&via_env), 2);

    let prefix = w.root.join("pair");
    let o = petrisep(&["gen-random", "--seed", "3", "--places", "3", "--transitions", "3", "--norm", "2", "-o", prefix.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let first = w.root.join("pair.first.json");
    let second = w.root.join("pair.second.json");
    let verdict = petrisep(&["disjoint", first.to_str().unwrap(), second.to_str().unwrap()]);
    assert_eq!(stdout(&verdict), stdout(&o));
}
