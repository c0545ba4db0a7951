use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

const A1: &str = "field p=2\nvertex a loops=0\n";
const A2: &str = "field p=2\nvertex a loops=0\nvertex b loops=0\nedge a b\n";
const L2: &str = "field p=2\nvertex x loops=2 charge=1\n";

struct Sandbox {
    dir: TempDir,
}

impl Sandbox {
    fn new() -> Sandbox {
        Sandbox { dir: TempDir::new().expect("temp dir") }
    }

    fn quiver(&self, name: &str, text: &str) -> PathBuf {
        let path = self.dir.path().join(name);
        std::fs::write(&path, text).expect("write quiver");
        path
    }

    fn cache(&self) -> PathBuf {
        self.dir.path().join("cache.tsv")
    }

    fn run(&self, args: &[&str]) -> Output {
        Command::new(env!("CARGO_BIN_EXE_hallq"))
            .args(args)
            .env("HALLQ_CACHE", self.cache())
            .output()
            .expect("run hallq")
    }
}

fn s(p: &Path) -> &str {
    p.to_str().expect("utf-8 path")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).expect("utf-8 output")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

#[test]
fn classify_counts_isoclasses() {
    let sb = Sandbox::new();
    let l2 = sb.quiver("l2.q", L2);
    let out = sb.run(&["classify", "--quiver", s(&l2), "--dim", "1"]);
    assert_eq!(code(&out), 0);
    // header plus one row per pair of scalars
    assert_eq!(stdout(&out).lines().count(), 5);

    let a2 = sb.quiver("a2.q", A2);
    let out = sb.run(&["classify", "--quiver", s(&a2), "--dim", "1,1", "--json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["classes"].as_array().unwrap().len(), 2);
    assert_eq!(v["p"], 2);

    let out = sb.run(&["classify", "--quiver", s(&a2), "--dim", "0,0"]);
    assert_eq!(stdout(&out).lines().count(), 2);
}

#[test]
fn classify_over_another_field() {
    let sb = Sandbox::new();
    let a1 = sb.quiver("a1.q", A1);
    let out = sb.run(&["classify", "--quiver", s(&a1), "-p", "3", "--dim", "2", "--json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    // |GL_2(F_3)| = 48
    assert_eq!(v["classes"][0]["aut_order"], 48);
}

#[test]
fn product_straightens() {
    let sb = Sandbox::new();
    let a1 = sb.quiver("a1.q", A1);
    let out = sb.run(&["product", "--quiver", s(&a1), "--expr", "F[1] E[1]"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out).trim(), "E[1] F[1] + K(1) + (-1)*Kd(1)");

    let out = sb.run(&["product", "--quiver", s(&a1), "--expr", "F[1] E[1]", "--reduced"]);
    assert_eq!(stdout(&out).trim(), "E[1] F[1] + (-1)*K(-1) + K(1)");

    let out = sb.run(&["product", "--quiver", s(&a1)]);
    assert_eq!(stdout(&out).trim(), "1");

    let out = sb.run(&["product", "--quiver", s(&a1), "--expr", "K(S:a) E[1] Kd(-1)", "--json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let terms = v["terms"].as_array().unwrap();
    assert_eq!(terms.len(), 1);
    assert_eq!(terms[0]["e"], "1");
    assert_eq!(terms[0]["kd"], serde_json::json!([-1]));
}

#[test]
fn product_in_the_complex_basis() {
    let sb = Sandbox::new();
    let a1 = sb.quiver("a1.q", A1);
    let out = sb.run(&["product", "--quiver", s(&a1), "--expr", "E[1] F[1]", "--oracle"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    // E_S F_S = E_{S,S} + (q - 1) K†_S with q - 1 = 1
    assert_eq!(stdout(&out).trim(), "E{1,1} + Kd(1)");

    let l2 = sb.quiver("l2.q", L2);
    assert_eq!(code(&sb.run(&["product", "--quiver", s(&l2), "--expr", "E[1/00]", "--oracle"])), 2);
}

#[test]
fn verify_suites_pass() {
    let sb = Sandbox::new();
    let a1 = sb.quiver("a1.q", A1);
    let out = sb.run(&["verify", "--quiver", s(&a1)]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    assert!(stdout(&out).lines().last().unwrap().starts_with("all: "));

    let l2 = sb.quiver("l2.q", L2);
    let out = sb.run(&["verify", "--quiver", s(&l2), "--suite", "relations"]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
}

#[test]
fn wrong_prefactor_fails_with_one() {
    let sb = Sandbox::new();
    let a1 = sb.quiver("a1.q", A1);
    let out = sb.run(&["verify", "--quiver", s(&a1), "--suite", "relations", "--f-prefactor", "minus-one"]);
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).contains("fail"));
}

#[test]
fn invalid_input_exits_two() {
    let sb = Sandbox::new();
    let a1 = sb.quiver("a1.q", A1);
    assert_eq!(code(&sb.run(&["product", "--quiver", s(&a1), "--expr", "E["])), 2);
    assert_eq!(code(&sb.run(&["product", "--quiver", s(&a1), "--expr", "E[7]"])), 2);
    assert_eq!(code(&sb.run(&["classify", "--quiver", s(&a1), "--dim", "1,1"])), 2);
    let bad = sb.quiver("bad.q", "field p=2\nvertex a loops=0\nedge a b\n");
    let out = sb.run(&["classify", "--quiver", s(&bad), "--dim", "1"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));
    let missing = sb.dir.path().join("nope.q");
    assert_eq!(code(&sb.run(&["classify", "--quiver", s(&missing), "--dim", "1"])), 2);
    assert_eq!(code(&sb.run(&["classify", "--quiver", s(&a1), "-p", "4", "--dim", "1"])), 2);
    // two loops over F_2 have only four simples, not five
    let tight = sb.quiver("tight.q", "field p=2\nvertex x loops=2 charge=5\n");
    assert_eq!(code(&sb.run(&["verify", "--quiver", s(&tight), "--suite", "relations"])), 2);
}

#[test]
fn enumeration_bound_exits_three() {
    let sb = Sandbox::new();
    let l2 = sb.quiver("l2.q", L2);
    let out = sb.run(&["classify", "--quiver", s(&l2), "--dim", "6"]);
    assert_eq!(code(&out), 3);
    assert!(String::from_utf8_lossy(&out.stderr).contains("too large"));
}

#[test]
fn reports_are_deterministic_and_cache_neutral() {
    let sb = Sandbox::new();
    let a2 = sb.quiver("a2.q", A2);
    let args = ["verify", "--quiver", s(&a2), "--suite", "assoc", "--max-dim", "2", "--json"];
    let cold = sb.run(&args);
    assert!(sb.cache().exists());
    let warm = sb.run(&args);
    assert_eq!(code(&cold), 0);
    assert_eq!(stdout(&cold), stdout(&warm));
    let mut uncached = args.to_vec();
    uncached.push("--no-cache");
    assert_eq!(stdout(&sb.run(&uncached)), stdout(&cold));

    let v: serde_json::Value = serde_json::from_str(&stdout(&cold)).unwrap();
    assert_eq!(v["suite"], "assoc");
    assert!(v["checks"].as_array().unwrap().iter().all(|c| c["status"] == "pass"));
}

#[test]
fn audit_catches_a_corrupted_cache() {
    let sb = Sandbox::new();
    let a1 = sb.quiver("a1.q", A1);
    assert_eq!(code(&sb.run(&["classify", "--quiver", s(&a1), "--dim", "2"])), 0);
    assert_eq!(code(&sb.run(&["verify", "--quiver", s(&a1), "--suite", "assoc", "--audit-cache"])), 0);

    let text = std::fs::read_to_string(sb.cache()).unwrap();
    let line = text.lines().find(|l| l.contains("\taut\t")).expect("an aut record");
    let value = line.rsplit('\t').next().unwrap();
    let corrupted = text.replacen(line, &format!("{}\t{}", &line[..line.len() - value.len() - 1], value.parse::<u64>().unwrap() + 1), 1);
    std::fs::write(sb.cache(), corrupted).unwrap();

    let out = sb.run(&["verify", "--quiver", s(&a1), "--suite", "assoc", "--audit-cache"]);
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).contains("cache[aut"));
}
