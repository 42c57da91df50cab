use std::path::PathBuf;
use std::process::{Command, Output};

use goeritz_core::obstruction::ClassVerdict;
use goeritz_core::{FamilyInstance, Matrix, ObstructionReport};
use serde::Deserialize;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_goeritz"));
    c.env_remove("GO_BUDGET").env_remove("GO_JOBS");
    c
}

fn input(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "inputs", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[derive(Deserialize)]
struct Embed {
    count: usize,
    classes: Vec<Matrix>,
}

#[derive(Deserialize)]
struct Equivariant {
    action: Matrix,
    equivariant_count: usize,
    classes: Vec<ClassVerdict>,
}

#[derive(Deserialize)]
struct Goeritz {
    goeritz: Matrix,
}

#[test]
fn single_crossing_goeritz() {
    let o = run(&["goeritz", "--input", &input("single_crossing.json"), "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let g: Goeritz = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(g.goeritz, Matrix::from_rows(&[[-1]]).unwrap());
}

#[test]
fn embed_fixture_has_two_classes() {
    let o = run(&["embed", "--preset", "12a1019", "--corank", "1", "--sign", "-", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let e: Embed = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(e.count, 2);
    assert_eq!(e.classes.len(), 2);
}

#[test]
fn obstruct_k3() {
    let o = run(&["obstruct", "--preset", "k_n:3", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let r: ObstructionReport = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(r.gamma4p_lower_bound, 3);
    assert!(r.gap_detected);
}

#[test]
fn certificate_and_diagram_inputs_agree_with_preset() {
    let from_file = run(&["obstruct", "--input", &input("k2_certificate.json"), "--format", "json"]);
    let r: ObstructionReport = serde_json::from_str(&stdout(&from_file)).unwrap();
    assert_eq!(r.gamma4p_lower_bound, 2);
    assert!(r.defaulted_action.is_some());

    let o = run(&["equivariant", "--input", &input("k2_diagram.json"), "--format", "json"]);
    let e: Equivariant = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(e.classes.len(), 2);
    assert_eq!(e.equivariant_count, 0);
    assert_eq!(e.action, goeritz_core::family::action_fn(2).unwrap());
}

#[test]
fn reports_round_trip() {
    for args in [
        vec!["obstruct", "--preset", "12a1019"],
        vec!["obstruct", "--preset", "k_n:2"],
        vec!["equivariant", "--preset", "12a1019"],
        vec!["family", "--preset", "k_n:3"],
    ] {
        let mut a = args.clone();
        a.extend(["--format", "json"]);
        let text = stdout(&run(&a));
        let again = match args[0] {
            "obstruct" => serde_json::to_string_pretty(&serde_json::from_str::<ObstructionReport>(&text).unwrap()),
            "family" => serde_json::to_string_pretty(&serde_json::from_str::<FamilyInstance>(&text).unwrap()),
            _ => {
                let v: Vec<ClassVerdict> =
                    serde_json::from_value(serde_json::from_str::<serde_json::Value>(&text).unwrap()["classes"].clone())
                        .unwrap();
                assert_eq!(v.len(), 2);
                continue;
            }
        }
        .unwrap();
        assert_eq!(again.trim_end(), text.trim_end(), "{:?}", args);
    }
}

#[test]
fn output_is_independent_of_thread_count() {
    for verb in ["embed", "equivariant", "obstruct"] {
        let one = run(&[verb, "--preset", "k_n:4", "--jobs", "1", "--format", "json"]);
        let many = run(&[verb, "--preset", "k_n:4", "--jobs", "6", "--format", "json"]);
        assert_eq!(one.stdout, many.stdout, "{}", verb);
        let text1 = run(&[verb, "--preset", "k_n:4", "--jobs", "1"]);
        let text6 = bin().args([verb, "--preset", "k_n:4"]).env("GO_JOBS", "6").output().unwrap();
        assert_eq!(text1.stdout, text6.stdout, "{}", verb);
    }
}

#[test]
fn budget_exhaustion_exits_two() {
    let o = run(&["embed", "--preset", "k_n:4", "--budget", "100"]);
    assert_eq!(o.status.code(), Some(2));
    let o = bin().args(["obstruct", "--preset", "k_n:4", "--format", "json"]).env("GO_BUDGET", "100").output().unwrap();
    assert_eq!(o.status.code(), Some(2));
    let r: ObstructionReport = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(!r.certifying);
    assert_eq!(r.gamma4p_lower_bound, 1);
}

#[test]
fn schema_errors_are_line_anchored() {
    let dir = std::env::temp_dir().join(format!("goeritz-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.json");
    std::fs::write(&bad, "{\n  \"regions\": 3,\n  \"crossings\": [[0, 1, -1], [1, 2, 7]],\n  \"colour\": 1\n}\n").unwrap();
    let o = run(&["goeritz", "--input", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("bad.json:4:"), "{}", err);

    std::fs::write(&bad, "[[1, 2],\n [3]]").unwrap();
    let o = run(&["embed", "--input", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));

    let o = run(&["embed", "--preset", "k_n:x"]);
    assert_eq!(o.status.code(), Some(1));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn verbs_reject_unsuitable_inputs() {
    let o = run(&["obstruct", "--input", &input("figure_eight_form.json")]);
    assert_eq!(o.status.code(), Some(1));
    let o = run(&["equivariant", "--input", &input("single_crossing.json")]);
    assert_eq!(o.status.code(), Some(1));
    let o = run(&["goeritz", "--input", &input("k2_certificate.json")]);
    assert_eq!(o.status.code(), Some(1));
    let o = run(&["family", "--preset", "12a1019"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn exactly_one_source() {
    let o = run(&["embed"]);
    assert_eq!(o.status.code(), Some(1));
    let o = run(&["embed", "--preset", "k_n:2", "--input", &input("figure_eight_form.json")]);
    assert_eq!(o.status.code(), Some(1));
}
