//! End-to-end tests against the built binary: documented examples,
//! exit codes, golden output, and config-file handling.

use std::process::{Command, Output};

fn mca(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mca"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn eval_flip_prints_both_selectors() {
    let out = mca(&["eval", "--effect=power", "#flip <0|0>"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).trim(), "{<1|0>, <1|1>}");
}

#[test]
fn eval_identity_application() {
    let out = mca(&["eval", "<0|0> <1|0>"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).trim(), "<1|0>");
}

#[test]
fn eval_counter_demo_reaches_two() {
    let out = mca(&[
        "eval",
        "--effect=state",
        "--state0=0",
        "#get (#inc (#inc <0|0>))",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let first = text.lines().next().unwrap();
    assert_eq!(first, "σ=0: {(2, <1|0 (0 1)>)}");
}

#[test]
fn eval_exit_codes() {
    // parse error
    let out = mca(&["eval", "<1|"]);
    assert_eq!(out.status.code(), Some(3));
    // fuel exhaustion on the diverging term
    let out = mca(&["eval", "--fuel=100", "<0|0 0> <0|0 0>"]);
    assert_eq!(out.status.code(), Some(2));
    // unsupported primitive under the partial effect
    let out = mca(&["eval", "#flip <0|0>"]);
    assert_eq!(out.status.code(), Some(4));
    // timeout-as-bottom maps divergence into the empty computation
    let out = mca(&["eval", "--fuel=100", "--timeout-as-bottom", "<0|0 0> <0|0 0>"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).trim(), "∅");
}

#[test]
fn compile_examples() {
    let out = mca(&["compile", "0", "0"]);
    assert_eq!(stdout(&out).trim(), "S K K");
    let out = mca(&["compile", "1", "0"]);
    assert_eq!(stdout(&out).trim(), "K");
    // compiled output parses back and behaves like the closure
    let compiled = stdout(&mca(&["compile", "0", "0 0"]));
    let applied = format!("({}) <1|1>", compiled.trim());
    let direct = mca(&["eval", &format!("<0|0 0> <1|1>")]);
    let via_sk = mca(&["eval", &applied]);
    assert_eq!(stdout(&direct).trim(), stdout(&via_sk).trim());
}

#[test]
fn machine_final_code_matches_eval_and_trace_is_golden() {
    let out = mca(&["machine", "S K K <1|1>"]);
    assert_eq!(stdout(&out).trim(), "<1|1>");
    let trace = mca(&["machine", "--trace", "S K K <1|1>"]);
    let expected = include_str!("../../core/tests/golden/skk_trace.txt");
    assert_eq!(stdout(&trace), expected);
    // diverging term exits 2
    let out = mca(&["machine", "--fuel=50", "<0|0 0> <0|0 0>"]);
    assert_eq!(out.status.code(), Some(2));
    // effectful primitive is stuck: exit 4
    let out = mca(&["machine", "#flip <1|0>"]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn reports_are_byte_stable_for_a_fixed_seed() {
    let a = mca(&["check", "sk", "--effect=partial", "--budget=40", "--seed=9"]);
    let b = mca(&["check", "sk", "--effect=partial", "--budget=40", "--seed=9"]);
    assert_eq!(stdout(&a), stdout(&b));
    assert_eq!(a.status.code(), Some(0));
}

#[test]
fn check_consistency_distinguishes_cps_separators() {
    let pl = mca(&[
        "check",
        "consistency",
        "--modality=cps",
        "--separator=pl",
        "--budget=60",
    ]);
    assert_eq!(pl.status.code(), Some(0), "{}", stdout(&pl));
    let all = mca(&[
        "check",
        "consistency",
        "--modality=cps",
        "--separator=all",
        "--budget=60",
    ]);
    assert_eq!(all.status.code(), Some(1), "{}", stdout(&all));
    assert!(stdout(&all).contains("certifies ⊤ → ⊥"));
}

#[test]
fn check_consistency_reports_the_inf_only_counterexample() {
    let out = mca(&[
        "check",
        "consistency",
        "--modality=inf-only",
        "--timeout-as-bottom",
        "--fuel=400",
        "--budget=40",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("<0|<0|0 0> <0|0 0>>"));
}

#[test]
fn config_file_drives_a_run() {
    let dir = std::env::temp_dir().join("mca-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("demo.cfg");
    std::fs::write(
        &path,
        "effect = state\nstate0 = 1\nfuel = 600\nprobes = 0..3\n",
    )
    .unwrap();
    let out = mca(&["eval", "--config", path.to_str().unwrap(), "#get <0|0>"]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    let text = stdout(&out);
    assert!(text.contains("σ=1: {(1, <1|0 1>)}"), "{text}");

    // malformed config exits 4
    std::fs::write(&path, "nonsense\n").unwrap();
    let out = mca(&["eval", "--config", path.to_str().unwrap(), "0 0"]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn assembly_suite_accepts_declared_assemblies() {
    let dir = std::env::temp_dir().join("mca-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("asm.cfg");
    std::fs::write(
        &path,
        concat!(
            "modality = partial\n",
            "prop first = base { <1|0>: top, default: bot }\n",
            "prop second = base { <1|1>: top, default: bot }\n",
            "assembly X = { a: first via <0|<1|0>>, b: second via <0|<1|1>> }\n",
        ),
    )
    .unwrap();
    let out = mca(&[
        "check",
        "assembly",
        "--config",
        path.to_str().unwrap(),
        "--budget=10",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    assert!(stdout(&out).contains("assembly[X]"));
}
