//! The binary end to end: exit codes, report shape, gen/verify round trips.

use std::io::Write;
use std::process::{Command, Output, Stdio};

fn run(args: &[&str], stdin: Option<&str>) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_treegame"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    child.stdin.take().unwrap().write_all(stdin.unwrap_or("").as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn round_trip(gen: &[&str], verify: &[&str]) {
    let g = run(gen, None);
    assert_eq!(g.status.code(), Some(0), "{gen:?}: {}", String::from_utf8_lossy(&g.stderr));
    let text = stdout(&g);
    assert!(text.ends_with('\n'));
    let v = run(verify, Some(&text));
    assert_eq!(v.status.code(), Some(0), "{verify:?}: {}", stdout(&v));
    assert_eq!(stdout(&v), "{\"schema\":1,\"ok\":true,\"violations\":[]}\n");
}

#[test]
fn squares_in_words() {
    let o = run(&["verify", "squarefree", "--word", "hotshots"], None);
    assert_eq!(o.status.code(), Some(1));
    let json: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(json["ok"], false);
    assert_eq!(json["violations"][0]["start"], 0);
    assert_eq!(json["violations"][0]["half"], 4);
    assert_eq!(run(&["verify", "squarefree", "--word", "infinite"], None).status.code(), Some(0));
}

#[test]
fn advisor_outputs() {
    let o = run(&["params", "mink", "--C", "1"], None);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "6\n");
    let o = run(&["params", "eps", "--C", "2"], None);
    assert!(stdout(&o).contains("epsilon = 1/128 (0.007812500000)"));
    let o = run(&["params", "beta", "--C", "1", "--k", "6"], None);
    assert!(stdout(&o).starts_with("beta = 3372446551/2147483648 (1.5704"));
    assert_eq!(run(&["params", "beta", "--C", "1", "--k", "5"], None).status.code(), Some(2));
}

#[test]
fn exit_codes_for_bad_input() {
    // not certified
    assert_eq!(run(&["gen", "beck", "--c", "3/2", "--beta", "7/4", "--N", "3", "--length", "5"], None).status.code(), Some(2));
    assert_eq!(run(&["gen", "miller", "--alphabet", "2", "--forbid", "0", "--beta", "3/2", "--length", "5"], None).status.code(), Some(2));
    // malformed
    assert_eq!(run(&["gen", "beck", "--c", "1.5", "--beta", "7/4", "--length", "5"], None).status.code(), Some(2));
    assert_eq!(run(&["verify", "beck", "--c", "3/2", "--N", "2"], Some("01x")).status.code(), Some(2));
    assert_eq!(run(&["gen", "squarefree", "--lists", "primes", "--length", "5"], None).status.code(), Some(2));
    assert_eq!(run(&["gen", "dioph", "--denoms", "pow2", "--k", "6", "--bits", "8", "--bogus"], None).status.code(), Some(2));
}

#[test]
fn generators_round_trip() {
    round_trip(
        &["gen", "miller", "--alphabet", "2", "--forbid", "0,0,0", "--beta", "3/2", "--length", "300"],
        &["verify", "miller", "--alphabet", "2", "--forbid", "0,0,0"],
    );
    round_trip(
        &["gen", "squarefree", "--lists", "random:7,20", "--length", "300"],
        &["verify", "squarefree", "--lists", "random:7,20"],
    );
    round_trip(
        &["gen", "squarefree", "--lists", "hash:3,9,5", "--length", "300"],
        &["verify", "squarefree", "--lists", "hash:3,9,5"],
    );
    round_trip(&["gen", "beck", "--c", "3/2", "--beta", "7/4", "--length", "300"], &["verify", "beck", "--c", "3/2", "--N", "26"]);
    round_trip(
        &["gen", "blocks", "--epsilon", "1/4", "--beta", "15/8", "--length", "150"],
        &["verify", "blocks", "--epsilon", "1/4", "--N", "50"],
    );
    round_trip(&["gen", "dioph", "--denoms", "fib", "--k", "7", "--bits", "40"], &["verify", "dioph", "--denoms", "fib", "--k", "7"]);
}

#[test]
fn dioph_golden() {
    let o = run(&["gen", "dioph", "--denoms", "pow2", "--k", "6", "--beta", "auto", "--bits", "64"], None);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), format!("{}\n", &"00001".repeat(13)[..64]));
    assert!(String::from_utf8_lossy(&o.stderr).contains("warning"));
}

#[test]
fn files_in_and_out() {
    let dir = std::env::temp_dir().join(format!("treegame-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let lists = dir.join("lists.txt");
    std::fs::write(&lists, "0,1,2,3\n0,1,2,3\n4,5,6,7\n0,1,2,3\n").unwrap();
    let out = dir.join("word.txt");
    let spec = format!("file:{}", lists.display());
    let g = run(&["gen", "squarefree", "--lists", &spec, "--length", "4", "--output", out.to_str().unwrap()], None);
    assert_eq!(g.status.code(), Some(0));
    assert_eq!(std::fs::read_to_string(&out).unwrap(), "0 1 4 0\n");
    let v = run(&["verify", "squarefree", "--lists", &spec, "--input", out.to_str().unwrap()], None);
    assert_eq!(v.status.code(), Some(0));
    let denoms = dir.join("denoms.txt");
    std::fs::write(&denoms, "# odd\n3\n5\n").unwrap();
    let spec = format!("file:{}", denoms.display());
    let g = run(&["gen", "dioph", "--denoms", &spec, "--k", "6", "--bits", "20"], None);
    assert_eq!(g.status.code(), Some(0));
    assert_eq!(run(&["verify", "dioph", "--denoms", &spec, "--k", "6"], Some(&stdout(&g))).status.code(), Some(0));
    std::fs::remove_dir_all(&dir).unwrap();
}
