use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Stdio};

use fairdiv::syntax::parse_formula;

const QUADRATIC: &str = "all a,b[ex x[b^2 + 4 a < 0 \\/ x = 1/(a x + b)]]";

struct Out {
    code: i32,
    stdout: String,
    stderr: String,
}

fn fairdiv(args: &[&str], stdin: &str) -> Out {
    let mut child = Command::new(env!("CARGO_BIN_EXE_fairdiv"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(stdin.as_bytes()).unwrap();
    let o = child.wait_with_output().unwrap();
    Out {
        code: o.status.code().unwrap_or(-1),
        stdout: String::from_utf8(o.stdout).unwrap(),
        stderr: String::from_utf8(o.stderr).unwrap(),
    }
}

fn squash(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn tmp(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name)
}

#[test]
fn clear_modes_on_the_quadratic() {
    let want = [
        ("noguard", "all a,b[ex x[b^2 + 4 a < 0 \\/ a x^2 + b x - 1 = 0]]"),
        ("naive", "all a,b[ex x[b^2 + 4 a < 0 \\/ [a x^2 + b x - 1 = 0 /\\ a x + b /= 0]]]"),
        ("fair", "all a,b[ex x[b^2 + 4 a < 0 \\/ [b = 0 /\\ a = 0] \\/ [a x^2 + b x - 1 = 0 /\\ a x + b /= 0]]]"),
    ];
    for (mode, line) in want {
        let o = fairdiv(&["clear", "--mode", mode], QUADRATIC);
        assert_eq!(o.code, 0, "{}", o.stderr);
        assert_eq!(squash(&o.stdout), squash(line), "mode {mode}");
        assert!(o.stderr.is_empty());
    }
}

#[test]
fn clear_reads_files_and_folds_constants() {
    let path = tmp("half.txt");
    std::fs::write(&path, "[x = 1/2]\n").unwrap();
    let o = fairdiv(&["clear", "--mode", "noguard", path.to_str().unwrap()], "");
    assert_eq!((o.code, o.stdout.as_str()), (0, "x = 1/2\n"));
    let o = fairdiv(&["clear", "--mode", "noguard", "-f", "[x = 1/2]"], "");
    assert_eq!(o.stdout, "x = 1/2\n");
}

#[test]
fn clear_emitters() {
    let o = fairdiv(&["clear", "--emit", "smt2"], "ex x[1/x^2 < 0]");
    assert_eq!(o.code, 0);
    assert!(o.stdout.contains("(assert (exists ((x Real))"), "{}", o.stdout);
    assert!(o.stdout.ends_with("(check-sat)\n"));
    let o = fairdiv(&["clear", "--emit", "qepcad"], "ex x[1/x^2 < 0]");
    assert_eq!(o.code, 0);
    assert!(o.stdout.contains("(E x)"), "{}", o.stdout);
    assert!(o.stdout.ends_with("finish\n"));
}

#[test]
fn trace_lists_the_ladder() {
    let o = fairdiv(&["clear", "--trace"], "all a,b[ex x[x - 1/(a x + b*(1/(b+1))) = 0]]");
    assert_eq!(o.code, 0);
    for label in ["N_1 = {false}", "N_2 = ", "N_3 = ", "G_1 = false", "G_2 = ", "G_3 = ", "H_3 = ", "H_0 = "] {
        assert!(o.stdout.contains(label), "{label} missing:\n{}", o.stdout);
    }
    assert!(o.stdout.contains("denominator b + 1 (s = 1)"));
}

#[test]
fn peval_fixtures() {
    let h = "x*(1/y) > 0 /\\ x < 5 \\/ U1";
    let same = |out: &str, want: &str| assert_eq!(parse_formula(out.trim()).unwrap(), parse_formula(want).unwrap(), "{out}");
    same(&fairdiv(&["peval", "--at", "x=0"], h).stdout, "0*(1/y) > 0 /\\ true \\/ U1");
    same(&fairdiv(&["peval", "--at", "y=0"], h).stdout, "U2 /\\ x < 5 \\/ U1");
    same(&fairdiv(&["peval"], h).stdout, h);
    let o = fairdiv(&["peval", "--at", "y=0", "--at", "x=0"], "x*(y^2 - 1) /= 0 /\\ y*(1/x) < 3");
    assert_eq!(o.stdout, "false /\\ U1\n");
    let o = fairdiv(&["peval", "--at", "y=3"], "ex x[x/y > 1 /\\ x/(y - 3) > x^2]");
    same(&o.stdout, "ex x[x/3 > 1 /\\ U1]");
    let o = fairdiv(&["peval", "--at", "x=3/4"], "x < 1");
    assert_eq!(o.stdout, "true\n");
}

#[test]
fn check_labels_and_traces() {
    let o = fairdiv(&["check"], "ex x,y[x + y = 3 x/(x - y) /\\ y + 1 = 2 x]");
    assert_eq!(o.code, 1);
    assert!(o.stdout.starts_with("not-fair-sat-on-grid\n"), "{}", o.stdout);
    let o = fairdiv(&["check", "--grid", "auto"], "all y[y^2*(1 + 1/y^2) > 0]");
    assert_eq!(o.code, 0);
    assert!(o.stdout.starts_with("fair-sat\n"));
    let o = fairdiv(&["check", "--grid", "x:-1,0,1"], "[ex x[x = 0]]");
    assert_eq!((o.code, o.stdout.as_str()), (0, "fair-sat\nstep 1: x=0 -> true\n"));
    let o = fairdiv(&["check", "--grid", "y:0"], "ex x[x = 0]");
    assert_eq!((o.code, o.stdout.as_str()), (7, "unknown\n"));
    for line in fairdiv(&["check"], "all y[y^2*(1 + 1/y^2) > 0]").stdout.lines().skip(1) {
        let (head, rest) = line.split_once(" -> ").unwrap();
        assert!(head.starts_with("step ") && head.contains(": y="), "{line}");
        assert!(!rest.is_empty());
    }
}

#[test]
fn exit_codes() {
    let o = fairdiv(&["clear"], "ex x[x < 1");
    assert_eq!(o.code, 2);
    assert!(o.stdout.is_empty() && o.stderr.contains("parse error"));
    assert_eq!(fairdiv(&["clear", "--mode", "loose"], "x = 0").code, 2);
    assert_eq!(fairdiv(&["frobnicate"], "").code, 2);
    assert_eq!(fairdiv(&["peval", "--at", "x"], "x = 0").code, 2);
    assert_eq!(fairdiv(&["check", "--grid", "x:1,q"], "ex x[x = 0]").code, 2);
    let o = fairdiv(&["clear"], "ex x[x = 1/y] /\\ U1");
    assert_eq!(o.code, 3);
    assert!(o.stdout.is_empty());
    // free variables have no fair-SAT grid semantics
    assert_eq!(fairdiv(&["check"], "x = 0").code, 3);
    assert_eq!(fairdiv(&["clear", "/no/such/file"], "").code, 8);
}

const MOCK: &str = r#"# capture stdin, optionally stall, then reply
cat > "$1"
if [ -n "$3" ]; then sleep "$3"; fi
printf '%s\n' "$2"
"#;

/// Written under a private name and renamed, so a concurrent reader never
/// sees a partial script.
fn mock_script() -> PathBuf {
    let script = tmp("mock_backend.sh");
    let part = tmp(&format!("mock_backend.{:?}.part", std::thread::current().id()));
    std::fs::write(&part, MOCK).unwrap();
    std::fs::rename(&part, &script).unwrap();
    script
}

/// Config running the mock through `/bin/sh`, so no file needs the
/// executable bit.
fn mock_config(tag: &str, reply: &str, stall: &str) -> (PathBuf, PathBuf) {
    let script = mock_script();
    let capture = tmp(&format!("mock_{tag}.in"));
    let cfg = tmp(&format!("mock_{tag}.conf"));
    let args = format!("{} {} {} {}", script.display(), capture.display(), reply, stall);
    std::fs::write(&cfg, format!("backend.name = /bin/sh\nbackend.args = {}\n", args.trim_end())).unwrap();
    (cfg, capture)
}

#[test]
fn solve_pipes_the_fair_translation() {
    let (cfg, capture) = mock_config("true", "true", "");
    let o = fairdiv(&["solve", "--config", cfg.to_str().unwrap()], QUADRATIC);
    assert_eq!((o.code, o.stdout.as_str()), (0, "true\n"), "{}", o.stderr);
    let sent = std::fs::read_to_string(&capture).unwrap();
    let clear = fairdiv(&["clear", "--emit", "qepcad"], QUADRATIC).stdout;
    assert_eq!(sent, clear);

    let (cfg, capture) = mock_config("unsat", "unsat", "");
    let o = fairdiv(&["solve", "--emit", "smt2", "--config", cfg.to_str().unwrap()], "ex x[1/x^2 < 0]");
    assert_eq!((o.code, o.stdout.as_str()), (1, "false\n"));
    assert!(std::fs::read_to_string(&capture).unwrap().contains("(check-sat)"));
}

#[test]
fn solve_failures() {
    let (cfg, _) = mock_config("garbage", "maybe", "");
    let o = fairdiv(&["solve", "--config", cfg.to_str().unwrap()], QUADRATIC);
    assert_eq!(o.code, 6);
    assert!(o.stdout.is_empty());

    let o = fairdiv(&["solve", "--backend", "/no/such/solver"], QUADRATIC);
    assert_eq!(o.code, 4);

    let (cfg, _) = mock_config("slow", "true", "5");
    let o = fairdiv(&["solve", "--timeout-seconds", "1", "--config", cfg.to_str().unwrap()], QUADRATIC);
    assert_eq!(o.code, 5);

    assert_eq!(fairdiv(&["solve"], QUADRATIC).code, 2);
    let bad = tmp("bad.conf");
    std::fs::write(&bad, "backend.colour = red\n").unwrap();
    assert_eq!(fairdiv(&["solve", "--config", bad.to_str().unwrap()], QUADRATIC).code, 2);
}

#[test]
fn solve_custom_patterns() {
    let script = mock_script();
    let cfg = tmp("mock_qe.conf");
    let capture = tmp("mock_qe.in");
    std::fs::write(
        &cfg,
        format!(
            "backend.name = /bin/sh\nbackend.args = {} {} TRUE\nbackend.true_pattern = ^TRUE$\nbackend.false_pattern = ^FALSE$\n",
            script.display(),
            capture.display()
        ),
    )
    .unwrap();
    let o = fairdiv(&["solve", "--config", cfg.to_str().unwrap()], "all x[x^2 >= 0]");
    assert_eq!((o.code, o.stdout.as_str()), (0, "true\n"));
}
