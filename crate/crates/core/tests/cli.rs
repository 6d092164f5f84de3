use std::path::PathBuf;
use std::process::Command;

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn tfs(args: &[&str]) -> (i32, String, String) {
    let args: Vec<String> = args
        .iter()
        .map(|a| {
            if a.contains('.') {
                fixture(a)
            } else {
                a.to_string()
            }
        })
        .collect();
    let out = Command::new(env!("CARGO_BIN_EXE_tfs"))
        .args(&args)
        .output()
        .expect("run tfs");
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

#[test]
fn check_sig() {
    let (code, out, _) = tfs(&["check-sig", "sig_a.sig"]);
    assert_eq!(code, 0);
    assert_eq!(
        out,
        "types: 4\nattrs: 1\nspecies: a b\napprop a f a\nrational: true\n"
    );

    let (code, out, err) = tfs(&["check-sig", "nonmonotone.sig"]);
    assert_eq!(code, 2);
    assert!(out.is_empty());
    assert!(err.contains("(top, a, F)"), "{err}");

    let (code, _, _) = tfs(&["check-sig", "missing.sig"]);
    assert_eq!(code, 2);
}

#[test]
fn resolve() {
    let (code, out, _) = tfs(&["resolve", "sig_a.sig", "f1.fs"]);
    assert_eq!(code, 0);
    assert_eq!(
        out,
        "root q0\nnode q0 a\n---\nroot q0\nnode q0 b\n---\nresolvants: 2\n"
    );

    let (code, out, _) = tfs(&["resolve", "sig_a.sig", "f2.fs"]);
    assert_eq!(code, 0);
    assert_eq!(
        out,
        "root q0\nnode q0 a\nedge q0 f q0\n---\nresolvants: 1\n"
    );

    let (code, out, _) = tfs(&["resolve", "sig_a.sig", "f3.fs"]);
    assert_eq!(code, 1);
    assert_eq!(out, "resolvants: 0\n");

    for fs in ["f1.fs", "f2.fs", "f3.fs"] {
        assert_eq!(
            tfs(&["resolve", "--naive", "sig_a.sig", fs]),
            tfs(&["resolve", "sig_a.sig", fs])
        );
    }
}

#[test]
fn resolve_reports_input_errors() {
    let (code, _, err) = tfs(&["resolve", "sig_a.sig", "unreachable.fs"]);
    assert_eq!(code, 2);
    assert!(err.contains("q1"), "{err}");
}

#[test]
fn sat() {
    assert_eq!(tfs(&["sat", "sig_a.sig", "f1.fs"]).0, 0);
    assert_eq!(
        tfs(&["sat", "sig_a.sig", "f2.fs"]),
        (0, "sat\n".into(), String::new())
    );
    assert_eq!(
        tfs(&["sat", "sig_a.sig", "f3.fs"]),
        (1, "unsat\n".into(), String::new())
    );
}

#[test]
fn witness() {
    let (code, out, _) = tfs(&["witness", "sig_a.sig", "f2.fs"]);
    assert_eq!(code, 0);
    assert_eq!(out, "root q0\nnode q0 a\nedge q0 f q0\n");

    assert_eq!(
        tfs(&["witness", "sig_a.sig", "f3.fs"]),
        (1, "unsat\n".into(), String::new())
    );

    let (code, out, _) = tfs(&["witness", "--model", "sig_a.sig", "f1.fs"]);
    assert_eq!(code, 0);
    assert_eq!(
        out,
        "root q0\nnode q0 a\nnode sp_a a\nedge q0 f sp_a\nedge sp_a f sp_a\n---\n\
         obj q0 a\nobj sp_a a\nval q0 f sp_a\nval sp_a f sp_a\n# designated q0\n"
    );
}

#[test]
fn check_morph() {
    assert_eq!(
        tfs(&["check-morph", "sig_a.sig", "loop_a.morph"]).1,
        "morph\n"
    );
    let (code, out, _) = tfs(&["check-morph", "sig_a.sig", "bare_a.morph"]);
    assert_eq!(code, 1);
    assert!(
        out.starts_with("not a morph: node `n` (a) lacks an edge"),
        "{out}"
    );
}

#[test]
fn unify() {
    let (code, out, _) = tfs(&["unify", "sig_a.sig", "f1.fs", "f2.fs"]);
    assert_eq!(code, 0);
    assert_eq!(
        out,
        "root q0\nnode q0 a\nedge q0 f q0\n---\nresolvants: 1\n"
    );

    assert_eq!(
        tfs(&["unify", "sig_a.sig", "f2.fs", "f3.fs"]),
        (1, "resolvants: 0\n".into(), String::new())
    );

    let (code, out, _) = tfs(&["unify", "sig_a.sig", "f1.fs", "f1.fs"]);
    assert_eq!(code, 0);
    assert!(out.ends_with("resolvants: 2\n"));
}

#[test]
fn truth() {
    assert_eq!(
        tfs(&["truth", "sig_a.sig", "i0.interp", "u0", "f2.fs"]),
        (0, "true\n".into(), String::new())
    );
    assert_eq!(
        tfs(&["truth", "sig_a.sig", "i0.interp", "u0", "f3.fs"]),
        (1, "false\n".into(), String::new())
    );
    let (code, _, err) = tfs(&["truth", "sig_a.sig", "i0.interp", "nobody", "f2.fs"]);
    assert_eq!(code, 2);
    assert!(err.contains("unknown object `nobody`"), "{err}");
}
