use std::process::Command;

fn rcc8(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_rcc8")).args(args).output().unwrap()
}

#[test]
fn exit_codes_of_the_binary() {
    assert_eq!(rcc8(&["--version"]).status.code(), Some(0));
    assert_eq!(rcc8(&["solve"]).status.code(), Some(1));
    assert_eq!(rcc8(&["flaws", "--thresholds", "n=many"]).status.code(), Some(1));
    let out = rcc8(&["portfolio", "optimize", "--records", "/nonexistent/records.csv", "--budget", "10"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("/nonexistent/records.csv"));
}

#[test]
fn subsets_dump_to_stdout() {
    let out = rcc8(&["subsets", "dump"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("relation,mask,np8,h8,c8,q8,bhat,size_B,"));
    assert_eq!(text.lines().count(), 257);
}

#[test]
fn generated_files_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for out in [&a, &b] {
        let s = rcc8(&["generate", "--model", "A", "--n", "25", "--d", "8.5", "--seed", "4", "--count", "3", "--out", out.to_str().unwrap()]);
        assert!(s.status.success());
    }
    for k in 0..3 {
        let name = format!("A_n25_d8.5_{k:04}.rcc8");
        assert_eq!(std::fs::read(a.join(&name)).unwrap(), std::fs::read(b.join(&name)).unwrap());
    }
}
