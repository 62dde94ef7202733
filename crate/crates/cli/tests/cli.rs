use std::process::{Command, Output};

fn ladder(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ladder")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

#[test]
fn single_atom_populations() {
    let o = ladder(&["populations", "--n-atoms", "1", "--nbar1", "1", "--nbar2", "1"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("eta1,eta2,n_atoms"));
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    let s: Vec<f64> = row[5..8].iter().map(|v| v.parse().unwrap()).collect();
    for (a, b) in s.iter().zip([1.0 / 7.0, 2.0 / 7.0, 4.0 / 7.0]) {
        assert!((a - b).abs() < 1e-12);
    }
}

#[test]
fn exit_codes() {
    assert_eq!(code(&ladder(&["--help"])), 0);
    assert_eq!(code(&ladder(&["populations", "--eta", "0.5"])), 1);
    assert_eq!(code(&ladder(&["no-such-command"])), 1);
    assert_eq!(code(&ladder(&["populations", "--n-atoms", "2", "--eta", "1.5"])), 2);
    assert_eq!(code(&ladder(&["g2", "--channel", "22", "--n-atoms", "3", "--eta", "0"])), 2);
    assert_eq!(code(&ladder(&["verify", "--oracle-max-atoms", "2"])), 0);
    assert_eq!(
        code(&ladder(&["verify", "--oracle-max-atoms", "2", "--perturb-weight", "1:1e-3"])),
        3
    );
}

#[test]
fn output_is_deterministic() {
    let args = ["sweep", "--n-atoms", "5", "--grid", "0.1:0.9:17", "--workers", "3"];
    let a = ladder(&args);
    let b = ladder(&args);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(stdout(&a).lines().count(), 18);
    let serial = ladder(&["sweep", "--n-atoms", "5", "--grid", "0.1:0.9:17", "--workers", "1"]);
    assert_eq!(a.stdout, serial.stdout);
}

#[test]
fn output_file_and_json() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g2.json");
    let o = ladder(&[
        "g2", "--channel", "total", "--n-atoms", "1", "--eta", "0.5", "--mode", "interfering", "--theta-deg", "0",
        "--format", "json", "--output", path.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.trim_start().starts_with('['));
    let expected = (1.0 + 0.5 + 0.25) / 2.25;
    let value: f64 = text
        .split("\"g2_total\":")
        .nth(1)
        .unwrap()
        .trim_start()
        .split([',', '\n', '}'])
        .next()
        .unwrap()
        .parse()
        .unwrap();
    assert!((value - expected).abs() < 1e-12);
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.json");
    std::fs::write(&path, r#"{"n_atoms": 4, "eta": 0.3}"#).unwrap();
    let from_file = ladder(&["populations", "--config", path.to_str().unwrap()]);
    let direct = ladder(&["populations", "--n-atoms", "4", "--eta", "0.3"]);
    assert_eq!(code(&from_file), 0);
    assert_eq!(from_file.stdout, direct.stdout);
    let overridden = ladder(&["populations", "--config", path.to_str().unwrap(), "--n-atoms", "6"]);
    assert_eq!(overridden.stdout, ladder(&["populations", "--n-atoms", "6", "--eta", "0.3"]).stdout);
    std::fs::write(&path, r#"{"n_atoms": 4, "bogus": 1}"#).unwrap();
    assert_eq!(code(&ladder(&["populations", "--config", path.to_str().unwrap()])), 1);
}

#[test]
fn figure_csv() {
    let o = ladder(&["figure", "--id", "3"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert_eq!(text.lines().next(), Some("series,eta,value"));
    assert_eq!(text.lines().count(), 1 + 3 * 201);
    assert_eq!(code(&ladder(&["figure", "--id", "5"])), 1);
}

#[test]
fn atom_number_sweep_in_interfering_mode() {
    let o = ladder(&[
        "sweep", "--param", "n-atoms", "--values", "1,2,200", "--eta", "0.01", "--mode", "interfering", "--theta-deg",
        "0",
    ]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    let header: Vec<&str> = text.lines().next().unwrap().split(',').collect();
    let col = header.iter().position(|h| *h == "g2_total").unwrap();
    let g2: Vec<f64> = text.lines().skip(1).map(|l| l.split(',').nth(col).unwrap().parse().unwrap()).collect();
    assert_eq!(g2.len(), 3);
    for (n, g) in [1.0, 2.0, 200.0].iter().zip(&g2) {
        assert!((g - (2.0 - 1.0 / n)).abs() < 0.05, "N={n}: {g}");
    }
}
