use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_decigibbs"));
    cmd.env_remove("DECIGIBBS_SEED");
    cmd
}

fn run_in(dir: &Path, args: &[&str]) -> Output {
    bin().current_dir(dir).args(args).output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn manifest(path: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn kernel_at_infinite_temperature_is_uniform() {
    let out = bin().args(["kernel", "--box", "1", "--beta", "0", "--h", "0", "--bc", "+"]).output().unwrap();
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut rows = csv::Reader::from_reader(text.as_bytes());
    let mut count = 0;
    for row in rows.records() {
        let row = row.unwrap();
        let p: f64 = row[2].parse().unwrap();
        assert!((p - 1.0 / 512.0).abs() < 1e-15);
        assert_eq!(row[1].len(), 9);
        count += 1;
    }
    assert_eq!(count, 512);
}

#[test]
fn single_site_kernel_matches_closed_form() {
    let out = bin().args(["kernel", "--box", "0", "--beta", "0.7", "--h", "0.1", "--bc", "-"]).output().unwrap();
    let text = String::from_utf8(out.stdout).unwrap();
    let plus: f64 = text.lines().nth(2).unwrap().split(',').nth(2).unwrap().parse().unwrap();
    // local field 4 * (-1) + h against the opposite sign
    let f: f64 = -4.0 + 0.1;
    let expect = (0.7 * f).exp() / ((0.7 * f).exp() + (-0.7 * f).exp());
    assert!((plus - expect).abs() < 1e-14);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let unknown = run_in(dir.path(), &["nosuch"]);
    assert_eq!(code(&unknown), 2);
    assert!(String::from_utf8_lossy(&unknown.stderr).contains("Usage"));
    assert_eq!(code(&run_in(dir.path(), &["kernel", "--beta", "1"])), 2);
    assert_eq!(code(&run_in(dir.path(), &["kernel", "--box", "1", "--beta", "abc"])), 2);
    assert_eq!(code(&run_in(dir.path(), &["--help"])), 0);
    // beyond the enumeration cap
    assert_eq!(code(&run_in(dir.path(), &["kernel", "--box", "3", "--beta", "1"])), 1);
    assert_eq!(code(&run_in(dir.path(), &["decimate", "--in", "missing.txt", "--out", "x.txt"])), 1);
    assert_eq!(code(&run_in(dir.path(), &["sample", "--beta=-1", "--n", "1", "--out", "s.csv"])), 1);
}

#[test]
fn refuses_to_overwrite_without_force() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["sample", "--beta", "0.3", "--n", "1", "--sweeps", "200", "--burn-in", "10", "--out", "s.csv"];
    assert_eq!(code(&run_in(dir.path(), &args)), 0);
    let before = fs::read(dir.path().join("s.csv")).unwrap();
    assert_eq!(code(&run_in(dir.path(), &args)), 1);
    let mut forced = vec!["--force"];
    forced.extend(args.iter().map(|a| if *a == "0.3" { "0.9" } else { a }));
    assert_eq!(code(&run_in(dir.path(), &forced)), 0);
    assert_ne!(fs::read(dir.path().join("s.csv")).unwrap(), before);
}

#[test]
fn seed_precedence() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("c.toml"), "seed = 5\nsweeps = 300\nburn-in = 10\n").unwrap();
    let base = ["sample", "--config", "c.toml", "--beta", "0.4", "--n", "1"];
    let seed_of = |extra: &[&str], env: Option<&str>, name: &str| {
        let mut cmd = bin();
        cmd.current_dir(dir.path()).args(base).args(extra).args(["--out", name]);
        if let Some(v) = env {
            cmd.env("DECIGIBBS_SEED", v);
        }
        assert_eq!(code(&cmd.output().unwrap()), 0);
        let m = manifest(&dir.path().join(name.replace(".csv", ".manifest.json")));
        assert_eq!(m["params"]["sweeps"], 300);
        m["params"]["seed"].as_u64().unwrap()
    };
    assert_eq!(seed_of(&[], None, "a.csv"), 5);
    assert_eq!(seed_of(&[], Some("7"), "b.csv"), 7);
    assert_eq!(seed_of(&["--seed", "9"], Some("7"), "c.csv"), 9);
}

#[test]
fn decimate_keeps_even_sites() {
    let dir = tempfile::tempdir().unwrap();
    let field = "n=2 bc=+\n+-+-+\n-----\n+-+--\n-----\n-+-++\n";
    fs::write(dir.path().join("f.txt"), field).unwrap();
    assert_eq!(code(&run_in(dir.path(), &["decimate", "--in", "f.txt", "--out", "g.txt"])), 0);
    let image = fs::read_to_string(dir.path().join("g.txt")).unwrap();
    let rows: Vec<&str> = image.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows, ["n=1 bc=+", "+++", "++-", "--+"]);
    assert!(dir.path().join("g.manifest.json").exists());
}

fn replay_identical(dir: &Path, manifest_name: &str) {
    let out = run_in(dir, &["replay", manifest_name, "--into", "again"]);
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert_eq!(code(&out), 0, "{stdout} {}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout.contains("identical"));
    assert!(!stdout.contains("differs"));
}

#[test]
fn replay_reproduces_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "potential", "--mode", "mc", "--beta", "0.5", "--mmax", "2", "--window", "8", "--sweeps", "600",
        "--burn-in", "50", "--field", "minus-origin.txt", "--out", "pot.csv",
    ];
    fs::write(dir.path().join("minus-origin.txt"), "n=1 bc=+\n+++\n+-+\n+++\n").unwrap();
    assert_eq!(code(&run_in(dir.path(), &args)), 0);
    replay_identical(dir.path(), "pot.manifest.json");
    fs::write(dir.path().join("pot.csv"), "tampered\n").unwrap();
    let out = run_in(dir.path(), &["replay", "pot.manifest.json", "--into", "third"]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stdout).contains("differs"));
}

#[test]
fn threads_do_not_change_results() {
    let dir = tempfile::tempdir().unwrap();
    let common = ["--beta", "0.6", "--windows", "8,12", "--sweeps", "600", "--burn-in", "40"];
    for (threads, name) in [("1", "a.csv"), ("3", "b.csv")] {
        let mut args = vec!["--threads", threads, "probe-discontinuity"];
        args.extend(common);
        args.extend(["--out", name]);
        assert_eq!(code(&run_in(dir.path(), &args)), 0);
    }
    assert_eq!(fs::read(dir.path().join("a.csv")).unwrap(), fs::read(dir.path().join("b.csv")).unwrap());
}

#[test]
fn census_improves_with_beta() {
    let dir = tempfile::tempdir().unwrap();
    let fraction = |beta: &str, name: &str| -> (u64, u64) {
        let args = [
            "amoeba-census", "--beta", beta, "--n", "16", "--samples", "60", "--chains", "2", "--burn-in", "300",
            "--thin", "5", "--bins", "0,1000", "--out", name,
        ];
        assert_eq!(code(&run_in(dir.path(), &args)), 0);
        let mut rdr = csv::Reader::from_path(dir.path().join(name)).unwrap();
        let row = rdr.records().next().unwrap().unwrap();
        (row[2].parse().unwrap(), row[4].parse().unwrap())
    };
    let (hot_total, hot_benign) = fraction("0.8", "hot.csv");
    let (cold_total, cold_benign) = fraction("2.0", "cold.csv");
    assert!(hot_total > 0);
    // benign fraction at low temperature is at least the high-temperature one
    assert!(cold_total == 0 || cold_benign * hot_total >= hot_benign * cold_total);
}

#[test]
fn decimated_minus_phase_is_far_from_plus_phase() {
    let dir = tempfile::tempdir().unwrap();
    let value = |nu: &str, name: &str| -> f64 {
        let args = [
            "entropy", "--beta", "0.9", "--n", "4", "--samples", "300", "--burn-in", "200", "--k", "1", "--decimated",
            "--nu-bc", nu, "--out", name,
        ];
        assert_eq!(code(&run_in(dir.path(), &args)), 0);
        let mut rdr = csv::Reader::from_path(dir.path().join(name)).unwrap();
        rdr.records().next().unwrap().unwrap()[2].parse().unwrap()
    };
    let same = value("+", "same.csv");
    let opposite = value("-", "opposite.csv");
    assert!(opposite > same + 0.5, "{opposite} vs {same}");
}
