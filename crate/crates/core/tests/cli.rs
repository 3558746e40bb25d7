use std::path::Path;
use std::process::Command;

fn omcorr() -> Command {
    Command::new(env!("CARGO_BIN_EXE_omcorr"))
}

fn write(dir: &Path, name: &str, text: &str) -> std::path::PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

const SMALL: &str = r#"
[lattice]
n_sites = 5
detuning = -1.7

[sweep]
axis = "thermal"
values = [0.0, 0.5, 12.5]
measures = ["negativity", "discord"]
all_pairs = ["photon", "phonon"]

[stability_map]
detuning = { start = -3.0, stop = 3.0, count = 4 }
drive = [15.0, 300.0]

[corr_map]
species_a = "phonon"
species_b = "phonon"
measure = "discord"
"#;

#[test]
fn solve_prints_mean_fields() {
    let out = omcorr().args(["solve", "--n-sites", "3", "--detuning", "-2.5"]).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    for key in ["alpha =", "beta =", "photon_number =", "branch_note = unique", "stable = true"] {
        assert!(text.contains(key), "missing {key:?} in\n{text}");
    }
}

#[test]
fn solve_dumps_covariance() {
    let dir = tempfile::tempdir().unwrap();
    let cov = dir.path().join("cov.csv");
    let status = omcorr()
        .args(["solve", "--n-sites", "3", "--dump-cov"])
        .arg(&cov)
        .status()
        .unwrap();
    assert!(status.success());
    let text = std::fs::read_to_string(&cov).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap().split(',').take(5).collect::<Vec<_>>(), ["X_-1", "Y_-1", "x_-1", "y_-1", "X_0"]);
    assert_eq!(lines.count(), 12);
    assert!(!text.contains('\r'));
}

#[test]
fn flags_override_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", "[lattice]\nn_sites = 3\ng0 = 0.0\ndrive = 10.0\n");
    let run = |extra: &[&str]| {
        let out = omcorr().args(["solve", "--config"]).arg(&cfg).args(extra).output().unwrap();
        assert!(out.status.success());
        String::from_utf8(out.stdout).unwrap()
    };
    let from_file = run(&[]);
    let overridden = run(&["--drive", "20.0"]);
    let n = |s: &str| -> f64 {
        s.lines().find_map(|l| l.strip_prefix("photon_number = ")).unwrap().parse().unwrap()
    };
    // With g0 = 0 the photon number scales as |η|².
    assert!((n(&overridden) / n(&from_file) - 4.0).abs() < 1e-12);
}

#[test]
fn sweep_writes_csv_with_header() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", SMALL);
    let out = dir.path().join("s.csv");
    let res = omcorr().args(["sweep", "-c"]).arg(&cfg).arg("-o").arg(&out).output().unwrap();
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    assert!(!res.stderr.is_empty(), "progress goes to stderr");
    let records = omcorr::output::read_csv(&out).unwrap();
    assert_eq!(records.len(), 3 * 25 * 2);
    assert!(records.iter().all(|r| r.stable && r.value.is_some()));
}

#[test]
fn stability_and_corr_maps() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", SMALL);
    let stab = dir.path().join("stab.csv");
    assert!(omcorr().args(["stability-map", "-c"]).arg(&cfg).arg("-o").arg(&stab).status().unwrap().success());
    let text = std::fs::read_to_string(&stab).unwrap();
    assert_eq!(text.lines().next().unwrap(), "detuning,drive,spectral_abscissa,stable");
    assert_eq!(text.lines().count(), 1 + 8);

    let cm = dir.path().join("cm.csv");
    assert!(omcorr().args(["corr-map", "-c"]).arg(&cfg).arg("-o").arg(&cm).status().unwrap().success());
    let text = std::fs::read_to_string(&cm).unwrap();
    assert_eq!(text.lines().next().unwrap(), "site_i,site_j,species_a,species_b,measure,value");
    assert_eq!(text.lines().count(), 1 + 25);
    assert_eq!(text.lines().filter(|l| l.ends_with(",NaN")).count(), 5);

    let cm2 = dir.path().join("cm2.csv");
    let status = omcorr()
        .args(["corr-map", "-c"])
        .arg(&cfg)
        .args(["--species-a", "photon", "--measure", "negativity", "-o"])
        .arg(&cm2)
        .status()
        .unwrap();
    assert!(status.success());
    let text = std::fs::read_to_string(&cm2).unwrap();
    assert!(text.lines().nth(1).unwrap().contains(",photon,phonon,negativity,"));
}

#[test]
fn stability_map_ranges_from_flags() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s.csv");
    let status = omcorr()
        .args(["stability-map", "--n-sites", "3", "--detuning-range=-2:2:3", "--drive-range", "10:30:2", "-o"])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    assert_eq!(std::fs::read_to_string(&out).unwrap().lines().count(), 7);
}

#[test]
fn thermal_convert_both_ways() {
    let out = omcorr().args(["thermal-convert", "--temperature", "0.15"]).output().unwrap();
    let text = String::from_utf8(out.stdout).unwrap();
    let n: f64 = text.trim().strip_prefix("nbar_m = ").unwrap().parse().unwrap();
    assert!((n - 0.06).abs() < 0.002);
    let out = omcorr().args(["thermal-convert", "--occupancy", "12.5"]).output().unwrap();
    let text = String::from_utf8(out.stdout).unwrap();
    let t: f64 = text.trim().strip_prefix("temperature_k = ").unwrap().parse().unwrap();
    assert!((t - 5.59).abs() / 5.59 < 0.03);
}

#[test]
fn errors_exit_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let bad_key = write(dir.path(), "bad.toml", "[lattice]\nkapa = 0.1\n");
    let out = omcorr().args(["solve", "-c"]).arg(&bad_key).output().unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("kapa"));

    let out = omcorr().args(["solve", "--n-sites", "4"]).output().unwrap();
    assert!(!out.status.success());

    let out = omcorr().args(["sweep", "-o", "/dev/null"]).output().unwrap();
    assert!(!out.status.success(), "missing [sweep] section");

    // Unstable point cannot produce a covariance.
    let out = omcorr()
        .args(["solve", "--n-sites", "3", "--detuning", "1.5", "--drive", "5000", "--dump-cov", "/dev/null"])
        .output()
        .unwrap();
    assert!(!out.status.success());
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", SMALL);
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    assert!(omcorr().args(["sweep", "-c"]).arg(&cfg).arg("-o").arg(&a).status().unwrap().success());
    assert!(omcorr().args(["sweep", "--sequential", "-c"]).arg(&cfg).arg("-o").arg(&b).status().unwrap().success());
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}
