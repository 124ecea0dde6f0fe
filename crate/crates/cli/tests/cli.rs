use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

const TUBE: &str = "[tube]\nmic_positions = [-0.28, -0.2, 0.05, 0.13]\nsample_thickness = 0.00089\ndiameter = 0.0998\n";

fn tubeloss(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tubeloss"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn setup() -> TempDir {
    let dir = TempDir::new().unwrap();
    std::fs::write(dir.path().join("tube.toml"), TUBE).unwrap();
    std::fs::write(
        dir.path().join("scenario.toml"),
        "seed = 4\nsnr_db = 40.0\n[grid]\nstart = 100.0\nstop = 2500.0\nstep = 10.0\n\
         [[layer]]\nkind = \"limp-mass\"\nsurface_density = 1.135\n",
    )
    .unwrap();
    dir
}

fn text(b: &[u8]) -> String {
    String::from_utf8_lossy(b).into_owned()
}

#[test]
fn synth_then_stl_end_to_end() {
    let dir = setup();
    let d = dir.path();
    let out = tubeloss(
        d,
        &[
            "--config",
            "tube.toml",
            "synth",
            "scenario.toml",
            "-o",
            "m.csv",
            "--repetitions",
            "3",
        ],
    );
    assert_eq!(out.status.code(), Some(0), "{}", text(&out.stderr));
    for i in 1..=3 {
        assert!(d.join(format!("m_{i}.csv")).exists());
    }

    let out = tubeloss(
        d,
        &[
            "--config",
            "tube.toml",
            "--rep-mode",
            "power",
            "stl",
            "m_1.csv",
            "m_2.csv",
            "m_3.csv",
            "--csv",
            "n.csv",
            "--bands-csv",
            "b.csv",
            "--report",
            "r.txt",
        ],
    );
    assert_eq!(out.status.code(), Some(0), "{}", text(&out.stderr));
    let report = std::fs::read_to_string(d.join("r.txt")).unwrap();
    assert!(report.contains("rep_mode = power"));
    assert!(report.contains("config_hash = sha256:"));
    // warnings go to both the report and stderr, without changing the exit code
    let stderr = text(&out.stderr);
    assert!(stderr.contains("plane-wave cutoff"));
    assert!(report.contains("plane-wave cutoff"));
    let bands = std::fs::read_to_string(d.join("b.csv")).unwrap();
    assert!(bands.starts_with("quantity,100,125,"));
    assert!(std::fs::read_to_string(d.join("n.csv"))
        .unwrap()
        .starts_with("frequency_hz,stl_mean,"));
}

#[test]
fn two_hundredths_in_reports_full_precision_in_csv() {
    let dir = setup();
    let d = dir.path();
    let out = tubeloss(d, &["masslaw", "--frequencies", "1000", "--csv", "m.csv"]);
    assert_eq!(out.status.code(), Some(0));
    let stdout = text(&out.stdout);
    assert!(stdout.contains("13.70"));
    assert!(!stdout.contains("13.698"));
    let csv = std::fs::read_to_string(d.join("m.csv")).unwrap();
    assert!(csv.contains("13.698671498734"));
    assert!(text(&out.stderr).contains("Woolen felt (woven, soft)"));
}

#[test]
fn mic_csv_round_trip_is_byte_identical() {
    let dir = setup();
    let d = dir.path();
    assert_eq!(
        tubeloss(d, &["--config", "tube.toml", "synth", "scenario.toml", "-o", "a.csv"])
            .status
            .code(),
        Some(0)
    );
    let first = std::fs::read(d.join("a.csv")).unwrap();
    let parsed = tubeloss_core::formats::MicSpectraFile::load(&d.join("a.csv")).unwrap();
    assert_eq!(parsed.to_csv_string().as_bytes(), first.as_slice());
    // regenerating with the same seed gives the same bytes
    assert_eq!(
        tubeloss(d, &["--config", "tube.toml", "synth", "scenario.toml", "-o", "b.csv"])
            .status
            .code(),
        Some(0)
    );
    assert_eq!(std::fs::read(d.join("b.csv")).unwrap(), first);
}

#[test]
fn exit_codes() {
    let dir = setup();
    let d = dir.path();
    // malformed input
    std::fs::write(d.join("bad.csv"), "# tubeloss mic-spectra v1\nnot,a,file\n").unwrap();
    let out = tubeloss(d, &["stl", "bad.csv"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(text(&out.stderr).contains("error"));
    // unknown flag value
    assert_eq!(
        tubeloss(d, &["--band-mode", "median", "bands", "x.csv"]).status.code(),
        Some(2)
    );
    // missing file
    assert_eq!(tubeloss(d, &["il", "nope.csv", "nope2.csv"]).status.code(), Some(2));
    // unknown layer kind
    std::fs::write(d.join("stack.toml"), "[[layer]]\nkind = \"foam\"\n").unwrap();
    assert_eq!(tubeloss(d, &["stack", "stack.toml"]).status.code(), Some(2));

    // all bins at half-wavelength spacing: numerical failure
    std::fs::write(
        d.join("sing.toml"),
        "[grid]\nfrequencies = [1716.0]\n[tube]\nmic_positions = [-0.3, -0.2, 0.05, 0.15]\n\
         sample_thickness = 0.001\ndiameter = 0.0998\n[[layer]]\nkind = \"identity\"\n",
    )
    .unwrap();
    assert_eq!(
        tubeloss(d, &["synth", "sing.toml", "-o", "s.csv"]).status.code(),
        Some(0)
    );
    let out = tubeloss(d, &["stl", "s.csv"]);
    assert_eq!(out.status.code(), Some(3), "{}", text(&out.stderr));
}

#[test]
fn il_and_bands_commands() {
    let dir = setup();
    let d = dir.path();
    std::fs::write(d.join("r0.csv"), "quantity,500,630,800\nL_r0,70,71,72\n").unwrap();
    std::fs::write(d.join("rs.csv"), "quantity,500,630,800\nL_rs,60,61.5,73\n").unwrap();
    let out = tubeloss(d, &["il", "r0.csv", "rs.csv", "--bands-csv", "il.csv"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        std::fs::read_to_string(d.join("il.csv")).unwrap(),
        "quantity,500,630,800\nIL,10,9.5,-1\n"
    );
    assert!(text(&out.stderr).contains("negative insertion loss at 800"));

    std::fs::write(d.join("rs2.csv"), "quantity,500,630\nL_rs,60,61\n").unwrap();
    let out = tubeloss(d, &["il", "r0.csv", "rs2.csv"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(text(&out.stderr).contains("800"));

    std::fs::write(d.join("spl.csv"), "frequency_hz,spl\n990,60\n1000,70\n").unwrap();
    let out = tubeloss(
        d,
        &[
            "bands",
            "spl.csv",
            "--quantity",
            "level",
            "--band-min",
            "1000",
            "--band-max",
            "1000",
        ],
    );
    assert_eq!(out.status.code(), Some(0));
    assert!(text(&out.stdout).contains("67.40"));
}
