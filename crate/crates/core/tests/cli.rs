use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn spca(dir: &Path, args: &[&str], env: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_spca"));
    cmd.current_dir(dir).args(args).env_remove("SPCA_WORKERS");
    if let Some(w) = env {
        cmd.env("SPCA_WORKERS", w);
    }
    cmd.output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn synth(dir: &Path) -> PathBuf {
    let path = dir.join("synth.csv");
    let out = spca(
        dir,
        &[
            "datasets",
            "synth",
            "--classes",
            "4",
            "--per-class",
            "8",
            "--features",
            "60",
            "--out",
            "synth.csv",
        ],
        None,
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    path
}

fn matrix(dir: &Path) -> &'static str {
    std::fs::write(
        dir.join("a.csv"),
        "x,y,z,w\n3,0.1,0,1\n0,0.2,1,0.5\n1,1,0.3,-2\n-1,0.5,2,0\n0.2,-1,0.1,0.3\n",
    )
    .unwrap();
    "a.csv"
}

#[test]
fn solve_writes_loadings_for_every_variant() {
    let dir = tempfile::tempdir().unwrap();
    let input = matrix(dir.path());
    for (variant, m, cols) in [
        ("sl1", "1", 2),
        ("sl0", "2", 3),
        ("bl1", "2", 3),
        ("bl0", "2", 3),
        ("pca", "2", 3),
    ] {
        let out = spca(
            dir.path(),
            &[
                "solve",
                "--input",
                input,
                "--variant",
                variant,
                "--m",
                m,
                "--gamma",
                "0.05",
            ],
            None,
        );
        assert_eq!(
            code(&out),
            0,
            "{variant}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        let text = String::from_utf8(out.stdout).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 5, "{variant}: header plus one row per feature");
        assert!(lines.iter().all(|l| l.split(',').count() == cols));
    }
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let input = matrix(dir.path());
    let usage = spca(dir.path(), &["solve", "--input", input, "--variant", "sl2"], None);
    assert_eq!(code(&usage), 1);
    let usage = spca(dir.path(), &["solve", "--input", input, "--gamma", "-1"], None);
    assert_eq!(code(&usage), 1);
    let missing = spca(dir.path(), &["solve", "--input", "nope.csv"], None);
    assert_eq!(code(&missing), 2);
    std::fs::write(dir.path().join("bad.csv"), "1,2\n3,x\n").unwrap();
    assert_eq!(code(&spca(dir.path(), &["solve", "--input", "bad.csv"], None)), 2);
    let collapse = spca(
        dir.path(),
        &[
            "solve",
            "--input",
            input,
            "--variant",
            "bl1",
            "--m",
            "2",
            "--gamma",
            "0,1e6",
        ],
        None,
    );
    assert_eq!(
        code(&collapse),
        3,
        "{}",
        String::from_utf8_lossy(&collapse.stderr)
    );
    assert_eq!(code(&spca(dir.path(), &["--help"], None)), 0);
}

#[test]
fn config_file_env_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("t.conf"),
        "# small grid\nsizes = 60\ninstances = 1\nm = 2\nvariant = sl1\nworkers = 3\nout = t.csv\n",
    )
    .unwrap();
    let workers_column = |args: &[&str], env: Option<&str>| {
        let out = spca(dir.path(), args, env);
        assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
        let text = std::fs::read_to_string(dir.path().join("t.csv")).unwrap();
        let mut reader = csv::Reader::from_reader(text.as_bytes());
        let idx = reader
            .headers()
            .unwrap()
            .iter()
            .position(|h| h == "workers")
            .unwrap();
        let values: Vec<String> = reader.records().map(|r| r.unwrap()[idx].to_string()).collect();
        values
    };
    assert!(workers_column(&["bench-timing", "--config", "t.conf"], None)
        .iter()
        .all(|w| w == "3"));
    assert!(workers_column(&["bench-timing", "--config", "t.conf"], Some("2"))
        .iter()
        .all(|w| w == "2"));
    assert!(workers_column(
        &["bench-timing", "--config", "t.conf", "--workers", "1"],
        Some("2")
    )
    .iter()
    .all(|w| w == "1"));

    std::fs::write(dir.path().join("broken.conf"), "sizes 60\n").unwrap();
    assert_eq!(
        code(&spca(
            dir.path(),
            &["bench-timing", "--config", "broken.conf"],
            None
        )),
        1
    );
}

#[test]
fn recognition_output_is_worker_independent() {
    let dir = tempfile::tempdir().unwrap();
    synth(dir.path());
    let run = |workers: &str, out: &str| {
        let result = spca(
            dir.path(),
            &[
                "bench-recognition",
                "--dataset",
                "synth.csv",
                "--split",
                "per-class:4",
                "--m",
                "2,3",
                "--repetitions",
                "2",
                "--chunk",
                "8",
                "--out",
                out,
            ],
            Some(workers),
        );
        assert_eq!(code(&result), 0, "{}", String::from_utf8_lossy(&result.stderr));
        std::fs::read(dir.path().join(out)).unwrap()
    };
    let one = run("1", "r1.csv");
    let four = run("4", "r4.csv");
    assert_eq!(one, four);
    assert!(dir.path().join("r1.timings.csv").exists());
    let text = String::from_utf8(one).unwrap();
    assert!(text.starts_with("method,m,gamma,repetition,status,overall_accuracy"));
}

#[test]
fn convert_label_last_with_groups() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("g1.data"), "0.1, 0.2, 1\n0.3, 0.4, 2\n").unwrap();
    std::fs::write(dir.path().join("g2.data"), "0.5, 0.6, 1\n0.7, 0.8, 2\n").unwrap();
    let out = spca(
        dir.path(),
        &[
            "datasets",
            "convert",
            "--from",
            "label-last",
            "--input",
            "g1.data",
            "g2.data",
            "--group",
            "1,2",
            "--out",
            "iso.csv",
        ],
        None,
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let data = spca::bench::load_dataset(dir.path().join("iso.csv"), spca::bench::DatasetFormat::CsvLabeled)
        .unwrap();
    assert_eq!(data.labels, vec![1, 2, 1, 2]);
    assert_eq!(data.groups, Some(vec![1, 1, 2, 2]));
    assert_eq!(data.samples[(3, 1)], 0.8);
}

#[test]
fn presets_are_valid_recognition_configs() {
    let presets = Path::new(env!("CARGO_MANIFEST_DIR")).join("presets");
    let mut seen = 0;
    for entry in std::fs::read_dir(&presets).unwrap() {
        let path = entry.unwrap().path();
        let text = std::fs::read_to_string(&path).unwrap();
        let keys = spca::cli::parse_config_file(&text, &path).unwrap();
        spca::bench::parse_split_policy(&keys["split"]).unwrap();
        assert!(keys["m"].split(',').count() > 1, "{} sweeps m", path.display());
        seen += 1;
    }
    assert_eq!(seen, 5);
}
