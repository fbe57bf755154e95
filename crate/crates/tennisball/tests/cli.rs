use std::path::Path;
use std::process::{Command, Output};

use clap::Parser;
use rand::{Rng, SeedableRng};
use serde_json::Value;
use tennisball::commands;
use tennisball::config::{Cli, RunConfig};
use tennisball::runner::Runner;
use tennisball::vector_io::{self, VectorFormat};
use tennisball_core::experiments;
use tennisball_core::sampling::SeededStream;

fn tbl(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut c = Command::new(env!("CARGO_BIN_EXE_tbl"));
    c.args(args).env_remove("TBL_SEED").env_remove("TBL_THREADS");
    for (k, v) in env {
        c.env(k, v);
    }
    c.output().expect("tbl runs")
}

fn summary(out: &Output) -> Value {
    let text = String::from_utf8_lossy(&out.stdout);
    serde_json::from_str(text.lines().last().expect("summary line")).unwrap()
}

fn config(args: &[&str]) -> (Cli, RunConfig) {
    let cli = Cli::try_parse_from(args).unwrap();
    let cfg = RunConfig::resolve(&cli.common).unwrap();
    (cli, cfg)
}

#[test]
fn parallel_end_to_end_matches_the_library() {
    let (_, cfg) = config(&[
        "tbl",
        "--n",
        "300",
        "--d",
        "2",
        "--trials",
        "100",
        "--circles",
        "5",
        "--grid",
        "128",
        "--seed",
        "4",
        "end-to-end",
    ]);
    let direct = experiments::end_to_end_tennis_ball(300, 2, &cfg.params, 5, 100, 128, SeededStream::root(4)).unwrap();
    for threads in [1, 3] {
        let got = commands::end_to_end_summary(&cfg, &Runner::new(threads).unwrap()).unwrap();
        assert_eq!(got, direct);
    }
}

#[test]
fn vector_files_round_trip_exactly() {
    let mut rng = seeded_rng();
    let vectors: Vec<Vec<f64>> = (0..50)
        .map(|_| {
            let n = rng.random_range(1..20);
            (0..n).map(|_| rng.random::<f64>() * 10f64.powi(rng.random_range(-300..300)) - 0.5).collect()
        })
        .collect();
    for format in [VectorFormat::Text, VectorFormat::Binary] {
        let mut buf = Vec::new();
        vector_io::write(format, &mut buf, &vectors).unwrap();
        let (detected, back) = vector_io::read_any(&buf).unwrap();
        assert_eq!(detected, format);
        assert_eq!(back, vectors);
    }
}

fn seeded_rng() -> rand::rngs::StdRng {
    rand::rngs::StdRng::seed_from_u64(5)
}

#[test]
fn map_then_inverse_recovers_the_input() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in.txt");
    let mut rng = seeded_rng();
    let vectors: Vec<Vec<f64>> = (0..20).map(|_| (0..30).map(|_| rng.random_range(-3.0..3.0)).collect()).collect();
    vector_io::write(VectorFormat::Text, std::fs::File::create(&input).unwrap(), &vectors).unwrap();
    let fwd = dir.path().join("fwd.bin");
    let back = dir.path().join("back.txt");
    let p = |x: &Path| x.to_str().unwrap().to_owned();
    let out = tbl(&["map", "--input", &p(&input), "--vectors-out", &p(&fwd), "--vector-format", "binary"], &[]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let out = tbl(&["map", "--inverse", "--input", &p(&fwd), "--vectors-out", &p(&back)], &[]);
    assert!(out.status.success());
    assert_eq!(summary(&out)["pass"], true);
    let (format, recovered) = vector_io::read_any(&std::fs::read(&back).unwrap()).unwrap();
    assert_eq!(format, VectorFormat::Binary, "output format follows the input");
    for (orig, rec) in vectors.iter().zip(&recovered) {
        let norm = (orig.iter().map(|x| x * x).sum::<f64>() / orig.len() as f64).sqrt();
        for (a, b) in orig.iter().zip(rec) {
            assert!((a / norm - b).abs() < 1e-9);
        }
    }
}

#[test]
fn config_errors_exit_with_two() {
    let out = tbl(&["--preset", "custom", "--lambda", "4", "bounds"], &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--eta"));
    assert_eq!(tbl(&["--n", "0", "scan-circles"], &[]).status.code(), Some(2));
    assert_eq!(tbl(&["--bogus", "bounds"], &[]).status.code(), Some(2));
    assert_eq!(tbl(&["--eta", "3", "bounds"], &[]).status.code(), Some(2));
}

#[test]
fn invariant_violations_exit_with_one_and_name_the_lemma() {
    // eta = 0.5 makes the narrow intervals wide, so Delta is most of the sphere
    let args = [
        "--preset",
        "custom",
        "--lambda",
        "4",
        "--eta",
        "0.5",
        "--beta",
        "0.01",
        "--epsilon",
        "0",
        "--n",
        "20",
        "--d",
        "20",
        "--trials",
        "50",
        "subspace-test",
    ];
    let out = tbl(&args, &[]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains(commands::SUBSPACE), "{err}");
    let s = summary(&out);
    assert_eq!(s["pass"], false);
    assert_eq!(s["preset"], "custom");
    assert_eq!(s["params"]["paper_valid"], false);
}

#[test]
fn seed_precedence_is_flag_then_env_then_default() {
    let args = ["--n", "50", "--trials", "20", "estimate-delta"];
    assert_eq!(summary(&tbl(&args, &[]))["seed"], 0);
    assert_eq!(summary(&tbl(&args, &[("TBL_SEED", "11")]))["seed"], 11);
    let mut flagged = args.to_vec();
    flagged.extend(["--seed", "12"]);
    assert_eq!(summary(&tbl(&flagged, &[("TBL_SEED", "11")]))["seed"], 12);
}

#[test]
fn verify_lemmas_reports_are_reproducible() {
    let args = ["verify-lemmas", "--preset", "desk", "--n", "100", "--trials", "200", "--seed", "7"];
    let a = tbl(&args, &[("TBL_THREADS", "1")]);
    let b = tbl(&args, &[("TBL_THREADS", "4")]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let s = summary(&a);
    assert_eq!(s["seed"], 7);
    assert_eq!(s["checks"].as_array().unwrap().len(), 6);
}

#[test]
fn csv_and_text_carry_the_same_rows() {
    let base = ["scan-circles", "--n", "60", "--circles", "7", "--grid", "64"];
    let json = tbl(&base, &[]);
    let mut csv_args = base.to_vec();
    csv_args.extend(["--format", "csv"]);
    let csv_out = tbl(&csv_args, &[]);
    let mut reader = csv::Reader::from_reader(csv_out.stdout.as_slice());
    let headers = reader.headers().unwrap().clone();
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), String::from_utf8_lossy(&json.stdout).lines().count());
    let kind = headers.iter().position(|h| h == "kind").unwrap();
    assert_eq!(rows.iter().filter(|r| &r[kind] == "circle").count(), 7);
    assert_eq!(&rows.last().unwrap()[kind], "summary");
    let mut text_args = base.to_vec();
    text_args.extend(["--format", "text"]);
    let text = String::from_utf8(tbl(&text_args, &[]).stdout).unwrap();
    assert!(text.starts_with("# circle\n"));
    assert!(text.contains("seed     0"));
}

#[test]
fn output_file_receives_the_report() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bounds.jsonl");
    let out = tbl(&["bounds", "--preset", "paper", "--output", path.to_str().unwrap()], &[]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    let names: Vec<String> = text
        .lines()
        .map(|l| serde_json::from_str::<Value>(l).unwrap())
        .filter_map(|v| v.get("name").and_then(Value::as_str).map(str::to_owned))
        .collect();
    for expected in
        ["simplex", "jensen", "lognet", "net", "cone", "ringvolume", "badvolume_max", "badvolume_total", "alpha"]
    {
        assert!(names.iter().any(|n| n == expected), "{expected}");
    }
}

#[test]
fn desk_bounds_report_unmet_hypotheses_as_errors() {
    let out = tbl(&["bounds", "--preset", "desk"], &[]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    let bad: Vec<Value> =
        text.lines().map(|l| serde_json::from_str::<Value>(l).unwrap()).filter(|v| v.get("error").is_some()).collect();
    assert!(bad.iter().any(|v| v["name"] == "badvolume_max"));
}
