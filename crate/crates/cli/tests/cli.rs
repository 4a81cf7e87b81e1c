use std::path::Path;
use std::process::{Command, Output};

use cjl_core::{
    CoefficientDistribution, MatrixStructure, SampledTransform, TransformRecord, TransformSpec,
};
use tempfile::TempDir;

fn cjl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cjl"))
        .args(args)
        .output()
        .expect("spawn cjl")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn read_csv(path: &Path) -> Vec<Vec<f64>> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .map(|l| l.split(',').map(|f| f.parse().unwrap()).collect())
        .collect()
}

fn embed(dir: &TempDir, input: &str, extra: &[&str]) -> (Output, std::path::PathBuf) {
    let inp = dir.path().join("in.csv");
    let out = dir.path().join("out.csv");
    std::fs::write(&inp, input).unwrap();
    let mut args = vec![
        "embed",
        "--input",
        path_str(&inp),
        "--output",
        path_str(&out),
    ];
    args.extend_from_slice(extra);
    (cjl(&args), out)
}

#[test]
fn one_by_one_embedding_is_coefficient_times_sign_times_input() {
    let dir = TempDir::new().unwrap();
    let (out, path) = embed(&dir, "2.5\n", &["--k", "1", "--seed", "42"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let spec = TransformSpec::new(
        1,
        1,
        CoefficientDistribution::Gaussian,
        MatrixStructure::Circulant,
        42,
    )
    .unwrap();
    let t = SampledTransform::sample(spec);
    assert_eq!(read_csv(&path), vec![vec![t.a()[0] * t.kappa()[0] * 2.5]]);
}

#[test]
fn empty_input_is_a_usage_error() {
    let dir = TempDir::new().unwrap();
    let (out, _) = embed(&dir, "", &["--k", "1"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("no rows"));
}

#[test]
fn zero_point_embeds_to_zeros() {
    let dir = TempDir::new().unwrap();
    let (out, path) = embed(
        &dir,
        "0,0,0,0\n1,0,0,0\n",
        &["--k", "3", "--structure", "toeplitz"],
    );
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let rows = read_csv(&path);
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0], vec![0.0; 3]);
    assert!(rows[1].iter().any(|v| *v != 0.0));
}

#[test]
fn ragged_rows_and_wrong_dimension_are_data_errors() {
    let dir = TempDir::new().unwrap();
    let (out, _) = embed(&dir, "1,2,3\n4,5\n", &["--k", "1"]);
    assert_eq!(code(&out), 3);
    let (out, _) = embed(&dir, "1,2,3\n", &["--k", "1", "--d", "4"]);
    assert_eq!(code(&out), 3);
}

#[test]
fn malformed_csv_is_a_usage_error() {
    let dir = TempDir::new().unwrap();
    let (out, _) = embed(&dir, "1,abc\n", &["--k", "1"]);
    assert_eq!(code(&out), 2);
    let (out, _) = embed(&dir, "1,2\n", &["--k", "3"]);
    assert_eq!(code(&out), 2, "k > d");
}

#[test]
fn header_row_is_skipped_when_requested() {
    let dir = TempDir::new().unwrap();
    let (out, path) = embed(&dir, "x,y\n0,0\n", &["--k", "2", "--header"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert_eq!(read_csv(&path), vec![vec![0.0, 0.0]]);
}

#[test]
fn sidecar_reconstructs_the_transform() {
    let dir = TempDir::new().unwrap();
    let input = "0.25,-1,3,0.5,2\n1,1,1,1,1\n";
    for arrays in [false, true] {
        let mut extra = vec!["--k", "3", "--seed", "9", "--dist", "rademacher"];
        if arrays {
            extra.push("--include-arrays");
        }
        let (out, path) = embed(&dir, input, &extra);
        assert_eq!(code(&out), 0, "{}", stderr(&out));
        let sidecar = dir.path().join("out.csv.transform.json");
        let record: TransformRecord =
            serde_json::from_str(&std::fs::read_to_string(sidecar).unwrap()).unwrap();
        assert_eq!(record.a.is_some(), arrays);
        let t = SampledTransform::from_record(&record).unwrap();
        let expected: Vec<Vec<f64>> = read_csv(&dir.path().join("in.csv"))
            .iter()
            .map(|x| cjl_core::embed_naive(&t, x).unwrap())
            .collect();
        for (got, want) in read_csv(&path).iter().zip(&expected) {
            for (g, w) in got.iter().zip(want) {
                assert!((g - w).abs() <= 1e-12 * w.abs().max(1.0));
            }
        }
    }
}

#[test]
fn embedded_csv_round_trips_exactly() {
    let dir = TempDir::new().unwrap();
    let (out, path) = embed(&dir, "0.1,0.2,0.3,1e-300,7\n", &["--k", "5"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = std::fs::read_to_string(&path).unwrap();
    let values = read_csv(&path);
    let rewritten: Vec<String> = values[0].iter().map(|v| format!("{v:?}")).collect();
    assert_eq!(text.trim_end(), rewritten.join(","));

    let again = dir.path().join("again.csv");
    let out = cjl(&[
        "embed",
        "--input",
        path_str(&path),
        "--output",
        path_str(&again),
        "--k",
        "5",
    ]);
    assert_eq!(
        code(&out),
        0,
        "embedded output is valid input: {}",
        stderr(&out)
    );
}

#[test]
fn norm_reports_are_byte_identical_across_runs() {
    let dir = TempDir::new().unwrap();
    let run = |name: &str| {
        let path = dir.path().join(name);
        let out = cjl(&[
            "verify",
            "--mode",
            "norm",
            "--d",
            "64",
            "--k",
            "16",
            "--eps",
            "0.5",
            "--trials",
            "10000",
            "--master-seed",
            "7",
            "--out",
            path_str(&path),
        ]);
        assert_eq!(code(&out), 0, "{}", stderr(&out));
        std::fs::read(path).unwrap()
    };
    let first = run("a.json");
    assert_eq!(first, run("b.json"));
    let v: serde_json::Value = serde_json::from_slice(&first).unwrap();
    assert_eq!(v["per_k"][0]["trials"], 10000);
    assert!(v["assertions"].as_array().unwrap().is_empty());
}

#[test]
fn counterexample_flat_assertion_passes() {
    let out = cjl(&[
        "verify",
        "--mode",
        "counterexample",
        "--d",
        "64",
        "--k",
        "16,64",
        "--trials",
        "10000",
        "--master-seed",
        "3",
        "--assert",
        "flat",
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["assertions"][0]["passed"], true);
    assert!((v["reference_tail"].as_f64().unwrap() - 0.2207).abs() < 1e-4);
}

#[test]
fn failing_assertion_exits_one_and_still_writes_report() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("r.json");
    // Below the smallest k reaching 2/3 success for 30 random points.
    let out = cjl(&[
        "verify",
        "--mode",
        "pairs",
        "--n",
        "30",
        "--d",
        "128",
        "--k",
        "2,4",
        "--trials",
        "30",
        "--assert",
        "two-thirds",
        "--out",
        path_str(&path),
    ]);
    assert_eq!(code(&out), 1, "{}", stderr(&out));
    let v: serde_json::Value = serde_json::from_slice(&std::fs::read(path).unwrap()).unwrap();
    assert_eq!(v["assertions"][0]["passed"], false);
}

#[test]
fn pairs_with_zero_k_is_a_usage_error() {
    let out = cjl(&["verify", "--mode", "pairs", "--n", "30", "--k", "0"]);
    assert_eq!(code(&out), 2);
    let out = cjl(&[
        "verify", "--mode", "pairs", "--n", "30", "--d", "64", "--k", "0",
    ]);
    assert_eq!(code(&out), 2);
}

#[test]
fn verify_rejects_bad_flags() {
    let bad: [&[&str]; 5] = [
        &[
            "verify", "--mode", "norm", "--d", "64", "--k", "16", "--assert", "flat",
        ],
        &["verify", "--mode", "norm", "--d", "64", "--k", "128"],
        &[
            "verify", "--mode", "norm", "--d", "64", "--k", "16", "--eps", "0.7",
        ],
        &["verify", "--mode", "sideways", "--d", "64", "--k", "16"],
        &[
            "verify",
            "--mode",
            "counterexample",
            "--d",
            "64",
            "--k",
            "16",
            "--dist",
            "rademacher",
        ],
    ];
    for args in bad {
        assert_eq!(code(&cjl(args)), 2, "{args:?}");
    }
}

#[test]
fn lm_tail_bound_holds_in_csv_format() {
    let out = cjl(&[
        "verify", "--mode", "lm-tail", "--trials", "20000", "--assert", "bound", "--format", "csv",
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(
        lines[0],
        "t,trials,exceed_hi,exceed_lo,p_hat_hi,p_hat_lo,bound"
    );
    assert_eq!(lines.len(), 4);
}

#[test]
fn kbound_examples() {
    let out = cjl(&["kbound", "--n", "2", "--eps", "0.5", "--C", "1"]);
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8_lossy(&out.stdout)
        .lines()
        .any(|l| l == "k = 2"));

    assert_eq!(code(&cjl(&["kbound", "--n", "2", "--eps", "0.6"])), 2);

    // 100 (ln 10^6)^3 = 263694.5..
    let ln = (1e6f64).ln();
    let expected = (100.0 * ln.powi(3)).ceil() as usize;
    assert_eq!(expected, 263695);
    let out = cjl(&["kbound", "--n", "1000000", "--eps", "0.1", "--C", "1"]);
    assert!(String::from_utf8_lossy(&out.stdout).contains(&format!("k = {expected}\n")));
}

#[test]
fn bench_single_d_gives_one_row() {
    let out = cjl(&["bench", "--d-list", "256", "--k", "32", "--trials", "2"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[0], "d,k,t_fast_ns,t_naive_ns");
    let fields: Vec<&str> = lines[1].split(',').collect();
    assert_eq!(&fields[..2], &["256", "32"]);
    assert!(fields[2].parse::<u128>().is_ok() && fields[3].parse::<u128>().is_ok());
}

#[test]
fn bench_skips_naive_above_cutoff_and_rejects_descending_list() {
    let out = cjl(&[
        "bench",
        "--d-list",
        "64,128",
        "--k",
        "8",
        "--trials",
        "1",
        "--naive-max-d",
        "64",
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().nth(2).unwrap().ends_with(','));
    assert_eq!(code(&cjl(&["bench", "--d-list", "128,64", "--k", "8"])), 2);
}

#[test]
fn unknown_flags_and_bad_thread_count_exit_two() {
    assert_eq!(code(&cjl(&["embed", "--bogus"])), 2);
    assert_eq!(code(&cjl(&["frobnicate"])), 2);
    let out = Command::new(env!("CARGO_BIN_EXE_cjl"))
        .args(["kbound", "--n", "2", "--eps", "0.5"])
        .env("CJL_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(code(&out), 2);
}
