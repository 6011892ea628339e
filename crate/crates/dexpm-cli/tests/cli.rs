use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn run_in(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dexpm"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn assert_ok(out: &Output) {
    assert!(
        out.status.success(),
        "exit {:?}\nstdout: {}\nstderr: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
}

fn read(path: PathBuf) -> String {
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("read {}: {e}", path.display()))
}

/// Parses one CSV data line into its comma-separated fields.
fn rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn expm_computes_the_scalar_exponential_from_a_file() {
    let dir = TempDir::new().unwrap();
    std::fs::write(
        dir.path().join("one.mtx"),
        "%%MatrixMarket matrix array real general\n1 1\n-1\n",
    )
    .unwrap();

    let out = run_in(dir.path(), &["expm", "one.mtx", "--h", "0.05", "--out", "exp.mtx"]);
    assert_ok(&out);

    let x = dexpm::read_matrix(&dir.path().join("exp.mtx")).unwrap();
    assert_eq!((x.rows(), x.cols()), (1, 1));
    let err = (x.get(0, 0) - num_complex::Complex64::new((-1.0f64).exp(), 0.0)).norm();
    assert!(err <= 1e-13, "scalar error {err:.2e}");

    assert!(dir.path().join("exp.meta.jsonl").exists());
    assert!(dir.path().join("exp.manifest.json").exists());
    let manifest: serde_json::Value =
        serde_json::from_str(&read(dir.path().join("exp.manifest.json"))).unwrap();
    assert_eq!(manifest["subcommand"], "expm");
    assert_eq!(manifest["parameters"]["h"], "5.0000000000000003e-2");
}

#[test]
fn malformed_header_exits_2_and_names_the_line() {
    let dir = TempDir::new().unwrap();
    std::fs::write(dir.path().join("bad.mtx"), "%%MatrixMarket banana\n1 1\n-1\n").unwrap();

    let out = run_in(dir.path(), &["expm", "bad.mtx"]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("line 1"), "stderr was: {stderr}");
}

#[test]
fn auto_metadata_reports_a_prediction_below_the_safety_line() {
    let dir = TempDir::new().unwrap();
    assert_ok(&run_in(
        dir.path(),
        &["gen-matrix", "--kind", "a1", "--n", "50", "--seed", "2024", "--out", "a1.mtx"],
    ));
    assert_ok(&run_in(
        dir.path(),
        &["expm", "a1.mtx", "--auto", "--eps", "1e-10", "--out", "exp.mtx"],
    ));

    let meta: serde_json::Value =
        serde_json::from_str(read(dir.path().join("exp.meta.jsonl")).lines().next().unwrap())
            .unwrap();
    let predicted: f64 = meta["predicted_error"].as_str().unwrap().parse().unwrap();
    assert!(
        predicted < 10.0 * 1e-10,
        "predicted {predicted:.2e} not below eta * eps"
    );
    assert!(meta["outcome"].is_string());
    assert!(meta["node_count"].as_i64().unwrap() > 0);
}

#[test]
fn generated_matrices_are_bit_identical_across_runs() {
    let dir = TempDir::new().unwrap();
    for out in ["first.mtx", "second.mtx"] {
        assert_ok(&run_in(
            dir.path(),
            &["gen-matrix", "--kind", "a1", "--n", "12", "--seed", "5", "--out", out],
        ));
    }
    assert_eq!(
        read(dir.path().join("first.mtx")),
        read(dir.path().join("second.mtx"))
    );
}

#[test]
fn convdiff_generation_writes_the_squared_grid_in_coordinate_form() {
    let dir = TempDir::new().unwrap();
    assert_ok(&run_in(
        dir.path(),
        &["gen-matrix", "--kind", "convdiff", "--n", "20", "--out", "cd.mtx"],
    ));

    let text = read(dir.path().join("cd.mtx"));
    assert!(
        text.starts_with("%%MatrixMarket matrix coordinate real general"),
        "header was: {}",
        text.lines().next().unwrap_or("")
    );
    let a = dexpm::read_matrix(&dir.path().join("cd.mtx")).unwrap();
    assert_eq!((a.rows(), a.cols()), (400, 400));
}

#[test]
fn unknown_matrix_kind_exits_2() {
    let dir = TempDir::new().unwrap();
    let out = run_in(dir.path(), &["gen-matrix", "--kind", "banana"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown kind"));
}

#[test]
fn scalar_map_single_point_matches_the_scalar_exponential() {
    let dir = TempDir::new().unwrap();
    assert_ok(&run_in(
        dir.path(),
        &[
            "scalar-map",
            "--h",
            "0.1",
            "--re-range=-1,-1",
            "--im-range",
            "0,0",
            "--grid",
            "1",
            "--out",
            "map.csv",
        ],
    ));

    let csv = read(dir.path().join("map.csv"));
    assert_eq!(csv.lines().next(), Some("re,im,h,abs_error"));
    let data = rows(&csv);
    assert_eq!(data.len(), 1);
    let err: f64 = data[0][3].parse().unwrap();
    assert!(err <= 1e-13, "z = -1 error {err:.2e}");
}

#[test]
fn scalar_map_rejects_a_lone_range_flag() {
    let dir = TempDir::new().unwrap();
    let out = run_in(dir.path(), &["scalar-map", "--re-range=-2,-1", "--out", "map.csv"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn compare_with_de_only_omits_talbot_rows() {
    let dir = TempDir::new().unwrap();
    assert_ok(&run_in(
        dir.path(),
        &["compare", "--grid-n", "4", "--methods", "de", "--out", "cmp.csv"],
    ));

    let csv = read(dir.path().join("cmp.csv"));
    assert_eq!(csv.lines().next(), Some("method,nodes,rel_error"));
    let data = rows(&csv);
    assert_eq!(data.len(), 3);
    assert!(data.iter().all(|r| r[0] == "de"));
    let best: f64 = data.iter().map(|r| r[2].parse::<f64>().unwrap()).fold(1.0, f64::min);
    assert!(best <= 1e-8, "best DE error {best:.2e}");
}

#[test]
fn compare_output_is_byte_identical_across_reruns_and_thread_counts() {
    let dir = TempDir::new().unwrap();
    let configs: [&[&str]; 3] = [
        &["compare", "--grid-n", "4", "--out", "c1.csv"],
        &["compare", "--grid-n", "4", "--out", "c2.csv"],
        &["compare", "--grid-n", "4", "--threads", "4", "--out", "c3.csv"],
    ];
    for args in configs {
        assert_ok(&run_in(dir.path(), args));
    }
    let first = read(dir.path().join("c1.csv"));
    assert_eq!(first, read(dir.path().join("c2.csv")));
    assert_eq!(first, read(dir.path().join("c3.csv")));
}

#[test]
fn shift_sweep_reproduces_the_shift_dependence_figure() {
    let dir = TempDir::new().unwrap();
    assert_ok(&run_in(dir.path(), &["shift-sweep", "--out", "sweep.csv"]));

    let csv = read(dir.path().join("sweep.csv"));
    assert_eq!(csv.lines().next(), Some("sigma,rel_error_2norm,status"));
    let data = rows(&csv);
    assert_eq!(data.len(), 31);

    let at = |sigma: f64| -> f64 {
        data.iter()
            .find(|r| r[0].parse::<f64>().unwrap() == sigma)
            .unwrap_or_else(|| panic!("no row for sigma {sigma}"))[1]
            .parse()
            .unwrap()
    };
    assert!(at(-2.5) * 1e4 <= at(1.0), "shift contrast too small");

    let (mut best_sigma, mut best_err) = (f64::NAN, f64::INFINITY);
    for r in &data {
        let err: f64 = r[1].parse().unwrap();
        if err < best_err {
            best_err = err;
            best_sigma = r[0].parse().unwrap();
        }
    }
    assert!(
        (-5.0..0.0).contains(&best_sigma),
        "minimum at sigma {best_sigma} (error {best_err:.2e})"
    );

    for r in &data {
        let sigma: f64 = r[0].parse().unwrap();
        if sigma >= 0.0 {
            assert_eq!(r[2], "unstable_shift", "sigma {sigma} row: {r:?}");
        } else {
            assert_eq!(r[2], "ok", "sigma {sigma} row: {r:?}");
        }
    }
}

#[test]
fn autoquad_tracks_its_targets_and_writes_a_monotone_trace() {
    let dir = TempDir::new().unwrap();
    assert_ok(&run_in(dir.path(), &["autoquad", "--out", "aq.csv"]));

    let csv = read(dir.path().join("aq.csv"));
    assert_eq!(csv.lines().next(), Some("eps_target,eps_measured,final_h,rounds"));
    assert_eq!(rows(&csv).len(), 5);
    for r in rows(&csv) {
        let target: f64 = r[0].parse().unwrap();
        let measured: f64 = r[1].parse().unwrap();
        assert!(
            measured <= target.max(5e-13),
            "target {target:.1e} measured {measured:.2e}"
        );
    }

    let trace = read(dir.path().join("aq_trace.csv"));
    assert_eq!(trace.lines().next(), Some("eps_target,h,inv_h,est_error"));
    let mut last: Option<(f64, f64, f64)> = None;
    for r in rows(&trace) {
        let target: f64 = r[0].parse().unwrap();
        let inv_h: f64 = r[2].parse().unwrap();
        let est: f64 = r[3].parse().unwrap();
        if let Some((pt, pinv, pest)) = last {
            if pt == target {
                assert!(inv_h > pinv, "trace not ordered by 1/h");
                assert!(est <= pest, "trace not decreasing: {pest:.2e} -> {est:.2e}");
            }
        }
        last = Some((target, inv_h, est));
    }
}
