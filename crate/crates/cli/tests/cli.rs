//! End-to-end tests of the binary: flags, files, exit codes, and
//! reproducibility of emitted artifacts.

use std::path::Path;
use std::process::{Command, Output};

fn mapi(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mapi"))
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn write_test_images(dir: &Path) {
    use mapi::pca::{occlude, pgm, samples};
    let base = samples::waves(16);
    for i in 0..6 {
        let img = occlude(&base, 4, 2, 100 + i).unwrap();
        pgm::write_pgm(&dir.join(format!("img_{i}.pgm")), &img).unwrap();
    }
}

#[test]
fn kernel_check_passes_and_emits_json() {
    let dir = tempfile::tempdir().unwrap();
    let out = mapi(&["kernel-check"], dir.path());
    assert!(out.status.success());
    assert!(stdout(&out).contains("all suites passed"));

    let out = mapi(&["kernel-check", "--json"], dir.path());
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["passed"], serde_json::Value::Bool(true));
    assert!(doc["checks"].as_array().unwrap().len() >= 5);
}

#[test]
fn prop1_reports_fixed_point_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = mapi(&["prop1", "--n", "20", "--seed", "7", "--out", "run"], dir.path());
    assert!(out.status.success());
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("run/prop1_report.json")).unwrap())
            .unwrap();
    assert!(report["max_abs_error_at_t2"].as_f64().unwrap() <= 1e-12);
    assert_eq!(report["passed"], serde_json::Value::Bool(true));
    assert_eq!(report["manifest"]["subcommand"], "prop1");
}

#[test]
fn reconstruct_writes_reports_traces_and_images() {
    let dir = tempfile::tempdir().unwrap();
    let images = dir.path().join("images");
    std::fs::create_dir(&images).unwrap();
    write_test_images(&images);

    let out = mapi(
        &[
            "reconstruct",
            "--images",
            "images",
            "--op",
            "min2",
            "--n-corrupt",
            "8",
            "--tile",
            "4",
            "--n-tiles",
            "2",
            "--seed",
            "5",
            "--iters",
            "12",
            "--out",
            "run",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));

    let report: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(dir.path().join("run/reconstruct_report.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(report["images"].as_array().unwrap().len(), 6);
    // six inputs digested into the manifest
    assert_eq!(report["manifest"]["inputs"].as_array().unwrap().len(), 6);
    let first = &report["images"][0];
    assert!(first["psnr_reconstructed_mean_db"].as_f64().unwrap()
        > first["psnr_occluded_mean_db"].as_f64().unwrap());

    let img0 = dir.path().join("run/img_0");
    assert!(img0.join("reconstructed_00.pgm").exists());
    let trace = std::fs::read_to_string(img0.join("trace_w1.csv")).unwrap();
    assert!(trace.starts_with("iter,delta_l1,delta_l2,alignment_error,mults,divs,adds,cmps"));
    assert_eq!(trace.lines().count(), 13); // header + 12 iterations
}

#[test]
fn reconstruct_is_byte_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let images = dir.path().join("images");
    std::fs::create_dir(&images).unwrap();
    write_test_images(&images);
    let args = [
        "reconstruct", "--images", "images", "--op", "min1", "--n-corrupt", "6", "--tile", "4",
        "--n-tiles", "2", "--seed", "9", "--iters", "8",
    ];
    let mut blobs = Vec::new();
    for run in ["a", "b"] {
        let mut a: Vec<&str> = args.to_vec();
        a.extend_from_slice(&["--out", run]);
        assert!(mapi(&a, dir.path()).status.success());
        blobs.push((
            std::fs::read(dir.path().join(run).join("reconstruct_report.json")).unwrap(),
            std::fs::read(dir.path().join(run).join("img_0/trace_w1.csv")).unwrap(),
            std::fs::read(dir.path().join(run).join("img_0/reconstructed_00.pgm")).unwrap(),
        ));
    }
    assert_eq!(blobs[0].1, blobs[1].1, "traces differ");
    assert_eq!(blobs[0].2, blobs[1].2, "images differ");
    // reports embed the out path nowhere, so they match byte for byte
    assert_eq!(blobs[0].0, blobs[1].0, "reports differ");
}

#[test]
fn pagerank_compare_reports_overlap() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("g.txt"),
        "# four nodes\n1 0\n2 0\n3 0\n0 2\n2 3\n3 1\n",
    )
    .unwrap();
    let out = mapi(
        &[
            "pagerank", "--graph", "g.txt", "--iters", "20", "--compare", "--topk", "4", "--out",
            "run",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(dir.path().join("run/pagerank_report.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(report["n_nodes"], 4);
    assert_eq!(report["n_edges"], 6);
    assert_eq!(report["topk_overlap"], 4);
    assert_eq!(report["runs"].as_array().unwrap().len(), 2);
    assert!(dir.path().join("run/trace_rpi.csv").exists());
    assert!(dir.path().join("run/trace_mapi-min1.csv").exists());
    // manifest digests the graph file
    assert_eq!(report["manifest"]["inputs"][0]["bytes"], 37);
}

#[test]
fn stochastic_emits_trace_with_variant_column() {
    let dir = tempfile::tempdir().unwrap();
    let out = mapi(
        &[
            "stochastic", "--n", "2000", "--d", "6", "--batch", "2000", "--iters", "10", "--op",
            "min1", "--seed", "2", "--out", "run",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let trace = std::fs::read_to_string(dir.path().join("run/trace.csv")).unwrap();
    let mut lines = trace.lines();
    assert!(lines.next().unwrap().ends_with(",variant"));
    assert_eq!(trace.lines().count(), 11);
    assert!(trace.lines().nth(1).unwrap().ends_with(",min1"));

    let report: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(dir.path().join("run/stochastic_report.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(report["rank_order"].as_array().unwrap().len(), 6);
}

#[test]
fn stochastic_switch_changes_variant_mid_trace() {
    let dir = tempfile::tempdir().unwrap();
    let out = mapi(
        &[
            "stochastic", "--n", "2000", "--d", "6", "--batch", "2000", "--iters", "10",
            "--switch-at", "4", "--seed", "2", "--out", "run",
        ],
        dir.path(),
    );
    assert!(out.status.success());
    let trace = std::fs::read_to_string(dir.path().join("run/trace.csv")).unwrap();
    let rows: Vec<&str> = trace.lines().skip(1).collect();
    assert_eq!(rows.len(), 10);
    assert!(rows[3].starts_with("4,") && rows[3].ends_with(",min1"));
    assert!(rows[4].starts_with("5,") && rows[4].ends_with(",dot"));
}

#[test]
fn missing_input_file_exits_one_and_names_the_path() {
    let dir = tempfile::tempdir().unwrap();
    let out = mapi(&["pagerank", "--graph", "nowhere.txt", "--out", "run"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("nowhere.txt"));
}

#[test]
fn invalid_flags_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = mapi(&["pagerank", "--graph"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let out = mapi(&["not-a-command"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn datasets_prints_urls_and_verifies_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = mapi(&["datasets"], dir.path());
    assert!(out.status.success());
    assert!(stdout(&out).contains("p2p-Gnutella08.txt.gz"));

    std::fs::write(dir.path().join("tiny.txt"), "0 1\n1 0\n").unwrap();
    let out = mapi(&["datasets", "--verify", "tiny.txt"], dir.path());
    assert!(out.status.success());
    assert!(stdout(&out).contains("2 nodes, 2 edges"));
}

#[test]
fn threads_flag_does_not_change_results() {
    let dir = tempfile::tempdir().unwrap();
    let images = dir.path().join("images");
    std::fs::create_dir(&images).unwrap();
    write_test_images(&images);
    let args = [
        "reconstruct", "--images", "images", "--op", "min2", "--n-corrupt", "6", "--tile", "4",
        "--n-tiles", "2", "--seed", "4", "--iters", "6",
    ];
    let mut reports = Vec::new();
    for (out_name, threads) in [("t1", "1"), ("t4", "4")] {
        let mut a: Vec<&str> = args.to_vec();
        a.extend_from_slice(&["--out", out_name, "--threads", threads]);
        assert!(mapi(&a, dir.path()).status.success());
        reports.push(
            std::fs::read(dir.path().join(out_name).join("img_0/trace_w1.csv")).unwrap(),
        );
    }
    assert_eq!(reports[0], reports[1]);
}
