use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use sigmanet::laplacian::read_matrix_dump;
use sigmanet::Complex64;

fn sigmanet(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sigmanet"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn laplacian_dump_of_single_edge() {
    let dir = tempfile::tempdir().unwrap();
    let edges = dir.path().join("edges.csv");
    fs::write(&edges, "src,dst,weight\na,b,1\n").unwrap();
    let out = dir.path().join("out");
    let o = sigmanet(&[
        "laplacian",
        "--edges",
        path(&edges),
        "--normalized",
        "--out",
        path(&out),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));

    let l = read_matrix_dump(&out.join("L.txt")).unwrap();
    let i = Complex64::new(0.0, 1.0);
    let expected = [
        [Complex64::new(1.0, 0.0), -i],
        [i, Complex64::new(1.0, 0.0)],
    ];
    for (r, row) in expected.iter().enumerate() {
        for (c, z) in row.iter().enumerate() {
            assert!((l[(r, c)] - z).norm() < 1e-12, "L[{r},{c}] = {}", l[(r, c)]);
        }
    }
    let ids = fs::read_to_string(out.join("ids.csv")).unwrap();
    assert!(ids.contains('a') && ids.contains('b'));
    assert!(out.join("H.txt").exists());
}

#[test]
fn sigma_matches_magnetic_on_binary_graph() {
    let dir = tempfile::tempdir().unwrap();
    let edges = dir.path().join("edges.csv");
    fs::write(&edges, "0,1,1\n1,2,1\n2,0,1\n0,3,1\n3,0,1\n2,3,1\n").unwrap();
    let mut dumps = Vec::new();
    for op in ["sigma", "magnetic"] {
        let out = dir.path().join(op);
        let o = sigmanet(&[
            "laplacian",
            "--edges",
            path(&edges),
            "--operator",
            op,
            "--q",
            "0.25",
            "--out",
            path(&out),
        ]);
        assert!(o.status.success());
        dumps.push(read_matrix_dump(&out.join("L.txt")).unwrap());
    }
    assert!((&dumps[0] - &dumps[1]).iter().all(|z| z.norm() < 1e-12));
}

#[test]
fn missing_edge_file_fails() {
    let dir = tempfile::tempdir().unwrap();
    let o = sigmanet(&[
        "laplacian",
        "--edges",
        "/nonexistent/edges.csv",
        "--out",
        path(dir.path()),
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("edges.csv"));
}

#[test]
fn verify_suite_and_demo() {
    let o = sigmanet(&["verify", "--random", "200"]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(!stdout(&o).contains("FAIL"));

    let o = sigmanet(&["verify", "--demo-signflip"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(
        text.lines().count(),
        1 + sigmanet::verify::DEMO_SCALES.len()
    );
}

#[test]
fn corrupted_dump_is_flagged() {
    let dir = tempfile::tempdir().unwrap();
    let dump = dir.path().join("L.txt");
    fs::write(&dump, "# 2 2\n0,0,1,0\n0,1,0,-1\n1,0,0,0.5\n1,1,1,0\n").unwrap();
    let o = sigmanet(&["verify", "--dump", path(&dump)]);
    assert_eq!(o.status.code(), Some(2));
    let failing: Vec<_> = stdout(&o)
        .lines()
        .filter(|l| l.contains("FAIL"))
        .map(str::to_owned)
        .collect();
    assert!(
        failing.iter().any(|l| l.contains("hermitian (bit-exact)")),
        "{failing:?}"
    );
}

#[test]
fn generate_writes_dataset_and_config() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("gen");
    let o = sigmanet(&[
        "generate",
        "--n",
        "60",
        "--clusters",
        "3",
        "--out",
        path(&out),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    for f in ["edges.csv", "labels.csv", "config.toml"] {
        assert!(out.join(f).exists(), "{f}");
    }
    let labels = fs::read_to_string(out.join("labels.csv")).unwrap();
    assert_eq!(labels.lines().next(), Some("node_id,class_index"));
    assert_eq!(labels.lines().count(), 61);
}

#[test]
fn train_link_sign_reports_every_metric() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let o = sigmanet(&[
        "train",
        "--task",
        "link-sign",
        "--n",
        "120",
        "--sign-flip-frac",
        "0.15",
        "--folds",
        "2",
        "--max-epochs",
        "60",
        "--patience",
        "20",
        "--out",
        path(&out),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let metrics = fs::read_to_string(out.join("metrics.csv")).unwrap();
    for m in ["micro_f1", "binary_f1", "macro_f1", "auc"] {
        assert!(
            metrics.contains(&format!("mean,{m},")),
            "{m} missing:\n{metrics}"
        );
    }
    assert!(out.join("checkpoints/fold_0.json").exists());
    assert!(out.join("loss_curve.csv").exists());
}
