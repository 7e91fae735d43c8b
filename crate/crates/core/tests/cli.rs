use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use rankcurve::cli::run_from;
use rankcurve::data::IndicatorTable;
use rankcurve::fitting::FitOutput;
use rankcurve::ranking::RankingResult;
use rankcurve::synthetic::{curved_table, fleming_wallace_table};

fn write_table(dir: &Path, name: &str, table: &IndicatorTable) -> (PathBuf, PathBuf) {
    let data = dir.join(format!("{name}.csv"));
    let mut buf = Vec::new();
    table.write_csv(&mut buf).unwrap();
    fs::write(&data, buf).unwrap();
    let schema = dir.join(format!("{name}.schema.json"));
    fs::write(&schema, serde_json::to_string(&table.schema()).unwrap()).unwrap();
    (data, schema)
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn fit(dir: &Path, data: &Path, schema: &Path) -> PathBuf {
    let out = dir.join("fit.json");
    let code = run_from(["rankcurve", "fit", "--data", s(data), "--schema", s(schema), "--out", s(&out)]);
    assert_eq!(code, 0);
    out
}

#[test]
fn fit_then_rank_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let (data, schema) = write_table(dir.path(), "cloud", &curved_table(80));
    let fit_path = fit(dir.path(), &data, &schema);

    let out: FitOutput = serde_json::from_str(&fs::read_to_string(&fit_path).unwrap()).unwrap();
    assert_eq!(out.curve.parameter_count(), 16);
    assert_eq!(out.curve.control_points_raw.as_ref().unwrap().len(), 4);
    assert_eq!(out.ranking.len(), 80);

    let ranked = dir.path().join("rank.csv");
    let code = run_from(["rankcurve", "rank", "--data", s(&data), "--curve", s(&fit_path), "--out", s(&ranked)]);
    assert_eq!(code, 0);
    let text = fs::read_to_string(&ranked).unwrap();
    assert!(text.starts_with("id,score,order\n"));
    assert_eq!(text.lines().count(), 81);
    let back = RankingResult::read_csv("rpc", text.as_bytes()).unwrap();
    let mut expect: Vec<_> = out.ranking.sorted().into_iter().cloned().collect();
    expect.sort_by_key(|e| e.order);
    assert_eq!(back.entries, expect);

    // a bare curve file works too, and json output is sorted best first
    let bare = dir.path().join("curve.json");
    fs::write(&bare, serde_json::to_string(&out.curve).unwrap()).unwrap();
    let json = dir.path().join("rank.json");
    let code = run_from([
        "rankcurve", "rank", "--data", s(&data), "--curve", s(&bare), "--out", s(&json), "--format", "json",
    ]);
    assert_eq!(code, 0);
    let r: RankingResult = serde_json::from_str(&fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(r.entries[0].order, 1);
    assert_eq!(r.entries[0].id, back.entries[0].id);
}

#[test]
fn fit_output_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let (data, schema) = write_table(dir.path(), "cloud", &curved_table(60));
    let a = fs::read(fit(dir.path(), &data, &schema)).unwrap();
    let b = fs::read(fit(dir.path(), &data, &schema)).unwrap();
    assert_eq!(a, b);
}

#[test]
fn fit_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let (data, schema) = write_table(dir.path(), "cloud", &curved_table(20));
    let out = dir.path().join("o.json");
    let missing = dir.path().join("missing.csv");
    assert_eq!(
        run_from(["rankcurve", "fit", "--data", s(&missing), "--schema", s(&schema), "--out", s(&out)]),
        2
    );
    let (small, small_schema) = write_table(dir.path(), "small", &fleming_wallace_table());
    assert_eq!(
        run_from(["rankcurve", "fit", "--data", s(&small), "--schema", s(&small_schema), "--out", s(&out)]),
        3
    );
    assert_eq!(
        run_from([
            "rankcurve", "fit", "--data", s(&data), "--schema", s(&schema), "--out", s(&out), "--max-iters", "0",
        ]),
        2
    );
    let bad = dir.path().join("bad.csv");
    fs::write(&bad, "id,x1,x2,x3,x4\na,1,2,3,4\nb,1,x,3,5\n").unwrap();
    assert_eq!(
        run_from(["rankcurve", "fit", "--data", s(&bad), "--schema", s(&schema), "--out", s(&out)]),
        2
    );
}

#[test]
fn rank_rejects_mismatched_curve() {
    let dir = tempfile::tempdir().unwrap();
    let (data, schema) = write_table(dir.path(), "cloud", &curved_table(30));
    let fit_path = fit(dir.path(), &data, &schema);
    let (small, _) = write_table(dir.path(), "small", &fleming_wallace_table());
    let code = run_from(["rankcurve", "rank", "--data", s(&small), "--curve", s(&fit_path)]);
    assert_eq!(code, 2);
}

#[test]
fn check_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let (data, schema) = write_table(dir.path(), "fw", &fleming_wallace_table());
    let check = |method: &str| {
        run_from(["rankcurve", "check", "--data", s(&data), "--schema", s(&schema), "--method", method])
    };
    assert_eq!(check("arithmetic"), 1);
    assert_eq!(check("geometric"), 1);
    assert_eq!(check("nonsense"), 2);

    let (cloud, cloud_schema) = write_table(dir.path(), "cloud", &curved_table(60));
    let code = run_from([
        "rankcurve", "check", "--data", s(&cloud), "--schema", s(&cloud_schema), "--method", "rpc", "--format", "json",
    ]);
    assert_eq!(code, 0);
    let code = run_from([
        "rankcurve", "check", "--data", s(&cloud), "--schema", s(&cloud_schema), "--method", "pca", "--weights", "0.5,0.5",
    ]);
    assert_eq!(code, 2);
}

#[test]
fn compare_writes_table_and_correlations() {
    let dir = tempfile::tempdir().unwrap();
    let (data, schema) = write_table(dir.path(), "cloud", &curved_table(50));
    let out = dir.path().join("cmp.csv");
    let code = run_from([
        "rankcurve", "compare", "--data", s(&data), "--schema", s(&schema), "--methods", "rpc,pca,geometric", "--out",
        s(&out),
    ]);
    assert_eq!(code, 0);
    let table = fs::read_to_string(&out).unwrap();
    assert!(table.starts_with("id,rpc_score,rpc_order,pca_score,pca_order,geometric_score,geometric_order\n"));
    assert_eq!(table.lines().count(), 51);
    let rho = fs::read_to_string(dir.path().join("cmp_spearman.csv")).unwrap();
    assert_eq!(rho.lines().count(), 4);
    assert!(rho.lines().nth(1).unwrap().starts_with("rpc,1,"));
    assert!(dir.path().join("cmp_kendall.csv").is_file());

    let single = dir.path().join("one.csv");
    let code = run_from([
        "rankcurve", "compare", "--data", s(&data), "--schema", s(&schema), "--methods", "pca", "--out", s(&single),
    ]);
    assert_eq!(code, 0);
    let rho = fs::read_to_string(dir.path().join("one_spearman.csv")).unwrap();
    assert_eq!(rho, "method,pca\npca,1\n");

    let code = run_from([
        "rankcurve", "compare", "--data", s(&data), "--schema", s(&schema), "--methods", "elmap-reference",
    ]);
    assert_eq!(code, 2);
}

#[test]
fn compare_joins_published_reference_by_id() {
    let dir = tempfile::tempdir().unwrap();
    let (data, schema) = write_table(dir.path(), "excerpt", &rankcurve::reference::published_excerpt_table());
    let out = dir.path().join("cmp.json");
    let code = run_from([
        "rankcurve", "compare", "--data", s(&data), "--schema", s(&schema), "--methods", "arithmetic-normalized,elmap-reference",
        "--out", s(&out), "--format", "json",
    ]);
    assert_eq!(code, 0);
    let cmp: rankcurve::baselines::Comparison = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(cmp.methods, vec!["arithmetic-normalized", "elmap-reference"]);
    let lux = cmp.rows.iter().find(|r| r.id == "Luxembourg").unwrap();
    assert_eq!(lux.cells[1], Some((0.892, 1)));
}

#[test]
fn plotdata_panels() {
    let dir = tempfile::tempdir().unwrap();
    let (data, schema) = write_table(dir.path(), "cloud", &curved_table(40));
    let fit_path = fit(dir.path(), &data, &schema);
    let plots = dir.path().join("plots");
    let code = run_from(["rankcurve", "plotdata", "--data", s(&data), "--curve", s(&fit_path), "--out", s(&plots)]);
    assert_eq!(code, 0);
    let mut names: Vec<String> = fs::read_dir(&plots)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    names.sort();
    assert_eq!(names.iter().filter(|n| n.starts_with("hist_")).count(), 4);
    assert_eq!(names.iter().filter(|n| n.starts_with("pair_")).count(), 6);
    for h in names.iter().filter(|n| n.starts_with("hist_")) {
        let text = fs::read_to_string(plots.join(h)).unwrap();
        let total: usize = text.lines().skip(1).map(|l| l.rsplit(',').next().unwrap().parse::<usize>().unwrap()).sum();
        assert_eq!(total, 40);
    }

    // a regular file where the directory should go
    let blocker = dir.path().join("blocker");
    fs::write(&blocker, "").unwrap();
    let code = run_from([
        "rankcurve", "plotdata", "--data", s(&data), "--curve", s(&fit_path), "--out", s(&blocker.join("sub")),
    ]);
    assert_eq!(code, 2);
}

#[test]
fn binary_reports_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_rankcurve");
    let status = Command::new(bin).arg("--help").output().unwrap().status;
    assert_eq!(status.code(), Some(0));
    let out = Command::new(bin)
        .args(["fit", "--data", "/nonexistent.csv", "--schema", "/nonexistent.json", "--out", "/tmp/x.json"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));
}
