use std::path::PathBuf;
use std::process::Command;

use proptest::prelude::*;
use vecplan_bench::output::{cdf_points, write_cdf_csv, write_runs_csv, write_summary_csv};
use vecplan_bench::problem::{
    load_problem_set, resolve, save_problem_set, EnvironmentRef, LoadOverrides,
};
use vecplan_bench::run::{run_benchmark, PlannerKind, RunOptions};
use vecplan_bench::stats::{quantile, summarize_stats, TableRow};
use vecplan_bench::BenchError;
use vecplan_core::simplify::SimplifySettings;
use vecplan_core::vector::Configuration;

fn data(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../data")
        .join(rel)
}

fn options(planner: PlannerKind, trials: usize, scalar: bool) -> RunOptions {
    let set = load_problem_set(&data("problems/toy_planar.json")).unwrap();
    RunOptions {
        planner,
        trials,
        settings: set.doc.settings,
        simplify: Some(SimplifySettings::default()),
        scalar,
    }
}

#[test]
fn bundled_sets_load() {
    let toy = load_problem_set(&data("problems/toy_planar.json")).unwrap();
    assert_eq!(toy.problems.len(), 10);
    assert_eq!(toy.robot.dof(), 2);
    assert_eq!(toy.doc.settings.range, 0.5);
    for name in ["arm_table", "arm_shelf", "arm_cage"] {
        let set = load_problem_set(&data(&format!("problems/{name}.json"))).unwrap();
        assert_eq!(set.problems.len(), 10, "{name}");
        assert_eq!(set.robot.dof(), 7);
    }
}

#[test]
fn out_of_limit_and_bad_dimension_are_reported_by_id() {
    let mut doc = load_problem_set(&data("problems/toy_planar.json"))
        .unwrap()
        .doc;
    doc.problems[2].start = Configuration::new(vec![5.0, 0.0]).unwrap();
    doc.problems[4].goal = Configuration::new(vec![0.0, 0.0, 0.0]).unwrap();
    let ids = (doc.problems[2].id.clone(), doc.problems[4].id.clone());
    match resolve(doc, &data("problems"), &LoadOverrides::default()) {
        Err(BenchError::Validation(issues)) => {
            assert_eq!(issues.len(), 2);
            assert!(issues[0].starts_with(&ids.0) && issues[0].contains("limits"));
            assert!(issues[1].starts_with(&ids.1) && issues[1].contains("3 values"));
        }
        other => panic!("unexpected {:?}", other.err()),
    }
}

#[test]
fn unknown_fields_are_schema_errors() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(
        &path,
        r#"{"robot": "r.urdf", "spheres": "s.json", "problems": [], "extra": 1}"#,
    )
    .unwrap();
    assert!(matches!(
        load_problem_set(&path),
        Err(BenchError::Schema { .. })
    ));
}

#[test]
fn save_and_reload_round_trip() {
    let original = load_problem_set(&data("problems/toy_planar.json")).unwrap();
    let mut doc = original.doc.clone();
    doc.robot = data("robots/planar2.urdf").display().to_string();
    doc.spheres = data("robots/planar2_spheres.json").display().to_string();
    for (spec, problem) in doc.problems.iter_mut().zip(&original.problems) {
        spec.environment = EnvironmentRef::Inline(problem.environment.clone());
    }
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("toy.json");
    save_problem_set(&doc, &path).unwrap();
    let again = load_problem_set(&path).unwrap();
    assert_eq!(again.doc.settings, original.doc.settings);
    assert_eq!(again.problems.len(), original.problems.len());
    for (a, b) in again.problems.iter().zip(&original.problems) {
        assert_eq!(a.id, b.id);
        assert!(a.start.bitwise_eq(&b.start) && a.goal.bitwise_eq(&b.goal));
        assert_eq!(a.environment, b.environment);
    }
}

#[test]
fn benchmark_runs_are_deterministic() {
    let set = load_problem_set(&data("problems/toy_planar.json")).unwrap();
    for planner in [PlannerKind::Rrtc, PlannerKind::Prm] {
        let a = run_benchmark(&set, &options(planner, 2, false)).unwrap();
        let b = run_benchmark(&set, &options(planner, 1, true)).unwrap();
        assert_eq!(a.len(), 20);
        assert_eq!(b.len(), 10);
        for (pair, scalar) in a.chunks(2).zip(&b) {
            for r in pair.iter().chain([scalar]) {
                assert!(r.success);
                assert_eq!(r.problem_id, pair[0].problem_id);
                assert_eq!(r.iterations, pair[0].iterations);
                assert!(r
                    .path
                    .as_ref()
                    .unwrap()
                    .bitwise_eq(pair[0].path.as_ref().unwrap()));
                assert!(r
                    .simplified
                    .as_ref()
                    .unwrap()
                    .bitwise_eq(pair[0].simplified.as_ref().unwrap()));
                assert!(r.simplified_cost.unwrap() <= r.initial_cost.unwrap());
            }
        }
    }
}

#[test]
fn sealed_problem_fails_at_the_cap() {
    let set = load_problem_set(&data("problems/toy_sealed.json")).unwrap();
    let opts = RunOptions {
        planner: PlannerKind::Rrtc,
        trials: 1,
        settings: set.doc.settings.clone(),
        simplify: None,
        scalar: false,
    };
    let records = run_benchmark(&set, &opts).unwrap();
    assert!(!records[0].success);
    assert_eq!(records[0].iterations, set.doc.settings.max_iterations);
    let summary = summarize_stats(&records).unwrap();
    assert_eq!(
        TableRow::from(&summary).to_string(),
        "- | - | - | - | - | - | 0%"
    );
}

#[test]
fn output_files_agree_with_records() {
    let set = load_problem_set(&data("problems/toy_planar.json")).unwrap();
    let opts = options(PlannerKind::Rrtc, 1, false);
    let records = run_benchmark(&set, &opts).unwrap();
    let summary = summarize_stats(&records).unwrap();
    let dir = tempfile::tempdir().unwrap();
    write_runs_csv(&dir.path().join("runs.csv"), &records, &opts).unwrap();
    write_summary_csv(&dir.path().join("summary.csv"), &summary, &opts).unwrap();
    write_cdf_csv(&dir.path().join("cdf.csv"), &records).unwrap();

    let mut runs = csv::Reader::from_path(dir.path().join("runs.csv")).unwrap();
    let rows: Vec<csv::StringRecord> = runs.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 10);
    assert_eq!(&rows[0][0], records[0].problem_id.as_str());
    let mut cdf = csv::Reader::from_path(dir.path().join("cdf.csv")).unwrap();
    let points: Vec<(f64, f64)> = cdf
        .records()
        .map(|r| r.unwrap())
        .map(|r| (r[0].parse().unwrap(), r[1].parse().unwrap()))
        .collect();
    assert_eq!(points.len(), cdf_points(&records).len());
    assert_eq!(points.last().unwrap().1, 1.0);
    assert!(points
        .windows(2)
        .all(|w| w[0].0 <= w[1].0 && w[0].1 < w[1].1));
}

#[test]
fn cli_plans_and_writes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_vecplan"))
        .args([
            "plan",
            "--planner",
            "prm",
            "--trials",
            "1",
            "--simplify",
            "--problems",
        ])
        .arg(data("problems/toy_planar.json"))
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("Mean | Q1 | Median | Q3 | 95% | Mean Simpl. | Succ."));
    assert!(stdout.contains("| 100%"));
    for file in ["runs.csv", "summary.csv", "cdf.csv", "metadata.json"] {
        assert!(dir.path().join(file).exists(), "{file}");
    }

    let bad = Command::new(env!("CARGO_BIN_EXE_vecplan"))
        .args(["plan", "--problems", "/nonexistent.json"])
        .output()
        .unwrap();
    assert!(!bad.status.success());
}

proptest! {
    #[test]
    fn quantile_matches_order_statistics(mut values in prop::collection::vec(-1e3f64..1e3, 1..40), q in 0.0f64..=1.0) {
        values.sort_by(f64::total_cmp);
        let n = values.len();
        // At the grid points h = k exactly, the quantile is the k-th order statistic.
        for k in 0..n {
            let at = if n == 1 { 0.0 } else { k as f64 / (n - 1) as f64 };
            let want = values[k];
            prop_assert!((quantile(&values, at) - want).abs() <= 1e-9 * want.abs().max(1.0));
        }
        let v = quantile(&values, q);
        prop_assert!(values[0] <= v && v <= values[n - 1]);
        prop_assert!(quantile(&values, q * 0.5) <= v);
    }
}
