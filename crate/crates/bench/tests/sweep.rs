use std::fs;
use std::path::Path;

use mmf_bench::{run_sweep, write_outputs, Collection, Method, SweepConfig};
use mmf_core::dataio::{random_symmetric, write_matrix_market};
use mmf_core::storage::solve_sym_core;
use mmf_core::{factor_symmetric, reconstruct_sym, Accounting, StorageBudget};

fn data_dir() -> std::path::PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data")
}

fn config(dir: &Path, manifest: &str, methods: Vec<Method>) -> SweepConfig {
    let manifest_path = dir.join("manifest.txt");
    fs::write(&manifest_path, manifest).unwrap();
    SweepConfig {
        manifest: manifest_path,
        methods,
        fractions: vec![0.25, 0.5],
        trials: 2,
        seed: 3,
        output: dir.join("out"),
        accounting: Accounting::Dense,
        data_dir: Some(data_dir().join("suitesparse")),
        cache_dir: None,
        hybrid_rank: Some(8),
        baseline: Method::Cur,
        max_numerical_symmetry: None,
        max_n: None,
        timing: false,
    }
}

fn source(c: &SweepConfig) -> Collection {
    Collection::new(c.data_dir.clone(), c.cache_dir.clone())
}

#[test]
fn identical_config_gives_identical_files() {
    let tmp = tempfile::tempdir().unwrap();
    let methods = vec![Method::DirectGreedyTopN, Method::Additive, Method::Hybrid];
    let mut c = config(tmp.path(), "HB/west0067\n", methods);
    let mut outputs = Vec::new();
    for k in 0..2 {
        c.output = tmp.path().join(format!("out{k}"));
        let outcome = run_sweep(&c, &source(&c)).unwrap();
        write_outputs(&outcome, &c.output).unwrap();
        let read = |f: &str| fs::read(c.output.join(f)).unwrap();
        outputs.push((read("runs.csv"), read("report.json"), read("wins.md")));
    }
    assert_eq!(outputs[0], outputs[1]);
    let csv = String::from_utf8(outputs[0].0.clone()).unwrap();
    // header plus 4 methods x 2 fractions x 2 trials
    assert_eq!(csv.lines().count(), 1 + 16);
    assert!(csv.starts_with("group,name,kind,n,nnz,method,fraction,trial,seed,budget,storage,error,failure\n"));
}

#[test]
fn method_against_itself_only_ties() {
    let tmp = tempfile::tempdir().unwrap();
    let c = config(tmp.path(), "HB/west0067\nHB/impcol_a\n", vec![Method::Cur]);
    let outcome = run_sweep(&c, &source(&c)).unwrap();
    assert_eq!(outcome.tables.len(), 1);
    let total = &outcome.tables[0].total;
    assert_eq!(total.matrices, 2);
    for cell in &total.cells {
        assert_eq!((cell.wins, cell.losses, cell.ties), (0.0, 0.0, 100.0));
    }
}

#[test]
fn symmetric_matrix_additive_is_symmetric_mmf() {
    let tmp = tempfile::tempdir().unwrap();
    let a = random_symmetric(40, 9);
    let path = tmp.path().join("sym.mtx");
    fs::write(&path, write_matrix_market(&a)).unwrap();
    let mut c = config(
        tmp.path(),
        &format!("Test/sym {}\n", path.display()),
        vec![Method::Additive, Method::Cur],
    );
    c.trials = 1;
    let outcome = run_sweep(&c, &source(&c)).unwrap();

    assert_eq!(outcome.tables.len(), 1);
    let table = &outcome.tables[0];
    assert_eq!(table.method, Method::Additive);
    assert_eq!(table.rows.len(), 1);
    assert_eq!(table.rows[0].kind, "unknown");
    assert_eq!(table.total.kind, "total wins");

    for &fraction in &c.fractions {
        let budget = StorageBudget::new(fraction, Accounting::Dense).unwrap().scalars(&a);
        let f = factor_symmetric(&a, solve_sym_core(40, budget).unwrap(), c.seed).unwrap();
        let want = mmf_core::matcore::frobenius_relative_error(&a, &reconstruct_sym(&f)).unwrap();
        let got = outcome
            .reports
            .iter()
            .find(|r| r.method == Method::Additive && r.fraction == fraction)
            .unwrap();
        assert!((got.mean_error - want).abs() < 1e-12, "{} vs {want}", got.mean_error);
    }
}

#[test]
fn unavailable_and_filtered_matrices_are_skipped() {
    let tmp = tempfile::tempdir().unwrap();
    let mut c = config(tmp.path(), "HB/west0067\nHB/missing\nHB/west0479\n", vec![Method::Cur]);
    c.max_n = Some(100);
    let outcome = run_sweep(&c, &source(&c)).unwrap();
    let skipped: Vec<&str> = outcome.failures.iter().map(|f| f.matrix.as_str()).collect();
    assert_eq!(skipped, ["HB/missing", "HB/west0479"]);
    assert!(outcome.reports.iter().all(|r| r.matrix.name == "west0067"));
    assert_eq!(outcome.reports.len(), 2);
}

#[test]
fn infeasible_budgets_are_recorded_not_fatal() {
    let tmp = tempfile::tempdir().unwrap();
    let mut c = config(tmp.path(), "HB/west0067\n", vec![Method::DirectGreedyTopN]);
    c.fractions = vec![0.01, 0.5];
    let outcome = run_sweep(&c, &source(&c)).unwrap();
    let failed: Vec<_> = outcome.failures.iter().map(|f| (f.method, f.fraction)).collect();
    assert!(failed.contains(&(Some(Method::DirectGreedyTopN), Some(0.01))));
    assert!(outcome
        .reports
        .iter()
        .any(|r| r.method == Method::DirectGreedyTopN && r.fraction == 0.5));
    // at 1% neither method fits, which counts as a tie
    assert_eq!(outcome.tables[0].total.cells[0].ties, 100.0);
}

#[test]
fn every_recorded_run_fits_its_budget() {
    let tmp = tempfile::tempdir().unwrap();
    let c = config(tmp.path(), "HB/west0067\nHB/plskz362\n", Method::ALL.to_vec());
    let outcome = run_sweep(&c, &source(&c)).unwrap();
    assert!(!outcome.records.is_empty());
    for r in &outcome.records {
        if let Some(s) = r.storage {
            assert!(s <= r.budget, "{r:?}");
        }
    }
    for t in &outcome.tables {
        for row in t.rows.iter().chain([&t.total]) {
            for cell in &row.cells {
                assert!((cell.wins + cell.losses + cell.ties - 100.0).abs() <= 0.1);
            }
        }
    }
}
