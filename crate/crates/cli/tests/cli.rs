use std::path::Path;

use navtest::fixtures::{INVOICES_FAULTS, INVOICES_NAV, SCRIPT_PROFILE_HTML, SCRIPT_SEARCH_HTML, WEBADMIN_XML};
use navtest_cli::{run, EXIT_ERROR, EXIT_OK, EXIT_TEST_FAILURES, PROJECT_MARKER};

struct Outcome {
    code: i32,
    out: String,
    err: String,
}

fn navtest(dir: &Path, args: &[&str]) -> Outcome {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run(std::iter::once("navtest").chain(args.iter().copied()), dir, &mut out, &mut err);
    Outcome { code, out: String::from_utf8(out).unwrap(), err: String::from_utf8(err).unwrap() }
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let o = navtest(dir, args);
    assert_eq!(o.code, EXIT_OK, "{args:?}\n{}{}", o.out, o.err);
    o.out
}

fn invoices_workspace() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("invoices.nav"), INVOICES_NAV).unwrap();
    std::fs::write(dir.path().join("invoices.faults"), INVOICES_FAULTS).unwrap();
    ok(dir.path(), &["set", "navigation-type", "dsl"]);
    ok(dir.path(), &["set", "navigation-folder", "invoices.nav"]);
    dir
}

#[test]
fn bare_invocation_lists_commands() {
    let dir = tempfile::tempdir().unwrap();
    let out = ok(dir.path(), &[]);
    for verb in ["create", "run", "clean", "list", "set <key> <value>", "report", "bench"] {
        assert!(out.contains(&format!("navtest {verb}")), "{out}");
    }
    assert!(ok(dir.path(), &["--help"]).contains("Usage"));
}

#[test]
fn unknown_verb_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = navtest(dir.path(), &["deploy"]);
    assert_eq!(o.code, EXIT_ERROR);
    assert!(!o.err.is_empty());
}

#[test]
fn set_rejects_unsupported_navigation_type() {
    let dir = tempfile::tempdir().unwrap();
    let o = navtest(dir.path(), &["set", "navigation-type", "xmi"]);
    assert_eq!(o.code, EXIT_ERROR);
    assert!(o.err.contains("xml, dsl, html"), "{}", o.err);
    assert!(ok(dir.path(), &["list"]).contains("navigation-type=xml\n"));
}

#[test]
fn set_rejects_unknown_key() {
    let dir = tempfile::tempdir().unwrap();
    let o = navtest(dir.path(), &["set", "colour", "blue"]);
    assert_eq!(o.code, EXIT_ERROR);
    for key in ["sut", "root", "navigation-type", "navigation-folder", "seed", "report-format"] {
        assert!(o.err.contains(key), "{}", o.err);
    }
}

#[test]
fn list_shows_value_after_set() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["set", "sut", "http://example.test/app/"]);
    ok(dir.path(), &["set", "seed", "42"]);
    let listed = ok(dir.path(), &["list"]);
    assert!(listed.contains("sut=http://example.test/app/\n"), "{listed}");
    assert!(listed.contains("seed=42\n"), "{listed}");
    // The file is the listing.
    assert_eq!(std::fs::read_to_string(dir.path().join("atp.conf")).unwrap(), listed);
}

#[test]
fn seed_flag_does_not_persist_through_set() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["--seed", "9", "set", "sut", "http://x/"]);
    assert!(ok(dir.path(), &["list"]).contains("seed=0\n"));
    assert!(ok(dir.path(), &["--seed", "9", "list"]).contains("seed=9\n"));
}

#[test]
fn create_without_navigation_folder_fails() {
    let dir = tempfile::tempdir().unwrap();
    let o = navtest(dir.path(), &["create"]);
    assert_eq!(o.code, EXIT_ERROR);
    assert!(o.err.contains("navigation-folder not set"), "{}", o.err);
}

#[test]
fn create_twice_reports_existing_project() {
    let ws = invoices_workspace();
    ok(ws.path(), &["create"]);
    let o = navtest(ws.path(), &["create"]);
    assert_eq!(o.code, EXIT_ERROR);
    assert!(o.err.contains("project exists"), "{}", o.err);
}

#[test]
fn create_lays_out_project() {
    let ws = invoices_workspace();
    let out = ok(ws.path(), &["create"]);
    assert!(out.starts_with("plans: 1, total path cost: 13"), "{out}");
    let project = ws.path().join("project");
    for entry in [PROJECT_MARKER, "model.json", "plans/path_1.json", "data/path_1.csv", "reports"] {
        assert!(project.join(entry).exists(), "{entry}");
    }
}

#[test]
fn paper_listing_creates_two_plans() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::create_dir(dir.path().join("model")).unwrap();
    std::fs::write(dir.path().join("model/webadmin.xml"), WEBADMIN_XML).unwrap();
    ok(dir.path(), &["set", "navigation-folder", "model"]);
    let out = ok(dir.path(), &["create"]);
    assert!(out.starts_with("plans: 2, total path cost: 2"), "{out}");
    assert_eq!(ok(dir.path(), &["run"]).lines().count(), 1);
}

#[test]
fn merged_scripts_run_clean() {
    let dir = tempfile::tempdir().unwrap();
    let scripts = dir.path().join("scripts");
    std::fs::create_dir(&scripts).unwrap();
    std::fs::write(scripts.join("search.html"), SCRIPT_SEARCH_HTML).unwrap();
    std::fs::write(scripts.join("profile.html"), SCRIPT_PROFILE_HTML).unwrap();
    ok(dir.path(), &["set", "navigation-type", "html"]);
    ok(dir.path(), &["set", "navigation-folder", "scripts"]);
    ok(dir.path(), &["create"]);
    ok(dir.path(), &["run"]);
}

#[test]
fn directory_with_two_models_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::create_dir(dir.path().join("m")).unwrap();
    std::fs::write(dir.path().join("m/a.xml"), WEBADMIN_XML).unwrap();
    std::fs::write(dir.path().join("m/b.xml"), WEBADMIN_XML).unwrap();
    ok(dir.path(), &["set", "navigation-folder", "m"]);
    let o = navtest(dir.path(), &["create"]);
    assert_eq!(o.code, EXIT_ERROR);
    assert!(!dir.path().join("project").exists());
}

#[test]
fn parse_errors_exit_one_with_diagnostics() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.nav"), "home a\nstate a\nedge a -> b [x,click]\n").unwrap();
    ok(dir.path(), &["set", "navigation-type", "dsl"]);
    ok(dir.path(), &["set", "navigation-folder", "bad.nav"]);
    let o = navtest(dir.path(), &["create"]);
    assert_eq!(o.code, EXIT_ERROR);
    assert!(o.err.contains("bad.nav"), "{}", o.err);
}

#[test]
fn run_without_project_fails() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(navtest(dir.path(), &["run"]).code, EXIT_ERROR);
    assert_eq!(navtest(dir.path(), &["report"]).code, EXIT_ERROR);
}

#[test]
fn clean_run_passes_and_reports() {
    let ws = invoices_workspace();
    ok(ws.path(), &["create"]);
    let out = ok(ws.path(), &["run"]);
    assert!(out.contains("0 failed"), "{out}");
    let reports = ws.path().join("project/reports");
    for f in ["report.json", "report.html", "report.txt"] {
        assert!(reports.join(f).is_file(), "{f}");
    }
    let report = ok(ws.path(), &["report"]);
    assert!(report.contains("0 failed"));
    assert!(report.contains("report.html"));
}

#[test]
fn report_format_limits_written_files() {
    let ws = invoices_workspace();
    ok(ws.path(), &["set", "report-format", "json"]);
    ok(ws.path(), &["create"]);
    ok(ws.path(), &["run"]);
    let reports = ws.path().join("project/reports");
    assert!(reports.join("report.json").is_file());
    assert!(!reports.join("report.txt").exists());
    // Falls back to rendering the JSON report.
    assert!(ok(ws.path(), &["report"]).contains("0 failed"));
}

#[test]
fn broken_link_exits_two() {
    let ws = invoices_workspace();
    std::fs::write(ws.path().join("one.faults"), "broken-link 2 login\n").unwrap();
    ok(ws.path(), &["set", "faults", "one.faults"]);
    ok(ws.path(), &["create"]);
    let o = navtest(ws.path(), &["run"]);
    assert_eq!(o.code, EXIT_TEST_FAILURES, "{}{}", o.out, o.err);
    assert!(o.out.contains("expected `invoices`, got `login`"), "{}", o.out);
}

#[test]
fn fault_naming_unknown_state_is_an_error() {
    let ws = invoices_workspace();
    std::fs::write(ws.path().join("bad.faults"), "missing-element nowhere x\n").unwrap();
    ok(ws.path(), &["set", "faults", "bad.faults"]);
    ok(ws.path(), &["create"]);
    assert_eq!(navtest(ws.path(), &["run"]).code, EXIT_ERROR);
}

#[test]
fn appended_rows_become_iterations() {
    let ws = invoices_workspace();
    ok(ws.path(), &["create"]);
    let csv = ws.path().join("project/data/path_1.csv");
    let text = std::fs::read_to_string(&csv).unwrap();
    let row = text.lines().nth(1).unwrap().to_owned();
    std::fs::write(&csv, format!("{text}{row}\n")).unwrap();
    ok(ws.path(), &["run"]);
    let json = std::fs::read_to_string(ws.path().join("project/reports/report.json")).unwrap();
    let report = navtest::sutsim::RunReport::from_json(&json).unwrap();
    assert!(report.verdicts.iter().any(|v| v.row == 2));
}

#[test]
fn clean_twice_is_a_no_op() {
    let ws = invoices_workspace();
    ok(ws.path(), &["create"]);
    assert!(ok(ws.path(), &["clean"]).contains("removed"));
    assert!(!ws.path().join("project").exists());
    assert!(ok(ws.path(), &["clean"]).contains("nothing to clean"));
    assert!(ws.path().join("invoices.nav").is_file());
}

#[test]
fn clean_leaves_foreign_directories_alone() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::create_dir(dir.path().join("project")).unwrap();
    std::fs::write(dir.path().join("project/keep.txt"), "mine").unwrap();
    assert_eq!(navtest(dir.path(), &["clean"]).code, EXIT_ERROR);
    assert!(dir.path().join("project/keep.txt").is_file());
}

#[test]
fn bench_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("bench.csv");
    let gp = dir.path().join("bench.dat");
    ok(
        dir.path(),
        &["bench", "--max-links", "6", "--repetitions", "3", "--output", csv.to_str().unwrap(), "--gnuplot", gp.to_str().unwrap()],
    );
    let text = std::fs::read_to_string(csv).unwrap();
    assert!(text.starts_with("links,mean_cost_cpp"));
    assert_eq!(text.lines().count(), 7);
    assert!(std::fs::read_to_string(gp).unwrap().starts_with('#'));
}
