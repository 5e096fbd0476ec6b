//! The `navtest` command line: a project directory driven by a small
//! key=value configuration file.
//!
//! ```text
//! navtest set navigation-type dsl
//! navtest set navigation-folder models/shop.nav
//! navtest create      # paths, plans and data files
//! navtest run         # execute against the simulated application
//! navtest report
//! ```

pub mod config;

use std::ffi::OsString;
use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use navtest::bench::{bench_csv, bench_gnuplot, run_benchmark, BenchConfig};
use navtest::cpp::solve_cpp;
use navtest::models::{decode_xml_bytes, lower_to_graph, parse_graph_dsl, parse_rnp_scripts, parse_xml, NavigationModel};
use navtest::navgraph::make_strongly_connected;
use navtest::pathalg::DEFAULT_EXPANSION_CAP;
use navtest::sutsim::{parse_faults, run_plans, RunReport, SimConfig};
use navtest::testgen::{dictionary_default, generate_plans, load_tabular, write_tabular, TestPlan};
use navtest::Rational;

pub use config::{Config, ConfigError, NavigationType, ReportFormat, CONFIG_FILE};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_TEST_FAILURES: i32 = 2;

/// Environment variable naming the configuration directory.
pub const ROOT_ENV: &str = "NAVTEST_ROOT";

/// Present in every directory `create` made; `clean` removes nothing else.
pub const PROJECT_MARKER: &str = ".navtest-project";

pub const MODEL_FILE: &str = "model.json";
pub const PLANS_DIR: &str = "plans";
pub const DATA_DIR: &str = "data";
pub const REPORTS_DIR: &str = "reports";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliError(pub String);

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError(e.0)
    }
}

fn context<E: fmt::Display>(what: impl fmt::Display) -> impl FnOnce(E) -> CliError {
    move |e| CliError(format!("{what}: {e}"))
}

#[derive(Debug, Parser)]
#[command(name = "navtest", version, about = "Model-based test generation and execution for web navigation")]
struct Cli {
    /// Overrides the configured seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build paths, test plans and data files from the navigation model.
    Create,
    /// Execute the plans against the simulated application.
    Run,
    /// Remove the project directory.
    Clean,
    /// Show the configuration.
    List,
    /// Change one configuration value.
    Set { key: String, value: String },
    /// Print the latest report.
    Report,
    /// Compare path generation strategies on random graphs.
    Bench {
        #[arg(long, default_value_t = 50)]
        max_links: usize,
        #[arg(long, default_value_t = 100)]
        repetitions: usize,
        /// Chance that a new link leads to a fresh page.
        #[arg(long, default_value_t = 0.4)]
        probability: f64,
        #[arg(long, default_value_t = DEFAULT_EXPANSION_CAP)]
        expansion_cap: u64,
        /// CSV destination; standard output when absent.
        #[arg(long)]
        output: Option<PathBuf>,
        /// Also write a gnuplot data file.
        #[arg(long)]
        gnuplot: Option<PathBuf>,
    },
}

const USAGE: &str = "\
Use one of these commands:
        navtest create
        navtest run
        navtest clean
        navtest list
        navtest set <key> <value>
        navtest report
        navtest bench [--max-links <n>] [--repetitions <n>]
";

/// Configuration directory: `$NAVTEST_ROOT`, else the working directory.
pub fn config_dir() -> PathBuf {
    match std::env::var_os(ROOT_ENV) {
        Some(dir) if !dir.is_empty() => PathBuf::from(dir),
        _ => std::env::current_dir().unwrap_or_else(|_| PathBuf::from(".")),
    }
}

pub fn project_dir(cfg: &Config, config_dir: &Path) -> PathBuf {
    Config::resolve(config_dir, &cfg.root)
}

/// Runs one command line and returns the process exit code.
pub fn run<I, T>(args: I, config_dir: &Path, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{}", e.render());
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{}", e.render());
                    EXIT_ERROR
                }
            };
        }
    };
    let Some(command) = cli.command else {
        let _ = write!(out, "navtest {}\n\n{USAGE}", env!("CARGO_PKG_VERSION"));
        return EXIT_OK;
    };
    match dispatch(command, cli.seed, config_dir, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_ERROR
        }
    }
}

fn dispatch(command: Command, seed: Option<u64>, dir: &Path, out: &mut dyn Write) -> Result<i32, CliError> {
    let mut cfg = Config::load(dir)?;
    if let Some(seed) = seed {
        cfg.seed = seed;
    }
    match command {
        Command::Create => {
            let created = create_project(&cfg, dir)?;
            let _ = writeln!(
                out,
                "plans: {}, total path cost: {}, project: {}",
                created.plans,
                created.total_cost,
                created.project.display()
            );
            Ok(EXIT_OK)
        }
        Command::Run => {
            let report = run_project(&cfg, dir)?;
            for v in report.failures() {
                let _ = writeln!(
                    out,
                    "FAIL {} row {} step {} check {}: expected `{}`, got `{}` {}",
                    v.plan, v.row, v.step, v.check, v.expected, v.actual, v.detail
                );
            }
            let headline = report.to_text();
            let _ = writeln!(out, "{}", headline.lines().last().unwrap_or_default());
            Ok(if report.passed() { EXIT_OK } else { EXIT_TEST_FAILURES })
        }
        Command::Clean => {
            let _ = writeln!(out, "{}", clean_project(&cfg, dir)?);
            Ok(EXIT_OK)
        }
        Command::List => {
            let _ = write!(out, "{}", cfg.render());
            Ok(EXIT_OK)
        }
        Command::Set { key, value } => {
            // Persist the file's contents, not a --seed given on this line.
            let mut stored = Config::load(dir)?;
            stored.set(&key, &value)?;
            stored.save(dir)?;
            let _ = writeln!(out, "{key}={}", stored.get(&key).unwrap_or_default());
            Ok(EXIT_OK)
        }
        Command::Report => {
            let reports = project_dir(&cfg, dir).join(REPORTS_DIR);
            let text = std::fs::read_to_string(reports.join(ReportFormat::Text.file_name())).or_else(|_| {
                std::fs::read_to_string(reports.join(ReportFormat::Json.file_name()))
                    .map_err(|_| CliError(format!("no report in {}; use `navtest run` first", reports.display())))
                    .and_then(|json| {
                        RunReport::from_json(&json).map(|r| r.to_text()).map_err(context("corrupt JSON report"))
                    })
            })?;
            let _ = write!(out, "{text}");
            let html = reports.join(ReportFormat::Html.file_name());
            if html.is_file() {
                let _ = writeln!(out, "HTML report: {}", html.display());
            }
            Ok(EXIT_OK)
        }
        Command::Bench { max_links, repetitions, probability, expansion_cap, output, gnuplot } => {
            let bench = BenchConfig { max_links, repetitions, seed: cfg.seed, new_vertex_probability: probability, expansion_cap };
            let records = run_benchmark::<Rational>(&bench).map_err(context("benchmark"))?;
            let csv = bench_csv(&records);
            match output {
                Some(path) => std::fs::write(&path, csv).map_err(context(path.display()))?,
                None => {
                    let _ = write!(out, "{csv}");
                }
            }
            if let Some(path) = gnuplot {
                std::fs::write(&path, bench_gnuplot(&records)).map_err(context(path.display()))?;
            }
            let violations: usize = records.iter().map(|r| r.dominance_violations).sum();
            if violations > 0 {
                return Err(CliError(format!("{violations} instances where node reduction beat the postman tour")));
            }
            Ok(EXIT_OK)
        }
    }
}

/// Reads the navigation model named by the configuration.
///
/// `folder` is either one input file or a directory. A directory must hold
/// exactly one `.xml` or `.nav` file; every `.html` script in it is merged.
pub fn load_model(kind: NavigationType, folder: &Path) -> Result<NavigationModel, CliError> {
    let files = if folder.is_dir() {
        let mut files: Vec<PathBuf> = std::fs::read_dir(folder)
            .map_err(context(folder.display()))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.is_file() && p.extension().is_some_and(|x| x == kind.extension()))
            .collect();
        files.sort();
        files
    } else if folder.is_file() {
        vec![folder.to_owned()]
    } else {
        return Err(CliError(format!("navigation-folder {} does not exist", folder.display())));
    };
    if files.is_empty() {
        return Err(CliError(format!("no .{} input in {}", kind.extension(), folder.display())));
    }
    if kind != NavigationType::Html && files.len() > 1 {
        return Err(CliError(format!("{} holds {} .{} files; expected one", folder.display(), files.len(), kind.extension())));
    }
    let read = |p: &PathBuf| std::fs::read(p).map_err(context(p.display()));
    let model = match kind {
        NavigationType::Xml => parse_xml(&decode_xml_bytes(&read(&files[0])?)),
        NavigationType::Dsl => parse_graph_dsl(&String::from_utf8_lossy(&read(&files[0])?)),
        NavigationType::Html => {
            let docs = files.iter().map(|p| read(p).map(|b| String::from_utf8_lossy(&b).into_owned())).collect::<Result<Vec<_>, _>>()?;
            parse_rnp_scripts(&docs.iter().map(String::as_str).collect::<Vec<_>>())
        }
    };
    model.map_err(context(files[0].display()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Created {
    pub project: PathBuf,
    pub plans: usize,
    pub total_cost: Rational,
}

/// Builds the project: model, one plan and one data file per tour path.
pub fn create_project(cfg: &Config, dir: &Path) -> Result<Created, CliError> {
    let folder = cfg.navigation_folder.as_deref().ok_or_else(|| CliError("navigation-folder not set".into()))?;
    let project = project_dir(cfg, dir);
    if project.join(PROJECT_MARKER).exists() || project.read_dir().is_ok_and(|mut d| d.next().is_some()) {
        return Err(CliError(format!("project exists at {}; use `navtest clean` first", project.display())));
    }
    let model = load_model(cfg.navigation_type, &Config::resolve(dir, folder))?;
    let graph = make_strongly_connected(&lower_to_graph::<Rational>(&model)).map_err(context("navigation graph"))?;
    let solution = solve_cpp(&graph).map_err(context("path generation"))?;
    let plans = generate_plans(&model, &solution.paths, &dictionary_default(cfg.seed)).map_err(context("test generation"))?;

    for sub in [PLANS_DIR, DATA_DIR, REPORTS_DIR] {
        std::fs::create_dir_all(project.join(sub)).map_err(context(project.display()))?;
    }
    let write = |path: PathBuf, text: String| std::fs::write(&path, text).map_err(context(path.display()));
    write(project.join(PROJECT_MARKER), format!("seed={}\n", cfg.seed))?;
    write(project.join(MODEL_FILE), serde_json::to_string_pretty(&model).expect("model serializes"))?;
    for plan in &plans {
        write(project.join(PLANS_DIR).join(format!("{}.json", plan.id)), serde_json::to_string_pretty(plan).expect("plan serializes"))?;
        let csv = project.join(DATA_DIR).join(format!("{}.csv", plan.id));
        write_tabular(plan, &csv).map_err(context(csv.display()))?;
    }
    Ok(Created { project, plans: plans.len(), total_cost: solution.total_cost })
}

fn require_project(cfg: &Config, dir: &Path) -> Result<PathBuf, CliError> {
    let project = project_dir(cfg, dir);
    if !project.join(PROJECT_MARKER).is_file() {
        return Err(CliError(format!("no project at {}; use `navtest create` first", project.display())));
    }
    Ok(project)
}

/// Plans of a project in numeric order, each with the rows of its data file.
pub fn load_plans(project: &Path) -> Result<Vec<TestPlan>, CliError> {
    let plans_dir = project.join(PLANS_DIR);
    let mut plans = Vec::new();
    for entry in std::fs::read_dir(&plans_dir).map_err(context(plans_dir.display()))? {
        let path = entry.map_err(context(plans_dir.display()))?.path();
        if path.extension().is_none_or(|x| x != "json") {
            continue;
        }
        let text = std::fs::read_to_string(&path).map_err(context(path.display()))?;
        let mut plan: TestPlan = serde_json::from_str(&text).map_err(context(path.display()))?;
        let csv = project.join(DATA_DIR).join(format!("{}.csv", plan.id));
        if csv.is_file() {
            load_tabular(&mut plan, &csv).map_err(context(csv.display()))?;
        }
        plans.push(plan);
    }
    let numeric = |id: &str| id.rsplit('_').next().and_then(|n| n.parse::<u64>().ok()).unwrap_or(u64::MAX);
    plans.sort_by(|a, b| (numeric(&a.id), &a.id).cmp(&(numeric(&b.id), &b.id)));
    Ok(plans)
}

/// Executes every plan and writes the configured report files.
pub fn run_project(cfg: &Config, dir: &Path) -> Result<RunReport, CliError> {
    let project = require_project(cfg, dir)?;
    let model_path = project.join(MODEL_FILE);
    let text = std::fs::read_to_string(&model_path).map_err(context(model_path.display()))?;
    let model: NavigationModel = serde_json::from_str(&text).map_err(context(model_path.display()))?;
    let faults = match &cfg.faults {
        Some(f) => {
            let path = Config::resolve(dir, f);
            let text = std::fs::read_to_string(&path).map_err(context(path.display()))?;
            parse_faults(&text).map_err(context(path.display()))?
        }
        None => Vec::new(),
    };
    let sim = SimConfig::with_faults(model, faults).map_err(context("simulator"))?;
    let report = run_plans(&load_plans(&project)?, &sim);

    let reports = project.join(REPORTS_DIR);
    std::fs::create_dir_all(&reports).map_err(context(reports.display()))?;
    for format in &cfg.report_format {
        let body = match format {
            ReportFormat::Json => report.to_json(),
            ReportFormat::Html => report.to_html(),
            ReportFormat::Text => report.to_text(),
        };
        let path = reports.join(format.file_name());
        std::fs::write(&path, body).map_err(context(path.display()))?;
    }
    Ok(report)
}

/// Removes the project directory if `create` made it.
pub fn clean_project(cfg: &Config, dir: &Path) -> Result<String, CliError> {
    let project = project_dir(cfg, dir);
    if !project.exists() {
        return Ok(format!("nothing to clean at {}", project.display()));
    }
    if !project.join(PROJECT_MARKER).is_file() {
        return Err(CliError(format!("{} is not a navtest project; left untouched", project.display())));
    }
    std::fs::remove_dir_all(&project).map_err(context(project.display()))?;
    Ok(format!("removed {}", project.display()))
}
