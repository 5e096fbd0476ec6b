//! Laboratory comparison of node reduction and the postman tour on random
//! multidigraphs of growing size.

use std::fmt::Write as _;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::cpp::solve_cpp;
use crate::navgraph::{covers, make_strongly_connected, path_set_cost, Multidigraph};
use crate::pathalg::{node_reduction_paths, PathAlgError, DEFAULT_EXPANSION_CAP};
use crate::scalar::Weight;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchConfig {
    pub max_links: usize,
    pub repetitions: usize,
    pub seed: u64,
    /// Chance that a new link leads to a fresh vertex.
    pub new_vertex_probability: f64,
    /// Node-reduction instances whose expressions grow past this many
    /// terms are abandoned and counted as censored.
    pub expansion_cap: u64,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self { max_links: 50, repetitions: 100, seed: 0, new_vertex_probability: 0.4, expansion_cap: DEFAULT_EXPANSION_CAP }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BenchError {
    #[error("invalid benchmark configuration: {0}")]
    InvalidConfig(String),
}

impl BenchConfig {
    pub fn validate(&self) -> Result<(), BenchError> {
        if self.max_links < 1 {
            return Err(BenchError::InvalidConfig("max_links must be at least 1".into()));
        }
        if self.repetitions < 1 {
            return Err(BenchError::InvalidConfig("repetitions must be at least 1".into()));
        }
        if !(0.0..=1.0).contains(&self.new_vertex_probability) {
            return Err(BenchError::InvalidConfig("new_vertex_probability must lie in [0, 1]".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRecord<W> {
    pub links: usize,
    pub repetitions: usize,
    pub mean_cost_cpp: W,
    /// Postman cost over the instances node reduction finished, the
    /// like-for-like partner of `mean_cost_nr`.
    pub mean_cost_cpp_uncensored: Option<W>,
    /// Over uncensored instances; `None` when all were censored.
    pub mean_cost_nr: Option<W>,
    pub mean_time_cpp: Duration,
    pub mean_time_nr: Option<Duration>,
    pub max_time_cpp: Duration,
    pub censored_nr: usize,
    /// Uncensored instances where node reduction beat the postman tour.
    pub dominance_violations: usize,
    /// Instances where either path set missed an edge.
    pub coverage_failures: usize,
    /// Generated graphs discarded because reset edges could not make them
    /// strongly connected.
    pub redraws: usize,
}

impl<W: Clone> BenchRecord<W> {
    /// The record with every timing zeroed, for reproducibility checks.
    pub fn without_times(&self) -> Self {
        Self {
            mean_time_cpp: Duration::ZERO,
            mean_time_nr: self.mean_time_nr.map(|_| Duration::ZERO),
            max_time_cpp: Duration::ZERO,
            ..self.clone()
        }
    }
}

/// Grows a graph from vertex `v0` (home) one unit-weight link at a time.
/// Sources are existing vertices, so every vertex stays reachable.
pub fn random_multidigraph<W: Weight, R: Rng>(links: usize, new_vertex_probability: f64, rng: &mut R) -> Multidigraph<W> {
    let mut vertices = 1usize;
    let mut b = Multidigraph::<W>::builder("v0");
    for e in 0..links {
        let from = rng.random_range(0..vertices);
        let to = if rng.random_bool(new_vertex_probability) {
            vertices += 1;
            vertices - 1
        } else {
            rng.random_range(0..vertices)
        };
        b = b.link(format!("E{e}"), format!("v{from}"), format!("v{to}"));
    }
    b.build().expect("generated ids are unique")
}

/// A random graph already augmented with reset edges. Draws that contain a
/// closed cycle without leaves cannot be augmented and are redrawn; the
/// count of redraws is returned alongside.
pub fn random_navigation_graph<W: Weight, R: Rng>(
    links: usize,
    new_vertex_probability: f64,
    rng: &mut R,
) -> (Multidigraph<W>, usize) {
    let mut redraws = 0;
    loop {
        let g = random_multidigraph::<W, _>(links, new_vertex_probability, rng);
        match make_strongly_connected(&g) {
            Ok(g) => return (g, redraws),
            Err(_) => redraws += 1,
        }
    }
}

fn mean_duration(total: Duration, n: usize) -> Duration {
    total / u32::try_from(n).expect("repetition count fits in u32")
}

fn mean<W: Weight>(total: W, n: usize) -> W {
    total / W::from_usize(n).expect("count representable")
}

/// One record per link count from 1 to `max_links`.
pub fn run_benchmark<W: Weight>(cfg: &BenchConfig) -> Result<Vec<BenchRecord<W>>, BenchError> {
    cfg.validate()?;
    let mut records = Vec::with_capacity(cfg.max_links);
    for links in 1..=cfg.max_links {
        // an independent stream per size keeps sizes reproducible on their own
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(links as u64);
        let mut cost_cpp = W::zero();
        let mut cost_nr = W::zero();
        let mut cost_cpp_uncensored = W::zero();
        let mut time_cpp = Duration::ZERO;
        let mut time_nr = Duration::ZERO;
        let mut max_time_cpp = Duration::ZERO;
        let (mut censored, mut uncensored, mut violations, mut coverage_failures, mut redraws) = (0, 0, 0, 0, 0);
        for _ in 0..cfg.repetitions {
            let (g, r) = random_navigation_graph::<W, _>(links, cfg.new_vertex_probability, &mut rng);
            redraws += r;

            let started = Instant::now();
            let cpp = solve_cpp(&g).expect("augmented graph is strongly connected");
            let elapsed = started.elapsed();
            time_cpp += elapsed;
            max_time_cpp = max_time_cpp.max(elapsed);
            if !covers(&g, &cpp.paths) {
                coverage_failures += 1;
            }
            cost_cpp = cost_cpp + cpp.total_cost.clone();

            let started = Instant::now();
            let nr = node_reduction_paths(&g, cfg.expansion_cap);
            let elapsed = started.elapsed();
            match nr {
                Ok(paths) => {
                    time_nr += elapsed;
                    uncensored += 1;
                    if !covers(&g, &paths) {
                        coverage_failures += 1;
                    }
                    let c = path_set_cost(&paths);
                    if c < cpp.total_cost {
                        violations += 1;
                    }
                    cost_nr = cost_nr + c;
                    cost_cpp_uncensored = cost_cpp_uncensored + cpp.total_cost.clone();
                }
                Err(PathAlgError::ExpansionTooLarge(_)) => censored += 1,
                Err(_) => coverage_failures += 1,
            }
        }
        records.push(BenchRecord {
            links,
            repetitions: cfg.repetitions,
            mean_cost_cpp: mean(cost_cpp, cfg.repetitions),
            mean_cost_cpp_uncensored: (uncensored > 0).then(|| mean(cost_cpp_uncensored, uncensored)),
            mean_cost_nr: (uncensored > 0).then(|| mean(cost_nr, uncensored)),
            mean_time_cpp: mean_duration(time_cpp, cfg.repetitions),
            mean_time_nr: (uncensored > 0).then(|| mean_duration(time_nr, uncensored)),
            max_time_cpp,
            censored_nr: censored,
            dominance_violations: violations,
            coverage_failures,
            redraws,
        });
    }
    Ok(records)
}

fn ms(d: Duration) -> f64 {
    d.as_secs_f64() * 1e3
}

/// CSV with the columns `links, mean_cost_cpp, mean_cost_nr,
/// mean_time_cpp_ms, mean_time_nr_ms, censored_nr`. Means are decimal;
/// node-reduction cells are empty when every instance was censored.
pub fn bench_csv<W: Weight>(records: &[BenchRecord<W>]) -> String {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(["links", "mean_cost_cpp", "mean_cost_nr", "mean_time_cpp_ms", "mean_time_nr_ms", "censored_nr"])
        .expect("write to memory");
    for r in records {
        w.write_record([
            r.links.to_string(),
            format!("{:.4}", r.mean_cost_cpp.to_f64_lossy()),
            r.mean_cost_nr.as_ref().map(|c| format!("{:.4}", c.to_f64_lossy())).unwrap_or_default(),
            format!("{:.4}", ms(r.mean_time_cpp)),
            r.mean_time_nr.map(|t| format!("{:.4}", ms(t))).unwrap_or_default(),
            r.censored_nr.to_string(),
        ])
        .expect("write to memory");
    }
    String::from_utf8(w.into_inner().expect("flush to memory")).expect("ASCII output")
}

/// Whitespace-separated columns for gnuplot; missing values are `NaN`.
pub fn bench_gnuplot<W: Weight>(records: &[BenchRecord<W>]) -> String {
    let mut out = String::from("# links mean_cost_cpp mean_cost_nr mean_time_cpp_ms mean_time_nr_ms censored_nr\n");
    for r in records {
        let _ = writeln!(
            out,
            "{} {:.4} {} {:.4} {} {}",
            r.links,
            r.mean_cost_cpp.to_f64_lossy(),
            r.mean_cost_nr.as_ref().map_or("NaN".to_owned(), |c| format!("{:.4}", c.to_f64_lossy())),
            ms(r.mean_time_cpp),
            r.mean_time_nr.map_or("NaN".to_owned(), |t| format!("{:.4}", ms(t))),
            r.censored_nr
        );
    }
    out
}
