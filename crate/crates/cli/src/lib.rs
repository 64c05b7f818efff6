//! Commands behind the `la` binary. Each returns its report as text so the
//! binary only handles I/O and exit codes.

use std::fmt::Write as _;
use std::time::Instant;

use level_ancestor::{
    ancestor_oracle, fs_oracle, iter_log, level_ancestor, level_ancestor_probed,
    random::uniform_attachment_tree, ArtifactError, EulerTour, FindSmaller, FsIndex, FsInstance,
    IndexArtifact, Probe, RootedTree, Strategy,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Outcome of a command: its stdout text and exit code.
#[derive(Debug)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_DATA: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_MISMATCH: i32 = 3;

/// Either a single strategy or every strategy in turn.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StrategyChoice {
    One(Strategy),
    All,
}

impl std::str::FromStr for StrategyChoice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s == "all" {
            Ok(Self::All)
        } else {
            s.parse().map(Self::One)
        }
    }
}

impl StrategyChoice {
    pub fn strategies(self) -> Vec<Strategy> {
        match self {
            Self::One(s) => vec![s],
            Self::All => Strategy::ALL.to_vec(),
        }
    }
}

pub fn build(
    tree_text: &str,
    strategy: Strategy,
    depth: usize,
) -> Result<(IndexArtifact, String), String> {
    let tree = RootedTree::parse(tree_text).map_err(|e| format!("invalid tree: {e}"))?;
    let start = Instant::now();
    let artifact = IndexArtifact::from_tree(tree, strategy, depth).map_err(|e| e.to_string())?;
    let seconds = start.elapsed().as_secs_f64();
    let mut out = String::new();
    writeln!(out, "build_seconds={seconds:.6}").unwrap();
    write_stats(&mut out, &artifact);
    Ok((artifact, out))
}

fn write_stats(out: &mut String, artifact: &IndexArtifact) {
    let idx = &artifact.index;
    let stats = idx.stats();
    let n = idx.instance().len();
    writeln!(out, "strategy={}", idx.strategy()).unwrap();
    writeln!(out, "levels={}", idx.depth()).unwrap();
    let ks: Vec<String> = idx.block_sizes().iter().map(ToString::to_string).collect();
    writeln!(out, "block_sizes={}", ks.join(",")).unwrap();
    writeln!(out, "n={n}").unwrap();
    if let Some(part) = &artifact.tree {
        writeln!(out, "node_count={}", part.tree.node_count()).unwrap();
    }
    writeln!(out, "far_entries={}", stats.far).unwrap();
    writeln!(out, "near_entries={}", stats.near).unwrap();
    writeln!(out, "pattern_entries={}", stats.pattern).unwrap();
    writeln!(out, "aux_entries={}", stats.aux).unwrap();
    writeln!(out, "total_entries={}", stats.total()).unwrap();
}

pub fn stats(bytes: &[u8]) -> Result<String, ArtifactError> {
    let artifact = IndexArtifact::from_bytes(bytes)?;
    let mut out = String::new();
    write_stats(&mut out, &artifact);
    let idx = &artifact.index;
    let n = idx.instance().len();
    let log_ceil = (n + 1).next_power_of_two().trailing_zeros() as usize;
    match idx {
        FsIndex::Basic(_) => {
            writeln!(out, "far_bound={}", 3 * n * (log_ceil + 2)).unwrap();
        }
        FsIndex::TwoLevel(t) => {
            let k = t.decomposition().block_size();
            writeln!(out, "near_bound={}", n + k).unwrap();
            if t.pattern_table().is_some() {
                writeln!(out, "pattern_formula={}", (1usize << (k - 1)) * k * (k - 1)).unwrap();
            }
        }
        FsIndex::Multi { .. } => {}
    }
    if n >= 2 {
        for r in 1..=3 {
            writeln!(out, "iter_log{r}={:.4}", iter_log(n as f64, r)).unwrap();
        }
    }
    Ok(out)
}

/// Answers a query script line by line. Stops at the first line that does
/// not parse.
pub fn query(artifact: &IndexArtifact, script: &str) -> Outcome {
    let mut stdout = String::new();
    let mut stderr = String::new();
    let mut code = EXIT_OK;
    for (no, line) in script.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        match parse_query(line) {
            Ok(q) => stdout.push_str(&answer(artifact, q)),
            Err(e) => {
                writeln!(stderr, "line {}: {e}", no + 1).unwrap();
                code = EXIT_DATA;
                break;
            }
        }
        stdout.push('\n');
    }
    Outcome {
        stdout,
        stderr,
        code,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Query {
    La { node: usize, hops: i64 },
    Fs { pos: usize, x: i64 },
}

fn parse_query(line: &str) -> Result<Query, String> {
    let fields: Vec<&str> = line.split_whitespace().collect();
    let [kind, a, b] = fields[..] else {
        return Err(format!(
            "expected \"LA <node> <hops>\" or \"FS <pos> <x>\", found {line:?}"
        ));
    };
    let int = |s: &str| {
        s.parse::<i64>()
            .map_err(|_| format!("{s:?} is not an integer"))
    };
    let index = |s: &str| {
        s.parse::<usize>()
            .map_err(|_| format!("{s:?} is not a non-negative integer"))
    };
    match kind {
        "LA" => Ok(Query::La {
            node: index(a)?,
            hops: int(b)?,
        }),
        "FS" => Ok(Query::Fs {
            pos: index(a)?,
            x: int(b)?,
        }),
        other => Err(format!("unknown query kind {other:?}")),
    }
}

fn answer(artifact: &IndexArtifact, q: Query) -> String {
    use level_ancestor::Error;
    match q {
        Query::La { node, hops } => match &artifact.tree {
            None => "ERR notree".into(),
            Some(part) => match level_ancestor(&artifact.index, &part.tour, node, hops) {
                Ok(v) => v.to_string(),
                Err(Error::HopOutOfRange { .. }) => "ERR hops".into(),
                Err(_) => "ERR node".into(),
            },
        },
        Query::Fs { pos, x } => match artifact.index.find_smaller(pos, x) {
            Ok(Some(j)) => j.to_string(),
            Ok(None) => "NONE".into(),
            Err(_) => "ERR pos".into(),
        },
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VerifyReport {
    pub la_checks: u64,
    pub fs_checks: u64,
    pub mismatches: u64,
}

/// Checks one index over `tour` against both oracles.
pub fn verify_index(tree: &RootedTree, tour: &EulerTour, index: &FsIndex) -> VerifyReport {
    let mut report = VerifyReport::default();
    for v in 0..tree.node_count() {
        for hops in 0..=tour.node_level(v) as i64 {
            report.la_checks += 1;
            if level_ancestor(index, tour, v, hops) != ancestor_oracle(tree, v, hops) {
                report.mismatches += 1;
            }
        }
    }
    let inst = index.instance();
    let hi = inst.values().iter().copied().max().unwrap_or(0) + 1;
    for i in 1..=inst.len() {
        for x in inst.global_min() - 1..=hi {
            report.fs_checks += 1;
            if index.find_smaller(i, x) != fs_oracle(inst, i, x) {
                report.mismatches += 1;
            }
        }
    }
    report
}

pub fn verify(n: usize, trees: usize, choice: StrategyChoice, depth: usize, seed: u64) -> Outcome {
    let mut stdout = String::new();
    let mut total = 0;
    for strategy in choice.strategies() {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut report = VerifyReport::default();
        for _ in 0..trees {
            let tree = uniform_attachment_tree(n, &mut rng);
            let tour = EulerTour::build(&tree);
            let inst = FsInstance::new(tour.levels().to_vec()).expect("tour is non-empty");
            let index = FsIndex::build(strategy, inst, depth).expect("tour levels have unit steps");
            let r = verify_index(&tree, &tour, &index);
            report.la_checks += r.la_checks;
            report.fs_checks += r.fs_checks;
            report.mismatches += r.mismatches;
        }
        writeln!(stdout, "[{strategy}]").unwrap();
        writeln!(stdout, "n={n} trees={trees} levels={depth} seed={seed}").unwrap();
        writeln!(stdout, "la_checks={}", report.la_checks).unwrap();
        writeln!(stdout, "fs_checks={}", report.fs_checks).unwrap();
        writeln!(stdout, "mismatches={}", report.mismatches).unwrap();
        total += report.mismatches;
    }
    Outcome {
        stdout,
        stderr: String::new(),
        code: if total == 0 { EXIT_OK } else { EXIT_MISMATCH },
    }
}

pub struct BenchConfig {
    pub n: usize,
    pub strategy: Strategy,
    pub depth: usize,
    pub queries: usize,
    pub seed: u64,
    pub threads: usize,
}

pub fn bench(cfg: &BenchConfig) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let tree = uniform_attachment_tree(cfg.n, &mut rng);
    let start = Instant::now();
    let tour = EulerTour::build(&tree);
    let inst = FsInstance::new(tour.levels().to_vec()).expect("tour is non-empty");
    let index = FsIndex::build(cfg.strategy, inst, cfg.depth).expect("tour levels have unit steps");
    let build_seconds = start.elapsed().as_secs_f64();

    let queries: Vec<(usize, i64)> = (0..cfg.queries)
        .map(|_| {
            let v = rng.gen_range(0..cfg.n);
            (v, rng.gen_range(0..=tour.node_level(v) as i64))
        })
        .collect();

    let start = Instant::now();
    let mut reads_total = 0usize;
    let mut reads_max = 0usize;
    let mut checksum = 0u64;
    let mut answers = Vec::with_capacity(queries.len());
    for &(v, hops) in &queries {
        let mut probe = Probe::default();
        let a = level_ancestor_probed(&index, &tour, v, hops, &mut probe).expect("valid query");
        reads_total += probe.reads;
        reads_max = reads_max.max(probe.reads);
        checksum = checksum.wrapping_mul(31).wrapping_add(a as u64);
        answers.push(a);
    }
    let query_seconds = start.elapsed().as_secs_f64();

    let stats = index.stats();
    let mut out = String::new();
    writeln!(out, "strategy={}", cfg.strategy).unwrap();
    writeln!(out, "levels={}", cfg.depth).unwrap();
    writeln!(out, "n={}", cfg.n).unwrap();
    writeln!(out, "euler_len={}", tour.len()).unwrap();
    writeln!(out, "seed={}", cfg.seed).unwrap();
    writeln!(out, "build_seconds={build_seconds:.6}").unwrap();
    writeln!(out, "queries={}", queries.len()).unwrap();
    writeln!(out, "query_seconds={query_seconds:.6}").unwrap();
    let qps = if query_seconds > 0.0 {
        queries.len() as f64 / query_seconds
    } else {
        0.0
    };
    writeln!(out, "queries_per_second={qps:.0}").unwrap();
    writeln!(out, "far_entries={}", stats.far).unwrap();
    writeln!(out, "near_entries={}", stats.near).unwrap();
    writeln!(out, "pattern_entries={}", stats.pattern).unwrap();
    writeln!(out, "aux_entries={}", stats.aux).unwrap();
    writeln!(out, "total_entries={}", stats.total()).unwrap();
    writeln!(
        out,
        "entries_per_element={:.4}",
        stats.total() as f64 / tour.len() as f64
    )
    .unwrap();
    let mean = if queries.is_empty() {
        0.0
    } else {
        reads_total as f64 / queries.len() as f64
    };
    writeln!(out, "reads_mean={mean:.4}").unwrap();
    writeln!(out, "reads_max={reads_max}").unwrap();
    writeln!(out, "checksum={checksum}").unwrap();

    let mut code = EXIT_OK;
    if cfg.threads > 1 {
        let chunk = queries.len().div_ceil(cfg.threads).max(1);
        let start = Instant::now();
        let parallel: Vec<usize> = std::thread::scope(|s| {
            let handles: Vec<_> = queries
                .chunks(chunk)
                .map(|part| {
                    let (index, tour) = (&index, &tour);
                    s.spawn(move || {
                        part.iter()
                            .map(|&(v, h)| level_ancestor(index, tour, v, h).expect("valid query"))
                            .collect::<Vec<_>>()
                    })
                })
                .collect();
            handles
                .into_iter()
                .flat_map(|h| h.join().expect("reader thread"))
                .collect()
        });
        let seconds = start.elapsed().as_secs_f64();
        let consistent = parallel == answers;
        writeln!(out, "threads={}", cfg.threads).unwrap();
        writeln!(out, "parallel_query_seconds={seconds:.6}").unwrap();
        writeln!(out, "threads_consistent={consistent}").unwrap();
        if !consistent {
            code = EXIT_MISMATCH;
        }
    }
    Outcome {
        stdout: out,
        stderr: String::new(),
        code,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const T1: &str = "5 0\n-1 0 1 1 0\n";

    #[test]
    fn query_script() {
        let (art, _) = build(T1, Strategy::Basic, 1).unwrap();
        let out = query(
            &art,
            "LA 2 1\nLA 0 0\nFS 3 0\n\nLA 2 3\nFS 2 -1\nFS 10 0\nLA 9 0\n",
        );
        assert_eq!(out.stdout, "1\n0\n7\nERR hops\nNONE\nERR pos\nERR node\n");
        assert_eq!(out.code, EXIT_OK);
    }

    #[test]
    fn query_stops_at_parse_error() {
        let (art, _) = build(T1, Strategy::Two, 2).unwrap();
        let out = query(&art, "LA 2 1\nLA two 1\nLA 0 0\n");
        assert_eq!(out.stdout, "1\n");
        assert_eq!(out.code, EXIT_DATA);
        assert!(out.stderr.starts_with("line 2:"));
    }

    #[test]
    fn basic_stats_for_example() {
        let (art, report) = build(T1, Strategy::Basic, 1).unwrap();
        assert!(report.contains("n=9\n"));
        let text = stats(&art.to_bytes()).unwrap();
        assert!(text.contains("far_entries=8\n"), "{text}");
        assert!(text.contains("far_bound=162\n"), "{text}");
    }

    #[test]
    fn verify_is_clean_and_deterministic() {
        let a = verify(64, 20, StrategyChoice::All, 3, 5);
        let b = verify(64, 20, StrategyChoice::All, 3, 5);
        assert_eq!(a.code, EXIT_OK, "{}", a.stdout);
        assert_eq!(a.stdout, b.stdout);
        assert_eq!(a.stdout.matches("mismatches=0").count(), 4);
    }

    #[test]
    fn bench_reports_are_deterministic_apart_from_timing() {
        let cfg = BenchConfig {
            n: 500,
            strategy: Strategy::Table,
            depth: 2,
            queries: 2000,
            seed: 11,
            threads: 3,
        };
        let strip = |s: String| {
            s.lines()
                .filter(|l| !l.contains("seconds") && !l.starts_with("queries_per_second"))
                .collect::<Vec<_>>()
                .join("\n")
        };
        let a = bench(&cfg);
        let b = bench(&cfg);
        assert_eq!(a.code, EXIT_OK);
        assert!(a.stdout.contains("threads_consistent=true"));
        assert_eq!(strip(a.stdout), strip(b.stdout));
    }
}
