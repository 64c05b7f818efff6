use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use la_cli::{BenchConfig, Outcome, StrategyChoice, EXIT_DATA, EXIT_OK, EXIT_USAGE};
use level_ancestor::{IndexArtifact, Strategy};

/// Constant-time level ancestor queries.
#[derive(Parser)]
#[command(name = "la", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build an index from a tree file.
    Build {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value = "two")]
        strategy: Strategy,
        /// Depth for the multi strategy.
        #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u64).range(1..))]
        levels: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Answer "LA <node> <hops>" and "FS <pos> <x>" lines.
    Query {
        #[arg(long)]
        index: PathBuf,
        /// Query script; standard input when omitted.
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Check random trees against the brute-force oracles.
    Verify {
        #[arg(long, default_value_t = 64, value_parser = clap::value_parser!(u64).range(1..))]
        n: u64,
        #[arg(long, default_value_t = 100)]
        trees: u64,
        #[arg(long, default_value = "all")]
        strategy: StrategyChoice,
        #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u64).range(1..))]
        levels: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Time build and queries over a random tree.
    Bench {
        #[arg(long, default_value_t = 100_000, value_parser = clap::value_parser!(u64).range(1..))]
        n: u64,
        #[arg(long, default_value = "two")]
        strategy: Strategy,
        #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u64).range(1..))]
        levels: u64,
        #[arg(long, default_value_t = 100_000)]
        queries: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Also replay the queries from this many concurrent readers.
        #[arg(long, default_value_t = 1)]
        threads: usize,
    },
    /// Print table sizes and bounds for an index file.
    Stats {
        #[arg(long)]
        index: PathBuf,
    },
}

fn read_file(path: &Path) -> Result<Vec<u8>, Outcome> {
    std::fs::read(path).map_err(|e| fail(format!("cannot read {}: {e}", path.display())))
}

fn fail(msg: String) -> Outcome {
    Outcome {
        stdout: String::new(),
        stderr: format!("error: {msg}\n"),
        code: EXIT_DATA,
    }
}

fn ok(stdout: String) -> Outcome {
    Outcome {
        stdout,
        stderr: String::new(),
        code: EXIT_OK,
    }
}

fn load(path: &Path) -> Result<IndexArtifact, Outcome> {
    let bytes = read_file(path)?;
    IndexArtifact::from_bytes(&bytes).map_err(|e| fail(format!("{}: {e}", path.display())))
}

fn run(command: Command) -> Result<Outcome, Outcome> {
    Ok(match command {
        Command::Build {
            input,
            strategy,
            levels,
            out,
        } => {
            let bytes = read_file(&input)?;
            let text = String::from_utf8(bytes)
                .map_err(|_| fail(format!("{} is not UTF-8", input.display())))?;
            let (artifact, report) = la_cli::build(&text, strategy, levels as usize)
                .map_err(|e| fail(format!("{}: {e}", input.display())))?;
            std::fs::write(&out, artifact.to_bytes())
                .map_err(|e| fail(format!("cannot write {}: {e}", out.display())))?;
            ok(report)
        }
        Command::Query { index, input } => {
            let artifact = load(&index)?;
            let script = match input {
                Some(path) => String::from_utf8(read_file(&path)?)
                    .map_err(|_| fail(format!("{} is not UTF-8", path.display())))?,
                None => {
                    let mut s = String::new();
                    std::io::stdin()
                        .read_to_string(&mut s)
                        .map_err(|e| fail(format!("cannot read standard input: {e}")))?;
                    s
                }
            };
            la_cli::query(&artifact, &script)
        }
        Command::Verify {
            n,
            trees,
            strategy,
            levels,
            seed,
        } => la_cli::verify(n as usize, trees as usize, strategy, levels as usize, seed),
        Command::Bench {
            n,
            strategy,
            levels,
            queries,
            seed,
            threads,
        } => la_cli::bench(&BenchConfig {
            n: n as usize,
            strategy,
            depth: levels as usize,
            queries: queries as usize,
            seed,
            threads,
        }),
        Command::Stats { index } => {
            let bytes = read_file(&index)?;
            ok(la_cli::stats(&bytes).map_err(|e| fail(format!("{}: {e}", index.display())))?)
        }
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    let outcome = run(cli.command).unwrap_or_else(|e| e);
    print!("{}", outcome.stdout);
    eprint!("{}", outcome.stderr);
    ExitCode::from(outcome.code as u8)
}
