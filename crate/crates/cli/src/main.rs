use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use kvgeom::corpus::list_corpus;
use kvgeom::report::Format;
use kvgeom::runner::{run, RunConfig, BUILTIN_PREFIX, EXIT_INPUT_ERROR};
use kvgeom::sampling::{DEFAULT_SAMPLES, DEFAULT_SEED};

/// Exact verification of Koszul-Vinberg structures described in scenario files.
///
/// Exit status: 0 all checks as expected, 1 a check failed, 2 parse or
/// semantic error, 3 the numeric oracle disagreed with the symbolic engine.
#[derive(Parser, Debug)]
#[command(name = "kvgeom", version)]
struct Cli {
    /// Scenario file, or `builtin:NAME` for a corpus entry. Repeatable.
    #[arg(long = "scenario", value_name = "PATH", num_args = 1..)]
    scenarios: Vec<String>,

    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    format: OutputFormat,

    /// Seed for sample points.
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,

    /// Sample points per check.
    #[arg(long, default_value_t = DEFAULT_SAMPLES)]
    samples: usize,

    /// Skip the numeric cross-check.
    #[arg(long)]
    no_oracle: bool,

    /// Stop at the first check that is not as expected.
    #[arg(long)]
    fail_fast: bool,

    /// Print the built-in scenarios and exit.
    #[arg(long)]
    list_corpus: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum OutputFormat {
    Json,
    Text,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT_ERROR } else { 0 };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    if cli.list_corpus {
        print!("{}", list_corpus());
        return ExitCode::SUCCESS;
    }
    if cli.scenarios.is_empty() {
        eprintln!("no scenarios given (use --scenario PATH or --scenario {BUILTIN_PREFIX}NAME)");
        return ExitCode::from(EXIT_INPUT_ERROR as u8);
    }
    let out = run(&RunConfig {
        scenarios: cli.scenarios,
        format: match cli.format {
            OutputFormat::Json => Format::Json,
            OutputFormat::Text => Format::Text,
        },
        seed: cli.seed,
        samples: cli.samples,
        oracle: !cli.no_oracle,
        fail_fast: cli.fail_fast,
    });
    print!("{}", out.report);
    for d in &out.diagnostics {
        eprintln!("{d}");
    }
    ExitCode::from(out.exit_code as u8)
}
