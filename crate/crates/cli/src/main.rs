use std::process::ExitCode;

use clap::{Parser, Subcommand};

use baric_cli::{emit, exec_of, fuzz_named, load_scenario, parse_field, run_scenario, run_task, CliError, Format, Output, Task};
use baric_core::verify::{Bounds, SuiteOptions};

#[derive(Parser)]
#[command(name = "baric", about = "Checks baric and staggered structures on poset representations")]
struct Cli {
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    output: Option<String>,
    /// text or json
    #[arg(long, global = true, default_value = "text")]
    format: String,
    /// Q or Fp:<p>; overrides the field of a scenario.
    #[arg(long, global = true)]
    field: Option<String>,
    /// Run cases one at a time.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run every task of a scenario file or built-in scenario.
    Verify { scenario: String },
    /// Run the full suite on random objects of a named instance.
    Fuzz {
        #[arg(long)]
        instance: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 50)]
        count: usize,
        #[arg(long, default_value_t = 3)]
        max_dim: usize,
        #[arg(long, default_value_t = -2, allow_hyphen_values = true)]
        lo_degree: i64,
        #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
        hi_degree: i64,
    },
    /// Baric truncation of a scenario object at level W.
    Truncate {
        #[arg(long)]
        scenario: String,
        #[arg(long)]
        object: String,
        #[arg(long, allow_hyphen_values = true)]
        w: i64,
    },
    /// Staggered decomposition of a scenario object.
    Stagger {
        #[arg(long)]
        scenario: String,
        #[arg(long)]
        object: String,
    },
}

fn run(cli: &Cli) -> Result<Output, CliError> {
    let field = cli.field.as_deref().map(parse_field).transpose()?;
    let opts = SuiteOptions { exec: exec_of(cli.sequential), ..Default::default() };
    match &cli.cmd {
        Cmd::Verify { scenario } => run_scenario(&load_scenario(scenario, field)?, &opts),
        Cmd::Fuzz { instance, seed, count, max_dim, lo_degree, hi_degree } => {
            let b = Bounds { max_dim: *max_dim, lo_degree: *lo_degree, hi_degree: *hi_degree };
            fuzz_named(instance, field.unwrap_or(baric_core::exactlinalg::Field::Rational), *seed, *count, &b, &opts)
        }
        Cmd::Truncate { scenario, object, w } => {
            let sc = load_scenario(scenario, field)?;
            let mut out = Output::default();
            run_task(&sc, &Task::Truncate { object: object.clone(), w: *w }, &opts, &mut out)?;
            Ok(out)
        }
        Cmd::Stagger { scenario, object } => {
            let sc = load_scenario(scenario, field)?;
            let mut out = Output::default();
            run_task(&sc, &Task::Stagger { object: object.clone() }, &opts, &mut out)?;
            Ok(out)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let result = cli.format.parse::<Format>().and_then(|f| run(&cli).map(|o| (f, o)));
    let (format, out) = match result {
        Ok(r) => r,
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::from(2);
        }
    };
    let text = emit(&out, format);
    match &cli.output {
        Some(path) => {
            if let Err(e) = std::fs::write(path, text) {
                eprintln!("{path}: {e}");
                return ExitCode::from(2);
            }
        }
        None => print!("{text}"),
    }
    ExitCode::from(if out.passed() { 0 } else { 1 })
}
