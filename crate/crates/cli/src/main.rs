mod args;
mod commands;
mod input;
mod report;
mod sweep;

use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;

use args::{Cli, Command, GlobalOpts};
use report::{render, write_output, CliError, Output};

fn dispatch(g: &GlobalOpts, command: &Command) -> Result<Output, CliError> {
    match command {
        Command::Witness { input, route } => commands::witness(g, input, route),
        Command::Bounds { input, oracle, restarts } => commands::bounds(g, input, *oracle, *restarts),
        Command::Oracle { input, restarts, grid } => commands::oracle(g, input, *restarts, *grid),
        Command::Dqc1 { n, alpha, unitary, unitary_file, oracle } => commands::dqc1_cmd(
            g,
            &commands::Dqc1Args {
                n: *n,
                alpha: *alpha,
                unitary: unitary.as_deref(),
                unitary_file: unitary_file.as_deref(),
                oracle: *oracle,
            },
        ),
        Command::Circuit { input, mode, shots } => commands::circuit(g, input, *mode, *shots),
        Command::Sweep { family, count, d_a, d_b, rank } => {
            let spec = sweep::SweepSpec { family: *family, count: *count, d_a: *d_a, d_b: *d_b, rank: *rank };
            sweep::run(g, &spec).map(Output::Text)
        }
        Command::Gen { generator } => commands::gen(g, generator),
    }
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let g = &cli.global;
    if let Some(n) = g.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Output(format!("cannot start thread pool: {e}")))?;
    }
    let start = Instant::now();
    match dispatch(g, &cli.command)? {
        Output::Text(text) => write_output(&text, g.out.as_deref()),
        Output::Document { mut value, failure } => {
            if g.timings {
                value["timings"] = serde_json::json!({ "wall_clock_seconds": start.elapsed().as_secs_f64() });
            }
            write_output(&render(&value, g.format), g.out.as_deref())?;
            failure.map_or(Ok(()), Err)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
