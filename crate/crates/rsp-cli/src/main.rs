//! `rsp` — experiment runner: randomizing-set construction and
//! verification, protocol batches, trade-off curve sweeps, entangled
//! rounds, typicality reports, and the full verification battery.
//!
//! Every command echoes its configuration and the library version into a
//! `meta` block of the output; outputs are byte-identical for identical
//! (config, seed). Wall time goes to stderr. Exit codes: 0 ok, 1 usage,
//! 2 verification failure, 3 budget exceeded.

mod commands;
mod output;

use std::process::ExitCode;

use clap::Parser;

use commands::Cli;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Clap treats --help/--version as errors that print to stdout.
            if e.use_stderr() {
                eprintln!("{e}");
                return ExitCode::from(1);
            }
            print!("{e}");
            return ExitCode::SUCCESS;
        }
    };
    let started = std::time::Instant::now();
    let code = match commands::run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            err.exit_code()
        }
    };
    eprintln!("wall time: {:.3}s", started.elapsed().as_secs_f64());
    ExitCode::from(code)
}
