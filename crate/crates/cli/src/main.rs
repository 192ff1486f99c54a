use clap::Parser;
use reacdiff_cli::args::{run_config, Cli, Command};
use reacdiff_cli::bench::run_bench;
use reacdiff_cli::{exit, run, write_summary, CliError, CliResult};
use std::process::ExitCode;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { exit::USAGE as u8 } else { 0 });
        }
    };
    match dispatch(&cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn dispatch(cli: &Cli) -> CliResult<i32> {
    if let Some(n) = cli.workers {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Usage(format!("worker pool: {e}")))?;
    }
    if let Command::Bench(b) = &cli.command {
        let report = run_bench(&b.config())?;
        print!("{}", report.render());
        if let Some(path) = &b.json {
            std::fs::write(path, serde_json::to_string_pretty(&report)?)
                .map_err(|e| CliError::io(path, e))?;
        }
        return Ok(exit::OK);
    }
    let cfg = run_config(&cli.command)?.expect("non-bench command");
    let outcome = run(&cfg)?;
    write_summary(&cfg, &outcome.summary)?;
    Ok(outcome.exit_code)
}
