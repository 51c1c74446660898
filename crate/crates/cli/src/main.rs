use std::process::ExitCode;

use clap::Parser;
use hololoop_cli::args::Cli;
use hololoop_cli::run::{run, Failure};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match execute(cli) {
        Ok(true) => 0,
        Ok(false) => 2,
        Err(failure) => {
            eprintln!("hololoop: {failure}");
            failure.exit_code()
        }
    };
    ExitCode::from(code as u8)
}

fn execute(cli: Cli) -> Result<bool, Failure> {
    let config = cli.job_config().map_err(Failure::Validation)?;
    let format = config.output.format;
    let path = config.output.path.clone();
    let outcome = run(config)?;
    let text = outcome.render(format)?;
    match path {
        Some(p) => {
            std::fs::write(&p, text).map_err(|e| Failure::Validation(format!("cannot write {}: {e}", p.display())))?
        }
        None => print!("{text}"),
    }
    for check in outcome.report.checks.iter().filter(|c| !c.passed) {
        let relation = if check.lower_bound { "<" } else { ">" };
        eprintln!("check failed: {} = {:.3e} {relation} {:.3e}", check.name, check.value, check.tolerance);
    }
    Ok(outcome.report.passed)
}
