mod args;
mod commands;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command, Defaults, Settings};
use commands::RunError;

fn defaults(cmd: &Command) -> Defaults {
    let n = match cmd {
        Command::Reconstruct(_) | Command::ConvergenceStudy(_) => "8,16,32,64",
        _ => "8",
    };
    Defaults { n, potential: "bump" }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cmd = &cli.command;
    let settings = match Settings::resolve(cmd.common(), defaults(cmd)) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let result = match cmd {
        Command::VerifyLemmas(_) => commands::verify_lemmas(&settings),
        Command::OperatorsBench(_) => commands::operators_bench(&settings),
        Command::CgoSolve(_) => commands::cgo_solve(&settings),
        Command::ForwardSolve(_) => commands::forward_solve(&settings),
        Command::Reconstruct(_) => commands::reconstruct(&settings),
        Command::ConvergenceStudy(_) => commands::convergence(&settings),
    };
    match result {
        Ok(checks) => {
            let mut failed = 0;
            for ch in &checks {
                println!(
                    "check name={} status={} measured={:.6e} bound={}",
                    ch.name,
                    ch.status(),
                    ch.measured,
                    ch.bound
                );
                failed += usize::from(ch.pass == Some(false));
            }
            println!("{} checks={} failed={failed}", cmd.name(), checks.len());
            if failed == 0 {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(RunError::Usage(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(RunError::Failed(e)) => {
            eprintln!("error: {e}");
            println!("{} checks=0 failed=1", cmd.name());
            ExitCode::from(1)
        }
    }
}
