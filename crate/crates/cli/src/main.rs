mod args;
mod decide;
mod ksf;
mod output;

use std::io::Write;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use args::{Cli, Command, Format};
use output::{Outcome, UsageError, ERROR, USAGE};

fn run(cli: &Cli) -> anyhow::Result<Outcome> {
    if cli.seed.is_some() {
        return Err(UsageError("--seed is not supported: every algorithm here is deterministic".into()).into());
    }
    match &cli.command {
        Command::Decide(a) => decide::run_decide(a),
        Command::Parse { sentence } => decide::run_parse(sentence),
        Command::Usl(c) => decide::run_usl(c),
        Command::Ksf(c) => ksf::run_ksf(c),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(USAGE),
            };
        }
    };
    match run(&cli) {
        Ok(out) => {
            let text = match cli.format {
                Format::Human => out.human,
                Format::Json => serde_json::to_string_pretty(&out.json).expect("json values print") + "\n",
            };
            let mut stdout = std::io::stdout().lock();
            let _ = stdout.write_all(text.as_bytes());
            ExitCode::from(out.code)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<UsageError>().is_some() {
                ExitCode::from(USAGE)
            } else {
                ExitCode::from(ERROR)
            }
        }
    }
}
