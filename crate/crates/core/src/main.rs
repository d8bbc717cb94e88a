use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use chc::cli::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let json = cli.json;
    match run(cli.into_config()) {
        Ok(outcome) => {
            let body = if json { outcome.json_text() } else { outcome.text.clone() };
            let mut out = std::io::stdout().lock();
            let _ = out.write_all(body.as_bytes());
            if !body.ends_with('\n') {
                let _ = out.write_all(b"\n");
            }
            if let Some(msg) = &outcome.message {
                eprintln!("chc: {msg}");
            }
            ExitCode::from(outcome.exit_code)
        }
        Err(e) => {
            eprintln!("chc: {e:#}");
            ExitCode::from(2)
        }
    }
}
