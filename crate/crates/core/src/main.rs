use std::io::Write;
use std::process::ExitCode;

use asailab::cli::{run, Cli};
use clap::Parser;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (out, code) = run(&cli);
    let stream = if code == 2 { std::io::stderr().write_all(out.as_bytes()) } else { std::io::stdout().write_all(out.as_bytes()) };
    stream.expect("write output");
    ExitCode::from(code as u8)
}
