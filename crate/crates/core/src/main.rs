use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(fracstable::cli::run(std::env::args()) as u8)
}
