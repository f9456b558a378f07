use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(causal_lab::cli::run(std::env::args_os()) as u8)
}
