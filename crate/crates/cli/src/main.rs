use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(onebit_cli::run(std::env::args_os()) as u8)
}
