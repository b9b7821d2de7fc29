use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(rarz_cli::run_cli(std::env::args_os()) as u8)
}
