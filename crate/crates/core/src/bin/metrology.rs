use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(adaptive_metrology::cli::run(std::env::args_os()))
}
