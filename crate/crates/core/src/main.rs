use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(copula_lab::cli::run(std::env::args_os()))
}
