use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(ellq::cli::run(std::env::args_os()))
}
