use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(subspace_limits::cli::main_with(std::env::args_os()))
}
