use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(nodal_shoot::cli::main_with_args(std::env::args_os()))
}
