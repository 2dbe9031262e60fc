use std::process::ExitCode;

fn main() -> ExitCode {
    mevforge::cli::main_with_args(std::env::args_os())
}
