use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(lipfourier::cli::run(std::env::args_os(), |k| std::env::var(k).ok()))
}
