use clap::Parser;

fn main() -> std::process::ExitCode {
    conelab::cli::main_with(conelab::cli::Args::parse())
}
