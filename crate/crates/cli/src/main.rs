use std::process::ExitCode;

fn main() -> ExitCode {
    pairwise_cli::main_entry()
}
