use std::process::ExitCode;

fn main() -> ExitCode {
    twospectra_cli::args::main_entry()
}
