use std::process::ExitCode;

fn main() -> ExitCode {
    polycert::cli::main()
}
