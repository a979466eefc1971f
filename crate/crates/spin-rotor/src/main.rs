use std::process::ExitCode;

fn main() -> ExitCode {
    spin_rotor::cli::run()
}
