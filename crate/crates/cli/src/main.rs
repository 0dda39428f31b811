fn main() -> std::process::ExitCode {
    sonosim_cli::main_entry()
}
