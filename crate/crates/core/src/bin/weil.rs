fn main() -> std::process::ExitCode {
    weil::cli::main_entry()
}
