fn main() -> std::process::ExitCode {
    qbm::cli::main_entry()
}
