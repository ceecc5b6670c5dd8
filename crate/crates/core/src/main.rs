fn main() -> std::process::ExitCode {
    pt_nosignal::cli::main_entry()
}
