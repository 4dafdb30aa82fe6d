fn main() -> std::process::ExitCode {
    microdispatch::cli::main()
}
