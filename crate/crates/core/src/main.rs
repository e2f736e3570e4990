fn main() -> std::process::ExitCode {
    xscore::cli::main()
}
