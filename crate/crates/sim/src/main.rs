fn main() -> std::process::ExitCode {
    mmwave_sim::cli::main()
}
