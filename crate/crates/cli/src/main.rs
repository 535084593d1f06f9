fn main() -> std::process::ExitCode {
    podreliab_cli::main_with_args(std::env::args_os())
}
