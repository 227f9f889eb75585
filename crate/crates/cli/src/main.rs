fn main() -> std::process::ExitCode {
    thirring_cli::main_with(std::env::args_os())
}
