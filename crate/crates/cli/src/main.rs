fn main() {
    std::process::exit(toric_bloch_cli::main_with_args(std::env::args_os()));
}
