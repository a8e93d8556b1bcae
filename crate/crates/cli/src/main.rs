fn main() {
    std::process::exit(pregel_cli::main_with_args(std::env::args_os()))
}
