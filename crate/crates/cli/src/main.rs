fn main() {
    std::process::exit(wplab_cli::main_with_args(std::env::args_os()));
}
