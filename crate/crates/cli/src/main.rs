fn main() {
    std::process::exit(polysemy_cli::main_with_args(std::env::args_os()));
}
