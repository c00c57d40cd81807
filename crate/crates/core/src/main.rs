fn main() {
    std::process::exit(mbsp::cli::main_with_args(std::env::args_os()));
}
