fn main() {
    std::process::exit(triplewell::cli::main_with_args(std::env::args_os()));
}
