fn main() {
    std::process::exit(klab::cli::main_with_args(std::env::args_os()));
}
