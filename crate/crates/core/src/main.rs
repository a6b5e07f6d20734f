fn main() {
    std::process::exit(trrg::cli::main_with_args(std::env::args_os()));
}
