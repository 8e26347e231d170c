fn main() {
    std::process::exit(kdsim::cli::main_with_args(std::env::args_os()));
}
