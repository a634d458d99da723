fn main() {
    std::process::exit(whbench_core::cli::main_with_args(std::env::args_os()));
}
