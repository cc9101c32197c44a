fn main() {
    std::process::exit(swaptest_runner::cli::main_with_args(std::env::args_os()));
}
