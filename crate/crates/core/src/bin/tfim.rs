fn main() {
    std::process::exit(tfim_qec::cli::main_with_args(std::env::args_os()));
}
