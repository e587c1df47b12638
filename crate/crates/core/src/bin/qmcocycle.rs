fn main() {
    std::process::exit(qmcocycle::cli::main_with_args(std::env::args_os()));
}
