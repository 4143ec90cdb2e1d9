fn main() {
    std::process::exit(bb84z::cli::main_with_args(std::env::args_os()));
}
