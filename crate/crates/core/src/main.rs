fn main() {
    std::process::exit(bicon::cli::main_with_args(std::env::args_os()));
}
