fn main() {
    std::process::exit(adamslab::cli::main_with_args(std::env::args_os()));
}
