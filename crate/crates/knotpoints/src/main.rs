fn main() {
    std::process::exit(knotpoints::cli::main_with(std::env::args_os()));
}
