fn main() {
    std::process::exit(lpdist::cli::main_with(std::env::args_os()));
}
