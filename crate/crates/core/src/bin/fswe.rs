fn main() {
    std::process::exit(fswe::cli::run(std::env::args_os()));
}
