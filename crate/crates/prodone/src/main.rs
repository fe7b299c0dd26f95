fn main() {
    std::process::exit(prodone::cli::run(std::env::args_os()));
}
