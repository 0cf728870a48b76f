fn main() {
    std::process::exit(xges::cli::run(std::env::args_os()));
}
