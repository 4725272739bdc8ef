fn main() {
    std::process::exit(mildns::cli::run(std::env::args()));
}
