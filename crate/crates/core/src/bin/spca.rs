fn main() {
    std::process::exit(spca::cli::run());
}
