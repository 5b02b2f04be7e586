fn main() {
    std::process::exit(mprod::cli::run());
}
