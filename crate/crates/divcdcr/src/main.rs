fn main() {
    std::process::exit(divcdcr::cli::run());
}
