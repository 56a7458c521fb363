fn main() {
    std::process::exit(polyform::cli::run());
}
