fn main() {
    std::process::exit(symplectica::cli::run());
}
