fn main() {
    std::process::exit(memssp::cli::run());
}
