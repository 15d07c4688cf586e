fn main() {
    std::process::exit(reacheq::cli::main());
}
