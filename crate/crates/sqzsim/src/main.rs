fn main() {
    std::process::exit(sqzsim::cli::main());
}
