fn main() {
    std::process::exit(cutforest::cli::main());
}
