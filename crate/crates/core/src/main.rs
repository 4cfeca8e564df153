fn main() {
    std::process::exit(sparse_embed::cli::run());
}
