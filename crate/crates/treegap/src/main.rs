fn main() {
    std::process::exit(treegap::cli::run());
}
