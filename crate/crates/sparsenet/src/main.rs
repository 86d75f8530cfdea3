fn main() {
    std::process::exit(sparsenet::cli::run(std::env::args_os()));
}
