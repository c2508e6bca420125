fn main() {
    std::process::exit(mapbayes_core::cli::run(std::env::args_os()));
}
