fn main() {
    std::process::exit(restrained_core::cli::run(std::env::args_os()));
}
