fn main() {
    noc_realloc::cli::init_logging();
    std::process::exit(noc_realloc::cli::run(std::env::args_os()));
}
