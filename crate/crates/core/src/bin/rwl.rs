fn main() {
    std::process::exit(rwl_core::cli::run(std::env::args_os()));
}
