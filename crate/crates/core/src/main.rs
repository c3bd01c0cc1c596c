fn main() {
    std::process::exit(deid::cli::run(std::env::args_os()));
}
