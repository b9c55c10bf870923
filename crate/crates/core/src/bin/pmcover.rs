fn main() {
    std::process::exit(pmcover::cli::run(std::env::args_os()));
}
