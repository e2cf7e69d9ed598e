fn main() {
    std::process::exit(qprefix::cli::run(std::env::args_os()));
}
