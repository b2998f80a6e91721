fn main() {
    std::process::exit(logistic_cli::run(std::env::args_os()));
}
