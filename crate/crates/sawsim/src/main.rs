fn main() {
    std::process::exit(sawsim::cli::run(std::env::args_os()));
}
