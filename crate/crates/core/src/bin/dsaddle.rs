fn main() {
    std::process::exit(dsaddle::cli::run(std::env::args_os()));
}
