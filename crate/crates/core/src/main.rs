fn main() {
    std::process::exit(coaxfilt::cli::run(std::env::args_os()));
}
