fn main() {
    std::process::exit(epipolicy::cli::run(std::env::args_os()));
}
