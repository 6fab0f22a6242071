fn main() {
    std::process::exit(gauss_squeeze::cli::run(std::env::args_os()));
}
