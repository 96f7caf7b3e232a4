fn main() {
    std::process::exit(mcst::cli::run(std::env::args_os()));
}
