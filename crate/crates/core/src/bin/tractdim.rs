fn main() {
    std::process::exit(tractdim::cli::run(std::env::args_os()));
}
