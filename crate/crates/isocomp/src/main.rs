fn main() {
    std::process::exit(isocomp::cli::run(std::env::args_os()));
}
