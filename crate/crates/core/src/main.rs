fn main() {
    std::process::exit(qfid::cli::run(std::env::args_os()));
}
