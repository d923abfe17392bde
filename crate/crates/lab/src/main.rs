fn main() {
    std::process::exit(snod_lab::cli::run(std::env::args_os()));
}
