fn main() {
    std::process::exit(opalg::cli::run(std::env::args_os()));
}
