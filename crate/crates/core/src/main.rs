fn main() {
    std::process::exit(ndas::cli::run_cli(std::env::args_os()));
}
