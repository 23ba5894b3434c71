fn main() {
    std::process::exit(suq2::cli::run_cli(std::env::args_os()));
}
