fn main() {
    std::process::exit(bracketeer_cli::run_cli(std::env::args_os()));
}
