fn main() {
    std::process::exit(rankbench::cli::run_cli(std::env::args_os()));
}
