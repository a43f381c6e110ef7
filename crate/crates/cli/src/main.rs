fn main() {
    std::process::exit(isomoment_cli::run(std::env::args_os()));
}
