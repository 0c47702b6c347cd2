fn main() {
    std::process::exit(curvedither_cli::run(std::env::args_os()));
}
